use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use super::CombinatoricsError;

/// Largest `k` for which [`enumerate_dyck`] will list `D_{2k}`
/// (`Catalan(10) = 16796` paths).
pub const MAX_ENUMERATION_K: usize = 10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Step {
    Up,
    Down,
}

impl Step {
    pub fn delta(self) -> i64 {
        match self {
            Step::Up => 1,
            Step::Down => -1,
        }
    }

    pub fn from_sign(sign: i64) -> Option<Self> {
        match sign {
            1 => Some(Step::Up),
            -1 => Some(Step::Down),
            _ => None,
        }
    }

    fn bracket(self) -> char {
        match self {
            Step::Up => '(',
            Step::Down => ')',
        }
    }
}

/// A lattice path of `2k` unit steps from height 0 back to 0 that never goes
/// below 0. Written as a bracket string: `(` for up, `)` for down.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DyckPath {
    steps: Vec<Step>,
}

impl DyckPath {
    pub fn new(steps: Vec<Step>) -> Result<Self, CombinatoricsError> {
        let mut h: i64 = 0;
        for (i, s) in steps.iter().enumerate() {
            h += s.delta();
            if h < 0 {
                return Err(CombinatoricsError::Parse(format!(
                    "path goes below zero after step {}",
                    i + 1
                )));
            }
        }
        if h != 0 {
            return Err(CombinatoricsError::Parse(format!("path ends at height {h}")));
        }
        Ok(Self { steps })
    }

    pub fn from_brackets(s: &str) -> Result<Self, CombinatoricsError> {
        let steps = s
            .chars()
            .filter(|c| !c.is_whitespace())
            .map(|c| match c {
                '(' => Ok(Step::Up),
                ')' => Ok(Step::Down),
                other => Err(CombinatoricsError::Parse(format!("unexpected character `{other}`"))),
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(steps)
    }

    pub fn to_brackets(&self) -> String {
        self.steps.iter().map(|s| s.bracket()).collect()
    }

    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    /// Number of up steps, i.e. the number of tree edges.
    pub fn k(&self) -> usize {
        self.steps.len() / 2
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Heights `pi(0), .., pi(2k)`.
    pub fn heights(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.steps.len() + 1);
        let mut h = 0i64;
        out.push(0);
        for s in &self.steps {
            h += s.delta();
            out.push(h as usize);
        }
        out
    }
}

impl fmt::Display for DyckPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_brackets())
    }
}

impl FromStr for DyckPath {
    type Err = CombinatoricsError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::from_brackets(s)
    }
}

impl Serialize for DyckPath {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_brackets())
    }
}

/// `Catalan(k) = binom(2k, k) / (k + 1)`, exact for `k <= 35`.
pub fn catalan(k: usize) -> u128 {
    // C_{i+1} = C_i * 2(2i+1) / (i+2), exact at every step
    (0..k).fold(1u128, |c, i| c * (2 * (2 * i as u128 + 1)) / (i as u128 + 2))
}

/// All of `D_{2k}` in lexicographic order with `(` before `)`.
pub fn enumerate_dyck(k: usize) -> Result<Vec<DyckPath>, CombinatoricsError> {
    if k > MAX_ENUMERATION_K {
        return Err(CombinatoricsError::SizeGuard {
            what: "k",
            value: k,
            limit: MAX_ENUMERATION_K,
        });
    }
    let mut out = Vec::with_capacity(catalan(k) as usize);
    let mut prefix = Vec::with_capacity(2 * k);
    extend(&mut prefix, k, 0, 0, &mut out);
    Ok(out)
}

fn extend(prefix: &mut Vec<Step>, k: usize, ups: usize, downs: usize, out: &mut Vec<DyckPath>) {
    if downs == k {
        out.push(DyckPath {
            steps: prefix.clone(),
        });
        return;
    }
    if ups < k {
        prefix.push(Step::Up);
        extend(prefix, k, ups + 1, downs, out);
        prefix.pop();
    }
    if downs < ups {
        prefix.push(Step::Down);
        extend(prefix, k, ups, downs + 1, out);
        prefix.pop();
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalan_numbers() {
        let expected = [1u128, 1, 2, 5, 14, 42, 132, 429, 1430, 4862, 16796];
        for (k, &c) in expected.iter().enumerate() {
            assert_eq!(catalan(k), c);
        }
        assert_eq!(catalan(20), 6_564_120_420);
    }

    #[test]
    fn enumeration_counts() {
        assert_eq!(enumerate_dyck(0).unwrap(), vec![DyckPath { steps: vec![] }]);
        assert_eq!(enumerate_dyck(3).unwrap().len(), 5);
        assert_eq!(enumerate_dyck(8).unwrap().len(), 1430);
        for k in 0..=10 {
            let paths = enumerate_dyck(k).unwrap();
            assert_eq!(paths.len() as u128, catalan(k));
            assert!(paths.windows(2).all(|w| w[0] < w[1]), "sorted and distinct");
        }
    }

    #[test]
    fn enumeration_is_guarded() {
        assert!(matches!(
            enumerate_dyck(11),
            Err(CombinatoricsError::SizeGuard { value: 11, .. })
        ));
    }

    #[test]
    fn bracket_parsing() {
        let p: DyckPath = "((()())())".parse().unwrap();
        assert_eq!(p.k(), 5);
        assert_eq!(p.heights(), vec![0, 1, 2, 3, 2, 3, 2, 1, 2, 1, 0]);
        assert_eq!(p.to_string(), "((()())())");
        assert!(DyckPath::from_brackets("())(").is_err());
        assert!(DyckPath::from_brackets("((").is_err());
        assert!(DyckPath::from_brackets("(x)").is_err());
    }
}
