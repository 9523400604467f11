use serde::Serialize;

use crate::linalg::NormSequence;

use super::dyck::Step;

/// Counts of maximal up-runs and down-runs by length.
///
/// `up[j-1]` is the number of up-runs of length exactly `j` for `j <= J`;
/// longer runs are listed by length in `up_overflow`. Same for down-runs.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RunStats {
    #[serde(rename = "J")]
    pub j: usize,
    pub up: Vec<usize>,
    pub down: Vec<usize>,
    pub up_overflow: Vec<usize>,
    pub down_overflow: Vec<usize>,
}

impl RunStats {
    /// `sum_j j (U_j + D_j)` plus the overflow lengths; equals the number of
    /// steps.
    pub fn total_length(&self) -> usize {
        let weighted = |c: &[usize]| c.iter().enumerate().map(|(i, n)| (i + 1) * n).sum::<usize>();
        weighted(&self.up)
            + weighted(&self.down)
            + self.up_overflow.iter().sum::<usize>()
            + self.down_overflow.iter().sum::<usize>()
    }

    /// `z^U = prod_{j<=J} z_j^{U_j}`. Runs longer than `J` carry weight 1.
    pub fn up_weight(&self, z: &NormSequence) -> f64 {
        weight(&self.up, z)
    }

    /// `z^D`, same conventions as [`RunStats::up_weight`].
    pub fn down_weight(&self, z: &NormSequence) -> f64 {
        weight(&self.down, z)
    }
}

fn weight(counts: &[usize], z: &NormSequence) -> f64 {
    counts
        .iter()
        .enumerate()
        .map(|(i, &c)| z.z(i + 1).powi(c as i32))
        .product()
}

pub fn run_statistics(steps: &[Step], big_j: usize) -> RunStats {
    assert!(big_j >= 1, "run statistics need J >= 1");
    let mut stats = RunStats {
        j: big_j,
        up: vec![0; big_j],
        down: vec![0; big_j],
        up_overflow: Vec::new(),
        down_overflow: Vec::new(),
    };
    let mut record = |dir: Step, len: usize| {
        let (counts, overflow) = match dir {
            Step::Up => (&mut stats.up, &mut stats.up_overflow),
            Step::Down => (&mut stats.down, &mut stats.down_overflow),
        };
        if len <= big_j {
            counts[len - 1] += 1;
        } else {
            overflow.push(len);
        }
    };
    let mut iter = steps.iter().copied();
    if let Some(first) = iter.next() {
        let (mut dir, mut len) = (first, 1);
        for s in iter {
            if s == dir {
                len += 1;
            } else {
                record(dir, len);
                dir = s;
                len = 1;
            }
        }
        record(dir, len);
    }
    stats
}
