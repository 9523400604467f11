use crate::linalg::VarianceMatrix;

use super::dyck::{DyckPath, Step};
use super::CombinatoricsError;

pub type VertexId = usize;

/// A planar forest: every vertex has an ordered list of children, and every
/// component has an explicitly recorded root.
///
/// Splitting creates roots at arbitrary heights, so roots are stored rather
/// than derived. Vertices are never removed from the arena; a vertex that
/// ends up isolated is simply not part of any component.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlaneTree {
    children: Vec<Vec<VertexId>>,
    parent: Vec<Option<VertexId>>,
    roots: Vec<VertexId>,
}

/// Which edges stay attached to the split vertex.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SplitMode {
    /// Every child moves to its own copy.
    Complete,
    /// The leftmost child stays.
    Leftmost,
    /// The rightmost child stays.
    Rightmost,
}

impl SplitMode {
    pub const ALL: [SplitMode; 3] = [SplitMode::Complete, SplitMode::Leftmost, SplitMode::Rightmost];
}

impl PlaneTree {
    /// A single root with no edges.
    pub fn single_vertex() -> Self {
        Self {
            children: vec![Vec::new()],
            parent: vec![None],
            roots: vec![0],
        }
    }

    fn push_vertex(&mut self, parent: Option<VertexId>) -> VertexId {
        let id = self.children.len();
        self.children.push(Vec::new());
        self.parent.push(parent);
        if let Some(p) = parent {
            self.children[p].push(id);
        }
        id
    }

    /// Adds a child to the right of the existing children of `parent`.
    pub fn add_child(&mut self, parent: VertexId) -> VertexId {
        self.push_vertex(Some(parent))
    }

    pub fn roots(&self) -> &[VertexId] {
        &self.roots
    }

    pub fn children(&self, v: VertexId) -> &[VertexId] {
        &self.children[v]
    }

    pub fn parent(&self, v: VertexId) -> Option<VertexId> {
        self.parent[v]
    }

    pub fn is_root(&self, v: VertexId) -> bool {
        self.roots.contains(&v)
    }

    /// Vertices of the component rooted at `root`, in preorder.
    pub fn component(&self, root: VertexId) -> Vec<VertexId> {
        let mut out = Vec::new();
        let mut stack = vec![root];
        while let Some(v) = stack.pop() {
            out.push(v);
            stack.extend(self.children[v].iter().rev());
        }
        out
    }

    /// All vertices belonging to some component, component by component.
    pub fn vertices(&self) -> Vec<VertexId> {
        self.roots.iter().flat_map(|&r| self.component(r)).collect()
    }

    pub fn edge_count(&self) -> usize {
        self.vertices().iter().map(|&v| self.children[v].len()).sum()
    }

    pub fn component_count(&self) -> usize {
        self.roots.len()
    }

    /// Each component as a Dyck path (clockwise contour walk from its root).
    pub fn component_paths(&self) -> Vec<DyckPath> {
        self.roots.iter().map(|&r| self.contour(r)).collect()
    }

    fn contour(&self, root: VertexId) -> DyckPath {
        let mut steps = Vec::new();
        // (vertex, index of next child to visit)
        let mut stack = vec![(root, 0usize)];
        while let Some((v, i)) = stack.pop() {
            if let Some(&c) = self.children[v].get(i) {
                stack.push((v, i + 1));
                stack.push((c, 0));
                steps.push(Step::Up);
            } else if !stack.is_empty() {
                steps.push(Step::Down);
            }
        }
        DyckPath::new(steps).expect("contour of a tree is a Dyck path")
    }

    /// Chain lengths when every vertex has at most one child, in component
    /// order; `None` otherwise.
    pub fn chain_lengths(&self) -> Option<Vec<usize>> {
        let mut out = Vec::with_capacity(self.roots.len());
        for &r in &self.roots {
            let mut len = 0;
            let mut v = r;
            loop {
                match self.children[v].as_slice() {
                    [] => break,
                    [c] => {
                        len += 1;
                        v = *c;
                    }
                    _ => return None,
                }
            }
            out.push(len);
        }
        Some(out)
    }

    /// Splits `v`: its children, except the one kept by `mode`, are moved in
    /// order to fresh copies of `v`, each of which becomes the root of a new
    /// component placed right after the component of `v`. The edge set is
    /// unchanged.
    pub fn split_vertex(&self, v: VertexId, mode: SplitMode) -> Result<PlaneTree, CombinatoricsError> {
        if v >= self.children.len() || !self.vertices().contains(&v) {
            return Err(CombinatoricsError::InvalidVertex {
                vertex: v,
                reason: "not part of the forest",
            });
        }
        let kids = self.children[v].clone();
        if kids.is_empty() {
            return Err(CombinatoricsError::InvalidVertex {
                vertex: v,
                reason: "leaves cannot be split",
            });
        }
        let is_root = self.is_root(v);
        if is_root && kids.len() == 1 {
            return Err(CombinatoricsError::InvalidVertex {
                vertex: v,
                reason: "a root with one child cannot be split",
            });
        }
        let (kept, moved): (Option<VertexId>, Vec<VertexId>) = match mode {
            SplitMode::Complete => (None, kids.clone()),
            SplitMode::Leftmost => (Some(kids[0]), kids[1..].to_vec()),
            SplitMode::Rightmost => (Some(kids[kids.len() - 1]), kids[..kids.len() - 1].to_vec()),
        };
        let mut out = self.clone();
        out.children[v] = kept.into_iter().collect();
        let mut top = v;
        while let Some(p) = out.parent[top] {
            top = p;
        }
        let pos = out.roots.iter().position(|&r| r == top).expect("component root");
        let mut new_roots = Vec::with_capacity(moved.len());
        for c in moved {
            let copy = out.push_vertex(None);
            out.children[copy].push(c);
            out.parent[c] = Some(copy);
            new_roots.push(copy);
        }
        let insert_at = pos + 1;
        out.roots.splice(insert_at..insert_at, new_roots);
        if is_root && out.children[v].is_empty() {
            out.roots.retain(|&r| r != v);
        }
        Ok(out)
    }

    /// Splits every vertex with two or more children almost completely,
    /// which leaves a linear forest. `mode` must be `Leftmost` or
    /// `Rightmost`.
    pub fn chop_linear(&self, mode: SplitMode) -> PlaneTree {
        assert!(mode != SplitMode::Complete, "linear chopping keeps one child");
        let branching: Vec<VertexId> = self
            .vertices()
            .into_iter()
            .filter(|&v| self.children[v].len() >= 2)
            .collect();
        branching.into_iter().fold(self.clone(), |f, v| {
            f.split_vertex(v, mode).expect("branching vertex is splittable")
        })
    }
}

/// The plane tree whose clockwise contour is `p`.
pub fn path_to_tree(p: &DyckPath) -> PlaneTree {
    let mut t = PlaneTree::single_vertex();
    let mut current = 0;
    for s in p.steps() {
        match s {
            Step::Up => current = t.add_child(current),
            Step::Down => current = t.parent[current].expect("Dyck path never goes below 0"),
        }
    }
    t
}

/// Contour walk of a single tree.
pub fn tree_to_path(t: &PlaneTree) -> Result<DyckPath, CombinatoricsError> {
    match t.roots.as_slice() {
        [r] => Ok(t.contour(*r)),
        other => Err(CombinatoricsError::NotATree(other.len())),
    }
}

fn guard(s: &VarianceMatrix, k: usize) -> Result<(), CombinatoricsError> {
    if s.n() > 10 && k > 6 {
        return Err(CombinatoricsError::SizeGuard {
            what: "tree size k (with N > 10)",
            value: k,
            limit: 6,
        });
    }
    Ok(())
}

/// `f_root[x]`: the sum over labelings of the non-root vertices of the
/// component below `root`, with the root labelled `x`.
///
/// Contracts leaves towards the root: a vertex's vector is the entrywise
/// product of `S f_c` over its children `c`, and a leaf's vector is all ones.
fn rooted_values(s: &VarianceMatrix, t: &PlaneTree, root: VertexId) -> Vec<f64> {
    let order = t.component(root);
    let mut values: Vec<Option<Vec<f64>>> = vec![None; t.children.len()];
    for &v in order.iter().rev() {
        let mut f = vec![1.0; s.n()];
        for &c in &t.children[v] {
            let fc = values[c].take().expect("children are processed first");
            let sfc = s.matvec(&fc);
            f.iter_mut().zip(&sfc).for_each(|(a, b)| *a *= b);
        }
        values[v] = Some(f);
    }
    values[root].take().expect("root value")
}

/// `val_x(T)` for a single tree: root label fixed to `x`, every other label
/// summed, one factor `S[a][b]` per edge.
pub fn tree_val(s: &VarianceMatrix, t: &PlaneTree, x: usize) -> Result<f64, CombinatoricsError> {
    let root = match t.roots.as_slice() {
        [r] => *r,
        other => return Err(CombinatoricsError::NotATree(other.len())),
    };
    guard(s, t.edge_count())?;
    Ok(rooted_values(s, t, root)[x])
}

/// `val_x(T)` for every root label `x`.
pub fn tree_val_all(s: &VarianceMatrix, t: &PlaneTree) -> Result<Vec<f64>, CombinatoricsError> {
    let root = match t.roots.as_slice() {
        [r] => *r,
        other => return Err(CombinatoricsError::NotATree(other.len())),
    };
    guard(s, t.edge_count())?;
    Ok(rooted_values(s, t, root))
}

/// Forest value: labels of non-root vertices are summed, labels of roots are
/// maximized, i.e. the product over components of `max_x val_x`.
pub fn forest_val(s: &VarianceMatrix, f: &PlaneTree) -> Result<f64, CombinatoricsError> {
    guard(s, f.edge_count())?;
    Ok(f.roots
        .iter()
        .map(|&r| rooted_values(s, f, r).into_iter().fold(0.0, f64::max))
        .product())
}

/// Largest number of labelings [`naive_tree_val`] will visit.
const NAIVE_LIMIT: usize = 5_000_000;

/// `val_x(T)` by running over every labeling of the non-root vertices.
pub fn naive_tree_val(s: &VarianceMatrix, t: &PlaneTree, x: usize) -> Result<f64, CombinatoricsError> {
    let root = match t.roots.as_slice() {
        [r] => *r,
        other => return Err(CombinatoricsError::NotATree(other.len())),
    };
    let verts = t.component(root);
    let free = verts.len() - 1;
    let n = s.n();
    let count = (0..free).try_fold(1usize, |acc, _| acc.checked_mul(n).filter(|&c| c <= NAIVE_LIMIT));
    let count = count.ok_or(CombinatoricsError::SizeGuard {
        what: "labelings",
        value: n.saturating_pow(free as u32),
        limit: NAIVE_LIMIT,
    })?;
    let mut slot = vec![usize::MAX; t.children.len()];
    for (i, &v) in verts.iter().enumerate() {
        slot[v] = i;
    }
    let edges: Vec<(usize, usize)> = verts
        .iter()
        .flat_map(|&v| t.children[v].iter().map(move |&c| (v, c)))
        .map(|(a, b)| (slot[a], slot[b]))
        .collect();
    let mut labels = vec![0usize; verts.len()];
    labels[0] = x;
    let mut total = 0.0;
    for mut code in 0..count {
        for l in labels.iter_mut().skip(1) {
            *l = code % n;
            code /= n;
        }
        total += edges
            .iter()
            .map(|&(a, b)| s.get(labels[a], labels[b]))
            .product::<f64>();
    }
    Ok(total)
}
