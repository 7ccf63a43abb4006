use crate::error::{invalid, Result};
use crate::kernels::AttachmentKernel;

/// Degree of vertex `v` given its child count: graph degree, with the root
/// held at 1 before it has children.
#[inline]
pub(crate) fn degree_from_children(v: usize, children: usize) -> usize {
    if v == 1 {
        children.max(1)
    } else {
        children + 1
    }
}

/// Append-only record of a grown tree `T(1), ..., T(n)`.
///
/// Vertices are numbered `1..=n` by birth time. Because children arrive in
/// time order, each vertex's child list doubles as a sorted list of child
/// birth times, so any historical degree is a binary search away.
#[derive(Debug, Clone, PartialEq)]
pub struct TreeTrace {
    parent: Vec<u32>,
    children: Vec<Vec<u32>>,
    psi: Vec<f64>,
    xi: Vec<f64>,
    snapshot: Vec<u32>,
}

impl TreeTrace {
    /// `T(1)`: the root alone.
    pub fn new(kernel: &AttachmentKernel<f64>) -> Self {
        Self::with_capacity(kernel, 1)
    }

    pub fn with_capacity(kernel: &AttachmentKernel<f64>, capacity: usize) -> Self {
        let cap = capacity + 1;
        let mut t = TreeTrace {
            parent: Vec::with_capacity(cap),
            children: Vec::with_capacity(cap),
            psi: Vec::with_capacity(cap),
            xi: Vec::with_capacity(cap),
            snapshot: Vec::with_capacity(cap),
        };
        // slot 0 is a placeholder so vertex ids index directly
        t.parent.extend([0, 0]);
        t.children.extend([Vec::new(), Vec::new()]);
        t.psi.extend([0.0, kernel.weight(1)]);
        t.xi.extend([0.0, 0.0]);
        t.snapshot.extend([0, 0]);
        t
    }

    /// Rebuild a tree from `parents[j]` = parent of vertex `j + 2`.
    pub fn from_parents(parents: &[usize], kernel: &AttachmentKernel<f64>) -> Result<Self> {
        let mut t = Self::with_capacity(kernel, parents.len() + 1);
        for (j, &p) in parents.iter().enumerate() {
            let child = j + 2;
            if p == 0 || p >= child {
                return invalid(format!("vertex {child} cannot have parent {p}"));
            }
            t.push(p, 0.0, child - 1, kernel);
        }
        Ok(t)
    }

    /// Number of vertices `n`.
    pub fn len(&self) -> usize {
        self.parent.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn parent(&self, v: usize) -> Option<usize> {
        match self.parent[v] {
            0 => None,
            p => Some(p as usize),
        }
    }

    /// Children of `v` in birth order (equivalently, their birth times).
    pub fn children(&self, v: usize) -> &[u32] {
        &self.children[v]
    }

    /// Delay drawn when `v` arrived (0 for the two forced vertices).
    pub fn xi(&self, v: usize) -> f64 {
        self.xi[v]
    }

    /// Snapshot time `v` used to choose its parent (0 for the root).
    pub fn snapshot(&self, v: usize) -> usize {
        self.snapshot[v] as usize
    }

    #[inline]
    pub(crate) fn children_at(&self, v: usize, m: usize) -> usize {
        self.children[v].partition_point(|&t| t as usize <= m)
    }

    /// `deg(v, m)` without bounds checks; `1 <= v`, `m <= n`.
    #[inline]
    pub(crate) fn deg_at_unchecked(&self, v: usize, m: usize) -> usize {
        if v > m {
            0
        } else {
            degree_from_children(v, self.children_at(v, m))
        }
    }

    /// Degree of `v` in `T(m)`; 0 when `v` is not yet born.
    pub fn deg_at(&self, v: usize, m: usize) -> Result<usize> {
        if v == 0 || m == 0 {
            return invalid("vertices and times start at 1");
        }
        if m > self.len() {
            return invalid(format!(
                "time {m} is beyond the trace length {}",
                self.len()
            ));
        }
        Ok(self.deg_at_unchecked(v, m))
    }

    /// Degree of `v` in the current tree.
    pub fn degree(&self, v: usize) -> usize {
        degree_from_children(v, self.children[v].len())
    }

    /// `Psi(m) = sum over v in T(m) of f(deg(v, m))`, as maintained during growth.
    pub fn psi(&self, m: usize) -> f64 {
        self.psi[m]
    }

    /// `Psi(m)` recomputed from scratch.
    pub fn recompute_psi(&self, m: usize, kernel: &AttachmentKernel<f64>) -> f64 {
        (1..=m)
            .map(|v| kernel.weight(self.deg_at_unchecked(v, m)))
            .sum()
    }

    /// Attach a new vertex to `parent`; returns the new vertex id.
    pub fn push(
        &mut self,
        parent: usize,
        xi: f64,
        snapshot: usize,
        kernel: &AttachmentKernel<f64>,
    ) -> usize {
        let n = self.len();
        debug_assert!(parent >= 1 && parent <= n);
        let child = n + 1;
        let old = self.degree(parent);
        self.children[parent].push(child as u32);
        let new = self.degree(parent);
        let psi = self.psi[n] + kernel.weight(1) + kernel.weight(new) - kernel.weight(old);
        self.parent.push(parent as u32);
        self.children.push(Vec::new());
        self.psi.push(psi);
        self.xi.push(xi);
        self.snapshot.push(snapshot as u32);
        child
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain(n: usize) -> TreeTrace {
        let parents: Vec<usize> = (1..n).collect();
        TreeTrace::from_parents(&parents, &AttachmentKernel::affine(0.0).unwrap()).unwrap()
    }

    #[test]
    fn deg_at_examples() {
        let t = chain(6);
        assert_eq!(t.deg_at(1, 1).unwrap(), 1);
        assert_eq!(t.deg_at(5, 3).unwrap(), 0);
        // the root of a path keeps a single edge
        assert_eq!(t.deg_at(1, 6).unwrap(), 1);
        assert_eq!(t.deg_at(3, 6).unwrap(), 2);
        assert_eq!(t.deg_at(6, 6).unwrap(), 1);
        assert!(t.deg_at(1, 7).is_err());
        assert!(t.deg_at(0, 2).is_err());
    }

    #[test]
    fn star_degrees_and_psi() {
        let k = AttachmentKernel::affine(0.0).unwrap();
        let t = TreeTrace::from_parents(&[1, 1], &k).unwrap();
        assert_eq!(t.degree(1), 2);
        assert_eq!(t.psi(3), 4.0);
        assert_eq!(t.psi(2), 2.0);
        assert_eq!(t.psi(1), 1.0);
    }

    #[test]
    fn affine_psi_identity() {
        let alpha = 0.75;
        let k = AttachmentKernel::affine(alpha).unwrap();
        let parents = [1, 1, 2, 3, 3, 1, 5, 2];
        let t = TreeTrace::from_parents(&parents, &k).unwrap();
        for m in 2..=t.len() {
            let expected = 2.0 * (m as f64 - 1.0) + m as f64 * alpha;
            assert_eq!(t.psi(m), expected);
            assert_eq!(t.recompute_psi(m, &k), expected);
        }
    }

    #[test]
    fn rejects_non_recursive_parents() {
        let k = AttachmentKernel::uniform();
        assert!(TreeTrace::from_parents(&[2], &k).is_err());
        assert!(TreeTrace::from_parents(&[0], &k).is_err());
    }
}
