use std::collections::BTreeMap;

use crate::canonical::CanonicalTree;
use crate::engine::TreeTrace;

/// Canonical fringe of every vertex whose subtree has at most `cap` vertices;
/// `None` for larger subtrees. Indexed by vertex id (slot 0 unused).
pub fn fringe_codes(trace: &TreeTrace, cap: usize) -> Vec<Option<CanonicalTree>> {
    let n = trace.len();
    let mut size = vec![1usize; n + 1];
    let mut codes: Vec<Option<CanonicalTree>> = vec![None; n + 1];
    // children are born after their parent, so reverse birth order is bottom-up
    for v in (1..=n).rev() {
        let kids = trace.children(v);
        let s = 1 + kids.iter().map(|&c| size[c as usize]).sum::<usize>();
        size[v] = s;
        if s <= cap {
            let child_codes = kids
                .iter()
                .map(|&c| {
                    codes[c as usize]
                        .clone()
                        .expect("small subtree has small children")
                })
                .collect();
            codes[v] = Some(CanonicalTree::from_children(child_codes));
        }
    }
    codes
}

/// Counts `c_n(t)` of vertices whose fringe is `t`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FringeCensus {
    pub n: usize,
    pub cap: usize,
    pub counts: BTreeMap<CanonicalTree, u64>,
    /// Vertices whose fringe exceeds the cap.
    pub oversized: u64,
}

impl FringeCensus {
    pub fn count(&self, t: &CanonicalTree) -> u64 {
        self.counts.get(t).copied().unwrap_or(0)
    }

    pub fn truncated_mass(&self) -> f64 {
        self.oversized as f64 / self.n as f64
    }

    pub fn merge(&mut self, other: &FringeCensus) {
        for (t, c) in &other.counts {
            *self.counts.entry(t.clone()).or_insert(0) += c;
        }
        self.oversized += other.oversized;
        self.n += other.n;
    }
}

pub fn fringe_census(trace: &TreeTrace, cap: usize) -> FringeCensus {
    census_from_codes(&fringe_codes(trace, cap), cap)
}

pub fn census_from_codes(codes: &[Option<CanonicalTree>], cap: usize) -> FringeCensus {
    let mut counts = BTreeMap::new();
    let mut oversized = 0;
    for code in &codes[1..] {
        match code {
            Some(t) => *counts.entry(t.clone()).or_insert(0) += 1,
            None => oversized += 1,
        }
    }
    FringeCensus {
        n: codes.len() - 1,
        cap,
        counts,
        oversized,
    }
}

/// Counts of `(fringe of v, fringe of parent of v)` pairs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtendedFringeCensus {
    pub n: usize,
    pub cap: usize,
    pub counts: BTreeMap<(CanonicalTree, CanonicalTree), u64>,
    /// Vertices without a parent fringe inside the cap (the root included).
    pub truncated: u64,
}

impl ExtendedFringeCensus {
    pub fn count(&self, t0: &CanonicalTree, t1: &CanonicalTree) -> u64 {
        self.counts
            .get(&(t0.clone(), t1.clone()))
            .copied()
            .unwrap_or(0)
    }

    pub fn truncated_mass(&self) -> f64 {
        self.truncated as f64 / self.n as f64
    }

    pub fn merge(&mut self, other: &ExtendedFringeCensus) {
        for (k, c) in &other.counts {
            *self.counts.entry(k.clone()).or_insert(0) += c;
        }
        self.truncated += other.truncated;
        self.n += other.n;
    }
}

pub fn extended_fringe_census(trace: &TreeTrace, cap: usize) -> ExtendedFringeCensus {
    extended_census_from_codes(trace, &fringe_codes(trace, cap), cap)
}

pub fn extended_census_from_codes(
    trace: &TreeTrace,
    codes: &[Option<CanonicalTree>],
    cap: usize,
) -> ExtendedFringeCensus {
    let mut counts = BTreeMap::new();
    let mut truncated = 1; // the root
    for v in 2..=trace.len() {
        let p = trace.parent(v).expect("non-root has a parent");
        match (&codes[v], &codes[p]) {
            (Some(t0), Some(t1)) => *counts.entry((t0.clone(), t1.clone())).or_insert(0) += 1,
            _ => truncated += 1,
        }
    }
    ExtendedFringeCensus {
        n: trace.len(),
        cap,
        counts,
        truncated,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::AttachmentKernel;

    fn tree(parents: &[usize]) -> TreeTrace {
        TreeTrace::from_parents(parents, &AttachmentKernel::uniform()).unwrap()
    }

    #[test]
    fn star_and_chain() {
        let star = fringe_census(&tree(&[1; 9]), 6);
        assert_eq!(star.count(&CanonicalTree::singleton()), 9);
        assert_eq!(star.oversized, 1);
        let chain = fringe_census(&tree(&[1, 2]), 3);
        for k in 1..=3 {
            assert_eq!(chain.count(&CanonicalTree::path(k)), 1);
        }
        assert_eq!(chain.oversized, 0);
    }

    #[test]
    fn extended_examples() {
        let star = extended_fringe_census(&tree(&[1; 9]), 6);
        assert!(star.counts.is_empty());
        assert_eq!(star.truncated_mass(), 1.0);
        let chain = extended_fringe_census(&tree(&[1, 2]), 3);
        assert_eq!(
            chain.count(&CanonicalTree::singleton(), &CanonicalTree::path(2)),
            1
        );
        assert_eq!(
            chain.count(&CanonicalTree::path(2), &CanonicalTree::path(3)),
            1
        );
        assert_eq!(chain.counts.len(), 2);
    }

    #[test]
    fn codes_match_direct_canonicalisation() {
        let parents = [1, 1, 2, 2, 3, 1, 6, 6, 7, 4, 4, 4];
        let t = tree(&parents);
        let codes = fringe_codes(&t, 20);
        // the whole tree's code equals the canonical form of its parent sequence
        assert_eq!(
            codes[1].as_ref().unwrap(),
            &CanonicalTree::from_parents(&parents).unwrap()
        );
    }
}
