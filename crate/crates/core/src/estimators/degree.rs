use serde::Serialize;

use crate::engine::TreeTrace;

/// Degree counts `N_k(n)` of a tree; `counts[k]` for `k >= 1`, `counts[0] = 0`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DegreeHist {
    pub n: usize,
    pub counts: Vec<u64>,
}

impl DegreeHist {
    pub fn count(&self, k: usize) -> u64 {
        self.counts.get(k).copied().unwrap_or(0)
    }

    pub fn max_degree(&self) -> usize {
        self.counts.len().saturating_sub(1)
    }

    /// `N_k(n) / n` for `k = 1..=k_max`.
    pub fn proportions(&self, k_max: usize) -> Vec<f64> {
        (1..=k_max)
            .map(|k| self.count(k) as f64 / self.n as f64)
            .collect()
    }

    /// Add another histogram's counts (pooling replicates).
    pub fn merge(&mut self, other: &DegreeHist) {
        if other.counts.len() > self.counts.len() {
            self.counts.resize(other.counts.len(), 0);
        }
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
        self.n += other.n;
    }
}

pub fn degree_hist(trace: &TreeTrace) -> DegreeHist {
    let n = trace.len();
    let mut counts = vec![0u64; 2];
    for v in 1..=n {
        let d = trace.degree(v);
        if d >= counts.len() {
            counts.resize(d + 1, 0);
        }
        counts[d] += 1;
    }
    DegreeHist { n, counts }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::AttachmentKernel;

    fn tree(parents: &[usize]) -> TreeTrace {
        TreeTrace::from_parents(parents, &AttachmentKernel::uniform()).unwrap()
    }

    #[test]
    fn examples() {
        let star = degree_hist(&tree(&[1; 9]));
        assert_eq!(star.count(1), 9);
        assert_eq!(star.count(9), 1);
        let chain: Vec<usize> = (1..10).collect();
        let h = degree_hist(&tree(&chain));
        assert_eq!((h.count(1), h.count(2)), (2, 8));
        let two = degree_hist(&tree(&[1]));
        assert_eq!(two.count(1), 2);
        assert_eq!(two.max_degree(), 1);
    }

    #[test]
    fn handshake() {
        let h = degree_hist(&tree(&[1, 1, 2, 2, 3, 1, 6, 6, 6]));
        let total: u64 = h.counts.iter().sum();
        let ends: u64 = h.counts.iter().enumerate().map(|(k, c)| k as u64 * c).sum();
        assert_eq!(total, 10);
        assert_eq!(ends, 18);
    }
}
