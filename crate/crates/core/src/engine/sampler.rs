//! Exact samplers for "pick `v` in `[m]` with probability proportional to
//! `f(deg(v, m))`", where `m` is a historical snapshot of the current tree.
//!
//! Each sampler has a companion `*_distribution` function that evaluates the
//! law the sampler actually draws from, using the same data structures. The
//! equivalence tests compare those against [`scan_distribution`].

use rand::Rng;

use super::fenwick::Fenwick;
use super::trace::TreeTrace;
use crate::error::{Error, Result};
use crate::kernels::AttachmentKernel;

/// Sampling structures kept alongside a [`TreeTrace`].
#[derive(Debug, Clone)]
pub struct SnapshotIndex {
    fenwick: Fenwick,
    endpoints: Vec<u32>,
}

impl SnapshotIndex {
    pub fn new(capacity: usize, kernel: &AttachmentKernel<f64>) -> Self {
        let mut fenwick = Fenwick::new(capacity.max(1));
        fenwick.set(1, kernel.weight(1));
        SnapshotIndex {
            fenwick,
            endpoints: Vec::with_capacity(2 * capacity.saturating_sub(1)),
        }
    }

    pub fn from_trace(trace: &TreeTrace, kernel: &AttachmentKernel<f64>) -> Self {
        let mut index = SnapshotIndex::new(trace.len(), kernel);
        for child in 2..=trace.len() {
            let parent = trace.parent(child).expect("non-root has a parent");
            index.endpoints.push(child as u32);
            index.endpoints.push(parent as u32);
        }
        for v in 1..=trace.len() {
            index.fenwick.set(v, kernel.weight(trace.degree(v)));
        }
        index
    }

    /// Update after `child` was pushed onto `trace` under `parent`.
    pub fn record(
        &mut self,
        trace: &TreeTrace,
        child: usize,
        parent: usize,
        kernel: &AttachmentKernel<f64>,
    ) {
        self.endpoints.push(child as u32);
        self.endpoints.push(parent as u32);
        self.fenwick.set(child, kernel.weight(1));
        self.fenwick
            .set(parent, kernel.weight(trace.degree(parent)));
    }

    /// Flat endpoint list; entries `2j, 2j+1` are the child and parent of edge `j`.
    pub fn endpoints(&self) -> &[u32] {
        &self.endpoints
    }

    pub fn fenwick(&self) -> &Fenwick {
        &self.fenwick
    }

    /// Occurrences of `v` among the first `2(m-1)` endpoints.
    pub fn endpoint_count(&self, v: usize, m: usize) -> usize {
        self.endpoints[..2 * (m - 1)]
            .iter()
            .filter(|&&e| e as usize == v)
            .count()
    }
}

/// Affine kernels `f(k) = slope*k + intercept`: a uniform endpoint among the
/// first `2(m-1)` picks `v` proportionally to its degree in `T(m)`; a uniform
/// vertex of `[m]` covers the intercept.
pub fn sample_parent_affine<R: Rng + ?Sized>(
    index: &SnapshotIndex,
    m: usize,
    slope: f64,
    intercept: f64,
    rng: &mut R,
) -> usize {
    if m == 1 {
        return 1;
    }
    let edge_slots = 2 * (m - 1);
    let edge_mass = slope * edge_slots as f64;
    let vertex_mass = intercept * m as f64;
    let u: f64 = rng.random::<f64>() * (edge_mass + vertex_mass);
    if u < edge_mass {
        index.endpoints[rng.random_range(0..edge_slots)] as usize
    } else {
        rng.random_range(1..=m)
    }
}

/// Law drawn by [`sample_parent_affine`]; entry `v-1` is `P(v)`.
pub fn affine_distribution(
    index: &SnapshotIndex,
    m: usize,
    slope: f64,
    intercept: f64,
) -> Vec<f64> {
    if m == 1 {
        return vec![1.0];
    }
    let edge_slots = 2 * (m - 1);
    let edge_mass = slope * edge_slots as f64;
    let vertex_mass = intercept * m as f64;
    let total = edge_mass + vertex_mass;
    let mut p = vec![vertex_mass / total / m as f64; m];
    for &e in &index.endpoints[..edge_slots] {
        p[e as usize - 1] += edge_mass / total / edge_slots as f64;
    }
    p
}

/// Monotone kernels: propose `v` proportionally to its current weight
/// `f(deg(v, n))` within `[m]`, accept with `f(deg(v, m)) / f(deg(v, n))`.
///
/// Returns the vertex and the number of proposals used.
pub fn sample_parent_rejection<R: Rng + ?Sized>(
    trace: &TreeTrace,
    index: &SnapshotIndex,
    m: usize,
    kernel: &AttachmentKernel<f64>,
    rng: &mut R,
) -> Result<(usize, u64)> {
    if !kernel.is_monotone() {
        return Err(Error::Strategy(
            "rejection sampling needs a non-decreasing kernel; use the scan sampler".into(),
        ));
    }
    if m == 1 {
        return Ok((1, 1));
    }
    let mass = index.fenwick.prefix(m);
    let mut proposals = 0u64;
    loop {
        proposals += 1;
        let v = index.fenwick.search(rng.random::<f64>() * mass);
        if v > m {
            // float rounding at the upper edge of the prefix
            continue;
        }
        let current = index.fenwick.get(v);
        let past = kernel.weight(trace.deg_at_unchecked(v, m));
        if past >= current || rng.random::<f64>() * current < past {
            return Ok((v, proposals));
        }
    }
}

/// Law drawn by [`sample_parent_rejection`]: proposal times acceptance,
/// renormalised over the accepted mass.
pub fn rejection_distribution(
    trace: &TreeTrace,
    index: &SnapshotIndex,
    m: usize,
    kernel: &AttachmentKernel<f64>,
) -> Result<Vec<f64>> {
    if !kernel.is_monotone() {
        return Err(Error::Strategy(
            "rejection sampling needs a non-decreasing kernel".into(),
        ));
    }
    let mass = index.fenwick.prefix(m);
    let accepted: Vec<f64> = (1..=m)
        .map(|v| {
            let current = index.fenwick.get(v);
            let past = kernel.weight(trace.deg_at_unchecked(v, m));
            (current / mass) * (past / current).min(1.0)
        })
        .collect();
    let total: f64 = accepted.iter().sum();
    Ok(accepted.into_iter().map(|a| a / total).collect())
}

/// Reference sampler for any kernel: weights for all of `[m]`, then inverse CDF.
pub fn sample_parent_scan<R: Rng + ?Sized>(
    trace: &TreeTrace,
    m: usize,
    kernel: &AttachmentKernel<f64>,
    rng: &mut R,
) -> usize {
    if m == 1 {
        return 1;
    }
    let mut cumulative = Vec::with_capacity(m);
    let mut acc = 0.0;
    for v in 1..=m {
        acc += kernel.weight(trace.deg_at_unchecked(v, m));
        cumulative.push(acc);
    }
    let u = rng.random::<f64>() * acc;
    (cumulative.partition_point(|&c| c <= u) + 1).min(m)
}

/// `f(deg(v, m)) / Psi(m)` for `v` in `[m]`.
pub fn scan_distribution(trace: &TreeTrace, m: usize, kernel: &AttachmentKernel<f64>) -> Vec<f64> {
    let w: Vec<f64> = (1..=m)
        .map(|v| kernel.weight(trace.deg_at_unchecked(v, m)))
        .collect();
    let total: f64 = w.iter().sum();
    w.into_iter().map(|x| x / total).collect()
}
