use serde::Serialize;

use super::degree::DegreeHist;
use crate::error::{invalid, Result};
use crate::stats::mean_and_variance;
use crate::theory::clt_constants;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CltStatistic {
    pub n: usize,
    pub p1: f64,
    pub sigma1_sq: f64,
    /// `s_r = sqrt(n) (N_1^{(r)} / n - p_1)` per replicate.
    pub values: Vec<f64>,
    pub mean: f64,
    /// Unbiased sample variance of `values`.
    pub variance: f64,
}

impl CltStatistic {
    /// `s_r / sigma_1`.
    pub fn standardized(&self) -> Vec<f64> {
        let s = self.sigma1_sq.sqrt();
        self.values.iter().map(|v| v / s).collect()
    }
}

/// Leaf-count CLT statistic across replicate trees grown to a common `n`
/// with `f(k) = k + alpha`.
pub fn leaf_clt_statistic(hists: &[DegreeHist], alpha: f64) -> Result<CltStatistic> {
    if hists.len() < 2 {
        return invalid("the CLT statistic needs at least two replicates");
    }
    let n = hists[0].n;
    if hists.iter().any(|h| h.n != n) {
        return invalid("all replicates must share the same n");
    }
    let (p1, sigma1_sq) = clt_constants(alpha)?;
    let root_n = (n as f64).sqrt();
    let values: Vec<f64> = hists
        .iter()
        .map(|h| root_n * (h.count(1) as f64 / n as f64 - p1))
        .collect();
    let (mean, variance) = mean_and_variance(&values);
    Ok(CltStatistic {
        n,
        p1,
        sigma1_sq,
        values,
        mean,
        variance,
    })
}
