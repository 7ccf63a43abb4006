use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{invalid, Result};
use crate::kernels::{snapshot_time, DelayLaw};
use crate::stats::mean_and_variance;

/// How to evaluate expectations over the delay.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ScanMethod {
    /// Sum over the integer values of the snapshot time using the law's
    /// exact CDF and partial means.
    Exact,
    MonteCarlo {
        samples: usize,
        seed: u64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Satisfied,
    Violated,
    Inconclusive,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Satisfied => "satisfied",
            Verdict::Violated => "violated",
            Verdict::Inconclusive => "inconclusive",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DelayScanRow {
    pub n: usize,
    /// `e_n = E[n^beta xi 1{n - n^beta xi >= 1} / floor(n - n^beta xi)]`.
    pub e_n: f64,
    pub stderr: f64,
    /// `n log n P(n - 1 < X <= n)` with `X = xi^{1/(1-beta)}`.
    pub tail_term: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DelayScan {
    pub rows: Vec<DelayScanRow>,
    /// Whether `n log n P(ceil(X) = n) -> 0`, decided from the tail of the law.
    pub tail_condition_holds: bool,
    pub e_n_non_increasing: bool,
    pub verdict: Verdict,
}

/// Bin `j` of the snapshot time: `floor(n - n^beta xi) = j` iff
/// `xi` lies in `((n-j-1)/n^beta, (n-j)/n^beta]`. Returns the first bin with
/// positive probability.
fn first_bin(delay: &DelayLaw, n: usize) -> usize {
    let nb = (n as f64).powf(delay.beta());
    let top = delay.support_max();
    if top.is_finite() {
        let reach = (top * nb).ceil() as usize + 1;
        n.saturating_sub(reach).max(1)
    } else {
        1
    }
}

/// `e_n` by exact summation over snapshot bins.
pub fn e_n_exact(delay: &DelayLaw, n: usize) -> f64 {
    let nb = (n as f64).powf(delay.beta());
    let mut total = 0.0;
    for j in first_bin(delay, n)..=n {
        let lo = (n - j) as f64 - 1.0;
        let hi = (n - j) as f64;
        let mean = delay.partial_mean(lo / nb, hi / nb);
        if mean > 0.0 {
            total += nb * mean / j as f64;
        }
    }
    total
}

/// `E[1{n - n^beta xi >= 1} / floor(n - n^beta xi)]`.
pub fn inverse_snapshot_mean(delay: &DelayLaw, n: usize) -> f64 {
    let nb = (n as f64).powf(delay.beta());
    let mut total = 0.0;
    for j in first_bin(delay, n)..=n {
        let lo = (n - j) as f64 - 1.0;
        let hi = (n - j) as f64;
        let p = if j == n {
            delay.cdf(0.0)
        } else {
            delay.prob_between(lo / nb, hi / nb)
        };
        total += p / j as f64;
    }
    total
}

/// `P(n - n^beta xi < 1)`.
pub fn clamp_probability(delay: &DelayLaw, n: usize) -> f64 {
    let nb = (n as f64).powf(delay.beta());
    1.0 - delay.cdf((n as f64 - 1.0) / nb)
}

fn e_n_monte_carlo(delay: &DelayLaw, n: usize, samples: usize, seed: u64) -> (f64, f64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (n as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    let nb = (n as f64).powf(delay.beta());
    let draws: Vec<f64> = (0..samples)
        .map(|_| {
            let xi = delay.sample(&mut rng);
            let x = n as f64 - nb * xi;
            if x >= 1.0 {
                nb * xi / snapshot_time(n, xi, delay.beta()) as f64
            } else {
                0.0
            }
        })
        .collect();
    let (mean, var) = mean_and_variance(&draws);
    (mean, (var / samples as f64).sqrt())
}

fn tail_condition_holds(delay: &DelayLaw) -> bool {
    // P(n-1 < X <= n) ~ g n^{-g-1} for tail index g > 0, so the term is ~ n^{-g} log n
    delay.x_tail_index().is_none_or(|g| g > 0.0)
}

/// Tabulate `e_n` over `grid` and judge the delay conditions.
pub fn delay_condition_scan(
    delay: &DelayLaw,
    grid: &[usize],
    method: ScanMethod,
) -> Result<DelayScan> {
    if grid.is_empty() || grid.windows(2).any(|w| w[0] >= w[1]) || grid[0] < 2 {
        return invalid("n grid must be strictly increasing and start at n >= 2");
    }
    let r = 1.0 / (1.0 - delay.beta());
    let rows: Vec<DelayScanRow> = grid
        .iter()
        .map(|&n| {
            let (e_n, stderr) = match method {
                ScanMethod::Exact => (e_n_exact(delay, n), 0.0),
                ScanMethod::MonteCarlo { samples, seed } => {
                    e_n_monte_carlo(delay, n, samples, seed)
                }
            };
            let nf = n as f64;
            // X in (n-1, n] iff xi in ((n-1)^{1/r}, n^{1/r}]
            let p = delay.prob_between((nf - 1.0).powf(1.0 / r), nf.powf(1.0 / r));
            DelayScanRow {
                n,
                e_n,
                stderr,
                tail_term: nf * nf.ln() * p,
            }
        })
        .collect();
    let slack =
        |a: &DelayScanRow, b: &DelayScanRow| 1e-12 * a.e_n.abs() + 2.0 * (a.stderr + b.stderr);
    let non_increasing = rows
        .windows(2)
        .all(|w| w[1].e_n <= w[0].e_n + slack(&w[0], &w[1]));
    let first = &rows[0];
    let last = &rows[rows.len() - 1];
    let holds = tail_condition_holds(delay);
    let verdict = if holds && non_increasing {
        Verdict::Satisfied
    } else if rows.len() > 1 && last.e_n > first.e_n + slack(first, last) {
        Verdict::Violated
    } else {
        Verdict::Inconclusive
    };
    Ok(DelayScan {
        rows,
        tail_condition_holds: holds,
        e_n_non_increasing: non_increasing,
        verdict,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CenteringPoint {
    pub n: usize,
    /// Deterministic part of the random centering with `A_n` replaced by 1.
    pub x_n: f64,
    /// `sqrt(n) (x_n / n - p_1)`.
    pub scaled_gap: f64,
    /// Bound on `|A_n - 1|`: `gamma e_n + P(n - n^beta xi < 1)`.
    pub a_error_bound: f64,
}

/// Iterate `X_{n+1} = k_n X_n + 1` from `X_1 = 1`, with
/// `k_n = 1 - gamma E[1{n - n^beta xi >= 1} / floor(n - n^beta xi)]` and
/// `gamma = (1+alpha)/(2+alpha)`; reported at the grid points.
///
/// Each `k_n` costs `O(n)` for unbounded delays, so the whole run is
/// quadratic in `max(grid)`.
pub fn random_centering(
    delay: &DelayLaw,
    alpha: f64,
    grid: &[usize],
) -> Result<Vec<CenteringPoint>> {
    if !(alpha >= 0.0) {
        return invalid("alpha must be >= 0");
    }
    if grid.is_empty() || grid.windows(2).any(|w| w[0] >= w[1]) || grid[0] < 1 {
        return invalid("n grid must be strictly increasing and positive");
    }
    let gamma = (1.0 + alpha) / (2.0 + alpha);
    let p1 = (2.0 + alpha) / (3.0 + 2.0 * alpha);
    let mut out = Vec::with_capacity(grid.len());
    let mut x = 1.0;
    let mut next = 0;
    for n in 1..=grid[grid.len() - 1] {
        if n == grid[next] {
            let nf = n as f64;
            let a_err = if n >= 2 {
                gamma * e_n_exact(delay, n) + clamp_probability(delay, n)
            } else {
                0.0
            };
            out.push(CenteringPoint {
                n,
                x_n: x,
                scaled_gap: nf.sqrt() * (x / nf - p1),
                a_error_bound: a_err,
            });
            next += 1;
        }
        let k = 1.0 - gamma * inverse_snapshot_mean(delay, n);
        x = k * x + 1.0;
    }
    Ok(out)
}
