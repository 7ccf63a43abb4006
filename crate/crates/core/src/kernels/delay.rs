//! Delay laws `xi ~ mu` and the snapshot rule `m = max(floor(n - n^beta xi), 1)`.
//!
//! Besides sampling, each built-in family exposes the exact quantities the
//! diagnostics need: CDF, truncated first moments `E[xi; a < xi <= b]`, the
//! tail index of `X = xi^{1/(1-beta)}` and `E[X ∧ n]`.

use std::fmt;

use rand::distr::Open01;
use rand::Rng;

use crate::error::{invalid, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum DelayKind {
    Zero,
    Constant(f64),
    Uniform01,
    /// `xi = U^{-p}`.
    InversePowerOfUniform(f64),
    /// `P(xi > x) = (scale / x)^tail` for `x >= scale`.
    Pareto {
        tail: f64,
        scale: f64,
    },
    /// Piecewise-linear quantile function through `(u, q)` knots, `u` from 0 to 1.
    QuantileTable(Vec<(f64, f64)>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct DelayLaw {
    kind: DelayKind,
    beta: f64,
}

/// `max(floor(n - n^beta * xi), 1)`.
///
/// The product is formed in double precision and floored afterwards, so exact
/// integer ties round down.
pub fn snapshot_time(n: usize, xi: f64, beta: f64) -> usize {
    debug_assert!(n >= 1);
    if xi == 0.0 {
        return n;
    }
    let x = n as f64 - (n as f64).powf(beta) * xi;
    if !(x >= 1.0) {
        return 1;
    }
    (x.floor() as usize).min(n)
}

impl DelayLaw {
    pub fn new(kind: DelayKind, beta: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&beta) {
            return invalid(format!("beta must lie in [0, 1), got {beta}"));
        }
        match &kind {
            DelayKind::Zero | DelayKind::Uniform01 => {}
            DelayKind::Constant(c) => {
                if !(c.is_finite() && *c >= 0.0) {
                    return invalid(format!("constant delay must be finite and >= 0, got {c}"));
                }
            }
            DelayKind::InversePowerOfUniform(p) => {
                if !(p.is_finite() && *p > 0.0) {
                    return invalid(format!("inverse-power exponent must be > 0, got {p}"));
                }
            }
            DelayKind::Pareto { tail, scale } => {
                if !(tail.is_finite() && *tail > 0.0 && scale.is_finite() && *scale > 0.0) {
                    return invalid("pareto delay needs tail > 0 and scale > 0");
                }
            }
            DelayKind::QuantileTable(knots) => validate_knots(knots)?,
        }
        Ok(DelayLaw { kind, beta })
    }

    pub fn zero(beta: f64) -> Result<Self> {
        Self::new(DelayKind::Zero, beta)
    }

    pub fn kind(&self) -> &DelayKind {
        &self.kind
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.kind, DelayKind::Zero)
            || matches!(self.kind, DelayKind::Constant(c) if c == 0.0)
    }

    /// Non-decreasing quantile function on `(0, 1)`.
    pub fn quantile(&self, u: f64) -> f64 {
        match &self.kind {
            DelayKind::Zero => 0.0,
            DelayKind::Constant(c) => *c,
            DelayKind::Uniform01 => u,
            DelayKind::InversePowerOfUniform(p) => (1.0 - u).powf(-p),
            DelayKind::Pareto { tail, scale } => scale * (1.0 - u).powf(-1.0 / tail),
            DelayKind::QuantileTable(knots) => table_quantile(knots, u),
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match &self.kind {
            DelayKind::Zero => 0.0,
            DelayKind::Constant(c) => *c,
            _ => {
                let u: f64 = rng.sample(Open01);
                self.quantile(u)
            }
        }
    }

    /// Least upper bound of the support (`inf` when unbounded).
    pub fn support_max(&self) -> f64 {
        match &self.kind {
            DelayKind::Zero => 0.0,
            DelayKind::Constant(c) => *c,
            DelayKind::Uniform01 => 1.0,
            DelayKind::InversePowerOfUniform(_) | DelayKind::Pareto { .. } => f64::INFINITY,
            DelayKind::QuantileTable(knots) => knots[knots.len() - 1].1,
        }
    }

    /// `P(xi <= x)`.
    pub fn cdf(&self, x: f64) -> f64 {
        match &self.kind {
            DelayKind::Zero => step(x, 0.0),
            DelayKind::Constant(c) => step(x, *c),
            DelayKind::Uniform01 => x.clamp(0.0, 1.0),
            DelayKind::InversePowerOfUniform(p) => {
                if x < 1.0 {
                    0.0
                } else {
                    1.0 - x.powf(-1.0 / p)
                }
            }
            DelayKind::Pareto { tail, scale } => {
                if x < *scale {
                    0.0
                } else {
                    1.0 - (scale / x).powf(*tail)
                }
            }
            DelayKind::QuantileTable(knots) => table_cdf(knots, x),
        }
    }

    /// `P(a < xi <= b)`.
    pub fn prob_between(&self, a: f64, b: f64) -> f64 {
        if b <= a {
            return 0.0;
        }
        (self.cdf(b) - self.cdf(a)).max(0.0)
    }

    /// `E[xi; a < xi <= b]`, exact for every built-in family.
    pub fn partial_mean(&self, a: f64, b: f64) -> f64 {
        if b <= a {
            return 0.0;
        }
        match &self.kind {
            DelayKind::Zero => 0.0,
            DelayKind::Constant(c) => {
                if a < *c && *c <= b {
                    *c
                } else {
                    0.0
                }
            }
            DelayKind::Uniform01 => {
                let lo = a.max(0.0);
                let hi = b.min(1.0);
                if hi <= lo {
                    0.0
                } else {
                    0.5 * (hi * hi - lo * lo)
                }
            }
            DelayKind::InversePowerOfUniform(p) => power_law_partial_mean(1.0 / p, 1.0, a, b),
            DelayKind::Pareto { tail, scale } => power_law_partial_mean(*tail, *scale, a, b),
            DelayKind::QuantileTable(knots) => table_partial_mean(knots, a, b),
        }
    }

    /// Exponent `gamma` with `P(X > x) ~ c x^{-gamma}` for `X = xi^{1/(1-beta)}`;
    /// `None` for bounded support.
    pub fn x_tail_index(&self) -> Option<f64> {
        match &self.kind {
            DelayKind::InversePowerOfUniform(p) => Some((1.0 - self.beta) / p),
            DelayKind::Pareto { tail, .. } => Some(tail * (1.0 - self.beta)),
            _ => None,
        }
    }

    /// Whether `E[X^s] < inf`.
    pub fn x_moment_finite(&self, s: f64) -> bool {
        match self.x_tail_index() {
            None => true,
            Some(gamma) => gamma > s,
        }
    }

    /// `E[X ∧ n]` in closed form.
    pub fn ex_x_truncated(&self, n: f64) -> f64 {
        let r = 1.0 / (1.0 - self.beta);
        if n <= 0.0 {
            return 0.0;
        }
        match &self.kind {
            DelayKind::Zero => 0.0,
            DelayKind::Constant(c) => c.powf(r).min(n),
            DelayKind::Uniform01 => {
                // P(X > x) = 1 - x^{1/r} on [0, 1]
                let m = n.min(1.0);
                m - m.powf(1.0 + 1.0 / r) / (1.0 + 1.0 / r)
            }
            DelayKind::InversePowerOfUniform(_) | DelayKind::Pareto { .. } => {
                let (gamma, floor) = match &self.kind {
                    DelayKind::InversePowerOfUniform(p) => ((1.0 - self.beta) / p, 1.0),
                    DelayKind::Pareto { tail, scale } => (tail * (1.0 - self.beta), scale.powf(r)),
                    _ => unreachable!(),
                };
                if n <= floor {
                    return n;
                }
                // floor + ∫_floor^n (floor/x)^gamma dx
                let scale = floor.powf(gamma);
                let integral = if (gamma - 1.0).abs() < 1e-12 {
                    (n / floor).ln()
                } else {
                    (n.powf(1.0 - gamma) - floor.powf(1.0 - gamma)) / (1.0 - gamma)
                };
                floor + scale * integral
            }
            DelayKind::QuantileTable(knots) => table_ex_x_truncated(knots, r, n),
        }
    }
}

fn step(x: f64, at: f64) -> f64 {
    if x >= at {
        1.0
    } else {
        0.0
    }
}

/// `E[xi; a < xi <= b]` for density `g s^g x^{-g-1}` on `[s, inf)`.
fn power_law_partial_mean(g: f64, s: f64, a: f64, b: f64) -> f64 {
    let lo = a.max(s);
    let hi = b;
    if hi <= lo {
        return 0.0;
    }
    let c = g * s.powf(g);
    if (g - 1.0).abs() < 1e-12 {
        if hi.is_infinite() {
            return f64::INFINITY;
        }
        c * (hi / lo).ln()
    } else {
        let hi_term = if hi.is_infinite() {
            if g > 1.0 {
                0.0
            } else {
                return f64::INFINITY;
            }
        } else {
            hi.powf(1.0 - g)
        };
        c * (hi_term - lo.powf(1.0 - g)) / (1.0 - g)
    }
}

fn validate_knots(knots: &[(f64, f64)]) -> Result<()> {
    if knots.len() < 2 {
        return invalid("quantile table needs at least two knots");
    }
    if knots[0].0 != 0.0 || knots[knots.len() - 1].0 != 1.0 {
        return invalid("quantile table must span u = 0 to u = 1");
    }
    for w in knots.windows(2) {
        if !(w[1].0 > w[0].0) {
            return invalid("quantile table u values must be strictly increasing");
        }
        if w[1].1 < w[0].1 {
            return invalid("quantile table must be non-decreasing");
        }
    }
    if knots.iter().any(|(_, q)| !(q.is_finite() && *q >= 0.0)) {
        return invalid("quantile table values must be finite and >= 0");
    }
    Ok(())
}

fn table_quantile(knots: &[(f64, f64)], u: f64) -> f64 {
    let u = u.clamp(0.0, 1.0);
    let i = knots.partition_point(|(ku, _)| *ku <= u);
    if i == 0 {
        return knots[0].1;
    }
    if i >= knots.len() {
        return knots[knots.len() - 1].1;
    }
    let (u0, q0) = knots[i - 1];
    let (u1, q1) = knots[i];
    q0 + (q1 - q0) * (u - u0) / (u1 - u0)
}

fn table_cdf(knots: &[(f64, f64)], x: f64) -> f64 {
    let mut total = 0.0;
    for w in knots.windows(2) {
        let ((u0, q0), (u1, q1)) = (w[0], w[1]);
        let len = u1 - u0;
        if q1 == q0 {
            if q0 <= x {
                total += len;
            }
        } else {
            total += len * ((x - q0) / (q1 - q0)).clamp(0.0, 1.0);
        }
    }
    total.min(1.0)
}

fn table_partial_mean(knots: &[(f64, f64)], a: f64, b: f64) -> f64 {
    let mut total = 0.0;
    for w in knots.windows(2) {
        let ((u0, q0), (u1, q1)) = (w[0], w[1]);
        if q1 == q0 {
            if a < q0 && q0 <= b {
                total += q0 * (u1 - u0);
            }
            continue;
        }
        let lo = a.max(q0);
        let hi = b.min(q1);
        if hi > lo {
            let slope = (q1 - q0) / (u1 - u0);
            total += 0.5 * (hi * hi - lo * lo) / slope;
        }
    }
    total
}

fn table_ex_x_truncated(knots: &[(f64, f64)], r: f64, n: f64) -> f64 {
    // X = q(u)^r; clip at n  <=>  q at c = n^{1/r}
    let c = n.powf(1.0 / r);
    let mut total = 0.0;
    for w in knots.windows(2) {
        let ((u0, q0), (u1, q1)) = (w[0], w[1]);
        if q1 == q0 {
            total += q0.powf(r).min(n) * (u1 - u0);
            continue;
        }
        let slope = (q1 - q0) / (u1 - u0);
        let mid = c.clamp(q0, q1);
        let below = (mid.powf(r + 1.0) - q0.powf(r + 1.0)) / (r + 1.0);
        let above = n * (q1 - mid);
        total += (below + above) / slope;
    }
    total
}

impl fmt::Display for DelayKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DelayKind::Zero => write!(f, "zero"),
            DelayKind::Constant(c) => write!(f, "constant:{c}"),
            DelayKind::Uniform01 => write!(f, "uniform"),
            DelayKind::InversePowerOfUniform(p) => write!(f, "invpow:{p}"),
            DelayKind::Pareto { tail, scale } => write!(f, "pareto:{tail},{scale}"),
            DelayKind::QuantileTable(knots) => {
                write!(f, "table:")?;
                for (i, (u, q)) in knots.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{u}/{q}")?;
                }
                Ok(())
            }
        }
    }
}
