use serde::Serialize;

use crate::error::{invalid, Result};
use crate::kernels::DelayLaw;
use crate::scalar::Scalar;

/// Leaf CLT constants for `f(k) = k + alpha`: `p_1 = (2+a)/(3+2a)` and
/// `sigma_1^2 = (1+a)(2+a)^2 / ((3+2a)^2 (4+3a))`.
pub fn clt_constants<T: Scalar>(alpha: T) -> Result<(T, T)> {
    if !(alpha >= T::zero()) {
        return invalid(format!("alpha must be >= 0, got {alpha}"));
    }
    let n = |k: usize| T::from_usize_exact(k);
    let a = alpha;
    let p1 = (n(2) + a.clone()) / (n(3) + n(2) * a.clone());
    let two_a = n(2) + a.clone();
    let three_2a = n(3) + n(2) * a.clone();
    let sigma = (n(1) + a.clone()) * two_a.clone() * two_a
        / (three_2a.clone() * three_2a * (n(4) + n(3) * a));
    Ok((p1, sigma))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum RootRegime {
    /// `E[X^{1-theta}] < inf`: `M(root, n) / n^theta` converges.
    L2Convergent,
    /// `E[X^{1-theta}] = inf`: the root degree is driven by the delay tail.
    Heavy,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RootDegreeConstants {
    pub theta: f64,
    pub regime: RootRegime,
    /// Tail index of `X = xi^{1/(1-beta)}`, if unbounded.
    pub x_tail_index: Option<f64>,
    delay: DelayLaw,
}

impl RootDegreeConstants {
    /// `E[X ∧ n]`.
    pub fn ex_x_truncated(&self, n: f64) -> f64 {
        self.delay.ex_x_truncated(n)
    }
}

/// `theta = 1/(2+alpha)` and the regime of the root degree under `delay`
/// (which carries `beta`).
pub fn root_degree_constants(alpha: f64, delay: &DelayLaw) -> Result<RootDegreeConstants> {
    if !(alpha >= 0.0) {
        return invalid(format!("alpha must be >= 0, got {alpha}"));
    }
    let theta = 1.0 / (2.0 + alpha);
    let regime = if delay.x_moment_finite(1.0 - theta) {
        RootRegime::L2Convergent
    } else {
        RootRegime::Heavy
    };
    Ok(RootDegreeConstants {
        theta,
        regime,
        x_tail_index: delay.x_tail_index(),
        delay: delay.clone(),
    })
}
