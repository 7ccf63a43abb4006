use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::kernels::{AttachmentKernel, TailModel};
use crate::scalar::{lit, Real, Scalar};

/// Partial sums beyond this are reported as divergence.
const DIVERGENCE_CAP: f64 = 1e6;
const MAX_TERMS: usize = 50_000_000;

/// Value of `rho_hat(lambda) = sum_k prod_{i<=k} f(i) / (lambda + f(i))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RhoHat<T> {
    Finite {
        value: T,
        /// Terms summed explicitly before the remainder was closed off.
        terms: usize,
        /// Bound on `|value - rho_hat|`; zero when the remainder is exact.
        error_bound: T,
    },
    Infinite,
}

impl<T: Copy> RhoHat<T> {
    pub fn value(&self) -> Option<T> {
        match self {
            RhoHat::Finite { value, .. } => Some(*value),
            RhoHat::Infinite => None,
        }
    }
}

/// Evaluate `rho_hat` with an exact or certified tail.
///
/// Constant and unit-affine tails are summed in closed form. A tabulated
/// power tail is bounded by `f(j) <= C j` and summed until the bound is below
/// `1e-12` relative.
pub fn rho_hat<T: Real>(kernel: &AttachmentKernel<T>, lambda: T) -> Result<RhoHat<T>> {
    if !(lambda > T::zero()) || !lambda.is_finite() {
        return invalid(format!("rho_hat needs lambda > 0, got {lambda}"));
    }
    if lambda <= kernel.lambda_lower() {
        return Ok(RhoHat::Infinite);
    }
    let rel_tol: T = lit(1e-12);
    let mut product = T::one();
    let mut sum = T::zero();
    for k in 1..=MAX_TERMS {
        let fk = kernel.weight(k);
        product = product * fk / (lambda + fk);
        sum = sum + product;
        if sum > lit(DIVERGENCE_CAP) {
            return Ok(RhoHat::Infinite);
        }
        let kk = T::from_usize_exact(k);
        match kernel.tail_model(k) {
            TailModel::Constant(c) => {
                return Ok(RhoHat::Finite {
                    value: sum + product * c / lambda,
                    terms: k,
                    error_bound: T::zero(),
                })
            }
            TailModel::UnitAffine { alpha } => {
                return Ok(RhoHat::Finite {
                    value: sum + product * (kk + alpha + T::one()) / (lambda - T::one()),
                    terms: k,
                    error_bound: T::zero(),
                })
            }
            TailModel::LinearBound(c) => {
                let scaled = lambda / c;
                if scaled > T::one() {
                    let bound = product * (kk + T::one()) / (scaled - T::one());
                    if bound <= rel_tol * sum || product == T::zero() {
                        return Ok(RhoHat::Finite {
                            value: sum + bound / lit(2.0),
                            terms: k,
                            error_bound: bound / lit(2.0),
                        });
                    }
                }
            }
            TailModel::Unknown => {}
        }
    }
    Err(Error::Unsupported(format!(
        "rho_hat({lambda}) did not certify its tail within {MAX_TERMS} terms"
    )))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MalthusianResult<T> {
    pub lambda_star: T,
    pub rho_hat_at_solution: T,
    pub truncation_k: usize,
    pub bracket: (T, T),
}

/// Solve `rho_hat(lambda) = 1` by bracketing and bisection.
pub fn solve_malthusian<T: Real>(kernel: &AttachmentKernel<T>) -> Result<MalthusianResult<T>> {
    let tol = T::solver_tolerance();
    let lower = kernel.lambda_lower();
    let eval = |lambda: T| -> Result<Option<T>> { Ok(rho_hat(kernel, lambda)?.value()) };

    let mut hi = if lower > T::zero() {
        lower + lower
    } else {
        T::one()
    };
    let mut grow = 0;
    while eval(hi)?.is_none_or(|v| v >= T::one()) {
        hi = hi + hi;
        grow += 1;
        if grow > 200 {
            return Err(Error::AssumptionViolation(
                "rho_hat never drops below 1".into(),
            ));
        }
    }
    // approach the lower edge of the feasible ray until rho_hat exceeds 1
    let mut lo = (lower + hi) / lit(2.0);
    let mut shrink = 0;
    while eval(lo)?.is_some_and(|v| v <= T::one()) {
        lo = (lower + lo) / lit(2.0);
        shrink += 1;
        if shrink > 200 || lo <= lower {
            return Err(Error::AssumptionViolation(
                "rho_hat does not exceed 1 near the lower edge of its domain".into(),
            ));
        }
    }
    let bracket = (lo, hi);

    let (mut a, mut b) = bracket;
    for _ in 0..500 {
        let mid = (a + b) / lit(2.0);
        let r = rho_hat(kernel, mid)?;
        match r {
            RhoHat::Finite { value, terms, .. } => {
                if (value - T::one()).abs() <= tol || mid == a || mid == b {
                    if (value - T::one()).abs() > tol {
                        return Err(Error::Unsupported(format!(
                            "bisection stalled at lambda={mid} with rho_hat={value}"
                        )));
                    }
                    return Ok(MalthusianResult {
                        lambda_star: mid,
                        rho_hat_at_solution: value,
                        truncation_k: terms,
                        bracket,
                    });
                }
                if value > T::one() {
                    a = mid;
                } else {
                    b = mid;
                }
            }
            RhoHat::Infinite => a = mid,
        }
    }
    Err(Error::Unsupported("bisection did not converge".into()))
}

/// `lambda*` in closed form where it is known: `1` for the uniform kernel,
/// `2 + alpha` for `f(k) = k + alpha`. Works in any scalar type, including
/// exact rationals.
pub fn closed_form_malthusian<T: Scalar>(kernel: &AttachmentKernel<T>) -> Option<T> {
    match kernel.kind() {
        crate::kernels::KernelKind::Uniform => Some(T::one()),
        crate::kernels::KernelKind::Affine { alpha } => Some(T::one() + T::one() + alpha.clone()),
        crate::kernels::KernelKind::Tabulated { .. } => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::TailRule;

    /// Brute partial sum with many terms, independent of the tail formulas.
    fn brute(kernel: &AttachmentKernel<f64>, lambda: f64, terms: usize) -> f64 {
        let mut p = 1.0;
        let mut s = 0.0;
        for k in 1..=terms {
            let f = kernel.weight(k);
            p *= f / (lambda + f);
            s += p;
        }
        s
    }

    #[test]
    fn closed_forms() {
        let u = AttachmentKernel::<f64>::uniform();
        assert!((rho_hat(&u, 2.0).unwrap().value().unwrap() - 0.5).abs() < 1e-15);
        assert!((rho_hat(&u, 1.0).unwrap().value().unwrap() - 1.0).abs() < 1e-15);
        let a0 = AttachmentKernel::<f64>::affine(0.0).unwrap();
        assert!((rho_hat(&a0, 2.0).unwrap().value().unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(rho_hat(&a0, 1.0).unwrap(), RhoHat::Infinite);
        assert_eq!(rho_hat(&a0, 0.5).unwrap(), RhoHat::Infinite);
        assert!(rho_hat(&a0, 0.0).is_err());
        assert!(rho_hat(&a0, -1.0).is_err());
    }

    #[test]
    fn affine_remainder_matches_long_sum() {
        // lambda = 4 makes the affine terms decay like k^-3
        for alpha in [0.0, 0.5, 2.0] {
            let k = AttachmentKernel::<f64>::affine(alpha).unwrap();
            let exact = (alpha + 1.0) / 3.0;
            let got = rho_hat(&k, 4.0).unwrap().value().unwrap();
            assert!((got - exact).abs() < 1e-14);
            assert!((brute(&k, 4.0, 200_000) - exact).abs() < 1e-8);
        }
    }

    #[test]
    fn power_tail_certified() {
        let k = AttachmentKernel::<f64>::tabulated(
            vec![1.0, 1.4],
            TailRule::Power { exponent: 0.5 },
            1.0,
            true,
        )
        .unwrap();
        for lambda in [0.8, 1.0, 1.5] {
            let r = rho_hat(&k, lambda).unwrap();
            let RhoHat::Finite {
                value, error_bound, ..
            } = r
            else {
                panic!()
            };
            let b = brute(&k, lambda, 2_000_000);
            assert!(
                (value - b).abs() <= error_bound + 1e-12,
                "{lambda}: {value} vs {b}"
            );
        }
    }

    #[test]
    fn decreasing_on_grid() {
        let kernels = [
            AttachmentKernel::uniform(),
            AttachmentKernel::<f64>::affine(0.0).unwrap(),
            AttachmentKernel::<f64>::affine(1.5).unwrap(),
            AttachmentKernel::<f64>::tabulated(
                vec![1.0, 2.0, 2.5],
                TailRule::ConstantAfterTable,
                1.0,
                true,
            )
            .unwrap(),
            AttachmentKernel::<f64>::tabulated(
                vec![1.0, 1.5],
                TailRule::Power { exponent: 0.6 },
                1.0,
                true,
            )
            .unwrap(),
        ];
        for k in &kernels {
            let lower = k.lambda_lower();
            let mut prev = f64::INFINITY;
            for i in 1..60 {
                let lambda = lower + 0.1 * i as f64;
                let v = rho_hat(k, lambda).unwrap().value().unwrap();
                assert!(v < prev, "{k} at {lambda}");
                prev = v;
            }
        }
    }

    #[test]
    fn solver_anchors() {
        for alpha in [0.0, 0.5, 1.0, 2.0] {
            let r = solve_malthusian(&AttachmentKernel::<f64>::affine(alpha).unwrap()).unwrap();
            assert!((r.lambda_star - (2.0 + alpha)).abs() < 1e-8);
            assert!((r.rho_hat_at_solution - 1.0).abs() <= 1e-10);
            assert!(
                r.bracket.0 > 1.0 && r.bracket.0 < r.lambda_star && r.lambda_star < r.bracket.1
            );
        }
        let u = solve_malthusian(&AttachmentKernel::<f64>::uniform()).unwrap();
        assert!((u.lambda_star - 1.0).abs() < 1e-8);
    }

    #[test]
    fn solver_in_f32() {
        let r = solve_malthusian(&AttachmentKernel::<f32>::affine(1.0).unwrap()).unwrap();
        assert!((r.lambda_star - 3.0).abs() < 1e-3);
        assert!((r.rho_hat_at_solution - 1.0).abs() <= f32::solver_tolerance());
    }

    #[test]
    fn tabulated_constant_tail_solution() {
        // f = (1, 2, 2, ...): rho_hat has an exact tail, check the root by substitution
        let k = AttachmentKernel::<f64>::tabulated(
            vec![1.0, 2.0],
            TailRule::ConstantAfterTable,
            1.0,
            true,
        )
        .unwrap();
        let r = solve_malthusian(&k).unwrap();
        let l = r.lambda_star;
        let direct = 1.0 / (l + 1.0) + (1.0 / (l + 1.0)) * (2.0 / (l + 2.0)) * (l + 2.0) / l;
        assert!((direct - 1.0).abs() < 1e-9);
    }
}
