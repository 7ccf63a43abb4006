use std::fmt;

use crate::error::{invalid, Result};
use crate::scalar::{lit, Scalar};

/// Continuation of a tabulated kernel past its last explicit entry.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TailRule {
    /// `f(k) = f(K)` for every `k > K`.
    ConstantAfterTable,
    /// `f(k) = k^exponent` for `k > K`, with `0 < exponent < 1`.
    Power { exponent: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub enum KernelKind<T> {
    /// `f ≡ 1`.
    Uniform,
    /// `f(k) = k + alpha`.
    Affine { alpha: T },
    /// `f(1..=K)` given explicitly, continued by `tail`.
    Tabulated { values: Vec<T>, tail: TailRule },
}

/// What is known about `f(j)` for all `j` beyond some index.
#[derive(Debug, Clone, PartialEq)]
pub enum TailModel<T> {
    /// `f(j) = c` exactly.
    Constant(T),
    /// `f(j) = j + alpha` exactly.
    UnitAffine { alpha: T },
    /// `f(j) <= c * j`.
    LinearBound(T),
    /// Still inside the table.
    Unknown,
}

/// Attachment function on degrees `k >= 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct AttachmentKernel<T> {
    kind: KernelKind<T>,
    f_star: T,
    monotone: bool,
    lipschitz: Option<T>,
    growth_bound: T,
}

impl<T: Scalar> AttachmentKernel<T> {
    pub fn uniform() -> Self {
        AttachmentKernel {
            kind: KernelKind::Uniform,
            f_star: T::one(),
            monotone: true,
            lipschitz: Some(T::zero()),
            growth_bound: T::one(),
        }
    }

    pub fn affine(alpha: T) -> Result<Self> {
        if !(alpha >= T::zero()) {
            return invalid(format!("affine kernel needs alpha >= 0, got {alpha}"));
        }
        let f_star = T::one() + alpha.clone();
        Ok(AttachmentKernel {
            kind: KernelKind::Affine {
                alpha: alpha.clone(),
            },
            growth_bound: f_star.clone(),
            f_star,
            monotone: true,
            lipschitz: Some(T::one()),
        })
    }

    /// Tabulated kernel. `f_star` and `monotone` are declared by the caller and
    /// checked for consistency against the table and tail.
    pub fn tabulated(values: Vec<T>, tail: TailRule, f_star: T, monotone: bool) -> Result<Self> {
        if values.is_empty() {
            return invalid("tabulated kernel needs at least one value");
        }
        if let Some(bad) = values.iter().find(|v| !(**v > T::zero())) {
            return invalid(format!("tabulated kernel values must be > 0, found {bad}"));
        }
        let big_k = values.len();
        if let TailRule::Power { exponent } = tail {
            if !(exponent > 0.0 && exponent < 1.0) {
                return invalid(format!(
                    "power tail exponent must lie in (0,1), got {exponent}"
                ));
            }
        }
        if !(f_star > T::zero()) {
            return invalid("f_star must be > 0");
        }
        let first_tail: T = match tail {
            TailRule::ConstantAfterTable => values[big_k - 1].clone(),
            TailRule::Power { exponent } => lit(((big_k + 1) as f64).powf(exponent)),
        };
        if values
            .iter()
            .chain(std::iter::once(&first_tail))
            .any(|v| *v < f_star)
        {
            return invalid("declared f_star exceeds a kernel value");
        }
        if monotone {
            let table_ok = values.windows(2).all(|w| w[0] <= w[1]);
            if !table_ok || first_tail < values[big_k - 1] {
                return invalid("kernel declared monotone but is not non-decreasing");
            }
        }
        let mut growth_bound = T::zero();
        for (i, v) in values.iter().enumerate() {
            let ratio = v.clone() / T::from_usize_exact(i + 1);
            if ratio > growth_bound {
                growth_bound = ratio;
            }
        }
        let tail_ratio: T = match tail {
            TailRule::ConstantAfterTable => {
                values[big_k - 1].clone() / T::from_usize_exact(big_k + 1)
            }
            TailRule::Power { exponent } => lit(((big_k + 1) as f64).powf(exponent - 1.0)),
        };
        if tail_ratio > growth_bound {
            growth_bound = tail_ratio;
        }
        Ok(AttachmentKernel {
            kind: KernelKind::Tabulated { values, tail },
            f_star,
            monotone,
            lipschitz: None,
            growth_bound,
        })
    }

    pub fn with_lipschitz(mut self, bound: T) -> Self {
        self.lipschitz = Some(bound);
        self
    }

    pub fn kind(&self) -> &KernelKind<T> {
        &self.kind
    }

    /// `f(k)`. Degrees start at one; `k = 0` is rejected.
    pub fn evaluate(&self, k: usize) -> Result<T> {
        if k == 0 {
            return invalid("attachment function is only defined for degrees k >= 1");
        }
        Ok(self.weight(k))
    }

    /// Unchecked evaluation for the hot paths; `k >= 1`.
    #[inline]
    pub fn weight(&self, k: usize) -> T {
        debug_assert!(k >= 1);
        match &self.kind {
            KernelKind::Uniform => T::one(),
            KernelKind::Affine { alpha } => T::from_usize_exact(k) + alpha.clone(),
            KernelKind::Tabulated { values, tail } => {
                if k <= values.len() {
                    values[k - 1].clone()
                } else {
                    match tail {
                        TailRule::ConstantAfterTable => values[values.len() - 1].clone(),
                        TailRule::Power { exponent } => lit((k as f64).powf(*exponent)),
                    }
                }
            }
        }
    }

    pub fn f_star(&self) -> &T {
        &self.f_star
    }

    pub fn is_monotone(&self) -> bool {
        self.monotone
    }

    pub fn lipschitz_bound(&self) -> Option<&T> {
        self.lipschitz.as_ref()
    }

    /// Constant `C` with `f(k) <= C k` for all `k >= 1`.
    pub fn growth_bound(&self) -> &T {
        &self.growth_bound
    }

    /// `(slope, intercept)` when `f(k) = slope * k + intercept`.
    pub fn affine_parts(&self) -> Option<(T, T)> {
        match &self.kind {
            KernelKind::Uniform => Some((T::zero(), T::one())),
            KernelKind::Affine { alpha } => Some((T::one(), alpha.clone())),
            KernelKind::Tabulated { .. } => None,
        }
    }

    /// `limsup f(k)/k`; the series `sum_k prod_i f(i)/(lambda+f(i))` diverges
    /// for `lambda` at or below this value.
    pub fn lambda_lower(&self) -> T {
        match &self.kind {
            KernelKind::Affine { .. } => T::one(),
            _ => T::zero(),
        }
    }

    /// Behaviour of `f(j)` for every `j > k`.
    pub fn tail_model(&self, k: usize) -> TailModel<T> {
        match &self.kind {
            KernelKind::Uniform => TailModel::Constant(T::one()),
            KernelKind::Affine { alpha } => TailModel::UnitAffine {
                alpha: alpha.clone(),
            },
            KernelKind::Tabulated { values, tail } => {
                if k < values.len() {
                    return TailModel::Unknown;
                }
                match tail {
                    TailRule::ConstantAfterTable => {
                        TailModel::Constant(values[values.len() - 1].clone())
                    }
                    TailRule::Power { exponent } => {
                        TailModel::LinearBound(lit(((k + 1) as f64).powf(exponent - 1.0)))
                    }
                }
            }
        }
    }

    /// Re-express the kernel in another scalar type.
    pub fn convert<U: Scalar>(&self, conv: impl Fn(&T) -> U) -> AttachmentKernel<U> {
        let kind = match &self.kind {
            KernelKind::Uniform => KernelKind::Uniform,
            KernelKind::Affine { alpha } => KernelKind::Affine { alpha: conv(alpha) },
            KernelKind::Tabulated { values, tail } => KernelKind::Tabulated {
                values: values.iter().map(&conv).collect(),
                tail: *tail,
            },
        };
        AttachmentKernel {
            kind,
            f_star: conv(&self.f_star),
            monotone: self.monotone,
            lipschitz: self.lipschitz.as_ref().map(&conv),
            growth_bound: conv(&self.growth_bound),
        }
    }
}

impl<T: Scalar> fmt::Display for AttachmentKernel<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            KernelKind::Uniform => write!(f, "uniform"),
            KernelKind::Affine { alpha } => write!(f, "affine(alpha={alpha})"),
            KernelKind::Tabulated { values, tail } => {
                write!(f, "tabulated(")?;
                for (i, v) in values.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{v}")?;
                }
                match tail {
                    TailRule::ConstantAfterTable => write!(f, ";const)"),
                    TailRule::Power { exponent } => write!(f, ";power:{exponent})"),
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    #[test]
    fn evaluate_examples() {
        let pure = AttachmentKernel::affine(0.0).unwrap();
        assert_eq!(pure.evaluate(3).unwrap(), 3.0);
        assert_eq!(
            AttachmentKernel::<f64>::uniform().evaluate(17).unwrap(),
            1.0
        );
        let half = AttachmentKernel::affine(0.5).unwrap();
        assert_eq!(half.evaluate(2).unwrap(), 2.5);
    }

    #[test]
    fn degree_zero_is_rejected() {
        let k = AttachmentKernel::affine(1.0).unwrap();
        assert!(k.evaluate(0).is_err());
        assert!(AttachmentKernel::<f64>::uniform().evaluate(0).is_err());
    }

    #[test]
    fn negative_alpha_rejected() {
        assert!(AttachmentKernel::affine(-0.1).is_err());
    }

    #[test]
    fn affine_is_exact_for_integers() {
        let k = AttachmentKernel::affine(2.0).unwrap();
        for d in 1..10_000usize {
            assert_eq!(k.weight(d), d as f64 + 2.0);
        }
    }

    #[test]
    fn tabulated_tails() {
        let k = AttachmentKernel::tabulated(
            vec![1.0, 2.0, 2.0],
            TailRule::ConstantAfterTable,
            1.0,
            true,
        )
        .unwrap();
        assert_eq!(k.weight(3), 2.0);
        assert_eq!(k.weight(50), 2.0);
        let p: AttachmentKernel<f64> = AttachmentKernel::tabulated(
            vec![1.0, 1.5],
            TailRule::Power { exponent: 0.5 },
            1.0,
            true,
        )
        .unwrap();
        assert!((p.weight(9) - 3.0).abs() < 1e-15);
        assert!(*p.growth_bound() >= 1.0);
    }

    #[test]
    fn tabulated_validation() {
        // declared monotone but decreasing
        assert!(AttachmentKernel::tabulated(
            vec![2.0, 1.0],
            TailRule::ConstantAfterTable,
            1.0,
            true
        )
        .is_err());
        // f_star larger than a value
        assert!(AttachmentKernel::tabulated(
            vec![2.0, 1.0],
            TailRule::ConstantAfterTable,
            1.5,
            false
        )
        .is_err());
        assert!(
            AttachmentKernel::tabulated(vec![0.0], TailRule::ConstantAfterTable, 1.0, false)
                .is_err()
        );
        assert!(AttachmentKernel::tabulated(
            vec![1.0],
            TailRule::Power { exponent: 1.5 },
            1.0,
            false
        )
        .is_err());
        // non-monotone allowed when flagged so
        let k =
            AttachmentKernel::tabulated(vec![2.0, 1.0], TailRule::ConstantAfterTable, 1.0, false)
                .unwrap();
        assert!(!k.is_monotone());
    }

    #[test]
    fn growth_bound_holds() {
        let kernels = vec![
            AttachmentKernel::<f64>::uniform(),
            AttachmentKernel::affine(0.7).unwrap(),
            AttachmentKernel::tabulated(
                vec![3.0, 1.0, 4.0],
                TailRule::ConstantAfterTable,
                1.0,
                false,
            )
            .unwrap(),
            AttachmentKernel::tabulated(
                vec![1.0, 1.2],
                TailRule::Power { exponent: 0.3 },
                1.0,
                true,
            )
            .unwrap(),
        ];
        for k in &kernels {
            for d in 1..2000 {
                assert!(
                    k.weight(d) <= k.growth_bound() * d as f64 + 1e-12,
                    "{k} at {d}"
                );
                assert!(k.weight(d) >= *k.f_star());
            }
        }
    }

    #[test]
    fn exact_affine() {
        let alpha = BigRational::new(1.into(), 2.into());
        let k = AttachmentKernel::affine(alpha).unwrap();
        assert_eq!(k.weight(2), BigRational::new(5.into(), 2.into()));
    }
}
