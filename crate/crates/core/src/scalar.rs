//! Scalar abstractions shared by the analytic oracles.
//!
//! Everything that is a finite rational expression in the kernel values and
//! the Malthusian parameter (degree law, fringe measure, Q-weighted
//! extended-fringe law, CLT constants) is written against [`Scalar`], so it
//! runs on `f32`, `f64` or exact [`num_rational::BigRational`]. Root finding
//! and series with analytic tails need transcendental functions and use
//! [`Real`].

use std::fmt::{Debug, Display};

use num_traits::{Float, FromPrimitive, Num, ToPrimitive};

/// Field-like numeric type usable by the rational-valued oracles.
pub trait Scalar:
    Num + Clone + PartialOrd + FromPrimitive + ToPrimitive + Debug + Display + Send + Sync + 'static
{
    fn from_usize_exact(k: usize) -> Self {
        Self::from_usize(k).expect("integer representable in scalar type")
    }

    /// Lossy conversion used for reporting.
    fn to_f64_lossy(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl<T> Scalar for T where
    T: Num
        + Clone
        + PartialOrd
        + FromPrimitive
        + ToPrimitive
        + Debug
        + Display
        + Send
        + Sync
        + 'static
{
}

/// Floating-point scalar (`f32` or `f64`).
pub trait Real: Scalar + Float {
    /// Convergence tolerance the solvers can honestly reach in this type.
    fn solver_tolerance() -> Self {
        let floor = Self::from_f64(1e-10).unwrap();
        let eps_based = Self::epsilon() * Self::from_f64(1024.0).unwrap();
        if eps_based > floor {
            eps_based
        } else {
            floor
        }
    }
}

impl Real for f32 {}
impl Real for f64 {}

pub(crate) fn lit<T: Scalar>(x: f64) -> T {
    T::from_f64(x).expect("finite literal")
}
