use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::sampler::{
    sample_parent_affine, sample_parent_rejection, sample_parent_scan, SnapshotIndex,
};
use super::trace::TreeTrace;
use crate::error::Result;
use crate::kernels::{snapshot_time, GrowthConfig, SamplerStrategy};

/// Counters collected while growing one tree.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SamplerStats {
    pub draws: u64,
    pub proposals: u64,
    pub max_proposals: u64,
}

impl SamplerStats {
    /// Rejected proposals per accepted draw.
    pub fn mean_retries(&self) -> f64 {
        if self.draws == 0 {
            0.0
        } else {
            (self.proposals - self.draws) as f64 / self.draws as f64
        }
    }
}

/// Grow `T(1), ..., T(n_final)` with an RNG seeded from `config.seed`.
pub fn grow(config: &GrowthConfig) -> Result<TreeTrace> {
    grow_with_stats(config).map(|(t, _)| t)
}

pub fn grow_with_stats(config: &GrowthConfig) -> Result<(TreeTrace, SamplerStats)> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    grow_with_rng(config, &mut rng)
}

/// Grow a tree drawing all randomness from `rng` (`config.seed` is ignored).
pub fn grow_with_rng<R: Rng + ?Sized>(
    config: &GrowthConfig,
    rng: &mut R,
) -> Result<(TreeTrace, SamplerStats)> {
    config.validate()?;
    let strategy = config.sampler_strategy.resolve(&config.kernel)?;
    let kernel = &config.kernel;
    let beta = config.delay.beta();
    let n_final = config.n_final;

    let mut trace = TreeTrace::with_capacity(kernel, n_final);
    let mut index = SnapshotIndex::new(n_final, kernel);
    let mut stats = SamplerStats {
        draws: 0,
        proposals: 0,
        max_proposals: 0,
    };

    // v2 always attaches to v1
    let child = trace.push(1, 0.0, 1, kernel);
    index.record(&trace, child, 1, kernel);

    let (slope, intercept) = kernel.affine_parts().unwrap_or((0.0, 1.0));
    for n in 2..n_final {
        let xi = config.delay.sample(rng);
        let m = snapshot_time(n, xi, beta);
        let parent = match strategy {
            SamplerStrategy::AffineEdgeTrick => {
                sample_parent_affine(&index, m, slope, intercept, rng)
            }
            SamplerStrategy::FenwickRejection => {
                let (v, proposals) = sample_parent_rejection(&trace, &index, m, kernel, rng)?;
                stats.proposals += proposals;
                stats.max_proposals = stats.max_proposals.max(proposals);
                v
            }
            _ => sample_parent_scan(&trace, m, kernel, rng),
        };
        if strategy != SamplerStrategy::FenwickRejection {
            stats.proposals += 1;
            stats.max_proposals = stats.max_proposals.max(1);
        }
        stats.draws += 1;
        let child = trace.push(parent, xi, m, kernel);
        index.record(&trace, child, parent, kernel);
    }
    Ok((trace, stats))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::{AttachmentKernel, DelayKind, DelayLaw};

    fn config(
        n: usize,
        kernel: AttachmentKernel<f64>,
        delay: DelayKind,
        seed: u64,
    ) -> GrowthConfig {
        GrowthConfig::new(n, kernel, DelayLaw::new(delay, 0.5).unwrap(), seed)
    }

    #[test]
    fn two_vertices_forced() {
        let t = grow(&config(
            2,
            AttachmentKernel::uniform(),
            DelayKind::Uniform01,
            1,
        ))
        .unwrap();
        assert_eq!(t.len(), 2);
        assert_eq!(t.parent(2), Some(1));
    }

    #[test]
    fn huge_constant_delay_gives_star() {
        let n = 400;
        for strategy in [
            SamplerStrategy::AffineEdgeTrick,
            SamplerStrategy::FenwickRejection,
            SamplerStrategy::LinearScanOracle,
        ] {
            let mut c = config(
                n,
                AttachmentKernel::affine(0.0).unwrap(),
                DelayKind::Constant(25.0),
                9,
            );
            c.sampler_strategy = strategy;
            let t = grow(&c).unwrap();
            assert!((2..=n).all(|v| t.parent(v) == Some(1)));
            assert_eq!(t.degree(1), n - 1);
        }
    }

    #[test]
    fn deterministic_given_seed() {
        let c = config(
            3000,
            AttachmentKernel::affine(0.5).unwrap(),
            DelayKind::InversePowerOfUniform(1.0),
            42,
        );
        assert_eq!(grow(&c).unwrap(), grow(&c).unwrap());
        let mut other = c.clone();
        other.seed = 43;
        assert_ne!(grow(&c).unwrap(), grow(&other).unwrap());
    }

    #[test]
    fn recursive_property_and_psi() {
        let k = AttachmentKernel::affine(1.0).unwrap();
        let t = grow(&config(2000, k.clone(), DelayKind::Uniform01, 7)).unwrap();
        for v in 2..=t.len() {
            assert!(t.parent(v).unwrap() < v);
            assert!(t.snapshot(v) >= 1 && t.snapshot(v) < v);
        }
        for m in 2..=t.len() {
            assert_eq!(t.psi(m), 2.0 * (m as f64 - 1.0) + m as f64);
        }
    }

    #[test]
    fn retries_counted_for_rejection() {
        let k = AttachmentKernel::tabulated(
            vec![1.0, 1.5, 2.0],
            crate::kernels::TailRule::Power { exponent: 0.7 },
            1.0,
            true,
        )
        .unwrap();
        let (t, stats) =
            grow_with_stats(&config(5000, k, DelayKind::InversePowerOfUniform(1.0), 3)).unwrap();
        assert_eq!(stats.draws as usize, t.len() - 2);
        assert!(stats.proposals >= stats.draws);
        assert!(stats.mean_retries() < 100.0);
    }

    #[test]
    fn invalid_strategy_is_reported() {
        let k = AttachmentKernel::tabulated(
            vec![1.0, 3.0],
            crate::kernels::TailRule::ConstantAfterTable,
            1.0,
            true,
        )
        .unwrap();
        let mut c = config(10, k, DelayKind::Zero, 0);
        c.sampler_strategy = SamplerStrategy::AffineEdgeTrick;
        assert!(matches!(grow(&c), Err(crate::Error::Strategy(_))));
    }
}
