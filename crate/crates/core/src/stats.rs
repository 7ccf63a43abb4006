//! Small statistical helpers for comparing simulations with theory.

use statrs::distribution::{ChiSquared, ContinuousCDF, Normal};

/// Sample mean and unbiased variance (variance 0 for fewer than two values).
pub fn mean_and_variance(xs: &[f64]) -> (f64, f64) {
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let ss: f64 = xs.iter().map(|x| (x - mean) * (x - mean)).sum();
    (mean, ss / (n - 1.0))
}

/// Kolmogorov–Smirnov distance between a sample and a continuous CDF.
pub fn ks_distance(sample: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut xs = sample.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    xs.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}

/// Pearson chi-square statistic and p-value for observed counts against
/// expected probabilities (which should sum to one over the cells).
pub fn chi_square_test(observed: &[u64], expected_prob: &[f64]) -> (f64, f64) {
    assert_eq!(observed.len(), expected_prob.len());
    let total: u64 = observed.iter().sum();
    let mut stat = 0.0;
    let mut cells = 0usize;
    for (&o, &p) in observed.iter().zip(expected_prob) {
        let e = p * total as f64;
        if e > 0.0 {
            stat += (o as f64 - e).powi(2) / e;
            cells += 1;
        }
    }
    let df = cells.saturating_sub(1).max(1) as f64;
    let p = 1.0
        - ChiSquared::new(df)
            .expect("positive degrees of freedom")
            .cdf(stat);
    (stat, p)
}

/// Anderson–Darling test of normality with mean and variance estimated from
/// the sample. Returns the adjusted statistic `A*` and its p-value
/// (D'Agostino & Stephens approximation).
pub fn anderson_darling_normal(sample: &[f64]) -> (f64, f64) {
    let n = sample.len();
    assert!(n >= 8, "Anderson-Darling needs at least 8 observations");
    let (mean, var) = mean_and_variance(sample);
    let sd = var.sqrt();
    let std = Normal::standard();
    let mut z: Vec<f64> = sample.iter().map(|x| (x - mean) / sd).collect();
    z.sort_by(f64::total_cmp);
    let nf = n as f64;
    let mut s = 0.0;
    for i in 0..n {
        let lo = std.cdf(z[i]).clamp(1e-300, 1.0);
        let hi = (1.0 - std.cdf(z[n - 1 - i])).clamp(1e-300, 1.0);
        s += (2.0 * i as f64 + 1.0) * (lo.ln() + hi.ln());
    }
    let a2 = -nf - s / nf;
    let a = a2 * (1.0 + 0.75 / nf + 2.25 / (nf * nf));
    let p = if a >= 0.6 {
        (1.2937 - 5.709 * a + 0.0186 * a * a).exp()
    } else if a >= 0.34 {
        (0.9177 - 4.279 * a - 1.38 * a * a).exp()
    } else if a >= 0.2 {
        1.0 - (-8.318 + 42.796 * a - 59.938 * a * a).exp()
    } else {
        1.0 - (-13.436 + 101.14 * a - 223.73 * a * a).exp()
    };
    (a, p.clamp(0.0, 1.0))
}

/// Total variation distance over a shared support, with the mass outside
/// the support lumped into one extra cell on each side.
pub fn tv_distance(empirical: &[f64], theory: &[f64]) -> f64 {
    assert_eq!(empirical.len(), theory.len());
    let inside: f64 = empirical
        .iter()
        .zip(theory)
        .map(|(a, b)| (a - b).abs())
        .sum();
    let rest_e = 1.0 - empirical.iter().sum::<f64>();
    let rest_t = 1.0 - theory.iter().sum::<f64>();
    0.5 * (inside + (rest_e - rest_t).abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// Box–Muller normals.
    fn standard_normals<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
        (0..n)
            .map(|_| {
                let u: f64 = rng.random_range(f64::EPSILON..1.0);
                let v: f64 = rng.random();
                (-2.0 * u.ln()).sqrt() * (std::f64::consts::TAU * v).cos()
            })
            .collect()
    }

    #[test]
    fn tv_examples() {
        assert_eq!(tv_distance(&[0.5, 0.5], &[0.5, 0.5]), 0.0);
        assert_eq!(tv_distance(&[1.0, 0.0], &[0.0, 1.0]), 1.0);
        assert!((tv_distance(&[0.7, 0.3], &[0.6, 0.4]) - 0.1).abs() < 1e-15);
        // lumped remainder
        assert!((tv_distance(&[0.5], &[0.6]) - 0.1).abs() < 1e-15);
    }

    #[test]
    fn moments() {
        let (m, v) = mean_and_variance(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(m, 2.5);
        assert!((v - 5.0 / 3.0).abs() < 1e-15);
        assert_eq!(mean_and_variance(&[3.0]), (3.0, 0.0));
    }

    #[test]
    fn ks_of_uniform_grid() {
        let xs: Vec<f64> = (0..100).map(|i| (i as f64 + 0.5) / 100.0).collect();
        assert!((ks_distance(&xs, |x| x) - 0.005).abs() < 1e-12);
    }

    #[test]
    fn chi_square_perfect_fit() {
        let (stat, p) = chi_square_test(&[250, 250, 500], &[0.25, 0.25, 0.5]);
        assert_eq!(stat, 0.0);
        assert!((p - 1.0).abs() < 1e-12);
        let (_, p) = chi_square_test(&[400, 100, 500], &[0.25, 0.25, 0.5]);
        assert!(p < 1e-10);
    }

    #[test]
    fn anderson_darling_separates() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let normal = standard_normals(&mut rng, 500);
        let (_, p) = anderson_darling_normal(&normal);
        assert!(p > 0.01);
        let skewed: Vec<f64> = normal.iter().map(|x| x.exp()).collect();
        let (_, p) = anderson_darling_normal(&skewed);
        assert!(p < 1e-6);
    }
}
