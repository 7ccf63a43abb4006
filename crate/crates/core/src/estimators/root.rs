use serde::Serialize;

use crate::engine::TreeTrace;
use crate::theory::RootDegreeConstants;

/// `n_j = ceil(2^{j/2})`, deduplicated and capped at `n_final` (always included).
pub fn geometric_grid(n_final: usize) -> Vec<usize> {
    let mut grid: Vec<usize> = Vec::new();
    for j in 0.. {
        let nj = 2f64.powf(j as f64 / 2.0).ceil() as usize;
        if nj >= n_final {
            break;
        }
        if grid.last() != Some(&nj) {
            grid.push(nj);
        }
    }
    grid.push(n_final);
    grid
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RootPoint {
    pub n: usize,
    pub degree: usize,
    pub over_n_theta: f64,
    /// `M / E[X ∧ n]`, when that expectation is positive.
    pub over_ex_x: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RootTrajectory {
    pub theta: f64,
    pub points: Vec<RootPoint>,
}

/// Root degree `M(root, n_j)` along `grid`, normalised by `n_j^theta` and by
/// `E[X ∧ n_j]`.
pub fn root_trajectory(
    trace: &TreeTrace,
    constants: &RootDegreeConstants,
    grid: &[usize],
) -> RootTrajectory {
    let points = grid
        .iter()
        .filter(|&&n| n >= 1 && n <= trace.len())
        .map(|&n| {
            let degree = trace.deg_at(1, n).expect("grid inside the trace");
            let ex = constants.ex_x_truncated(n as f64);
            RootPoint {
                n,
                degree,
                over_n_theta: degree as f64 / (n as f64).powf(constants.theta),
                over_ex_x: (ex > 0.0).then(|| degree as f64 / ex),
            }
        })
        .collect();
    RootTrajectory {
        theta: constants.theta,
        points,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::{AttachmentKernel, DelayLaw};
    use crate::theory::root_degree_constants;

    #[test]
    fn grid_shape() {
        assert_eq!(geometric_grid(10), vec![1, 2, 3, 4, 6, 8, 10]);
        assert_eq!(geometric_grid(1), vec![1]);
        let g = geometric_grid(100_000);
        assert!(g.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(*g.last().unwrap(), 100_000);
    }

    #[test]
    fn star_and_chain() {
        let k = AttachmentKernel::uniform();
        let c = root_degree_constants(0.0, &DelayLaw::zero(0.5).unwrap()).unwrap();
        let star = TreeTrace::from_parents(&[1; 15], &k).unwrap();
        let r = root_trajectory(&star, &c, &geometric_grid(16));
        assert!(r.points.iter().all(|p| p.degree == (p.n - 1).max(1)));
        assert_eq!(r.points[0].degree, 1);
        assert!(r.points.iter().all(|p| p.over_ex_x.is_none()));
        let chain: Vec<usize> = (1..16).collect();
        let r = root_trajectory(
            &TreeTrace::from_parents(&chain, &k).unwrap(),
            &c,
            &geometric_grid(16),
        );
        assert!(r.points.iter().all(|p| p.degree == 1));
        assert!(r.points.windows(2).all(|w| w[0].degree <= w[1].degree));
    }
}
