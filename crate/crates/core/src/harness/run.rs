use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use super::{replicate_seed, ExperimentPlan, Statistic};
use crate::canonical::CanonicalTree;
use crate::engine::{grow_with_stats, SamplerStats};
use crate::error::{Error, Result};
use crate::estimators::{
    census_from_codes, degree_hist, delay_condition_scan, extended_census_from_codes, fringe_codes,
    geometric_grid, leaf_clt_statistic, root_trajectory, DegreeHist, DelayScan,
    ExtendedFringeCensus, FringeCensus, RootTrajectory, ScanMethod, Verdict,
};
use crate::kernels::{GrowthConfig, KernelKind, SamplerStrategy};
use crate::stats::{anderson_darling_normal, mean_and_variance, tv_distance};
use crate::theory::{
    degree_law, extended_fringe_law, fringe_recursion, root_degree_constants, solve_malthusian,
    RootRegime,
};

/// One named pass/fail comparison.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub threshold: f64,
    pub passed: bool,
}

impl Check {
    fn at_most(name: impl Into<String>, value: f64, threshold: f64) -> Self {
        Check {
            name: name.into(),
            value,
            threshold,
            passed: value <= threshold,
        }
    }

    fn at_least(name: impl Into<String>, value: f64, threshold: f64) -> Self {
        Check {
            name: name.into(),
            value,
            threshold,
            passed: value >= threshold,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DegreeSummary {
    /// Pooled counts over all replicates, `counts[k]`.
    pub pooled_counts: Vec<u64>,
    pub pooled_n: usize,
    pub theory: Vec<f64>,
    pub tv_distance: f64,
    pub max_degree: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FringeRow {
    pub code: String,
    pub count: u64,
    /// Mean over replicates of `c_n(t) / n`.
    pub empirical: f64,
    /// Standard error of that mean (0 with a single replicate).
    pub stderr: f64,
    pub theory: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExtendedFringeRow {
    pub fringe: String,
    pub parent_fringe: String,
    pub count: u64,
    pub empirical: f64,
    pub theory: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FringeSummary {
    pub cap: usize,
    pub truncated_mass: f64,
    pub rows: Vec<FringeRow>,
    pub extended: Vec<ExtendedFringeRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RootSummary {
    pub theta: f64,
    pub regime: RootRegime,
    pub grid: Vec<usize>,
    /// Mean of `M / n^theta` at each grid point.
    pub mean_over_n_theta: Vec<f64>,
    /// Share of replicates whose `M / n^theta` moved by less than the drift
    /// tolerance between the last two grid points.
    pub stable_share: f64,
    /// Share whose `M / n^theta` grew by the growth factor from the first to
    /// the last grid point.
    pub growth_share: f64,
    /// Share with `M >= fraction * E[X ∧ n]` at the last grid point.
    pub ex_share: f64,
    pub trajectories: Vec<RootTrajectory>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CltSummary {
    pub n: usize,
    pub p1: f64,
    pub sigma1_sq: f64,
    pub mean: f64,
    pub variance: f64,
    pub variance_rel_error: f64,
    pub anderson_darling: f64,
    pub normality_p_value: f64,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DelayScanSummary {
    pub scan: DelayScan,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RetrySummary {
    pub strategy: &'static str,
    pub draws: u64,
    pub proposals: u64,
    pub mean_retries: f64,
    pub max_proposals: u64,
}

/// Aggregated results of a plan. Everything except `wall_time_secs` is a
/// deterministic function of the plan.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunSummary {
    pub config_hash: String,
    pub n_final: usize,
    pub replicates: usize,
    pub kernel: String,
    pub delay: String,
    pub beta: f64,
    pub lambda_star: f64,
    pub seeds: Vec<u64>,
    pub degree: Option<DegreeSummary>,
    pub fringe: Option<FringeSummary>,
    pub root: Option<RootSummary>,
    pub clt: Option<CltSummary>,
    pub delay_scan: Option<DelayScanSummary>,
    pub retries: Option<RetrySummary>,
    pub checks: Vec<Check>,
    #[serde(skip)]
    pub wall_time_secs: f64,
}

impl RunSummary {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

struct Replicate {
    hist: DegreeHist,
    census: Option<FringeCensus>,
    extended: Option<ExtendedFringeCensus>,
    root: Option<RootTrajectory>,
    stats: SamplerStats,
}

/// Execute `plan`: grow every replicate in parallel, fold the estimators in
/// replicate order, compare against theory and write the outputs if an
/// output directory is set.
pub fn run(plan: &ExperimentPlan) -> Result<RunSummary> {
    let start = Instant::now();
    let settings = &plan.settings;
    let base = settings.growth_config()?;
    let strategy = base.sampler_strategy.resolve(&base.kernel)?;
    let tol = &plan.tolerances;
    let lambda_star = solve_malthusian(&base.kernel)?.lambda_star;
    let r_count = settings.replicates;
    let seeds: Vec<u64> = (0..r_count)
        .map(|r| replicate_seed(settings.seed, r))
        .collect();

    let needs_trees = plan.statistics.iter().any(|s| *s != Statistic::DelayScan);
    let root_constants = match base.kernel.kind() {
        KernelKind::Affine { alpha } => Some(root_degree_constants(*alpha, &base.delay)?),
        _ if plan.wants(Statistic::Root) => {
            return Err(Error::Unsupported(
                "root-degree scaling is stated for f(k) = k + alpha".into(),
            ))
        }
        _ => None,
    };
    let root_grid = plan
        .root_grid
        .clone()
        .unwrap_or_else(|| geometric_grid(base.n_final));

    let replicates: Vec<Replicate> = if needs_trees {
        seeds
            .par_iter()
            .map(|&seed| {
                let cfg = GrowthConfig {
                    seed,
                    ..base.clone()
                };
                let (trace, stats) = grow_with_stats(&cfg)?;
                let hist = degree_hist(&trace);
                let (census, extended) = if plan.wants(Statistic::Fringe) {
                    let codes = fringe_codes(&trace, cfg.fringe_size_cap);
                    (
                        Some(census_from_codes(&codes, cfg.fringe_size_cap)),
                        Some(extended_census_from_codes(
                            &trace,
                            &codes,
                            cfg.fringe_size_cap,
                        )),
                    )
                } else {
                    (None, None)
                };
                let root = plan
                    .wants(Statistic::Root)
                    .then(|| root_trajectory(&trace, root_constants.as_ref().unwrap(), &root_grid));
                Ok(Replicate {
                    hist,
                    census,
                    extended,
                    root,
                    stats,
                })
            })
            .collect::<Result<Vec<_>>>()?
    } else {
        Vec::new()
    };

    let mut checks = Vec::new();

    let degree = if plan.wants(Statistic::Degree) {
        let mut pooled = DegreeHist {
            n: 0,
            counts: vec![0],
        };
        for r in &replicates {
            pooled.merge(&r.hist);
        }
        let k_max = pooled.max_degree();
        let theory = degree_law(&base.kernel, lambda_star, k_max);
        let tv = tv_distance(&pooled.proportions(k_max), &theory);
        checks.push(Check::at_most("degree_tv", tv, tol.degree_tv));
        Some(DegreeSummary {
            pooled_counts: pooled.counts.clone(),
            pooled_n: pooled.n,
            theory,
            tv_distance: tv,
            max_degree: k_max,
        })
    } else {
        None
    };

    let fringe = if plan.wants(Statistic::Fringe) {
        Some(fringe_summary(
            plan,
            &replicates,
            &base,
            lambda_star,
            &mut checks,
        )?)
    } else {
        None
    };

    let root = if plan.wants(Statistic::Root) {
        let root_constants = root_constants.as_ref().unwrap();
        let trajectories: Vec<RootTrajectory> =
            replicates.iter().map(|r| r.root.clone().unwrap()).collect();
        let grid: Vec<usize> = trajectories
            .first()
            .map(|t| t.points.iter().map(|p| p.n).collect())
            .unwrap_or_default();
        let j = grid.len();
        let mean_over_n_theta = (0..j)
            .map(|i| {
                trajectories
                    .iter()
                    .map(|t| t.points[i].over_n_theta)
                    .sum::<f64>()
                    / r_count as f64
            })
            .collect();
        let share = |pred: &dyn Fn(&RootTrajectory) -> bool| {
            trajectories.iter().filter(|t| pred(t)).count() as f64 / r_count as f64
        };
        let stable_share = if j >= 2 {
            share(&|t| {
                let (a, b) = (t.points[j - 2].over_n_theta, t.points[j - 1].over_n_theta);
                a > 0.0 && ((b - a) / a).abs() < tol.root_drift
            })
        } else {
            0.0
        };
        let growth_share = if j >= 2 {
            share(&|t| {
                t.points[j - 1].over_n_theta >= tol.root_growth_factor * t.points[0].over_n_theta
            })
        } else {
            0.0
        };
        let ex_share = if j >= 1 {
            share(&|t| {
                let p = &t.points[j - 1];
                p.degree as f64 >= tol.root_ex_fraction * root_constants.ex_x_truncated(p.n as f64)
            })
        } else {
            0.0
        };
        match root_constants.regime {
            RootRegime::L2Convergent => checks.push(Check::at_least(
                "root_stable_share",
                stable_share,
                tol.root_drift_share,
            )),
            RootRegime::Heavy => {
                checks.push(Check::at_least(
                    "root_growth_share",
                    growth_share,
                    tol.root_growth_share,
                ));
                checks.push(Check::at_least(
                    "root_ex_share",
                    ex_share,
                    tol.root_ex_share,
                ));
            }
        }
        Some(RootSummary {
            theta: root_constants.theta,
            regime: root_constants.regime,
            grid,
            mean_over_n_theta,
            stable_share,
            growth_share,
            ex_share,
            trajectories,
        })
    } else {
        None
    };

    let clt = if plan.wants(Statistic::Clt) {
        let alpha = match base.kernel.kind() {
            KernelKind::Affine { alpha } => *alpha,
            _ => {
                return Err(Error::Unsupported(
                    "the leaf CLT is stated for f(k) = k + alpha".into(),
                ))
            }
        };
        let hists: Vec<DegreeHist> = replicates.iter().map(|r| r.hist.clone()).collect();
        let stat = leaf_clt_statistic(&hists, alpha)?;
        let rel = (stat.variance - stat.sigma1_sq).abs() / stat.sigma1_sq;
        checks.push(Check::at_most(
            "clt_variance_rel_error",
            rel,
            tol.clt_variance_rel,
        ));
        let (ad, p) = if stat.values.len() >= 8 {
            anderson_darling_normal(&stat.standardized())
        } else {
            (f64::NAN, f64::NAN)
        };
        if stat.values.len() >= 8 {
            checks.push(Check::at_least("clt_normality_p", p, tol.normality_level));
        }
        Some(CltSummary {
            n: stat.n,
            p1: stat.p1,
            sigma1_sq: stat.sigma1_sq,
            mean: stat.mean,
            variance: stat.variance,
            variance_rel_error: rel,
            anderson_darling: ad,
            normality_p_value: p,
            values: stat.values,
        })
    } else {
        None
    };

    let delay_scan = if plan.wants(Statistic::DelayScan) {
        let scan = delay_condition_scan(&base.delay, &plan.delay_grid, ScanMethod::Exact)?;
        checks.push(Check {
            name: "delay_conditions_satisfied".into(),
            value: if scan.verdict == Verdict::Satisfied {
                1.0
            } else {
                0.0
            },
            threshold: 1.0,
            passed: scan.verdict == Verdict::Satisfied,
        });
        Some(DelayScanSummary { scan })
    } else {
        None
    };

    let retries = needs_trees.then(|| {
        let draws: u64 = replicates.iter().map(|r| r.stats.draws).sum();
        let proposals: u64 = replicates.iter().map(|r| r.stats.proposals).sum();
        let max_proposals = replicates
            .iter()
            .map(|r| r.stats.max_proposals)
            .max()
            .unwrap_or(0);
        let mean_retries = if draws == 0 {
            0.0
        } else {
            (proposals - draws) as f64 / draws as f64
        };
        RetrySummary {
            strategy: match strategy {
                SamplerStrategy::AffineEdgeTrick => "affine",
                SamplerStrategy::FenwickRejection => "rejection",
                _ => "scan",
            },
            draws,
            proposals,
            mean_retries,
            max_proposals,
        }
    });
    if let Some(r) = &retries {
        if strategy == SamplerStrategy::FenwickRejection {
            checks.push(Check::at_most(
                "mean_rejection_retries",
                r.mean_retries,
                tol.max_mean_retries,
            ));
        }
    }

    let summary = RunSummary {
        config_hash: settings.config_hash(),
        n_final: base.n_final,
        replicates: r_count,
        kernel: base.kernel.to_string(),
        delay: base.delay.kind().to_string(),
        beta: base.delay.beta(),
        lambda_star,
        seeds,
        degree,
        fringe,
        root,
        clt,
        delay_scan,
        retries,
        checks,
        wall_time_secs: start.elapsed().as_secs_f64(),
    };
    if let Some(dir) = &plan.out_dir {
        super::write_outputs(dir, plan, &summary)?;
    }
    Ok(summary)
}

fn fringe_summary(
    plan: &ExperimentPlan,
    replicates: &[Replicate],
    base: &GrowthConfig,
    lambda_star: f64,
    checks: &mut Vec<Check>,
) -> Result<FringeSummary> {
    let tol = &plan.tolerances;
    let cap = base.fringe_size_cap;
    let table = fringe_recursion(cap, &base.kernel, lambda_star)?;
    let mut pooled: Option<FringeCensus> = None;
    let mut pooled_ext: Option<ExtendedFringeCensus> = None;
    for r in replicates {
        let c = r.census.as_ref().expect("fringe census computed");
        let e = r.extended.as_ref().expect("extended census computed");
        match &mut pooled {
            Some(p) => p.merge(c),
            None => pooled = Some(c.clone()),
        }
        match &mut pooled_ext {
            Some(p) => p.merge(e),
            None => pooled_ext = Some(e.clone()),
        }
    }
    let pooled = pooled.expect("at least one replicate");
    let pooled_ext = pooled_ext.expect("at least one replicate");

    let mut rows = Vec::new();
    let mut worst_abs: f64 = 0.0;
    let mut worst_se_ratio: f64 = 0.0;
    for shape in CanonicalTree::enumerate_up_to(cap) {
        let per_rep: Vec<f64> = replicates
            .iter()
            .map(|r| {
                let c = r.census.as_ref().unwrap();
                c.count(&shape) as f64 / c.n as f64
            })
            .collect();
        let (mean, var) = mean_and_variance(&per_rep);
        let stderr = if per_rep.len() > 1 {
            (var / per_rep.len() as f64).sqrt()
        } else {
            0.0
        };
        let theory = *table.get(&shape).expect("table covers the cap");
        if shape.size() <= tol.fringe_max_size {
            let diff = (mean - theory).abs();
            worst_abs = worst_abs.max(diff);
            if per_rep.len() > 1 {
                let ratio = if stderr > 0.0 {
                    diff / stderr
                } else if diff == 0.0 {
                    0.0
                } else {
                    f64::INFINITY
                };
                worst_se_ratio = worst_se_ratio.max(ratio);
            }
        }
        rows.push(FringeRow {
            code: shape.to_string(),
            count: pooled.count(&shape),
            empirical: mean,
            stderr,
            theory,
        });
    }
    checks.push(Check::at_most(
        "fringe_max_abs_error",
        worst_abs,
        tol.fringe_abs,
    ));
    if replicates.len() > 1 {
        checks.push(Check::at_most(
            "fringe_max_stderr_multiple",
            worst_se_ratio,
            tol.fringe_se_multiple,
        ));
    }

    let law = extended_fringe_law(&table, 1)?;
    let mut extended = Vec::new();
    let mut worst_ext: f64 = 0.0;
    for (key, theory) in &law {
        let (t0, t1) = (&key[0], &key[1]);
        let count = pooled_ext.count(t0, t1);
        let empirical = count as f64 / pooled_ext.n as f64;
        if *theory >= tol.extended_min_mass {
            worst_ext = worst_ext.max((empirical - theory).abs());
        }
        extended.push(ExtendedFringeRow {
            fringe: t0.to_string(),
            parent_fringe: t1.to_string(),
            count,
            empirical,
            theory: *theory,
        });
    }
    checks.push(Check::at_most(
        "extended_fringe_max_abs_error",
        worst_ext,
        tol.extended_abs,
    ));
    Ok(FringeSummary {
        cap,
        truncated_mass: pooled.truncated_mass(),
        rows,
        extended,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::RunSettings;

    fn settings(n: usize, replicates: usize) -> RunSettings {
        RunSettings {
            n_final: n,
            replicates,
            ..RunSettings::default()
        }
    }

    #[test]
    fn two_vertices() {
        let plan = ExperimentPlan::new(settings(2, 1), vec![Statistic::Degree]);
        let s = run(&plan).unwrap();
        let d = s.degree.unwrap();
        assert_eq!(d.pooled_n, 2);
        assert_eq!(d.pooled_counts[1], 2);
        assert_eq!(s.seeds.len(), 1);
    }

    #[test]
    fn replicate_seeds_differ() {
        let plan = ExperimentPlan::new(settings(50, 4), vec![Statistic::Degree]);
        let s = run(&plan).unwrap();
        let mut seeds = s.seeds.clone();
        seeds.dedup();
        assert_eq!(seeds.len(), 4);
    }

    #[test]
    fn rerun_is_byte_identical() {
        let a = tempfile::tempdir().unwrap();
        let b = tempfile::tempdir().unwrap();
        let stats = vec![
            Statistic::Degree,
            Statistic::Fringe,
            Statistic::Root,
            Statistic::Clt,
        ];
        for dir in [a.path(), b.path()] {
            let mut plan = ExperimentPlan::new(settings(500, 8), stats.clone());
            plan.out_dir = Some(dir.to_path_buf());
            run(&plan).unwrap();
        }
        let mut names: Vec<_> = std::fs::read_dir(a.path())
            .unwrap()
            .map(|e| e.unwrap().file_name())
            .collect();
        names.sort();
        assert!(names.len() >= 6);
        for name in names {
            let x = std::fs::read(a.path().join(&name)).unwrap();
            let y = std::fs::read(b.path().join(&name)).unwrap();
            assert_eq!(x, y, "{name:?}");
        }
    }

    #[test]
    fn root_needs_affine_kernel() {
        let mut s = settings(100, 1);
        s.kernel_kind = "uniform".into();
        let plan = ExperimentPlan::new(s, vec![Statistic::Root]);
        assert!(matches!(run(&plan), Err(Error::Unsupported(_))));
    }
}
