//! Command-line front end.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::error::{Error, Result};
use crate::estimators::{delay_condition_scan, ScanMethod, Verdict};
use crate::harness::{decade_grid, run, ExperimentPlan, RunSummary, Statistic};
use crate::kernels::{preset, KernelKind, RunSettings};
use crate::theory::{
    clt_constants, degree_law, fringe_recursion, root_degree_constants, solve_malthusian,
};

#[derive(Debug, Parser)]
#[command(
    name = "delayed-pa",
    version,
    about = "Preferential-attachment trees with delayed information"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Grow replicate trees and compare degree and fringe statistics with theory.
    Simulate(RunArgs),
    /// Print the Malthusian parameter, degree law and constants.
    Theory(TheoryArgs),
    /// Compare empirical fringe frequencies with the fringe measure.
    Fringe(RunArgs),
    /// Root-degree trajectories.
    Rootdeg(RootArgs),
    /// Leaf-count CLT statistic across replicates.
    Clt(RunArgs),
    /// Tabulate the delay conditions over a grid of n.
    CheckDelay(DelayArgs),
    /// Run every applicable comparison.
    Compare(RunArgs),
}

#[derive(Debug, Args, Clone, Default)]
pub struct CommonArgs {
    /// Config file (`key = value` lines).
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Named preset (fig1-a, fig1-b, fig1-c, fig1-d).
    #[arg(long)]
    pub preset: Option<String>,
    /// Override any config key; repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,
    /// Output directory for CSV/JSON files.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// uniform | affine | tabulated
    #[arg(long)]
    pub kernel: Option<String>,
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Delay as kind[:param], e.g. invpow:2.
    #[arg(long)]
    pub delay: Option<String>,
    #[arg(long)]
    pub beta: Option<f64>,
    /// Final tree size.
    #[arg(long = "n")]
    pub n: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub replicates: Option<usize>,
    /// auto | affine | rejection | scan
    #[arg(long)]
    pub sampler: Option<String>,
    #[arg(long = "fringe-cap")]
    pub fringe_cap: Option<usize>,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Args)]
pub struct TheoryArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Number of degree probabilities to print.
    #[arg(long, default_value_t = 10)]
    pub kmax: usize,
}

#[derive(Debug, Args)]
pub struct RootArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Recording times, e.g. `1e3,1e4,1e5` or `1e3..1e5`; default is the geometric grid.
    #[arg(long)]
    pub grid: Option<String>,
}

#[derive(Debug, Args)]
pub struct DelayArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Grid of n, e.g. `1e2..1e6` (decades) or `100,1000,5000`.
    #[arg(long, default_value = "1e2..1e6")]
    pub ngrid: String,
    /// Use Monte Carlo with this many samples instead of exact summation.
    #[arg(long)]
    pub samples: Option<usize>,
}

impl CommonArgs {
    /// Preset or config file, then the sugar flags, then `--set` overrides.
    pub fn settings(&self) -> Result<RunSettings> {
        let mut s = match (&self.preset, &self.config) {
            (Some(_), Some(_)) => {
                return Err(Error::Config(
                    "use either --preset or --config, not both".into(),
                ))
            }
            (Some(p), None) => preset(p)?,
            (None, Some(path)) => RunSettings::load(path)?,
            (None, None) => RunSettings::default(),
        };
        if let Some(k) = &self.kernel {
            s.set("kernel", k)?;
        }
        if let Some(a) = self.alpha {
            s.kernel_alpha = a;
        }
        if let Some(d) = &self.delay {
            s.set("delay", d)?;
        }
        if let Some(b) = self.beta {
            s.beta = b;
        }
        if let Some(n) = self.n {
            s.n_final = n;
        }
        if let Some(seed) = self.seed {
            s.seed = seed;
        }
        if let Some(r) = self.replicates {
            s.replicates = r;
        }
        if let Some(sampler) = &self.sampler {
            s.set("sampler", sampler)?;
        }
        if let Some(c) = self.fringe_cap {
            s.fringe_cap = c;
        }
        s.apply_overrides(&self.overrides)?;
        Ok(s)
    }
}

/// Parse `1e2..1e6` as decades or a comma list of (possibly scientific) integers.
pub fn parse_grid(text: &str) -> Result<Vec<usize>> {
    let num = |s: &str| -> Result<usize> {
        let v: f64 = s
            .trim()
            .parse()
            .map_err(|_| Error::Config(format!("bad grid value '{s}'")))?;
        if !(v >= 1.0 && v.fract() == 0.0 && v < 1e15) {
            return Err(Error::Config(format!(
                "grid value '{s}' is not a positive integer"
            )));
        }
        Ok(v as usize)
    };
    let grid = if let Some((lo, hi)) = text.split_once("..") {
        decade_grid(num(lo)?, num(hi)?)
    } else {
        text.split(',').map(num).collect::<Result<Vec<_>>>()?
    };
    if grid.is_empty() || grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Config(format!(
            "grid '{text}' must be non-empty and increasing"
        )));
    }
    Ok(grid)
}

/// Six decimals with trailing zeros removed.
pub fn fmt6(x: f64) -> String {
    let s = format!("{x:.6}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.to_string()
    }
}

fn report(summary: &RunSummary, out: &mut dyn Write) -> std::io::Result<()> {
    writeln!(out, "config_hash={}", summary.config_hash)?;
    writeln!(out, "lambda_star={}", fmt6(summary.lambda_star))?;
    if let Some(d) = &summary.degree {
        writeln!(out, "degree_tv={}", fmt6(d.tv_distance))?;
    }
    if let Some(f) = &summary.fringe {
        writeln!(out, "fringe_truncated_mass={}", fmt6(f.truncated_mass))?;
    }
    if let Some(r) = &summary.root {
        for (n, m) in r.grid.iter().zip(&r.mean_over_n_theta) {
            writeln!(out, "root n={n} mean_M_over_ntheta={}", fmt6(*m))?;
        }
    }
    if let Some(c) = &summary.clt {
        writeln!(
            out,
            "clt_variance={} sigma1_sq={}",
            fmt6(c.variance),
            fmt6(c.sigma1_sq)
        )?;
    }
    if let Some(r) = &summary.retries {
        writeln!(
            out,
            "sampler={} mean_retries={}",
            r.strategy,
            fmt6(r.mean_retries)
        )?;
    }
    for c in &summary.checks {
        let tag = if c.passed { "PASS" } else { "FAIL" };
        writeln!(
            out,
            "{tag} {} value={} threshold={}",
            c.name,
            fmt6(c.value),
            fmt6(c.threshold)
        )?;
    }
    Ok(())
}

fn run_plan(plan: ExperimentPlan, out: &mut dyn Write) -> Result<i32> {
    let summary = run(&plan)?;
    report(&summary, out)?;
    Ok(if summary.passed() { 0 } else { 1 })
}

fn plan_for(common: &CommonArgs, statistics: Vec<Statistic>) -> Result<ExperimentPlan> {
    let mut plan = ExperimentPlan::new(common.settings()?, statistics);
    plan.out_dir = common.out.clone();
    Ok(plan)
}

fn theory(args: &TheoryArgs, out: &mut dyn Write) -> Result<i32> {
    let settings = args.common.settings()?;
    let kernel = settings.kernel()?;
    let m = solve_malthusian(&kernel)?;
    writeln!(out, "lambda_star={}", fmt6(m.lambda_star))?;
    let law = degree_law(&kernel, m.lambda_star, args.kmax);
    for (k, p) in law.iter().enumerate() {
        writeln!(out, "p_{}={}", k + 1, fmt6(*p))?;
    }
    let table = fringe_recursion(settings.fringe_cap.max(1), &kernel, m.lambda_star)?;
    let mut constants = serde_json::Map::new();
    constants.insert("lambda_star".into(), m.lambda_star.into());
    constants.insert("rho_hat_at_solution".into(), m.rho_hat_at_solution.into());
    if let KernelKind::Affine { alpha } = kernel.kind() {
        let (p1, s2) = clt_constants(*alpha)?;
        let delay = settings.delay()?;
        let root = root_degree_constants(*alpha, &delay)?;
        writeln!(out, "sigma1_sq={}", fmt6(s2))?;
        writeln!(out, "theta={}", fmt6(root.theta))?;
        writeln!(out, "root_regime={:?}", root.regime)?;
        constants.insert("p1".into(), p1.into());
        constants.insert("sigma1_sq".into(), s2.into());
        constants.insert("theta".into(), root.theta.into());
        constants.insert("root_regime".into(), format!("{:?}", root.regime).into());
    }
    if let Some(dir) = &args.common.out {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join("config_echo.cfg"), settings.echo())?;
        let mut s = String::from("k,p_k\n");
        for (k, p) in law.iter().enumerate() {
            s.push_str(&format!("{},{}\n", k + 1, p));
        }
        std::fs::write(dir.join("theory_degree.csv"), s)?;
        let mut s = String::from("code,prob\n");
        for (t, p) in table.iter() {
            s.push_str(&format!("{t},{p}\n"));
        }
        std::fs::write(dir.join("theory_fringe.csv"), s)?;
        let mut json = serde_json::to_string_pretty(&serde_json::Value::Object(constants))?;
        json.push('\n');
        std::fs::write(dir.join("constants.json"), json)?;
    }
    Ok(0)
}

fn check_delay(args: &DelayArgs, out: &mut dyn Write) -> Result<i32> {
    let settings = args.common.settings()?;
    let delay = settings.delay()?;
    let grid = parse_grid(&args.ngrid)?;
    let method = match args.samples {
        Some(samples) => ScanMethod::MonteCarlo {
            samples,
            seed: settings.seed,
        },
        None => ScanMethod::Exact,
    };
    let scan = delay_condition_scan(&delay, &grid, method)?;
    writeln!(
        out,
        "{:>10} {:>14} {:>12} {:>14}",
        "n", "e_n", "stderr", "tail_term"
    )?;
    for r in &scan.rows {
        writeln!(
            out,
            "{:>10} {:>14.6e} {:>12.3e} {:>14.6e}",
            r.n, r.e_n, r.stderr, r.tail_term
        )?;
    }
    writeln!(out, "verdict={}", scan.verdict)?;
    if let Some(dir) = &args.common.out {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join("config_echo.cfg"), settings.echo())?;
        let mut s = String::from("n,e_n,stderr,verdict\n");
        for r in &scan.rows {
            s.push_str(&format!(
                "{},{},{},{}\n",
                r.n, r.e_n, r.stderr, scan.verdict
            ));
        }
        std::fs::write(dir.join("delay_scan.csv"), s)?;
    }
    Ok(if scan.verdict == Verdict::Satisfied {
        0
    } else {
        1
    })
}

/// Dispatch a parsed command; returns the process exit code.
pub fn execute(cli: Cli, out: &mut dyn Write) -> Result<i32> {
    match cli.command {
        Command::Simulate(a) => run_plan(
            plan_for(&a.common, vec![Statistic::Degree, Statistic::Fringe])?,
            out,
        ),
        Command::Fringe(a) => run_plan(plan_for(&a.common, vec![Statistic::Fringe])?, out),
        Command::Clt(a) => run_plan(plan_for(&a.common, vec![Statistic::Clt])?, out),
        Command::Rootdeg(a) => {
            let mut plan = plan_for(&a.common, vec![Statistic::Root])?;
            if let Some(g) = &a.grid {
                plan.root_grid = Some(parse_grid(g)?);
            }
            run_plan(plan, out)
        }
        Command::Compare(a) => {
            let settings = a.common.settings()?;
            let mut stats = vec![Statistic::Degree, Statistic::Fringe];
            if matches!(settings.kernel()?.kind(), KernelKind::Affine { .. }) {
                stats.push(Statistic::Root);
                if settings.replicates >= 8 {
                    stats.push(Statistic::Clt);
                }
            }
            stats.push(Statistic::DelayScan);
            run_plan(plan_for(&a.common, stats)?, out)
        }
        Command::Theory(a) => theory(&a, out),
        Command::CheckDelay(a) => check_delay(&a, out),
    }
}

/// Entry point used by the binary: parse `args`, run, map errors to exit codes.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    match execute(cli, &mut lock) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids() {
        assert_eq!(parse_grid("1e2..1e4").unwrap(), vec![100, 1000, 10_000]);
        assert_eq!(
            parse_grid("1e3, 1e4,100000").unwrap(),
            vec![1000, 10_000, 100_000]
        );
        assert!(parse_grid("10,5").is_err());
        assert!(parse_grid("1.5").is_err());
    }

    #[test]
    fn six_decimals() {
        assert_eq!(fmt6(2.0000000000001), "2");
        assert_eq!(fmt6(2.0 / 3.0), "0.666667");
        assert_eq!(fmt6(0.1), "0.1");
        assert_eq!(fmt6(-1e-9), "0");
    }

    #[test]
    fn sugar_then_overrides() {
        let args = CommonArgs {
            kernel: Some("affine".into()),
            alpha: Some(1.5),
            delay: Some("invpow:2".into()),
            n: Some(123),
            overrides: vec!["seed=9".into(), "n_final=456".into()],
            ..CommonArgs::default()
        };
        let s = args.settings().unwrap();
        assert_eq!(s.kernel_alpha, 1.5);
        assert_eq!(s.delay_kind, "invpow");
        assert_eq!(s.n_final, 456);
        assert_eq!(s.seed, 9);
    }
}
