use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::run::RunSummary;
use super::ExperimentPlan;
use crate::error::Result;

/// Write `config_echo.cfg`, `summary.json` and one CSV per computed statistic.
pub fn write_outputs(dir: &Path, plan: &ExperimentPlan, summary: &RunSummary) -> Result<()> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join("config_echo.cfg"), plan.settings.echo())?;
    let mut json = serde_json::to_string_pretty(summary)?;
    json.push('\n');
    fs::write(dir.join("summary.json"), json)?;

    if let Some(d) = &summary.degree {
        let mut s = String::from("n,k,count,p_theory\n");
        for k in 1..=d.max_degree {
            let _ = writeln!(
                s,
                "{},{},{},{}",
                d.pooled_n,
                k,
                d.pooled_counts[k],
                d.theory[k - 1]
            );
        }
        fs::write(dir.join("degree_hist.csv"), s)?;
    }
    if let Some(f) = &summary.fringe {
        let pooled_n = summary.n_final * summary.replicates;
        let mut s = String::from("n,code,count,prob_theory\n");
        for row in &f.rows {
            let _ = writeln!(s, "{},{},{},{}", pooled_n, row.code, row.count, row.theory);
        }
        fs::write(dir.join("fringe.csv"), s)?;
        let mut s = String::from("n,code,parent_code,count,prob_theory\n");
        for row in &f.extended {
            let _ = writeln!(
                s,
                "{},{},{},{},{}",
                pooled_n, row.fringe, row.parent_fringe, row.count, row.theory
            );
        }
        fs::write(dir.join("extended_fringe.csv"), s)?;
    }
    if let Some(r) = &summary.root {
        let mut s = String::from("replicate,n_j,M,M_over_ntheta,M_over_EXn\n");
        for (i, t) in r.trajectories.iter().enumerate() {
            for p in &t.points {
                let ex = p.over_ex_x.map(|v| v.to_string()).unwrap_or_default();
                let _ = writeln!(s, "{},{},{},{},{}", i, p.n, p.degree, p.over_n_theta, ex);
            }
        }
        fs::write(dir.join("root.csv"), s)?;
    }
    if let Some(c) = &summary.clt {
        let mut s = String::from("replicate,s_r\n");
        for (i, v) in c.values.iter().enumerate() {
            let _ = writeln!(s, "{i},{v}");
        }
        fs::write(dir.join("clt.csv"), s)?;
    }
    if let Some(d) = &summary.delay_scan {
        let mut s = String::from("n,e_n,stderr,verdict\n");
        for row in &d.scan.rows {
            let _ = writeln!(s, "{},{},{},{}", row.n, row.e_n, row.stderr, d.scan.verdict);
        }
        fs::write(dir.join("delay_scan.csv"), s)?;
    }
    Ok(())
}
