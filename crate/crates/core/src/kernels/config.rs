//! Run configuration and its plain-text `key = value` file format.
//!
//! ```text
//! # comment
//! n_final = 50000
//! kernel.kind = affine        # uniform | affine | tabulated
//! kernel.alpha = 0
//! kernel.table = 1,2,2.5      # tabulated only
//! kernel.tail = const         # const | power:<a>
//! kernel.f_star = 1           # tabulated only
//! kernel.monotone = true      # tabulated only
//! delay.kind = invpow         # zero | constant | uniform | invpow | pareto | table
//! delay.param = 2             # constant: c, invpow: p, pareto: tail,scale, table: u/q,u/q,...
//! beta = 0.5
//! seed = 1
//! replicates = 20
//! sampler = auto              # auto | affine | rejection | scan
//! fringe_cap = 6
//! tolerance = 0.01
//! ```
//!
//! Unknown keys are rejected. [`RunSettings::echo`] writes every key in a fixed
//! order; feeding the echo back in reproduces the same settings.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use sha2::{Digest, Sha256};

use super::attachment::{AttachmentKernel, TailRule};
use super::delay::{DelayKind, DelayLaw};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SamplerStrategy {
    Auto,
    AffineEdgeTrick,
    FenwickRejection,
    LinearScanOracle,
}

impl SamplerStrategy {
    /// Concrete strategy for `kernel`; `Auto` picks the fastest exact one.
    pub fn resolve(self, kernel: &AttachmentKernel<f64>) -> Result<SamplerStrategy> {
        match self {
            SamplerStrategy::Auto => Ok(if kernel.affine_parts().is_some() {
                SamplerStrategy::AffineEdgeTrick
            } else if kernel.is_monotone() {
                SamplerStrategy::FenwickRejection
            } else {
                SamplerStrategy::LinearScanOracle
            }),
            SamplerStrategy::AffineEdgeTrick if kernel.affine_parts().is_none() => Err(
                Error::Strategy("edge-endpoint sampling needs an affine or uniform kernel".into()),
            ),
            SamplerStrategy::FenwickRejection if !kernel.is_monotone() => Err(Error::Strategy(
                "rejection sampling needs a non-decreasing kernel; use the scan sampler".into(),
            )),
            s => Ok(s),
        }
    }
}

impl fmt::Display for SamplerStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SamplerStrategy::Auto => "auto",
            SamplerStrategy::AffineEdgeTrick => "affine",
            SamplerStrategy::FenwickRejection => "rejection",
            SamplerStrategy::LinearScanOracle => "scan",
        })
    }
}

impl FromStr for SamplerStrategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auto" => Ok(SamplerStrategy::Auto),
            "affine" => Ok(SamplerStrategy::AffineEdgeTrick),
            "rejection" => Ok(SamplerStrategy::FenwickRejection),
            "scan" => Ok(SamplerStrategy::LinearScanOracle),
            other => Err(Error::Config(format!("unknown sampler '{other}'"))),
        }
    }
}

/// Everything needed to grow one tree.
#[derive(Debug, Clone)]
pub struct GrowthConfig {
    pub n_final: usize,
    pub kernel: AttachmentKernel<f64>,
    pub delay: DelayLaw,
    pub seed: u64,
    pub sampler_strategy: SamplerStrategy,
    pub fringe_size_cap: usize,
}

impl GrowthConfig {
    pub fn new(n_final: usize, kernel: AttachmentKernel<f64>, delay: DelayLaw, seed: u64) -> Self {
        GrowthConfig {
            n_final,
            kernel,
            delay,
            seed,
            sampler_strategy: SamplerStrategy::Auto,
            fringe_size_cap: 6,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_final < 2 {
            return Err(Error::InvalidArgument(format!(
                "n_final must be >= 2, got {}",
                self.n_final
            )));
        }
        if self.n_final > u32::MAX as usize {
            return Err(Error::InvalidArgument(
                "n_final exceeds 32-bit vertex ids".into(),
            ));
        }
        if self.fringe_size_cap < 1 {
            return Err(Error::InvalidArgument(
                "fringe_size_cap must be >= 1".into(),
            ));
        }
        self.sampler_strategy.resolve(&self.kernel)?;
        Ok(())
    }
}

const KEYS: &[&str] = &[
    "n_final",
    "kernel.kind",
    "kernel.alpha",
    "kernel.table",
    "kernel.tail",
    "kernel.f_star",
    "kernel.monotone",
    "delay.kind",
    "delay.param",
    "beta",
    "seed",
    "replicates",
    "sampler",
    "fringe_cap",
    "tolerance",
];

/// Flat settings as read from a config file plus overrides.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSettings {
    pub n_final: usize,
    pub kernel_kind: String,
    pub kernel_alpha: f64,
    pub kernel_table: Vec<f64>,
    pub kernel_tail: String,
    pub kernel_f_star: Option<f64>,
    pub kernel_monotone: bool,
    pub delay_kind: String,
    pub delay_param: String,
    pub beta: f64,
    pub seed: u64,
    pub replicates: usize,
    pub sampler: SamplerStrategy,
    pub fringe_cap: usize,
    pub tolerance: f64,
}

impl Default for RunSettings {
    fn default() -> Self {
        RunSettings {
            n_final: 10_000,
            kernel_kind: "affine".into(),
            kernel_alpha: 0.0,
            kernel_table: Vec::new(),
            kernel_tail: "const".into(),
            kernel_f_star: None,
            kernel_monotone: true,
            delay_kind: "zero".into(),
            delay_param: String::new(),
            beta: 0.5,
            seed: 1,
            replicates: 1,
            sampler: SamplerStrategy::Auto,
            fringe_cap: 6,
            tolerance: 0.01,
        }
    }
}

fn parse_num<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::Config(format!("bad value '{value}' for key {key}")))
}

fn parse_list(key: &str, value: &str) -> Result<Vec<f64>> {
    if value.trim().is_empty() {
        return Ok(Vec::new());
    }
    value.split(',').map(|s| parse_num(key, s.trim())).collect()
}

impl RunSettings {
    /// Parse a config file body; starts from defaults.
    pub fn parse(text: &str) -> Result<Self> {
        let mut settings = RunSettings::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!("line {}: expected 'key = value'", lineno + 1))
            })?;
            settings.set(key.trim(), value.trim())?;
        }
        Ok(settings)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Apply one `key = value` assignment. `delay` and `kernel` accept the
    /// combined `kind:param` shorthand.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "n_final" => self.n_final = parse_num(key, value)?,
            "kernel" => {
                let (kind, param) = value.split_once(':').unwrap_or((value, ""));
                self.kernel_kind = kind.to_string();
                if !param.is_empty() {
                    match kind {
                        "affine" => self.kernel_alpha = parse_num(key, param)?,
                        "tabulated" => self.kernel_table = parse_list(key, param)?,
                        _ => {
                            return Err(Error::Config(format!(
                                "kernel '{kind}' takes no parameter"
                            )))
                        }
                    }
                }
            }
            "kernel.kind" => self.kernel_kind = value.to_string(),
            "kernel.alpha" => self.kernel_alpha = parse_num(key, value)?,
            "kernel.table" => self.kernel_table = parse_list(key, value)?,
            "kernel.tail" => self.kernel_tail = value.to_string(),
            "kernel.f_star" => {
                self.kernel_f_star = if value.is_empty() || value == "none" {
                    None
                } else {
                    Some(parse_num(key, value)?)
                }
            }
            "kernel.monotone" => self.kernel_monotone = parse_num(key, value)?,
            "delay" => {
                let (kind, param) = value.split_once(':').unwrap_or((value, ""));
                self.delay_kind = kind.to_string();
                self.delay_param = param.to_string();
            }
            "delay.kind" => self.delay_kind = value.to_string(),
            "delay.param" => self.delay_param = value.to_string(),
            "beta" => self.beta = parse_num(key, value)?,
            "seed" => self.seed = parse_num(key, value)?,
            "replicates" => self.replicates = parse_num(key, value)?,
            "sampler" => self.sampler = value.parse()?,
            "fringe_cap" => self.fringe_cap = parse_num(key, value)?,
            "tolerance" => self.tolerance = parse_num(key, value)?,
            other => return Err(Error::Config(format!("unknown config key '{other}'"))),
        }
        Ok(())
    }

    /// Apply `key=value` override strings.
    pub fn apply_overrides<S: AsRef<str>>(&mut self, overrides: &[S]) -> Result<()> {
        for o in overrides {
            let (k, v) = o.as_ref().split_once('=').ok_or_else(|| {
                Error::Config(format!("override '{}' is not key=value", o.as_ref()))
            })?;
            self.set(k.trim(), v.trim())?;
        }
        Ok(())
    }

    pub fn kernel(&self) -> Result<AttachmentKernel<f64>> {
        match self.kernel_kind.as_str() {
            "uniform" => Ok(AttachmentKernel::uniform()),
            "affine" => AttachmentKernel::affine(self.kernel_alpha),
            "tabulated" => {
                let tail = match self.kernel_tail.as_str() {
                    "const" => TailRule::ConstantAfterTable,
                    t => match t.strip_prefix("power:") {
                        Some(a) => TailRule::Power {
                            exponent: parse_num("kernel.tail", a)?,
                        },
                        None => return Err(Error::Config(format!("unknown kernel tail '{t}'"))),
                    },
                };
                let f_star = self.kernel_f_star.ok_or_else(|| {
                    Error::Config("tabulated kernels need an explicit kernel.f_star".into())
                })?;
                AttachmentKernel::tabulated(
                    self.kernel_table.clone(),
                    tail,
                    f_star,
                    self.kernel_monotone,
                )
            }
            other => Err(Error::Config(format!("unknown kernel kind '{other}'"))),
        }
    }

    pub fn delay(&self) -> Result<DelayLaw> {
        let p = self.delay_param.trim();
        let kind = match self.delay_kind.as_str() {
            "zero" => DelayKind::Zero,
            "constant" | "const" => DelayKind::Constant(parse_num("delay.param", p)?),
            "uniform" => DelayKind::Uniform01,
            "invpow" => DelayKind::InversePowerOfUniform(parse_num("delay.param", p)?),
            "pareto" => {
                let v = parse_list("delay.param", p)?;
                if v.len() != 2 {
                    return Err(Error::Config("pareto delay.param is 'tail,scale'".into()));
                }
                DelayKind::Pareto {
                    tail: v[0],
                    scale: v[1],
                }
            }
            "table" => {
                let knots = p
                    .split(',')
                    .map(|pair| {
                        let (u, q) = pair.split_once('/').ok_or_else(|| {
                            Error::Config(format!("table knot '{pair}' is not u/q"))
                        })?;
                        Ok((
                            parse_num("delay.param", u.trim())?,
                            parse_num("delay.param", q.trim())?,
                        ))
                    })
                    .collect::<Result<Vec<_>>>()?;
                DelayKind::QuantileTable(knots)
            }
            other => return Err(Error::Config(format!("unknown delay kind '{other}'"))),
        };
        DelayLaw::new(kind, self.beta)
    }

    pub fn growth_config(&self) -> Result<GrowthConfig> {
        if self.replicates < 1 {
            return Err(Error::Config("replicates must be >= 1".into()));
        }
        let cfg = GrowthConfig {
            n_final: self.n_final,
            kernel: self.kernel()?,
            delay: self.delay()?,
            seed: self.seed,
            sampler_strategy: self.sampler,
            fringe_size_cap: self.fringe_cap,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Canonical `key = value` listing of every setting.
    pub fn echo(&self) -> String {
        let table = self
            .kernel_table
            .iter()
            .map(|v| v.to_string())
            .collect::<Vec<_>>()
            .join(",");
        let values: Vec<String> = vec![
            self.n_final.to_string(),
            self.kernel_kind.clone(),
            self.kernel_alpha.to_string(),
            table,
            self.kernel_tail.clone(),
            self.kernel_f_star
                .map(|v| v.to_string())
                .unwrap_or_else(|| "none".into()),
            self.kernel_monotone.to_string(),
            self.delay_kind.clone(),
            self.delay_param.clone(),
            self.beta.to_string(),
            self.seed.to_string(),
            self.replicates.to_string(),
            self.sampler.to_string(),
            self.fringe_cap.to_string(),
            self.tolerance.to_string(),
        ];
        let mut out = String::new();
        for (k, v) in KEYS.iter().zip(values) {
            out.push_str(k);
            out.push_str(" = ");
            out.push_str(&v);
            out.push('\n');
        }
        out
    }

    /// First 16 hex digits of SHA-256 over [`Self::echo`].
    pub fn config_hash(&self) -> String {
        let digest = Sha256::digest(self.echo().as_bytes());
        digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
    }
}

/// Presets: beta = 1/2, f(k) = k, n = 50000, four delay regimes.
pub fn preset(name: &str) -> Result<RunSettings> {
    let delay = match name {
        "fig1-a" | "no-delay" => "zero",
        "fig1-b" | "uniform" => "uniform",
        "fig1-c" | "inverse-uniform" => "invpow:1",
        "fig1-d" | "inverse-uniform-squared" => "invpow:2",
        other => return Err(Error::Config(format!("unknown preset '{other}'"))),
    };
    let mut s = RunSettings {
        n_final: 50_000,
        kernel_kind: "affine".into(),
        kernel_alpha: 0.0,
        beta: 0.5,
        replicates: 20,
        ..RunSettings::default()
    };
    s.set("delay", delay)?;
    Ok(s)
}

pub const PRESETS: &[&str] = &["fig1-a", "fig1-b", "fig1-c", "fig1-d"];

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_echo_round_trip() {
        let text = "# demo\nn_final = 500\nkernel.kind = tabulated\nkernel.table = 1, 1.5, 1.9\n\
                    kernel.tail = power:0.5\nkernel.f_star = 1\ndelay.kind = pareto\n\
                    delay.param = 1.5,2\nbeta = 0.3\nseed = 99 # trailing\nsampler = rejection\n";
        let s = RunSettings::parse(text).unwrap();
        assert_eq!(s.n_final, 500);
        assert_eq!(s.kernel_table, vec![1.0, 1.5, 1.9]);
        let again = RunSettings::parse(&s.echo()).unwrap();
        assert_eq!(s, again);
        assert_eq!(s.config_hash(), again.config_hash());
        let cfg = s.growth_config().unwrap();
        assert_eq!(cfg.sampler_strategy, SamplerStrategy::FenwickRejection);
    }

    #[test]
    fn unknown_key_rejected() {
        assert!(matches!(
            RunSettings::parse("n_finall = 3"),
            Err(Error::Config(_))
        ));
        assert!(RunSettings::parse("just words").is_err());
    }

    #[test]
    fn overrides_and_shorthand() {
        let mut s = RunSettings::default();
        s.apply_overrides(&["delay=invpow:2", "kernel=affine:1.5", "n_final=77"])
            .unwrap();
        assert_eq!(s.delay_kind, "invpow");
        assert_eq!(s.delay_param, "2");
        assert_eq!(s.kernel_alpha, 1.5);
        assert_eq!(s.n_final, 77);
        assert!(s.apply_overrides(&["nonsense"]).is_err());
    }

    #[test]
    fn auto_strategy_resolution() {
        let affine = AttachmentKernel::affine(0.0).unwrap();
        let uni = AttachmentKernel::uniform();
        let mono =
            AttachmentKernel::tabulated(vec![1.0, 2.0], TailRule::ConstantAfterTable, 1.0, true)
                .unwrap();
        let bumpy =
            AttachmentKernel::tabulated(vec![2.0, 1.0], TailRule::ConstantAfterTable, 1.0, false)
                .unwrap();
        let auto = SamplerStrategy::Auto;
        assert_eq!(
            auto.resolve(&affine).unwrap(),
            SamplerStrategy::AffineEdgeTrick
        );
        assert_eq!(
            auto.resolve(&uni).unwrap(),
            SamplerStrategy::AffineEdgeTrick
        );
        assert_eq!(
            auto.resolve(&mono).unwrap(),
            SamplerStrategy::FenwickRejection
        );
        assert_eq!(
            auto.resolve(&bumpy).unwrap(),
            SamplerStrategy::LinearScanOracle
        );
        assert!(SamplerStrategy::FenwickRejection.resolve(&bumpy).is_err());
        assert!(SamplerStrategy::AffineEdgeTrick.resolve(&mono).is_err());
    }

    #[test]
    fn config_validation() {
        let s = RunSettings {
            n_final: 1,
            ..RunSettings::default()
        };
        assert!(s.growth_config().is_err());
        let s = RunSettings {
            fringe_cap: 0,
            ..RunSettings::default()
        };
        assert!(s.growth_config().is_err());
    }

    #[test]
    fn presets_exist() {
        for p in PRESETS {
            let s = preset(p).unwrap();
            assert_eq!(s.n_final, 50_000);
            s.growth_config().unwrap();
        }
        assert_eq!(
            preset("fig1-d").unwrap().delay().unwrap().x_tail_index(),
            Some(0.25)
        );
    }
}
