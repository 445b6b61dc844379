//! The JSON run configuration.

use std::path::Path;

use hm_core::rates::{CounterFn, Real};
use hm_core::schemes::{Schedule, SequenceSpec, FIXTURES};
use hm_core::splitting::SPLIT_FIXTURES;
use serde::{Deserialize, Serialize};

use crate::{usage, CliResult};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    Hm,
    HmErrors,
    Halpern,
    Km,
    Tkm,
    Gfb,
    Gdr,
}

impl Scheme {
    pub fn is_splitting(self) -> bool {
        matches!(self, Scheme::Gfb | Scheme::Gdr)
    }

    /// Residual/rate pairings with a rate to compare against; the first is
    /// the default.
    pub fn checks(self) -> &'static [&'static str] {
        match self {
            Scheme::Hm => &["rho1", "rho2", "rho3"],
            Scheme::Halpern => &["ar", "t_res"],
            Scheme::HmErrors => &["nu_hat"],
            _ => &[],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleSpec {
    #[serde(default = "harmonic")]
    pub alpha: SequenceSpec,
    #[serde(default = "half")]
    pub beta: SequenceSpec,
}

fn harmonic() -> SequenceSpec {
    SequenceSpec::Harmonic
}

fn half() -> SequenceSpec {
    SequenceSpec::Constant { value: 0.5 }
}

impl Default for ScheduleSpec {
    fn default() -> Self {
        ScheduleSpec { alpha: harmonic(), beta: half() }
    }
}

/// `n ↦ a·n + b`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AffineSpec {
    pub a: u64,
    pub b: u64,
}

impl AffineSpec {
    pub fn build(self) -> CounterFn {
        CounterFn::affine(self.a, self.b)
    }
}

/// An ε given as a JSON number or as an exact string such as `"1/10"`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum EpsSpec {
    Number(f64),
    Text(String),
}

impl EpsSpec {
    /// The exact rational and an `f64` for comparisons with residuals.
    pub fn parse(&self) -> CliResult<(Real, f64)> {
        let r = match self {
            EpsSpec::Number(x) => Real::parse(&x.to_string())?,
            EpsSpec::Text(s) => Real::parse(s)?,
        };
        let f = r.exact().map(|q| q.to_f64()).unwrap_or(f64::NAN);
        Ok((r, f))
    }

    pub fn label(&self) -> String {
        match self {
            EpsSpec::Number(x) => x.to_string(),
            EpsSpec::Text(s) => s.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Outputs {
    #[serde(default = "default_csv")]
    pub csv: String,
    #[serde(default = "default_jsonl")]
    pub jsonl: String,
    #[serde(default = "default_report")]
    pub report: String,
}

fn default_csv() -> String {
    "trajectory.csv".into()
}

fn default_jsonl() -> String {
    "trajectory.jsonl".into()
}

fn default_report() -> String {
    "report.json".into()
}

impl Default for Outputs {
    fn default() -> Self {
        Outputs { csv: default_csv(), jsonl: default_jsonl(), report: default_report() }
    }
}

fn one() -> u32 {
    SCHEMA_VERSION
}

fn default_stride() -> usize {
    1
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default = "one")]
    pub schema_version: u32,
    pub fixture: String,
    pub scheme: Scheme,
    #[serde(default)]
    pub schedule: ScheduleSpec,
    pub steps: usize,
    /// Keep every `stride`-th iterate in the exports.
    #[serde(default = "default_stride")]
    pub stride: usize,
    #[serde(default)]
    pub eps_grid: Vec<EpsSpec>,
    /// Residual/rate pairings reported per ε; empty means the scheme's
    /// default (`rho1` for hm, `ar` for halpern, `nu_hat` for hm_errors).
    #[serde(default)]
    pub checks: Vec<String>,
    /// Counter-function for metastability reports.
    #[serde(default)]
    pub counter: Option<AffineSpec>,
    /// Error sizes `δ_n` for `hm_errors`.
    #[serde(default)]
    pub errors: Option<SequenceSpec>,
    /// `γ_n` for `tkm`.
    #[serde(default)]
    pub gamma: Option<SequenceSpec>,
    #[serde(default)]
    pub outputs: Outputs,
    #[serde(default)]
    pub seed: u64,
}

impl RunConfig {
    pub fn from_json(text: &str) -> CliResult<Self> {
        let c: RunConfig = serde_json::from_str(text)?;
        c.validate()?;
        Ok(c)
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
        RunConfig::from_json(&text)
    }

    pub fn validate(&self) -> CliResult<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(usage(format!("unsupported schema_version {} (expected {SCHEMA_VERSION})", self.schema_version)));
        }
        if self.steps == 0 {
            return Err(usage("steps must be at least 1"));
        }
        if self.stride == 0 {
            return Err(usage("stride must be at least 1"));
        }
        let known: &[&str] = if self.scheme.is_splitting() { &SPLIT_FIXTURES } else { &FIXTURES };
        if !known.contains(&self.fixture.as_str()) {
            return Err(usage(format!(
                "fixture {:?} is not available for scheme {:?}; known: {}",
                self.fixture,
                self.scheme,
                known.join(", ")
            )));
        }
        match self.scheme {
            Scheme::HmErrors if self.errors.is_none() => return Err(usage("scheme hm_errors needs an `errors` sequence")),
            Scheme::Tkm if self.gamma.is_none() => return Err(usage("scheme tkm needs a `gamma` sequence")),
            _ => {}
        }
        let allowed = self.scheme.checks();
        for c in &self.checks {
            if !allowed.contains(&c.as_str()) {
                return Err(usage(format!("check {c:?} not available for {:?}; known: {}", self.scheme, allowed.join(", "))));
            }
        }
        for e in &self.eps_grid {
            e.parse()?;
        }
        Ok(())
    }

    /// The requested checks, or the scheme default.
    pub fn checks(&self) -> Vec<&str> {
        if self.checks.is_empty() {
            self.scheme.checks().first().into_iter().copied().collect()
        } else {
            self.checks.iter().map(String::as_str).collect()
        }
    }

    pub fn schedule(&self) -> CliResult<Schedule> {
        Ok(Schedule::from_specs(&self.schedule.alpha, &self.schedule.beta)?)
    }
}
