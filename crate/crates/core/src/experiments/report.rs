//! Experiment configuration and the JSON / CSV report formats.
//!
//! The JSON report is a single object with `schema_version: 1`; keys appear
//! in struct declaration order. `generated_at_unix` is the only field that
//! is not a function of the configuration.

use serde::{Deserialize, Serialize};

use crate::cycles::CYCLE_BUDGET;
use crate::error::{Error, Result};
use crate::experiments::stats::{SampleSummary, KS_MIN_SAMPLES};
use crate::gibbs::{ModelParams, ENUMERATION_MAX_N};
use crate::randmat::{SeedSpec, SpinVector};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExperimentKind {
    Clt,
    Cycles,
    Tilted,
    Approx,
    Decomposition,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::Clt => "clt",
            ExperimentKind::Cycles => "cycles",
            ExperimentKind::Tilted => "tilted",
            ExperimentKind::Approx => "approx",
            ExperimentKind::Decomposition => "decomposition",
        }
    }
}

/// Planted spin configuration for tilted experiments.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SigmaChoice {
    Ones,
    Alternating,
    Random(u64),
}

impl SigmaChoice {
    pub fn build(self, n: usize) -> SpinVector {
        match self {
            SigmaChoice::Ones => SpinVector::all_ones(n),
            SigmaChoice::Alternating => SpinVector::alternating(n),
            SigmaChoice::Random(seed) => SpinVector::random(n, SeedSpec::new(seed, n as u64)),
        }
    }
}

impl std::str::FromStr for SigmaChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ones" => Ok(SigmaChoice::Ones),
            "alternating" => Ok(SigmaChoice::Alternating),
            _ => match s.strip_prefix("random:") {
                Some(seed) => seed
                    .parse()
                    .map(SigmaChoice::Random)
                    .map_err(|e| Error::Parse(format!("bad sigma seed: {e}"))),
                None => Err(Error::Parse(format!(
                    "sigma must be ones, alternating or random:<seed>, got {s}"
                ))),
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    pub params: ModelParams,
    pub replicates: usize,
    pub master_seed: u64,
    /// Largest cycle length collected (cycles, tilted, approx).
    pub kmax: usize,
    /// Truncation depth of the cycle decomposition.
    pub m: usize,
    /// Sizes for trend checks; `params.n` is always evaluated as well.
    pub n_grid: Vec<usize>,
    /// Replicates for the Monte Carlo centring of even-length spectral statistics.
    pub centering_reps: usize,
    /// Operation budget for cycle enumeration.
    pub budget: f64,
    pub sigma: SigmaChoice,
    /// Tilted runs: compare against an independent run with a second planted
    /// configuration.
    pub gauge_check: bool,
    pub raw_samples: bool,
}

impl ExperimentConfig {
    pub fn new(kind: ExperimentKind, params: ModelParams) -> Self {
        ExperimentConfig {
            kind,
            params,
            replicates: 1000,
            master_seed: 42,
            kmax: 5,
            m: 4,
            n_grid: Vec::new(),
            centering_reps: 500,
            budget: CYCLE_BUDGET,
            sigma: SigmaChoice::Ones,
            gauge_check: true,
            raw_samples: false,
        }
    }

    /// `params.n` together with `n_grid`, ascending and deduplicated.
    pub fn sizes(&self) -> Vec<usize> {
        let mut s = self.n_grid.clone();
        s.push(self.params.n);
        s.sort_unstable();
        s.dedup();
        s
    }

    pub fn validate(&self) -> Result<()> {
        if self.replicates < KS_MIN_SAMPLES {
            return Err(Error::Precondition(format!("replicates must be >= {KS_MIN_SAMPLES}")));
        }
        if self.replicates as u64 >= 1 << 32 {
            return Err(Error::Precondition("replicates must be < 2^32".into()));
        }
        for n in self.sizes() {
            if n < 1 {
                return Err(Error::Precondition("sizes must be >= 1".into()));
            }
            match self.kind {
                ExperimentKind::Clt | ExperimentKind::Decomposition => {
                    if n > ENUMERATION_MAX_N {
                        return Err(Error::BoundExceeded {
                            what: "enumeration size n",
                            value: n as u64,
                            bound: ENUMERATION_MAX_N as u64,
                        });
                    }
                    if self.kind == ExperimentKind::Decomposition && (self.m < 1 || self.m > n) {
                        return Err(Error::Precondition(format!(
                            "decomposition depth m = {} must lie in 1..={n}",
                            self.m
                        )));
                    }
                }
                ExperimentKind::Cycles | ExperimentKind::Tilted => {
                    if self.kmax < 1 || self.kmax > n {
                        return Err(Error::Precondition(format!("kmax = {} must lie in 1..={n}", self.kmax)));
                    }
                }
                ExperimentKind::Approx => {
                    if self.kmax < 3 || self.kmax > n {
                        return Err(Error::Precondition(format!(
                            "approx needs 3 <= kmax <= n, got kmax = {} at n = {n}",
                            self.kmax
                        )));
                    }
                }
            }
        }
        if self.kind == ExperimentKind::Approx && self.centering_reps < 2 && self.kmax >= 4 {
            return Err(Error::Precondition("centering_reps must be >= 2".into()));
        }
        Ok(())
    }
}

/// A limit value the experiment is compared against.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Target {
    pub name: String,
    pub value: f64,
    pub formula: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Quantity {
    pub name: String,
    pub summary: SampleSummary,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CovarianceEntry {
    pub a: String,
    pub b: String,
    pub covariance: f64,
    pub correlation: f64,
    /// Standard error of the covariance under independence.
    pub std_error: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KsEntry {
    pub quantity: String,
    pub null_mean: f64,
    pub null_variance: f64,
    pub statistic: f64,
    pub p_value: f64,
}

/// Everything measured at one system size.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SizeResult {
    pub n: usize,
    pub quantities: Vec<Quantity>,
    pub covariances: Vec<CovarianceEntry>,
    pub ks: Vec<KsEntry>,
}

impl SizeResult {
    pub fn new(n: usize) -> Self {
        SizeResult {
            n,
            quantities: Vec::new(),
            covariances: Vec::new(),
            ks: Vec::new(),
        }
    }

    pub fn quantity(&self, name: &str) -> Option<&SampleSummary> {
        self.quantities.iter().find(|q| q.name == name).map(|q| &q.summary)
    }
}

/// A named check: `empirical` compared with `target` under `tolerance`
/// according to `comparison`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub rule: String,
    pub quantity: String,
    pub n: Option<usize>,
    pub empirical: f64,
    pub target: f64,
    pub tolerance: f64,
    pub comparison: String,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RawSeries {
    pub n: usize,
    pub name: String,
    pub values: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub schema_version: u32,
    pub kind: ExperimentKind,
    pub config: ExperimentConfig,
    pub generated_at_unix: Option<u64>,
    /// True when every sample is identically zero (`beta = 0`).
    pub degenerate: bool,
    pub targets: Vec<Target>,
    pub sizes: Vec<SizeResult>,
    pub verdicts: Vec<Verdict>,
    pub notes: Vec<String>,
    pub raw: Option<Vec<RawSeries>>,
}

impl ExperimentReport {
    pub fn new(config: &ExperimentConfig) -> Self {
        ExperimentReport {
            schema_version: SCHEMA_VERSION,
            kind: config.kind,
            config: config.clone(),
            generated_at_unix: None,
            degenerate: false,
            targets: Vec::new(),
            sizes: Vec::new(),
            verdicts: Vec::new(),
            notes: Vec::new(),
            raw: None,
        }
    }

    pub fn passed(&self) -> bool {
        self.verdicts.iter().all(|v| v.passed)
    }

    pub fn verdict(&self, rule: &str) -> Option<&Verdict> {
        self.verdicts.iter().find(|v| v.rule == rule)
    }

    pub fn size(&self, n: usize) -> Option<&SizeResult> {
        self.sizes.iter().find(|s| s.n == n)
    }

    pub fn target(&self, name: &str) -> Option<f64> {
        self.targets.iter().find(|t| t.name == name).map(|t| t.value)
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let report: ExperimentReport = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        if report.schema_version != SCHEMA_VERSION {
            return Err(Error::Parse(format!(
                "unsupported schema_version {}",
                report.schema_version
            )));
        }
        Ok(report)
    }

    /// Raw samples as CSV: `n,replicate,<quantity>...`, one row per
    /// replicate. Empty when raw samples were not collected.
    pub fn raw_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let raw = self.raw.as_deref().unwrap_or(&[]);
        let names: Vec<&str> = {
            let mut v: Vec<&str> = Vec::new();
            for s in raw {
                if !v.contains(&s.name.as_str()) {
                    v.push(&s.name);
                }
            }
            v
        };
        let mut header = vec!["n".to_string(), "replicate".to_string()];
        header.extend(names.iter().map(|s| s.to_string()));
        w.write_record(&header).map_err(|e| Error::Io(e.to_string()))?;
        let mut sizes: Vec<usize> = raw.iter().map(|s| s.n).collect();
        sizes.dedup();
        for n in sizes {
            let cols: Vec<Option<&RawSeries>> = names
                .iter()
                .map(|name| raw.iter().find(|s| s.n == n && s.name == *name))
                .collect();
            let rows = cols.iter().flatten().map(|s| s.values.len()).max().unwrap_or(0);
            for r in 0..rows {
                let mut rec = vec![n.to_string(), r.to_string()];
                for c in &cols {
                    rec.push(
                        c.and_then(|s| s.values.get(r))
                            .map(|v| format!("{v:?}"))
                            .unwrap_or_default(),
                    );
                }
                w.write_record(&rec).map_err(|e| Error::Io(e.to_string()))?;
            }
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
    }
}
