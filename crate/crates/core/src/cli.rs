//! The `skcw` command line.
//!
//! Exit codes: 0 on success with every verdict passing, 2 when a verdict or
//! identity check fails, 1 on usage, budget, regime or I/O errors.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::combinat::{
    cancellation_sum, chebyshev_coeffs, gen_coeff, inverse_binomial_matrix, parity_identity_check, wick_moment,
    CovMatrix, BINOMIAL_MATRIX_MAX_K, CANCELLATION_MAX_K, GEN_COEFF_MAX_M, WICK_DEFAULT_MAX_ORDER,
};
use crate::cycles::CYCLE_BUDGET;
use crate::error::{Error, Result};
use crate::experiments::{run, ExperimentConfig, ExperimentKind, ExperimentReport, SigmaChoice};
use crate::gibbs::{clt_targets, exact_log_partition, ModelParams};
use crate::randmat::{sample_gaussian_matrix, sample_tilted_matrix, SeedSpec, SymMatrix};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_VERDICT_FAILED: i32 = 2;

/// Largest degree used for the floating-point check `P_m(2 cos t) = 2 cos(m t)`.
const TRIG_CHECK_MAX_M: u32 = 20;

#[derive(Parser, Debug)]
#[command(
    name = "skcw",
    version,
    about = "Exact and Monte Carlo checks for free-energy fluctuations of the SK model with Curie-Weiss interaction"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run the exact combinatorial identity checks.
    Identities {
        /// Upper bound on the index of every check (each is also capped at its own limit).
        #[arg(long, default_value_t = 30)]
        max_k: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Draw one coupling matrix and write it in text form.
    Sample(SampleArgs),
    /// Exact log partition function and free energy of one matrix.
    FreeEnergy(FreeEnergyArgs),
    /// Joint law of signed cycles under the plain ensemble (default n=150, kmax=4, reps=1000).
    Cycles(ExperimentArgs),
    /// Free-energy CLT (default n=20, beta=0.25, J=1, J'=0, reps=1000).
    Clt(ExperimentArgs),
    /// Signed cycles under the planted ensemble (default n=150, beta=0.4, kmax=3, reps=2000).
    Tilted(ExperimentArgs),
    /// Cycles against Chebyshev spectral statistics (default n=200, kmax=5, reps=500).
    Approx(ExperimentArgs),
    /// Cycle decomposition of log Z (default n=16, beta=0.25, J=0.5, m=4, reps=500).
    Decomposition(ExperimentArgs),
    /// Re-read a JSON report, print its verdicts and re-emit it.
    Report {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args, Debug)]
struct SampleArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Stream id under the master seed.
    #[arg(long, default_value_t = 0)]
    stream: u64,
    /// Zero the diagonal.
    #[arg(long)]
    hollow: bool,
    /// Draw from the planted ensemble at this beta instead.
    #[arg(long)]
    tilted_beta: Option<f64>,
    /// Planted configuration: ones, alternating or random:<seed>.
    #[arg(long, default_value = "ones")]
    sigma: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct FreeEnergyArgs {
    /// Read the matrix from this file instead of sampling one.
    #[arg(long)]
    matrix: Option<PathBuf>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, default_value_t = 0.25)]
    beta: f64,
    #[arg(long = "J", default_value_t = 1.0)]
    j: f64,
    #[arg(long = "Jprime", default_value_t = 0.0)]
    j_prime: f64,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, default_value_t = 0)]
    stream: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ExperimentArgs {
    /// Primary system size.
    #[arg(long)]
    n: Option<usize>,
    /// Extra sizes for trend checks, comma separated.
    #[arg(long, value_delimiter = ',')]
    n_grid: Vec<usize>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long = "J")]
    j: Option<f64>,
    #[arg(long = "Jprime")]
    j_prime: Option<f64>,
    /// Largest cycle length (cycles, tilted, approx).
    #[arg(long)]
    kmax: Option<usize>,
    /// Decomposition depth.
    #[arg(long, default_value_t = 4)]
    m: usize,
    #[arg(long)]
    reps: Option<usize>,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Worker threads; defaults to all cores. Does not change the output.
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// json writes the report; csv writes raw samples.
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Keep per-replicate samples in the report.
    #[arg(long)]
    raw_samples: bool,
    /// Operation budget for cycle enumeration.
    #[arg(long, default_value_t = CYCLE_BUDGET)]
    budget: f64,
    /// Planted configuration for tilted runs: ones, alternating or random:<seed>.
    #[arg(long, default_value = "ones")]
    sigma: String,
    /// Matrices used to centre even-length spectral statistics (approx).
    #[arg(long, default_value_t = 500)]
    centering_reps: usize,
    /// Skip the second planted configuration in tilted runs.
    #[arg(long)]
    no_gauge_check: bool,
}

struct Defaults {
    n: usize,
    beta: f64,
    j: f64,
    kmax: usize,
    reps: usize,
}

fn defaults(kind: ExperimentKind) -> Defaults {
    let base = Defaults {
        n: 20,
        beta: 0.25,
        j: 1.0,
        kmax: 5,
        reps: 1000,
    };
    match kind {
        ExperimentKind::Clt => base,
        ExperimentKind::Cycles => Defaults {
            n: 150,
            kmax: 4,
            ..base
        },
        ExperimentKind::Tilted => Defaults {
            n: 150,
            beta: 0.4,
            kmax: 3,
            reps: 2000,
            ..base
        },
        ExperimentKind::Approx => Defaults {
            n: 200,
            reps: 500,
            ..base
        },
        ExperimentKind::Decomposition => Defaults {
            n: 16,
            j: 0.5,
            reps: 500,
            ..base
        },
    }
}

impl ExperimentArgs {
    fn config(&self, kind: ExperimentKind) -> Result<ExperimentConfig> {
        let d = defaults(kind);
        let params = ModelParams::new(
            self.beta.unwrap_or(d.beta),
            self.j.unwrap_or(d.j),
            self.j_prime.unwrap_or(0.0),
            self.n.unwrap_or(d.n),
        )?;
        let mut c = ExperimentConfig::new(kind, params);
        c.replicates = self.reps.unwrap_or(d.reps);
        c.master_seed = self.seed;
        c.kmax = self.kmax.unwrap_or(d.kmax);
        c.m = self.m;
        c.n_grid = self.n_grid.clone();
        c.budget = self.budget;
        c.sigma = self.sigma.parse()?;
        c.centering_reps = self.centering_reps;
        c.gauge_check = !self.no_gauge_check;
        c.raw_samples = self.raw_samples || self.format == Format::Csv;
        Ok(c)
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, text)?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            if !text.ends_with('\n') {
                stdout.write_all(b"\n")?;
            }
        }
    }
    Ok(())
}

fn unix_now() -> Option<u64> {
    std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .ok()
        .map(|d| d.as_secs())
}

fn verdict_lines(report: &ExperimentReport) -> String {
    let mut s = String::new();
    for v in &report.verdicts {
        let n = v.n.map(|n| format!(" n={n}")).unwrap_or_default();
        s.push_str(&format!(
            "{} {} {}{}: empirical {:.6}, target {:.6}, tolerance {:.6} ({})\n",
            if v.passed { "PASS" } else { "FAIL" },
            v.rule,
            v.quantity,
            n,
            v.empirical,
            v.target,
            v.tolerance,
            v.comparison
        ));
    }
    s
}

fn write_report(report: &ExperimentReport, format: Format, out: Option<&Path>) -> Result<i32> {
    let text = match format {
        Format::Json => report.to_json()?,
        Format::Csv => report.raw_csv()?,
    };
    emit(out, &text)?;
    if out.is_some() {
        print!("{}", verdict_lines(report));
    } else {
        eprint!("{}", verdict_lines(report));
    }
    Ok(if report.passed() { EXIT_OK } else { EXIT_VERDICT_FAILED })
}

fn run_experiment(kind: ExperimentKind, args: &ExperimentArgs) -> Result<i32> {
    let config = args.config(kind)?;
    if kind == ExperimentKind::Clt || kind == ExperimentKind::Decomposition {
        config.params.require_paramagnetic()?;
    }
    let mut report = run(&config, args.threads)?;
    report.generated_at_unix = unix_now();
    write_report(&report, args.format, args.out.as_deref())
}

struct IdentityCheck {
    name: String,
    passed: bool,
}

fn identity_checks(max_k: u32) -> Result<Vec<IdentityCheck>> {
    let mut checks = Vec::new();
    let kc = max_k.min(CANCELLATION_MAX_K);
    if kc >= 2 {
        let mut ok = true;
        for k in 2..=kc {
            ok &= cancellation_sum(k)? == 0;
        }
        checks.push(IdentityCheck {
            name: format!("cancellation_sum(k) = 0 for 2 <= k <= {kc}"),
            passed: ok,
        });
    }
    let mp = max_k.min(GEN_COEFF_MAX_M);
    if mp >= 1 {
        let mut ok = true;
        for m in 1..=mp {
            for r in (1..=m).filter(|r| (m - r) % 2 == 0) {
                ok &= parity_identity_check(m, r)?;
                ok &= gen_coeff(m, r)? > 0;
            }
        }
        checks.push(IdentityCheck {
            name: format!("f(m, r) m / r = C(m, (m + r)/2) for 1 <= r <= m <= {mp}"),
            passed: ok,
        });
    }
    let kb = (max_k as usize).min(BINOMIAL_MATRIX_MAX_K);
    if kb >= 1 {
        // verified against D B = I and the Chebyshev coefficients internally
        let ok = inverse_binomial_matrix(kb).is_ok();
        checks.push(IdentityCheck {
            name: format!("binomial inverse equals odd Chebyshev coefficients for k = {kb}"),
            passed: ok,
        });
    }
    let mt = max_k.min(TRIG_CHECK_MAX_M);
    if mt >= 1 {
        let mut worst: f64 = 0.0;
        for m in 1..=mt {
            let p = chebyshev_coeffs(m)?;
            for s in 0..=200 {
                let t = std::f64::consts::PI * s as f64 / 200.0;
                worst = worst.max((p.eval(2.0 * t.cos()) - 2.0 * (m as f64 * t).cos()).abs());
            }
        }
        checks.push(IdentityCheck {
            name: format!("|P_m(2 cos t) - 2 cos(m t)| <= 1e-9 for m <= {mt} (max {worst:.2e})"),
            passed: worst <= 1e-9,
        });
    }
    let order = (max_k as usize).min(WICK_DEFAULT_MAX_ORDER);
    if order >= 2 {
        let mut ok = true;
        let mut double_factorial = 1.0;
        for p in (2..=order).step_by(2) {
            double_factorial *= (p - 1) as f64;
            let m = wick_moment(&CovMatrix::identity(1), &vec![0; p])?;
            ok &= m == double_factorial;
        }
        checks.push(IdentityCheck {
            name: format!("E Z^p = (p - 1)!! by pairings for even p <= {order}"),
            passed: ok,
        });
    }
    Ok(checks)
}

fn run_identities(max_k: u32, out: Option<&Path>) -> Result<i32> {
    let checks = identity_checks(max_k)?;
    let mut text = String::new();
    for c in &checks {
        text.push_str(&format!("{} {}\n", if c.passed { "PASS" } else { "FAIL" }, c.name));
    }
    emit(out, &text)?;
    Ok(if checks.iter().all(|c| c.passed) {
        EXIT_OK
    } else {
        EXIT_VERDICT_FAILED
    })
}

fn run_sample(args: &SampleArgs) -> Result<i32> {
    let seed = SeedSpec::new(args.seed, args.stream);
    let a = match args.tilted_beta {
        Some(beta) => {
            let sigma: SigmaChoice = args.sigma.parse()?;
            let mut a = sample_tilted_matrix(args.n, &sigma.build(args.n), beta, seed)?;
            if args.hollow {
                a = a.hollowed();
            }
            a
        }
        None => sample_gaussian_matrix(args.n, seed, args.hollow)?,
    };
    emit(args.out.as_deref(), &a.to_text())?;
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct FreeEnergyOutput {
    n: usize,
    beta: f64,
    #[serde(rename = "J")]
    j: f64,
    #[serde(rename = "Jprime")]
    j_prime: f64,
    log_partition: f64,
    free_energy: f64,
    /// `n (F_n - beta^2)`
    fluctuation: f64,
    f1: Option<f64>,
    alpha1: Option<f64>,
}

fn run_free_energy(args: &FreeEnergyArgs) -> Result<i32> {
    let a = match (&args.matrix, args.n) {
        (Some(path), _) => SymMatrix::load(path)?,
        (None, Some(n)) => sample_gaussian_matrix(n, SeedSpec::new(args.seed, args.stream), false)?,
        (None, None) => return Err(Error::Parse("free-energy needs --matrix or --n".into())),
    };
    if let (Some(_), Some(n)) = (&args.matrix, args.n) {
        if n != a.n() {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: a.n(),
            });
        }
    }
    let params = ModelParams::new(args.beta, args.j, args.j_prime, a.n())?;
    let log_z = exact_log_partition(&a, &params)?;
    let n = a.n() as f64;
    let targets = clt_targets(&params).ok();
    let out = FreeEnergyOutput {
        n: a.n(),
        beta: params.beta,
        j: params.j,
        j_prime: params.j_prime,
        log_partition: log_z,
        free_energy: log_z / n,
        fluctuation: log_z - n * params.beta * params.beta,
        f1: targets.map(|t| t.f1),
        alpha1: targets.map(|t| t.alpha1),
    };
    let text = serde_json::to_string_pretty(&out).map_err(|e| Error::Parse(e.to_string()))?;
    emit(args.out.as_deref(), &text)?;
    Ok(EXIT_OK)
}

fn run_report(input: &Path, out: Option<&Path>, format: Format) -> Result<i32> {
    let text = std::fs::read_to_string(input)?;
    let report = ExperimentReport::from_json(&text)?;
    write_report(&report, format, out)
}

fn dispatch(cli: Cli) -> Result<i32> {
    match &cli.command {
        Command::Identities { max_k, out } => run_identities(*max_k, out.as_deref()),
        Command::Sample(a) => run_sample(a),
        Command::FreeEnergy(a) => run_free_energy(a),
        Command::Cycles(a) => run_experiment(ExperimentKind::Cycles, a),
        Command::Clt(a) => run_experiment(ExperimentKind::Clt, a),
        Command::Tilted(a) => run_experiment(ExperimentKind::Tilted, a),
        Command::Approx(a) => run_experiment(ExperimentKind::Approx, a),
        Command::Decomposition(a) => run_experiment(ExperimentKind::Decomposition, a),
        Command::Report { input, out, format } => run_report(input, out.as_deref(), *format),
    }
}

/// Parses `argv` (including the program name), runs the command and returns
/// the process exit code. Help and version requests exit 0.
pub fn parse_and_dispatch<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
        }
    };
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_ERROR
        }
    }
}
