//! Command-line front end: `verify`, `spectrum`, `probe` and `sweep`.
//!
//! Exit codes: 0 success, 1 failed check or runtime error, 2 usage error,
//! 3 eigensolver non-convergence, 4 violated probe inequality.

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::Serialize;

use crate::error::{FockError, Result};
use crate::linalg::{eig_low_with, LanczosOptions, LinearMap, SolverMethod};
use crate::verify::{self, SuiteReport, VerifyOptions};
use crate::weyl_probe::{fmt_f64, WindowSelection, CHAIN_TOL, CSV_HEADER};
use crate::yukawa::hvz::{hvz_gap_probe, kappa_sweep, DEGENERACY_TOL};
use crate::yukawa::{build_hamiltonian, YukawaConfig, YukawaModel};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NONCONVERGENCE: i32 = 3;
pub const EXIT_VIOLATION: i32 = 4;

/// Dimension up to which `spectrum` cross-checks the dense and iterative solvers.
pub const AGREEMENT_DIM: usize = 4096;

#[derive(Debug, Parser)]
#[command(name = "fockbench", version, about = "Fock-space spectra, identities and Weyl probes")]
pub struct Cli {
    /// Model file (TOML). Repeat to give refinement levels one file each.
    #[arg(long, global = true)]
    pub config: Vec<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Worker threads.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Output directory.
    #[arg(long, global = true, default_value = "fockbench-out")]
    pub out: PathBuf,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run identity and bound suites.
    Verify {
        /// Suite names (comma separated or repeated), or `all`.
        #[arg(long, value_delimiter = ',', required = true)]
        suite: Vec<String>,
        /// Fermion mode range, e.g. `2..6`.
        #[arg(long)]
        dims: Option<String>,
    },
    /// Lowest eigenvalues, ground energy and gap per level.
    Spectrum {
        /// Number of eigenvalues per level.
        #[arg(long)]
        k: Option<usize>,
    },
    /// Weyl probes at the bottom of the essential spectrum across levels.
    Probe {
        #[arg(long, value_delimiter = ',')]
        lambda: Vec<f64>,
        #[arg(long, value_delimiter = ',')]
        eps: Vec<f64>,
        #[arg(long, value_delimiter = ',')]
        widths: Vec<f64>,
        /// Use a seeded random window vector instead of the ground state.
        #[arg(long)]
        seeded: bool,
    },
    /// Ground energy and gap over a list of couplings.
    Sweep {
        #[arg(long, value_delimiter = ',')]
        kappa: Vec<f64>,
    },
}

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub config_paths: Vec<String>,
    pub seed: u64,
    pub tool_version: String,
    pub started: String,
    pub finished: String,
    pub outputs: Vec<String>,
}

pub const MANIFEST_FILE: &str = "manifest.json";

/// `SOURCE_DATE_EPOCH` pins timestamps for fully reproducible manifests.
fn timestamp() -> String {
    if let Some(secs) = std::env::var("SOURCE_DATE_EPOCH").ok().and_then(|s| s.parse::<i64>().ok()) {
        if let Some(t) = chrono::DateTime::from_timestamp(secs, 0) {
            return t.to_rfc3339();
        }
    }
    chrono::Utc::now().to_rfc3339()
}

struct Run {
    out: PathBuf,
    manifest: RunManifest,
}

impl Run {
    fn new(cli: &Cli, command: &str, seed: u64) -> Result<Self> {
        std::fs::create_dir_all(&cli.out)?;
        Ok(Self {
            out: cli.out.clone(),
            manifest: RunManifest {
                command: command.to_string(),
                config_paths: cli.config.iter().map(|p| p.display().to_string()).collect(),
                seed,
                tool_version: env!("CARGO_PKG_VERSION").to_string(),
                started: timestamp(),
                finished: String::new(),
                outputs: Vec::new(),
            },
        })
    }

    fn write(&mut self, name: &str, contents: &str) -> Result<()> {
        std::fs::write(self.out.join(name), contents)?;
        self.manifest.outputs.push(name.to_string());
        Ok(())
    }

    fn write_json<T: Serialize>(&mut self, name: &str, report: &T) -> Result<()> {
        #[derive(Serialize)]
        struct Wrapped<'a, T> {
            manifest: &'a str,
            report: &'a T,
        }
        let text = serde_json::to_string_pretty(&Wrapped {
            manifest: MANIFEST_FILE,
            report,
        })?;
        self.write(name, &(text + "\n"))
    }

    fn finish(mut self) -> Result<()> {
        self.manifest.finished = timestamp();
        let text = serde_json::to_string_pretty(&self.manifest)?;
        std::fs::write(self.out.join(MANIFEST_FILE), text + "\n")?;
        Ok(())
    }
}

/// Parses arguments and runs; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(&cli),
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            code
        }
    }
}

pub fn run(cli: &Cli) -> i32 {
    let body = || match &cli.command {
        Command::Verify { suite, dims } => cmd_verify(cli, suite, dims.as_deref()),
        Command::Spectrum { k } => cmd_spectrum(cli, *k),
        Command::Probe {
            lambda,
            eps,
            widths,
            seeded,
        } => cmd_probe(cli, lambda, eps, widths, *seeded),
        Command::Sweep { kappa } => cmd_sweep(cli, kappa),
    };
    let result = match cli.jobs {
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build() {
            Ok(pool) => pool.install(body),
            Err(e) => Err(FockError::InvalidArgument(e.to_string())),
        },
        None => body(),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                FockError::Config(_) | FockError::InvalidArgument(_) | FockError::NotNested(_) => EXIT_USAGE,
                FockError::NonConvergence { .. } => EXIT_NONCONVERGENCE,
                _ => EXIT_FAILED,
            }
        }
    }
}

fn load_configs(paths: &[PathBuf]) -> Result<Vec<YukawaConfig>> {
    paths
        .iter()
        .map(|p| {
            YukawaConfig::from_file(p).map_err(|e| match e {
                FockError::Io(io) => FockError::Config(format!("{}: {io}", p.display())),
                FockError::Config(m) => FockError::Config(format!("{}: {m}", p.display())),
                other => other,
            })
        })
        .collect()
}

/// One file: its `[[level]]` tables (or itself). Several files: one level each.
fn load_levels(cli: &Cli) -> Result<Vec<(String, YukawaConfig)>> {
    if cli.config.is_empty() {
        return Err(FockError::Config("this command needs --config".into()));
    }
    let configs = load_configs(&cli.config)?;
    let mut levels = if configs.len() == 1 {
        configs[0].level_configs()
    } else {
        cli.config
            .iter()
            .zip(configs)
            .map(|(p, c)| {
                let label = p
                    .file_stem()
                    .map(|s| s.to_string_lossy().into_owned())
                    .unwrap_or_default();
                (label, c)
            })
            .collect()
    };
    for (_, c) in levels.iter_mut() {
        if let Some(seed) = cli.seed {
            c.seed = seed;
        }
        if let Some(tol) = cli.tol {
            c.solver.tol = tol;
        }
        c.levels.clear();
    }
    Ok(levels)
}

#[derive(Serialize)]
struct VerifyOutput {
    passed: bool,
    suites: Vec<SuiteReport>,
}

pub fn cmd_verify(cli: &Cli, suites: &[String], dims: Option<&str>) -> Result<i32> {
    let mut names: Vec<String> = Vec::new();
    for s in suites {
        if s == "all" {
            names.extend(verify::SUITES.iter().map(|s| s.to_string()));
        } else if verify::is_known_suite(s) {
            names.push(s.clone());
        } else {
            eprintln!(
                "error: unknown suite {s:?}; known suites: {}",
                verify::SUITES.join(", ")
            );
            return Ok(EXIT_USAGE);
        }
    }
    let mut opts = VerifyOptions::default();
    if let Some(d) = dims {
        opts.dims = verify::parse_dims(d)?;
    }
    if let Some(seed) = cli.seed {
        opts.seed = seed;
    }
    opts.tol = cli.tol;
    if let Some(path) = cli.config.first() {
        opts.model = load_configs(std::slice::from_ref(path))?.remove(0);
    }
    let mut run = Run::new(cli, "verify", opts.seed)?;
    let reports: Vec<SuiteReport> = names
        .iter()
        .map(|n| verify::run_suite(n, &opts))
        .collect::<Result<_>>()?;
    for r in &reports {
        let worst = r.checks.iter().map(|c| c.value).fold(0.0, f64::max);
        println!(
            "{:<20} {}  ({} checks, max defect {:.3e})",
            r.suite,
            if r.passed { "PASS" } else { "FAIL" },
            r.checks.len(),
            worst
        );
        for c in r.checks.iter().filter(|c| !c.passed) {
            println!("    {} = {:.3e} > {:.1e}", c.name, c.value, c.tol);
        }
    }
    let passed = reports.iter().all(|r| r.passed);
    run.write_json(
        "verify.json",
        &VerifyOutput {
            passed,
            suites: reports,
        },
    )?;
    run.finish()?;
    Ok(if passed { EXIT_OK } else { EXIT_FAILED })
}

#[derive(Debug, Serialize)]
struct SolverAgreement {
    max_abs_diff: f64,
    agree: bool,
}

#[derive(Debug, Serialize)]
struct SpectrumLevel {
    label: String,
    dim: usize,
    kappa: f64,
    e0: f64,
    gap: Option<f64>,
    nu: f64,
    gap_over_nu: Option<f64>,
    method: SolverMethod,
    max_residual: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    dense_iterative: Option<SolverAgreement>,
}

#[derive(Debug, Serialize)]
struct SpectrumFailure {
    label: String,
    iterations: usize,
    achieved: f64,
    target: f64,
}

pub fn cmd_spectrum(cli: &Cli, k: Option<usize>) -> Result<i32> {
    let levels = load_levels(cli)?;
    let seed = levels[0].1.seed;
    let mut run = Run::new(cli, "spectrum", seed)?;
    let mut csv = String::from("level,index,eigenvalue\n");
    let mut summary = Vec::new();
    for (label, cfg) in &levels {
        let model = YukawaModel::new(cfg)?;
        let sys = build_hamiltonian(&model)?;
        let count = k.unwrap_or(cfg.solver.eigs).max(2).min(sys.dim());
        let spec = match sys.low_spectrum(count, cfg.solver.tol) {
            Ok(s) => s,
            Err(FockError::NonConvergence {
                iterations,
                achieved,
                target,
            }) => {
                let failure = SpectrumFailure {
                    label: label.clone(),
                    iterations,
                    achieved,
                    target,
                };
                eprintln!("level {label}: eigensolver stopped at residual {achieved:.3e} (target {target:.1e})");
                run.write_json("spectrum.json", &failure)?;
                run.finish()?;
                return Ok(EXIT_NONCONVERGENCE);
            }
            Err(e) => return Err(e),
        };
        for (i, e) in spec.eigenvalues.iter().enumerate() {
            csv.push_str(&format!("{label},{i},{}\n", fmt_f64(*e)));
        }
        let dense_iterative = if sys.dim() <= AGREEMENT_DIM {
            let opts = LanczosOptions {
                seed: cfg.seed,
                ..LanczosOptions::default()
            };
            let dense = crate::linalg::eigenvalues_dense(&sys.hamiltonian()?)?;
            let iter = eig_low_with(&sys, count, cfg.solver.tol, &opts)?;
            let diff = iter
                .eigenvalues
                .iter()
                .zip(&dense)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            Some(SolverAgreement {
                max_abs_diff: diff,
                agree: diff <= 1e-8 * (1.0 + dense.last().map(|v| v.abs()).unwrap_or(0.0)),
            })
        } else {
            None
        };
        let nu = cfg.nu();
        let gap = spec.gap(DEGENERACY_TOL);
        println!(
            "{label}: dim {} E0 {:.12} gap {} ν {nu}",
            sys.dim(),
            spec.ground_energy(),
            gap.map(|g| format!("{g:.12}")).unwrap_or_else(|| "n/a".into())
        );
        summary.push(SpectrumLevel {
            label: label.clone(),
            dim: sys.dim(),
            kappa: cfg.kappa,
            e0: spec.ground_energy(),
            gap,
            nu,
            gap_over_nu: gap.map(|g| g / nu),
            method: spec.method,
            max_residual: spec.max_residual,
            dense_iterative,
        });
    }
    run.write("spectrum.csv", &csv)?;
    run.write_json("spectrum.json", &summary)?;
    run.finish()?;
    Ok(EXIT_OK)
}

pub fn cmd_probe(cli: &Cli, lambdas: &[f64], eps: &[f64], widths: &[f64], seeded: bool) -> Result<i32> {
    let mut levels = load_levels(cli)?;
    for (_, c) in levels.iter_mut() {
        if !eps.is_empty() {
            c.probe.eps = eps.to_vec();
        }
        if !widths.is_empty() {
            c.probe.widths = widths.to_vec();
        }
        c.validate()?;
    }
    let seed = levels[0].1.seed;
    let lambdas = if lambdas.is_empty() {
        levels[0].1.lambdas()
    } else {
        lambdas.to_vec()
    };
    let selection = if seeded {
        WindowSelection::Seeded(seed)
    } else {
        WindowSelection::Ground
    };
    let mut run = Run::new(cli, "probe", seed)?;
    let outcome = hvz_gap_probe(&levels, &lambdas, selection)?;
    let mut csv = format!("level,branch,{CSV_HEADER}\n");
    let mut plot = String::from("level,lambda,n,eps,residual\n");
    let mut violations = 0;
    let mut warnings = Vec::new();
    for reports in &outcome.probes {
        for (li, rep) in reports.iter().enumerate() {
            let label = &levels[li].0;
            let branch = match rep.branch {
                crate::weyl_probe::ProbeBranch::Fermion => "fermion",
                crate::weyl_probe::ProbeBranch::Boson => "boson",
            };
            for row in &rep.rows {
                csv.push_str(&format!("{label},{branch},{}\n", row.csv_fields()));
                plot.push_str(&format!(
                    "{li},{},{},{},{}\n",
                    fmt_f64(row.lambda),
                    row.n,
                    fmt_f64(row.eps),
                    fmt_f64(row.residual)
                ));
            }
            violations += rep.violations(CHAIN_TOL);
            warnings.extend(rep.warnings.iter().map(|w| format!("{label} λ={}: {w}", rep.lambda)));
        }
    }
    for t in &outcome.report.tables {
        println!("λ = {} ({:?})", t.lambda, t.branch);
        for r in &t.rows {
            println!(
                "  {:<6} dim {:>6}  min residual {:.6e}  (n {}, ε {})",
                r.label, r.dim, r.min_normalized_residual, r.argmin_n, r.argmin_eps
            );
        }
    }
    #[derive(Serialize)]
    struct ProbeOutput<'a> {
        gap: &'a crate::yukawa::hvz::GapReport,
        violations: usize,
        warnings: Vec<String>,
    }
    run.write("probe.csv", &csv)?;
    run.write("plot.csv", &plot)?;
    run.write_json(
        "probe.json",
        &ProbeOutput {
            gap: &outcome.report,
            violations,
            warnings,
        },
    )?;
    run.finish()?;
    if violations > 0 {
        eprintln!("{violations} probe rows violate the inequality chain");
        return Ok(EXIT_VIOLATION);
    }
    Ok(if outcome.report.passed() { EXIT_OK } else { EXIT_FAILED })
}

pub fn cmd_sweep(cli: &Cli, kappas: &[f64]) -> Result<i32> {
    let levels = load_levels(cli)?;
    let (_, cfg) = levels.last().expect("at least one level");
    let kappas = if kappas.is_empty() {
        cfg.sweep
            .as_ref()
            .map(|s| s.kappas.clone())
            .ok_or_else(|| FockError::Config("no --kappa list and no [sweep] table".into()))?
    } else {
        kappas.to_vec()
    };
    let mut run = Run::new(cli, "sweep", cfg.seed)?;
    let report = kappa_sweep(cfg, &kappas)?;
    for r in &report.rows {
        println!("κ = {:<8} E0 = {:.12}", r.kappa, r.e0);
    }
    run.write("sweep.csv", &report.to_csv())?;
    run.write_json("sweep.json", &report)?;
    run.finish()?;
    Ok(if report.continuous { EXIT_OK } else { EXIT_FAILED })
}

/// Reads every output listed in a manifest, for determinism checks.
pub fn read_outputs(dir: &Path) -> Result<Vec<(String, Vec<u8>)>> {
    let text = std::fs::read_to_string(dir.join(MANIFEST_FILE))?;
    let v: serde_json::Value = serde_json::from_str(&text)?;
    let names = v["outputs"]
        .as_array()
        .ok_or_else(|| FockError::InvalidArgument("manifest lacks outputs".into()))?;
    names
        .iter()
        .map(|n| {
            let n = n.as_str().unwrap_or_default().to_string();
            let bytes = std::fs::read(dir.join(&n))?;
            Ok((n, bytes))
        })
        .collect()
}
