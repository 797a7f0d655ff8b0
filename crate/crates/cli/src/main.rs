//! `hartogs`: runs the certificate pipelines and writes their reports.
//!
//! Exit codes: 0 when every checked step passes, 1 when a check fails, 2 on configuration,
//! resource or I/O errors.

use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hartogs_core::bundle::Scale;
use hartogs_core::scenarios::{
    cohomology_torus, emit_report, hessian_scan, run_dim2, run_dimn, selftest, CertificateReport, ReportFormat,
    ScenarioConfig,
};
use hartogs_core::Error;

const OUT_DIR_ENV: &str = "HARTOGS_OUT_DIR";

#[derive(Parser)]
#[command(name = "hartogs", version, about = "Certificates for line bundles that fail to extend across compact sets")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// The two-dimensional example on D_r \ K.
    Dim2(Common),
    /// The n-dimensional counterexample on Ω \ K.
    Dimn(Common),
    /// Cohomology ranks of the torus-core cover against binom(n, k).
    CohomologyTorus(TorusArgs),
    /// Sign sweep of the Hessian block determinant over |z| ∈ (0.5, 3).
    HessianScan(HessianArgs),
    /// Fast internal consistency checks.
    Selftest(Common),
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
}

impl From<Format> for ReportFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Json => ReportFormat::Json,
            Format::Text => ReportFormat::Text,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum DebugScale {
    Half,
    Full,
}

#[derive(Args)]
struct Output {
    /// Report path. Defaults to `$HARTOGS_OUT_DIR/<scenario>.<ext>` when that variable is
    /// set, and to standard output otherwise.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Report format (default: json for files, text for standard output).
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Args)]
struct Common {
    #[arg(long, default_value_t = 2)]
    n: usize,
    /// Defaults to n / 2.
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long, default_value_t = 4.0)]
    r: f64,
    /// Lattice step (connectivity scan; grid cross-check in dim2).
    #[arg(long)]
    step: Option<f64>,
    /// Thickening of the level set; defaults to the step.
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long, default_value_t = 1000)]
    samples: usize,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    #[arg(long, default_value_t = 0.5)]
    safety: f64,
    #[arg(long, default_value_t = 1e-9)]
    tol_cocycle: f64,
    #[arg(long, default_value_t = 1e-6)]
    tol_chern: f64,
    #[arg(long, default_value_t = 1e-5)]
    tol_fd: f64,
    #[arg(long, default_value_t = hartogs_core::geometry::DEFAULT_NODE_BUDGET)]
    budget_nodes: usize,
    /// Replace the cocycle c of dim2 (comma-separated values per overlap component).
    #[arg(long, hide = true, value_delimiter = ',', allow_hyphen_values = true)]
    debug_cocycle: Option<Vec<i64>>,
    /// Replace the exponential scale of dim2.
    #[arg(long, hide = true, value_enum)]
    debug_scale: Option<DebugScale>,
    #[command(flatten)]
    output: Output,
}

impl Common {
    fn config(&self) -> ScenarioConfig {
        let mut cfg = ScenarioConfig {
            n: self.n,
            epsilon: self.epsilon,
            r: self.r,
            step: self.step,
            delta: self.delta,
            samples: self.samples,
            tol_cocycle: self.tol_cocycle,
            tol_chern: self.tol_chern,
            tol_fd: self.tol_fd,
            seed: self.seed,
            safety: self.safety,
            budget_nodes: self.budget_nodes,
            ..Default::default()
        };
        cfg.debug.cocycle = self.debug_cocycle.clone();
        cfg.debug.scale = self.debug_scale.map(|s| match s {
            DebugScale::Half => Scale::Half,
            DebugScale::Full => Scale::Full,
        });
        cfg
    }
}

#[derive(Args)]
struct TorusArgs {
    #[arg(long, default_value_t = 2)]
    n: usize,
    /// Defaults to n / 2.
    #[arg(long)]
    epsilon: Option<f64>,
    /// Highest simplex dimension of the nerve; ranks are reported for k < kmax. Defaults to n + 1.
    #[arg(long)]
    kmax: Option<usize>,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct HessianArgs {
    /// Number of moduli in the sweep.
    #[arg(long, default_value_t = 1000)]
    samples: usize,
    /// CSV of the sweep. Without it, only the summary is printed.
    #[arg(long)]
    out: Option<PathBuf>,
}

enum Destination {
    Stdout,
    File(PathBuf),
}

fn destination(o: &Output, stem: &str) -> (Destination, ReportFormat) {
    let explicit = o.format.map(ReportFormat::from);
    let ext = |f: ReportFormat| match f {
        ReportFormat::Json => "json",
        ReportFormat::Text => "txt",
    };
    if let Some(p) = &o.out {
        return (Destination::File(p.clone()), explicit.unwrap_or(ReportFormat::Json));
    }
    match std::env::var_os(OUT_DIR_ENV) {
        Some(dir) if !dir.is_empty() => {
            let f = explicit.unwrap_or(ReportFormat::Json);
            (Destination::File(Path::new(&dir).join(format!("{stem}.{}", ext(f)))), f)
        }
        _ => (Destination::Stdout, explicit.unwrap_or(ReportFormat::Text)),
    }
}

fn write_report(rep: &CertificateReport, o: &Output) -> Result<(), Error> {
    let (dest, format) = destination(o, &rep.scenario);
    match dest {
        Destination::Stdout => print!("{}", format.render(rep)?),
        Destination::File(p) => {
            emit_report(rep, &p, format)?;
            eprintln!("report written to {}", p.display());
        }
    }
    Ok(())
}

fn verdict(passed: bool, what: &str) -> ExitCode {
    eprintln!("{what}: {}", if passed { "PASS" } else { "FAIL" });
    if passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn scenario(args: &Common, run: fn(&ScenarioConfig) -> hartogs_core::Result<CertificateReport>) -> Result<ExitCode, Error> {
    let rep = run(&args.config())?;
    write_report(&rep, &args.output)?;
    Ok(verdict(rep.passed(), &rep.scenario))
}

fn torus(args: &TorusArgs) -> Result<ExitCode, Error> {
    let eps = args.epsilon.unwrap_or(args.n as f64 / 2.0);
    let table = cohomology_torus(args.n, eps, args.kmax.unwrap_or(args.n + 1), args.seed)?;
    let (dest, format) = destination(&args.output, "cohomology-torus");
    let body = match format {
        ReportFormat::Json => serde_json::to_string_pretty(&table).map_err(Error::from)? + "\n",
        ReportFormat::Text => table.to_text(),
    };
    match dest {
        Destination::Stdout => print!("{body}"),
        Destination::File(p) => std::fs::write(&p, body)?,
    }
    Ok(verdict(table.passed, "cohomology-torus"))
}

fn hessian(args: &HessianArgs) -> Result<ExitCode, Error> {
    let scan = hessian_scan(args.samples, 0.5, 3.0)?;
    if let Some(p) = &args.out {
        scan.write_csv(BufWriter::new(File::create(p)?))?;
        eprintln!("sweep written to {}", p.display());
    }
    println!(
        "{} moduli in (0.5, 3): {} positive definite, {} mismatches against the window (1, e)",
        scan.rows.len(),
        scan.rows.iter().filter(|r| r.positive_definite).count(),
        scan.mismatches
    );
    Ok(verdict(scan.mismatches == 0, "hessian-scan"))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Dim2(a) => scenario(a, run_dim2),
        Command::Dimn(a) => scenario(a, run_dimn),
        Command::Selftest(a) => scenario(a, selftest),
        Command::CohomologyTorus(a) => torus(a),
        Command::HessianScan(a) => hessian(a),
    };
    outcome.unwrap_or_else(|e| {
        eprintln!("error: {e}");
        ExitCode::from(2)
    })
}
