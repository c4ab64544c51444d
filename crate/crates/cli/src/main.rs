//! `sto3c`: evaluate three-center integrals, reproduce the reference
//! tables and run the validation grids.

mod compute;
mod record;
mod tables;
mod validate;

use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use compute::{BackendChoice, CenterChoice, ConformationChoice, Kind, Settings};
use record::{write_records, Echo, Format, RunRecord};
use sto3c::{Error, PrecisionContext};

#[derive(Parser)]
#[command(name = "sto3c", version, about = "Three-center integrals over s-type Slater orbitals")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate integrals, one row per parameter set.
    Compute(ComputeArgs),
    /// Partial sums of the overlap series over a range of N.
    Scan(ScanArgs),
    /// Reproduce a reference table and compare magnitudes digit by digit.
    Tables(TablesArgs),
    /// Run the oracle-equivalence grids.
    Validate(ValidateArgs),
}

#[derive(Args)]
struct Truncation {
    /// Working decimal digits (at least 20).
    #[arg(long, default_value_t = 40)]
    digits: u32,
    /// Fixed truncation order.
    #[arg(long = "N", conflicts_with = "tol")]
    fixed_n: Option<u32>,
    /// Relative increment below which the series stops [default: 10^-digits].
    #[arg(long)]
    tol: Option<f64>,
    /// Cap on the truncation order for --tol.
    #[arg(long = "N-max", default_value_t = 200)]
    n_max: u32,
    /// Quadrature tolerance 10^-q [default: digits - 5].
    #[arg(long = "quad-digits")]
    quad_digits: Option<u32>,
}

#[derive(Args)]
struct Output {
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Write to this file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ComputeArgs {
    #[arg(value_enum)]
    kind: Kind,
    /// Quantum numbers `n_a,n_b,n_c`; for nucattr the two orbitals only.
    /// Repeat for several sets.
    #[arg(long, required = true, allow_hyphen_values = true)]
    n: Vec<String>,
    /// Exponents, laid out like --n. Repeat for several sets.
    #[arg(long, required = true, allow_hyphen_values = true)]
    zeta: Vec<String>,
    /// b-c separation. Repeat for several sets.
    #[arg(long = "R", required = true, allow_hyphen_values = true)]
    r: Vec<String>,
    /// Center carrying the distribution (eri) or the 1/r weight (nucattr).
    #[arg(long, value_enum)]
    center: Option<CenterChoice>,
    #[arg(long, value_enum, default_value_t = BackendChoice::Analytic)]
    backend: BackendChoice,
    #[arg(long, value_enum, default_value_t = ConformationChoice::Linear)]
    conformation: ConformationChoice,
    #[command(flatten)]
    truncation: Truncation,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct ScanArgs {
    #[arg(long, required = true)]
    n: String,
    #[arg(long, required = true)]
    zeta: String,
    #[arg(long = "R", required = true)]
    r: String,
    #[arg(long, default_value_t = 1)]
    from: u32,
    #[arg(long, default_value_t = 40)]
    to: u32,
    #[arg(long, default_value_t = 40)]
    digits: u32,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct TablesArgs {
    #[arg(value_enum)]
    which: tables::Which,
    #[arg(long, default_value_t = 40)]
    digits: u32,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct ValidateArgs {
    #[arg(value_enum)]
    suite: validate::Suite,
    /// Working digits for every suite [default: 30 for aux and overlap, 20 for eri].
    #[arg(long)]
    digits: Option<u32>,
    #[arg(long, value_enum, default_value_t = validate::Grid::Default)]
    grid: validate::Grid,
    /// Write the report to this file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Why a command did not succeed, mapped to its exit code.
#[derive(Debug, Clone, PartialEq)]
pub enum Failure {
    /// Flags fail parsing or the library's preconditions.
    Usage(String),
    /// Analytic path cannot represent the input.
    NotRepresentable(String),
    /// A check, fixture or convergence requirement failed.
    Failed(String),
}

impl Failure {
    pub fn usage(e: Error) -> Self {
        Self::Usage(e.to_string())
    }

    pub fn from_core(e: Error) -> Self {
        match e {
            Error::NotRepresentable { .. } => Self::NotRepresentable(format!("{e} (rerun with --backend quadrature)")),
            Error::Domain(_) | Error::Precision(_) => Self::Usage(e.to_string()),
            Error::FormulaFault { .. } => Self::Failed(e.to_string()),
        }
    }

    fn code(&self) -> u8 {
        match self {
            Self::Failed(_) => 1,
            Self::Usage(_) => 2,
            Self::NotRepresentable(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Self::Usage(m) | Self::NotRepresentable(m) | Self::Failed(m) => m,
        }
    }
}

fn sink(path: &Option<PathBuf>) -> Result<Box<dyn Write>, Failure> {
    match path {
        Some(p) => File::create(p)
            .map(|f| Box::new(f) as Box<dyn Write>)
            .map_err(|e| Failure::Usage(format!("cannot write {}: {e}", p.display()))),
        None => Ok(Box::new(io::stdout().lock())),
    }
}

fn emit(rows: &[RunRecord], output: &Output) -> Result<(), Failure> {
    let mut w = sink(&output.out)?;
    write_records(rows, output.format, &mut w).map_err(|e| Failure::Failed(format!("write failed: {e}")))
}

fn cmd_compute(a: ComputeArgs) -> Result<(), Failure> {
    let t = &a.truncation;
    let settings = Settings::new(t.digits, t.fixed_n, t.tol, t.n_max, t.quad_digits)?;
    let jobs = compute::jobs(a.kind, a.center, a.conformation, a.backend, &a.n, &a.zeta, &a.r)?;
    let mut rows = Vec::new();
    let mut worst: Option<Failure> = None;
    for (i, res) in compute::run(&jobs, &settings).into_iter().enumerate() {
        match res {
            Ok(r) => rows.extend(r),
            Err(f) => {
                if jobs.len() > 1 {
                    eprintln!("set {}: {}", i + 1, f.message());
                }
                // Usage beats not-representable beats plain failure.
                let rank = |f: &Failure| match f {
                    Failure::Usage(_) => 2,
                    Failure::NotRepresentable(_) => 1,
                    Failure::Failed(_) => 0,
                };
                if worst.as_ref().is_none_or(|w| rank(&f) > rank(w)) {
                    worst = Some(f);
                }
            }
        }
    }
    emit(&rows, &a.output)?;
    if let Some(f) = worst {
        return Err(f);
    }
    let stalled = rows.iter().filter(|r| !r.converged).count();
    if stalled > 0 {
        return Err(Failure::Failed(format!("{stalled} row(s) did not converge")));
    }
    Ok(())
}

fn cmd_scan(a: ScanArgs) -> Result<(), Failure> {
    let ctx = PrecisionContext::new(a.digits).map_err(Failure::usage)?;
    if a.from > a.to {
        return Err(Failure::Usage("--from exceeds --to".into()));
    }
    let jobs = compute::jobs(
        Kind::Overlap,
        None,
        ConformationChoice::Linear,
        BackendChoice::Analytic,
        &[a.n],
        &[a.zeta],
        &[a.r],
    )?;
    let echo: &Echo = &jobs[0].echo;
    let rows: Vec<RunRecord> = compute::scan(echo, a.from, a.to, &ctx)?.into_iter().map(|r| r.0).collect();
    emit(&rows, &a.output)
}

fn cmd_tables(a: TablesArgs) -> Result<(), Failure> {
    let ctx = PrecisionContext::new(a.digits).map_err(Failure::usage)?;
    let (rows, cmp) = tables::run(a.which, &ctx)?;
    emit(&rows, &a.output)?;
    let hits = cmp.iter().filter(|c| c.matches).count();
    for c in &cmp {
        let tag = if c.matches { "match" } else { "MISMATCH" };
        eprintln!("{tag:8} {}: published {} computed {}", c.label, c.published, c.computed);
    }
    eprintln!("{hits}/{} rows match the published magnitudes", cmp.len());
    if hits == cmp.len() {
        Ok(())
    } else {
        Err(Failure::Failed(format!("{} row(s) differ from the published values", cmp.len() - hits)))
    }
}

fn cmd_validate(a: ValidateArgs) -> Result<(), Failure> {
    use validate::{Suite, AUX_DIGITS, ERI_DIGITS, OVERLAP_DIGITS};
    let ctx = |default: u32| PrecisionContext::new(a.digits.unwrap_or(default)).map_err(Failure::usage);
    let core = |r: Result<Vec<validate::Check>, Error>| r.map_err(Failure::from_core);
    let mut checks = Vec::new();
    if matches!(a.suite, Suite::Aux | Suite::All) {
        checks.extend(core(validate::aux(&ctx(AUX_DIGITS)?))?);
    }
    if matches!(a.suite, Suite::Overlap | Suite::All) {
        checks.extend(core(validate::overlap(&ctx(OVERLAP_DIGITS)?, a.grid))?);
    }
    if matches!(a.suite, Suite::Eri | Suite::All) {
        checks.extend(core(validate::eri(&ctx(ERI_DIGITS)?))?);
    }
    let mut w = sink(&a.out)?;
    let io = |e: io::Error| Failure::Failed(format!("write failed: {e}"));
    for c in &checks {
        let tag = if c.passed() { "PASS" } else { "FAIL" };
        writeln!(
            w,
            "{tag} {}: max deviation {:.2e} over {} points (tolerance {:.0e})",
            c.name, c.max_dev, c.points, c.tol
        )
        .map_err(io)?;
    }
    let failed = checks.iter().filter(|c| !c.passed()).count();
    writeln!(w, "{}/{} checks passed", checks.len() - failed, checks.len()).map_err(io)?;
    if failed > 0 {
        return Err(Failure::Failed(format!("{failed} check(s) failed")));
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Compute(a) => cmd_compute(a),
        Command::Scan(a) => cmd_scan(a),
        Command::Tables(a) => cmd_tables(a),
        Command::Validate(a) => cmd_validate(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
