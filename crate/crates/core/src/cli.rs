//! `iterseq` command-line front end.
//!
//! Exit codes: 0 success or claim verified, 1 claim falsified (unknown
//! terminal, conjecture or expectation mismatch), 2 usage or parse error,
//! 3 a resource cap was exceeded (state space, step cap, exact arithmetic).

use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;
use thiserror::Error;

use crate::collatz::{self, CollatzError};
use crate::cycledetect::{self, CycleError};
use crate::digitproc::{self, DigitProcError, ProcessKind};
use crate::kaprekar::{self, KaprekarConfig, KaprekarError, KaprekarStep};
use crate::report::{self, ClassificationView, Format, RenderSpec, ReportError};
use crate::verifier::{self, CycleCatalog, VerifierError, VerifyOptions};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FALSIFIED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_CAP: i32 = 3;

/// Published base-2, `u = v = 2` terminals for lengths 4 through 9:
/// `(length, fixed points, loops)`.
pub const TABLE1_EXPECTED: [(u32, &[u64], &[&[u64]]); 6] = [
    (4, &[0b10, 0b101], &[]),
    (5, &[], &[&[0b110, 0b1111]]),
    (6, &[0b101001], &[]),
    (7, &[], &[&[0b1001011, 0b1011101]]),
    (8, &[0b11010001], &[]),
    (9, &[], &[&[0b110010101, 0b110111001]]),
];

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Collatz(#[from] CollatzError),
    #[error(transparent)]
    Kaprekar(#[from] KaprekarError),
    #[error(transparent)]
    DigitProc(#[from] DigitProcError),
    #[error(transparent)]
    Verifier(#[from] VerifierError),
    #[error(transparent)]
    Cycle(#[from] CycleError),
    #[error(transparent)]
    Report(#[from] ReportError),
    #[error("cannot write output: {0}")]
    Io(#[from] io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Collatz(CollatzError::Overflow { .. })
            | CliError::Kaprekar(KaprekarError::StateSpaceTooLarge { .. })
            | CliError::Kaprekar(KaprekarError::Cycle(CycleError::StepCapExceeded { .. }))
            | CliError::Verifier(VerifierError::Cycle(CycleError::StepCapExceeded { .. }))
            | CliError::Cycle(CycleError::StepCapExceeded { .. }) => EXIT_CAP,
            CliError::Verifier(VerifierError::CatalogInconsistent { .. })
            | CliError::Verifier(VerifierError::CatalogOverlap(..)) => EXIT_FALSIFIED,
            _ => EXIT_USAGE,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "iterseq", version, about = "Iterated digit maps and exhaustive terminal searches")]
pub struct Cli {
    /// Write the report here instead of standard output.
    #[arg(long, global = true, value_name = "PATH")]
    pub output: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Collatz trajectory of one start, or `collatz verify --upto N`.
    Collatz(CollatzArgs),
    /// Generalized Kaprekar routine K_{u,v}.
    #[command(subcommand)]
    Kaprekar(KaprekarCommand),
    /// Digit-factorial process from one start.
    Dfp(DigitArgs),
    /// Digit-power process from one start.
    Dpp(DigitArgs),
    /// Exhaustive multiset verification that every trajectory ends in the catalog.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
#[command(args_conflicts_with_subcommands = true, subcommand_negates_reqs = true)]
pub struct CollatzArgs {
    #[command(subcommand)]
    pub action: Option<CollatzAction>,

    #[arg(long, required = true)]
    pub start: Option<u128>,

    #[arg(long, default_value_t = 100_000)]
    pub max_steps: u64,

    /// Emit `step,value` CSV instead of JSON.
    #[arg(long)]
    pub csv: bool,
}

#[derive(Debug, Subcommand)]
pub enum CollatzAction {
    /// Check that every start in 1..=N reaches 1.
    Verify {
        #[arg(long)]
        upto: u64,
        #[arg(long, env = "ITERSEQ_WORKERS", default_value_t = 1)]
        workers: usize,
        #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
        format: OutputFormat,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Table,
    Csv,
}

impl From<OutputFormat> for Format {
    fn from(f: OutputFormat) -> Self {
        match f {
            OutputFormat::Json => Format::Json,
            OutputFormat::Table => Format::Table,
            OutputFormat::Csv => Format::Csv,
        }
    }
}

#[derive(Debug, Args, Clone, Copy)]
pub struct KaprekarParams {
    #[arg(long)]
    pub base: u32,
    #[arg(long)]
    pub length: u32,
    #[arg(short = 'u', default_value_t = 1)]
    pub u: u64,
    #[arg(short = 'v', default_value_t = 1)]
    pub v: u64,
}

impl KaprekarParams {
    fn config(&self) -> Result<KaprekarConfig, KaprekarError> {
        KaprekarConfig::new(self.base, self.length, self.u, self.v)
    }
}

#[derive(Debug, Args, Clone, Copy)]
pub struct CapArgs {
    /// Largest state space to scan exhaustively.
    #[arg(long, default_value_t = kaprekar::DEFAULT_STATE_CAP)]
    pub cap: u64,
    /// Required to raise --cap above the default.
    #[arg(long)]
    pub allow_large: bool,
}

impl CapArgs {
    fn checked(&self) -> Result<u64, CliError> {
        if self.cap > kaprekar::DEFAULT_STATE_CAP && !self.allow_large {
            return Err(CliError::Usage(format!(
                "--cap {} exceeds the default {}; pass --allow-large to confirm",
                self.cap,
                kaprekar::DEFAULT_STATE_CAP
            )));
        }
        Ok(self.cap)
    }
}

#[derive(Debug, Subcommand)]
pub enum KaprekarCommand {
    /// Apply K_{u,v} once.
    Step {
        #[command(flatten)]
        params: KaprekarParams,
        #[arg(long)]
        value: u64,
    },
    /// Classify every start of the given length by its terminal.
    Classify {
        #[command(flatten)]
        params: KaprekarParams,
        #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
        format: OutputFormat,
        /// Terminal values to compare against; a mismatch exits with 1.
        #[arg(long, value_delimiter = ',')]
        expect: Option<Vec<u64>>,
        /// Radix for values in table output.
        #[arg(long, default_value_t = 10)]
        display_base: u32,
        #[command(flatten)]
        cap: CapArgs,
    },
    /// Base 2, u = v = 2, lengths 4 through 9, checked against the published table.
    Table1 {
        #[arg(long, value_enum, default_value_t = OutputFormat::Table)]
        format: OutputFormat,
    },
    /// Check the base-2 closed forms for m in [m-min, m-max].
    Conjecture {
        #[arg(long)]
        m_min: u32,
        #[arg(long)]
        m_max: u32,
        #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
        format: OutputFormat,
        #[command(flatten)]
        cap: CapArgs,
    },
}

#[derive(Debug, Args)]
pub struct DigitArgs {
    /// Decimal start value; any length.
    #[arg(long)]
    pub start: String,
    /// Emit the trajectory as `step,value` CSV.
    #[arg(long)]
    pub trace: bool,
    #[arg(long, default_value_t = cycledetect::DEFAULT_STEP_CAP)]
    pub step_cap: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ProcessArg {
    Dfp,
    Dpp,
}

impl From<ProcessArg> for ProcessKind {
    fn from(p: ProcessArg) -> Self {
        match p {
            ProcessArg::Dfp => ProcessKind::Dfp,
            ProcessArg::Dpp => ProcessKind::Dpp,
        }
    }
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(value_enum)]
    pub process: ProcessArg,
    #[arg(long, env = "ITERSEQ_WORKERS", default_value_t = 1)]
    pub workers: usize,
    /// Omit elapsed time so reports are byte-comparable.
    #[arg(long)]
    pub no_timing: bool,
    /// Resolve every case from scratch.
    #[arg(long)]
    pub no_memo: bool,
    #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
    pub format: OutputFormat,
}

/// What a subcommand produced: the report body and its exit code.
struct Outcome {
    body: String,
    code: i32,
}

impl Outcome {
    fn ok(body: String) -> Self {
        Self { body, code: EXIT_OK }
    }
}

fn pretty(v: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values always serialize");
    s.push('\n');
    s
}

fn run_collatz(args: &CollatzArgs, stderr: &mut dyn Write) -> Result<Outcome, CliError> {
    if let Some(CollatzAction::Verify { upto, workers, format }) = &args.action {
        if *upto == 0 {
            return Err(CliError::Usage("--upto must be at least 1".into()));
        }
        let report = if *workers <= 1 {
            collatz::collatz_verify_range(*upto)?
        } else {
            collatz::collatz_verify_range_parallel(*upto, *workers)?
        };
        writeln!(
            stderr,
            "collatz: all {} starts reach 1; max steps {} (start {})",
            report.verified, report.max_steps, report.max_steps_start
        )?;
        return Ok(Outcome::ok(report::render(&report, &RenderSpec::new((*format).into()))?));
    }
    let start = args.start.ok_or_else(|| CliError::Usage("--start is required".into()))?;
    let t = collatz::collatz_trajectory(start, args.max_steps)?;
    let format = if args.csv { Format::Csv } else { Format::Json };
    let body = report::render(&t, &RenderSpec::new(format))?;
    let code = if t.reached_one { EXIT_OK } else { EXIT_CAP };
    if !t.reached_one {
        writeln!(stderr, "collatz: {} did not reach 1 within {} steps", start, args.max_steps)?;
    }
    Ok(Outcome { body, code })
}

fn table1_mismatches(results: &[kaprekar::KaprekarClassification]) -> Vec<u32> {
    TABLE1_EXPECTED
        .iter()
        .zip(results)
        .filter(|((_, fixed, loops), c)| {
            let found_loops: Vec<&[u64]> = c.cycles().into_iter().map(|cy| cy.values()).collect();
            c.fixed_points() != *fixed || found_loops != *loops
        })
        .map(|((len, _, _), _)| *len)
        .collect()
}

fn run_kaprekar(cmd: &KaprekarCommand, stderr: &mut dyn Write) -> Result<Outcome, CliError> {
    match cmd {
        KaprekarCommand::Step { params, value } => {
            let cfg = params.config()?;
            match kaprekar::kaprekar_step(*value, &cfg)? {
                KaprekarStep::Next(y) => Ok(Outcome::ok(format!("{y}\n"))),
                KaprekarStep::Degenerate => Ok(Outcome::ok("degenerate\n".into())),
            }
        }
        KaprekarCommand::Classify { params, format, expect, display_base, cap } => {
            let cfg = params.config()?;
            let c = kaprekar::classify_all_capped(&cfg, cap.checked()?)?;
            let check = expect.as_ref().map(|e| c.compare_expected(e));
            let view = ClassificationView { classification: &c, expectation: check.as_ref() };
            let spec = RenderSpec::new((*format).into()).with_base(*display_base);
            let body = report::render(&view, &spec)?;
            let code = match &check {
                Some(e) if !e.matches() => {
                    writeln!(
                        stderr,
                        "kaprekar: terminals differ from expectation; missing {:?}, unexpected {:?}",
                        e.missing, e.unexpected
                    )?;
                    EXIT_FALSIFIED
                }
                _ => EXIT_OK,
            };
            Ok(Outcome { body, code })
        }
        KaprekarCommand::Table1 { format } => {
            let results = TABLE1_EXPECTED
                .iter()
                .map(|(len, _, _)| kaprekar::classify_all(&KaprekarConfig::new(2, *len, 2, 2)?))
                .collect::<Result<Vec<_>, _>>()?;
            let body = match format {
                OutputFormat::Table => report::render_table1(&results),
                OutputFormat::Json => {
                    let spec = RenderSpec::new(Format::Json);
                    let rows: Vec<_> = results.iter().map(|c| report::Render::json(c, &spec)).collect();
                    pretty(&json!(rows))
                }
                OutputFormat::Csv => {
                    return Err(ReportError::UnsupportedFormat { what: "table1", format: Format::Csv }.into())
                }
            };
            let bad = table1_mismatches(&results);
            if bad.is_empty() {
                Ok(Outcome::ok(body))
            } else {
                writeln!(stderr, "kaprekar: table rows differ at lengths {bad:?}")?;
                Ok(Outcome { body, code: EXIT_FALSIFIED })
            }
        }
        KaprekarCommand::Conjecture { m_min, m_max, format, cap } => {
            if m_min > m_max {
                return Err(CliError::Usage("--m-min exceeds --m-max".into()));
            }
            let cap = cap.checked()?;
            let outcomes = (*m_min..=*m_max)
                .map(|m| kaprekar::conjecture_check_capped(m, cap))
                .collect::<Result<Vec<_>, _>>()?;
            let spec = RenderSpec::new((*format).into()).with_base(2);
            let body = report::render(outcomes.as_slice(), &spec)?;
            let all = outcomes.iter().all(kaprekar::ConjectureOutcome::holds);
            writeln!(
                stderr,
                "kaprekar: conjecture {} for m in {m_min}..={m_max}",
                if all { "holds" } else { "FAILS" }
            )?;
            Ok(Outcome { body, code: if all { EXIT_OK } else { EXIT_FALSIFIED } })
        }
    }
}

fn run_digit(kind: ProcessKind, args: &DigitArgs) -> Result<Outcome, CliError> {
    let start_text = args.start.trim();
    let first = digitproc::apply(kind, start_text)?;
    let f = |x: u64| kind.apply_u64(x);
    // Starts above u64 are represented only by their text; the trajectory is
    // followed from the first image.
    let (lead, traj) = match start_text.parse::<u64>() {
        Ok(n) => (None, cycledetect::find_terminal(f, n, args.step_cap)?),
        Err(_) => (Some(start_text.to_string()), cycledetect::find_terminal(f, first, args.step_cap)?),
    };
    let catalog = CycleCatalog::for_kind(kind);
    let entry = catalog.lookup(&traj.cycle).map(|i| catalog.entries[i].name);
    let code = if entry.is_some() { EXIT_OK } else { EXIT_FALSIFIED };

    let mut transient: Vec<String> = lead.iter().cloned().collect();
    transient.extend(traj.transient.iter().map(u64::to_string));
    let body = if args.trace {
        let entry_value = traj.entry(f);
        let pos = traj.cycle.values().iter().position(|&v| v == entry_value).unwrap_or(0);
        let cyc = traj.cycle.values();
        let rotated = cyc[pos..].iter().chain(&cyc[..pos]).map(u64::to_string);
        report::trajectory_csv(transient.iter().cloned().chain(rotated))
    } else {
        pretty(&json!({
            "process": kind,
            "start": start_text,
            "first_image": first,
            "transient": transient,
            "transient_length": transient.len(),
            "cycle": traj.cycle,
            "catalog_entry": entry,
        }))
    };
    Ok(Outcome { body, code })
}

fn run_verify(args: &VerifyArgs, stderr: &mut dyn Write) -> Result<Outcome, CliError> {
    if args.workers == 0 {
        return Err(CliError::Usage("--workers must be at least 1".into()));
    }
    let kind: ProcessKind = args.process.into();
    let opts = VerifyOptions { workers: args.workers, memoize: !args.no_memo, ..VerifyOptions::default() };
    let report = verifier::verify_theorem_with(kind, &opts)?;
    let mut spec = RenderSpec::new(args.format.into());
    if args.no_timing {
        spec = spec.without_timing();
    }
    let body = report::render(&report, &spec)?;
    writeln!(
        stderr,
        "verify {kind}: {} cases, {} catalog terminals reached, {} unknown, {} ms",
        report.cases_total,
        report.terminals.len(),
        report.unknown.len(),
        report.elapsed.as_millis()
    )?;
    Ok(Outcome { body, code: if report.confirmed() { EXIT_OK } else { EXIT_FALSIFIED } })
}

/// Parses `args` (program name first), runs the subcommand and returns the
/// exit code. Reports go to `--output` or `stdout`; diagnostics to `stderr`.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let sink: &mut dyn Write = if e.use_stderr() { stderr } else { stdout };
            let _ = sink.write_all(text.as_bytes());
            return code;
        }
    };
    let result = match &cli.command {
        Command::Collatz(args) => run_collatz(args, stderr),
        Command::Kaprekar(cmd) => run_kaprekar(cmd, stderr),
        Command::Dfp(args) => run_digit(ProcessKind::Dfp, args),
        Command::Dpp(args) => run_digit(ProcessKind::Dpp, args),
        Command::Verify(args) => run_verify(args, stderr),
    };
    let outcome = match result {
        Ok(o) => o,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return e.exit_code();
        }
    };
    let written = match &cli.output {
        Some(path) => fs::write(path, &outcome.body),
        None => stdout.write_all(outcome.body.as_bytes()),
    };
    if let Err(e) = written {
        let _ = writeln!(stderr, "error: {}", CliError::Io(e));
        return EXIT_USAGE;
    }
    outcome.code
}
