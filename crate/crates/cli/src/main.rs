//! `ksmc`: symbolic model checking of knowledge structures from the command
//! line. Exit codes: 0 true or success, 1 false, 2 usage or parse error,
//! 3 resource cap exceeded.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use output::{write_atomic, EXIT_USAGE};

#[derive(Parser, Debug)]
#[command(name = "ksmc", version, about = "Symbolic epistemic model checker")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Decide a formula at one state or at every state of a model.
    Check(CheckArgs),
    /// Print the truth set of a formula as a propositional formula.
    Truthset(QueryArgs),
    /// Weakest sufficient condition of a formula for an agent or group.
    Wsc(ConditionArgs),
    /// Strongest necessary condition of a formula for an agent or group.
    Snc(ConditionArgs),
    /// Decide common knowledge of a formula among a group.
    Common(CommonArgs),
    /// Apply public announcements and print the resulting model.
    Announce(AnnounceArgs),
    /// Translate a positive-fragment formula into a propositional one.
    Translate(TranslateArgs),
    /// Expand a model into its explicit Kripke model.
    KripkeExport(KripkeExportArgs),
    /// Build a knowledge structure from an explicit Kripke model.
    KripkeImport(KripkeImportArgs),
    /// Run the muddy children puzzle.
    BenchMuddy(MuddyArgs),
    /// Verify the Needham-Schroeder specifications.
    VerifyNs(NsArgs),
    /// Generate a QBF instance and its knowledge structure.
    GenQbf(QbfArgs),
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum EngineKind {
    Bdd,
    /// Dense truth tables; at most 20 variables.
    Enum,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Realized,
    State,
}

#[derive(Args, Debug, Clone)]
pub struct ModelArgs {
    /// Model file (.eks).
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long, value_enum, default_value_t = EngineKind::Bdd)]
    pub engine: EngineKind,
    /// `decl` or `@file` listing every variable in the wanted order.
    #[arg(long, default_value = "decl")]
    pub var_order: String,
}

#[derive(Args, Debug, Clone)]
pub struct OutArgs {
    /// Emit JSON instead of text.
    #[arg(long)]
    pub json: bool,
    /// Write the report to this file instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct CheckArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Formula text, or `@file`.
    #[arg(long)]
    pub formula: String,
    /// Comma-separated true variables; all others are false.
    #[arg(long)]
    pub state: Option<String>,
    /// Defaults to `state` when `--state` is given.
    #[arg(long, value_enum)]
    pub mode: Option<Mode>,
    /// Write `theta & ~[formula]` as DIMACS CNF.
    #[arg(long)]
    pub dimacs: Option<PathBuf>,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Args, Debug, Clone)]
pub struct QueryArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long)]
    pub formula: String,
    /// Write `theta & [formula]` as DIMACS CNF.
    #[arg(long)]
    pub dimacs: Option<PathBuf>,
    /// List at most this many member states.
    #[arg(long, default_value_t = 64)]
    pub limit: usize,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Args, Debug, Clone)]
pub struct ConditionArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long)]
    pub formula: String,
    #[arg(long, conflicts_with = "group", required_unless_present = "group")]
    pub agent: Option<String>,
    /// Comma-separated agent names.
    #[arg(long)]
    pub group: Option<String>,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Args, Debug, Clone)]
pub struct CommonArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long)]
    pub formula: String,
    /// Comma-separated agent names.
    #[arg(long)]
    pub group: String,
    #[arg(long)]
    pub state: Option<String>,
    #[arg(long, value_enum)]
    pub mode: Option<Mode>,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Args, Debug, Clone)]
pub struct AnnounceArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Announced formula; repeat for a sequence.
    #[arg(long = "formula", required = true)]
    pub formulas: Vec<String>,
    /// Check this formula in the updated model.
    #[arg(long)]
    pub then: Option<String>,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Args, Debug, Clone)]
pub struct TranslateArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long)]
    pub formula: String,
    /// One fresh variable set per occurrence instead of per distinct subformula.
    #[arg(long)]
    pub fresh_per_occurrence: bool,
    /// Write `theta & ~translation` as DIMACS CNF.
    #[arg(long)]
    pub dimacs: Option<PathBuf>,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Args, Debug, Clone)]
pub struct KripkeExportArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, default_value_t = ksmc::kripke::DEFAULT_WORLD_CAP)]
    pub cap_worlds: usize,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Args, Debug, Clone)]
pub struct KripkeImportArgs {
    /// Kripke model file.
    #[arg(long)]
    pub kripke: PathBuf,
    #[arg(long, value_enum, default_value_t = EngineKind::Bdd)]
    pub engine: EngineKind,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Args, Debug, Clone)]
pub struct MuddyArgs {
    /// Number of children, or an inclusive range `a..b`.
    #[arg(long)]
    pub n: String,
    /// Muddy children; every `1..=n` when omitted.
    #[arg(long)]
    pub k: Option<usize>,
    /// Write per-check timings for both algorithms as CSV.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Args, Debug, Clone)]
pub struct NsArgs {
    #[arg(long, default_value = "revised")]
    pub variant: String,
    /// Use the protocol vocabulary without the two specification atoms.
    #[arg(long)]
    pub strict: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct QbfArgs {
    /// Number of quantifier levels (2 to 4).
    #[arg(long, default_value_t = 2)]
    pub m: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Also decide the instance symbolically and by brute force.
    #[arg(long)]
    pub check: bool,
    /// Write the generated model file here.
    #[arg(long)]
    pub model_out: Option<PathBuf>,
    #[command(flatten)]
    pub out: OutArgs,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE as u8 } else { 0 });
        }
    };
    let target = out_path(&cli.command);
    let result = commands::run(&cli.command).and_then(|outcome| {
        match target {
            Some(path) => write_atomic(&path, outcome.text.as_bytes())?,
            None => print!("{}", outcome.text),
        }
        Ok(outcome.code)
    });
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn out_path(c: &Command) -> Option<PathBuf> {
    let out = match c {
        Command::Check(a) => &a.out,
        Command::Truthset(a) => &a.out,
        Command::Wsc(a) | Command::Snc(a) => &a.out,
        Command::Common(a) => &a.out,
        Command::Announce(a) => &a.out,
        Command::Translate(a) => &a.out,
        Command::KripkeExport(a) => &a.out,
        Command::KripkeImport(a) => &a.out,
        Command::BenchMuddy(a) => &a.out,
        Command::VerifyNs(a) => return a.out.clone(),
        Command::GenQbf(a) => &a.out,
    };
    out.out.clone()
}
