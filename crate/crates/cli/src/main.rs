//! `haltlab` — command-line workbench over the core crate.
//!
//! Every subcommand writes exactly one machine-readable payload (JSON, or
//! CSV for flat listings) to standard output and keeps diagnostics on
//! standard error.  Identical invocations produce byte-identical payloads;
//! `--jobs` tunes worker parallelism without changing a single output byte.
//!
//! Exit codes: 0 success, 2 invalid usage, 3 domain error (invalid program,
//! bad input file), 4 resource budget exceeded.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use haltlab_core::complexity::{self, ComplexityError};
use haltlab_core::constructions::{
    self, ConstructionError, CoverRequest, DiagonalOracle, DiagonalResult, DigitSource,
    StreamsDocument, StreamsError,
};
use haltlab_core::dovetail::{CheckpointDocument, DovetailConfig, DovetailError, SessionState};
use haltlab_core::enumeration::{bitstring_at, valid_programs_up_to};
use haltlab_core::machine::{
    self, InvalidReason, OracleError, Program, ProgramTextError, TapeMode, DEFAULT_BOUNDED_WIDTH,
};
use haltlab_core::omega::{
    decide_via_theorem_stream, decode_halting_with_prefix, omega_bounds, oracle_theorem_stream,
    DecodeError, DecodeOutcome, OmegaPrefix, StreamDecision, StreamError, UniverseDocument,
    UniverseError, Verdict,
};
use haltlab_core::rational::{BitString, Rational};

const DEFAULT_CONFIG_BUDGET: usize = 1 << 20;

#[derive(Parser)]
#[command(
    name = "haltlab",
    version,
    about = "Exact halting-probability bounds, diagonal arguments, coverings and program-size complexity on a tiny prefix-free tape language",
    max_term_width = 100
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Payload format; csv is available for flat listings only
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    /// Worker threads for dovetailing and searches; never changes output
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,

    /// Reserved; no subcommand has randomized behavior yet
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Step budget for fuel-limited runs
    #[arg(long, global = true, default_value_t = 4096)]
    fuel: u64,

    /// How --program arguments are written
    #[arg(long, global = true, value_enum, default_value_t = ProgramFormat::Bits)]
    program_format: ProgramFormat,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ProgramFormat {
    /// Binary token codes, e.g. "010010010001000"
    Bits,
    /// Whitespace-separated mnemonics, e.g. "INC INC INC OUT END"
    Tokens,
}

#[derive(Subcommand)]
enum Command {
    /// List the canonical enumeration of bit strings or valid programs
    Enumerate {
        /// Enumerate strings of up to 3*N bits
        #[arg(long)]
        max_tokens: u32,
        /// Restrict to valid programs, indexed within the valid enumeration
        #[arg(long)]
        valid_only: bool,
    },
    /// Run one program on the unbounded (or bounded) tape with finite fuel
    Run {
        #[arg(long)]
        program: String,
        /// "unbounded", "bounded" or "bounded:WIDTH"
        #[arg(long, default_value = "unbounded")]
        tape: String,
    },
    /// Decide halting exactly on the bounded tape via cycle detection
    Oracle {
        #[arg(long)]
        program: String,
        #[arg(long, default_value_t = DEFAULT_BOUNDED_WIDTH)]
        width: usize,
        /// Cap on recorded configurations before giving up
        #[arg(long, default_value_t = DEFAULT_CONFIG_BUDGET)]
        config_budget: usize,
    },
    /// Dovetail the enumeration and report exact halting-probability bounds
    Omega {
        /// Enumeration cutoff in tokens (required unless resuming)
        #[arg(long)]
        max_tokens: Option<u32>,
        /// Target stage: stage s runs programs of <= min(s, max-tokens)
        /// tokens with fuel 4^s
        #[arg(long)]
        stages: u32,
        /// Write a checkpoint document here after advancing
        #[arg(long)]
        checkpoint: Option<PathBuf>,
        /// Resume from a checkpoint document instead of starting fresh
        #[arg(long)]
        resume: Option<PathBuf>,
        /// "unbounded", "bounded" or "bounded:WIDTH"; bounded enables
        /// never-halts classification
        #[arg(long)]
        tape: Option<String>,
        /// Wall on total executed steps across the session
        #[arg(long)]
        step_budget: Option<u64>,
    },
    /// Decide a member's halting from an omega prefix over a finite universe
    Decode {
        /// Universe file: {"version":1,"programs":[{bits,halts,output}]}
        #[arg(long)]
        universe: PathBuf,
        /// Claimed leading bits of the universe's omega
        #[arg(long)]
        omega_prefix: String,
        #[arg(long)]
        program: String,
        /// Dovetailing stage cap for the decoder
        #[arg(long, default_value_t = haltlab_core::omega::DEFAULT_DECODE_MAX_STAGE)]
        max_stage: u32,
    },
    /// Enumerate oracle verdicts in canonical order, or scan them for a query
    TheoremStream {
        #[arg(long)]
        max_tokens: u32,
        /// Program to look up; without it the statements are listed
        #[arg(long)]
        query: Option<String>,
        /// Statements examined before giving up (defaults to the whole stream)
        #[arg(long)]
        budget: Option<u64>,
        #[arg(long, default_value_t = DEFAULT_BOUNDED_WIDTH)]
        width: usize,
        #[arg(long, default_value_t = DEFAULT_CONFIG_BUDGET)]
        config_budget: usize,
    },
    /// Diagonal arguments
    #[command(subcommand)]
    Diagonal(DiagonalCommand),
    /// Cover listed reals with intervals of total length below epsilon
    Cover {
        /// Rational like "1/4"; must satisfy 0 < epsilon <= 1
        #[arg(long)]
        epsilon: String,
        /// Streams file: {"version":1,"streams":[{kind,...}]}
        #[arg(long)]
        streams: PathBuf,
        /// Cover the first N listed reals
        #[arg(long)]
        count: usize,
    },
    /// The answer-encoding real
    #[command(subcommand)]
    Borel(BorelCommand),
    /// Program-size complexity upper bounds
    Complexity {
        /// Decimal digit string to reproduce
        #[arg(long)]
        target: String,
        #[arg(long)]
        max_tokens: u32,
        /// Treat the target as an omega-prefix bit string and report the
        /// incompressibility probe instead
        #[arg(long)]
        probe: bool,
    },
}

#[derive(Subcommand)]
enum DiagonalCommand {
    /// Flip the diagonal of explicitly listed reals
    Cantor {
        #[arg(long)]
        streams: PathBuf,
        #[arg(long)]
        digits: u64,
    },
    /// Walk the raw program enumeration
    Turing {
        #[arg(long)]
        digits: u64,
        /// "bounded" decides every digit with the exact oracle
        #[arg(long)]
        oracle: Option<String>,
        #[arg(long, default_value_t = DEFAULT_BOUNDED_WIDTH)]
        width: usize,
        #[arg(long, default_value_t = DEFAULT_CONFIG_BUDGET)]
        config_budget: usize,
    },
}

#[derive(Subcommand)]
enum BorelCommand {
    /// Pack yes/no answers (a 0/1 string) into a rational
    Encode {
        #[arg(long)]
        answers: String,
    },
    /// Read answer n back out of an encoded rational
    Ask {
        #[arg(long)]
        value: String,
        #[arg(long)]
        index: u64,
    },
}

enum CliError {
    Usage(String),
    Domain(String),
    Resource(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Domain(_) => 3,
            CliError::Resource(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Domain(m) | CliError::Resource(m) => m,
        }
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn domain(msg: impl ToString) -> CliError {
    CliError::Domain(msg.to_string())
}

fn resource(msg: impl ToString) -> CliError {
    CliError::Resource(msg.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(payload) => {
            println!("{payload}");
            ExitCode::SUCCESS
        }
        Err(err) => {
            eprintln!("haltlab: {}", err.message());
            ExitCode::from(err.exit_code())
        }
    }
}

fn dispatch(cli: Cli) -> Result<String, CliError> {
    let ctx = Context {
        format: cli.format,
        jobs: cli.jobs.max(1),
        fuel: cli.fuel,
        program_format: cli.program_format,
    };
    match cli.command {
        Command::Enumerate { max_tokens, valid_only } => cmd_enumerate(&ctx, max_tokens, valid_only),
        Command::Run { program, tape } => cmd_run(&ctx, &program, &tape),
        Command::Oracle { program, width, config_budget } => {
            cmd_oracle(&ctx, &program, width, config_budget)
        }
        Command::Omega { max_tokens, stages, checkpoint, resume, tape, step_budget } => {
            cmd_omega(&ctx, max_tokens, stages, checkpoint, resume, tape, step_budget)
        }
        Command::Decode { universe, omega_prefix, program, max_stage } => {
            cmd_decode(&ctx, &universe, &omega_prefix, &program, max_stage)
        }
        Command::TheoremStream { max_tokens, query, budget, width, config_budget } => {
            cmd_theorem_stream(&ctx, max_tokens, query.as_deref(), budget, width, config_budget)
        }
        Command::Diagonal(DiagonalCommand::Cantor { streams, digits }) => {
            cmd_diagonal_cantor(&ctx, &streams, digits)
        }
        Command::Diagonal(DiagonalCommand::Turing { digits, oracle, width, config_budget }) => {
            cmd_diagonal_turing(&ctx, digits, oracle.as_deref(), width, config_budget)
        }
        Command::Cover { epsilon, streams, count } => cmd_cover(&ctx, &epsilon, &streams, count),
        Command::Borel(BorelCommand::Encode { answers }) => cmd_borel_encode(&ctx, &answers),
        Command::Borel(BorelCommand::Ask { value, index }) => cmd_borel_ask(&ctx, &value, index),
        Command::Complexity { target, max_tokens, probe } => {
            cmd_complexity(&ctx, &target, max_tokens, probe)
        }
    }
}

struct Context {
    format: Format,
    jobs: usize,
    fuel: u64,
    program_format: ProgramFormat,
}

impl Context {
    fn require_json(&self, what: &str) -> Result<(), CliError> {
        match self.format {
            Format::Json => Ok(()),
            Format::Csv => Err(usage(format!(
                "csv output is only available for flat listings, not for {what}"
            ))),
        }
    }

    fn parse_program(&self, text: &str) -> Result<Program, CliError> {
        match self.program_format {
            ProgramFormat::Bits => {
                let bits: BitString = text.parse().map_err(domain)?;
                Program::parse_bits(&bits).map_err(domain)
            }
            ProgramFormat::Tokens => Program::parse_mnemonics(text).map_err(|e| match e {
                ProgramTextError::UnknownMnemonic(_) => domain(e),
                ProgramTextError::Invalid(reason) => domain(reason),
            }),
        }
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string(value).expect("payloads serialize")
}

fn read_file(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path)
        .map_err(|e| domain(format!("cannot read {}: {e}", path.display())))
}

fn parse_tape(text: &str) -> Result<TapeMode, CliError> {
    match text {
        "unbounded" => Ok(TapeMode::Unbounded),
        "bounded" => Ok(TapeMode::bounded_default()),
        other => match other.strip_prefix("bounded:") {
            Some(width) => {
                let width: usize = width
                    .parse()
                    .map_err(|_| usage(format!("bad tape width in {text:?}")))?;
                if width == 0 {
                    return Err(usage("tape width must be at least 1"));
                }
                Ok(TapeMode::Bounded { width })
            }
            None => Err(usage(format!(
                "unknown tape mode {text:?} (expected unbounded, bounded or bounded:WIDTH)"
            ))),
        },
    }
}

// ---------------------------------------------------------------- enumerate

#[derive(Serialize)]
struct EnumerateRecord {
    index: u64,
    bits: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    tokens: Option<String>,
    valid: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    invalid_reason: Option<InvalidReason>,
}

fn cmd_enumerate(ctx: &Context, max_tokens: u32, valid_only: bool) -> Result<String, CliError> {
    if max_tokens < 1 {
        return Err(usage("--max-tokens must be at least 1"));
    }
    // The raw listing holds 2^(3N+1) - 2 strings; keep it printable.
    if !valid_only && max_tokens > 6 {
        return Err(usage("--max-tokens above 6 would list millions of raw strings; use --valid-only"));
    }
    if valid_only && max_tokens > 12 {
        return Err(usage("--max-tokens above 12 would list hundreds of millions of programs"));
    }
    let records: Vec<EnumerateRecord> = if valid_only {
        valid_programs_up_to(max_tokens)
            .into_iter()
            .map(|(index, p)| EnumerateRecord {
                index,
                bits: p.bits().to_string(),
                tokens: Some(p.mnemonics()),
                valid: true,
                invalid_reason: None,
            })
            .collect()
    } else {
        let total = (2u64 << (3 * max_tokens)) - 2; // strings of 1..=3N bits
        (1..=total)
            .map(|index| {
                let bits = bitstring_at(index);
                match Program::parse_bits(&bits) {
                    Ok(p) => EnumerateRecord {
                        index,
                        bits: bits.to_string(),
                        tokens: Some(p.mnemonics()),
                        valid: true,
                        invalid_reason: None,
                    },
                    Err(reason) => EnumerateRecord {
                        index,
                        bits: bits.to_string(),
                        tokens: None,
                        valid: false,
                        invalid_reason: Some(reason),
                    },
                }
            })
            .collect()
    };
    match ctx.format {
        Format::Json => Ok(to_json(&records)),
        Format::Csv => {
            let mut out = String::from("index,bits,tokens,valid,invalid_reason");
            for r in records {
                write!(
                    out,
                    "\n{},{},{},{},{}",
                    r.index,
                    r.bits,
                    r.tokens.unwrap_or_default(),
                    r.valid,
                    r.invalid_reason.map(|x| x.to_string()).unwrap_or_default()
                )
                .expect("write to string");
            }
            Ok(out)
        }
    }
}

// ---------------------------------------------------------------- run/oracle

fn cmd_run(ctx: &Context, program: &str, tape: &str) -> Result<String, CliError> {
    ctx.require_json("run outcomes")?;
    let program = ctx.parse_program(program)?;
    let tape = parse_tape(tape)?;
    Ok(to_json(&machine::run(&program, tape, ctx.fuel)))
}

fn cmd_oracle(
    ctx: &Context,
    program: &str,
    width: usize,
    config_budget: usize,
) -> Result<String, CliError> {
    ctx.require_json("oracle verdicts")?;
    if width == 0 {
        return Err(usage("--width must be at least 1"));
    }
    let program = ctx.parse_program(program)?;
    let outcome =
        machine::decide_halting_exact(&program, width, config_budget).map_err(resource)?;
    Ok(to_json(&outcome))
}

// ---------------------------------------------------------------- omega

fn cmd_omega(
    ctx: &Context,
    max_tokens: Option<u32>,
    stages: u32,
    checkpoint: Option<PathBuf>,
    resume: Option<PathBuf>,
    tape: Option<String>,
    step_budget: Option<u64>,
) -> Result<String, CliError> {
    ctx.require_json("omega bounds")?;
    let mut session = match resume {
        Some(path) => {
            if max_tokens.is_some() || tape.is_some() || step_budget.is_some() {
                return Err(usage(
                    "--resume takes its configuration from the checkpoint; \
                     drop --max-tokens/--tape/--step-budget",
                ));
            }
            let doc = CheckpointDocument::from_json(&read_file(&path)?).map_err(domain)?;
            SessionState::restore(&doc).map_err(domain)?
        }
        None => {
            let max_tokens =
                max_tokens.ok_or_else(|| usage("--max-tokens is required unless resuming"))?;
            let tape = match tape.as_deref() {
                Some(text) => parse_tape(text)?,
                None => TapeMode::Unbounded,
            };
            let mut config = DovetailConfig::new(max_tokens, tape);
            config.step_budget = step_budget;
            SessionState::new(config).map_err(dovetail_error)?
        }
    };

    if stages < session.stage() {
        return Err(usage(format!(
            "--stages {} is below the session's current stage {}",
            stages,
            session.stage()
        )));
    }
    session
        .advance(stages - session.stage(), ctx.jobs)
        .map_err(dovetail_error)?;

    if let Some(path) = checkpoint {
        std::fs::write(&path, session.checkpoint().to_json())
            .map_err(|e| domain(format!("cannot write {}: {e}", path.display())))?;
    }
    Ok(to_json(&omega_bounds(&session)))
}

fn dovetail_error(err: DovetailError) -> CliError {
    match err {
        DovetailError::StepBudgetExceeded { .. } => resource(err),
        DovetailError::ThreadPool(_) => resource(err),
        DovetailError::InvalidConfig(_) | DovetailError::StageCapExceeded { .. } => usage(err.to_string()),
    }
}

// ---------------------------------------------------------------- decode

#[derive(Serialize)]
struct DecodePayload {
    verdict: DecodeOutcome,
    program: String,
    prefix_length: u64,
}

fn cmd_decode(
    ctx: &Context,
    universe_path: &Path,
    omega_prefix: &str,
    program: &str,
    max_stage: u32,
) -> Result<String, CliError> {
    ctx.require_json("decode verdicts")?;
    let universe = UniverseDocument::from_json(&read_file(universe_path)?)
        .map_err(domain)?
        .into_universe()
        .map_err(universe_error)?;
    let prefix_bits: BitString = omega_prefix.parse().map_err(domain)?;
    let prefix = OmegaPrefix::new(prefix_bits).map_err(domain)?;
    let query = ctx.parse_program(program)?;
    let verdict = decode_halting_with_prefix(&prefix, &universe, &query, max_stage)
        .map_err(|e| match e {
            DecodeError::StageBudgetExhausted { .. } => resource(e),
            _ => domain(e),
        })?;
    Ok(to_json(&DecodePayload {
        verdict,
        program: query.bits().to_string(),
        prefix_length: prefix.len(),
    }))
}

fn universe_error(err: UniverseError) -> CliError {
    match err {
        UniverseError::Oracle(e) => resource(e),
        other => domain(other),
    }
}

// ---------------------------------------------------------------- theorems

#[derive(Serialize)]
struct TheoremRecord {
    index: u64,
    bits: String,
    verdict: Verdict,
}

#[derive(Serialize)]
struct TheoremVerdictPayload {
    verdict: &'static str,
}

fn cmd_theorem_stream(
    ctx: &Context,
    max_tokens: u32,
    query: Option<&str>,
    budget: Option<u64>,
    width: usize,
    config_budget: usize,
) -> Result<String, CliError> {
    if max_tokens < 1 {
        return Err(usage("--max-tokens must be at least 1"));
    }
    let stream = || {
        oracle_theorem_stream(max_tokens, width, config_budget)
            .collect::<Result<Vec<_>, OracleError>>()
            .map_err(resource)
    };
    match query {
        None => {
            let statements = stream()?;
            let records: Vec<TheoremRecord> = statements
                .iter()
                .enumerate()
                .map(|(i, s)| TheoremRecord {
                    index: i as u64 + 1,
                    bits: s.program.bits().to_string(),
                    verdict: s.verdict,
                })
                .collect();
            match ctx.format {
                Format::Json => Ok(to_json(&records)),
                Format::Csv => {
                    let mut out = String::from("index,bits,verdict");
                    for r in records {
                        let verdict = match r.verdict {
                            Verdict::Halts => "halts",
                            Verdict::NeverHalts => "never-halts",
                        };
                        write!(out, "\n{},{},{}", r.index, r.bits, verdict)
                            .expect("write to string");
                    }
                    Ok(out)
                }
            }
        }
        Some(query) => {
            ctx.require_json("theorem-stream verdicts")?;
            let query = ctx.parse_program(query)?;
            let statements = stream()?;
            let budget = budget.unwrap_or(statements.len() as u64);
            let decision = decide_via_theorem_stream(statements, &query, budget)
                .map_err(|e: StreamError| domain(e))?;
            let verdict = match decision {
                StreamDecision::Decided(Verdict::Halts) => "halts",
                StreamDecision::Decided(Verdict::NeverHalts) => "never-halts",
                StreamDecision::BudgetExhausted => "budget-exhausted",
            };
            Ok(to_json(&TheoremVerdictPayload { verdict }))
        }
    }
}

// ---------------------------------------------------------------- diagonals

#[derive(Serialize)]
struct DiagonalPayload {
    digits: String,
    statuses: Vec<constructions::DigitStatus>,
}

fn diagonal_payload(result: DiagonalResult) -> String {
    to_json(&DiagonalPayload {
        digits: result.digit_string(),
        statuses: result.statuses().to_vec(),
    })
}

fn load_streams(path: &Path) -> Result<Vec<DigitSource>, CliError> {
    StreamsDocument::from_json(&read_file(path)?)
        .map_err(domain)?
        .into_sources()
        .map_err(|e: StreamsError| domain(e))
}

fn cmd_diagonal_cantor(ctx: &Context, streams: &Path, digits: u64) -> Result<String, CliError> {
    ctx.require_json("diagonal results")?;
    let sources = load_streams(streams)?;
    let result = constructions::cantor_diagonal(&sources, digits, ctx.fuel)
        .map_err(construction_error)?;
    Ok(diagonal_payload(result))
}

fn cmd_diagonal_turing(
    ctx: &Context,
    digits: u64,
    oracle: Option<&str>,
    width: usize,
    config_budget: usize,
) -> Result<String, CliError> {
    ctx.require_json("diagonal results")?;
    let oracle = match oracle {
        None => DiagonalOracle::FuelOnly,
        Some("bounded") => DiagonalOracle::ExactBounded { width, config_budget },
        Some(other) => return Err(usage(format!("unknown oracle {other:?} (expected bounded)"))),
    };
    let result =
        constructions::turing_diagonal(digits, ctx.fuel, oracle).map_err(construction_error)?;
    Ok(diagonal_payload(result))
}

fn construction_error(err: ConstructionError) -> CliError {
    match err {
        ConstructionError::Localization { .. } | ConstructionError::Oracle(_) => resource(err),
        other => domain(other),
    }
}

// ---------------------------------------------------------------- cover

#[derive(Serialize)]
struct CoverPayload {
    epsilon: Rational,
    count: usize,
    intervals: Vec<haltlab_core::rational::Interval>,
    total_length: Rational,
}

fn cmd_cover(ctx: &Context, epsilon: &str, streams: &Path, count: usize) -> Result<String, CliError> {
    ctx.require_json("coverings")?;
    let epsilon: Rational = epsilon.parse().map_err(domain)?;
    let request = CoverRequest {
        epsilon: epsilon.clone(),
        streams: load_streams(streams)?,
        count,
    };
    let cover = constructions::cover(&request, ctx.fuel).map_err(construction_error)?;
    Ok(to_json(&CoverPayload {
        epsilon,
        count,
        intervals: cover.intervals,
        total_length: cover.total_length,
    }))
}

// ---------------------------------------------------------------- borel

#[derive(Serialize)]
struct BorelEncodePayload {
    value: Rational,
}

#[derive(Serialize)]
struct BorelAskPayload {
    answer: u8,
}

fn cmd_borel_encode(ctx: &Context, answers: &str) -> Result<String, CliError> {
    ctx.require_json("encoded reals")?;
    let answers: BitString = answers.parse().map_err(domain)?;
    Ok(to_json(&BorelEncodePayload {
        value: constructions::borel_encode(&answers),
    }))
}

fn cmd_borel_ask(ctx: &Context, value: &str, index: u64) -> Result<String, CliError> {
    ctx.require_json("answers")?;
    if index < 1 {
        return Err(usage("--index is 1-based"));
    }
    let value: Rational = value.parse().map_err(domain)?;
    let answer = constructions::borel_answer(&value, index).map_err(domain)?;
    Ok(to_json(&BorelAskPayload { answer: answer as u8 }))
}

// ---------------------------------------------------------------- complexity

#[derive(Serialize)]
struct ComplexityPayload {
    target: String,
    bound_bits: u64,
    witness_bits: String,
    witness_tokens: String,
    method: complexity::SearchMethod,
    search_exhausted_through: u32,
}

#[derive(Serialize)]
struct ProbePayload {
    target_bits: String,
    literal_bits: u64,
    shortest_found_bits: Option<u64>,
    witness_bits: Option<String>,
    exhausted_through: u32,
    assessment: complexity::Assessment,
}

fn cmd_complexity(
    ctx: &Context,
    target: &str,
    max_tokens: u32,
    probe: bool,
) -> Result<String, CliError> {
    ctx.require_json("complexity estimates")?;
    if max_tokens < 1 {
        return Err(usage("--max-tokens must be at least 1"));
    }
    if probe {
        let bits: BitString = target.parse().map_err(domain)?;
        let report = complexity::incompressibility_probe(&bits, max_tokens, ctx.fuel, ctx.jobs)
            .map_err(complexity_error)?;
        return Ok(to_json(&ProbePayload {
            target_bits: report.target_bits.to_string(),
            literal_bits: report.literal_bits,
            shortest_found_bits: report.shortest_found_bits,
            witness_bits: report.witness.map(|w| w.bits().to_string()),
            exhausted_through: report.exhausted_through,
            assessment: report.assessment,
        }));
    }
    let estimate = complexity::h_upper(target, max_tokens, ctx.fuel, ctx.jobs)
        .map_err(complexity_error)?;
    Ok(to_json(&ComplexityPayload {
        target: estimate.target,
        bound_bits: estimate.bound_bits,
        witness_bits: estimate.witness.bits().to_string(),
        witness_tokens: estimate.witness.mnemonics(),
        method: estimate.method,
        search_exhausted_through: estimate.search_exhausted_through,
    }))
}

fn complexity_error(err: ComplexityError) -> CliError {
    match err {
        ComplexityError::BadDigit(_) => domain(err),
        ComplexityError::ThreadPool(_) => resource(err),
    }
}
