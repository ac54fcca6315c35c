//! The tape language, its parser, interpreter, and the exact halting oracle
//! for the bounded-tape variant.
//!
//! Programs are sequences of eight 3-bit tokens over a two-way tape of cells
//! mod 256.  A valid program ends with a single `END` token and has balanced,
//! properly nested loops; because `END` may appear exactly once and only at
//! the end, no valid program is a proper prefix of another, so the encoding
//! set is prefix-free and the halting masses `2^-|p|` sum below 1.
//!
//! Two execution regimes exist:
//!
//! * [`run`] — the "real" machine: unbounded tape in both directions, finite
//!   fuel, and no nonhalting verdicts ever (fuel exhaustion is reported as
//!   [`RunOutcome::OutOfFuel`], never as a proof).
//! * [`decide_halting_exact`] — the bounded circular tape, where the
//!   configuration space is finite, so recording visited configurations
//!   decides halting exactly: a repeated configuration of this deterministic
//!   machine proves the program never halts.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rational::{BitString, Rational};

/// Cells hold values in `[0, 256)`; `OUT` emits the cell value mod 10 as a
/// decimal digit.
pub const CELL_MODULUS: u16 = 256;

/// Default circular-tape width for the exact oracle.
pub const DEFAULT_BOUNDED_WIDTH: usize = 16;

/// The eight tokens, each encoded as a distinct fixed-width 3-bit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[repr(u8)]
pub enum Token {
    End = 0,
    Out = 1,
    Inc = 2,
    Dec = 3,
    Right = 4,
    Left = 5,
    LoopOpen = 6,
    LoopClose = 7,
}

impl Token {
    pub const ALL: [Token; 8] = [
        Token::End,
        Token::Out,
        Token::Inc,
        Token::Dec,
        Token::Right,
        Token::Left,
        Token::LoopOpen,
        Token::LoopClose,
    ];

    /// Tokens other than `END` and the two loop brackets; they never affect
    /// loop nesting, so any string of them is balanced.
    pub const NEUTRAL: [Token; 5] = [Token::Out, Token::Inc, Token::Dec, Token::Right, Token::Left];

    pub fn code(self) -> u8 {
        self as u8
    }

    pub fn from_code(code: u8) -> Token {
        Token::ALL[(code & 0b111) as usize]
    }

    pub fn mnemonic(self) -> &'static str {
        match self {
            Token::End => "END",
            Token::Out => "OUT",
            Token::Inc => "INC",
            Token::Dec => "DEC",
            Token::Right => "RIGHT",
            Token::Left => "LEFT",
            Token::LoopOpen => "LOOP_OPEN",
            Token::LoopClose => "LOOP_CLOSE",
        }
    }

    pub fn from_mnemonic(s: &str) -> Option<Token> {
        Token::ALL.into_iter().find(|t| t.mnemonic() == s)
    }
}

/// Why a bit string is not a valid program.
///
/// Invalidity is a normal return of [`Program::parse_bits`], not an error:
/// most strings in the raw enumeration are invalid and the diagonal walk
/// consumes them as such.
#[derive(Debug, Error, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum InvalidReason {
    #[error("not-multiple-of-3")]
    #[serde(rename = "not-multiple-of-3")]
    NotMultipleOf3,
    #[error("no-end")]
    #[serde(rename = "no-end")]
    NoEnd,
    #[error("early-end")]
    #[serde(rename = "early-end")]
    EarlyEnd,
    #[error("unbalanced-loop")]
    #[serde(rename = "unbalanced-loop")]
    UnbalancedLoop,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ProgramTextError {
    #[error("unknown token mnemonic {0:?}")]
    UnknownMnemonic(String),
    #[error("{0}")]
    Invalid(#[from] InvalidReason),
}

/// A validated program: nonempty, a single trailing `END`, balanced loops.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Program {
    tokens: Vec<Token>,
}

impl Program {
    /// Decode a bit string into a program, or report why it is invalid.
    pub fn parse_bits(bits: &BitString) -> Result<Program, InvalidReason> {
        if !bits.len().is_multiple_of(3) {
            return Err(InvalidReason::NotMultipleOf3);
        }
        let raw: Vec<bool> = bits.iter().collect();
        let tokens: Vec<Token> = raw
            .chunks(3)
            .map(|c| Token::from_code((c[0] as u8) << 2 | (c[1] as u8) << 1 | c[2] as u8))
            .collect();
        Program::from_tokens(tokens)
    }

    /// Validate a token sequence against the program invariants.
    pub fn from_tokens(tokens: Vec<Token>) -> Result<Program, InvalidReason> {
        let end_pos = tokens.iter().position(|t| *t == Token::End);
        match end_pos {
            None => return Err(InvalidReason::NoEnd),
            Some(p) if p + 1 != tokens.len() => return Err(InvalidReason::EarlyEnd),
            Some(_) => {}
        }
        let mut depth = 0i64;
        for t in &tokens {
            match t {
                Token::LoopOpen => depth += 1,
                Token::LoopClose => {
                    depth -= 1;
                    if depth < 0 {
                        return Err(InvalidReason::UnbalancedLoop);
                    }
                }
                _ => {}
            }
        }
        if depth != 0 {
            return Err(InvalidReason::UnbalancedLoop);
        }
        Ok(Program { tokens })
    }

    /// Parse whitespace-separated mnemonics such as `"INC INC OUT END"`.
    pub fn parse_mnemonics(s: &str) -> Result<Program, ProgramTextError> {
        let tokens = s
            .split_whitespace()
            .map(|w| Token::from_mnemonic(w).ok_or_else(|| ProgramTextError::UnknownMnemonic(w.to_string())))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Program::from_tokens(tokens)?)
    }

    pub fn tokens(&self) -> &[Token] {
        &self.tokens
    }

    pub fn token_count(&self) -> usize {
        self.tokens.len()
    }

    pub fn bit_length(&self) -> u64 {
        3 * self.tokens.len() as u64
    }

    pub fn bits(&self) -> BitString {
        let mut bits = Vec::with_capacity(self.tokens.len() * 3);
        for t in &self.tokens {
            let c = t.code();
            bits.push(c & 0b100 != 0);
            bits.push(c & 0b010 != 0);
            bits.push(c & 0b001 != 0);
        }
        BitString::from_bits(bits)
    }

    /// The program's weight `2^-|p|` in the halting-probability sum.
    pub fn mass(&self) -> Rational {
        Rational::pow2_neg(self.bit_length())
    }

    pub fn mnemonics(&self) -> String {
        self.tokens
            .iter()
            .map(|t| t.mnemonic())
            .collect::<Vec<_>>()
            .join(" ")
    }
}

impl std::fmt::Display for Program {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.mnemonics())
    }
}

/// Tape selection: the unbounded machine is the real one; the bounded
/// circular tape makes the configuration space finite for the exact oracle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "lowercase")]
pub enum TapeMode {
    Unbounded,
    Bounded { width: usize },
}

impl TapeMode {
    pub fn bounded_default() -> TapeMode {
        TapeMode::Bounded {
            width: DEFAULT_BOUNDED_WIDTH,
        }
    }
}

/// Result of executing a program.
///
/// `NeverHalts` is only ever produced by the exact oracle's cycle detection;
/// running out of fuel is never treated as evidence of nonhalting.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum RunOutcome {
    Halted {
        output: String,
        steps: u64,
    },
    OutOfFuel {
        output: String,
        steps: u64,
    },
    NeverHalts {
        output: String,
        steps: u64,
        /// Step at which the repeated configuration was first visited; the
        /// machine is deterministic, so revisiting it proves divergence.
        cycle_step: u64,
    },
}

impl RunOutcome {
    pub fn output(&self) -> &str {
        match self {
            RunOutcome::Halted { output, .. }
            | RunOutcome::OutOfFuel { output, .. }
            | RunOutcome::NeverHalts { output, .. } => output,
        }
    }

    pub fn steps(&self) -> u64 {
        match self {
            RunOutcome::Halted { steps, .. }
            | RunOutcome::OutOfFuel { steps, .. }
            | RunOutcome::NeverHalts { steps, .. } => *steps,
        }
    }

    pub fn is_halted(&self) -> bool {
        matches!(self, RunOutcome::Halted { .. })
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("visited-configuration budget of {budget} exceeded")]
    ConfigBudgetExceeded { budget: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MachineStatus {
    Running,
    Halted,
}

enum Tape {
    Unbounded { cells: HashMap<i64, u8>, head: i64 },
    Bounded { cells: Vec<u8>, head: usize },
}

impl Tape {
    fn new(mode: TapeMode) -> Tape {
        match mode {
            TapeMode::Unbounded => Tape::Unbounded {
                cells: HashMap::new(),
                head: 0,
            },
            TapeMode::Bounded { width } => {
                assert!(width >= 1, "bounded tape needs at least one cell");
                Tape::Bounded {
                    cells: vec![0; width],
                    head: 0,
                }
            }
        }
    }

    fn read(&self) -> u8 {
        match self {
            Tape::Unbounded { cells, head } => cells.get(head).copied().unwrap_or(0),
            Tape::Bounded { cells, head } => cells[*head],
        }
    }

    fn write(&mut self, value: u8) {
        match self {
            Tape::Unbounded { cells, head } => {
                if value == 0 {
                    cells.remove(head);
                } else {
                    cells.insert(*head, value);
                }
            }
            Tape::Bounded { cells, head } => cells[*head] = value,
        }
    }

    fn shift(&mut self, delta: i64) {
        match self {
            Tape::Unbounded { head, .. } => *head += delta,
            Tape::Bounded { cells, head } => {
                let w = cells.len() as i64;
                *head = ((*head as i64 + delta).rem_euclid(w)) as usize;
            }
        }
    }

    fn head_index(&self) -> i64 {
        match self {
            Tape::Unbounded { head, .. } => *head,
            Tape::Bounded { head, .. } => *head as i64,
        }
    }
}

/// A single stepping machine; `run` and the oracles are loops over this.
pub struct Interpreter<'p> {
    program: &'p Program,
    jumps: Vec<usize>,
    tape: Tape,
    pc: usize,
    output: String,
    steps: u64,
    halted: bool,
}

impl<'p> Interpreter<'p> {
    pub fn new(program: &'p Program, mode: TapeMode) -> Interpreter<'p> {
        Interpreter {
            jumps: matching_brackets(program.tokens()),
            program,
            tape: Tape::new(mode),
            pc: 0,
            output: String::new(),
            steps: 0,
            halted: false,
        }
    }

    /// Execute one token; each executed token (jumps and `END` included)
    /// costs exactly one step.
    pub fn step(&mut self) -> MachineStatus {
        if self.halted {
            return MachineStatus::Halted;
        }
        let token = self.program.tokens()[self.pc];
        self.steps += 1;
        match token {
            Token::End => {
                self.halted = true;
                return MachineStatus::Halted;
            }
            Token::Out => {
                let digit = self.tape.read() % 10;
                self.output.push(char::from(b'0' + digit));
                self.pc += 1;
            }
            Token::Inc => {
                self.tape.write(self.tape.read().wrapping_add(1));
                self.pc += 1;
            }
            Token::Dec => {
                self.tape.write(self.tape.read().wrapping_sub(1));
                self.pc += 1;
            }
            Token::Right => {
                self.tape.shift(1);
                self.pc += 1;
            }
            Token::Left => {
                self.tape.shift(-1);
                self.pc += 1;
            }
            Token::LoopOpen => {
                if self.tape.read() == 0 {
                    self.pc = self.jumps[self.pc] + 1;
                } else {
                    self.pc += 1;
                }
            }
            Token::LoopClose => {
                if self.tape.read() != 0 {
                    self.pc = self.jumps[self.pc] + 1;
                } else {
                    self.pc += 1;
                }
            }
        }
        MachineStatus::Running
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    pub fn output(&self) -> &str {
        &self.output
    }

    pub fn pc(&self) -> usize {
        self.pc
    }

    pub fn head_index(&self) -> i64 {
        self.tape.head_index()
    }

    pub fn is_halted(&self) -> bool {
        self.halted
    }

    /// Snapshot of (pc, head, tape) — the complete determinism state of a
    /// bounded machine.  Output is excluded: it never feeds back into
    /// control flow.
    fn config_key(&self) -> (usize, usize, Box<[u8]>) {
        match &self.tape {
            Tape::Bounded { cells, head } => (self.pc, *head, cells.clone().into_boxed_slice()),
            Tape::Unbounded { .. } => unreachable!("cycle detection requires a bounded tape"),
        }
    }

    fn into_outcome_halted(self) -> RunOutcome {
        RunOutcome::Halted {
            output: self.output,
            steps: self.steps,
        }
    }
}

fn matching_brackets(tokens: &[Token]) -> Vec<usize> {
    let mut jumps = vec![usize::MAX; tokens.len()];
    let mut stack = Vec::new();
    for (i, t) in tokens.iter().enumerate() {
        match t {
            Token::LoopOpen => stack.push(i),
            Token::LoopClose => {
                let open = stack.pop().expect("program invariant: balanced loops");
                jumps[open] = i;
                jumps[i] = open;
            }
            _ => {}
        }
    }
    jumps
}

/// Run a program with a finite step budget.
///
/// Deterministic, and fuel-monotone: a `Halted` outcome at fuel `F` is
/// reproduced verbatim at any fuel `>= F`.
pub fn run(program: &Program, mode: TapeMode, fuel: u64) -> RunOutcome {
    let mut interp = Interpreter::new(program, mode);
    loop {
        if interp.steps >= fuel {
            return RunOutcome::OutOfFuel {
                output: interp.output,
                steps: interp.steps,
            };
        }
        if let MachineStatus::Halted = interp.step() {
            return interp.into_outcome_halted();
        }
    }
}

/// Exact halting decision on the bounded tape.
///
/// Records every visited configuration; a repeat proves the program never
/// halts, and otherwise the run terminates because the configuration space
/// is finite.  Exceeding `config_budget` recorded configurations is a
/// resource error, never a verdict.
pub fn decide_halting_exact(
    program: &Program,
    width: usize,
    config_budget: usize,
) -> Result<RunOutcome, OracleError> {
    let mut interp = Interpreter::new(program, TapeMode::Bounded { width });
    let mut visited: HashMap<(usize, usize, Box<[u8]>), u64> = HashMap::new();
    loop {
        if let Some(first) = visited.insert(interp.config_key(), interp.steps) {
            return Ok(RunOutcome::NeverHalts {
                output: interp.output,
                steps: interp.steps,
                cycle_step: first,
            });
        }
        if visited.len() > config_budget {
            return Err(OracleError::ConfigBudgetExceeded { budget: config_budget });
        }
        if let MachineStatus::Halted = interp.step() {
            return Ok(interp.into_outcome_halted());
        }
    }
}

/// Bounded-tape run with both a fuel cap and opportunistic cycle detection.
///
/// Used by the dovetailer: a cycle found within fuel yields a sound
/// `NeverHalts`; if the visited set would outgrow `config_budget`, recording
/// stops and the run degrades to a plain fuel-limited run (so the verdict
/// can only weaken to `OutOfFuel`, never turn unsound).
pub fn run_bounded_detecting(
    program: &Program,
    width: usize,
    fuel: u64,
    config_budget: usize,
) -> RunOutcome {
    let mut interp = Interpreter::new(program, TapeMode::Bounded { width });
    let mut visited: HashMap<(usize, usize, Box<[u8]>), u64> = HashMap::new();
    let mut recording = true;
    loop {
        if interp.steps >= fuel {
            return RunOutcome::OutOfFuel {
                output: interp.output,
                steps: interp.steps,
            };
        }
        if recording {
            if let Some(first) = visited.insert(interp.config_key(), interp.steps) {
                return RunOutcome::NeverHalts {
                    output: interp.output,
                    steps: interp.steps,
                    cycle_step: first,
                };
            }
            if visited.len() >= config_budget {
                recording = false;
            }
        }
        if let MachineStatus::Halted = interp.step() {
            return interp.into_outcome_halted();
        }
    }
}

/// The k-th output digit (1-based) of a bounded-tape program, or `None` if
/// the program provably never emits one.
///
/// Decidable for every `k`: a halting run has a finite output, and a cycling
/// run either stops emitting (the cycle writes nothing) or emits
/// periodically forever, in which case stepping on eventually reaches the
/// k-th digit.
pub fn bounded_digit_at(
    program: &Program,
    width: usize,
    k: u64,
    config_budget: usize,
) -> Result<Option<u8>, OracleError> {
    assert!(k >= 1, "digit positions are 1-based");
    let mut interp = Interpreter::new(program, TapeMode::Bounded { width });
    let mut visited: HashMap<(usize, usize, Box<[u8]>), usize> = HashMap::new();
    let mut cycle_emits = false;
    loop {
        if interp.output.len() as u64 >= k {
            let digit = interp.output.as_bytes()[(k - 1) as usize] - b'0';
            return Ok(Some(digit));
        }
        if !cycle_emits {
            if let Some(first_len) = visited.insert(interp.config_key(), interp.output.len()) {
                if interp.output.len() == first_len {
                    // The cycle emits nothing: output is frozen short of k.
                    return Ok(None);
                }
                cycle_emits = true;
                visited.clear();
            }
            if visited.len() > config_budget {
                return Err(OracleError::ConfigBudgetExceeded { budget: config_budget });
            }
        }
        if let MachineStatus::Halted = interp.step() {
            return Ok(if interp.output.len() as u64 >= k {
                Some(interp.output.as_bytes()[(k - 1) as usize] - b'0')
            } else {
                None
            });
        }
    }
}
