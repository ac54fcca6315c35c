//! Deterministic fair interleaving of all enumerated programs.
//!
//! Stage `s` runs every valid program of at most `min(s, max_tokens)` tokens
//! from scratch with fuel `4^s`.  Stateless reruns keep checkpoints tiny and
//! make determinism trivial: the event sequence depends only on the
//! configuration, never on worker count or interruption points.
//!
//! Newly halted programs contribute their exact mass `2^-|p|` to the
//! discovered halting mass, which is a monotone lower bound on the halting
//! probability.  With a bounded tape configured, cycle detection also
//! classifies programs as never halting; with the unbounded tape a program
//! stays undecided until it halts.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::enumeration::{total_mass_through, valid_programs_up_to};
use crate::machine::{run, run_bounded_detecting, Program, RunOutcome, TapeMode};
use crate::rational::Rational;

/// Hard cap on stage numbers so the fuel schedule `4^s` stays within `u64`.
pub const MAX_STAGE_CAP: u32 = 31;

/// Default cap on recorded configurations per bounded run.
pub const DEFAULT_CONFIG_BUDGET: usize = 1 << 20;

/// Fuel granted to every run during stage `s`.
pub fn stage_fuel(stage: u32) -> u64 {
    4u64.pow(stage)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DovetailConfig {
    /// Enumeration cutoff: programs of more tokens are never scheduled.
    pub max_tokens: u32,
    pub max_stage: u32,
    pub tape: TapeMode,
    /// Optional wall on the total steps executed across the whole session.
    pub step_budget: Option<u64>,
    /// Per-run visited-configuration cap for bounded-tape cycle detection.
    pub config_budget: usize,
}

impl DovetailConfig {
    pub fn new(max_tokens: u32, tape: TapeMode) -> DovetailConfig {
        DovetailConfig {
            max_tokens,
            max_stage: MAX_STAGE_CAP,
            tape,
            step_budget: None,
            config_budget: DEFAULT_CONFIG_BUDGET,
        }
    }

    fn validate(&self) -> Result<(), DovetailError> {
        if self.max_tokens < 1 {
            return Err(DovetailError::InvalidConfig("max_tokens must be at least 1".into()));
        }
        if self.max_stage < 1 || self.max_stage > MAX_STAGE_CAP {
            return Err(DovetailError::InvalidConfig(format!(
                "max_stage must be in 1..={MAX_STAGE_CAP}"
            )));
        }
        if let TapeMode::Bounded { width } = self.tape {
            if width < 1 {
                return Err(DovetailError::InvalidConfig("tape width must be at least 1".into()));
            }
        }
        Ok(())
    }
}

/// A program observed to halt, with everything needed to replay the run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HaltingEvent {
    /// 1-based index in the valid-program enumeration.
    pub index: u64,
    pub program: Program,
    pub steps: u64,
    pub output: String,
    pub stage_detected: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProgramStatus {
    Halted { steps: u64 },
    NeverHalts { cycle_step: u64 },
}

#[derive(Debug, Error)]
pub enum DovetailError {
    #[error("invalid dovetail configuration: {0}")]
    InvalidConfig(String),
    #[error("stage {requested} exceeds the configured maximum {max_stage}")]
    StageCapExceeded { requested: u32, max_stage: u32 },
    #[error("step budget exceeded: {used} used, stage needs {needed} more, budget {budget}")]
    StepBudgetExceeded { used: u64, needed: u64, budget: u64 },
    #[error("failed to build worker pool: {0}")]
    ThreadPool(String),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CheckpointError {
    #[error("unsupported checkpoint version {found} (expected {expected})")]
    VersionMismatch { found: u32, expected: u32 },
    #[error("corrupted checkpoint: {0}")]
    Corrupted(String),
}

pub const CHECKPOINT_VERSION: u32 = 1;

/// Serialized session snapshot; `statuses` entries are
/// `[index, "halted", steps]` or `[index, "never-halts", cycle_step]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckpointDocument {
    pub version: u32,
    pub config: DovetailConfig,
    pub stage: u32,
    pub statuses: Vec<(u64, String, u64)>,
    pub mass: Rational,
    pub steps_used: u64,
    pub checksum: String,
}

impl CheckpointDocument {
    /// Canonical byte form of everything but the checksum itself.
    fn canonical_body(&self) -> String {
        serde_json::to_string(&(
            self.version,
            &self.config,
            self.stage,
            &self.statuses,
            &self.mass,
            self.steps_used,
        ))
        .expect("checkpoint body serializes")
    }

    fn compute_checksum(&self) -> String {
        let digest = Sha256::digest(self.canonical_body().as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("checkpoint document serializes")
    }

    pub fn from_json(text: &str) -> Result<CheckpointDocument, CheckpointError> {
        serde_json::from_str(text).map_err(|e| CheckpointError::Corrupted(e.to_string()))
    }
}

/// A resumable dovetailing session over the valid-program enumeration.
#[derive(Debug)]
pub struct SessionState {
    config: DovetailConfig,
    stage: u32,
    statuses: BTreeMap<u64, ProgramStatus>,
    halted_mass: Rational,
    never_halts_mass: Rational,
    steps_used: u64,
    /// Valid programs of `<= min(stage, max_tokens)` tokens, grown as stages
    /// advance; derived state, never serialized.
    enumerated: Vec<(u64, Program)>,
    enumerated_through: u32,
}

impl SessionState {
    pub fn new(config: DovetailConfig) -> Result<SessionState, DovetailError> {
        config.validate()?;
        Ok(SessionState {
            config,
            stage: 0,
            statuses: BTreeMap::new(),
            halted_mass: Rational::zero(),
            never_halts_mass: Rational::zero(),
            steps_used: 0,
            enumerated: Vec::new(),
            enumerated_through: 0,
        })
    }

    pub fn config(&self) -> &DovetailConfig {
        &self.config
    }

    pub fn stage(&self) -> u32 {
        self.stage
    }

    /// Token cutoff actually enumerated so far: `min(stage, max_tokens)`.
    pub fn effective_cutoff(&self) -> u32 {
        self.stage.min(self.config.max_tokens)
    }

    /// Exact mass of programs observed to halt (the lower bound).
    pub fn halted_mass(&self) -> &Rational {
        &self.halted_mass
    }

    pub fn never_halts_mass(&self) -> &Rational {
        &self.never_halts_mass
    }

    pub fn steps_used(&self) -> u64 {
        self.steps_used
    }

    pub fn statuses(&self) -> &BTreeMap<u64, ProgramStatus> {
        &self.statuses
    }

    /// Exact mass of enumerated programs that are still undecided.
    pub fn undecided_enumerated_mass(&self) -> Rational {
        total_mass_through(self.effective_cutoff())
            .checked_sub(&self.halted_mass)
            .and_then(|m| m.checked_sub(&self.never_halts_mass))
            .expect("decided mass never exceeds enumerated mass")
    }

    fn ensure_enumerated(&mut self, through: u32) {
        if through > self.enumerated_through {
            self.enumerated = valid_programs_up_to(through);
            self.enumerated_through = through;
        }
    }

    /// Advance the session by `stages` stages, returning the halting events
    /// in deterministic order (by stage, then by program index).
    ///
    /// `jobs` controls worker parallelism within a stage and never affects
    /// the result.
    pub fn advance(&mut self, stages: u32, jobs: usize) -> Result<Vec<HaltingEvent>, DovetailError> {
        let target = self.stage + stages;
        if target > self.config.max_stage {
            return Err(DovetailError::StageCapExceeded {
                requested: target,
                max_stage: self.config.max_stage,
            });
        }
        let pool = build_pool(jobs)?;
        let mut events = Vec::new();
        for stage in self.stage + 1..=target {
            self.run_stage(stage, pool.as_ref(), &mut events)?;
        }
        Ok(events)
    }

    fn run_stage(
        &mut self,
        stage: u32,
        pool: Option<&rayon::ThreadPool>,
        events: &mut Vec<HaltingEvent>,
    ) -> Result<(), DovetailError> {
        self.ensure_enumerated(stage.min(self.config.max_tokens));
        let fuel = stage_fuel(stage);
        let config = self.config.clone();
        let undecided: Vec<(u64, Program)> = self
            .enumerated
            .iter()
            .filter(|(index, _)| !self.statuses.contains_key(index))
            .cloned()
            .collect();

        let run_one = |(index, program): &(u64, Program)| -> (u64, RunOutcome) {
            let outcome = match config.tape {
                TapeMode::Unbounded => run(program, TapeMode::Unbounded, fuel),
                TapeMode::Bounded { width } => {
                    run_bounded_detecting(program, width, fuel, config.config_budget)
                }
            };
            (*index, outcome)
        };

        // Parallel map preserves input order, so results stay sorted by
        // program index no matter how many workers run.
        let results: Vec<(u64, RunOutcome)> = match pool {
            Some(pool) => pool.install(|| undecided.par_iter().map(run_one).collect()),
            None => undecided.iter().map(run_one).collect(),
        };

        let stage_steps: u64 = results.iter().map(|(_, o)| o.steps()).sum();
        if let Some(budget) = self.config.step_budget {
            if self.steps_used + stage_steps > budget {
                return Err(DovetailError::StepBudgetExceeded {
                    used: self.steps_used,
                    needed: stage_steps,
                    budget,
                });
            }
        }
        self.steps_used += stage_steps;

        let by_index: BTreeMap<u64, Program> = undecided.into_iter().collect();
        for (index, outcome) in results {
            match outcome {
                RunOutcome::Halted { output, steps } => {
                    let program = by_index[&index].clone();
                    self.halted_mass += &program.mass();
                    self.statuses.insert(index, ProgramStatus::Halted { steps });
                    events.push(HaltingEvent {
                        index,
                        program,
                        steps,
                        output,
                        stage_detected: stage,
                    });
                }
                RunOutcome::NeverHalts { cycle_step, .. } => {
                    self.never_halts_mass += &by_index[&index].mass();
                    self.statuses.insert(index, ProgramStatus::NeverHalts { cycle_step });
                }
                RunOutcome::OutOfFuel { .. } => {}
            }
        }
        self.stage = stage;
        Ok(())
    }

    pub fn checkpoint(&self) -> CheckpointDocument {
        let statuses = self
            .statuses
            .iter()
            .map(|(index, status)| match status {
                ProgramStatus::Halted { steps } => (*index, "halted".to_string(), *steps),
                ProgramStatus::NeverHalts { cycle_step } => {
                    (*index, "never-halts".to_string(), *cycle_step)
                }
            })
            .collect();
        let mut doc = CheckpointDocument {
            version: CHECKPOINT_VERSION,
            config: self.config.clone(),
            stage: self.stage,
            statuses,
            mass: self.halted_mass.clone(),
            steps_used: self.steps_used,
            checksum: String::new(),
        };
        doc.checksum = doc.compute_checksum();
        doc
    }

    /// Rebuild a session from a checkpoint, verifying the checksum and the
    /// stored mass against the enumeration.
    pub fn restore(doc: &CheckpointDocument) -> Result<SessionState, CheckpointError> {
        if doc.version != CHECKPOINT_VERSION {
            return Err(CheckpointError::VersionMismatch {
                found: doc.version,
                expected: CHECKPOINT_VERSION,
            });
        }
        if doc.checksum != doc.compute_checksum() {
            return Err(CheckpointError::Corrupted("checksum mismatch".into()));
        }
        doc.config
            .validate()
            .map_err(|e| CheckpointError::Corrupted(e.to_string()))?;
        if doc.stage > doc.config.max_stage {
            return Err(CheckpointError::Corrupted("stage exceeds max_stage".into()));
        }

        let mut session = SessionState::new(doc.config.clone())
            .map_err(|e| CheckpointError::Corrupted(e.to_string()))?;
        session.stage = doc.stage;
        session.steps_used = doc.steps_used;
        session.ensure_enumerated(doc.stage.min(doc.config.max_tokens));
        let masses: BTreeMap<u64, Rational> = session
            .enumerated
            .iter()
            .map(|(index, p)| (*index, p.mass()))
            .collect();

        for (index, kind, value) in &doc.statuses {
            let mass = masses
                .get(index)
                .ok_or_else(|| CheckpointError::Corrupted(format!("unknown program index {index}")))?;
            let status = match kind.as_str() {
                "halted" => {
                    session.halted_mass += mass;
                    ProgramStatus::Halted { steps: *value }
                }
                "never-halts" => {
                    session.never_halts_mass += mass;
                    ProgramStatus::NeverHalts { cycle_step: *value }
                }
                other => {
                    return Err(CheckpointError::Corrupted(format!("unknown status {other:?}")))
                }
            };
            if session.statuses.insert(*index, status).is_some() {
                return Err(CheckpointError::Corrupted(format!("duplicate index {index}")));
            }
        }
        if session.halted_mass != doc.mass {
            return Err(CheckpointError::Corrupted(
                "stored mass disagrees with statuses".into(),
            ));
        }
        Ok(session)
    }
}

fn build_pool(jobs: usize) -> Result<Option<rayon::ThreadPool>, DovetailError> {
    if jobs <= 1 {
        return Ok(None);
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map(Some)
        .map_err(|e| DovetailError::ThreadPool(e.to_string()))
}
