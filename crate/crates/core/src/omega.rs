//! Exact sandwich bounds on the halting probability, certified leading bits,
//! and the two halting-decision procedures: decoding from an omega prefix
//! and scanning a sound theorem stream.
//!
//! The bounds are a three-part sum: the mass of programs observed to halt
//! (the exact lower bound), the mass of enumerated programs still undecided,
//! and the proven geometric tail bound for everything beyond the enumeration
//! cutoff.  A leading bit is certified exactly when the whole sandwich fits
//! inside one dyadic bin; binning is inclusive below and exclusive above so
//! a dyadic omega sitting on a bin boundary never mis-certifies.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dovetail::{stage_fuel, SessionState};
use crate::enumeration::{index_of_bitstring, programs_of_token_length, tail_mass_bound};
use crate::machine::{decide_halting_exact, run, OracleError, Program, RunOutcome, TapeMode};
use crate::rational::{BitString, Rational};

/// Default stage cap for the prefix decoder's internal dovetailing.
pub const DEFAULT_DECODE_MAX_STAGE: u32 = 12;

/// An exact lower/upper sandwich on the halting probability together with
/// the bit prefix the sandwich certifies.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OmegaBounds {
    pub lower: Rational,
    /// Mass of enumerated programs that are neither halted nor refuted.
    pub undecided: Rational,
    pub tail_bound: Rational,
    pub upper: Rational,
    pub certified_bits: BitString,
    pub max_tokens: u32,
    pub stage: u32,
}

impl OmegaBounds {
    /// Assemble bounds from the three mass components and certify the
    /// longest dyadic prefix containing `[lower, upper]`.
    ///
    /// `bit_cap` limits certification depth; it is required when the
    /// sandwich can collapse to a point (fully decided finite universes),
    /// where every depth certifies.
    pub fn from_parts(
        lower: Rational,
        undecided: Rational,
        tail_bound: Rational,
        max_tokens: u32,
        stage: u32,
        bit_cap: Option<u64>,
    ) -> OmegaBounds {
        let upper = (&(&lower + &undecided) + &tail_bound).min(Rational::one());
        assert!(
            upper > lower || bit_cap.is_some(),
            "a point sandwich certifies unboundedly many bits; supply a bit cap"
        );
        let mut certified_bits = BitString::empty();
        let mut depth = 0u64;
        loop {
            depth += 1;
            if bit_cap.is_some_and(|cap| depth > cap) {
                break;
            }
            // The depth-k bin holding `lower` is spanned by lower's first k
            // bits; nested bins mean the first failure is final.
            let candidate = lower
                .first_bits(depth)
                .expect("lower bound below 1 by the Kraft inequality");
            let bin_lo = candidate.dyadic_value();
            let bin_hi = &bin_lo + &Rational::pow2_neg(depth);
            if bin_lo <= lower && upper < bin_hi {
                certified_bits = candidate;
            } else {
                break;
            }
        }
        OmegaBounds {
            lower,
            undecided,
            tail_bound,
            upper,
            certified_bits,
            max_tokens,
            stage,
        }
    }
}

/// Bounds read off a dovetailing session: lower is the discovered mass,
/// undecided covers the enumerated-but-unresolved programs, and the
/// geometric tail bound covers everything past the effective cutoff.
pub fn omega_bounds(session: &SessionState) -> OmegaBounds {
    OmegaBounds::from_parts(
        session.halted_mass().clone(),
        session.undecided_enumerated_mass(),
        tail_mass_bound(session.effective_cutoff()),
        session.config().max_tokens,
        session.stage(),
        None,
    )
}

/// A claimed prefix of some omega: `dyadic_value(bits) <= omega <
/// dyadic_value(bits) + 2^-n` for `n = bits.len()`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OmegaPrefix {
    bits: BitString,
}

impl OmegaPrefix {
    pub fn new(bits: BitString) -> Result<OmegaPrefix, DecodeError> {
        if bits.is_empty() {
            return Err(DecodeError::EmptyPrefix);
        }
        Ok(OmegaPrefix { bits })
    }

    pub fn bits(&self) -> &BitString {
        &self.bits
    }

    pub fn len(&self) -> u64 {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        false // construction rejects empty prefixes
    }
}

/// One member of a finite mock universe: a program with brute-force-known
/// halting behavior.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UniverseMember {
    pub program: Program,
    pub halts: bool,
    pub output: String,
}

/// A finite, prefix-free stand-in for the whole program space, with exact
/// ground truth, so the omega machinery can be verified end to end.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Universe {
    members: Vec<UniverseMember>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum UniverseError {
    #[error("duplicate program {0:?}")]
    Duplicate(String),
    #[error("programs {0:?} and {1:?} violate prefix-freeness")]
    NotPrefixFree(String, String),
    #[error("member {index}: invalid program: {reason}")]
    InvalidProgram {
        index: usize,
        reason: crate::machine::InvalidReason,
    },
    #[error("unsupported universe version {found} (expected 1)")]
    VersionMismatch { found: u32 },
    #[error("malformed universe document: {0}")]
    Malformed(String),
    #[error("oracle failed while building ground truth: {0}")]
    Oracle(#[from] OracleError),
}

impl Universe {
    pub fn new(members: Vec<UniverseMember>) -> Result<Universe, UniverseError> {
        for (i, a) in members.iter().enumerate() {
            for b in &members[i + 1..] {
                let (pa, pb) = (a.program.bits(), b.program.bits());
                if pa == pb {
                    return Err(UniverseError::Duplicate(pa.to_string()));
                }
                if pa.is_prefix_of(&pb) || pb.is_prefix_of(&pa) {
                    return Err(UniverseError::NotPrefixFree(pa.to_string(), pb.to_string()));
                }
            }
        }
        Ok(Universe { members })
    }

    /// Ground truth from the exact bounded-tape oracle.
    pub fn from_oracle(
        programs: Vec<Program>,
        width: usize,
        config_budget: usize,
    ) -> Result<Universe, UniverseError> {
        let mut members = Vec::with_capacity(programs.len());
        for program in programs {
            let member = match decide_halting_exact(&program, width, config_budget)? {
                RunOutcome::Halted { output, .. } => UniverseMember {
                    program,
                    halts: true,
                    output,
                },
                RunOutcome::NeverHalts { .. } => UniverseMember {
                    program,
                    halts: false,
                    output: String::new(),
                },
                RunOutcome::OutOfFuel { .. } => unreachable!("the exact oracle has no fuel limit"),
            };
            members.push(member);
        }
        Universe::new(members)
    }

    pub fn members(&self) -> &[UniverseMember] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// The universe's exact omega: total mass of its halting members.
    pub fn exact_omega(&self) -> Rational {
        let mut total = Rational::zero();
        for m in &self.members {
            if m.halts {
                total += &m.program.mass();
            }
        }
        total
    }

    pub fn max_token_count(&self) -> u32 {
        self.members
            .iter()
            .map(|m| m.program.token_count() as u32)
            .max()
            .unwrap_or(0)
    }

    /// Member positions in canonical enumeration order (size, then bits).
    fn canonical_order(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.members.len()).collect();
        order.sort_by_key(|&i| index_of_bitstring(&self.members[i].program.bits()));
        order
    }

    pub fn to_document(&self) -> UniverseDocument {
        UniverseDocument {
            version: 1,
            programs: self
                .members
                .iter()
                .map(|m| UniverseRecord {
                    bits: m.program.bits(),
                    halts: m.halts,
                    output: m.output.clone(),
                })
                .collect(),
        }
    }
}

/// Wire form of a universe: `{"version":1,"programs":[{bits,halts,output}]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct UniverseDocument {
    pub version: u32,
    pub programs: Vec<UniverseRecord>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct UniverseRecord {
    pub bits: BitString,
    pub halts: bool,
    pub output: String,
}

impl UniverseDocument {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("universe document serializes")
    }

    pub fn from_json(text: &str) -> Result<UniverseDocument, UniverseError> {
        serde_json::from_str(text).map_err(|e| UniverseError::Malformed(e.to_string()))
    }

    pub fn into_universe(self) -> Result<Universe, UniverseError> {
        if self.version != 1 {
            return Err(UniverseError::VersionMismatch { found: self.version });
        }
        let members = self
            .programs
            .into_iter()
            .enumerate()
            .map(|(index, rec)| {
                Program::parse_bits(&rec.bits)
                    .map(|program| UniverseMember {
                        program,
                        halts: rec.halts,
                        output: rec.output,
                    })
                    .map_err(|reason| UniverseError::InvalidProgram { index, reason })
            })
            .collect::<Result<Vec<_>, _>>()?;
        Universe::new(members)
    }
}

/// Staged bounds over a universe treated as the full enumeration
/// (`tail_bound = 0`): members are dovetailed with the standard fuel
/// schedule and whatever has not halted by `stage` counts as undecided.
///
/// Purely fuel-driven — ground-truth flags are never consulted — so the
/// sandwich property `lower <= exact omega <= upper` is a real check.
pub fn universe_bounds_at_stage(universe: &Universe, stage: u32, bit_cap: u64) -> OmegaBounds {
    let mut lower = Rational::zero();
    let mut undecided = Rational::zero();
    for member in universe.members() {
        let halted = stage > 0
            && run(&member.program, TapeMode::Unbounded, stage_fuel(stage)).is_halted();
        if halted {
            lower += &member.program.mass();
        } else {
            undecided += &member.program.mass();
        }
    }
    OmegaBounds::from_parts(
        lower,
        undecided,
        Rational::zero(),
        universe.max_token_count(),
        stage,
        Some(bit_cap),
    )
}

/// Collapsed bounds for a fully decided universe: the sandwich is the exact
/// omega itself and the certified prefix is its expansion to `precision_bits`.
pub fn universe_exact_bounds(universe: &Universe, precision_bits: u64) -> OmegaBounds {
    OmegaBounds::from_parts(
        universe.exact_omega(),
        Rational::zero(),
        Rational::zero(),
        universe.max_token_count(),
        0,
        Some(precision_bits),
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DecodeOutcome {
    Halts,
    NeverHalts,
    /// The query is longer than the prefix, which only answers halting for
    /// programs of at most `n` bits.
    PrefixInsufficient,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DecodeError {
    #[error("omega prefixes must contain at least one bit")]
    EmptyPrefix,
    #[error("query program is not a member of the universe")]
    QueryNotInUniverse,
    #[error("inconsistent universe: accumulated mass {mass} reaches {bound}, refuting the prefix claim")]
    InconsistentUniverse { mass: Rational, bound: Rational },
    #[error("decode stage budget of {max_stage} exhausted before the prefix value was reached")]
    StageBudgetExhausted { max_stage: u32 },
}

/// Decide whether `query` halts using only an omega prefix and fuel runs.
///
/// Universe members are dovetailed while the discovered mass `L` grows; once
/// `L` reaches the prefix value, every still-unhalted member can be declared
/// never-halting: a later halt of a program of at most `n` bits would add at
/// least `2^-n` and push omega past the prefix's upper claim.  Ground-truth
/// flags are never consulted.
pub fn decode_halting_with_prefix(
    prefix: &OmegaPrefix,
    universe: &Universe,
    query: &Program,
    max_stage: u32,
) -> Result<DecodeOutcome, DecodeError> {
    let query_pos = universe
        .members()
        .iter()
        .position(|m| &m.program == query)
        .ok_or(DecodeError::QueryNotInUniverse)?;
    let n = prefix.len();
    if query.bit_length() > n {
        return Ok(DecodeOutcome::PrefixInsufficient);
    }

    let target = prefix.bits().dyadic_value();
    let refutation = &target + &Rational::pow2_neg(n);
    let order = universe.canonical_order();
    let mut halted = vec![false; universe.len()];
    let mut mass = Rational::zero();

    let verdict = |halted: &[bool]| {
        if halted[query_pos] {
            DecodeOutcome::Halts
        } else {
            DecodeOutcome::NeverHalts
        }
    };

    if mass >= target {
        return Ok(verdict(&halted));
    }
    for stage in 1..=max_stage {
        let fuel = stage_fuel(stage);
        for &i in &order {
            if halted[i] {
                continue;
            }
            if run(&universe.members()[i].program, TapeMode::Unbounded, fuel).is_halted() {
                halted[i] = true;
                mass += &universe.members()[i].program.mass();
                if mass >= refutation {
                    return Err(DecodeError::InconsistentUniverse {
                        mass,
                        bound: refutation,
                    });
                }
                if mass >= target {
                    return Ok(verdict(&halted));
                }
            }
        }
    }
    Err(DecodeError::StageBudgetExhausted { max_stage })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Halts,
    NeverHalts,
}

/// One statement of a sound halting theory: a program plus its verdict.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TheoremStatement {
    pub program: Program,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StreamDecision {
    Decided(Verdict),
    /// The stream never mentioned the query within the statement budget.
    BudgetExhausted,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StreamError {
    #[error("theorem stream asserts both verdicts for program {0:?}")]
    Contradiction(String),
}

/// Scan a theorem stream in order and return the first verdict about
/// `query`, examining at most `budget` statements.  A statement that
/// contradicts an earlier one about any program is an error.
pub fn decide_via_theorem_stream<I>(
    stream: I,
    query: &Program,
    budget: u64,
) -> Result<StreamDecision, StreamError>
where
    I: IntoIterator<Item = TheoremStatement>,
{
    let mut seen: BTreeMap<String, Verdict> = BTreeMap::new();
    for statement in stream.into_iter().take(budget as usize) {
        let key = statement.program.bits().to_string();
        match seen.insert(key.clone(), statement.verdict) {
            Some(previous) if previous != statement.verdict => {
                return Err(StreamError::Contradiction(key));
            }
            _ => {}
        }
        if &statement.program == query {
            return Ok(StreamDecision::Decided(statement.verdict));
        }
    }
    Ok(StreamDecision::BudgetExhausted)
}

/// The sound theorem stream generated from the exact oracle, enumerating
/// verdicts for all valid programs of at most `max_tokens` tokens in
/// canonical order.
pub fn oracle_theorem_stream(
    max_tokens: u32,
    width: usize,
    config_budget: usize,
) -> impl Iterator<Item = Result<TheoremStatement, OracleError>> {
    (1..=max_tokens)
        .flat_map(programs_of_token_length)
        .map(move |program| {
            let verdict = match decide_halting_exact(&program, width, config_budget)? {
                RunOutcome::Halted { .. } => Verdict::Halts,
                RunOutcome::NeverHalts { .. } => Verdict::NeverHalts,
                RunOutcome::OutOfFuel { .. } => unreachable!("the exact oracle has no fuel limit"),
            };
            Ok(TheoremStatement { program, verdict })
        })
}
