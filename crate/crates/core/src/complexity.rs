//! Program-size upper bounds for digit strings.
//!
//! The size of the smallest program producing a string is approximable only
//! from above, so everything here reports upper bounds: an exhaustive search
//! through the canonical enumeration finds the true minimum within its
//! horizon, and a constructive straight-line program caps the bound when the
//! search comes up empty.  Lower bounds are never claimed.

use rayon::prelude::*;
use thiserror::Error;

use crate::enumeration::programs_of_token_length;
use crate::machine::{run, Program, RunOutcome, TapeMode, Token};
use crate::rational::BitString;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ComplexityError {
    #[error("target contains a non-decimal character {0:?}")]
    BadDigit(char),
    #[error("failed to build worker pool: {0}")]
    ThreadPool(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SearchMethod {
    /// The witness is canonically first among all programs of minimal size
    /// producing the target, and no shorter valid program does.
    ExhaustiveMinimal,
    /// The straight-line literal program; an upper bound only.
    ConstructiveLiteral,
}

/// An upper bound on the program-size complexity of a digit string, with a
/// runnable witness.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComplexityEstimate {
    pub target: String,
    pub bound_bits: u64,
    pub witness: Program,
    pub method: SearchMethod,
    /// Token length through which the exhaustive search ran.
    pub search_exhausted_through: u32,
}

/// The straight-line program printing `target`: for each digit, enough `INC`
/// tokens to move the current cell to it, then `OUT`; a single trailing
/// `END`.
///
/// The increment count per digit is the least that works, which is
/// `(digit - cell) mod 10` until the cell value crosses the 256 wrap
/// (only possible for targets of 29 or more digits).
pub fn literal_program(target: &str) -> Result<Program, ComplexityError> {
    let digits = validate_digits(target)?;
    let mut tokens = Vec::new();
    let mut cell: u8 = 0;
    for d in digits {
        while cell % 10 != d {
            cell = cell.wrapping_add(1);
            tokens.push(Token::Inc);
        }
        tokens.push(Token::Out);
    }
    tokens.push(Token::End);
    Ok(Program::from_tokens(tokens).expect("straight-line programs are valid"))
}

/// Upper-bound the complexity of `target` by searching all valid programs of
/// at most `max_tokens` tokens in canonical order.
///
/// The first program that halts within `fuel` with output equal to `target`
/// is the witness; ties in size resolve by canonical order, and worker count
/// never changes the winner.  When the search horizon holds no witness the
/// literal program is returned instead.
pub fn h_upper(
    target: &str,
    max_tokens: u32,
    fuel: u64,
    jobs: usize,
) -> Result<ComplexityEstimate, ComplexityError> {
    validate_digits(target)?;
    let pool = build_pool(jobs)?;
    let produces_target = |p: &Program| {
        matches!(run(p, TapeMode::Unbounded, fuel),
                 RunOutcome::Halted { output, .. } if output == target)
    };
    for token_length in 1..=max_tokens {
        let programs = programs_of_token_length(token_length);
        // find_first returns the leftmost match of the ordered slice, so the
        // witness is the globally canonical-first one under any worker count.
        let witness = match &pool {
            Some(pool) => {
                pool.install(|| programs.par_iter().find_first(|p| produces_target(p)).cloned())
            }
            None => programs.iter().find(|p| produces_target(p)).cloned(),
        };
        if let Some(witness) = witness {
            return Ok(ComplexityEstimate {
                target: target.to_string(),
                bound_bits: witness.bit_length(),
                witness,
                method: SearchMethod::ExhaustiveMinimal,
                search_exhausted_through: token_length,
            });
        }
    }
    let witness = literal_program(target)?;
    Ok(ComplexityEstimate {
        target: target.to_string(),
        bound_bits: witness.bit_length(),
        witness,
        method: SearchMethod::ConstructiveLiteral,
        search_exhausted_through: max_tokens,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Assessment {
    /// No program shorter than the literal encoding was found within the
    /// horizon.  Consistency, not proof: the horizon is finite.
    ConsistentWithIncompressibility,
    /// The search found a witness strictly shorter than the literal
    /// encoding, so the string is compressible.
    CompressibleWithinHorizon,
}

/// Probe report for a 0/1 string (an omega-prefix written out as digits).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IncompressibilityReport {
    pub target_bits: BitString,
    /// Size of the constructive literal program for the string.
    pub literal_bits: u64,
    /// Best exhaustive bound found within the horizon, if any.
    pub shortest_found_bits: Option<u64>,
    pub witness: Option<Program>,
    pub exhausted_through: u32,
    pub assessment: Assessment,
}

/// Search for programs shorter than a bit string's literal encoding.
///
/// Finding none within the horizon is reported as consistency with
/// incompressibility, never as proof.
pub fn incompressibility_probe(
    bits: &BitString,
    max_tokens: u32,
    fuel: u64,
    jobs: usize,
) -> Result<IncompressibilityReport, ComplexityError> {
    let target = bits.to_string();
    let literal_bits = literal_program(&target)?.bit_length();
    let estimate = h_upper(&target, max_tokens, fuel, jobs)?;
    let (shortest_found_bits, witness) = match estimate.method {
        SearchMethod::ExhaustiveMinimal => (Some(estimate.bound_bits), Some(estimate.witness)),
        SearchMethod::ConstructiveLiteral => (None, None),
    };
    let assessment = match shortest_found_bits {
        Some(found) if found < literal_bits => Assessment::CompressibleWithinHorizon,
        _ => Assessment::ConsistentWithIncompressibility,
    };
    Ok(IncompressibilityReport {
        target_bits: bits.clone(),
        literal_bits,
        shortest_found_bits,
        witness,
        exhausted_through: max_tokens,
        assessment,
    })
}

fn validate_digits(target: &str) -> Result<Vec<u8>, ComplexityError> {
    target
        .chars()
        .map(|c| c.to_digit(10).map(|d| d as u8).ok_or(ComplexityError::BadDigit(c)))
        .collect()
}

fn build_pool(jobs: usize) -> Result<Option<rayon::ThreadPool>, ComplexityError> {
    if jobs <= 1 {
        return Ok(None);
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map(Some)
        .map_err(|e| ComplexityError::ThreadPool(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn literal_construction() {
        assert_eq!(literal_program("").unwrap().mnemonics(), "END");
        assert_eq!(
            literal_program("3").unwrap().mnemonics(),
            "INC INC INC OUT END"
        );
        // 3 -> 1 needs (1 - 3) mod 10 = 8 increments; 42 bits total.
        let p = literal_program("31").unwrap();
        assert_eq!(p.bit_length(), 42);
        let outcome = run(&p, TapeMode::Unbounded, 1000);
        assert!(matches!(outcome, RunOutcome::Halted { ref output, .. } if output == "31"));
    }

    #[test]
    fn literal_reproduces_its_target() {
        for target in ["", "0", "9", "2718281828", "989898", "0123456789"] {
            let p = literal_program(target).unwrap();
            let outcome = run(&p, TapeMode::Unbounded, 100_000);
            assert!(
                matches!(outcome, RunOutcome::Halted { ref output, .. } if output == target),
                "{target}"
            );
            assert!(p.bit_length() <= 3 * (10 * target.len() as u64 + 1));
        }
    }

    #[test]
    fn exhaustive_bounds_for_tiny_targets() {
        let cases = [("", 3, "END"), ("0", 6, "OUT END"), ("1", 9, "INC OUT END")];
        for (target, bits, witness) in cases {
            let estimate = h_upper(target, 5, 64, 1).unwrap();
            assert_eq!(estimate.bound_bits, bits, "{target}");
            assert_eq!(estimate.witness.mnemonics(), witness, "{target}");
            assert_eq!(estimate.method, SearchMethod::ExhaustiveMinimal);
        }
    }

    #[test]
    fn canonical_order_breaks_ties() {
        // Both INC*3 OUT END and DEC*3 OUT END print "3" in 5 tokens; the
        // INC form is canonically first.
        let estimate = h_upper("3", 5, 64, 1).unwrap();
        assert_eq!(estimate.bound_bits, 15);
        assert_eq!(estimate.witness.mnemonics(), "INC INC INC OUT END");
        let dec_form = Program::parse_mnemonics("DEC DEC DEC OUT END").unwrap();
        let outcome = run(&dec_form, TapeMode::Unbounded, 64);
        assert!(matches!(outcome, RunOutcome::Halted { ref output, .. } if output == "3"));
    }

    #[test]
    fn search_beats_literal_where_wraparound_helps() {
        // "5" literally needs INC*5 OUT END (21 bits), but DEC OUT END
        // prints 255 mod 10 = 5 in 9 bits.
        let estimate = h_upper("5", 5, 64, 1).unwrap();
        assert_eq!(estimate.bound_bits, 9);
        assert_eq!(estimate.witness.mnemonics(), "DEC OUT END");
        assert_eq!(literal_program("5").unwrap().bit_length(), 21);
    }

    #[test]
    fn fallback_to_literal_outside_horizon() {
        let estimate = h_upper("12345678", 3, 64, 1).unwrap();
        assert_eq!(estimate.method, SearchMethod::ConstructiveLiteral);
        assert_eq!(estimate.search_exhausted_through, 3);
        assert_eq!(estimate.bound_bits, literal_program("12345678").unwrap().bit_length());
    }

    #[test]
    fn bounds_are_monotone_in_the_horizon() {
        let mut last = u64::MAX;
        for horizon in 1..=5 {
            let estimate = h_upper("5", horizon, 64, 1).unwrap();
            assert!(estimate.bound_bits <= last, "horizon {horizon}");
            last = estimate.bound_bits;
        }
    }

    #[test]
    fn worker_count_does_not_change_the_witness() {
        for target in ["3", "10", "00"] {
            let serial = h_upper(target, 5, 64, 1).unwrap();
            let parallel = h_upper(target, 5, 64, 4).unwrap();
            assert_eq!(serial, parallel, "{target}");
        }
    }

    #[test]
    fn probe_detects_a_compressible_prefix() {
        // "10" literally costs 39 bits (1, then 9 increments to reach 0),
        // but INC OUT DEC OUT END prints it in 15.
        let bits: BitString = "10".parse().unwrap();
        let report = incompressibility_probe(&bits, 5, 64, 1).unwrap();
        assert_eq!(report.literal_bits, 39);
        assert_eq!(report.shortest_found_bits, Some(15));
        assert_eq!(report.witness.as_ref().unwrap().mnemonics(), "INC OUT DEC OUT END");
        assert_eq!(report.assessment, Assessment::CompressibleWithinHorizon);
    }

    #[test]
    fn probe_reports_consistency_when_nothing_shorter_exists() {
        // Five zeros need six tokens (OUT*5 END); a 5-token horizon finds
        // nothing at all.
        let bits: BitString = "00000".parse().unwrap();
        let report = incompressibility_probe(&bits, 5, 64, 1).unwrap();
        assert_eq!(report.shortest_found_bits, None);
        assert!(report.witness.is_none());
        assert_eq!(report.exhausted_through, 5);
        assert_eq!(report.assessment, Assessment::ConsistentWithIncompressibility);

        // The empty prefix degenerates to the END program.
        let report = incompressibility_probe(&BitString::empty(), 5, 64, 1).unwrap();
        assert_eq!(report.shortest_found_bits, Some(3));
        assert_eq!(report.assessment, Assessment::ConsistentWithIncompressibility);
    }

    #[test]
    fn rejects_non_digit_targets() {
        assert!(matches!(h_upper("3a", 3, 64, 1), Err(ComplexityError::BadDigit('a'))));
    }

    #[test]
    fn every_witness_reproduces_its_target() {
        for target in ["", "0", "3", "5", "10", "42", "777"] {
            let estimate = h_upper(target, 4, 256, 1).unwrap();
            let outcome = run(&estimate.witness, TapeMode::Unbounded, 100_000);
            assert!(
                matches!(outcome, RunOutcome::Halted { ref output, .. } if output == target),
                "witness for {target:?} does not reproduce it"
            );
            assert_eq!(estimate.bound_bits, estimate.witness.bit_length());
        }
    }

    #[test]
    fn probe_on_a_universe_omega_prefix() {
        // First 4 bits of the full 3-token universe's halting probability
        // (65/256 = 0.01000001...), searched through 5 tokens.
        let omega: crate::rational::Rational = "65/256".parse().unwrap();
        let prefix = omega.first_bits(4).unwrap();
        assert_eq!(prefix.to_string(), "0100");
        let report = incompressibility_probe(&prefix, 5, 64, 1).unwrap();
        assert_eq!(report.exhausted_through, 5);
        assert_eq!(report.target_bits, prefix);
        // Printing "0100" needs five OUTs-worth of structure; nothing with
        // at most 5 tokens does it, so only the literal bound remains.
        assert_eq!(report.shortest_found_bits, None);
        assert_eq!(report.assessment, Assessment::ConsistentWithIncompressibility);
    }
}
