//! Executable classical constructions: the digit-flipping diagonal over a
//! list of reals, the same diagonal walked over the raw program enumeration,
//! interval coverings of any enumerated set of reals, and the real whose
//! binary expansion answers an enumerated question list.
//!
//! Diagonal digits are always 3 or 4, so the diagonal real has a unique
//! decimal representation (no 0-tail or 9-tail can sneak in).  Digits that
//! rest only on fuel exhaustion are reported as provisional rather than
//! silently trusted: raising fuel may decide them but never flips a decided
//! digit.

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::enumeration::bitstring_at;
use crate::machine::{bounded_digit_at, run, OracleError, Program, RunOutcome, TapeMode};
use crate::rational::{BitString, Interval, Rational, RationalError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConstructionError {
    #[error("need {needed} digit streams, only {have} provided")]
    NotEnoughStreams { needed: usize, have: usize },
    #[error("epsilon must satisfy 0 < epsilon <= 1, got {0}")]
    InvalidEpsilon(Rational),
    #[error("stream {stream} did not yield digit {digit} within fuel; cannot localize the real")]
    Localization { stream: usize, digit: u64 },
    #[error("digit source contains a non-decimal character {0:?}")]
    BadDigit(char),
    #[error(transparent)]
    Oracle(#[from] OracleError),
}

/// Answer of a digit query under a fuel budget.
///
/// Once a digit is known it is known forever: larger fuels return the same
/// digit, never a different one.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DigitAnswer {
    Digit(u8),
    NotYetKnown,
}

/// An indexable producer of decimal digits — a real given digit by digit.
///
/// Explicit and constant sources always answer; a program-backed source
/// answers as far as the run has produced output.  A halted program denotes
/// the finite decimal it printed, so digits past its output are 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DigitSource {
    Digits(Vec<u8>),
    Constant(u8),
    Program(Program),
}

impl DigitSource {
    pub fn from_decimal_string(s: &str) -> Result<DigitSource, ConstructionError> {
        let digits = s
            .chars()
            .map(|c| c.to_digit(10).map(|d| d as u8).ok_or(ConstructionError::BadDigit(c)))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(DigitSource::Digits(digits))
    }

    /// The k-th digit (1-based) after the decimal point, under `fuel`.
    pub fn query(&self, k: u64, fuel: u64) -> DigitAnswer {
        match self {
            DigitSource::Digits(digits) => {
                DigitAnswer::Digit(digits.get((k - 1) as usize).copied().unwrap_or(0))
            }
            DigitSource::Constant(d) => DigitAnswer::Digit(*d),
            DigitSource::Program(program) => match run(program, TapeMode::Unbounded, fuel) {
                RunOutcome::Halted { output, .. } => DigitAnswer::Digit(
                    output.as_bytes().get((k - 1) as usize).map_or(0, |b| b - b'0'),
                ),
                RunOutcome::OutOfFuel { output, .. } => match output.as_bytes().get((k - 1) as usize) {
                    Some(b) => DigitAnswer::Digit(b - b'0'),
                    None => DigitAnswer::NotYetKnown,
                },
                RunOutcome::NeverHalts { .. } => unreachable!("plain runs never prove divergence"),
            },
        }
    }
}

/// Whether a diagonal digit is settled or rests on fuel exhaustion only.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DigitStatus {
    Decided,
    Provisional,
}

/// A diagonal real, digit by digit over the alphabet {3, 4}.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiagonalResult {
    digits: Vec<u8>,
    statuses: Vec<DigitStatus>,
}

impl DiagonalResult {
    pub fn digits(&self) -> &[u8] {
        &self.digits
    }

    pub fn statuses(&self) -> &[DigitStatus] {
        &self.statuses
    }

    pub fn digit_string(&self) -> String {
        self.digits.iter().map(|d| char::from(b'0' + d)).collect()
    }

    fn push(&mut self, diagonal_digit_is_3: bool, status: DigitStatus) {
        self.digits.push(if diagonal_digit_is_3 { 4 } else { 3 });
        self.statuses.push(status);
    }
}

/// Flip the diagonal of a list of reals: digit `k` of the result is 4 when
/// stream `k`'s k-th digit is 3, and 3 otherwise, so the result differs from
/// every listed real at the witnessing position.
pub fn cantor_diagonal(
    streams: &[DigitSource],
    n: u64,
    fuel: u64,
) -> Result<DiagonalResult, ConstructionError> {
    if (streams.len() as u64) < n {
        return Err(ConstructionError::NotEnoughStreams {
            needed: n as usize,
            have: streams.len(),
        });
    }
    let mut result = DiagonalResult { digits: Vec::new(), statuses: Vec::new() };
    for k in 1..=n {
        match streams[(k - 1) as usize].query(k, fuel) {
            DigitAnswer::Digit(d) => result.push(d == 3, DigitStatus::Decided),
            // Unknown diagonal digits take the "otherwise" branch, flagged.
            DigitAnswer::NotYetKnown => result.push(false, DigitStatus::Provisional),
        }
    }
    Ok(result)
}

/// How the program diagonal resolves halting questions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiagonalOracle {
    /// Fuel-limited runs only: digits of still-running programs stay
    /// provisional, exhibiting exactly where computability fails.
    FuelOnly,
    /// The exact bounded-tape oracle: every digit is decided, including
    /// those of cycling programs with periodic output.
    ExactBounded { width: usize, config_budget: usize },
}

/// The diagonal over the raw bit-string enumeration.
///
/// Digit `k` is 3 when string `k` is invalid, or its program provably emits
/// no k-th digit, or that digit is not 3; it is 4 when the k-th digit is 3.
/// Without the oracle, a program that is still running with fewer than `k`
/// output digits leaves digit `k` provisional at 3.
pub fn turing_diagonal(
    n: u64,
    fuel: u64,
    oracle: DiagonalOracle,
) -> Result<DiagonalResult, ConstructionError> {
    let mut result = DiagonalResult { digits: Vec::new(), statuses: Vec::new() };
    for k in 1..=n {
        let program = match Program::parse_bits(&bitstring_at(k)) {
            Err(_) => {
                result.push(false, DigitStatus::Decided);
                continue;
            }
            Ok(p) => p,
        };
        match oracle {
            DiagonalOracle::FuelOnly => match run(&program, TapeMode::Unbounded, fuel) {
                RunOutcome::Halted { output, .. } => {
                    let digit = output.as_bytes().get((k - 1) as usize).map(|b| b - b'0');
                    result.push(digit == Some(3), DigitStatus::Decided);
                }
                RunOutcome::OutOfFuel { output, .. } => {
                    match output.as_bytes().get((k - 1) as usize) {
                        // Output only grows, so an emitted digit is final
                        // even though the program has not halted.
                        Some(b) => result.push(*b - b'0' == 3, DigitStatus::Decided),
                        None => result.push(false, DigitStatus::Provisional),
                    }
                }
                RunOutcome::NeverHalts { .. } => unreachable!("plain runs never prove divergence"),
            },
            DiagonalOracle::ExactBounded { width, config_budget } => {
                let digit = bounded_digit_at(&program, width, k, config_budget)?;
                result.push(digit == Some(3), DigitStatus::Decided);
            }
        }
    }
    Ok(result)
}

/// A covering request: the first `count` listed reals get intervals of
/// lengths `epsilon/2, epsilon/4, ...`.
#[derive(Debug, Clone)]
pub struct CoverRequest {
    pub epsilon: Rational,
    pub streams: Vec<DigitSource>,
    pub count: usize,
}

/// The produced covering with its exact nominal total length
/// `epsilon * (1 - 2^-count)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cover {
    pub intervals: Vec<Interval>,
    pub total_length: Rational,
}

/// Cover each listed real with an interval of length `epsilon/2^i`.
///
/// Interval `i` is left-aligned at the real's decimal truncation of `m_i`
/// digits, `m_i` the least `m` with `10^-m <= epsilon/2^(i+1)`, so the whole
/// truncation interval — and hence the real — lies inside.  Intervals are
/// clipped to `[0, 1]`; `total_length` reports the nominal geometric sum.
pub fn cover(request: &CoverRequest, fuel: u64) -> Result<Cover, ConstructionError> {
    if request.epsilon.is_zero() || request.epsilon > Rational::one() {
        return Err(ConstructionError::InvalidEpsilon(request.epsilon.clone()));
    }
    if request.streams.len() < request.count {
        return Err(ConstructionError::NotEnoughStreams {
            needed: request.count,
            have: request.streams.len(),
        });
    }

    let mut intervals = Vec::with_capacity(request.count);
    let mut total_length = Rational::zero();
    let mut interval_length = request.epsilon.clone(); // becomes epsilon/2^i
    for i in 1..=request.count {
        interval_length = interval_length.half();
        let localization_width = interval_length.half(); // epsilon / 2^(i+1)

        let mut digits_needed = 1u64;
        while Rational::pow10_neg(digits_needed) > localization_width {
            digits_needed += 1;
        }

        let source = &request.streams[i - 1];
        let mut prefix = BigUint::ZERO;
        for position in 1..=digits_needed {
            match source.query(position, fuel) {
                DigitAnswer::Digit(d) => prefix = prefix * 10u32 + d,
                DigitAnswer::NotYetKnown => {
                    return Err(ConstructionError::Localization { stream: i, digit: position })
                }
            }
        }
        let lo = Rational::new(prefix, BigUint::from(10u32).pow(digits_needed as u32))
            .expect("positive power of ten");
        let hi = (&lo + &interval_length).min(Rational::one());
        intervals.push(Interval::new(lo, hi).expect("clipped interval stays in [0,1]"));
        total_length += &interval_length;
    }
    Ok(Cover { intervals, total_length })
}

/// Pack a finite list of yes/no answers into a real: answer `i` becomes
/// bit `i` of the binary expansion.
pub fn borel_encode(answers: &BitString) -> Rational {
    answers.dyadic_value()
}

/// Read answer `n` back out of an encoded real.
pub fn borel_answer(x: &Rational, n: u64) -> Result<bool, RationalError> {
    x.bit_at(n)
}

/// Wire form of a digit-stream list:
/// `{"version":1,"streams":[{"kind":"digits","value":"314159"}, ...]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StreamsDocument {
    pub version: u32,
    pub streams: Vec<StreamRecord>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum StreamRecord {
    Digits { value: String },
    Constant { digit: u8 },
    Program { bits: BitString },
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StreamsError {
    #[error("unsupported streams version {found} (expected 1)")]
    VersionMismatch { found: u32 },
    #[error("malformed streams document: {0}")]
    Malformed(String),
    #[error("stream {index}: {problem}")]
    BadStream { index: usize, problem: String },
}

impl StreamsDocument {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("streams document serializes")
    }

    pub fn from_json(text: &str) -> Result<StreamsDocument, StreamsError> {
        serde_json::from_str(text).map_err(|e| StreamsError::Malformed(e.to_string()))
    }

    pub fn into_sources(self) -> Result<Vec<DigitSource>, StreamsError> {
        if self.version != 1 {
            return Err(StreamsError::VersionMismatch { found: self.version });
        }
        self.streams
            .into_iter()
            .enumerate()
            .map(|(index, record)| match record {
                StreamRecord::Digits { value } => DigitSource::from_decimal_string(&value)
                    .map_err(|e| StreamsError::BadStream { index, problem: e.to_string() }),
                StreamRecord::Constant { digit } => {
                    if digit > 9 {
                        Err(StreamsError::BadStream {
                            index,
                            problem: format!("constant digit {digit} out of range"),
                        })
                    } else {
                        Ok(DigitSource::Constant(digit))
                    }
                }
                StreamRecord::Program { bits } => Program::parse_bits(&bits)
                    .map(DigitSource::Program)
                    .map_err(|e| StreamsError::BadStream { index, problem: e.to_string() }),
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enumeration::index_of_bitstring;

    fn rat(s: &str) -> Rational {
        s.parse().unwrap()
    }

    #[test]
    fn cantor_over_zero_streams() {
        let streams = vec![DigitSource::Constant(0); 5];
        let result = cantor_diagonal(&streams, 5, 10).unwrap();
        assert_eq!(result.digit_string(), "33333");
        assert!(result.statuses().iter().all(|s| *s == DigitStatus::Decided));
    }

    #[test]
    fn cantor_over_three_streams() {
        let streams = vec![DigitSource::Constant(3); 4];
        let result = cantor_diagonal(&streams, 4, 10).unwrap();
        assert_eq!(result.digit_string(), "4444");
    }

    #[test]
    fn cantor_positional_rule() {
        // Stream k holds the constant k mod 10, so d(k,k) = 3 exactly at
        // positions 3 and 13.
        let streams: Vec<DigitSource> =
            (1..=13).map(|k| DigitSource::Constant((k % 10) as u8)).collect();
        let result = cantor_diagonal(&streams, 13, 10).unwrap();
        for (i, d) in result.digits().iter().enumerate() {
            let expect = if i + 1 == 3 || i + 1 == 13 { 4 } else { 3 };
            assert_eq!(*d, expect, "position {}", i + 1);
        }
    }

    #[test]
    fn cantor_differs_from_every_stream() {
        let streams: Vec<DigitSource> = (0..40)
            .map(|k| DigitSource::from_decimal_string(&format!("{:040}", k * 7)).unwrap())
            .collect();
        let result = cantor_diagonal(&streams, 40, 10).unwrap();
        for k in 1..=40u64 {
            let DigitAnswer::Digit(stream_digit) = streams[(k - 1) as usize].query(k, 10) else {
                panic!("explicit streams always answer")
            };
            assert_ne!(result.digits()[(k - 1) as usize], stream_digit, "position {k}");
            assert!(matches!(result.digits()[(k - 1) as usize], 3 | 4));
        }
    }

    #[test]
    fn cantor_requires_enough_streams() {
        let streams = vec![DigitSource::Constant(0); 2];
        assert!(matches!(
            cantor_diagonal(&streams, 5, 10),
            Err(ConstructionError::NotEnoughStreams { needed: 5, have: 2 })
        ));
    }

    #[test]
    fn turing_diagonal_early_digits() {
        // Strings 1..6 are invalid (wrong length); string 7 is END, which
        // halts with no output, so no 7th digit ever appears.
        let result = turing_diagonal(7, 64, DiagonalOracle::FuelOnly).unwrap();
        assert_eq!(result.digit_string(), "3333333");
        assert!(result.statuses().iter().all(|s| *s == DigitStatus::Decided));

        let with_oracle = turing_diagonal(
            7,
            64,
            DiagonalOracle::ExactBounded { width: 16, config_budget: 1 << 20 },
        )
        .unwrap();
        assert_eq!(with_oracle.digit_string(), "3333333");
    }

    #[test]
    fn turing_diagonal_flags_unsettled_digits() {
        // The silent looper INC LOOP_OPEN LOOP_CLOSE END sits at this raw
        // index; with fuel only it stays provisional, with the oracle it is
        // decided (it never emits anything).
        let looper = Program::parse_mnemonics("INC LOOP_OPEN LOOP_CLOSE END").unwrap();
        let index = index_of_bitstring(&looper.bits());
        let fuel_only = turing_diagonal(index, 8, DiagonalOracle::FuelOnly).unwrap();
        assert_eq!(fuel_only.digits()[(index - 1) as usize], 3);
        assert_eq!(fuel_only.statuses()[(index - 1) as usize], DigitStatus::Provisional);

        let oracle = turing_diagonal(
            index,
            8,
            DiagonalOracle::ExactBounded { width: 16, config_budget: 1 << 20 },
        )
        .unwrap();
        assert_eq!(oracle.digits()[(index - 1) as usize], 3);
        assert_eq!(oracle.statuses()[(index - 1) as usize], DigitStatus::Decided);
        assert!(oracle.statuses().iter().all(|s| *s == DigitStatus::Decided));
    }

    #[test]
    fn turing_diagonal_is_fuel_monotone() {
        let n = 80;
        let mut previous = turing_diagonal(n, 4, DiagonalOracle::FuelOnly).unwrap();
        for step in 1..=5 {
            let fuel = 4u64.pow(step + 1);
            let next = turing_diagonal(n, fuel, DiagonalOracle::FuelOnly).unwrap();
            for k in 0..n as usize {
                if previous.statuses()[k] == DigitStatus::Decided {
                    assert_eq!(next.statuses()[k], DigitStatus::Decided, "digit {k} regressed");
                    assert_eq!(next.digits()[k], previous.digits()[k], "digit {k} flipped");
                }
            }
            previous = next;
        }
    }

    #[test]
    fn cover_matches_the_textbook_sum() {
        let request = CoverRequest {
            epsilon: Rational::one(),
            streams: vec![
                DigitSource::from_decimal_string("1").unwrap(),
                DigitSource::from_decimal_string("25").unwrap(),
                DigitSource::from_decimal_string("7").unwrap(),
            ],
            count: 3,
        };
        let cover = cover(&request, 10).unwrap();
        assert_eq!(cover.total_length, rat("7/8"));
        let lengths: Vec<Rational> = cover.intervals.iter().map(|iv| iv.length()).collect();
        assert_eq!(lengths, [rat("1/2"), rat("1/4"), rat("1/8")]);
        for (interval, value) in cover.intervals.iter().zip([rat("1/10"), rat("1/4"), rat("7/10")]) {
            assert!(interval.contains(&value), "{value} not in [{}, {}]", interval.lo, interval.hi);
        }
    }

    #[test]
    fn cover_geometric_total() {
        let request = CoverRequest {
            epsilon: rat("1/4"),
            streams: (0..10)
                .map(|k| DigitSource::from_decimal_string(&format!("{:02}", k * 7)).unwrap())
                .collect(),
            count: 10,
        };
        let cover = cover(&request, 10).unwrap();
        assert_eq!(cover.total_length, rat("1023/4096"));
        assert!(cover.total_length < request.epsilon);
    }

    #[test]
    fn cover_contains_truncation_intervals() {
        let request = CoverRequest {
            epsilon: rat("1/4"),
            streams: (1..=8).map(DigitSource::Constant).collect(),
            count: 8,
        };
        let result = cover(&request, 10).unwrap();
        let mut width = request.epsilon.clone();
        for (i, interval) in result.intervals.iter().enumerate() {
            width = width.half();
            // Recompute the truncation from the source and check nesting.
            let mut m = 1u64;
            while Rational::pow10_neg(m) > width.half() {
                m += 1;
            }
            let truncation = Interval::new(
                interval.lo.clone(),
                &interval.lo + &Rational::pow10_neg(m),
            )
            .unwrap();
            assert!(interval.contains_interval(&truncation), "interval {i}");
            // The constant-digit real d/9 itself lies inside as well.
            let value = Rational::new((i + 1) as u32, 9u32).unwrap();
            assert!(interval.contains(&value), "real {i}");
        }
    }

    #[test]
    fn cover_validates_epsilon_and_localization() {
        let base = CoverRequest {
            epsilon: rat("5/4"),
            streams: vec![DigitSource::Constant(1)],
            count: 1,
        };
        assert!(matches!(cover(&base, 10), Err(ConstructionError::InvalidEpsilon(_))));

        // A program that never produces output cannot be localized.
        let silent = Program::parse_mnemonics("INC LOOP_OPEN LOOP_CLOSE END").unwrap();
        let request = CoverRequest {
            epsilon: Rational::one(),
            streams: vec![DigitSource::Program(silent)],
            count: 1,
        };
        assert!(matches!(
            cover(&request, 100),
            Err(ConstructionError::Localization { stream: 1, digit: 1 })
        ));
    }

    #[test]
    fn program_backed_sources_answer_like_their_output() {
        // Prints "3": digits are 3, then 0 forever once halted.
        let three = Program::parse_mnemonics("INC INC INC OUT END").unwrap();
        let source = DigitSource::Program(three);
        assert_eq!(source.query(1, 100), DigitAnswer::Digit(3));
        assert_eq!(source.query(2, 100), DigitAnswer::Digit(0));
        // Under starvation fuel the first digit is not yet out.
        assert_eq!(source.query(1, 2), DigitAnswer::NotYetKnown);
    }

    #[test]
    fn borel_round_trip() {
        let answers: BitString = "101".parse().unwrap();
        let encoded = borel_encode(&answers);
        assert_eq!(encoded, rat("5/8"));
        assert!(!borel_answer(&encoded, 2).unwrap());
        assert!(borel_answer(&encoded, 1).unwrap());
        assert!(borel_answer(&encoded, 3).unwrap());
        // Past the stored answers the expansion is all zeros.
        assert!(!borel_answer(&encoded, 9).unwrap());
        assert!(borel_answer(&Rational::one(), 1).is_err());
    }

    #[test]
    fn streams_documents_round_trip() {
        let doc = StreamsDocument {
            version: 1,
            streams: vec![
                StreamRecord::Digits { value: "314159".into() },
                StreamRecord::Constant { digit: 0 },
                StreamRecord::Program { bits: "001000".parse().unwrap() },
            ],
        };
        let json = doc.to_json();
        assert!(json.contains(r#""kind":"digits""#), "{json}");
        let sources = StreamsDocument::from_json(&json).unwrap().into_sources().unwrap();
        assert_eq!(sources.len(), 3);
        assert!(matches!(sources[2], DigitSource::Program(_)));

        assert!(matches!(
            StreamsDocument::from_json(r#"{"version":9,"streams":[]}"#)
                .unwrap()
                .into_sources(),
            Err(StreamsError::VersionMismatch { found: 9 })
        ));
    }
}
