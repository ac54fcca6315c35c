//! Exact computability experiments on a tiny prefix-free tape language.
//!
//! The crate provides, end to end and in exact rational arithmetic:
//!
//! * [`rational`] — arbitrary-precision nonnegative fractions, dyadic bit
//!   extraction and closed subintervals of `[0,1]`.
//! * [`machine`] — the eight-token tape language, its parser, interpreter,
//!   and an exact halting oracle for the bounded-tape variant.
//! * [`enumeration`] — canonical size-then-lexicographic enumeration of bit
//!   strings and valid programs, with exact per-length counting.
//! * [`dovetail`] — fair interleaved execution of all enumerated programs
//!   with resumable, checksummed checkpoints.
//! * [`omega`] — exact sandwich bounds on the halting probability, bit
//!   certification, halting decoders driven by an omega prefix or by a
//!   sound theorem stream.
//! * [`constructions`] — executable diagonal arguments, interval coverings
//!   of enumerated reals, and the answer-encoding real.
//! * [`complexity`] — program-size upper bounds by exhaustive search with a
//!   constructive literal fallback.
//!
//! No floating point is used anywhere: every mass, bound and certified bit
//! is an exact fraction.

pub mod complexity;
pub mod constructions;
pub mod dovetail;
pub mod enumeration;
pub mod machine;
pub mod omega;
pub mod rational;

pub use machine::{InvalidReason, Program, RunOutcome, TapeMode, Token};
pub use rational::{BitString, Interval, Rational};
