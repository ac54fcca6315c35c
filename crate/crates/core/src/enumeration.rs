//! Canonical size-then-lexicographic enumeration of bit strings and of valid
//! programs, plus exact per-length counting for Kraft accounting.
//!
//! Two distinct orderings coexist on purpose.  The *raw* enumeration lists
//! every bit string (`"0"`, `"1"`, `"00"`, ...) and is what the diagonal
//! argument walks; the *valid* enumeration is the same order restricted to
//! parseable programs and is what the halting-probability sum walks.  Both
//! are 1-based.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

use crate::machine::{Program, Token};
use crate::rational::{BitString, Rational};

/// Exact count and halting-sum mass of the valid programs of one token length.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LengthCensus {
    pub token_length: u32,
    pub valid_count: BigUint,
    /// `valid_count / 8^token_length`, the total weight these programs carry.
    pub mass: Rational,
}

/// The `index`-th bit string (1-based) of the raw enumeration: all strings
/// of length 1 first (`"0"`, `"1"`), then length 2, lexicographic within a
/// length.
pub fn bitstring_at(index: u64) -> BitString {
    assert!(index >= 1, "enumeration indices are 1-based");
    let mut offset = index;
    let mut len = 1u32;
    while offset > 1u64 << len {
        offset -= 1u64 << len;
        len += 1;
        assert!(len < 64, "bit-string index out of supported range");
    }
    let value = offset - 1;
    let bits = (0..len).rev().map(|i| value >> i & 1 == 1).collect();
    BitString::from_bits(bits)
}

/// Position of a bit string in the raw enumeration; inverse of
/// [`bitstring_at`].
pub fn index_of_bitstring(bits: &BitString) -> u64 {
    let len = bits.len() as u32;
    assert!((1..64).contains(&len), "bit-string length out of supported range");
    let mut value = 0u64;
    for b in bits.iter() {
        value = value << 1 | b as u64;
    }
    ((1u64 << len) - 2) + value + 1
}

/// `count` consecutive raw bit strings starting at `from_index`.
pub fn bitstrings_canonical(from_index: u64, count: u64) -> Vec<BitString> {
    (from_index..from_index + count).map(bitstring_at).collect()
}

/// Completion table: `table[r][d]` counts the sequences of `r` loop-body
/// tokens (five neutrals, one open, one close) that take nesting depth `d`
/// to 0 without ever going negative.  `count_valid` and program ranking are
/// both read off this table.
fn completion_table(max_body_len: usize) -> Vec<Vec<BigUint>> {
    let mut table: Vec<Vec<BigUint>> = Vec::with_capacity(max_body_len + 1);
    table.push(vec![BigUint::one()]); // r = 0: only depth 0 completes
    for r in 1..=max_body_len {
        let prev = &table[r - 1];
        let at = |d: usize| prev.get(d).cloned().unwrap_or_default();
        let mut row = Vec::with_capacity(r + 1);
        for d in 0..=r {
            let mut total = BigUint::from(5u32) * at(d) + at(d + 1);
            if d >= 1 {
                total += at(d - 1);
            }
            row.push(total);
        }
        table.push(row);
    }
    table
}

/// Exact number of valid programs of exactly `token_length` tokens, by
/// dynamic programming over balanced-nesting prefixes.
pub fn valid_count(token_length: u32) -> BigUint {
    assert!(token_length >= 1);
    let body = token_length as usize - 1;
    completion_table(body)[body][0].clone()
}

/// Census for one token length: count plus its exact Kraft mass.
pub fn count_valid(token_length: u32) -> LengthCensus {
    let count = valid_count(token_length);
    let mass = Rational::new(count.clone(), BigUint::from(8u32).pow(token_length))
        .expect("8^t is nonzero");
    LengthCensus {
        token_length,
        valid_count: count,
        mass,
    }
}

/// Total Kraft mass of all valid programs of `1..=max_tokens` tokens.
pub fn total_mass_through(max_tokens: u32) -> Rational {
    let mut total = Rational::zero();
    for t in 1..=max_tokens {
        total += &count_valid(t).mass;
    }
    total
}

/// `(7/8)^t`: a proven upper bound on the total mass of all valid programs
/// longer than `t` tokens (at most `7^(s-1)` valid programs of `s` tokens,
/// each of mass `8^-s`).  `t = 0` bounds the whole sum by 1.
pub fn tail_mass_bound(token_length: u32) -> Rational {
    Rational::new(7u32, 8u32).unwrap().pow(token_length)
}

/// All valid programs of exactly `token_length` tokens, in canonical
/// (lexicographic bit) order.
pub fn programs_of_token_length(token_length: u32) -> Vec<Program> {
    let body_len = token_length as usize - 1;
    let mut out = Vec::new();
    let mut body: Vec<Token> = Vec::with_capacity(body_len);
    gen_bodies(&mut body, body_len, 0, &mut out);
    out
}

fn gen_bodies(body: &mut Vec<Token>, body_len: usize, depth: usize, out: &mut Vec<Program>) {
    if body.len() == body_len {
        debug_assert_eq!(depth, 0);
        let mut tokens = body.clone();
        tokens.push(Token::End);
        out.push(Program::from_tokens(tokens).expect("generator emits valid programs"));
        return;
    }
    let remaining = body_len - body.len() - 1;
    for code in 1u8..=7 {
        let token = Token::from_code(code);
        let next_depth = match token {
            Token::LoopOpen => depth + 1,
            Token::LoopClose => {
                if depth == 0 {
                    continue;
                }
                depth - 1
            }
            _ => depth,
        };
        if next_depth > remaining {
            continue; // not enough room left to close the brackets
        }
        body.push(token);
        gen_bodies(body, body_len, next_depth, out);
        body.pop();
    }
}

/// All valid programs of at most `max_tokens` tokens with their 1-based
/// indices in the valid enumeration (index 1 is `END`).
pub fn valid_programs_up_to(max_tokens: u32) -> Vec<(u64, Program)> {
    let mut out = Vec::new();
    let mut index = 1u64;
    for t in 1..=max_tokens {
        for p in programs_of_token_length(t) {
            out.push((index, p));
            index += 1;
        }
    }
    out
}

/// `count` entries of the valid enumeration starting at `from_index`.
pub fn valid_programs_canonical(from_index: u64, count: u64) -> Vec<(u64, Program)> {
    assert!(from_index >= 1);
    let mut out = Vec::with_capacity(count as usize);
    let mut skipped = 0u64;
    let mut t = 1u32;
    while (out.len() as u64) < count {
        let here = valid_count(t)
            .to_u64()
            .expect("per-length count exceeds u64; enumeration this deep is not supported");
        if skipped + here < from_index {
            skipped += here;
        } else {
            for (offset, p) in programs_of_token_length(t).into_iter().enumerate() {
                let index = skipped + offset as u64 + 1;
                if index >= from_index {
                    out.push((index, p));
                    if out.len() as u64 == count {
                        break;
                    }
                }
            }
            skipped += here;
        }
        t += 1;
    }
    out
}

/// 1-based position of a valid program in the valid enumeration, computed by
/// ranking against the completion table rather than by generation, so the
/// two routes can cross-check each other.
pub fn index_of_program(program: &Program) -> u64 {
    let t = program.token_count();
    let body = &program.tokens()[..t - 1];
    let table = completion_table(body.len());

    let mut before = BigUint::zero();
    for len in 1..t as u32 {
        before += valid_count(len);
    }

    let mut rank = BigUint::zero();
    let mut depth = 0usize;
    for (i, token) in body.iter().enumerate() {
        let remaining = body.len() - i - 1;
        for code in 1..token.code() {
            let smaller = Token::from_code(code);
            let next_depth = match smaller {
                Token::LoopOpen => depth + 1,
                Token::LoopClose => {
                    if depth == 0 {
                        continue;
                    }
                    depth - 1
                }
                _ => depth,
            };
            if next_depth <= remaining {
                rank += &table[remaining][next_depth];
            }
        }
        depth = match token {
            Token::LoopOpen => depth + 1,
            Token::LoopClose => depth - 1,
            _ => depth,
        };
    }

    (before + rank + BigUint::one())
        .to_u64()
        .expect("program index exceeds u64")
}
