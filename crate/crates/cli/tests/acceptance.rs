//! Acceptance suite: one test per release criterion, each asserting exact
//! values (rational equality, zero tolerance) and printing a PASS line.
//!
//! Run with `cargo test -p haltlab-cli --test acceptance -- --nocapture` to
//! see the per-criterion lines.

use std::process::{Command, Output};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use haltlab_core::complexity::{h_upper, SearchMethod};
use haltlab_core::constructions::{
    cantor_diagonal, cover, turing_diagonal, CoverRequest, DiagonalOracle, DigitSource,
    DigitStatus,
};
use haltlab_core::dovetail::{DovetailConfig, ProgramStatus, SessionState};
use haltlab_core::enumeration::{count_valid, programs_of_token_length, valid_programs_up_to};
use haltlab_core::machine::{run, Program, RunOutcome, TapeMode, DEFAULT_BOUNDED_WIDTH};
use haltlab_core::omega::{
    decode_halting_with_prefix, universe_bounds_at_stage, DecodeOutcome, OmegaPrefix, Universe,
};
use haltlab_core::rational::{BitString, Rational};

fn rat(s: &str) -> Rational {
    s.parse().unwrap()
}

fn full_universe(max_tokens: u32) -> Universe {
    let programs = valid_programs_up_to(max_tokens).into_iter().map(|(_, p)| p).collect();
    Universe::from_oracle(programs, DEFAULT_BOUNDED_WIDTH, 1 << 20).unwrap()
}

/// Parse-filter every bit string of exactly `bits` bits.
fn brute_force_valid(bits: u32) -> Vec<Program> {
    let mut found = Vec::new();
    for value in 0u64..1 << bits {
        let string = BitString::from_bits((0..bits).rev().map(|i| value >> i & 1 == 1).collect());
        if let Ok(p) = Program::parse_bits(&string) {
            found.push(p);
        }
    }
    found
}

#[test]
fn acceptance_01_prefix_freeness_and_kraft() {
    let start = Instant::now();

    // Every valid program among all strings of up to 15 bits...
    let mut valid = Vec::new();
    for bits in 1..=15u32 {
        valid.extend(brute_force_valid(bits));
    }
    assert_eq!(valid.len(), 1 + 5 + 26 + 140 + 777);

    // ...is prefix-free against every other.
    for (i, a) in valid.iter().enumerate() {
        let a_bits = a.bits();
        for b in &valid[i + 1..] {
            let b_bits = b.bits();
            assert!(
                !a_bits.is_prefix_of(&b_bits) && !b_bits.is_prefix_of(&a_bits),
                "{a} is a prefix of {b}"
            );
        }
    }

    // Kraft partial sums by DP: strictly increasing and below 1 through 12.
    let mut total = Rational::zero();
    let mut previous = Rational::zero();
    for length in 1..=12u32 {
        total += &count_valid(length).mass;
        assert!(total > previous, "partial sum stalled at {length}");
        assert!(total < Rational::one(), "Kraft violated at {length}");
        previous = total.clone();
    }

    // DP counts equal brute-force parse-filter counts through 6 tokens.
    for tokens in 1..=6u32 {
        let brute = brute_force_valid(3 * tokens).len();
        assert_eq!(
            count_valid(tokens).valid_count,
            num_bigint::BigUint::from(brute),
            "census disagrees at {tokens} tokens"
        );
    }

    let elapsed = start.elapsed();
    assert!(elapsed < Duration::from_secs(10), "took {elapsed:?}");
    println!(
        "ACCEPTANCE 1 PASS: 949 programs prefix-free over <=15 bits; Kraft sums \
         increase to {total} < 1; DP matches brute force through 6 tokens ({elapsed:?})"
    );
}

#[test]
fn acceptance_02_census_exactness() {
    let expected = [(1u32, 1usize), (2, 5), (3, 26), (4, 140)];
    for (tokens, count) in expected {
        let brute = brute_force_valid(3 * tokens);
        assert_eq!(brute.len(), count, "brute force at {tokens} tokens");
        assert_eq!(
            count_valid(tokens).valid_count,
            num_bigint::BigUint::from(count),
            "DP at {tokens} tokens"
        );
    }
    println!("ACCEPTANCE 2 PASS: census is exactly 1, 5, 26, 140 for lengths 1-4");
}

#[test]
fn acceptance_03_omega_lower_bounds_exact() {
    let start = Instant::now();

    let mut session = SessionState::new(DovetailConfig::new(3, TapeMode::Unbounded)).unwrap();
    session.advance(6, 1).unwrap();
    assert_eq!(session.halted_mass(), &rat("65/256"));
    assert!(session.undecided_enumerated_mass().is_zero());

    let mut session =
        SessionState::new(DovetailConfig::new(4, TapeMode::bounded_default())).unwrap();
    session.advance(6, 1).unwrap();
    assert_eq!(session.statuses().len(), 172, "all 172 programs classified");
    let refuted = session
        .statuses()
        .values()
        .filter(|s| matches!(s, ProgramStatus::NeverHalts { .. }))
        .count();
    assert_eq!(refuted, 2, "exactly two programs never halt");
    assert_eq!(session.halted_mass(), &rat("589/2048"));

    let elapsed = start.elapsed();
    assert!(elapsed < Duration::from_secs(5), "took {elapsed:?}");
    println!(
        "ACCEPTANCE 3 PASS: lower = 65/256 at 3 tokens (no undecided), \
         589/2048 at 4 tokens with 2 of 172 refuted ({elapsed:?})"
    );
}

#[test]
fn acceptance_04_sandwich_soundness_on_random_universes() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0404);
    let pool: Vec<Program> = valid_programs_up_to(4).into_iter().map(|(_, p)| p).collect();

    let mut checked = 0usize;
    for universe_index in 0..20 {
        let density = rng.gen_range(0.1..0.9);
        let programs: Vec<Program> =
            pool.iter().filter(|_| rng.gen_bool(density)).cloned().collect();
        let universe = Universe::from_oracle(programs, DEFAULT_BOUNDED_WIDTH, 1 << 20).unwrap();
        let truth = universe.exact_omega();
        let expansion = truth.first_bits(64).unwrap();

        for stage in 0..=6 {
            let bounds = universe_bounds_at_stage(&universe, stage, 64);
            assert!(
                bounds.lower <= truth && truth <= bounds.upper,
                "sandwich violated: universe {universe_index}, stage {stage}"
            );
            assert!(
                bounds.certified_bits.is_prefix_of(&expansion),
                "certified bits are not a prefix: universe {universe_index}, stage {stage}"
            );
            checked += 1;
        }
    }
    println!("ACCEPTANCE 4 PASS: sandwich and certified-prefix sound in {checked} stage checks over 20 universes");
}

#[test]
fn acceptance_05_prefix_decoder_complete() {
    let start = Instant::now();
    let universe = full_universe(4);
    assert_eq!(universe.len(), 172);

    let prefix12 = OmegaPrefix::new(universe.exact_omega().first_bits(12).unwrap()).unwrap();
    for member in universe.members() {
        let verdict =
            decode_halting_with_prefix(&prefix12, &universe, &member.program, 12).unwrap();
        let expected = if member.halts {
            DecodeOutcome::Halts
        } else {
            DecodeOutcome::NeverHalts
        };
        assert_eq!(verdict, expected, "decoder wrong on {}", member.program);
    }

    let prefix3 = OmegaPrefix::new(universe.exact_omega().first_bits(3).unwrap()).unwrap();
    let mut twelve_bit = 0usize;
    for member in universe.members() {
        if member.program.bit_length() == 12 {
            let verdict =
                decode_halting_with_prefix(&prefix3, &universe, &member.program, 12).unwrap();
            assert_eq!(verdict, DecodeOutcome::PrefixInsufficient, "{}", member.program);
            twelve_bit += 1;
        }
    }
    assert_eq!(twelve_bit, 140);

    let elapsed = start.elapsed();
    assert!(elapsed < Duration::from_secs(5), "took {elapsed:?}");
    println!(
        "ACCEPTANCE 5 PASS: 12-bit prefix decodes all 172 members to ground truth; \
         3-bit prefix refuses all 140 twelve-bit queries ({elapsed:?})"
    );
}

#[test]
fn acceptance_06_diagonals() {
    // Cantor over randomized explicit streams.
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0606);
    let streams: Vec<DigitSource> = (0..100)
        .map(|_| {
            let digits: String =
                (0..120).map(|_| char::from(b'0' + rng.gen_range(0..10u8))).collect();
            DigitSource::from_decimal_string(&digits).unwrap()
        })
        .collect();
    let diagonal = cantor_diagonal(&streams, 100, 10).unwrap();
    for k in 1..=100u64 {
        let haltlab_core::constructions::DigitAnswer::Digit(stream_digit) =
            streams[(k - 1) as usize].query(k, 10)
        else {
            panic!("explicit streams always answer");
        };
        let diag_digit = diagonal.digits()[(k - 1) as usize];
        assert!(diag_digit == 3 || diag_digit == 4, "alphabet violated at {k}");
        assert_ne!(diag_digit, stream_digit, "diagonal equals stream {k} at digit {k}");
    }

    // Turing diagonal digits are fuel-monotone across five quadruplings.
    let n = 60;
    let mut previous = turing_diagonal(n, 4, DiagonalOracle::FuelOnly).unwrap();
    for step in 1..5u32 {
        let next = turing_diagonal(n, 4 * 4u64.pow(step), DiagonalOracle::FuelOnly).unwrap();
        for k in 0..n as usize {
            if previous.statuses()[k] == DigitStatus::Decided {
                assert_eq!(next.statuses()[k], DigitStatus::Decided, "digit {k} regressed");
                assert_eq!(next.digits()[k], previous.digits()[k], "digit {k} changed");
            }
        }
        previous = next;
    }
    println!(
        "ACCEPTANCE 6 PASS: diagonal differs from all 100 streams within {{3,4}}; \
         decided digits survive five fuel quadruplings"
    );
}

#[test]
fn acceptance_07_coverings_exact() {
    let reals = [
        "04", "11", "23", "05", "317", "42", "0001", "25", "191919", "33",
    ];
    for epsilon in [rat("1"), rat("1/4"), rat("1/64")] {
        let request = CoverRequest {
            epsilon: epsilon.clone(),
            streams: reals
                .iter()
                .map(|s| DigitSource::from_decimal_string(s).unwrap())
                .collect(),
            count: 10,
        };
        let result = cover(&request, 10).unwrap();
        let expected_total = epsilon.mul(&rat("1023/1024"));
        assert_eq!(result.total_length, expected_total, "epsilon {epsilon}");
        assert!(result.total_length < epsilon || epsilon == rat("0"), "below epsilon");

        for (digits, interval) in reals.iter().zip(&result.intervals) {
            let value = Rational::new(
                digits.parse::<u64>().unwrap(),
                10u64.pow(digits.len() as u32),
            )
            .unwrap();
            assert!(
                interval.contains(&value),
                "0.{digits} outside [{}, {}] at epsilon {epsilon}",
                interval.lo,
                interval.hi
            );
            assert!(interval.hi <= Rational::one());
        }
    }
    println!(
        "ACCEPTANCE 7 PASS: total covering length is exactly eps*(1 - 2^-10) \
         for eps in {{1, 1/4, 1/64}} with all 10 reals contained"
    );
}

#[test]
fn acceptance_08_complexity_bounds_exact() {
    let start = Instant::now();
    let cases = [("", 3u64), ("0", 6), ("1", 9), ("3", 15)];
    for (target, expected_bits) in cases {
        let estimate = h_upper(target, 5, 64, 1).unwrap();
        assert_eq!(estimate.bound_bits, expected_bits, "bound for {target:?}");
        assert_eq!(estimate.method, SearchMethod::ExhaustiveMinimal, "{target:?}");

        // Independent re-search: no strictly shorter program produces it.
        let witness_tokens = estimate.witness.token_count() as u32;
        for tokens in 1..witness_tokens {
            for program in programs_of_token_length(tokens) {
                let outcome = run(&program, TapeMode::Unbounded, 4096);
                let reproduces =
                    matches!(outcome, RunOutcome::Halted { ref output, .. } if output == target);
                assert!(!reproduces, "{program} beats the witness for {target:?}");
            }
        }
    }
    let elapsed = start.elapsed();
    assert!(elapsed < Duration::from_secs(60), "took {elapsed:?}");
    println!(
        "ACCEPTANCE 8 PASS: exhaustive-minimal bounds 3, 6, 9, 15 bits for \
         \"\", \"0\", \"1\", \"3\", re-verified by brute force ({elapsed:?})"
    );
}

fn haltlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_haltlab"))
        .args(args)
        .output()
        .expect("binary runs")
}

#[test]
fn acceptance_09_determinism_and_resumability() {
    let dir = tempfile::tempdir().unwrap();

    // Worker count must not change a single payload byte.
    let jobs1 = haltlab(&["omega", "--max-tokens", "4", "--stages", "6", "--tape", "bounded", "--jobs", "1"]);
    let jobs4 = haltlab(&["omega", "--max-tokens", "4", "--stages", "6", "--tape", "bounded", "--jobs", "4"]);
    assert_eq!(jobs1.status.code(), Some(0));
    assert_eq!(jobs4.status.code(), Some(0));
    assert_eq!(jobs1.stdout, jobs4.stdout, "--jobs changed the payload");

    // Interrupting mid-run through a checkpoint must replay identically.
    let ck = dir.path().join("mid.ck.json");
    let ck = ck.to_str().unwrap();
    let first_half = haltlab(&[
        "omega", "--max-tokens", "4", "--stages", "3", "--tape", "bounded", "--checkpoint", ck,
    ]);
    assert_eq!(first_half.status.code(), Some(0));
    let resumed = haltlab(&["omega", "--resume", ck, "--stages", "6", "--jobs", "4"]);
    assert_eq!(resumed.status.code(), Some(0));
    assert_eq!(resumed.stdout, jobs1.stdout, "resume diverged from the uninterrupted run");

    println!(
        "ACCEPTANCE 9 PASS: payloads byte-identical across --jobs 1/4 and \
         across a checkpoint/resume interruption"
    );
}

#[test]
fn acceptance_10_borel_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_1010);
    for case in 0..64 {
        let len = rng.gen_range(0..=32usize);
        let answers = BitString::from_bits((0..len).map(|_| rng.gen_bool(0.5)).collect());
        let encoded = haltlab_core::constructions::borel_encode(&answers);
        for n in 1..=len as u64 {
            let answer = haltlab_core::constructions::borel_answer(&encoded, n).unwrap();
            assert_eq!(answer, answers.bit(n), "case {case}, answer {n}");
        }
    }
    println!("ACCEPTANCE 10 PASS: 64 random answer lists round-trip with zero failures");
}
