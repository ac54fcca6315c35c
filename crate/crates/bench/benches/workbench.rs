use criterion::{black_box, criterion_group, criterion_main, Criterion};

use haltlab_core::complexity::h_upper;
use haltlab_core::dovetail::{DovetailConfig, SessionState};
use haltlab_core::enumeration::{count_valid, programs_of_token_length, valid_programs_up_to};
use haltlab_core::machine::{decide_halting_exact, run, TapeMode};
use haltlab_core::omega::omega_bounds;

fn census(c: &mut Criterion) {
    c.bench_function("census_dp_12_tokens", |b| {
        b.iter(|| count_valid(black_box(12)))
    });
}

fn enumeration(c: &mut Criterion) {
    c.bench_function("generate_6_token_programs", |b| {
        b.iter(|| programs_of_token_length(black_box(6)))
    });
}

fn interpreter(c: &mut Criterion) {
    let programs = valid_programs_up_to(4);
    c.bench_function("run_all_4_token_programs_fuel_256", |b| {
        b.iter(|| {
            for (_, p) in &programs {
                black_box(run(p, TapeMode::Unbounded, 256));
            }
        })
    });
    c.bench_function("oracle_all_4_token_programs", |b| {
        b.iter(|| {
            for (_, p) in &programs {
                black_box(decide_halting_exact(p, 16, 1 << 20).unwrap());
            }
        })
    });
}

fn dovetail(c: &mut Criterion) {
    c.bench_function("dovetail_4_tokens_6_stages_bounded", |b| {
        b.iter(|| {
            let mut session =
                SessionState::new(DovetailConfig::new(4, TapeMode::bounded_default())).unwrap();
            session.advance(6, 1).unwrap();
            black_box(omega_bounds(&session))
        })
    });
}

fn complexity(c: &mut Criterion) {
    c.bench_function("h_upper_digit_3_through_5_tokens", |b| {
        b.iter(|| h_upper(black_box("3"), 5, 64, 1).unwrap())
    });
}

criterion_group!(benches, census, enumeration, interpreter, dovetail, complexity);
criterion_main!(benches);
