//! Criterion benchmarks for compilation, decoding and the pipelines.

use std::hint::black_box;

use criterion::{BenchmarkId, Criterion};
use surfred::compile::{compile_formula, CompileMode};
use surfred::decoders::{brute_force_dqmld, structured_qmld, support_restricted_enumerate, DecodingInstance};
use surfred::formula::parse_expression;
use surfred::instance;
use surfred::pipelines::{count_sat, structured_dqmld_oracle};
use surfred::rational::rat;
use surfred::{Formula, NoiseModel, QubitNoise, RotatedLayout, SyndromeVector};

pub const FORMULAS: &[&str] = &["x1", "(x1&x2)", "((x1|x2)&((!x2|x3)&(!x1|!x3)))"];

fn formula(src: &str) -> Formula {
    parse_expression(src).expect("benchmark formula parses")
}

/// 3x3 lattice with noise on every qubit and two flipped generators.
pub fn dense_instance() -> DecodingInstance {
    let layout = RotatedLayout::new(3, 3).unwrap();
    let mut noise = NoiseModel::new(9);
    for q in 0..9 {
        let d = 10 + q as i64;
        noise.set(q, QubitNoise::new(rat(1, d), rat(1, 2 * d), rat(2, d)).unwrap()).unwrap();
    }
    DecodingInstance::new(layout, noise, SyndromeVector::new([1, 4])).unwrap()
}

pub fn compile_group(c: &mut Criterion) {
    let mut g = c.benchmark_group("compile");
    g.sample_size(10);
    for src in FORMULAS {
        let f = formula(src);
        g.bench_with_input(BenchmarkId::new("qmld", src), &f, |b, f| {
            b.iter(|| compile_formula(black_box(f), CompileMode::qmld_default()).unwrap())
        });
    }
    g.finish();
}

pub fn decode_group(c: &mut Criterion) {
    let mut g = c.benchmark_group("decode");
    g.sample_size(10);
    let dense = dense_instance();
    g.bench_function("brute_dqmld_3x3", |b| b.iter(|| brute_force_dqmld(black_box(&dense)).unwrap()));
    let inst = compile_formula(&formula("(x1&x2)"), CompileMode::qmld_default()).unwrap();
    let plain = DecodingInstance::from(&inst);
    g.bench_function("support_and", |b| b.iter(|| support_restricted_enumerate(black_box(&plain)).unwrap()));
    g.bench_function("structured_and", |b| b.iter(|| structured_qmld(black_box(&inst)).unwrap()));
    g.finish();
}

pub fn format_group(c: &mut Criterion) {
    let mut g = c.benchmark_group("instance_file");
    g.sample_size(10);
    let inst = compile_formula(&formula(FORMULAS[2]), CompileMode::qmld_default()).unwrap();
    let text = instance::serialize(&inst);
    g.bench_function("serialize", |b| b.iter(|| instance::serialize(black_box(&inst))));
    g.bench_function("parse", |b| b.iter(|| instance::parse(black_box(&text)).unwrap()));
    g.finish();
}

pub fn pipeline_group(c: &mut Criterion) {
    let mut g = c.benchmark_group("pipeline");
    g.sample_size(10);
    let f = formula("(x1|x2)");
    g.bench_function("count_sat_or", |b| b.iter(|| count_sat(black_box(&f), structured_dqmld_oracle).unwrap()));
    g.finish();
}

pub fn benchmarks(c: &mut Criterion) {
    compile_group(c);
    decode_group(c);
    format_group(c);
    pipeline_group(c);
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_are_valid() {
        assert!(!brute_force_dqmld(&dense_instance()).unwrap().zero_probability);
        for src in FORMULAS {
            formula(src);
        }
    }
}
