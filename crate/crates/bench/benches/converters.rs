//! Throughput of the conversion pipeline pieces at q = 16.

use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;
use tauplus::{
    build_bit_matrix, crt_reconstruct, eval_bit_matrix, forward_with_luts, plan_reduction,
    residues_of, reverse_functional, simulate_plan, x_prime_eq9, ForwardLuts, ModulusList,
};
use tauplus_bench::{bench_set, sample_operands, sample_vectors};

fn forward_conversion(c: &mut Criterion) {
    let set = bench_set();
    let luts = ForwardLuts::new(&set);
    let operands = sample_operands(&set, 256);
    let mut i = 0usize;
    c.bench_function("forward q16", |b| {
        b.iter(|| {
            let x = &operands[i % operands.len()];
            i += 1;
            black_box(forward_with_luts(black_box(x), &set, &luts).unwrap())
        })
    });
}

fn reverse_paths(c: &mut Criterion) {
    let set = bench_set();
    let vectors = sample_vectors(&set, 256);
    let matrix = build_bit_matrix(&set).unwrap();
    let plan = plan_reduction(&matrix).unwrap();

    let mut i = 0usize;
    c.bench_function("reverse functional q16", |b| {
        b.iter(|| {
            let rv = &vectors[i % vectors.len()];
            i += 1;
            black_box(reverse_functional(black_box(rv), &set).unwrap())
        })
    });

    let mut i = 0usize;
    c.bench_function("reverse thirteen-term q16", |b| {
        b.iter(|| {
            let rv = &vectors[i % vectors.len()];
            i += 1;
            black_box(x_prime_eq9(black_box(rv), &set).unwrap())
        })
    });

    let mut i = 0usize;
    c.bench_function("matrix eval q16", |b| {
        b.iter(|| {
            let rv = &vectors[i % vectors.len()];
            i += 1;
            black_box(eval_bit_matrix(&matrix, black_box(rv)).unwrap())
        })
    });

    let mut i = 0usize;
    c.bench_function("plan simulate q16", |b| {
        b.iter(|| {
            let rv = &vectors[i % vectors.len()];
            i += 1;
            black_box(simulate_plan(&plan, &matrix, black_box(rv)).unwrap())
        })
    });
}

fn oracle_reconstruction(c: &mut Criterion) {
    let set = bench_set();
    let ms = ModulusList::new(vec![set.m1.clone(), set.m2.clone(), set.m3.clone()]).unwrap();
    let operands = sample_operands(&set, 256);
    let residue_lists: Vec<_> = operands
        .iter()
        .map(|x| residues_of(x, &ms).unwrap())
        .collect();
    let mut i = 0usize;
    c.bench_function("garner reconstruct q16", |b| {
        b.iter(|| {
            let rs = &residue_lists[i % residue_lists.len()];
            i += 1;
            black_box(crt_reconstruct(black_box(rs), &ms).unwrap())
        })
    });
}

criterion_group!(benches, forward_conversion, reverse_paths, oracle_reconstruction);
criterion_main!(benches);
