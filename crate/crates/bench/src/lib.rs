//! Shared input generation for the converter benchmarks.

use num_bigint::BigUint;
use tauplus::{forward, make_tau_plus, ResidueVector, TauPlusSet};

/// Deterministic operands spread over the dynamic range.
pub fn sample_operands(set: &TauPlusSet, count: u64) -> Vec<BigUint> {
    (0..count)
        .map(|i| tauplus::sampling::sample_below(0xBE, i, &set.dr))
        .collect()
}

/// Residue vectors of the sampled operands.
pub fn sample_vectors(set: &TauPlusSet, count: u64) -> Vec<ResidueVector> {
    sample_operands(set, count)
        .iter()
        .map(|x| forward(x, set).expect("in range"))
        .collect()
}

/// The q value the benchmarks run at.
pub fn bench_set() -> TauPlusSet {
    make_tau_plus(16).expect("q = 16 is valid")
}
