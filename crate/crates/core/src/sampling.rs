//! Seeded, splittable sampling used by verification sweeps.
//!
//! The seed-to-sequence mapping is part of the tool's stable interface:
//! verification reports are regression artifacts and must not change
//! between releases or with the worker count. Sample `i` of a run with
//! seed `s` is drawn from a ChaCha12 stream keyed by
//! `splitmix64(s ^ (i+1) * 0x9E3779B97F4A7C15)`, and values below a bound
//! are produced by rejection sampling on the bound's bit width.

use num_bigint::BigUint;
use num_traits::Zero;
use rand_chacha::ChaCha12Rng;
use rand_core::{RngCore, SeedableRng};

/// splitmix64 finalizer (Steele et al.), the usual u64 bit mixer.
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// RNG for the `index`-th sample of a seeded run.
///
/// Streams for distinct indices are independent, so workers may draw any
/// subset of indices and the merged report is identical to a serial run.
pub fn stream_rng(seed: u64, index: u64) -> ChaCha12Rng {
    let key = splitmix64(seed ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    ChaCha12Rng::seed_from_u64(key)
}

/// Uniform value in `[0, bound)` by rejection on `bound.bits()` bits.
pub fn uniform_below(rng: &mut ChaCha12Rng, bound: &BigUint) -> BigUint {
    assert!(!bound.is_zero(), "bound must be positive");
    let bits = bound.bits();
    let words = bits.div_ceil(32) as usize;
    let top_mask: u32 = if bits.is_multiple_of(32) {
        u32::MAX
    } else {
        (1u32 << (bits % 32)) - 1
    };
    loop {
        let mut digits = vec![0u32; words];
        for d in digits.iter_mut() {
            *d = rng.next_u32();
        }
        digits[words - 1] &= top_mask;
        let candidate = BigUint::new(digits);
        if &candidate < bound {
            return candidate;
        }
    }
}

/// One-shot: the `index`-th sample below `bound` for this seed.
pub fn sample_below(seed: u64, index: u64, bound: &BigUint) -> BigUint {
    uniform_below(&mut stream_rng(seed, index), bound)
}
