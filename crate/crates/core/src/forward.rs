//! Residue generation (binary to residue) for tau+.
//!
//! The operand is sliced into four (q+1)-bit pieces. The m1 channel is a
//! plain truncation to the low 2q+1 bits. The odd channels run the staged
//! datapath: `F_i(Z) = |2^(q+1) Z|_{m_i}` realized as a lookup table, with
//! `F^2` and `F^3` obtained by chaining the single table, followed by a
//! four-operand modular sum.

use crate::adder::ResidueVector;
use crate::error::{Error, Result};
use crate::moduli::{Channel, TauPlusSet};
use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};

/// The four (q+1)-bit operand slices; the top slice has a forced-zero MSB.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OperandSlices {
    pub x3: BigUint,
    pub x2: BigUint,
    pub x1: BigUint,
    pub x0: BigUint,
}

impl OperandSlices {
    /// Reassembles the operand: `2^(3q+3) x3 + 2^(2q+2) x2 + 2^(q+1) x1 + x0`.
    pub fn reconstruct(&self, q: u32) -> BigUint {
        let q = q as u64;
        (&self.x3 << (3 * q + 3)) + (&self.x2 << (2 * q + 2)) + (&self.x1 << (q + 1)) + &self.x0
    }
}

fn check_in_dr(x: &BigUint, set: &TauPlusSet) -> Result<()> {
    if x >= &set.dr {
        return Err(Error::OutOfRange {
            what: "operand",
            value: x.to_string(),
            limit: set.dr.to_string(),
        });
    }
    Ok(())
}

/// Slices an in-range operand into (x3, x2, x1, x0).
pub fn split_operand(x: &BigUint, set: &TauPlusSet) -> Result<OperandSlices> {
    check_in_dr(x, set)?;
    let q = set.q as u64;
    let mask = (BigUint::one() << (q + 1)) - BigUint::one();
    Ok(OperandSlices {
        x3: x >> (3 * q + 3),
        x2: (x >> (2 * q + 2)) & &mask,
        x1: (x >> (q + 1)) & &mask,
        x0: x & &mask,
    })
}

/// Largest table that gets materialized: 2^17 entries.
const MATERIALIZE_MAX_INPUT_BITS: u64 = 17;

/// The map `Z -> |2^(q+1) Z|_{m_channel}` over (q+1)-bit inputs.
///
/// For small q the 2^(q+1) entries are materialized; for larger q entries
/// are computed on demand, bit-identical to the table form (tested).
#[derive(Debug, Clone)]
pub struct ChannelLut {
    q: u32,
    channel: Channel,
    modulus: BigUint,
    entries: Option<Vec<u64>>,
}

impl ChannelLut {
    pub fn channel(&self) -> Channel {
        self.channel
    }

    pub fn len(&self) -> BigUint {
        BigUint::one() << (self.q as u64 + 1)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Table entry for `z < 2^(q+1)`.
    pub fn entry(&self, z: &BigUint) -> BigUint {
        debug_assert!(z.bits() <= self.q as u64 + 1);
        match &self.entries {
            Some(table) => {
                let idx = z.to_u64().expect("input fits u64 when materialized") as usize;
                BigUint::from(table[idx])
            }
            None => (z << (self.q as u64 + 1)) % &self.modulus,
        }
    }

    /// `F^k(z)`: the table chained `k` times.
    pub fn chained(&self, z: &BigUint, k: u32) -> BigUint {
        let mut value = z.clone();
        for _ in 0..k {
            value = self.entry(&value);
        }
        value
    }
}

/// Builds the lookup table for channel 2 or 3.
pub fn build_lut(set: &TauPlusSet, channel: Channel) -> ChannelLut {
    let modulus = set.channel_modulus(channel).clone();
    let input_bits = set.q as u64 + 1;
    let entries = if input_bits <= MATERIALIZE_MAX_INPUT_BITS {
        let m = modulus.to_u64().expect("modulus fits u64 for small q");
        let count = 1usize << input_bits;
        let mut table = Vec::with_capacity(count);
        let mut value: u64 = 0;
        // entry Z = (2^(q+1) * Z) mod m ramps by 2^(q+1) mod m per step
        let step = {
            let s = (BigUint::one() << input_bits) % &modulus;
            s.to_u64().expect("below modulus")
        };
        for _ in 0..count {
            table.push(value);
            value += step;
            if value >= m {
                value -= m;
            }
        }
        Some(table)
    } else {
        None
    };
    ChannelLut {
        q: set.q,
        channel,
        modulus,
        entries,
    }
}

/// `x mod 2^(2q+1)`: the low 2q+1 bits of the operand.
pub fn residue_m1(x: &BigUint, set: &TauPlusSet) -> Result<BigUint> {
    check_in_dr(x, set)?;
    let mask = (BigUint::one() << (2 * set.q as u64 + 1)) - BigUint::one();
    Ok(x & &mask)
}

fn staged_with_lut(x: &BigUint, set: &TauPlusSet, lut: &ChannelLut) -> Result<BigUint> {
    let slices = split_operand(x, set)?;
    let modulus = set.channel_modulus(lut.channel());
    let mut sum = lut.chained(&slices.x3, 3);
    sum += lut.chained(&slices.x2, 2);
    sum += lut.entry(&slices.x1);
    sum += &slices.x0;
    // The three table outputs are below m_i and x0 is below 2^(q+1), so the
    // sum is below 3 m_i + 2^(q+1) < 4.34 m_i: at most four subtractions.
    while &sum >= modulus {
        sum -= modulus;
    }
    Ok(sum)
}

/// Staged residue generation for channel 2 or 3 via the LUT
/// composition `|F^3(X3) + F^2(X2) + F(X1) + X0|_{m_i}`.
pub fn residue_mi_staged(x: &BigUint, set: &TauPlusSet, channel: Channel) -> Result<BigUint> {
    let lut = build_lut(set, channel);
    staged_with_lut(x, set, &lut)
}

/// Full forward converter: the m1 truncation plus both staged channels.
pub fn forward(x: &BigUint, set: &TauPlusSet) -> Result<ResidueVector> {
    let luts = ForwardLuts::new(set);
    forward_with_luts(x, set, &luts)
}

/// Both channel tables, built once and shared across a sweep.
#[derive(Debug, Clone)]
pub struct ForwardLuts {
    pub lut2: ChannelLut,
    pub lut3: ChannelLut,
}

impl ForwardLuts {
    pub fn new(set: &TauPlusSet) -> Self {
        ForwardLuts {
            lut2: build_lut(set, Channel::M2),
            lut3: build_lut(set, Channel::M3),
        }
    }
}

/// Forward conversion reusing prebuilt tables.
pub fn forward_with_luts(x: &BigUint, set: &TauPlusSet, luts: &ForwardLuts) -> Result<ResidueVector> {
    Ok(ResidueVector {
        q: set.q,
        x1: residue_m1(x, set)?,
        x2: staged_with_lut(x, set, &luts.lut2)?,
        x3: staged_with_lut(x, set, &luts.lut3)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moduli::make_tau_plus;
    use crate::oracle::{residues_of, ModulusList};
    use crate::sampling;
    use num_traits::Zero;

    #[test]
    fn split_q4_example() {
        let set = make_tau_plus(4).unwrap();
        let s = split_operand(&BigUint::from(100_000u32), &set).unwrap();
        assert_eq!(s.x3, BigUint::from(3u32));
        assert_eq!(s.x2, BigUint::from(1u32));
        assert_eq!(s.x1, BigUint::from(21u32));
        assert_eq!(s.x0, BigUint::ZERO);
        assert_eq!(s.reconstruct(4), BigUint::from(100_000u32));

        let z = split_operand(&BigUint::ZERO, &set).unwrap();
        assert_eq!(z.reconstruct(4), BigUint::ZERO);

        let top = split_operand(&BigUint::from(294_399u32), &set).unwrap();
        assert_eq!(top.reconstruct(4), BigUint::from(294_399u32));
        // forced-zero top bit of the high slice
        assert!(top.x3 < BigUint::from(16u32));

        assert!(split_operand(&BigUint::from(294_400u32), &set).is_err());
    }

    #[test]
    fn lut_entries_q4() {
        let set = make_tau_plus(4).unwrap();
        let lut2 = build_lut(&set, Channel::M2);
        assert_eq!(lut2.entry(&BigUint::from(1u32)), BigUint::from(9u32));
        assert_eq!(lut2.entry(&BigUint::ZERO), BigUint::ZERO);
        let lut3 = build_lut(&set, Channel::M3);
        assert_eq!(lut3.entry(&BigUint::from(1u32)), BigUint::from(7u32));
    }

    #[test]
    fn lut_composition_law() {
        // F^k(Z) = 2^(k(q+1)) Z mod m_i, exhaustive per q up to 12
        for q in [4u32, 9, 12] {
            let set = make_tau_plus(q).unwrap();
            for channel in [Channel::M2, Channel::M3] {
                let lut = build_lut(&set, channel);
                let m = set.channel_modulus(channel);
                let top = 1u64 << (q + 1);
                for z in 0..top {
                    let z = BigUint::from(z);
                    for k in 1..=3u32 {
                        let direct = (&z << (k as u64 * (q as u64 + 1))) % m;
                        assert_eq!(lut.chained(&z, k), direct);
                    }
                }
            }
        }
    }

    #[test]
    fn lazy_matches_materialized() {
        // force the lazy path and compare with a materialized table
        let set = make_tau_plus(20).unwrap();
        for channel in [Channel::M2, Channel::M3] {
            let lut = build_lut(&set, channel);
            assert!(lut.entries.is_none(), "q = 20 must take the lazy path");
            let m = set.channel_modulus(channel);
            let bound = BigUint::one() << 21;
            for i in 0..5000u64 {
                let z = sampling::sample_below(9, i, &bound);
                assert_eq!(lut.entry(&z), (&z << 21) % m);
            }
        }
    }

    #[test]
    fn residue_m1_examples() {
        let set = make_tau_plus(4).unwrap();
        assert_eq!(
            residue_m1(&BigUint::from(100_000u32), &set).unwrap(),
            BigUint::from(160u32)
        );
        assert_eq!(residue_m1(&BigUint::ZERO, &set).unwrap(), BigUint::ZERO);
        assert_eq!(
            residue_m1(&BigUint::from(294_399u32), &set).unwrap(),
            BigUint::from(511u32)
        );
    }

    #[test]
    fn staged_trace_q4() {
        let set = make_tau_plus(4).unwrap();
        let x = BigUint::from(100_000u32);
        assert_eq!(
            residue_mi_staged(&x, &set, Channel::M2).unwrap(),
            BigUint::from(19u32)
        );
        assert_eq!(residue_mi_staged(&x, &set, Channel::M3).unwrap(), BigUint::ZERO);
        assert_eq!(
            residue_mi_staged(&BigUint::ZERO, &set, Channel::M2).unwrap(),
            BigUint::ZERO
        );
        // the traced chain values behind the channel-2 sum 2 + 12 + 5 + 0
        let lut2 = build_lut(&set, Channel::M2);
        assert_eq!(lut2.chained(&BigUint::from(3u32), 3), BigUint::from(2u32));
        assert_eq!(lut2.chained(&BigUint::from(1u32), 2), BigUint::from(12u32));
        assert_eq!(lut2.entry(&BigUint::from(21u32)), BigUint::from(5u32));
    }

    #[test]
    fn staged_equals_direct_exhaustive_q4() {
        let set = make_tau_plus(4).unwrap();
        let luts = ForwardLuts::new(&set);
        let mut max_ratio_num = BigUint::ZERO;
        for v in 0u64..294_400 {
            let x = BigUint::from(v);
            let s2 = staged_with_lut(&x, &set, &luts.lut2).unwrap();
            assert_eq!(s2, &x % &set.m2);
            let s3 = staged_with_lut(&x, &set, &luts.lut3).unwrap();
            assert_eq!(s3, &x % &set.m3);
            // track the raw four-operand sum bound for channel 2
            let sl = split_operand(&x, &set).unwrap();
            let sum = luts.lut2.chained(&sl.x3, 3)
                + luts.lut2.chained(&sl.x2, 2)
                + luts.lut2.entry(&sl.x1)
                + &sl.x0;
            if sum > max_ratio_num {
                max_ratio_num = sum;
            }
        }
        // the sum stays below 3 m_i + 2^(q+1); it does exceed 4 m_i
        let bound = BigUint::from(3u32) * &set.m2 + (BigUint::one() << 5);
        assert!(max_ratio_num < bound);
        assert!(max_ratio_num > BigUint::from(4u32) * &set.m2);
    }

    #[test]
    fn forward_matches_oracle_q4() {
        let set = make_tau_plus(4).unwrap();
        let ms = ModulusList::new(vec![set.m1.clone(), set.m2.clone(), set.m3.clone()]).unwrap();
        let x = BigUint::from(100_000u32);
        let rv = forward(&x, &set).unwrap();
        assert_eq!(
            vec![rv.x1.clone(), rv.x2.clone(), rv.x3.clone()],
            residues_of(&x, &ms).unwrap()
        );
        assert_eq!(rv.x1, BigUint::from(160u32));
        assert_eq!(rv.x2, BigUint::from(19u32));
        assert_eq!(rv.x3, BigUint::ZERO);

        let rv = forward(&BigUint::from(294_399u32), &set).unwrap();
        assert_eq!(rv.x1, BigUint::from(511u32));
        assert_eq!(rv.x2, BigUint::from(22u32));
        assert_eq!(rv.x3, BigUint::from(24u32));

        let rv = forward(&BigUint::ZERO, &set).unwrap();
        assert!(rv.x1.is_zero() && rv.x2.is_zero() && rv.x3.is_zero());
    }

    #[test]
    fn staged_sampled_large_q() {
        for q in [9u32, 12, 16, 24, 32] {
            let set = make_tau_plus(q).unwrap();
            let luts = ForwardLuts::new(&set);
            for i in 0..3000u64 {
                let x = sampling::sample_below(31 + u64::from(q), i, &set.dr);
                assert_eq!(staged_with_lut(&x, &set, &luts.lut2).unwrap(), &x % &set.m2);
                assert_eq!(staged_with_lut(&x, &set, &luts.lut3).unwrap(), &x % &set.m3);
            }
        }
    }
}
