//! The tau+ and tau moduli sets and their derived constants.
//!
//! tau+ is `{2^(2q+1), 2^q + 2^(q-1) - 1, 2^q + 2^(q-1) + 1}`. The two odd
//! moduli are conjugates two apart, their product collapses to
//! `9*2^(2q-2) - 1 = 2^(2q+1) + 2^(2q-2) - 1`, and the multiplicative
//! inverses used by the reverse converter have closed forms:
//! `mu2 = 3*2^(q-2)` inverts m3 modulo m2, and `mu1 = 9*2^(2q-5) + 1`
//! inverts m1 modulo m2*m3. The auxiliary-identity suite checks all of
//! these exactly for any supported q.

use crate::error::{Error, Result};
use crate::sampling;
use num_bigint::BigUint;
use num_traits::One;

/// 2^e as an unbounded integer.
pub fn pow2(e: u64) -> BigUint {
    BigUint::one() << e
}

/// The tau+ moduli set for one channel parameter, with derived constants.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TauPlusSet {
    pub q: u32,
    /// 2^(2q+1)
    pub m1: BigUint,
    /// 2^q + 2^(q-1) - 1
    pub m2: BigUint,
    /// 2^q + 2^(q-1) + 1
    pub m3: BigUint,
    /// m2*m3 = 9*2^(2q-2) - 1, the reverse converter's final modulus
    pub pair_modulus: BigUint,
    /// m1*m2*m3
    pub dr: BigUint,
    /// inverse of m1 modulo m2*m3
    pub mu1: BigUint,
    /// inverse of m3 modulo m2
    pub mu2: BigUint,
}

/// Minimum q for which the derived constants are integral.
pub const MIN_Q: u32 = 3;

/// Builds the tau+ set for `q >= 3`.
///
/// `mu1 = 9*2^(2q-5) + 1` needs `2q >= 5`, and the low-order slicings used
/// downstream need `q >= 3`, so smaller q is rejected.
pub fn make_tau_plus(q: u32) -> Result<TauPlusSet> {
    if q < MIN_Q {
        return Err(Error::QBelowMinimum {
            q,
            min: MIN_Q,
            what: "tau+ moduli set",
        });
    }
    let q = q as u64;
    let m1 = pow2(2 * q + 1);
    let m2 = pow2(q) + pow2(q - 1) - BigUint::one();
    let m3 = &m2 + 2u32;
    let pair_modulus = &m2 * &m3;
    let dr = &m1 * &pair_modulus;
    let mu2 = BigUint::from(3u32) << (q - 2);
    let mu1 = (BigUint::from(9u32) << (2 * q - 5)) + BigUint::one();
    Ok(TauPlusSet {
        q: q as u32,
        m1,
        m2,
        m3,
        pair_modulus,
        dr,
        mu1,
        mu2,
    })
}

impl TauPlusSet {
    /// m1*m2*m3, recomputed as a product.
    pub fn dynamic_range(&self) -> BigUint {
        &self.m1 * &self.m2 * &self.m3
    }

    /// Modulus of the requested odd channel (2 or 3).
    pub fn channel_modulus(&self, channel: Channel) -> &BigUint {
        match channel {
            Channel::M2 => &self.m2,
            Channel::M3 => &self.m3,
        }
    }
}

/// Closed form of the tau+ dynamic range: 2^(4q+2) + 2^(4q-1) - 2^(2q+1).
pub fn dynamic_range_closed_form(q: u32) -> BigUint {
    let q = q as u64;
    pow2(4 * q + 2) + pow2(4 * q - 1) - pow2(2 * q + 1)
}

/// One of the two odd tau+ channels.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Channel {
    M2,
    M3,
}

impl Channel {
    pub fn index(self) -> u8 {
        match self {
            Channel::M2 => 2,
            Channel::M3 => 3,
        }
    }
}

/// The classical tau set `{2^q', 2^q' - 1, 2^q' + 1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TauSet {
    pub qp: u32,
    pub moduli: (BigUint, BigUint, BigUint),
    /// 2^(3q') - 2^q'
    pub dr: BigUint,
}

pub fn make_tau(qp: u32) -> Result<TauSet> {
    if qp < 3 {
        return Err(Error::QBelowMinimum {
            q: qp,
            min: 3,
            what: "tau moduli set",
        });
    }
    let e = qp as u64;
    let m1 = pow2(e);
    let m2 = &m1 - BigUint::one();
    let m3 = &m1 + BigUint::one();
    let dr = &m1 * &m2 * &m3;
    debug_assert_eq!(dr, pow2(3 * e) - pow2(e));
    Ok(TauSet {
        qp,
        moduli: (m1, m2, m3),
        dr,
    })
}

/// Outcome of one auxiliary-identity check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IdentityStatus {
    Pass,
    /// Identity failed; carries the witness that broke it.
    Fail(String),
    /// Identity does not apply at this q; carries the reason.
    Skipped(String),
}

#[derive(Debug, Clone)]
pub struct IdentityCheck {
    pub label: char,
    pub status: IdentityStatus,
}

/// Report of the identity suite at one q.
#[derive(Debug, Clone)]
pub struct IdentityReport {
    pub q: u32,
    pub checks: Vec<IdentityCheck>,
}

impl IdentityReport {
    pub fn all_hold(&self) -> bool {
        self.checks
            .iter()
            .all(|c| !matches!(c.status, IdentityStatus::Fail(_)))
    }

    pub fn skipped(&self) -> Vec<char> {
        self.checks
            .iter()
            .filter(|c| matches!(c.status, IdentityStatus::Skipped(_)))
            .map(|c| c.label)
            .collect()
    }
}

/// Number of sampled triples used for the universally quantified identity (a).
const IDENTITY_A_SAMPLES: u64 = 1000;

/// Checks the auxiliary identities (a)-(h) behind the reverse converter.
///
/// (a) is universally quantified, so it is checked on 1000 seeded triples
/// with both moduli below 2^16. (h) is exact only for q >= 4; at q = 3 the
/// factor 2^(q-4) is fractional and the check is recorded as skipped.
pub fn verify_appendix_identities(q: u32) -> Result<IdentityReport> {
    let set = make_tau_plus(q)?;
    let qe = q as u64;
    let mut checks = Vec::new();
    let mut push = |label: char, ok: bool, witness: String| {
        let status = if ok {
            IdentityStatus::Pass
        } else {
            IdentityStatus::Fail(witness)
        };
        checks.push(IdentityCheck { label, status });
    };

    // (a) m*(Z mod m') == (m*Z) mod (m*m') on sampled (m, m', Z)
    {
        let bound16 = pow2(16) - BigUint::from(2u32);
        let bound_z = pow2(32);
        let mut ok = true;
        let mut witness = String::new();
        for i in 0..IDENTITY_A_SAMPLES {
            let m = sampling::sample_below(0xA0 ^ u64::from(q), 3 * i, &bound16) + 2u32;
            let mp = sampling::sample_below(0xA0 ^ u64::from(q), 3 * i + 1, &bound16) + 2u32;
            let z = sampling::sample_below(0xA0 ^ u64::from(q), 3 * i + 2, &bound_z);
            let lhs = &m * (&z % &mp);
            let rhs = (&m * &z) % (&m * &mp);
            if lhs != rhs {
                ok = false;
                witness = format!("m={m}, m'={mp}, Z={z}");
                break;
            }
        }
        push('a', ok, witness);
    }

    // (b) mu2*m3 == 1 (mod m2), with mu2 = 3*2^(q-2)
    {
        let prod = (&set.mu2 * &set.m3) % &set.m2;
        push('b', prod.is_one(), format!("|mu2*m3| mod m2 = {prod}"));
    }

    // (c) 2*mu2 == m2 + 1
    {
        let lhs = &set.mu2 << 1;
        let rhs = &set.m2 + BigUint::one();
        push('c', lhs == rhs, format!("2*mu2 = {lhs}, m2+1 = {rhs}"));
    }

    // (d)/(e) 16-way split recomposition of sampled channel residues
    for (label, modulus) in [('d', &set.m2), ('e', &set.m3)] {
        let mut ok = true;
        let mut witness = String::new();
        let mut values: Vec<BigUint> = (0..200u64)
            .map(|i| sampling::sample_below(0xD0 ^ u64::from(q), i, modulus))
            .collect();
        values.push(BigUint::ZERO);
        values.push(modulus - BigUint::one());
        for x in values {
            let hi = &x >> 4;
            let lo = &x & BigUint::from(15u32);
            if (hi << 4) + lo != x {
                ok = false;
                witness = format!("x = {x}");
                break;
            }
        }
        push(label, ok, witness);
    }

    // (f) mu1*m1 == 1 (mod m2*m3), with mu1 = 2^(2q-2) + 2^(2q-5) + 1
    {
        let prod = (&set.mu1 * &set.m1) % &set.pair_modulus;
        let closed = pow2(2 * qe - 2) + pow2(2 * qe - 5) + BigUint::one();
        push(
            'f',
            prod.is_one() && set.mu1 == closed,
            format!("|mu1*m1| mod m2m3 = {prod}"),
        );
    }

    // (g) 8*mu1 == 9 (mod m2*m3)
    {
        let prod = (&set.mu1 << 3) % &set.pair_modulus;
        push('g', prod == BigUint::from(9u32), format!("|8*mu1| = {prod}"));
    }

    // (h) mu1 == 3*2^(q-4)*(m2+1) + 1, exact integers, q >= 4 only
    if q >= 4 {
        let rhs = (BigUint::from(3u32) << (qe - 4)) * (&set.m2 + BigUint::one()) + BigUint::one();
        push('h', set.mu1 == rhs, format!("3*2^(q-4)*(m2+1)+1 = {rhs}"));
    } else {
        checks.push(IdentityCheck {
            label: 'h',
            status: IdentityStatus::Skipped("2^(q-4) is fractional at q = 3".into()),
        });
    }

    Ok(IdentityReport { q, checks })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_integer::Integer;
    use num_traits::Zero;

    #[test]
    fn q4_moduli() {
        let s = make_tau_plus(4).unwrap();
        assert_eq!(s.m1, BigUint::from(512u32));
        assert_eq!(s.m2, BigUint::from(23u32));
        assert_eq!(s.m3, BigUint::from(25u32));
        assert_eq!(s.pair_modulus, BigUint::from(575u32));
        assert_eq!(s.mu1, BigUint::from(73u32));
        assert_eq!(s.mu2, BigUint::from(12u32));
    }

    #[test]
    fn q8_moduli() {
        let s = make_tau_plus(8).unwrap();
        assert_eq!(s.m1, BigUint::from(131_072u32));
        assert_eq!(s.m2, BigUint::from(383u32));
        assert_eq!(s.m3, BigUint::from(385u32));
    }

    #[test]
    fn q2_rejected() {
        assert!(matches!(
            make_tau_plus(2),
            Err(Error::QBelowMinimum { q: 2, min: 3, .. })
        ));
    }

    #[test]
    fn dynamic_range_q4() {
        let s = make_tau_plus(4).unwrap();
        assert_eq!(s.dynamic_range(), BigUint::from(294_400u32));
        assert_eq!(dynamic_range_closed_form(4), BigUint::from(294_400u32));
    }

    #[test]
    fn dynamic_range_q3() {
        let s = make_tau_plus(3).unwrap();
        assert_eq!(s.dynamic_range(), BigUint::from(18_304u32));
    }

    #[test]
    fn dynamic_range_matches_closed_form_up_to_64() {
        for q in 3..=64 {
            let s = make_tau_plus(q).unwrap();
            assert_eq!(s.dynamic_range(), dynamic_range_closed_form(q), "q = {q}");
            assert_eq!(s.dr, s.dynamic_range());
        }
    }

    #[test]
    fn set_invariants() {
        for q in 3..=40 {
            let s = make_tau_plus(q).unwrap();
            assert_eq!(s.m3, &s.m2 + 2u32);
            assert!(s.m2.gcd(&s.m3).is_one());
            assert!(s.m1.gcd(&s.m2).is_one());
            assert!(s.m1.gcd(&s.m3).is_one());
            assert_eq!(s.pair_modulus, &s.m2 * &s.m3);
            assert_eq!(
                s.pair_modulus,
                pow2(2 * q as u64 + 1) + pow2(2 * q as u64 - 2) - BigUint::one()
            );
            assert!(((&s.mu2 * &s.m3) % &s.m2).is_one());
            assert!(((&s.mu1 * &s.m1) % &s.pair_modulus).is_one());
        }
    }

    #[test]
    fn identity_examples_q4() {
        // |12*25| mod 23 = 1, |8*73| mod 575 = 9, 2*12 = 23 + 1
        let s = make_tau_plus(4).unwrap();
        assert_eq!((&s.mu2 * &s.m3) % &s.m2, BigUint::one());
        assert_eq!((BigUint::from(8u32) * &s.mu1) % &s.pair_modulus, BigUint::from(9u32));
        assert_eq!(&s.mu2 << 1, &s.m2 + BigUint::one());
    }

    #[test]
    fn identity_suite_passes_q3_to_64() {
        for q in 3..=64 {
            let report = verify_appendix_identities(q).unwrap();
            assert!(report.all_hold(), "identity failure at q = {q}: {report:?}");
            if q == 3 {
                assert_eq!(report.skipped(), vec!['h'], "h must be skipped at q = 3");
            } else {
                assert!(report.skipped().is_empty());
            }
        }
    }

    #[test]
    fn tau_set_q3() {
        let t = make_tau(3).unwrap();
        assert_eq!(t.moduli.0, BigUint::from(8u32));
        assert_eq!(t.moduli.1, BigUint::from(7u32));
        assert_eq!(t.moduli.2, BigUint::from(9u32));
        assert_eq!(t.dr, BigUint::from(504u32));
        assert!(!t.dr.is_zero());
    }
}
