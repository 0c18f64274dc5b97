//! Channel modular adders and RNS addition.
//!
//! Adders are functional: the parallel-prefix circuit structure is out of
//! scope here and enters only through the delay model's coefficients.

use crate::error::{Error, Result};
use crate::moduli::TauPlusSet;
use num_bigint::BigUint;

/// One residue per tau+ channel.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResidueVector {
    pub q: u32,
    pub x1: BigUint,
    pub x2: BigUint,
    pub x3: BigUint,
}

impl ResidueVector {
    /// Builds a vector after checking every residue against its modulus.
    pub fn new(set: &TauPlusSet, x1: BigUint, x2: BigUint, x3: BigUint) -> Result<Self> {
        for (value, modulus, what) in [
            (&x1, &set.m1, "x1"),
            (&x2, &set.m2, "x2"),
            (&x3, &set.m3, "x3"),
        ] {
            if value >= modulus {
                return Err(Error::OutOfRange {
                    what,
                    value: value.to_string(),
                    limit: modulus.to_string(),
                });
            }
        }
        Ok(ResidueVector {
            q: set.q,
            x1,
            x2,
            x3,
        })
    }

    pub fn zero(set: &TauPlusSet) -> Self {
        ResidueVector {
            q: set.q,
            x1: BigUint::ZERO,
            x2: BigUint::ZERO,
            x3: BigUint::ZERO,
        }
    }

    /// The largest representable vector: every channel at modulus - 1.
    pub fn endpoint(set: &TauPlusSet) -> Self {
        let one = BigUint::from(1u32);
        ResidueVector {
            q: set.q,
            x1: &set.m1 - &one,
            x2: &set.m2 - &one,
            x3: &set.m3 - &one,
        }
    }
}

/// `(a + b) mod m` for `a, b < m`; needs at most one subtraction.
pub fn mod_add(a: &BigUint, b: &BigUint, m: &BigUint) -> Result<BigUint> {
    for (value, what) in [(a, "left operand"), (b, "right operand")] {
        if value >= m {
            return Err(Error::OutOfRange {
                what,
                value: value.to_string(),
                limit: m.to_string(),
            });
        }
    }
    let mut sum = a + b;
    if &sum >= m {
        sum -= m;
    }
    Ok(sum)
}

/// Sum of `terms` modulo `m`, folded incrementally so every intermediate
/// stays below `2m`.
pub fn mod_multi_add(terms: &[BigUint], m: &BigUint) -> Result<BigUint> {
    let (first, rest) = terms.split_first().ok_or(Error::EmptyTerms)?;
    if first >= m {
        return Err(Error::OutOfRange {
            what: "term",
            value: first.to_string(),
            limit: m.to_string(),
        });
    }
    let mut acc = first.clone();
    for term in rest {
        acc = mod_add(&acc, term, m)?;
    }
    Ok(acc)
}

/// Channel-wise modular addition of two residue vectors.
pub fn rns_add(u: &ResidueVector, v: &ResidueVector, set: &TauPlusSet) -> Result<ResidueVector> {
    if u.q != v.q || u.q != set.q {
        return Err(Error::QMismatch {
            left: u.q,
            right: if u.q != v.q { v.q } else { set.q },
        });
    }
    Ok(ResidueVector {
        q: set.q,
        x1: mod_add(&u.x1, &v.x1, &set.m1)?,
        x2: mod_add(&u.x2, &v.x2, &set.m2)?,
        x3: mod_add(&u.x3, &v.x3, &set.m3)?,
    })
}
