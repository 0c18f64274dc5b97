//! Ground-truth converters used to validate everything else.
//!
//! Three independent routes from residues back to the integer: direct
//! remaindering for the forward direction, Garner's mixed-radix
//! reconstruction for arbitrary pairwise-coprime moduli, and the nested
//! New-CRT form built from pairwise multiplicative inverses. The routines
//! here favor obviousness over speed.

use crate::error::{Error, Result};
use crate::moduli::TauSet;
use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// An ordered list of pairwise-coprime moduli, each at least 2.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModulusList {
    moduli: Vec<BigUint>,
}

impl ModulusList {
    pub fn new(moduli: Vec<BigUint>) -> Result<Self> {
        let two = BigUint::from(2u32);
        for m in &moduli {
            if m < &two {
                return Err(Error::ModulusTooSmall {
                    value: m.to_string(),
                });
            }
        }
        for i in 0..moduli.len() {
            for j in i + 1..moduli.len() {
                if !moduli[i].gcd(&moduli[j]).is_one() {
                    return Err(Error::NotCoprime {
                        a: moduli[i].to_string(),
                        b: moduli[j].to_string(),
                    });
                }
            }
        }
        Ok(ModulusList { moduli })
    }

    pub fn moduli(&self) -> &[BigUint] {
        &self.moduli
    }

    pub fn product(&self) -> BigUint {
        self.moduli.iter().product()
    }
}

/// Modular inverse by the extended Euclidean algorithm.
///
/// Returns `y` with `a*y == 1 (mod m)`, or `None` when `gcd(a, m) != 1`.
pub fn mod_inverse(a: &BigUint, m: &BigUint) -> Option<BigUint> {
    let mut r0 = BigInt::from(m.clone());
    let mut r1 = BigInt::from(a % m);
    let mut t0 = BigInt::zero();
    let mut t1 = BigInt::one();
    while !r1.is_zero() {
        let quotient = &r0 / &r1;
        let r2 = &r0 - &quotient * &r1;
        r0 = std::mem::replace(&mut r1, r2);
        let t2 = &t0 - &quotient * &t1;
        t0 = std::mem::replace(&mut t1, t2);
    }
    if !r0.is_one() {
        return None;
    }
    let m_signed = BigInt::from(m.clone());
    let mut t = t0 % &m_signed;
    if t.is_negative() {
        t += &m_signed;
    }
    Some(t.to_biguint().expect("normalized to nonnegative"))
}

fn check_residues(rs: &[BigUint], ms: &ModulusList) -> Result<()> {
    if rs.len() != ms.moduli.len() {
        return Err(Error::LengthMismatch {
            residues: rs.len(),
            moduli: ms.moduli.len(),
        });
    }
    for (r, m) in rs.iter().zip(&ms.moduli) {
        if r >= m {
            return Err(Error::OutOfRange {
                what: "residue",
                value: r.to_string(),
                limit: m.to_string(),
            });
        }
    }
    Ok(())
}

/// Residues of `x` under each modulus; `x` must lie in the dynamic range.
pub fn residues_of(x: &BigUint, ms: &ModulusList) -> Result<Vec<BigUint>> {
    let product = ms.product();
    if x >= &product {
        return Err(Error::OutOfRange {
            what: "operand",
            value: x.to_string(),
            limit: product.to_string(),
        });
    }
    Ok(ms.moduli.iter().map(|m| x % m).collect())
}

/// Garner's mixed-radix reconstruction: the unique `x` in `[0, prod(m))`
/// with `x mod m_i == rs[i]`.
pub fn crt_reconstruct(rs: &[BigUint], ms: &ModulusList) -> Result<BigUint> {
    check_residues(rs, ms)?;
    let mut x = rs[0].clone();
    let mut prefix = ms.moduli[0].clone();
    for (r, m) in rs[1..].iter().zip(&ms.moduli[1..]) {
        let inv = mod_inverse(&(&prefix % m), m).expect("pairwise coprime by construction");
        // t = (r_i - x) * prefix^-1 mod m_i
        let x_mod = &x % m;
        let diff = if r >= &x_mod {
            r - &x_mod
        } else {
            m - &x_mod + r
        };
        let t = (diff * inv) % m;
        x += &prefix * t;
        prefix *= m;
    }
    Ok(x)
}

/// Nested New-CRT reconstruction.
///
/// `X = x_1 + m_1 * | sum_i mu_i (x_{i+1} - x_i) |_{M_1}` where
/// `mu_i = (prod_{j=2..=i} m_j) * inverse(prod_{j=1..=i} m_j  mod  P_i)`
/// and `P_i = prod_{j=i+1..=k} m_j`. The inverses are recomputed from the
/// moduli; closed-form coefficient identities are asserted in tests, not
/// used as the computation path.
pub fn new_crt_general(rs: &[BigUint], ms: &ModulusList) -> Result<BigUint> {
    check_residues(rs, ms)?;
    let k = ms.moduli.len();
    if k == 1 {
        return Ok(rs[0].clone());
    }
    let m1_cap: BigUint = ms.moduli[1..].iter().product();
    let m1_signed = BigInt::from(m1_cap.clone());

    let mut acc = BigInt::zero();
    let mut p_tail = BigUint::one(); // prod_{j=2..=i} m_j
    let mut p_full = ms.moduli[0].clone(); // prod_{j=1..=i} m_j
    for i in 1..k {
        let suffix: BigUint = ms.moduli[i..].iter().product();
        let inv = mod_inverse(&(&p_full % &suffix), &suffix).expect("pairwise coprime");
        let mu = BigInt::from(&p_tail * inv);
        let delta = BigInt::from(rs[i].clone()) - BigInt::from(rs[i - 1].clone());
        acc += mu * delta;
        p_tail *= &ms.moduli[i];
        p_full *= &ms.moduli[i];
    }
    let mut inner = acc % &m1_signed;
    if inner.is_negative() {
        inner += &m1_signed;
    }
    let inner = inner.to_biguint().expect("normalized");
    Ok(&rs[0] + &ms.moduli[0] * inner)
}

/// New-CRT reverse conversion for the classical tau set.
pub fn reverse_tau(rs: &(BigUint, BigUint, BigUint), set: &TauSet) -> Result<BigUint> {
    let ms = ModulusList::new(vec![
        set.moduli.0.clone(),
        set.moduli.1.clone(),
        set.moduli.2.clone(),
    ])?;
    new_crt_general(&[rs.0.clone(), rs.1.clone(), rs.2.clone()], &ms)
}
