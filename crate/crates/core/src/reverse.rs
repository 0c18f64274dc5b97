//! Residue-to-binary conversion for tau+, in three mutually checking forms.
//!
//! The functional path composes the New CRT twice: first over the odd pair
//! {m2, m3}, then over {m1, m2*m3}. The thirteen-term evaluator computes
//! the same X' from complemented slices and weighted powers in one bracket
//! reduced modulo 9*2^(2q-2)-1. The structural path lays the bracket out
//! as thirteen (2q+1)-bit rows of single-bit cells plus one folded
//! constant, the form the carry-save scheduler consumes.
//!
//! The two structural forms require q >= 9: several cell weights (2^(q-5)
//! and below) and the constant tail go negative for smaller q.

use crate::adder::ResidueVector;
use crate::error::{Error, Result};
use crate::moduli::{pow2, TauPlusSet};
use num_bigint::{BigInt, BigUint};
use num_traits::One;

/// Minimum q for the thirteen-term evaluator and the bit matrix.
pub const MIN_STRUCTURAL_Q: u32 = 9;

/// The sliced residues the reverse converter works on: x1 split at bit 3,
/// x2 and x3 split at bit 4.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResidueSplit {
    /// bits 2q..3 of x1
    pub x1p: BigUint,
    /// bits 2..0 of x1
    pub x1pp: BigUint,
    /// bits q..4 of x2
    pub x2p: BigUint,
    /// bits 3..0 of x2
    pub x2pp: BigUint,
    /// bits q..4 of x3
    pub x3p: BigUint,
    /// bits 3..0 of x3
    pub x3pp: BigUint,
}

/// Slices a residue vector per the split the converter uses.
pub fn split_residues(rv: &ResidueVector) -> ResidueSplit {
    let fifteen = BigUint::from(15u32);
    let seven = BigUint::from(7u32);
    ResidueSplit {
        x1p: &rv.x1 >> 3,
        x1pp: &rv.x1 & &seven,
        x2p: &rv.x2 >> 4,
        x2pp: &rv.x2 & &fifteen,
        x3p: &rv.x3 >> 4,
        x3pp: &rv.x3 & &fifteen,
    }
}

fn check_vector(rv: &ResidueVector, set: &TauPlusSet) -> Result<()> {
    if rv.q != set.q {
        return Err(Error::QMismatch {
            left: rv.q,
            right: set.q,
        });
    }
    for (value, modulus, what) in [
        (&rv.x1, &set.m1, "x1"),
        (&rv.x2, &set.m2, "x2"),
        (&rv.x3, &set.m3, "x3"),
    ] {
        if value >= modulus {
            return Err(Error::OutOfRange {
                what,
                value: value.to_string(),
                limit: modulus.to_string(),
            });
        }
    }
    Ok(())
}

/// New CRT over the odd pair: the unique X23 below m2*m3 congruent to x2
/// and x3 in their channels, as `x3 + m3 * |mu2 (x2 - x3)|_{m2}`.
pub fn crt_pair_x23(x2: &BigUint, x3: &BigUint, set: &TauPlusSet) -> Result<BigUint> {
    for (value, modulus, what) in [(x2, &set.m2, "x2"), (x3, &set.m3, "x3")] {
        if value >= modulus {
            return Err(Error::OutOfRange {
                what,
                value: value.to_string(),
                limit: modulus.to_string(),
            });
        }
    }
    let diff = (x2 + &set.m2 - x3 % &set.m2) % &set.m2;
    let inner = (&set.mu2 * diff) % &set.m2;
    Ok(x3 + &set.m3 * inner)
}

/// X' = |mu1 (X23 - x1)|_{m2 m3}; the high part of X = x1 + 2^(2q+1) X'.
pub fn x_prime(rv: &ResidueVector, set: &TauPlusSet) -> Result<BigUint> {
    check_vector(rv, set)?;
    let x23 = crt_pair_x23(&rv.x2, &rv.x3, set)?;
    let m = &set.pair_modulus;
    let diff = (x23 + m - &rv.x1 % m) % m;
    Ok((&set.mu1 * diff) % m)
}

/// Functional reverse conversion: `x1 + 2^(2q+1) * X'`.
pub fn reverse_functional(rv: &ResidueVector, set: &TauPlusSet) -> Result<BigUint> {
    let xp = x_prime(rv, set)?;
    Ok(&rv.x1 + &set.m1 * xp)
}

fn check_structural_q(set: &TauPlusSet, what: &'static str) -> Result<()> {
    if set.q < MIN_STRUCTURAL_Q {
        return Err(Error::QBelowMinimum {
            q: set.q,
            min: MIN_STRUCTURAL_Q,
            what,
        });
    }
    Ok(())
}

/// The thirteen-term arithmetic evaluator for X'.
///
/// Terms follow the bracket shape exactly: complemented slices stand in
/// for the negative ones, juxtaposed bits are bit-field values (for
/// example `x2_2 x2_1 x2_0` is the low three bits of x2 as an integer),
/// and a constant tail closes the books. Requires q >= 9.
pub fn x_prime_eq9(rv: &ResidueVector, set: &TauPlusSet) -> Result<BigUint> {
    check_structural_q(set, "thirteen-term X' evaluator")?;
    check_vector(rv, set)?;
    let q = set.q as u64;
    let s = split_residues(rv);
    let seven = BigUint::from(7u32);
    let one = BigUint::one();

    let not_x1p = (pow2(2 * q - 2) - &one) - &s.x1p;
    let not_x1pp = &seven - &s.x1pp;
    let not_x3p = (pow2(q - 3) - &one) - &s.x3p;
    let not_x3pp = BigUint::from(15u32) - &s.x3pp;

    // bit-field shorthands over the low nibbles
    let x2_low3 = &rv.x2 & &seven; // x2_2 x2_1 x2_0
    let x2_mid3 = (&rv.x2 >> 1) & &seven; // x2_3 x2_2 x2_1
    let not_x2_mid3 = &seven - &x2_mid3;
    let x3_mid3 = (&rv.x3 >> 1) & &seven; // x3_3 x3_2 x3_1
    let not_x3_mid3 = &seven - &x3_mid3;
    let x2_bit0 = &rv.x2 & &one;
    let x2_bit3 = (&rv.x2 >> 3) & &one;
    let not_x2_bit3 = &one - &x2_bit3;
    let not_x3_bit0 = &one - (&rv.x3 & &one);

    let mut t = BigUint::ZERO;
    // (2^(q+3) + 2^(q+2) + 2^q + 2^(q-1)) (x2' + ~x3')
    t += (pow2(q + 3) + pow2(q + 2) + pow2(q) + pow2(q - 1)) * (&s.x2p + &not_x3p);
    // x3''
    t += &s.x3pp;
    // 9 (~x1' + x2' + x3')
    t += BigUint::from(9u32) * (&not_x1p + &s.x2p + &s.x3p);
    // 2^(2q-2) x2_2x2_1x2_0
    t += pow2(2 * q - 2) * &x2_low3;
    // (2^(2q-2) + 2^(2q-5) + 1) ~x1''
    t += (pow2(2 * q - 2) + pow2(2 * q - 5) + &one) * &not_x1pp;
    // 2^(2q-6) (x2'' + x3'')
    t += pow2(2 * q - 6) * (&s.x2pp + &s.x3pp);
    // 2^(2q-2) (~x2_3~x2_2~x2_1 + x3_3x3_2x3_1)
    t += pow2(2 * q - 2) * (&not_x2_mid3 + &x3_mid3);
    // 2^(2q-2) ~x2_3 + x2_3
    t += pow2(2 * q - 2) * &not_x2_bit3;
    t += &x2_bit3;
    // (2^(q-1) + 2^(q-2) + 2^(q-4) + 2^(q-5)) (x2'' + ~x3'')
    t += (pow2(q - 1) + pow2(q - 2) + pow2(q - 4) + pow2(q - 5)) * (&s.x2pp + &not_x3pp);
    // ~x3_3~x3_2~x3_1
    t += &not_x3_mid3;
    // 2^2q (x2_0 + ~x3_0)
    t += pow2(2 * q) * (&x2_bit0 + &not_x3_bit0);
    // x2_3x2_2x2_1
    t += &x2_mid3;
    // constant tail
    t += pow2(2 * q - 4) + pow2(2 * q - 5) + pow2(q - 1) + pow2(q - 2) + pow2(q - 4) + pow2(q - 5)
        - BigUint::from(9u32);

    Ok(t % &set.pair_modulus)
}

/// Which residue a matrix cell reads.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Source {
    X1,
    X2,
    X3,
}

impl Source {
    pub fn name(self) -> &'static str {
        match self {
            Source::X1 => "x1",
            Source::X2 => "x2",
            Source::X3 => "x3",
        }
    }
}

/// One cell of the bit matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cell {
    Zero,
    One,
    Bit {
        source: Source,
        index: u32,
        inverted: bool,
    },
}

/// The X' expression as thirteen weighted rows of single-bit cells.
///
/// `rows[r][col]` is the cell of row `r` at weight `2^col`,
/// `0 <= col <= 2q`. Negative constants arising from the complement
/// rewrites are pre-summed into `constant_row_fold`, a single nonnegative
/// constant modulo the pair modulus added when the matrix is evaluated.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitMatrix {
    pub q: u32,
    pub rows: Vec<Vec<Cell>>,
    pub constant_row_fold: BigUint,
}

pub const MATRIX_ROWS: usize = 13;

impl BitMatrix {
    /// Number of columns, 2q+1.
    pub fn width(&self) -> usize {
        2 * self.q as usize + 1
    }

    /// Count of value-carrying cells (bit references and constant ones)
    /// per column; the initial depth profile for reduction planning.
    pub fn column_depths(&self) -> Vec<u32> {
        let mut depths = vec![0u32; self.width()];
        for row in &self.rows {
            for (col, cell) in row.iter().enumerate() {
                if !matches!(cell, Cell::Zero) {
                    depths[col] += 1;
                }
            }
        }
        depths
    }

    /// Text dump, one row per line, columns left-to-right from weight 2^2q.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for row in &self.rows {
            let mut first = true;
            for cell in row.iter().rev() {
                if !first {
                    out.push(' ');
                }
                first = false;
                match cell {
                    Cell::Zero => out.push('0'),
                    Cell::One => out.push('1'),
                    Cell::Bit {
                        source,
                        index,
                        inverted,
                    } => {
                        if *inverted {
                            out.push('~');
                        }
                        out.push_str(source.name());
                        out.push('[');
                        out.push_str(&index.to_string());
                        out.push(']');
                    }
                }
            }
            out.push('\n');
        }
        out
    }
}

struct MatrixBuilder {
    rows: Vec<Vec<Cell>>,
}

impl MatrixBuilder {
    fn new(width: usize) -> Self {
        MatrixBuilder {
            rows: vec![vec![Cell::Zero; width]; MATRIX_ROWS],
        }
    }

    fn put(&mut self, row: usize, col: u32, cell: Cell) {
        let slot = &mut self.rows[row][col as usize];
        assert!(
            matches!(slot, Cell::Zero),
            "cell collision at row {row}, column {col}"
        );
        *slot = cell;
    }

    fn one(&mut self, row: usize, col: u32) {
        self.put(row, col, Cell::One);
    }

    fn bit(&mut self, row: usize, col: u32, source: Source, index: u32, inverted: bool) {
        self.put(
            row,
            col,
            Cell::Bit {
                source,
                index,
                inverted,
            },
        );
    }

    /// Places bits `bit_lo..=bit_hi` of `source` at columns starting at
    /// `col_lo`, least significant first.
    fn seg(
        &mut self,
        row: usize,
        source: Source,
        bit_lo: u32,
        bit_hi: u32,
        col_lo: u32,
        inverted: bool,
    ) {
        for k in 0..=(bit_hi - bit_lo) {
            self.bit(row, col_lo + k, source, bit_lo + k, inverted);
        }
    }
}

/// Builds the thirteen-row bit matrix for X'. Requires q >= 9.
///
/// The layout mirrors the thirteen-term bracket: rows 1-2 carry the
/// complemented high slice of x1 at weights 1 and 8, rows 3-6 the x2
/// slices, rows 7-13 the x3 complements, low nibbles, and constant bits.
/// Two cells whose printed positions contradict the row progressions are
/// placed where the arithmetic requires them; the matrix is checked
/// bit-for-bit against the functional X' (see tests).
pub fn build_bit_matrix(set: &TauPlusSet) -> Result<BitMatrix> {
    check_structural_q(set, "bit matrix")?;
    let q = set.q;
    let width = 2 * q as usize + 1;
    let mut b = MatrixBuilder::new(width);
    use Source::{X1, X2, X3};

    // rows 1-2: 9 * ~x1'
    b.seg(0, X1, 3, 2 * q, 0, true);
    b.seg(1, X1, 3, 2 * q, 3, true);
    // row 3: low three bits of x2 at 2^(2q-2); the x2_q compensation cells;
    //        x2 bits 4..q-1 at 2^(q-1); x2' at weight 1
    b.seg(2, X2, 0, 2, 2 * q - 2, false);
    b.bit(2, 2 * q - 3, X2, q, false);
    b.one(2, 2 * q - 4);
    b.bit(2, 2 * q - 5, X2, q, true);
    b.seg(2, X2, 4, q - 1, q - 1, false);
    b.seg(2, X2, 4, q, 0, false);
    // row 4: ~(x2 bits 1..3) at 2^(2q-2); x2 bits 4..q-1 at 2^q;
    //        x2' at weight 8; ~x1'' at weight 1
    b.seg(3, X2, 1, 3, 2 * q - 2, true);
    b.seg(3, X2, 4, q - 1, q, false);
    b.seg(3, X2, 4, q, 3, false);
    b.seg(3, X1, 0, 2, 0, true);
    // row 5: x2_0 at 2^2q; x2' at 2^(q+2); constant bits; x3' at weight 1
    b.bit(4, 2 * q, X2, 0, false);
    b.seg(4, X2, 4, q, q + 2, false);
    b.one(4, q - 1);
    b.one(4, q - 2);
    b.seg(4, X3, 4, q, 0, false);
    // row 6: x2' at 2^(q+3); x3' at weight 8; x2 bits 1..3 at weight 1
    b.seg(5, X2, 4, q, q + 3, false);
    b.seg(5, X3, 4, q, 3, false);
    b.seg(5, X2, 1, 3, 0, false);
    // row 7: ~x2_3 at 2^(2q-2); ~x3' at 2^(q-1); x2'' at 2^(q-5); x3'' at 1
    b.bit(6, 2 * q - 2, X2, 3, true);
    b.seg(6, X3, 4, q, q - 1, true);
    b.seg(6, X2, 0, 3, q - 5, false);
    b.seg(6, X3, 0, 3, 0, false);
    // row 8: x3 bits 1..3 at 2^(2q-2); ~x3' at 2^q; x2'' at 2^(q-4);
    //        ~(x3 bits 1..3) at weight 1
    b.seg(7, X3, 1, 3, 2 * q - 2, false);
    b.seg(7, X3, 4, q, q, true);
    b.seg(7, X2, 0, 3, q - 4, false);
    b.seg(7, X3, 1, 3, 0, true);
    // row 9: ~x3_0 at 2^2q; ~x3' at 2^(q+2); x2'' at 2^(q-2); constant;
    //        x2_3 at weight 1
    b.bit(8, 2 * q, X3, 0, true);
    b.seg(8, X3, 4, q, q + 2, true);
    b.seg(8, X2, 0, 3, q - 2, false);
    b.one(8, q - 4);
    b.bit(8, 0, X2, 3, false);
    // row 10: ~x3' at 2^(q+3); x2'' at 2^(q-1); ~x3'' at 2^(q-5);
    //         the constant run and the 0110 low pattern
    b.seg(9, X3, 4, q, q + 3, true);
    b.seg(9, X2, 0, 3, q - 1, false);
    b.seg(9, X3, 0, 3, q - 5, true);
    for col in 4..=q.saturating_sub(6) {
        b.one(9, col);
    }
    b.one(9, 2);
    b.one(9, 1);
    // row 11: x3'' at 2^(2q-6); ~x3'' at 2^(q-4)
    b.seg(10, X3, 0, 3, 2 * q - 6, false);
    b.seg(10, X3, 0, 3, q - 4, true);
    // row 12: ~x1'' at 2^(2q-2) and 2^(2q-5); ~x3'' at 2^(q-2)
    b.seg(11, X1, 0, 2, 2 * q - 2, true);
    b.seg(11, X1, 0, 2, 2 * q - 5, true);
    b.seg(11, X3, 0, 3, q - 2, true);
    // row 13: constant at 2^(2q-1); x2'' at 2^(2q-6); ~x3'' at 2^(q-1)
    b.one(12, 2 * q - 1);
    b.seg(12, X2, 0, 3, 2 * q - 6, false);
    b.seg(12, X3, 0, 3, q - 1, true);

    // Folded constant: the matrix evaluates to X', so on all-zero residues
    // the cells' own value (constants plus inverted cells) must cancel.
    let m = &set.pair_modulus;
    let mut zero_value = BigUint::ZERO;
    for row in &b.rows {
        for (col, cell) in row.iter().enumerate() {
            let is_one_at_zero = match cell {
                Cell::One => true,
                Cell::Bit { inverted, .. } => *inverted,
                Cell::Zero => false,
            };
            if is_one_at_zero {
                zero_value += pow2(col as u64);
            }
        }
    }
    let constant_row_fold = (m - zero_value % m) % m;

    Ok(BitMatrix {
        q,
        rows: b.rows,
        constant_row_fold,
    })
}

/// Binds residue bits into the matrix, sums the thirteen weighted rows and
/// the folded constant, and reduces modulo the pair modulus. Equals
/// `x_prime` exactly.
pub fn eval_bit_matrix(matrix: &BitMatrix, rv: &ResidueVector) -> Result<BigUint> {
    if matrix.q != rv.q {
        return Err(Error::QMismatch {
            left: matrix.q,
            right: rv.q,
        });
    }
    let mut counts = vec![0u32; matrix.width()];
    for row in &matrix.rows {
        for (col, cell) in row.iter().enumerate() {
            if cell_value(cell, rv) {
                counts[col] += 1;
            }
        }
    }
    let mut total = matrix.constant_row_fold.clone();
    for (col, &count) in counts.iter().enumerate() {
        if count > 0 {
            total += BigUint::from(count) << (col as u64);
        }
    }
    let m = (pow2(2 * matrix.q as u64 + 1) + pow2(2 * matrix.q as u64 - 2)) - BigUint::one();
    Ok(total % m)
}

/// Value of one cell under a residue binding.
pub(crate) fn cell_value(cell: &Cell, rv: &ResidueVector) -> bool {
    match cell {
        Cell::Zero => false,
        Cell::One => true,
        Cell::Bit {
            source,
            index,
            inverted,
        } => {
            let raw = match source {
                Source::X1 => rv.x1.bit(u64::from(*index)),
                Source::X2 => rv.x2.bit(u64::from(*index)),
                Source::X3 => rv.x3.bit(u64::from(*index)),
            };
            raw != *inverted
        }
    }
}

/// Decomposition of a carry that leaves the top column:
/// `|2^(2q+1) c| mod (2^(2q+1)+2^(2q-2)-1) = -2^(2q-2) + 2^(2q-2)(1-c) + c`.
///
/// For c = 0 the terms cancel to zero; for c = 1 the contribution is
/// `1 - 2^(2q-2)`, congruent to `2^(2q+1)` modulo the pair modulus.
pub fn reentrant_fold(c: bool, set: &TauPlusSet) -> BigInt {
    let w = BigInt::from(pow2(2 * set.q as u64 - 2));
    let c_term = BigInt::from(u32::from(c));
    let inv_term = &w * BigInt::from(u32::from(!c));
    -&w + inv_term + c_term
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forward::forward;
    use crate::moduli::make_tau_plus;
    use crate::sampling;
    use num_traits::Zero;

    fn rv(set: &TauPlusSet, x1: u64, x2: u64, x3: u64) -> ResidueVector {
        ResidueVector::new(set, x1.into(), x2.into(), x3.into()).unwrap()
    }

    #[test]
    fn pair_crt_examples_q4() {
        let set = make_tau_plus(4).unwrap();
        assert_eq!(
            crt_pair_x23(&19u32.into(), &0u32.into(), &set).unwrap(),
            BigUint::from(525u32)
        );
        assert_eq!(
            crt_pair_x23(&0u32.into(), &0u32.into(), &set).unwrap(),
            BigUint::ZERO
        );
        assert_eq!(
            crt_pair_x23(&22u32.into(), &24u32.into(), &set).unwrap(),
            BigUint::from(574u32)
        );
        assert!(crt_pair_x23(&23u32.into(), &0u32.into(), &set).is_err());
    }

    #[test]
    fn pair_crt_is_exact_crt_q4() {
        let set = make_tau_plus(4).unwrap();
        for x2 in 0u32..23 {
            for x3 in 0u32..25 {
                let x23 = crt_pair_x23(&x2.into(), &x3.into(), &set).unwrap();
                assert!(x23 < set.pair_modulus);
                assert_eq!(&x23 % &set.m2, BigUint::from(x2));
                assert_eq!(&x23 % &set.m3, BigUint::from(x3));
            }
        }
    }

    #[test]
    fn x_prime_examples_q4() {
        let set = make_tau_plus(4).unwrap();
        assert_eq!(
            x_prime(&rv(&set, 160, 19, 0), &set).unwrap(),
            BigUint::from(195u32)
        );
        assert_eq!(x_prime(&rv(&set, 0, 0, 0), &set).unwrap(), BigUint::ZERO);
        assert_eq!(
            x_prime(&rv(&set, 511, 22, 24), &set).unwrap(),
            BigUint::from(574u32)
        );
    }

    #[test]
    fn reverse_examples_q4() {
        let set = make_tau_plus(4).unwrap();
        assert_eq!(
            reverse_functional(&rv(&set, 160, 19, 0), &set).unwrap(),
            BigUint::from(100_000u32)
        );
        assert_eq!(
            reverse_functional(&rv(&set, 0, 0, 0), &set).unwrap(),
            BigUint::ZERO
        );
        assert_eq!(
            reverse_functional(&rv(&set, 511, 22, 24), &set).unwrap(),
            BigUint::from(294_399u32)
        );
    }

    #[test]
    fn round_trip_exhaustive_q4() {
        let set = make_tau_plus(4).unwrap();
        let luts = crate::forward::ForwardLuts::new(&set);
        for v in 0u64..294_400 {
            let x = BigUint::from(v);
            let rv = crate::forward::forward_with_luts(&x, &set, &luts).unwrap();
            assert_eq!(reverse_functional(&rv, &set).unwrap(), x);
        }
    }

    #[test]
    fn residue_split_invariants() {
        let set = make_tau_plus(9).unwrap();
        for i in 0..500u64 {
            let x1 = sampling::sample_below(1, i, &set.m1);
            let x2 = sampling::sample_below(2, i, &set.m2);
            let x3 = sampling::sample_below(3, i, &set.m3);
            let v = ResidueVector::new(&set, x1.clone(), x2.clone(), x3.clone()).unwrap();
            let s = split_residues(&v);
            assert_eq!((&s.x1p << 3) + &s.x1pp, x1);
            assert_eq!((&s.x2p << 4) + &s.x2pp, x2);
            assert_eq!((&s.x3p << 4) + &s.x3pp, x3);
        }
    }

    #[test]
    fn eq9_requires_q9() {
        let set = make_tau_plus(8).unwrap();
        let v = ResidueVector::zero(&set);
        assert!(matches!(
            x_prime_eq9(&v, &set),
            Err(Error::QBelowMinimum { min: 9, .. })
        ));
        assert!(build_bit_matrix(&set).is_err());
    }

    #[test]
    fn eq9_endpoints() {
        for q in [9u32, 12] {
            let set = make_tau_plus(q).unwrap();
            let zero = ResidueVector::zero(&set);
            assert_eq!(x_prime_eq9(&zero, &set).unwrap(), BigUint::ZERO);
            let end = ResidueVector::endpoint(&set);
            let expect = &set.pair_modulus - BigUint::one();
            assert_eq!(x_prime_eq9(&end, &set).unwrap(), expect);
            assert_eq!(x_prime(&end, &set).unwrap(), expect);
        }
    }

    #[test]
    fn eq9_matches_functional_sampled() {
        for q in [9u32, 10, 12] {
            let set = make_tau_plus(q).unwrap();
            for i in 0..20_000u64 {
                let v = ResidueVector::new(
                    &set,
                    sampling::sample_below(100 + u64::from(q), 3 * i, &set.m1),
                    sampling::sample_below(100 + u64::from(q), 3 * i + 1, &set.m2),
                    sampling::sample_below(100 + u64::from(q), 3 * i + 2, &set.m3),
                )
                .unwrap();
                assert_eq!(
                    x_prime_eq9(&v, &set).unwrap(),
                    x_prime(&v, &set).unwrap(),
                    "q = {q}, sample {i}"
                );
            }
        }
    }

    #[test]
    fn matrix_has_thirteen_rows_and_expected_cells() {
        let set = make_tau_plus(9).unwrap();
        let m = build_bit_matrix(&set).unwrap();
        assert_eq!(m.rows.len(), 13);
        assert_eq!(m.width(), 19);
        // row 1, column 2q-3 holds the inverted top bit of x1
        assert_eq!(
            m.rows[0][(2 * 9 - 3) as usize],
            Cell::Bit {
                source: Source::X1,
                index: 18,
                inverted: true
            }
        );
        // folded constant has the closed form 7 * 2^(2q-2)
        assert_eq!(m.constant_row_fold, BigUint::from(7u32) << 16);
    }

    #[test]
    fn matrix_zero_and_endpoint() {
        for q in [9u32, 10] {
            let set = make_tau_plus(q).unwrap();
            let m = build_bit_matrix(&set).unwrap();
            let zero = ResidueVector::zero(&set);
            assert_eq!(eval_bit_matrix(&m, &zero).unwrap(), BigUint::ZERO);
            let end = ResidueVector::endpoint(&set);
            assert_eq!(
                eval_bit_matrix(&m, &end).unwrap(),
                &set.pair_modulus - BigUint::one()
            );
        }
    }

    /// Affine probe: X' is affine in the residue bits modulo the pair
    /// modulus, so matching the matrix on the zero vector and on every
    /// single-bit vector proves it matches on all inputs.
    #[test]
    fn matrix_matches_functional_on_every_bit() {
        for q in (9u32..=33).chain([48, 64]) {
            let set = make_tau_plus(q).unwrap();
            let m = build_bit_matrix(&set).unwrap();
            let zero = ResidueVector::zero(&set);
            assert_eq!(
                eval_bit_matrix(&m, &zero).unwrap(),
                x_prime(&zero, &set).unwrap(),
                "zero vector at q = {q}"
            );
            for ch in 0..3u8 {
                let width = if ch == 0 { 2 * q + 1 } else { q + 1 };
                let modulus = match ch {
                    0 => &set.m1,
                    1 => &set.m2,
                    _ => &set.m3,
                };
                for bit in 0..width {
                    let value = pow2(u64::from(bit));
                    if &value >= modulus {
                        continue;
                    }
                    let mut v = ResidueVector::zero(&set);
                    match ch {
                        0 => v.x1 = value,
                        1 => v.x2 = value,
                        _ => v.x3 = value,
                    }
                    assert_eq!(
                        eval_bit_matrix(&m, &v).unwrap(),
                        x_prime(&v, &set).unwrap(),
                        "q = {q}, channel {ch}, bit {bit}"
                    );
                }
            }
        }
    }

    #[test]
    fn matrix_matches_functional_sampled() {
        for q in [9u32, 10, 12] {
            let set = make_tau_plus(q).unwrap();
            let m = build_bit_matrix(&set).unwrap();
            for i in 0..10_000u64 {
                let v = ResidueVector::new(
                    &set,
                    sampling::sample_below(200 + u64::from(q), 3 * i, &set.m1),
                    sampling::sample_below(200 + u64::from(q), 3 * i + 1, &set.m2),
                    sampling::sample_below(200 + u64::from(q), 3 * i + 2, &set.m3),
                )
                .unwrap();
                assert_eq!(
                    eval_bit_matrix(&m, &v).unwrap(),
                    x_prime(&v, &set).unwrap()
                );
            }
        }
    }

    #[test]
    fn render_shape() {
        let set = make_tau_plus(9).unwrap();
        let m = build_bit_matrix(&set).unwrap();
        let text = m.render();
        assert_eq!(text.lines().count(), 13);
        let first: Vec<&str> = text.lines().next().unwrap().split(' ').collect();
        assert_eq!(first.len(), 19);
        assert_eq!(first[3], "~x1[18]"); // column 2q-3 from the left end
        assert!(text.lines().all(|l| l.split(' ').count() == 19));
    }

    #[test]
    fn reentrant_fold_values() {
        let set = make_tau_plus(4).unwrap();
        assert!(reentrant_fold(false, &set).is_zero());
        let one = reentrant_fold(true, &set);
        assert_eq!(one, BigInt::from(1) - BigInt::from(64));
        // 2^9 = 512 = 575 - 63: the fold is congruent to the wrapped carry
        let m = BigInt::from(575);
        let wrapped = ((one % &m) + &m) % &m;
        assert_eq!(wrapped, BigInt::from(512));
    }

    #[test]
    fn fold_congruence_q4_to_32() {
        for q in 4..=32u32 {
            let set = make_tau_plus(q).unwrap();
            let m = BigInt::from(set.pair_modulus.clone());
            for c in [false, true] {
                let fold = reentrant_fold(c, &set);
                let wrapped = ((fold % &m) + &m) % &m;
                let direct = BigInt::from(pow2(2 * q as u64 + 1) * u32::from(c)) % &m;
                assert_eq!(wrapped, direct, "q = {q}, c = {c}");
            }
        }
    }

    #[test]
    fn x_prime_stays_below_pair_modulus() {
        let set = make_tau_plus(9).unwrap();
        for i in 0..2000u64 {
            let x = sampling::sample_below(77, i, &set.dr);
            let v = forward(&x, &set).unwrap();
            assert!(x_prime(&v, &set).unwrap() < set.pair_modulus);
        }
    }

    /// Checks the intermediate form of the second CRT application:
    /// |(3*2^(q-4)+1) X'23| equals the closed form
    /// 9 m3 (x2'-x3') + 27*2^(q-5) m3 (x2''-x3''), both modulo m2*m3.
    #[test]
    fn second_crt_intermediate_form() {
        use num_bigint::BigInt;
        for q in [9u32, 12, 16] {
            let set = make_tau_plus(q).unwrap();
            let m = BigInt::from(set.pair_modulus.clone());
            let m3 = BigInt::from(set.m3.clone());
            for i in 0..5000u64 {
                let x2 = sampling::sample_below(300 + u64::from(q), 2 * i, &set.m2);
                let x3 = sampling::sample_below(300 + u64::from(q), 2 * i + 1, &set.m3);
                // X'23 = |mu2 m3 (x2 - x3)|_{m2 m3}
                let diff = BigInt::from(x2.clone()) - BigInt::from(x3.clone());
                let x23p = {
                    let v = (BigInt::from(set.mu2.clone()) * &m3 * &diff) % &m;
                    (v + &m) % &m
                };
                let lhs = ((BigInt::from(3u32) << (q as u64 - 4)) + 1) * &x23p % &m;
                let d_hi = BigInt::from(&x2 >> 4) - BigInt::from(&x3 >> 4);
                let d_lo = BigInt::from(&x2 & BigUint::from(15u32))
                    - BigInt::from(&x3 & BigUint::from(15u32));
                let rhs = (BigInt::from(9u32) * &m3 * d_hi
                    + (BigInt::from(27u32) << (q as u64 - 5)) * &m3 * d_lo)
                    % &m;
                let rhs = (rhs + &m) % &m;
                assert_eq!(lhs, rhs, "q = {q}");
                // and the reduced multiplier equals mu1 on this value
                let mu1_form = (BigInt::from(set.mu1.clone()) * &x23p) % &m;
                assert_eq!(lhs, mu1_form);
            }
        }
    }
}
