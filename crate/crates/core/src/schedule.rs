//! Multi-operand reduction planning for the bit matrix.
//!
//! A plan is structural: it is computed from the column depth profile
//! alone and fixes, per level and column, how many full and half adders
//! fire. Each full adder turns three bits of a column into one sum bit
//! there and one carry a column up; carries that leave the top column
//! wrap through `|2^(2q+1) c| = -2^(2q-2) + 2^(2q-2)(1-c) + c`, adding the
//! carry to column 0, its inversion to column 2q-2, and `-2^(2q-2)` to the
//! plan's folded constant.
//!
//! Allocation is Dadda-style, descending the per-level depth targets
//! 9, 7, 5, 4, 3, 2. Full adders fire only where a column would otherwise
//! exceed the level target, half adders only to hit it exactly. Two rules
//! keep the wraparound from circulating bits forever: the spill-landing
//! columns 0 and 2q-2 aim one below the target so a folded carry never
//! overfills them, and the top two columns always compress as hard as
//! their depth allows, with no half adders (a half adder there would only
//! relaunch the carry it was meant to retire).

use crate::adder::ResidueVector;
use crate::error::{Error, Result};
use crate::moduli::pow2;
use crate::reverse::{cell_value, BitMatrix};
use num_bigint::BigUint;
use num_traits::One;

/// Per-column bit counts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColumnProfile(pub Vec<u32>);

impl ColumnProfile {
    pub fn max_depth(&self) -> u32 {
        self.0.iter().copied().max().unwrap_or(0)
    }
}

/// Allocation for one column at one level.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ColumnAlloc {
    pub depth_before: u32,
    pub fa: u32,
    pub ha: u32,
    /// Depth entering the next level, incoming carries included.
    pub depth_after: u32,
}

/// One reduction level.
#[derive(Debug, Clone)]
pub struct LevelPlan {
    pub target: u32,
    pub columns: Vec<ColumnAlloc>,
    /// Carries that left the top column at this level.
    pub spills: u32,
}

impl LevelPlan {
    pub fn fa_total(&self) -> u32 {
        self.columns.iter().map(|c| c.fa).sum()
    }

    pub fn ha_total(&self) -> u32 {
        self.columns.iter().map(|c| c.ha).sum()
    }

    /// Full-adder equivalents, counting a half adder as 1/2.
    pub fn fa_equivalent(&self) -> f64 {
        f64::from(self.fa_total()) + 0.5 * f64::from(self.ha_total())
    }
}

/// A complete reduction plan for one bit matrix.
#[derive(Debug, Clone)]
pub struct ReductionPlan {
    pub q: u32,
    pub initial_profile: ColumnProfile,
    pub levels: Vec<LevelPlan>,
    pub final_profile: ColumnProfile,
    /// Matrix fold plus the spill constants, reduced mod the pair modulus.
    pub folded_constant: BigUint,
}

impl ReductionPlan {
    pub fn total_spills(&self) -> u32 {
        self.levels.iter().map(|l| l.spills).sum()
    }

    pub fn fa_equivalent_total(&self) -> f64 {
        self.levels.iter().map(|l| l.fa_equivalent()).sum()
    }

    /// Plan dump: one CSV line per (level, column).
    pub fn render_csv(&self) -> String {
        let mut out = String::from("level,column,depth_before,fa,ha,depth_after,spills\n");
        let top = 2 * self.q as usize;
        for (li, level) in self.levels.iter().enumerate() {
            for (col, alloc) in level.columns.iter().enumerate() {
                let spills = if col == top { level.spills } else { 0 };
                out.push_str(&format!(
                    "{},{},{},{},{},{},{}\n",
                    li + 1,
                    col,
                    alloc.depth_before,
                    alloc.fa,
                    alloc.ha,
                    alloc.depth_after,
                    spills
                ));
            }
        }
        out
    }
}

/// Level depth targets; levels beyond the list aim for 2.
const TARGETS: [u32; 6] = [9, 7, 5, 4, 3, 2];

/// Hard level budget.
pub const MAX_LEVELS: usize = 7;

/// Plans the reduction of `matrix` to two rows in at most seven levels.
pub fn plan_reduction(matrix: &BitMatrix) -> Result<ReductionPlan> {
    let q = matrix.q as usize;
    let width = 2 * q + 1;
    let initial = ColumnProfile(matrix.column_depths());
    let mut depth = initial.0.clone();
    let mut levels: Vec<LevelPlan> = Vec::new();
    let mut pending_spills: u32 = 0;
    let mut spill_slots: u32 = 0;

    loop {
        if pending_spills > 0 {
            depth[0] += pending_spills;
            depth[2 * q - 2] += pending_spills;
        }
        if depth.iter().all(|&d| d <= 2) {
            break;
        }
        if levels.len() >= MAX_LEVELS {
            return Err(Error::PlanDepth {
                levels: levels.len(),
                achieved: depth,
            });
        }
        let target = TARGETS.get(levels.len()).copied().unwrap_or(2);
        let mut columns = Vec::with_capacity(width);
        let mut next = vec![0u32; width];
        let mut carry_in: u32 = 0;
        for col in 0..width {
            let d = depth[col];
            let goal = if col == 0 || col == 2 * q - 2 {
                target.saturating_sub(1).max(1)
            } else {
                target
            };
            let mut fa = 0u32;
            let mut ha = 0u32;
            let excess = (d + carry_in).saturating_sub(goal);
            if excess > 0 {
                fa = excess.div_ceil(2).min(d / 3);
                if d + carry_in - 2 * fa > goal && d - 3 * fa >= 2 {
                    ha = 1;
                }
            }
            if col >= width - 2 {
                // top columns: maximum compression, no half adders
                fa = d / 3;
                ha = 0;
            }
            let out = d - 2 * fa - ha + carry_in;
            next[col] = out;
            columns.push(ColumnAlloc {
                depth_before: d,
                fa,
                ha,
                depth_after: out,
            });
            carry_in = fa + ha;
        }
        let spills = carry_in;
        pending_spills = spills;
        spill_slots += spills;
        levels.push(LevelPlan {
            target,
            columns,
            spills,
        });
        depth = next;
    }

    let m = (pow2(2 * q as u64 + 1) + pow2(2 * q as u64 - 2)) - BigUint::one();
    // each spill slot contributes -2^(2q-2); add the equivalent m - 2^(2q-2)
    let spill_term = (&m - pow2(2 * q as u64 - 2)) * BigUint::from(spill_slots);
    let folded_constant = (&matrix.constant_row_fold + spill_term) % &m;

    Ok(ReductionPlan {
        q: matrix.q,
        initial_profile: initial,
        levels,
        final_profile: ColumnProfile(depth),
        folded_constant,
    })
}

/// Bit-accurate replay of a plan on concrete residues.
///
/// Returns the two surviving rows; `(sum_row + carry_row + folded
/// constant) mod pair modulus` equals `eval_bit_matrix` on the same
/// inputs. Bits are consumed front-of-queue, full adders first, so the
/// replay is deterministic.
pub fn simulate_plan(
    plan: &ReductionPlan,
    matrix: &BitMatrix,
    rv: &ResidueVector,
) -> Result<(BigUint, BigUint)> {
    if plan.q != matrix.q {
        return Err(Error::QMismatch {
            left: plan.q,
            right: matrix.q,
        });
    }
    if matrix.q != rv.q {
        return Err(Error::QMismatch {
            left: matrix.q,
            right: rv.q,
        });
    }
    if plan.initial_profile.0 != matrix.column_depths() {
        return Err(Error::PlanMismatch {
            detail: "matrix column depths differ from the plan's initial profile".into(),
        });
    }
    let q = matrix.q as usize;
    let width = 2 * q + 1;

    let mut cols: Vec<Vec<bool>> = vec![Vec::new(); width];
    for row in &matrix.rows {
        for (col, cell) in row.iter().enumerate() {
            if matches!(cell, crate::reverse::Cell::Zero) {
                continue;
            }
            cols[col].push(cell_value(cell, rv));
        }
    }

    for level in &plan.levels {
        let mut next: Vec<Vec<bool>> = vec![Vec::new(); width];
        for col in 0..width {
            let alloc = &level.columns[col];
            let bits = &cols[col];
            if bits.len() != alloc.depth_before as usize {
                return Err(Error::PlanMismatch {
                    detail: format!(
                        "column {col} holds {} bits, plan expects {}",
                        bits.len(),
                        alloc.depth_before
                    ),
                });
            }
            let mut idx = 0usize;
            let mut sums = Vec::new();
            let mut carries = Vec::new();
            for _ in 0..alloc.fa {
                let (a, b, c) = (bits[idx], bits[idx + 1], bits[idx + 2]);
                idx += 3;
                sums.push(a ^ b ^ c);
                carries.push((a & b) | (c & (a ^ b)));
            }
            for _ in 0..alloc.ha {
                let (a, b) = (bits[idx], bits[idx + 1]);
                idx += 2;
                sums.push(a ^ b);
                carries.push(a & b);
            }
            next[col].extend(sums);
            next[col].extend(&bits[idx..]);
            if col + 1 < width {
                next[col + 1].extend(carries);
            } else {
                for &c in &carries {
                    next[0].push(c);
                    next[2 * q - 2].push(!c);
                }
            }
        }
        cols = next;
    }

    let mut sum_row = BigUint::ZERO;
    let mut carry_row = BigUint::ZERO;
    for (col, bits) in cols.iter().enumerate() {
        if bits.len() > 2 {
            return Err(Error::PlanMismatch {
                detail: format!("column {col} ends with {} bits", bits.len()),
            });
        }
        if bits.first().copied().unwrap_or(false) {
            sum_row += pow2(col as u64);
        }
        if bits.get(1).copied().unwrap_or(false) {
            carry_row += pow2(col as u64);
        }
    }
    Ok((sum_row, carry_row))
}

/// Per-level adder counts next to the hand-allocation figures.
#[derive(Debug, Clone)]
pub struct FaReport {
    pub q: u32,
    /// Our plan, FA equivalents per level.
    pub per_level: Vec<f64>,
    pub grand_total: f64,
    /// Published per-level formulas 5q+8, 3q+12, 3q, 2q, q+3, q/2+4, 5.
    pub published_per_level: Vec<f64>,
    /// Published grand-total formula 13.5q+32.
    pub published_grand_total: f64,
    /// Sum of the published per-level formulas, 14.5q+32.
    pub published_level_sum: f64,
}

impl FaReport {
    pub fn render(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("q = {}\n", self.q));
        out.push_str(&format!(
            "plan levels ({}): {:?}\n",
            self.per_level.len(),
            self.per_level
        ));
        out.push_str(&format!("plan grand total: {}\n", self.grand_total));
        out.push_str(&format!(
            "published per-level formulas: {:?}\n",
            self.published_per_level
        ));
        out.push_str(&format!(
            "published grand total 13.5q+32 = {}, per-level sum 14.5q+32 = {}\n",
            self.published_grand_total, self.published_level_sum
        ));
        out
    }
}

/// Adder-count report for a plan, with the published figures alongside.
pub fn fa_count_report(plan: &ReductionPlan) -> FaReport {
    let q = f64::from(plan.q);
    FaReport {
        q: plan.q,
        per_level: plan.levels.iter().map(|l| l.fa_equivalent()).collect(),
        grand_total: plan.fa_equivalent_total(),
        published_per_level: vec![
            5.0 * q + 8.0,
            3.0 * q + 12.0,
            3.0 * q,
            2.0 * q,
            q + 3.0,
            q / 2.0 + 4.0,
            5.0,
        ],
        published_grand_total: 13.5 * q + 32.0,
        published_level_sum: 14.5 * q + 32.0,
    }
}
