//! Analytical delay model and the tau vs tau+ comparison table.
//!
//! Delays are affine in the number k of chained modular additions,
//! measured in gate delays. For equal dynamic ranges tau+ needs a smaller
//! channel parameter than tau, so its additions are faster while its
//! converters are slower; the turning point is the least k at which the
//! tau+ pipeline stops being slower.

use crate::error::{Error, Result};
use crate::moduli::{dynamic_range_closed_form, pow2};
use std::fmt;

/// An affine gate-delay expression `slope * k + intercept`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DelayExpression {
    pub intercept: u64,
    pub slope: u64,
}

impl DelayExpression {
    pub fn eval(&self, k: u64) -> u64 {
        self.slope * k + self.intercept
    }
}

impl fmt::Display for DelayExpression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}k+{}", self.slope, self.intercept)
    }
}

/// Ceiling of the base-2 logarithm; 0 for n = 1.
pub fn ceil_log2(n: u64) -> u64 {
    assert!(n > 0);
    let mut e = 0;
    while (1u64 << e) < n {
        e += 1;
    }
    e
}

/// Delay of the tau pipeline at channel parameter q':
/// `(18 + 4 ceil(log q')) + k (3 + 2 ceil(log q'))`.
pub fn tau_delay(qp: u32) -> Result<DelayExpression> {
    if qp < 2 {
        return Err(Error::QBelowMinimum {
            q: qp,
            min: 2,
            what: "tau delay",
        });
    }
    let l = ceil_log2(u64::from(qp));
    Ok(DelayExpression {
        intercept: 18 + 4 * l,
        slope: 3 + 2 * l,
    })
}

/// Delay of the tau+ pipeline at channel parameter q:
/// `(2q + 45 + 4 ceil(log q)) + k (4 + 2 ceil(log q))`.
pub fn tau_plus_delay(q: u32) -> Result<DelayExpression> {
    if q < 3 {
        return Err(Error::QBelowMinimum {
            q,
            min: 3,
            what: "tau+ delay",
        });
    }
    let l = ceil_log2(u64::from(q));
    Ok(DelayExpression {
        intercept: 2 * u64::from(q) + 45 + 4 * l,
        slope: 4 + 2 * l,
    })
}

/// Smallest q' whose tau dynamic range `2^(3q') - 2^q'` covers the tau+
/// dynamic range at q.
pub fn equalized_q_prime(q: u32) -> Result<u32> {
    if q < 3 {
        return Err(Error::QBelowMinimum {
            q,
            min: 3,
            what: "dynamic-range equalization",
        });
    }
    let dr_plus = dynamic_range_closed_form(q);
    let mut qp = 2u32;
    loop {
        let dr_tau = pow2(3 * u64::from(qp)) - pow2(u64::from(qp));
        if dr_tau >= dr_plus {
            return Ok(qp);
        }
        qp += 1;
    }
}

/// Least k >= 0 with tau+ delay at q no larger than tau delay at the
/// equal-range q'. At the published rows the two lines meet exactly at
/// this k; strict dominance begins one step later.
pub fn turning_point(q: u32) -> Result<u64> {
    let plus = tau_plus_delay(q)?;
    let qp = equalized_q_prime(q)?;
    let tau = tau_delay(qp)?;
    if plus.slope >= tau.slope {
        if plus.intercept <= tau.intercept {
            return Ok(0);
        }
        return Err(Error::NoTurningPoint { q });
    }
    let gap = plus.intercept.saturating_sub(tau.intercept);
    let step = tau.slope - plus.slope;
    Ok(gap.div_ceil(step))
}

/// One comparison row: delays of both sets at equal dynamic range.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComparisonRow {
    pub q: u32,
    pub q_prime: u32,
    pub tau_plus: DelayExpression,
    pub tau: DelayExpression,
    /// None when the tau+ line never reaches the tau line.
    pub turning_k: Option<u64>,
}

/// Builds one row per q.
pub fn comparison_table(qs: &[u32]) -> Result<Vec<ComparisonRow>> {
    qs.iter()
        .map(|&q| {
            let q_prime = equalized_q_prime(q)?;
            Ok(ComparisonRow {
                q,
                q_prime,
                tau_plus: tau_plus_delay(q)?,
                tau: tau_delay(q_prime)?,
                turning_k: turning_point(q).ok(),
            })
        })
        .collect()
}

/// CSV emission with the pinned header.
pub fn rows_to_csv(rows: &[ComparisonRow]) -> String {
    let mut out =
        String::from("q,qprime,tauplus_intercept,tauplus_slope,tau_intercept,tau_slope,turning_k\n");
    for row in rows {
        let turning = row
            .turning_k
            .map(|k| k.to_string())
            .unwrap_or_else(|| "none".into());
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            row.q,
            row.q_prime,
            row.tau_plus.intercept,
            row.tau_plus.slope,
            row.tau.intercept,
            row.tau.slope,
            turning
        ));
    }
    out
}

/// The published comparison rows for q in {4, 8, 16, 32}.
pub fn published_rows() -> Vec<ComparisonRow> {
    let row = |q, q_prime, plus: (u64, u64), tau: (u64, u64), k| ComparisonRow {
        q,
        q_prime,
        tau_plus: DelayExpression {
            slope: plus.0,
            intercept: plus.1,
        },
        tau: DelayExpression {
            slope: tau.0,
            intercept: tau.1,
        },
        turning_k: Some(k),
    };
    vec![
        row(4, 7, (8, 61), (9, 30), 31),
        row(8, 12, (10, 73), (11, 34), 39),
        row(16, 23, (12, 93), (13, 38), 55),
        row(32, 44, (14, 129), (15, 42), 87),
    ]
}
