//! Verification sweeps: round trips, staged-vs-direct residues,
//! addition homomorphism, and reverse-path agreement.
//!
//! Sweeps partition their index range across a worker pool. Workers share
//! only immutable tables and merge counts at the end, and sampled draws
//! are keyed by sample index, so reports are identical for any worker
//! count.

use crate::adder::{rns_add, ResidueVector};
use crate::error::{Error, Result};
use crate::forward::{forward_with_luts, ForwardLuts};
use crate::moduli::TauPlusSet;
use crate::reverse::{
    build_bit_matrix, eval_bit_matrix, reverse_functional, x_prime, x_prime_eq9, BitMatrix,
    MIN_STRUCTURAL_Q,
};
use crate::sampling;
use crate::schedule::{plan_reduction, simulate_plan, ReductionPlan};
use num_bigint::BigUint;
use num_traits::ToPrimitive;

/// Pass/fail tallies for one check family.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CheckCounts {
    pub pass: u64,
    pub fail: u64,
}

impl CheckCounts {
    fn record(&mut self, ok: bool) {
        if ok {
            self.pass += 1;
        } else {
            self.fail += 1;
        }
    }

    fn merge(&mut self, other: CheckCounts) {
        self.pass += other.pass;
        self.fail += other.fail;
    }
}

/// Outcome of one verification sweep.
#[derive(Debug, Clone)]
pub struct VerifyReport {
    pub q: u32,
    pub mode: &'static str,
    pub seed: Option<u64>,
    pub round_trip: CheckCounts,
    pub staged: CheckCounts,
    pub homomorphism: CheckCounts,
    /// Functional / thirteen-term / matrix / simulated agreement; only
    /// populated when the structural paths exist (q >= 9).
    pub path_agreement: Option<CheckCounts>,
}

impl VerifyReport {
    pub fn all_passed(&self) -> bool {
        self.round_trip.fail == 0
            && self.staged.fail == 0
            && self.homomorphism.fail == 0
            && self.path_agreement.is_none_or(|c| c.fail == 0)
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("q = {}, mode = {}", self.q, self.mode));
        if let Some(seed) = self.seed {
            out.push_str(&format!(", seed = {seed}"));
        }
        out.push('\n');
        let line = |name: &str, c: &CheckCounts| {
            format!("  {name}: {}/{} pass\n", c.pass, c.pass + c.fail)
        };
        out.push_str(&line("round trip", &self.round_trip));
        out.push_str(&line("staged forward", &self.staged));
        out.push_str(&line("homomorphism", &self.homomorphism));
        if let Some(agreement) = &self.path_agreement {
            out.push_str(&line("path agreement", agreement));
        }
        out.push_str(if self.all_passed() { "PASS\n" } else { "FAIL\n" });
        out
    }
}

/// Exhaustive sweeps are allowed only up to this dynamic range.
pub const EXHAUSTIVE_CAP_BITS: u64 = 24;

struct Sweep<'a> {
    set: &'a TauPlusSet,
    luts: ForwardLuts,
    structural: Option<(BitMatrix, ReductionPlan)>,
}

impl<'a> Sweep<'a> {
    fn new(set: &'a TauPlusSet) -> Result<Self> {
        let structural = if set.q >= MIN_STRUCTURAL_Q {
            let matrix = build_bit_matrix(set)?;
            let plan = plan_reduction(&matrix)?;
            Some((matrix, plan))
        } else {
            None
        };
        Ok(Sweep {
            set,
            luts: ForwardLuts::new(set),
            structural,
        })
    }

    /// Forward, compare against direct remainders, reverse, compare back.
    fn check_value(&self, x: &BigUint, report: &mut WorkerCounts) {
        let set = self.set;
        let rv = forward_with_luts(x, set, &self.luts).expect("x drawn in range");
        report
            .staged
            .record(rv.x1 == x % &set.m1 && rv.x2 == x % &set.m2 && rv.x3 == x % &set.m3);
        let back = reverse_functional(&rv, set).expect("valid vector");
        report.round_trip.record(&back == x);
        if let Some((matrix, plan)) = &self.structural {
            report.path_agreement.record(paths_agree(
                set,
                matrix,
                plan,
                &rv,
            ));
        }
    }

    fn check_pair(&self, x: &BigUint, y: &BigUint, report: &mut WorkerCounts) {
        let set = self.set;
        let u = forward_with_luts(x, set, &self.luts).expect("in range");
        let v = forward_with_luts(y, set, &self.luts).expect("in range");
        let sum = (x + y) % &set.dr;
        let direct = forward_with_luts(&sum, set, &self.luts).expect("in range");
        let channelwise = rns_add(&u, &v, set).expect("same set");
        report.homomorphism.record(direct == channelwise);
    }
}

/// Functional X' against the three structural routes.
fn paths_agree(
    set: &TauPlusSet,
    matrix: &BitMatrix,
    plan: &ReductionPlan,
    rv: &ResidueVector,
) -> bool {
    let reference = match x_prime(rv, set) {
        Ok(v) => v,
        Err(_) => return false,
    };
    let eq9 = x_prime_eq9(rv, set);
    let mat = eval_bit_matrix(matrix, rv);
    let sim = simulate_plan(plan, matrix, rv).map(|(s, c)| {
        (s + c + &plan.folded_constant) % &set.pair_modulus
    });
    matches!((eq9, mat, sim), (Ok(a), Ok(b), Ok(c))
        if a == reference && b == reference && c == reference)
}

#[derive(Default, Clone, Copy)]
struct WorkerCounts {
    round_trip: CheckCounts,
    staged: CheckCounts,
    homomorphism: CheckCounts,
    path_agreement: CheckCounts,
}

impl WorkerCounts {
    fn merge(&mut self, other: WorkerCounts) {
        self.round_trip.merge(other.round_trip);
        self.staged.merge(other.staged);
        self.homomorphism.merge(other.homomorphism);
        self.path_agreement.merge(other.path_agreement);
    }
}

fn worker_count(requested: Option<usize>) -> usize {
    requested
        .or_else(|| {
            std::env::var("RNS_WORKERS")
                .ok()
                .and_then(|v| v.parse().ok())
        })
        .unwrap_or_else(|| {
            std::thread::available_parallelism()
                .map(|n| n.get())
                .unwrap_or(1)
        })
        .max(1)
}

fn run_partitioned<F>(total: u64, workers: usize, per_index: F) -> WorkerCounts
where
    F: Fn(u64, &mut WorkerCounts) + Sync,
{
    let workers = workers.min(total.max(1) as usize).max(1);
    let chunk = total.div_ceil(workers as u64);
    std::thread::scope(|scope| {
        let handles: Vec<_> = (0..workers)
            .map(|w| {
                let lo = w as u64 * chunk;
                let hi = (lo + chunk).min(total);
                let body = &per_index;
                scope.spawn(move || {
                    let mut counts = WorkerCounts::default();
                    for i in lo..hi {
                        body(i, &mut counts);
                    }
                    counts
                })
            })
            .collect();
        let mut merged = WorkerCounts::default();
        for handle in handles {
            merged.merge(handle.join().expect("worker panicked"));
        }
        merged
    })
}

/// Exhaustive verification over the whole dynamic range.
///
/// Round trip and staged checks cover every x. Homomorphism pairs
/// `(x, dr-1-x)` plus a seeded batch, path agreement never applies (the
/// cap keeps exhaustive runs at q <= 5, below the structural minimum).
pub fn verify_exhaustive(set: &TauPlusSet, workers: Option<usize>) -> Result<VerifyReport> {
    let dr_bits = set.dr.bits();
    if dr_bits > EXHAUSTIVE_CAP_BITS {
        return Err(Error::ExhaustiveAboveCap {
            dr_bits,
            cap_bits: EXHAUSTIVE_CAP_BITS,
        });
    }
    let sweep = Sweep::new(set)?;
    let total = set.dr.to_u64().expect("below the cap");
    let counts = run_partitioned(total, worker_count(workers), |i, counts| {
        let x = BigUint::from(i);
        sweep.check_value(&x, counts);
        let y = &set.dr - 1u32 - &x;
        sweep.check_pair(&x, &y, counts);
    });
    Ok(VerifyReport {
        q: set.q,
        mode: "exhaustive",
        seed: None,
        round_trip: counts.round_trip,
        staged: counts.staged,
        homomorphism: counts.homomorphism,
        path_agreement: sweep.structural.as_ref().map(|_| counts.path_agreement),
    })
}

/// Seeded sampled verification with `n` draws.
pub fn verify_sampled(
    set: &TauPlusSet,
    n: u64,
    seed: u64,
    workers: Option<usize>,
) -> Result<VerifyReport> {
    let sweep = Sweep::new(set)?;
    let counts = run_partitioned(n, worker_count(workers), |i, counts| {
        let x = sampling::sample_below(seed, 2 * i, &set.dr);
        let y = sampling::sample_below(seed, 2 * i + 1, &set.dr);
        sweep.check_value(&x, counts);
        sweep.check_pair(&x, &y, counts);
    });
    Ok(VerifyReport {
        q: set.q,
        mode: "sample",
        seed: Some(seed),
        round_trip: counts.round_trip,
        staged: counts.staged,
        homomorphism: counts.homomorphism,
        path_agreement: sweep.structural.as_ref().map(|_| counts.path_agreement),
    })
}
