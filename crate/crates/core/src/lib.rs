//! Verified arithmetic toolkit for the RNS moduli set
//! `{2^(2q+1), 2^q + 2^(q-1) - 1, 2^q + 2^(q-1) + 1}`.
//!
//! The toolkit covers the full conversion pipeline: operand slicing and
//! LUT-based residue generation, channel modular adders, a reverse
//! converter in three mutually checking forms (functional New CRT, a
//! thirteen-term arithmetic evaluator, and a bit matrix reduced by a
//! planned carry-save adder schedule), plus the gate-delay model that
//! locates the operation count where this set starts beating the
//! classical `{2^q', 2^q' - 1, 2^q' + 1}` set of equal dynamic range.
//! Everything is cross-checked against brute-force CRT oracles.
//!
//! All arithmetic runs on unbounded nonnegative integers; fixed-width
//! shortcuts exist only where tests pin them bit-identical to the
//! unbounded path.

pub mod adder;
pub mod error;
pub mod forward;
pub mod moduli;
pub mod oracle;
pub mod perf;
pub mod reverse;
pub mod sampling;
pub mod schedule;
pub mod verify;

pub use adder::{mod_add, mod_multi_add, rns_add, ResidueVector};
pub use error::{Error, Result};
pub use forward::{
    build_lut, forward, forward_with_luts, residue_m1, residue_mi_staged, split_operand,
    ChannelLut, ForwardLuts, OperandSlices,
};
pub use moduli::{
    dynamic_range_closed_form, make_tau, make_tau_plus, verify_appendix_identities, Channel,
    IdentityReport, TauPlusSet, TauSet,
};
pub use oracle::{crt_reconstruct, new_crt_general, residues_of, reverse_tau, ModulusList};
pub use perf::{
    comparison_table, equalized_q_prime, rows_to_csv, tau_delay, tau_plus_delay, turning_point,
    ComparisonRow, DelayExpression,
};
pub use reverse::{
    build_bit_matrix, crt_pair_x23, eval_bit_matrix, reentrant_fold, reverse_functional,
    split_residues, x_prime, x_prime_eq9, BitMatrix, Cell, ResidueSplit, Source,
};
pub use schedule::{
    fa_count_report, plan_reduction, simulate_plan, ColumnProfile, FaReport, ReductionPlan,
};
pub use verify::{verify_exhaustive, verify_sampled, VerifyReport};
