//! Closed-subgroup structure of `{ψ = 0}` and the Liouville verdicts built on it.
//!
//! Everything here works in `f64`; dimensions 1 to 3 are supported.

mod alibaud;
mod duality;
mod lattice;
mod linalg;
mod smoothness;
mod verdict;
mod zeroset;

pub use alibaud::{alibaud_group, AlibaudData};
pub use duality::{compare_groups, cross_check_duality, DualityOutcome, DualityReport, GroupComparison};
pub use lattice::{hnf_contains, hnf_lattice, orthogonal_subgroup, reduce_lattice, GroupDescriptor};
pub use smoothness::{smoothness_order, SmoothnessOrder};
pub use verdict::{
    exponential_zero_search, liouville_verdict, liouville_verdict_symbol, strong_liouville_verdict, trig_witness, DirectionProbe,
    ExponentialSearch, Outcome, Verdict, VerdictResiduals, Witness, WitnessKind,
};
pub use zeroset::{default_halfwidth, find_zero_set, periodicity_defect, SearchBox, SearchParams, ZeroSetStructure};
