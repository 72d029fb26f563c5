//! Phase-estimation limits for probes subjected to an unknown phase shift.
//!
//! The crate covers the number-basis description of probe states
//! ([`fock`]), phase-error distributions represented by their Fourier moments
//! ([`phasedist`]), the entropic bound chain ([`bounds`]), the eigenvalue
//! search for minimum-error states ([`optimizer`]) and discrete measurement
//! simulation ([`povm`]).

// Negated float comparisons are deliberate: NaN must fail every check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod airy;
pub mod bounds;
pub mod cli;
pub mod eigen;
pub mod error;
pub mod fock;
pub mod optimizer;
pub mod phasedist;
pub mod povm;

pub use bounds::{
    bound_report, conjectured_bound, entropy_chain_report, heisenberg_bound, k_a, k_c, BoundEntry,
    BoundReport, Relation,
};
pub use error::{Error, Result};
pub use fock::{GeneratorSpec, NumberDistribution, ProbeState};
pub use optimizer::{figure2_curve, optimize_at_mean, CostKind, CurveRow, DimPolicy, OptimizationResult};
pub use phasedist::{canonical_distribution, HolevoVariance, PhaseDistribution};
pub use povm::{EstimatePOM, Outcome};
