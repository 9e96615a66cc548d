//! Certified approximate zeros of complex polynomials by α-step path lifting,
//! together with the branched-cover geometry and the sweep harness used to
//! measure the solver's average cost.

// `!(x > 0.0)` is used on purpose: NaN must fail these guards.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod alpha;
pub mod error;
pub mod geometry;
pub mod harness;
pub mod pathlift;
pub mod poly;
pub mod roots;
pub(crate) mod serde_pair;
pub mod verify;

pub use alpha::{
    alpha0_constant, alpha_gamma, certify, gamma_upper_bound, newton_step,
    verify_quadratic_contraction, AlphaData, Certificate, ALPHA_THRESHOLD,
};
pub use error::{Error, Result};
pub use geometry::{
    arg_speed, branch_radius, critical_profile, ray_probe, rho_of_root, s_r_constant,
    voronoi_multiplicity_probe, CriticalPoint, CriticalProfile, RayProbe, VoronoiCounts,
};
pub use num_complex::Complex64;
pub use pathlift::{
    choose_start, pointwise_cost, run, run_adaptive, run_classic, Mode, Outcome, RunConfig, Trace,
    TraceStep,
};
pub use poly::{ComplexPoint, DerivativeStack, Polynomial};
