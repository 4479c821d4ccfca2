//! Set-based verification of phase synchronization for pairs of coupled
//! oscillators.
//!
//! A pair of subsystem states is enclosed in a product of Euclidean balls.
//! Centers follow the explicit Euler scheme and the shared radius is
//! expanded step by step, either from the local logarithmic norm of the
//! vector field or from the linearized Euler map. A section set `S = S1 x S2`
//! of thin parallelograms is then checked for recurrence after `k` periods,
//! together with a bound on the phase difference of the two components.
//!
//! The crate is `no_std` (with `alloc`) so it can be embedded anywhere; file
//! formats, plotting and the command-line front end live in the `synchro`
//! crate.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

mod error;
pub mod hybrid;
pub mod linalg;
pub mod lognorm;
mod math;
pub mod model;
pub mod models;
pub mod reach;
pub mod rng;
pub mod sync;

pub use error::{Error, Result};
pub use hybrid::{apply_reset, guard_crossing, hybrid_reach_tube, jump_jacobian, Crossing, DiscreteEvent};
pub use linalg::Matrix;
pub use lognorm::{classify_zone, jacobian, log_norm, one_sided_lipschitz, LambdaEstimate, LambdaMethod, Zone};
pub use model::{
    parallelogram_contains, phase, Ball, HybridSystem, Jump, LinearSystem, ProductBall, SectionParallelogram,
    StateVector, VerificationConfig,
};
pub use reach::{
    euler_step, expansion_factor, radius_step, reach_tube, RadiusRule, ReachTrace, TraceSample, Tube, TubeOptions,
};
pub use sync::{
    cover_section, decompose_periods, proc1, verify_balls, verify_covering, ChainReport, CoveringReport, Covering,
    Executor, PairOutcome, PairSelection, Sequential, StageReport, VerificationResult,
};
