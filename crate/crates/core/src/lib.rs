//! PI gain tuning for single-axis steering loops.
//!
//! The crate covers the whole tuning pipeline for a SISO plant given as a
//! transfer function:
//!
//! - [`lti`]: polynomials, transfer functions, series and unity-feedback
//!   interconnection, controllable canonical realizations and a
//!   Routh–Hurwitz stability test.
//! - [`sim`]: fixed-step RK4 step responses, open loop or under a
//!   continuous PI law with optional actuator saturation.
//! - [`metrics`]: peak time, overshoot, settling and rise time, and
//!   ITAE/IAE/ISE/ITSE indices.
//! - [`tuners`]: a real-coded genetic algorithm and simulated annealing over
//!   a gain box, plus a seeded multi-run harness.
//!
//! Candidate batches are evaluated through [`parallel::map_ordered`], which
//! uses rayon when the `parallel` feature (on by default) is enabled.

pub mod lti;
pub mod metrics;
pub mod parallel;
pub mod sim;
pub mod tuners;

pub use lti::{default_yaw_plant, TransferFunction};
pub use metrics::{error_index, transient_metrics, IndexKind, TransientMetrics};
pub use sim::{simulate_pi_loop, simulate_step, PIGains, SimConfig, SimTrace};
pub use tuners::{
    multi_run, GAConfig, GainBounds, Objective, RunSet, SAConfig, Tuner, TuningResult,
};
