//! Continuous-time SISO LTI systems.
//!
//! Polynomials use descending powers of `s`. Denominators are normalized to
//! monic form when a [`TransferFunction`] is built, and nothing in this module
//! cancels common poles and zeros.

mod poly;
mod stability;
mod state_space;
mod transfer;

pub use poly::Polynomial;
pub use stability::{is_stable, routh_first_column};
pub use state_space::{to_state_space, StateSpace};
pub use transfer::{default_yaw_plant, series, unity_feedback, TransferFunction};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LtiError {
    #[error("polynomial needs at least one coefficient")]
    EmptyPolynomial,
    #[error("non-finite polynomial coefficient {0}")]
    NonFiniteCoefficient(f64),
    #[error("denominator is the zero polynomial")]
    ZeroDenominator,
    #[error("improper transfer function: numerator degree {num} exceeds denominator degree {den}")]
    Improper { num: usize, den: usize },
    #[error("algebraic loop: closed-loop denominator vanished")]
    AlgebraicLoop,
    #[error("stability test needs a denominator of degree >= 1")]
    DegenerateDenominator,
}
