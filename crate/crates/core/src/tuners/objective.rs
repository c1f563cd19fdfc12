use serde::{Deserialize, Serialize};

use crate::lti::{is_stable, series, unity_feedback, TransferFunction};
use crate::metrics::{IndexAccumulator, IndexKind};
use crate::sim::{pi_tf, run_pi_loop, PIGains, SimConfig, BLOWUP_LIMIT};

/// Base cost assigned to unstable or diverging candidates.
pub const PENALTY: f64 = 1e9;

/// Closed-loop cost of a gain pair: the chosen error index of the simulated
/// step response.
///
/// Candidates whose algebraic closed loop is not strictly stable, or whose
/// simulation diverges, cost `PENALTY + max|e|`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Objective {
    pub plant: TransferFunction,
    pub sim: SimConfig,
    pub index: IndexKind,
}

impl Objective {
    pub fn new(plant: TransferFunction, sim: SimConfig, index: IndexKind) -> Self {
        Self { plant, sim, index }
    }

    /// ITAE on the given plant with the default simulation settings.
    pub fn itae(plant: TransferFunction) -> Self {
        Self::new(plant, SimConfig::default(), IndexKind::Itae)
    }

    pub fn evaluate(&self, gains: PIGains) -> f64 {
        let stable = self.closed_loop_stable(gains);
        let mut acc = IndexAccumulator::new(self.index);
        let outcome = run_pi_loop(&self.plant, gains, &self.sim, |s| acc.push_sample(s));
        match outcome {
            Ok(()) if stable && acc.value().is_finite() => acc.value(),
            Ok(()) => PENALTY + acc.max_abs_error().min(BLOWUP_LIMIT),
            Err(_) => PENALTY + BLOWUP_LIMIT,
        }
    }

    /// Routh–Hurwitz test on `C G / (1 + C G)`.
    ///
    /// With `ki = 0` the controller is the static gain `kp`; the unreduced
    /// `kp s / s` would add a spurious closed-loop pole at the origin.
    fn closed_loop_stable(&self, gains: PIGains) -> bool {
        let controller = if gains.ki() == 0.0 {
            TransferFunction::gain(gains.kp())
        } else {
            pi_tf(gains).expect("ki > 0 gives a nonzero controller")
        };
        match unity_feedback(&series(&controller, &self.plant)) {
            Ok(cl) => is_stable(&cl).unwrap_or(true),
            Err(_) => false,
        }
    }
}
