//! Metaheuristic PI gain tuning.
//!
//! Both optimizers search a box of `(kp, ki)` values, are fully determined by
//! their seed, and hand candidate batches to [`crate::parallel::map_ordered`],
//! so their results do not depend on how many worker threads are available.

mod ga;
mod objective;
mod sa;

pub use ga::{ga_tune, GAConfig};
pub use objective::{Objective, PENALTY};
pub use sa::{sa_tune, SAConfig};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::parallel::map_ordered;
use crate::sim::PIGains;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TuneError {
    #[error("invalid tuner config: {0}")]
    InvalidConfig(String),
}

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T, TuneError> {
    Err(TuneError::InvalidConfig(msg.into()))
}

/// Search box for the gains.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GainBounds {
    pub kp_min: f64,
    pub kp_max: f64,
    pub ki_min: f64,
    pub ki_max: f64,
}

impl Default for GainBounds {
    fn default() -> Self {
        Self {
            kp_min: 0.0,
            kp_max: 500.0,
            ki_min: 0.0,
            ki_max: 200.0,
        }
    }
}

impl GainBounds {
    pub fn validate(&self) -> Result<(), TuneError> {
        for (name, lo, hi) in [
            ("kp", self.kp_min, self.kp_max),
            ("ki", self.ki_min, self.ki_max),
        ] {
            if !(lo.is_finite() && hi.is_finite() && 0.0 <= lo && lo < hi) {
                return invalid(format!(
                    "{name} bounds must satisfy 0 <= min < max, got [{lo}, {hi}]"
                ));
            }
        }
        Ok(())
    }

    pub(crate) fn lower(&self) -> [f64; 2] {
        [self.kp_min, self.ki_min]
    }

    pub(crate) fn upper(&self) -> [f64; 2] {
        [self.kp_max, self.ki_max]
    }

    pub(crate) fn range(&self) -> [f64; 2] {
        [self.kp_max - self.kp_min, self.ki_max - self.ki_min]
    }

    pub(crate) fn clamp(&self, x: [f64; 2]) -> [f64; 2] {
        let (lo, hi) = (self.lower(), self.upper());
        [x[0].clamp(lo[0], hi[0]), x[1].clamp(lo[1], hi[1])]
    }

    pub fn contains(&self, g: PIGains) -> bool {
        (self.kp_min..=self.kp_max).contains(&g.kp())
            && (self.ki_min..=self.ki_max).contains(&g.ki())
    }

    pub(crate) fn gains(&self, x: [f64; 2]) -> PIGains {
        PIGains::new(x[0], x[1]).expect("points inside validated bounds are valid gains")
    }
}

/// Outcome of one optimizer run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TuningResult {
    pub gains: PIGains,
    pub cost: f64,
    pub seed: u64,
    pub evaluations: u64,
    /// `(iteration, best cost so far)`; generations for GA, temperature
    /// stages for SA. Entry 0 is the initial incumbent.
    pub history: Vec<(usize, f64)>,
}

/// Results of repeated runs, sorted by ascending cost.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSet {
    pub runs: Vec<TuningResult>,
}

impl RunSet {
    /// The lowest-cost run.
    pub fn best(&self) -> &TuningResult {
        &self.runs[0]
    }
}

/// Either optimizer with its configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", content = "config", rename_all = "lowercase")]
pub enum Tuner {
    Ga(GAConfig),
    Sa(SAConfig),
}

impl Tuner {
    pub fn seed(&self) -> u64 {
        match self {
            Tuner::Ga(c) => c.seed,
            Tuner::Sa(c) => c.seed,
        }
    }

    pub fn with_seed(&self, seed: u64) -> Self {
        match self {
            Tuner::Ga(c) => Tuner::Ga(GAConfig { seed, ..c.clone() }),
            Tuner::Sa(c) => Tuner::Sa(SAConfig { seed, ..c.clone() }),
        }
    }

    pub fn validate(&self) -> Result<(), TuneError> {
        match self {
            Tuner::Ga(c) => c.validate(),
            Tuner::Sa(c) => c.validate(),
        }
    }

    pub fn run<F>(&self, bounds: &GainBounds, objective: F) -> Result<TuningResult, TuneError>
    where
        F: Fn(PIGains) -> f64 + Sync + Send,
    {
        match self {
            Tuner::Ga(c) => ga_tune(bounds, c, objective),
            Tuner::Sa(c) => sa_tune(bounds, c, objective),
        }
    }
}

/// Runs `tuner` with seeds `seed, seed + 1, …, seed + n_runs - 1` and sorts
/// the results by cost (ties broken by seed).
///
/// Fails as a whole if any run fails.
pub fn multi_run<F>(
    tuner: &Tuner,
    bounds: &GainBounds,
    objective: F,
    n_runs: usize,
) -> Result<RunSet, TuneError>
where
    F: Fn(PIGains) -> f64 + Sync + Send,
{
    if n_runs == 0 {
        return invalid("n_runs must be at least 1");
    }
    tuner.validate()?;
    bounds.validate()?;
    let seeds: Vec<u64> = (0..n_runs as u64)
        .map(|i| tuner.seed().wrapping_add(i))
        .collect();
    let results = map_ordered(&seeds, |&seed| {
        tuner.with_seed(seed).run(bounds, &objective)
    });
    let mut runs = results.into_iter().collect::<Result<Vec<_>, _>>()?;
    runs.sort_by(|a, b| a.cost.total_cmp(&b.cost).then(a.seed.cmp(&b.seed)));
    Ok(RunSet { runs })
}

/// Index of the lowest cost; earliest index wins ties.
pub(crate) fn argmin(costs: &[f64]) -> usize {
    costs.iter().enumerate().fold(0, |best, (i, c)| {
        if c.total_cmp(&costs[best]).is_lt() {
            i
        } else {
            best
        }
    })
}
