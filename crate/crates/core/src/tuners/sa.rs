use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::{argmin, invalid, GainBounds, TuneError, TuningResult};
use crate::parallel::map_ordered;
use crate::sim::PIGains;

/// Probe moves used to calibrate the automatic initial temperature.
const PROBE_MOVES: usize = 50;
/// Acceptance probability targeted for the median uphill probe move.
const PROBE_ACCEPTANCE: f64 = 0.8;

/// Simulated annealing settings with a geometric cooling schedule.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SAConfig {
    /// Starting temperature in cost units; `None` calibrates it from probe
    /// moves around the start point.
    pub initial_temperature: Option<f64>,
    pub cooling_factor: f64,
    pub moves_per_temperature: usize,
    /// Annealing stops once the temperature falls below this fraction of
    /// the initial temperature.
    pub stop_temperature_ratio: f64,
    /// Proposal standard deviation as a fraction of each gain's range.
    pub proposal_sigma_fraction: f64,
    pub seed: u64,
}

impl Default for SAConfig {
    fn default() -> Self {
        Self {
            initial_temperature: None,
            cooling_factor: 0.95,
            moves_per_temperature: 100,
            stop_temperature_ratio: 1e-4,
            proposal_sigma_fraction: 0.02,
            seed: 0,
        }
    }
}

impl SAConfig {
    pub fn validate(&self) -> Result<(), TuneError> {
        if !(self.cooling_factor > 0.0 && self.cooling_factor < 1.0) {
            return invalid(format!(
                "cooling_factor must lie in (0, 1), got {}",
                self.cooling_factor
            ));
        }
        if self.moves_per_temperature < 1 {
            return invalid("moves_per_temperature must be >= 1");
        }
        if !(self.stop_temperature_ratio > 0.0 && self.stop_temperature_ratio < 1.0) {
            return invalid(format!(
                "stop_temperature_ratio must lie in (0, 1), got {}",
                self.stop_temperature_ratio
            ));
        }
        if !(self.proposal_sigma_fraction.is_finite() && self.proposal_sigma_fraction > 0.0) {
            return invalid(format!(
                "proposal_sigma_fraction must be > 0, got {}",
                self.proposal_sigma_fraction
            ));
        }
        if let Some(t0) = self.initial_temperature {
            if !(t0.is_finite() && t0 > 0.0) {
                return invalid(format!("initial_temperature must be > 0, got {t0}"));
            }
        }
        Ok(())
    }

    /// Number of temperature stages run before the stop ratio is crossed.
    pub fn stage_count(&self) -> usize {
        let mut ratio = 1.0;
        let mut stages = 0;
        while ratio >= self.stop_temperature_ratio {
            stages += 1;
            ratio *= self.cooling_factor;
        }
        stages
    }
}

/// Minimizes `objective` over `bounds` by simulated annealing.
///
/// Gaussian proposals clamped to the box, Metropolis acceptance, geometric
/// cooling after every `moves_per_temperature` moves. Returns the best point
/// ever evaluated.
pub fn sa_tune<F>(
    bounds: &GainBounds,
    config: &SAConfig,
    objective: F,
) -> Result<TuningResult, TuneError>
where
    F: Fn(PIGains) -> f64 + Sync + Send,
{
    config.validate()?;
    bounds.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let (lo, hi, range) = (bounds.lower(), bounds.upper(), bounds.range());
    let step = [
        Normal::new(0.0, config.proposal_sigma_fraction * range[0]).expect("sigma > 0"),
        Normal::new(0.0, config.proposal_sigma_fraction * range[1]).expect("sigma > 0"),
    ];
    let propose = |rng: &mut ChaCha8Rng, x: [f64; 2]| {
        bounds.clamp([x[0] + step[0].sample(rng), x[1] + step[1].sample(rng)])
    };
    let cost = |x: [f64; 2]| objective(bounds.gains(x));

    let mut current = [
        rng.random_range(lo[0]..=hi[0]),
        rng.random_range(lo[1]..=hi[1]),
    ];
    let mut current_cost = cost(current);
    let mut evaluations = 1u64;
    let (mut best, mut best_cost) = (current, current_cost);

    let t0 = match config.initial_temperature {
        Some(t0) => t0,
        None => {
            let probes: Vec<[f64; 2]> = (0..PROBE_MOVES)
                .map(|_| propose(&mut rng, current))
                .collect();
            let probe_costs = map_ordered(&probes, |&x| cost(x));
            evaluations += probes.len() as u64;
            let i = argmin(&probe_costs);
            if probe_costs[i] < best_cost {
                best = probes[i];
                best_cost = probe_costs[i];
            }
            calibrated_temperature(current_cost, &probe_costs)
        }
    };

    let mut history = vec![(0, best_cost)];
    let mut temperature = t0;
    for stage in 1..=config.stage_count() {
        for _ in 0..config.moves_per_temperature {
            let candidate = propose(&mut rng, current);
            let candidate_cost = cost(candidate);
            evaluations += 1;
            let delta = candidate_cost - current_cost;
            let accept = delta <= 0.0 || rng.random::<f64>() < (-delta / temperature).exp();
            if accept {
                current = candidate;
                current_cost = candidate_cost;
                if current_cost < best_cost {
                    best = current;
                    best_cost = current_cost;
                }
            }
        }
        history.push((stage, best_cost));
        temperature *= config.cooling_factor;
    }

    Ok(TuningResult {
        gains: bounds.gains(best),
        cost: best_cost,
        seed: config.seed,
        evaluations,
        history,
    })
}

/// Temperature at which the median uphill probe move is accepted with
/// probability 0.8. Falls back to `max(|start|, 1)` when no probe went
/// uphill.
fn calibrated_temperature(start_cost: f64, probe_costs: &[f64]) -> f64 {
    let mut uphill: Vec<f64> = probe_costs
        .iter()
        .map(|c| c - start_cost)
        .filter(|d| *d > 0.0 && d.is_finite())
        .collect();
    if uphill.is_empty() {
        return start_cost.abs().max(1.0);
    }
    uphill.sort_by(f64::total_cmp);
    let m = uphill.len();
    let median = if m % 2 == 1 {
        uphill[m / 2]
    } else {
        0.5 * (uphill[m / 2 - 1] + uphill[m / 2])
    };
    -median / PROBE_ACCEPTANCE.ln()
}
