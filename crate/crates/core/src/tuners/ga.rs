use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::{argmin, invalid, GainBounds, TuneError, TuningResult};
use crate::parallel::map_ordered;
use crate::sim::PIGains;

/// Real-coded genetic algorithm settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GAConfig {
    pub population_size: usize,
    pub generations: usize,
    pub tournament_size: usize,
    pub crossover_rate: f64,
    pub blx_alpha: f64,
    pub mutation_rate: f64,
    /// Mutation standard deviation as a fraction of each gain's range.
    pub mutation_sigma_fraction: f64,
    pub elitism_count: usize,
    pub seed: u64,
}

impl Default for GAConfig {
    fn default() -> Self {
        Self {
            population_size: 50,
            generations: 100,
            tournament_size: 3,
            crossover_rate: 0.9,
            blx_alpha: 0.5,
            mutation_rate: 0.1,
            mutation_sigma_fraction: 0.05,
            elitism_count: 1,
            seed: 0,
        }
    }
}

impl GAConfig {
    pub fn validate(&self) -> Result<(), TuneError> {
        if self.population_size < 4 {
            return invalid(format!(
                "population_size must be >= 4, got {}",
                self.population_size
            ));
        }
        if !(2..=self.population_size).contains(&self.tournament_size) {
            return invalid(format!(
                "tournament_size must lie in [2, {}], got {}",
                self.population_size, self.tournament_size
            ));
        }
        for (name, p) in [
            ("crossover_rate", self.crossover_rate),
            ("mutation_rate", self.mutation_rate),
        ] {
            if !(0.0..=1.0).contains(&p) {
                return invalid(format!("{name} must lie in [0, 1], got {p}"));
            }
        }
        if self.elitism_count >= self.population_size {
            return invalid(format!(
                "elitism_count must be < population_size, got {}",
                self.elitism_count
            ));
        }
        if !(self.blx_alpha.is_finite() && self.blx_alpha >= 0.0) {
            return invalid(format!("blx_alpha must be >= 0, got {}", self.blx_alpha));
        }
        if !(self.mutation_sigma_fraction.is_finite() && self.mutation_sigma_fraction >= 0.0) {
            return invalid(format!(
                "mutation_sigma_fraction must be >= 0, got {}",
                self.mutation_sigma_fraction
            ));
        }
        Ok(())
    }
}

type Genome = [f64; 2];

/// Minimizes `objective` over `bounds` with a generational real-coded GA.
///
/// Uniform initialization, tournament selection, BLX-α crossover, per-gene
/// Gaussian mutation and elitism. Offspring are clamped to the box. Each
/// generation's offspring are evaluated as one batch.
pub fn ga_tune<F>(
    bounds: &GainBounds,
    config: &GAConfig,
    objective: F,
) -> Result<TuningResult, TuneError>
where
    F: Fn(PIGains) -> f64 + Sync + Send,
{
    config.validate()?;
    bounds.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let (lo, hi, range) = (bounds.lower(), bounds.upper(), bounds.range());
    let mutation = [
        Normal::new(0.0, config.mutation_sigma_fraction * range[0]).expect("sigma >= 0"),
        Normal::new(0.0, config.mutation_sigma_fraction * range[1]).expect("sigma >= 0"),
    ];
    let evaluate = |genomes: &[Genome]| map_ordered(genomes, |&x| objective(bounds.gains(x)));

    let mut population: Vec<Genome> = (0..config.population_size)
        .map(|_| {
            [
                rng.random_range(lo[0]..=hi[0]),
                rng.random_range(lo[1]..=hi[1]),
            ]
        })
        .collect();
    let mut fitness = evaluate(&population);
    let mut evaluations = population.len() as u64;

    let first = argmin(&fitness);
    let (mut best, mut best_cost) = (population[first], fitness[first]);
    let mut history = vec![(0, best_cost)];

    let n_children = config.population_size - config.elitism_count;
    for generation in 1..=config.generations {
        let mut order: Vec<usize> = (0..population.len()).collect();
        order.sort_by(|&a, &b| fitness[a].total_cmp(&fitness[b]).then(a.cmp(&b)));

        let mut children: Vec<Genome> = Vec::with_capacity(n_children);
        while children.len() < n_children {
            let a = population[tournament(&mut rng, &fitness, config.tournament_size)];
            let b = population[tournament(&mut rng, &fitness, config.tournament_size)];
            let (mut c1, mut c2) = if rng.random::<f64>() < config.crossover_rate {
                blx(&mut rng, a, b, config.blx_alpha)
            } else {
                (a, b)
            };
            for child in [&mut c1, &mut c2] {
                for (gene, dist) in child.iter_mut().zip(&mutation) {
                    if rng.random::<f64>() < config.mutation_rate {
                        *gene += dist.sample(&mut rng);
                    }
                }
                *child = bounds.clamp(*child);
            }
            children.push(c1);
            if children.len() < n_children {
                children.push(c2);
            }
        }
        let child_fitness = evaluate(&children);
        evaluations += children.len() as u64;

        let mut next_pop: Vec<Genome> = Vec::with_capacity(config.population_size);
        let mut next_fit = Vec::with_capacity(config.population_size);
        for &i in order.iter().take(config.elitism_count) {
            next_pop.push(population[i]);
            next_fit.push(fitness[i]);
        }
        next_pop.extend(children);
        next_fit.extend(child_fitness);
        population = next_pop;
        fitness = next_fit;

        let i = argmin(&fitness);
        if fitness[i] < best_cost {
            best = population[i];
            best_cost = fitness[i];
        }
        history.push((generation, best_cost));
    }

    Ok(TuningResult {
        gains: bounds.gains(best),
        cost: best_cost,
        seed: config.seed,
        evaluations,
        history,
    })
}

/// Index of the fittest of `k` uniformly drawn contestants (with
/// replacement).
fn tournament(rng: &mut ChaCha8Rng, fitness: &[f64], k: usize) -> usize {
    let mut winner = rng.random_range(0..fitness.len());
    for _ in 1..k {
        let c = rng.random_range(0..fitness.len());
        if fitness[c].total_cmp(&fitness[winner]).is_lt() {
            winner = c;
        }
    }
    winner
}

/// Blend crossover: each child gene is drawn uniformly from the parents'
/// interval widened by `alpha` times its length on both sides.
fn blx(rng: &mut ChaCha8Rng, a: Genome, b: Genome, alpha: f64) -> (Genome, Genome) {
    let mut c1 = [0.0; 2];
    let mut c2 = [0.0; 2];
    for i in 0..2 {
        let (min, max) = (a[i].min(b[i]), a[i].max(b[i]));
        let spread = alpha * (max - min);
        let (lo, hi) = (min - spread, max + spread);
        c1[i] = lo + rng.random::<f64>() * (hi - lo);
        c2[i] = lo + rng.random::<f64>() * (hi - lo);
    }
    (c1, c2)
}
