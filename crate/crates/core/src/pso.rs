//! Global-best particle swarm optimization over a box, maximizing a fitness.
//!
//! Each step moves every particle with
//! `v ← ω v + c1 r1 (ppm − x) + c2 r2 (gpm − x)`, `x ← x + v`, clamps the
//! position to the box, re-evaluates fitness and then updates the personal
//! and global bests on strict improvement, visiting particles in index
//! order.
//!
//! Randomness: the swarm draws from ChaCha8 seeded with `config.seed`.
//! Stream 0 initializes positions (particle-major, coordinate-minor); the
//! step that produces iteration `t` uses stream `t` and draws `r1` then `r2`
//! once per particle. Any step can therefore be replayed from its input
//! state alone, and results do not depend on how many threads evaluate
//! fitness.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::potential;
use crate::netmodel::{NetworkScenario, PowerProfile};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PsoConfig<T> {
    /// Swarm size `N`.
    pub n_particles: usize,
    /// Number of update steps `Ger`.
    pub max_iters: usize,
    /// Inertia weight `ω`.
    pub inertia: T,
    /// Self-learning factor.
    pub c1: T,
    /// Group-learning factor.
    pub c2: T,
    /// Search dimension (number of base stations).
    pub dim: usize,
    pub lower_bound: T,
    pub upper_bound: T,
    pub seed: u64,
}

impl<T: Real> PsoConfig<T> {
    /// Default hyperparameters (`N = 6`, `Ger = 5`, `ω = 0.8`, `c1 = c2 = 0.9`)
    /// over the scenario's power box.
    pub fn for_scenario(scenario: &NetworkScenario<T>, seed: u64) -> Self {
        let params = scenario.params();
        Self {
            n_particles: 6,
            max_iters: 5,
            inertia: T::lit(0.8),
            c1: T::lit(0.9),
            c2: T::lit(0.9),
            dim: scenario.num_bs(),
            lower_bound: params.p_floor,
            upper_bound: params.p_max,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if self.n_particles == 0 {
            return bad("swarm needs at least one particle".into());
        }
        if self.dim == 0 {
            return bad("search dimension must be >= 1".into());
        }
        if !(self.inertia >= T::zero() && self.inertia <= T::one()) {
            return bad(format!("inertia {} outside [0, 1]", self.inertia));
        }
        if !(self.c1 >= T::zero() && self.c2 >= T::zero()) {
            return bad("learning factors must be >= 0".into());
        }
        if !(self.lower_bound.is_finite() && self.upper_bound.is_finite())
            || self.lower_bound >= self.upper_bound
        {
            return bad(format!(
                "bounds [{}, {}] must be finite with lower < upper",
                self.lower_bound, self.upper_bound
            ));
        }
        Ok(())
    }

    fn rng(&self, stream: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(stream);
        rng
    }
}

/// Objective maximized by the swarm.
pub trait Fitness<T>: Sync {
    fn fitness(&self, position: &[T]) -> Result<T>;
}

impl<T, F> Fitness<T> for F
where
    F: Fn(&[T]) -> Result<T> + Sync,
{
    fn fitness(&self, position: &[T]) -> Result<T> {
        self(position)
    }
}

/// The network potential as a swarm objective; positions are power profiles.
#[derive(Debug, Clone, Copy)]
pub struct PotentialFitness<'a, T> {
    scenario: &'a NetworkScenario<T>,
}

impl<'a, T: Real> PotentialFitness<'a, T> {
    pub fn new(scenario: &'a NetworkScenario<T>) -> Self {
        Self { scenario }
    }
}

impl<T: Real> Fitness<T> for PotentialFitness<'_, T> {
    fn fitness(&self, position: &[T]) -> Result<T> {
        let powers = PowerProfile::new(position.to_vec(), self.scenario)?;
        potential(self.scenario, &powers)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PsoState<T> {
    pub positions: Vec<Vec<T>>,
    pub velocities: Vec<Vec<T>>,
    pub fitness: Vec<T>,
    pub personal_best: Vec<Vec<T>>,
    pub personal_best_fitness: Vec<T>,
    pub global_best: Vec<T>,
    pub global_best_fitness: T,
    /// Number of steps applied since initialization.
    pub iteration: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PsoOutcome<T> {
    pub best_position: Vec<T>,
    pub best_fitness: T,
    /// Global-best fitness after initialization, then after every step.
    pub trace: Vec<T>,
}

fn evaluate_all<T: Real, F: Fitness<T>>(fitness: &F, positions: &[Vec<T>]) -> Result<Vec<T>> {
    positions.par_iter().map(|x| fitness.fitness(x)).collect()
}

/// Random initial swarm with zero velocities.
pub fn initialize<T: Real, F: Fitness<T>>(
    fitness: &F,
    config: &PsoConfig<T>,
) -> Result<PsoState<T>> {
    initialize_with(fitness, config, &[])
}

/// Like [`initialize`], but the first particles start at `preset` positions.
/// The remaining particles still consume the same random draws they would
/// have without presets.
pub fn initialize_with<T: Real, F: Fitness<T>>(
    fitness: &F,
    config: &PsoConfig<T>,
    preset: &[Vec<T>],
) -> Result<PsoState<T>> {
    config.validate()?;
    if preset.len() > config.n_particles {
        return Err(Error::argument("more preset positions than particles"));
    }
    let (lo, hi) = (config.lower_bound, config.upper_bound);
    for x in preset {
        if x.len() != config.dim || x.iter().any(|&v| !(v >= lo && v <= hi)) {
            return Err(Error::argument("preset position outside the search box"));
        }
    }

    let mut rng = config.rng(0);
    let mut positions: Vec<Vec<T>> = (0..config.n_particles)
        .map(|_| {
            (0..config.dim)
                .map(|_| {
                    let u = T::lit(rng.gen::<f64>());
                    (lo + u * (hi - lo)).min(hi)
                })
                .collect()
        })
        .collect();
    for (slot, x) in positions.iter_mut().zip(preset) {
        slot.clone_from(x);
    }

    let scores = evaluate_all(fitness, &positions)?;
    let mut best = 0;
    for i in 1..scores.len() {
        if scores[i] > scores[best] {
            best = i;
        }
    }
    Ok(PsoState {
        velocities: vec![vec![T::zero(); config.dim]; config.n_particles],
        personal_best: positions.clone(),
        personal_best_fitness: scores.clone(),
        global_best: positions[best].clone(),
        global_best_fitness: scores[best],
        fitness: scores,
        positions,
        iteration: 0,
    })
}

/// One synchronous swarm update; returns the next state.
pub fn step<T: Real, F: Fitness<T>>(
    state: &PsoState<T>,
    fitness: &F,
    config: &PsoConfig<T>,
) -> Result<PsoState<T>> {
    let mut next = state.clone();
    next.iteration += 1;
    let mut rng = config.rng(next.iteration);
    let (lo, hi) = (config.lower_bound, config.upper_bound);

    for i in 0..config.n_particles {
        let r1 = T::lit(rng.gen::<f64>());
        let r2 = T::lit(rng.gen::<f64>());
        let x = &mut next.positions[i];
        let v = &mut next.velocities[i];
        for d in 0..config.dim {
            v[d] = config.inertia * v[d]
                + config.c1 * r1 * (state.personal_best[i][d] - x[d])
                + config.c2 * r2 * (state.global_best[d] - x[d]);
            let moved = x[d] + v[d];
            if moved < lo {
                x[d] = lo;
                v[d] = T::zero();
            } else if moved > hi {
                x[d] = hi;
                v[d] = T::zero();
            } else {
                x[d] = moved;
            }
        }
    }

    next.fitness = evaluate_all(fitness, &next.positions)?;
    for i in 0..config.n_particles {
        let score = next.fitness[i];
        if score > next.personal_best_fitness[i] {
            next.personal_best_fitness[i] = score;
            next.personal_best[i].clone_from(&next.positions[i]);
            if score > next.global_best_fitness {
                next.global_best_fitness = score;
                next.global_best.clone_from(&next.positions[i]);
            }
        }
    }
    Ok(next)
}

/// Runs `config.max_iters` steps from a random start.
pub fn optimize<T: Real, F: Fitness<T>>(
    fitness: &F,
    config: &PsoConfig<T>,
) -> Result<PsoOutcome<T>> {
    optimize_with(fitness, config, &[])
}

/// [`optimize`] with preset starting positions for the first particles.
pub fn optimize_with<T: Real, F: Fitness<T>>(
    fitness: &F,
    config: &PsoConfig<T>,
    preset: &[Vec<T>],
) -> Result<PsoOutcome<T>> {
    let mut state = initialize_with(fitness, config, preset)?;
    let mut trace = Vec::with_capacity(config.max_iters + 1);
    trace.push(state.global_best_fitness);
    for _ in 0..config.max_iters {
        state = step(&state, fitness, config)?;
        trace.push(state.global_best_fitness);
    }
    Ok(PsoOutcome {
        best_position: state.global_best,
        best_fitness: state.global_best_fitness,
        trace,
    })
}

/// Maximizes the network potential over transmit powers.
pub fn optimize_powers<T: Real>(
    scenario: &NetworkScenario<T>,
    config: &PsoConfig<T>,
) -> Result<(PowerProfile<T>, PsoOutcome<T>)> {
    if config.dim != scenario.num_bs() {
        return Err(Error::Config(format!(
            "swarm dimension {} does not match K = {}",
            config.dim,
            scenario.num_bs()
        )));
    }
    let outcome = optimize(&PotentialFitness::new(scenario), config)?;
    let powers = PowerProfile::new(outcome.best_position.clone(), scenario)?;
    Ok((powers, outcome))
}
