//! Power-control game between base stations.
//!
//! Each station's benefit is its interference-free demand
//! `B_k = max_compute(P_k)`. Its utility subtracts the weighted demand deltas
//! it suffers and inflicts:
//!
//! ```text
//! u_k = B_k − ε/(K−1) · Σ_{m≠k} (I_{k,m} + I_{m,k})
//! Φ   = Σ_k [ B_k − ε/(K−1) · (b Σ_{m≠k} I_{k,m} + (1−b) Σ_{m≠k} I_{m,k}) ]
//! ```
//!
//! Every `I_{a,b}` depends only on `P_a`, `P_b` and `R_ab`, so a unilateral
//! change of `P_k` moves `Φ` and `u_k` by the same amount for any `b`.
//! [`verify_exact_potential`] checks that numerically.

use crate::demand::{demand_delta, max_compute};
use crate::error::Result;
use crate::netmodel::{NetworkScenario, PowerProfile};
use crate::scalar::Real;

/// Utilities of all stations and the potential for one profile.
#[derive(Debug, Clone, PartialEq)]
pub struct GameEvaluation<T> {
    pub utilities: Vec<T>,
    pub potential: T,
}

impl<T: Real> GameEvaluation<T> {
    pub fn mean_utility(&self) -> T {
        let n = T::from_count(self.utilities.len());
        self.utilities.iter().fold(T::zero(), |acc, &u| acc + u) / n
    }
}

/// `ε / (K − 1)`, or zero for a single station.
fn cost_weight<T: Real>(scenario: &NetworkScenario<T>) -> T {
    let k = scenario.num_bs();
    if k < 2 {
        T::zero()
    } else {
        scenario.params().epsilon / T::from_count(k - 1)
    }
}

/// `I_{a,b}` for station `a` disturbed by station `b`.
fn delta<T: Real>(
    scenario: &NetworkScenario<T>,
    powers: &PowerProfile<T>,
    a: usize,
    b: usize,
) -> Result<T> {
    demand_delta(scenario, powers[a], powers[b], scenario.distance(a, b))
}

/// Row-major `K × K` matrix of pairwise deltas, zero on the diagonal.
pub fn delta_matrix<T: Real>(
    scenario: &NetworkScenario<T>,
    powers: &PowerProfile<T>,
) -> Result<Vec<T>> {
    let k = scenario.num_bs();
    let mut out = vec![T::zero(); k * k];
    for a in 0..k {
        for b in 0..k {
            if a != b {
                out[a * k + b] = delta(scenario, powers, a, b)?;
            }
        }
    }
    Ok(out)
}

/// Utility of station `k`. A single station has no interference cost.
pub fn utility<T: Real>(
    scenario: &NetworkScenario<T>,
    powers: &PowerProfile<T>,
    k: usize,
) -> Result<T> {
    scenario.check_index(k)?;
    let benefit = max_compute(scenario, powers[k])?;
    let mut cost = T::zero();
    for m in (0..scenario.num_bs()).filter(|&m| m != k) {
        cost = cost + delta(scenario, powers, k, m)? + delta(scenario, powers, m, k)?;
    }
    Ok(benefit - cost_weight(scenario) * cost)
}

fn assemble<T: Real>(
    scenario: &NetworkScenario<T>,
    benefits: &[T],
    deltas: &[T],
) -> GameEvaluation<T> {
    let k = scenario.num_bs();
    let w = cost_weight(scenario);
    let b = scenario.params().b;
    let mut utilities = Vec::with_capacity(k);
    let mut potential = T::zero();
    for i in 0..k {
        let (mut inflicted_on_me, mut caused_by_me) = (T::zero(), T::zero());
        for m in (0..k).filter(|&m| m != i) {
            inflicted_on_me = inflicted_on_me + deltas[i * k + m];
            caused_by_me = caused_by_me + deltas[m * k + i];
        }
        utilities.push(benefits[i] - w * (inflicted_on_me + caused_by_me));
        potential =
            potential + (benefits[i] - w * (b * inflicted_on_me + (T::one() - b) * caused_by_me));
    }
    GameEvaluation {
        utilities,
        potential,
    }
}

/// All utilities and the potential, sharing one pass over the pairs.
pub fn evaluate<T: Real>(
    scenario: &NetworkScenario<T>,
    powers: &PowerProfile<T>,
) -> Result<GameEvaluation<T>> {
    Ok(evaluate_with_deltas(scenario, powers)?.0)
}

/// [`evaluate`] that also returns the [`delta_matrix`] it was built from.
pub fn evaluate_with_deltas<T: Real>(
    scenario: &NetworkScenario<T>,
    powers: &PowerProfile<T>,
) -> Result<(GameEvaluation<T>, Vec<T>)> {
    let benefits = powers
        .as_slice()
        .iter()
        .map(|&p| max_compute(scenario, p))
        .collect::<Result<Vec<_>>>()?;
    let deltas = delta_matrix(scenario, powers)?;
    Ok((assemble(scenario, &benefits, &deltas), deltas))
}

/// Network potential `Φ(P)`.
pub fn potential<T: Real>(scenario: &NetworkScenario<T>, powers: &PowerProfile<T>) -> Result<T> {
    Ok(evaluate(scenario, powers)?.potential)
}

/// Relative residual `|ΔΦ − Δu_k| / max(1, |ΔΦ|)` when station `k` moves
/// from its current power to `new_power`.
pub fn verify_exact_potential<T: Real>(
    scenario: &NetworkScenario<T>,
    powers: &PowerProfile<T>,
    k: usize,
    new_power: T,
) -> Result<T> {
    let moved = powers.with_power(scenario, k, new_power)?;
    let d_phi = potential(scenario, &moved)? - potential(scenario, powers)?;
    let d_u = utility(scenario, &moved, k)? - utility(scenario, powers, k)?;
    Ok((d_phi - d_u).abs() / T::one().max(d_phi.abs()))
}
