//! Sharing the MEC server's capacity `S` among base stations.
//!
//! The proposed scheme maximizes the mean allocation coefficient
//! `Sat = (1/K) Σ s_k / f_k` subject to `Σ s_k ≤ S` and `0 ≤ s_k ≤ f_k`.
//! Each unit of capacity given to station `k` is worth `1 / (K f_k)`, so the
//! LP is a fractional knapsack: fill stations in increasing order of demand.
//! Two reference schemes split the capacity equally, with and without a cap
//! at the station's demand.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    /// LP-optimal allocation, paired with optimized powers.
    Proposed,
    /// Equal split `S / K`.
    Ref1,
    /// Equal split capped at demand, `min(f_k, S / K)`.
    Ref2,
}

impl Scheme {
    pub const ALL: [Scheme; 3] = [Scheme::Proposed, Scheme::Ref1, Scheme::Ref2];

    pub fn name(self) -> &'static str {
        match self {
            Scheme::Proposed => "proposed",
            Scheme::Ref1 => "ref1",
            Scheme::Ref2 => "ref2",
        }
    }

    pub fn allocate<T: Real>(self, f_bs: &[T], capacity: T) -> Result<AllocationResult<T>> {
        match self {
            Scheme::Proposed => allocate_lp(f_bs, capacity),
            Scheme::Ref1 => allocate_equal(f_bs, capacity),
            Scheme::Ref2 => allocate_capped_equal(f_bs, capacity),
        }
    }
}

impl std::fmt::Display for Scheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Scheme::ALL
            .into_iter()
            .find(|scheme| scheme.name() == s)
            .ok_or_else(|| Error::argument(format!("unknown solution name {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AllocationResult<T> {
    /// Granted compute per station.
    pub s_bs: Vec<T>,
    /// Mean allocation coefficient in `[0, 1]`.
    pub sat: T,
}

fn validate<T: Real>(f_bs: &[T], capacity: T) -> Result<()> {
    if f_bs.is_empty() {
        return Err(Error::argument(
            "allocation needs at least one base station",
        ));
    }
    if let Some(bad) = f_bs.iter().find(|f| !(f.is_finite() && **f >= T::zero())) {
        return Err(Error::argument(format!(
            "demand must be finite and >= 0, got {bad}"
        )));
    }
    if !(capacity.is_finite() && capacity >= T::zero()) {
        return Err(Error::argument(format!(
            "capacity must be finite and >= 0, got {capacity}"
        )));
    }
    Ok(())
}

/// Mean of `min(s_k / f_k, 1)`; a station with zero demand counts as fully served.
pub fn allocation_coefficient<T: Real>(f_bs: &[T], s_bs: &[T]) -> T {
    let total = f_bs.iter().zip(s_bs).fold(T::zero(), |acc, (&f, &s)| {
        acc + if f > T::zero() {
            (s / f).min(T::one())
        } else {
            T::one()
        }
    });
    total / T::from_count(f_bs.len())
}

/// LP-optimal allocation.
///
/// If total demand fits, every station gets its demand and `sat = 1`.
/// Otherwise stations are served fully in ascending order of demand (ties by
/// index) and the first one that does not fit gets the remainder.
pub fn allocate_lp<T: Real>(f_bs: &[T], capacity: T) -> Result<AllocationResult<T>> {
    validate(f_bs, capacity)?;
    let total = f_bs.iter().fold(T::zero(), |acc, &f| acc + f);
    if total <= capacity {
        return Ok(AllocationResult {
            s_bs: f_bs.to_vec(),
            sat: T::one(),
        });
    }

    let mut order: Vec<usize> = (0..f_bs.len()).filter(|&k| f_bs[k] > T::zero()).collect();
    // Stable: equal demands keep index order.
    order.sort_by(|&a, &b| f_bs[a].partial_cmp(&f_bs[b]).expect("finite demands"));

    let mut s_bs = vec![T::zero(); f_bs.len()];
    let mut remaining = capacity;
    for k in order {
        if remaining <= T::zero() {
            break;
        }
        let grant = f_bs[k].min(remaining);
        s_bs[k] = grant;
        remaining = remaining - grant;
    }
    let sat = allocation_coefficient(f_bs, &s_bs);
    Ok(AllocationResult { s_bs, sat })
}

/// Reference scheme 1: every station receives `S / K`. The coefficient of a
/// station is capped at 1, so over-allocation earns nothing.
pub fn allocate_equal<T: Real>(f_bs: &[T], capacity: T) -> Result<AllocationResult<T>> {
    validate(f_bs, capacity)?;
    let share = capacity / T::from_count(f_bs.len());
    let s_bs = vec![share; f_bs.len()];
    let sat = allocation_coefficient(f_bs, &s_bs);
    Ok(AllocationResult { s_bs, sat })
}

/// Reference scheme 2: `s_k = min(f_k, S / K)`.
pub fn allocate_capped_equal<T: Real>(f_bs: &[T], capacity: T) -> Result<AllocationResult<T>> {
    validate(f_bs, capacity)?;
    let share = capacity / T::from_count(f_bs.len());
    let s_bs: Vec<T> = f_bs.iter().map(|&f| f.min(share)).collect();
    let sat = allocation_coefficient(f_bs, &s_bs);
    Ok(AllocationResult { s_bs, sat })
}
