//! Geometry and wireless-channel layer.
//!
//! Base stations sit at fixed points in the plane. A BS transmitting at power
//! `P_k` sees aggregate interference `I_k = Σ_{m≠k} P_m R_mk^{-α}` from the
//! others, and its SINR at distance `r` under an exponential fading sample `h`
//! is `h r^{-α} P_k / (σ² + I_k)`. The coverage radius is the distance at
//! which that SINR drops to the threshold `T`; because `h` is exponential with
//! rate `μ`, the radius has the closed-form CDF
//! `1 − exp(−μ T (σ² + I_k) r^α / P_k)`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Converts a ratio in decibels to linear scale.
pub fn db_to_linear<T: Real>(db: T) -> T {
    T::lit(10.0).powf(db / T::lit(10.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelParams<T> {
    /// Rate of the exponential fading distribution.
    pub mu: T,
    /// Noise power in watts.
    pub sigma2: T,
    /// SINR threshold, linear scale.
    pub threshold: T,
    /// Path-loss exponent.
    pub alpha: T,
}

impl<T: Real> ChannelParams<T> {
    pub fn new(mu: T, sigma2: T, threshold: T, alpha: T) -> Result<Self> {
        let params = Self {
            mu,
            sigma2,
            threshold,
            alpha,
        };
        params.validate()?;
        Ok(params)
    }

    /// Same as [`ChannelParams::new`] with the threshold given in dB.
    pub fn with_threshold_db(mu: T, sigma2: T, threshold_db: T, alpha: T) -> Result<Self> {
        Self::new(mu, sigma2, db_to_linear(threshold_db), alpha)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: T| {
            if v.is_finite() && v > T::zero() {
                Ok(())
            } else {
                Err(Error::domain(format!(
                    "{name} must be finite and > 0, got {v}"
                )))
            }
        };
        positive("mu", self.mu)?;
        positive("sigma2", self.sigma2)?;
        positive("threshold", self.threshold)?;
        if !(self.alpha.is_finite() && self.alpha > T::one()) {
            return Err(Error::domain(format!(
                "path-loss exponent must be finite and > 1, got {}",
                self.alpha
            )));
        }
        Ok(())
    }

    /// Rate `μ T (σ² + I) / P` of the exponent in the coverage-radius law.
    pub fn exponent_rate(&self, power: T, interference: T) -> T {
        self.mu * self.threshold * (self.sigma2 + interference) / power
    }

    /// Draws a fading sample by inverse transform of a uniform variate.
    pub fn sample_fading<R: Rng + ?Sized>(&self, rng: &mut R) -> T {
        // gen::<f64>() is in [0, 1); 1 - u is in (0, 1] so the log is finite.
        let u: f64 = rng.gen();
        -T::lit(1.0 - u).ln() / self.mu
    }
}

impl<T: Real> Default for ChannelParams<T> {
    fn default() -> Self {
        Self {
            mu: T::one(),
            sigma2: T::lit(1e-15),
            threshold: db_to_linear(T::lit(10.0)),
            alpha: T::lit(4.0),
        }
    }
}

/// Scalar model parameters that, together with BS positions, define a scenario.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScenarioParams<T> {
    pub channel: ChannelParams<T>,
    /// User density in users per square meter.
    pub rho: T,
    /// Required computing resources per user.
    pub f_ue: T,
    /// Maximum coverage radius in meters.
    pub r_max: T,
    /// Maximum transmit power in watts.
    pub p_max: T,
    /// Strictly positive lower bound on every transmit power.
    pub p_floor: T,
    /// Weight of the interference cost in the utility.
    pub epsilon: T,
    /// Split between inflicted and received cost in the potential.
    pub b: T,
    /// Total computing resources of the shared MEC server.
    pub server_capacity: T,
}

impl<T: Real> Default for ScenarioParams<T> {
    fn default() -> Self {
        Self {
            channel: ChannelParams::default(),
            rho: T::lit(1e-2),
            f_ue: T::one(),
            r_max: T::lit(100.0),
            p_max: T::lit(5.0),
            p_floor: T::lit(1e-6),
            epsilon: T::lit(0.5),
            b: T::lit(0.5),
            server_capacity: T::one(),
        }
    }
}

impl<T: Real> ScenarioParams<T> {
    pub fn validate(&self) -> Result<()> {
        self.channel.validate()?;
        let check = |ok: bool, what: &str| {
            if ok {
                Ok(())
            } else {
                Err(Error::domain(what.to_string()))
            }
        };
        let finite = |v: T| v.is_finite();
        check(
            finite(self.rho) && self.rho >= T::zero(),
            "rho must be >= 0",
        )?;
        check(
            finite(self.f_ue) && self.f_ue >= T::zero(),
            "f_ue must be >= 0",
        )?;
        check(
            finite(self.r_max) && self.r_max > T::zero(),
            "r_max must be > 0",
        )?;
        check(
            finite(self.p_max) && self.p_max > T::zero(),
            "p_max must be > 0",
        )?;
        check(
            finite(self.p_floor) && self.p_floor > T::zero() && self.p_floor < self.p_max,
            "p_floor must satisfy 0 < p_floor < p_max",
        )?;
        check(
            finite(self.epsilon) && self.epsilon >= T::zero(),
            "epsilon must be >= 0",
        )?;
        check(
            self.b >= T::zero() && self.b <= T::one(),
            "b must lie in [0, 1]",
        )?;
        check(
            finite(self.server_capacity) && self.server_capacity >= T::zero(),
            "server capacity must be >= 0",
        )?;
        Ok(())
    }
}

/// A fixed deployment of `K` base stations sharing one MEC server.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkScenario<T> {
    positions: Vec<[T; 2]>,
    /// Row-major `K × K` distance matrix.
    distances: Vec<T>,
    params: ScenarioParams<T>,
}

impl<T: Real> NetworkScenario<T> {
    /// Builds a scenario from BS coordinates in meters.
    ///
    /// Fails if the parameters are invalid, there are no stations, or two
    /// stations coincide.
    pub fn from_positions(positions: Vec<[T; 2]>, params: ScenarioParams<T>) -> Result<Self> {
        params.validate()?;
        let k = positions.len();
        if k == 0 {
            return Err(Error::argument("scenario needs at least one base station"));
        }
        let mut distances = vec![T::zero(); k * k];
        for m in 0..k {
            for n in (m + 1)..k {
                let dx = positions[m][0] - positions[n][0];
                let dy = positions[m][1] - positions[n][1];
                let d = dx.hypot(dy);
                if !(d.is_finite() && d > T::zero()) {
                    return Err(Error::argument(format!(
                        "base stations {m} and {n} must be at distinct finite positions"
                    )));
                }
                distances[m * k + n] = d;
                distances[n * k + m] = d;
            }
        }
        Ok(Self {
            positions,
            distances,
            params,
        })
    }

    pub fn num_bs(&self) -> usize {
        self.positions.len()
    }

    pub fn positions(&self) -> &[[T; 2]] {
        &self.positions
    }

    pub fn params(&self) -> &ScenarioParams<T> {
        &self.params
    }

    pub fn channel(&self) -> &ChannelParams<T> {
        &self.params.channel
    }

    /// Distance `R_mn` in meters.
    pub fn distance(&self, m: usize, n: usize) -> T {
        self.distances[m * self.num_bs() + n]
    }

    /// Copy of this scenario with different scalar parameters.
    pub fn with_params(&self, params: ScenarioParams<T>) -> Result<Self> {
        Self::from_positions(self.positions.clone(), params)
    }

    pub(crate) fn check_index(&self, k: usize) -> Result<()> {
        if k < self.num_bs() {
            Ok(())
        } else {
            Err(Error::argument(format!(
                "base-station index {k} out of range for K = {}",
                self.num_bs()
            )))
        }
    }

    pub(crate) fn check_power(&self, p: T) -> Result<()> {
        let ScenarioParams { p_floor, p_max, .. } = self.params;
        if p >= p_floor && p <= p_max {
            Ok(())
        } else {
            Err(Error::domain(format!(
                "transmit power {p} outside [{p_floor}, {p_max}]"
            )))
        }
    }
}

/// One transmit power per base station, each within `[p_floor, p_max]`.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerProfile<T>(Vec<T>);

impl<T: Real> PowerProfile<T> {
    pub fn new(powers: Vec<T>, scenario: &NetworkScenario<T>) -> Result<Self> {
        if powers.len() != scenario.num_bs() {
            return Err(Error::argument(format!(
                "power profile has {} entries for K = {}",
                powers.len(),
                scenario.num_bs()
            )));
        }
        for &p in &powers {
            scenario.check_power(p)?;
        }
        Ok(Self(powers))
    }

    /// Every station at the same power.
    pub fn uniform(scenario: &NetworkScenario<T>, power: T) -> Result<Self> {
        Self::new(vec![power; scenario.num_bs()], scenario)
    }

    /// Every station at `p_max`.
    pub fn max_power(scenario: &NetworkScenario<T>) -> Self {
        Self(vec![scenario.params().p_max; scenario.num_bs()])
    }

    /// The profile after station `k` unilaterally switches to `power`.
    pub fn with_power(&self, scenario: &NetworkScenario<T>, k: usize, power: T) -> Result<Self> {
        scenario.check_index(k)?;
        scenario.check_power(power)?;
        let mut powers = self.0.clone();
        powers[k] = power;
        Ok(Self(powers))
    }

    pub fn as_slice(&self) -> &[T] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<T> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn mean(&self) -> T {
        self.0.iter().fold(T::zero(), |acc, &p| acc + p) / T::from_count(self.0.len())
    }
}

impl<T> std::ops::Index<usize> for PowerProfile<T> {
    type Output = T;

    fn index(&self, k: usize) -> &T {
        &self.0[k]
    }
}

/// Aggregate interference `Σ_{m≠k} P_m R_mk^{-α}` received by station `k`.
pub fn interference_at<T: Real>(
    scenario: &NetworkScenario<T>,
    powers: &PowerProfile<T>,
    k: usize,
) -> Result<T> {
    scenario.check_index(k)?;
    if powers.len() != scenario.num_bs() {
        return Err(Error::argument(
            "power profile length does not match scenario",
        ));
    }
    let alpha = scenario.channel().alpha;
    Ok((0..scenario.num_bs())
        .filter(|&m| m != k)
        .fold(T::zero(), |acc, m| {
            acc + powers[m] * scenario.distance(m, k).powf(-alpha)
        }))
}

/// Linear SINR `h r^{-α} p / (σ² + I)`.
pub fn sinr<T: Real>(h: T, r: T, p: T, interference: T, channel: &ChannelParams<T>) -> Result<T> {
    if !(r > T::zero()) {
        return Err(Error::domain(format!("distance must be > 0, got {r}")));
    }
    if !(p > T::zero()) {
        return Err(Error::domain(format!("power must be > 0, got {p}")));
    }
    if !(h >= T::zero()) {
        return Err(Error::domain(format!(
            "fading sample must be >= 0, got {h}"
        )));
    }
    Ok(h * r.powf(-channel.alpha) * p / (channel.sigma2 + interference))
}

/// Distance at which the SINR equals the threshold for fading sample `h`.
pub fn coverage_radius<T: Real>(
    h: T,
    p: T,
    interference: T,
    channel: &ChannelParams<T>,
) -> Result<T> {
    if !(h > T::zero()) {
        return Err(Error::domain(format!("fading sample must be > 0, got {h}")));
    }
    if !(p > T::zero()) {
        return Err(Error::domain(format!("power must be > 0, got {p}")));
    }
    let ratio = h * p / (channel.threshold * (channel.sigma2 + interference));
    Ok(ratio.powf(channel.alpha.recip()))
}

fn check_radius_args<T: Real>(r: T, p: T) -> Result<()> {
    if !(r >= T::zero()) {
        return Err(Error::domain(format!("radius must be >= 0, got {r}")));
    }
    if !(p > T::zero()) {
        return Err(Error::domain(format!("power must be > 0, got {p}")));
    }
    Ok(())
}

/// `P(r_k < r)` for the random coverage radius.
pub fn radius_cdf<T: Real>(r: T, p: T, interference: T, channel: &ChannelParams<T>) -> Result<T> {
    check_radius_args(r, p)?;
    let x = channel.exponent_rate(p, interference) * r.powf(channel.alpha);
    Ok(-(-x).exp_m1())
}

/// Density of the coverage radius.
pub fn radius_pdf<T: Real>(r: T, p: T, interference: T, channel: &ChannelParams<T>) -> Result<T> {
    check_radius_args(r, p)?;
    let c = channel.exponent_rate(p, interference);
    let alpha = channel.alpha;
    Ok(alpha * c * r.powf(alpha - T::one()) * (-c * r.powf(alpha)).exp())
}

/// `P[SINR > T]` at distance `r`, the complement of [`radius_cdf`].
pub fn coverage_probability<T: Real>(
    r: T,
    p: T,
    interference: T,
    channel: &ChannelParams<T>,
) -> Result<T> {
    Ok(T::one() - radius_cdf(r, p, interference, channel)?)
}
