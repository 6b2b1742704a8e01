//! Required computing resources per base station.
//!
//! The demand of station `k` is the expected user load inside its random
//! coverage disc truncated at `r_max`:
//!
//! ```text
//! f_k = 2 f_ue ρ π (α c) ∫₀^{r_max} r^α exp(−c r^α) dr,   c = μ T (σ² + I_k) / P_k
//! ```
//!
//! Every quantity in this module reduces to that single integral, evaluated
//! by [`kernel_integral`].

use crate::error::{Error, Result};
use crate::netmodel::{interference_at, NetworkScenario, PowerProfile};
use crate::quadrature::{self, Tolerance};
use crate::scalar::Real;

/// `∫₀^{r_upper} r^α exp(−c r^α) dr`.
///
/// For `c > 0` this equals `γ(1 + 1/α, c r_upper^α) / (α c^{1+1/α})`, but it is
/// evaluated by adaptive quadrature. The integrand is negligible once
/// `c r^α` exceeds `2 ln(1/ε)`, so the range is cut there, and the peak at
/// `c r^α = 1` is used as a breakpoint.
pub fn kernel_integral<T: Real>(c: T, alpha: T, r_upper: T) -> Result<T> {
    if !(c.is_finite() && alpha.is_finite() && r_upper.is_finite()) {
        return Err(Error::domain(format!(
            "kernel arguments must be finite (c = {c}, alpha = {alpha}, r = {r_upper})"
        )));
    }
    if c < T::zero() || alpha <= T::zero() || r_upper <= T::zero() {
        return Err(Error::domain(format!(
            "kernel needs c >= 0, alpha > 0, r > 0 (c = {c}, alpha = {alpha}, r = {r_upper})"
        )));
    }
    if c == T::zero() {
        return Ok(r_upper.powf(alpha + T::one()) / (alpha + T::one()));
    }

    let inv_alpha = alpha.recip();
    let radius_at = |x: T| (x / c).powf(inv_alpha);
    let cutoff = T::lit(-2.0) * T::epsilon().ln();
    let upper = r_upper.min(radius_at(cutoff));

    let mut points = vec![T::zero()];
    for x in [T::one(), T::lit(4.0), T::lit(16.0)] {
        let r = radius_at(x);
        if r < upper {
            points.push(r);
        }
    }
    points.push(upper);

    let estimate = quadrature::integrate(
        |r: T| {
            let t = r.powf(alpha);
            t * (-c * t).exp()
        },
        &points,
        Tolerance::default(),
    )?;
    Ok(estimate.value)
}

/// Demand of a station transmitting at `power` under aggregate `interference`.
pub fn demand_with_interference<T: Real>(
    scenario: &NetworkScenario<T>,
    power: T,
    interference: T,
) -> Result<T> {
    if !(power > T::zero() && power.is_finite()) {
        return Err(Error::domain(format!(
            "power must be finite and > 0, got {power}"
        )));
    }
    if !(interference >= T::zero() && interference.is_finite()) {
        return Err(Error::domain(format!(
            "interference must be finite and >= 0, got {interference}"
        )));
    }
    let params = scenario.params();
    let ch = &params.channel;
    let c = ch.exponent_rate(power, interference);
    let scale = T::lit(2.0) * params.f_ue * params.rho * T::PI() * ch.alpha * c;
    Ok(scale * kernel_integral(c, ch.alpha, params.r_max)?)
}

/// Required computing resources `f_k` of station `k` under the full profile.
pub fn required_compute<T: Real>(
    scenario: &NetworkScenario<T>,
    powers: &PowerProfile<T>,
    k: usize,
) -> Result<T> {
    let interference = interference_at(scenario, powers, k)?;
    demand_with_interference(scenario, powers[k], interference)
}

/// Demand station `k` would have at power `p_k` with no interference at all.
pub fn max_compute<T: Real>(scenario: &NetworkScenario<T>, p_k: T) -> Result<T> {
    scenario.check_power(p_k)?;
    demand_with_interference(scenario, p_k, T::zero())
}

/// Change `I_{k,m}` in station `k`'s demand caused by a single interferer
/// at power `p_m` and distance `dist`.
///
/// `I_{m,k}` is the same function with the powers swapped. The value is not
/// clamped: with small noise the truncated demand grows with interference and
/// the result is negative.
pub fn demand_delta<T: Real>(scenario: &NetworkScenario<T>, p_k: T, p_m: T, dist: T) -> Result<T> {
    if !(dist > T::zero()) {
        return Err(Error::domain(format!("distance must be > 0, got {dist}")));
    }
    if !(p_k > T::zero() && p_k.is_finite()) {
        return Err(Error::domain(format!(
            "power must be finite and > 0, got {p_k}"
        )));
    }
    if !(p_m >= T::zero() && p_m.is_finite()) {
        return Err(Error::domain(format!(
            "interferer power must be finite and >= 0, got {p_m}"
        )));
    }
    let params = scenario.params();
    let ch = &params.channel;
    let alpha = ch.alpha;
    let base =
        T::lit(2.0) * params.f_ue * params.rho * T::PI() * alpha * ch.mu * ch.threshold / p_k;

    let quiet = ch.sigma2;
    let noisy = ch.sigma2 + p_m * dist.powf(-alpha);
    let rate = |level: T| ch.mu * ch.threshold * level / p_k;
    let quiet_term = quiet * kernel_integral(rate(quiet), alpha, params.r_max)?;
    let noisy_term = noisy * kernel_integral(rate(noisy), alpha, params.r_max)?;
    Ok(base * (quiet_term - noisy_term))
}

/// Per-station demand and aggregate interference for one power profile.
#[derive(Debug, Clone, PartialEq)]
pub struct DemandProfile<T> {
    pub f_bs: Vec<T>,
    pub interference: Vec<T>,
}

impl<T: Real> DemandProfile<T> {
    pub fn evaluate(scenario: &NetworkScenario<T>, powers: &PowerProfile<T>) -> Result<Self> {
        let k = scenario.num_bs();
        let mut f_bs = Vec::with_capacity(k);
        let mut interference = Vec::with_capacity(k);
        for idx in 0..k {
            let i = interference_at(scenario, powers, idx)?;
            f_bs.push(demand_with_interference(scenario, powers[idx], i)?);
            interference.push(i);
        }
        Ok(Self { f_bs, interference })
    }

    pub fn total(&self) -> T {
        self.f_bs.iter().fold(T::zero(), |acc, &f| acc + f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netmodel::ScenarioParams;

    fn pair_scenario(d: f64) -> NetworkScenario<f64> {
        NetworkScenario::from_positions(vec![[0.0, 0.0], [d, 0.0]], ScenarioParams::default())
            .unwrap()
    }

    #[test]
    fn kernel_plain_power_integral() {
        assert_eq!(kernel_integral(0.0, 2.0, 3.0).unwrap(), 9.0);
    }

    #[test]
    fn kernel_alpha_one_closed_form() {
        let v = kernel_integral(1.0, 1.0, 1.0).unwrap();
        let exact = 1.0 - 2.0 * (-1.0f64).exp();
        assert!((v - exact).abs() < 1e-13, "{v} vs {exact}");
        assert!((v - 0.264_241_12).abs() < 1e-8);
    }

    #[test]
    fn kernel_rejects_bad_input() {
        assert!(kernel_integral(f64::NAN, 2.0, 1.0).is_err());
        assert!(kernel_integral(1.0, f64::INFINITY, 1.0).is_err());
        assert!(kernel_integral(-1.0, 2.0, 1.0).is_err());
        assert!(kernel_integral(1.0, 2.0, 0.0).is_err());
    }

    #[test]
    fn kernel_increasing_in_upper_limit() {
        for c in [1e-12f64, 1e-6, 1e-2, 1.0] {
            let mut prev = 0.0;
            for r in [0.5f64, 1.0, 2.0, 5.0, 10.0, 50.0] {
                let v = kernel_integral(c, 3.0, r).unwrap();
                // past the truncation point the increments are below one ulp
                if c * r.powi(3) < 30.0 {
                    assert!(v > prev, "c={c} r={r}");
                } else {
                    assert!(v >= prev, "c={c} r={r}");
                }
                prev = v;
            }
        }
    }

    #[test]
    fn kernel_continuous_at_zero_rate() {
        let at_zero = kernel_integral(0.0f64, 4.0, 10.0).unwrap();
        let near = kernel_integral(1e-30, 4.0, 10.0).unwrap();
        assert!((near - at_zero).abs() <= 1e-12 * at_zero);
    }

    #[test]
    fn zero_users_means_zero_demand() {
        let sc = pair_scenario(50.0);
        for params in [
            ScenarioParams {
                f_ue: 0.0,
                ..*sc.params()
            },
            ScenarioParams {
                rho: 0.0,
                ..*sc.params()
            },
        ] {
            let sc = sc.with_params(params).unwrap();
            let p = PowerProfile::uniform(&sc, 2.0).unwrap();
            for k in 0..2 {
                assert_eq!(required_compute(&sc, &p, k).unwrap(), 0.0);
            }
            assert_eq!(max_compute(&sc, 2.0).unwrap(), 0.0);
        }
    }

    #[test]
    fn max_compute_equals_required_for_single_station() {
        let sc =
            NetworkScenario::from_positions(vec![[50.0, 50.0]], ScenarioParams::default()).unwrap();
        for p in [1e-6, 0.01, 1.0, 5.0] {
            let profile = PowerProfile::uniform(&sc, p).unwrap();
            assert_eq!(
                required_compute(&sc, &profile, 0).unwrap(),
                max_compute(&sc, p).unwrap()
            );
        }
        assert!(max_compute(&sc, 6.0).is_err());
    }

    #[test]
    fn delta_vanishes_without_interferer() {
        let sc = pair_scenario(50.0);
        assert_eq!(demand_delta(&sc, 2.0, 0.0, 50.0).unwrap(), 0.0);
        let far = demand_delta(&sc, 2.0, 5.0, 1e9).unwrap();
        assert!(far.abs() < 1e-12 * max_compute(&sc, 2.0).unwrap());
        assert!(demand_delta(&sc, 2.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn delta_is_negative_in_low_noise_regime() {
        let sc = pair_scenario(50.0);
        assert!(demand_delta(&sc, 5.0, 5.0, 50.0).unwrap() < 0.0);
    }

    #[test]
    fn demand_profile_matches_pointwise() {
        let sc = NetworkScenario::from_positions(
            vec![[10.0, 10.0], [60.0, 20.0], [30.0, 80.0]],
            ScenarioParams::default(),
        )
        .unwrap();
        let p = PowerProfile::new(vec![0.3, 2.0, 4.0], &sc).unwrap();
        let dp = DemandProfile::evaluate(&sc, &p).unwrap();
        for k in 0..3 {
            assert_eq!(dp.f_bs[k], required_compute(&sc, &p, k).unwrap());
            assert_eq!(dp.interference[k], interference_at(&sc, &p, k).unwrap());
            assert!(dp.f_bs[k] >= 0.0);
        }
        assert_eq!(dp.total(), dp.f_bs.iter().sum::<f64>());
    }

    #[test]
    fn required_compute_ignores_labels_of_other_stations() {
        let params = ScenarioParams::<f64>::default();
        let a =
            NetworkScenario::from_positions(vec![[10.0, 10.0], [60.0, 20.0], [30.0, 80.0]], params)
                .unwrap();
        let b =
            NetworkScenario::from_positions(vec![[10.0, 10.0], [30.0, 80.0], [60.0, 20.0]], params)
                .unwrap();
        let pa = PowerProfile::new(vec![1.0, 2.0, 4.0], &a).unwrap();
        let pb = PowerProfile::new(vec![1.0, 4.0, 2.0], &b).unwrap();
        let fa = required_compute(&a, &pa, 0).unwrap();
        let fb = required_compute(&b, &pb, 0).unwrap();
        assert!((fa - fb).abs() <= 1e-14 * fa);
    }

    #[test]
    fn single_precision_kernel() {
        let v = kernel_integral(2e-15f32, 4.0, 100.0).unwrap();
        let poly = 1e10f32 / 5.0;
        assert!((v / poly - 1.0).abs() < 1e-5);
    }
}
