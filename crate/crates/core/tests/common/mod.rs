//! Reference implementations that share no code with the crate under test.
#![allow(dead_code, clippy::excessive_precision, clippy::too_many_arguments)]

use std::f64::consts::PI;

use mec_alloc::ScenarioParams;

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// ln Γ(x) for x > 0.5.
pub fn ln_gamma(x: f64) -> f64 {
    assert!(x > 0.5);
    let x = x - 1.0;
    let mut a = LANCZOS[0];
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    let t = x + LANCZOS_G + 0.5;
    0.5 * (2.0 * PI).ln() + (x + 0.5) * t.ln() - t + a.ln()
}

/// Lower incomplete gamma γ(a, x): power series below `a + 1`, Lentz
/// continued fraction for the upper function above.
pub fn lower_gamma(a: f64, x: f64) -> f64 {
    assert!(a > 0.0 && x >= 0.0);
    if x == 0.0 {
        return 0.0;
    }
    let log_prefactor = a * x.ln() - x;
    if x < a + 1.0 {
        let mut ap = a;
        let mut term = 1.0 / a;
        let mut sum = term;
        for _ in 0..10_000 {
            ap += 1.0;
            term *= x / ap;
            sum += term;
            if term.abs() < sum.abs() * 1e-17 {
                break;
            }
        }
        sum * log_prefactor.exp()
    } else {
        let tiny = 1e-300;
        let mut b = x + 1.0 - a;
        let mut c = 1.0 / tiny;
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 1..10_000 {
            let an = -(i as f64) * (i as f64 - a);
            b += 2.0;
            d = an * d + b;
            if d.abs() < tiny {
                d = tiny;
            }
            c = b + an / c;
            if c.abs() < tiny {
                c = tiny;
            }
            d = 1.0 / d;
            let del = d * c;
            h *= del;
            if (del - 1.0).abs() < 1e-16 {
                break;
            }
        }
        ln_gamma(a).exp() - (log_prefactor.exp() * h)
    }
}

/// `∫₀^R r^α exp(−c r^α) dr` in closed form.
pub fn kernel_closed_form(c: f64, alpha: f64, r: f64) -> f64 {
    if c == 0.0 {
        return r.powf(alpha + 1.0) / (alpha + 1.0);
    }
    let a = 1.0 + 1.0 / alpha;
    lower_gamma(a, c * r.powf(alpha)) / (alpha * c.powf(a))
}

/// Adaptive Simpson with Richardson correction.
pub fn simpson<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64, tol: f64) -> f64 {
    fn recurse<F: Fn(f64) -> f64>(
        f: &F,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let diff = left + right - whole;
        if depth == 0 || diff.abs() <= 15.0 * tol {
            return left + right + diff / 15.0;
        }
        recurse(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
            + recurse(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
    }
    let (fa, fb, fm) = (f(lo), f(hi), f(0.5 * (lo + hi)));
    let whole = (hi - lo) / 6.0 * (fa + 4.0 * fm + fb);
    recurse(f, lo, hi, fa, fm, fb, whole, tol, 50)
}

/// Best LP objective `(1/K) Σ min(s_k/f_k, 1)` over vertices of
/// `{0 ≤ s ≤ f, Σ s ≤ S}`: every coordinate at a bound except at most one.
pub fn lp_vertex_optimum(f: &[f64], capacity: f64) -> f64 {
    let k = f.len();
    assert!(k <= 16);
    let objective = |s: &[f64]| {
        f.iter()
            .zip(s)
            .map(|(&f, &s)| if f > 0.0 { (s / f).min(1.0) } else { 1.0 })
            .sum::<f64>()
            / k as f64
    };
    let mut best = f64::NEG_INFINITY;
    for mask in 0u32..(1 << k) {
        let full: Vec<f64> = (0..k)
            .map(|i| if mask & (1 << i) != 0 { f[i] } else { 0.0 })
            .collect();
        let used: f64 = full.iter().sum();
        if used <= capacity * (1.0 + 1e-12) {
            best = best.max(objective(&full));
        }
        // one coordinate takes whatever budget is left
        for free in 0..k {
            let mut s = full.clone();
            s[free] = 0.0;
            let rest = capacity - s.iter().sum::<f64>();
            if rest >= 0.0 && rest <= f[free] {
                s[free] = rest;
                best = best.max(objective(&s));
            }
        }
    }
    best
}

/// Demand of one station from the closed-form kernel.
pub fn demand_reference(params: &ScenarioParams, power: f64, interference: f64) -> f64 {
    let ch = &params.channel;
    let c = ch.mu * ch.threshold * (ch.sigma2 + interference) / power;
    2.0 * params.f_ue
        * params.rho
        * PI
        * ch.alpha
        * c
        * kernel_closed_form(c, ch.alpha, params.r_max)
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}
