//! Reference formulas written independently of the library, used as oracles.
#![allow(dead_code)]

use std::f64::consts::PI;

/// Density of the distance between two uniform points in a disk of radius `r`.
pub fn disk_pdf(x: f64, r: f64) -> f64 {
    if !(0.0..=2.0 * r).contains(&x) {
        return 0.0;
    }
    let h = x / (2.0 * r);
    2.0 * x / (r * r) * (2.0 / PI * h.acos() - x / (PI * r) * (1.0 - h * h).max(0.0).sqrt())
}

/// Closed-form CDF of the same distance (disk line picking).
pub fn disk_cdf(x: f64, r: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 2.0 * r {
        return 1.0;
    }
    let s = x / r;
    let root = (1.0 - s * s / 4.0).max(0.0).sqrt();
    1.0 + 2.0 / PI * (s * s - 1.0) * (s / 2.0).acos() - s / PI * (1.0 + s * s / 2.0) * root
}

/// Squared-distance density as printed for `beta = 2`.
pub fn squared_distance_pdf(z: f64, r: f64) -> f64 {
    if !(0.0..=4.0 * r * r).contains(&z) {
        return 0.0;
    }
    let s = z.sqrt();
    (2.0 * (s / (2.0 * r)).acos() - s / r * (1.0 - z / (4.0 * r * r)).max(0.0).sqrt())
        / (PI * r * r)
}

/// Composite Simpson rule with `n` (even) panels.
pub fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
    let n = n + n % 2;
    let h = (b - a) / n as f64;
    let mut acc = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(a + h * i as f64);
    }
    acc * h / 3.0
}

/// Simpson after `x = a + (b - a) sin^2(theta)`, which smooths square-root
/// behaviour at either end of `[a, b]`.
pub fn simpson_sin2<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
    let len = b - a;
    simpson(
        |th: f64| {
            let (s, c) = th.sin_cos();
            f(a + len * s * s) * 2.0 * len * s * c
        },
        0.0,
        PI / 2.0,
        n,
    )
}

/// Free-diffusion received-signal density by direct substitution.
pub fn free_pdf(y: f64, m: f64, d: f64, t: f64, r: f64) -> f64 {
    let peak = m / (4.0 * PI * d * t);
    if !(y > 0.0 && y <= peak) {
        return 0.0;
    }
    let z = -4.0 * d * t * (y / peak).ln();
    4.0 * d * t * squared_distance_pdf(z.max(0.0), r) / y
}

/// `P(Y <= y)` for free diffusion: the receiver is at least `x(y)` away.
pub fn free_cdf(y: f64, m: f64, d: f64, t: f64, r: f64) -> f64 {
    let peak = m / (4.0 * PI * d * t);
    if y <= 0.0 {
        return 0.0;
    }
    if y >= peak {
        return 1.0;
    }
    let x = (-4.0 * d * t * (y / peak).ln()).sqrt();
    1.0 - disk_cdf(x, r)
}

/// `P(Y <= y)` for free diffusion given `ln y`.
pub fn free_cdf_log(s: f64, m: f64, d: f64, t: f64, r: f64) -> f64 {
    let ln_peak = m.ln() - (4.0 * PI * d * t).ln();
    if s >= ln_peak {
        return 1.0;
    }
    let x = (4.0 * d * t * (ln_peak - s)).sqrt();
    1.0 - disk_cdf(x, r)
}

/// `P(Y <= y)` for drift: `|X - vt| >= u(y)`.
pub fn drift_cdf_log(s: f64, m: f64, d: f64, t: f64, v: f64, r: f64) -> f64 {
    let ln_peak = m.ln() - 0.5 * (4.0 * PI * d * t).ln();
    if s >= ln_peak {
        return 1.0;
    }
    let u = (4.0 * d * t * (ln_peak - s)).sqrt();
    let vt = v * t;
    1.0 - disk_cdf(vt + u, r) + disk_cdf(vt - u, r)
}

/// Kolmogorov-type distance between sorted samples and a CDF, two-sided.
pub fn ks_two_sided<F: Fn(f64) -> f64>(sorted: &[f64], cdf: F) -> f64 {
    let n = sorted.len() as f64;
    sorted
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            let f = cdf(v);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}

pub fn rel_err(got: f64, want: f64) -> f64 {
    (got - want).abs() / want.abs()
}
