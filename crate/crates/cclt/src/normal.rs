//! Standard normal distribution functions.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

/// `1 / sqrt(2π)`.
pub const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

pub fn pdf(x: f64) -> f64 {
    INV_SQRT_2PI * (-0.5 * x * x).exp()
}

/// `Φ(x)`, computed from `erfc` so both tails keep full relative precision.
pub fn cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x * FRAC_1_SQRT_2)
}

/// `1 - Φ(x)`.
pub fn sf(x: f64) -> f64 {
    0.5 * libm::erfc(x * FRAC_1_SQRT_2)
}

/// Density of `N(0, s2)`.
pub fn density(x: f64, s2: f64) -> f64 {
    (-0.5 * x * x / s2).exp() / (2.0 * PI * s2).sqrt()
}

/// `Φ^{-1}(u)`: rational starting point refined by Halley steps on `cdf`.
pub fn quantile(u: f64) -> f64 {
    if u <= 0.0 {
        return f64::NEG_INFINITY;
    }
    if u >= 1.0 {
        return f64::INFINITY;
    }
    let mut x = acklam(u);
    for _ in 0..3 {
        let e = if x < 0.0 { cdf(x) - u } else { (1.0 - u) - sf(x) };
        let d = pdf(x);
        if d == 0.0 {
            break;
        }
        let t = e / d;
        x -= t / (1.0 + 0.5 * x * t);
    }
    x
}

fn acklam(u: f64) -> f64 {
    const A: [f64; 6] = [
        -3.969683028665376e1,
        2.209460984245205e2,
        -2.759285104469687e2,
        1.383_577_518_672_69e2,
        -3.066479806614716e1,
        2.506628277459239,
    ];
    const B: [f64; 5] = [
        -5.447609879822406e1,
        1.615858368580409e2,
        -1.556989798598866e2,
        6.680131188771972e1,
        -1.328068155288572e1,
    ];
    const C: [f64; 6] = [
        -7.784894002430293e-3,
        -3.223964580411365e-1,
        -2.400758277161838,
        -2.549732539343734,
        4.374664141464968,
        2.938163982698783,
    ];
    const D: [f64; 4] = [
        7.784695709041462e-3,
        3.224671290700398e-1,
        2.445134137142996,
        3.754408661907416,
    ];
    let lo = 0.02425;
    if u < lo {
        let q = (-2.0 * u.ln()).sqrt();
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else if u > 1.0 - lo {
        -acklam(1.0 - u)
    } else {
        let q = u - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    }
}

/// `∫_{-∞}^{x} Φ(t) dt = xΦ(x) + φ(x)`.
pub fn cdf_integral(x: f64) -> f64 {
    x * cdf(x) + pdf(x)
}

/// `∫_{x}^{∞} (1 - Φ(t)) dt = φ(x) - x(1 - Φ(x))`.
pub fn sf_integral(x: f64) -> f64 {
    pdf(x) - x * sf(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quantile_inverts_cdf() {
        for &u in &[1e-12, 1e-6, 0.01, 0.3, 0.5, 0.77, 0.999, 1.0 - 1e-9] {
            let x = quantile(u);
            let back = if x < 0.0 { cdf(x) } else { 1.0 - sf(x) };
            assert!((back - u).abs() <= 1e-15_f64.max(u * 1e-13), "u = {u}");
        }
    }

    #[test]
    fn tail_integrals_at_zero() {
        assert!((cdf_integral(0.0) - INV_SQRT_2PI).abs() < 1e-16);
        assert!((sf_integral(0.0) - INV_SQRT_2PI).abs() < 1e-16);
    }
}
