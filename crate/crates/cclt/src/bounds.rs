//! Closed-form Wasserstein bounds evaluated from residual summaries.

use std::f64::consts::{E, PI};

use nalgebra::Matrix2;
use serde::Serialize;

use crate::core::{BoundReport, Mat2, ResidualSummary, TheoremTag};
use crate::error::{invalid, Error, Result};
use crate::moments::ABS_Z_MEAN;

/// Absolute constants appearing in the bounds.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct SteinConstants {
    /// `4/sqrt(2πe)`.
    pub c2: f64,
    /// `(2 + 8e^{-3/2})/sqrt(2π)`.
    pub c3: f64,
    /// `E|Z| = sqrt(2/π)`.
    pub abs_z_mean: f64,
    /// `(π/8)^{1/4}`.
    pub sqrt_pi_over_8_quarter: f64,
}

impl Default for SteinConstants {
    fn default() -> Self {
        SteinConstants {
            c2: 4.0 / (2.0 * PI * E).sqrt(),
            c3: (2.0 + 8.0 * (-1.5f64).exp()) / (2.0 * PI).sqrt(),
            abs_z_mean: (2.0 / PI).sqrt(),
            sqrt_pi_over_8_quarter: (PI / 8.0).powf(0.25),
        }
    }
}

pub fn stein_constants() -> SteinConstants {
    SteinConstants::default()
}

fn nonneg(name: &str, v: f64) -> Result<()> {
    if v >= 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(invalid(format!("{name} must be finite and non-negative, got {v}")))
    }
}

fn finish(mut r: BoundReport) -> BoundReport {
    r.total = r.terms.iter().map(|t| t.1).sum();
    r
}

/// `E|R1| + sqrt(2/π)E|R2| + E|ΔW|^3/(3λ)`.
pub fn bound_t11(r1_mean: f64, r2_mean: f64, dw3_mean: f64, lambda: f64) -> Result<BoundReport> {
    if !(lambda > 0.0 && lambda < 1.0) {
        return Err(invalid("lambda must lie in (0, 1)"));
    }
    nonneg("E|R1|", r1_mean)?;
    nonneg("E|R2|", r2_mean)?;
    nonneg("E|dW|^3", dw3_mean)?;
    let mut r = BoundReport::new(TheoremTag::T11);
    r.push("R1", r1_mean);
    r.push("R2", ABS_Z_MEAN * r2_mean);
    r.push("dW3", dw3_mean / (3.0 * lambda));
    Ok(finish(r))
}

/// The same bound applied to `(W | Y = k)` with the pair restricted to
/// moves that keep `Y` fixed.
pub fn bound_t11_conditional(s: &ResidualSummary) -> Result<BoundReport> {
    let lambda0 = s
        .lambda0
        .ok_or_else(|| Error::Unsupported(format!("{} has no moves that keep Y fixed", s.model)))?;
    let mut r = bound_t11(s.abs_r1_stay_at_k, s.abs_r2_stay_at_k, s.dw3_stay_at_k, lambda0)?;
    r.caveats.push("conditional on Y = k with the Y-preserving pair".into());
    Ok(r)
}

/// `E|R| + ‖Σ^{-1/2}‖ E‖Γ‖_HS
///  + ‖Σ^{-1/2}‖^{3/2}(π/8)^{1/4} max(E|W|², tr Σ)^{1/4} sqrt(E|Λ^{-1}ΔW||ΔW|³)`.
pub fn bound_t13(
    r_mean: f64,
    gamma_hs: f64,
    op_norm: f64,
    max_moment: f64,
    mixed_moment: f64,
    trace_sigma: f64,
) -> Result<BoundReport> {
    for (n, v) in [
        ("E|R|", r_mean),
        ("E|Gamma|_HS", gamma_hs),
        ("operator norm", op_norm),
        ("E|W|^2", max_moment),
        ("mixed moment", mixed_moment),
        ("tr Sigma", trace_sigma),
    ] {
        nonneg(n, v)?;
    }
    let k = stein_constants().sqrt_pi_over_8_quarter;
    let mut r = BoundReport::new(TheoremTag::T13);
    r.push("R", r_mean);
    r.push("Gamma", op_norm * gamma_hs);
    r.push(
        "dW4",
        op_norm.powf(1.5) * k * max_moment.max(trace_sigma).powf(0.25) * mixed_moment.sqrt(),
    );
    Ok(finish(r))
}

fn check_summary(s: &ResidualSummary) -> Result<()> {
    if !(s.p_k > 0.0) {
        return Err(invalid("p_k must be positive"));
    }
    if !(s.lambda > 0.0) || !(s.psi > 0.0) || !(s.q > 0.0) {
        return Err(invalid("lambda, psi and Q must be positive"));
    }
    Ok(())
}

/// `(2/ψ)(A_k + C/p_k) + sqrt(2/(πψ²))(B_k + D/p_k) + 2E/(3λψp_k)` with
/// `E = E|ΔW|³`. With `averaged` the variant built on `A'_k = E(|R1+ + R1-| | k)`
/// halves every coefficient.
pub fn bound_t21(s: &ResidualSummary, averaged: bool) -> Result<BoundReport> {
    check_summary(s)?;
    let (psi, pk, l) = (s.psi, s.p_k, s.lambda);
    let (a, b, scale) = if averaged {
        (s.abs_r1_sum_at_k, s.abs_r2_sum_at_k, 0.5)
    } else {
        (s.abs_r1_minus_at_k, s.abs_r2_minus_at_k, 1.0)
    };
    let mut r = BoundReport::new(TheoremTag::T21);
    r.push("A_k", scale * 2.0 / psi * a);
    r.push("C_over_p_k", scale * 2.0 / psi * s.c_uncond / pk);
    let cb = scale * (2.0 / (PI * psi * psi)).sqrt();
    r.push("B_k", cb * b);
    r.push("D_over_p_k", cb * s.d_uncond / pk);
    r.push("E", scale * 2.0 * s.e_uncond / (3.0 * l * psi * pk));
    r.caveats.push("E evaluated as E|dW|^3".into());
    if averaged {
        r.caveats.push("averaged variant: A'_k = E(|R1+ + R1-| | Y=k)".into());
    }
    Ok(finish(r))
}

/// Bound for `(W | Y ∈ {k-1, k})`:
/// `2Â_k/(ψ(1+r_k)) + sqrt(2/π)B̂_k/(ψ(1+r_k)) + 2Ê_k/(3λψ)`.
pub fn bound_l22(s: &ResidualSummary) -> Result<BoundReport> {
    check_summary(s)?;
    let (psi, l, rk) = (s.psi, s.lambda, s.r_k);
    let mut r = BoundReport::new(TheoremTag::L22);
    r.push("A_hat_k", 2.0 / (psi * (1.0 + rk)) * s.a_hat());
    r.push("B_hat_k", ABS_Z_MEAN / (psi * (1.0 + rk)) * s.b_hat());
    r.push("E_hat_k", 2.0 / (3.0 * l * psi) * s.e_hat_k);
    Ok(finish(r))
}

/// `(1/ψ)Â_k + sqrt(1/(2πψ²))B̂_k + (1+r_k)(Ĉ_k/2Q + D̂_k/2Q + 2Ê_k/(3λψ))`.
pub fn bound_t23(s: &ResidualSummary) -> Result<BoundReport> {
    check_summary(s)?;
    let (psi, l, rk, q) = (s.psi, s.lambda, s.r_k, s.q);
    let mut r = BoundReport::new(TheoremTag::T23);
    r.push("A_hat_k", s.a_hat() / psi);
    r.push("B_hat_k", (1.0 / (2.0 * PI * psi * psi)).sqrt() * s.b_hat());
    r.push("C_hat_k", (1.0 + rk) / (2.0 * q) * s.c_hat_k);
    r.push("D_hat_k", (1.0 + rk) / (2.0 * q) * s.d_hat_k);
    r.push("E_hat_k", (1.0 + rk) * 2.0 / (3.0 * l * psi) * s.e_hat_k);
    Ok(finish(r))
}

/// Bound on `|E(h(W) - h(Z))(1{Y=k} - 1{Y=k-1})|` over 1-Lipschitz `h`:
/// `(1/Q)E(|ΔW| 1) + (1/Q)E((|W| + sqrt(tr Σ))(|R0+| + |R0-|) 1)`, where
/// `1` is the indicator of `Y ∈ {k-1, k}`.
pub fn bound_l51(s: &ResidualSummary, trace_sigma: f64) -> Result<BoundReport> {
    check_summary(s)?;
    nonneg("tr Sigma", trace_sigma)?;
    let mass = s.p_k + s.p_km1;
    let mut r = BoundReport::new(TheoremTag::L51);
    r.push("dW", mass * s.d_hat_k / s.q);
    r.push("R0", mass * (s.c_w_k + trace_sigma.sqrt() * s.c_r_k) / s.q);
    Ok(finish(r))
}

/// `‖Σ^{-1/2}‖_op = 1/sqrt(smallest eigenvalue)` for symmetric positive
/// definite `Σ`.
pub fn inv_sqrt_op_norm(sigma: &Mat2, dim: usize) -> Result<f64> {
    let min = match dim {
        1 => sigma[0][0],
        2 => {
            if (sigma[0][1] - sigma[1][0]).abs() > 1e-12 * (sigma[0][1].abs() + 1.0) {
                return Err(invalid("Sigma must be symmetric"));
            }
            let m = Matrix2::new(sigma[0][0], sigma[0][1], sigma[1][0], sigma[1][1]);
            m.symmetric_eigen().eigenvalues.min()
        }
        _ => return Err(invalid("dimension must be 1 or 2")),
    };
    if !(min > 1e-10) {
        return Err(Error::NotPositiveDefinite(min));
    }
    Ok(1.0 / min.sqrt())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum T31Variant {
    Fourth,
    Third,
}

/// Multivariate bound. With four moments:
/// `Â/(1+r) + ‖Σ^{-1/2}‖B̂/(2(1+r)) + (1+r)(Ĉ+D̂)/2Q
///  + (1+r)‖Σ^{-1/2}‖^{3/2} sqrt(c3 Ê F̂)`;
/// with three, the last term is `c2(1+r)‖Σ^{-1/2}‖² Ê' F̂'` and
/// `F̂' = 1 + |log(c2‖Σ^{-1/2}‖² Ê'/F̂)|`.
///
/// In one dimension `Â` and `B̂` are divided by `ψ` so that they are the
/// `|Ψ^{-1}R|` forms.
pub fn bound_t31(s: &ResidualSummary, sigma: &Mat2, variant: T31Variant) -> Result<BoundReport> {
    check_summary(s)?;
    let dim = s.dim.max(1);
    let op = inv_sqrt_op_norm(sigma, dim)?;
    let trace = (0..dim).map(|i| sigma[i][i]).sum::<f64>();
    let rk = s.r_k;
    let (a_hat, b_hat) = if dim == 1 {
        (s.a_hat() / s.psi, s.b_hat() / s.psi)
    } else {
        (s.a_hat(), s.b_hat())
    };
    // F̂ is rebuilt from tr Σ rather than taken from the summary, which
    // assumes Σ = I.
    let f_hat = (trace + s.w2_mean).sqrt();
    let c = stein_constants();
    let tag = match variant {
        T31Variant::Fourth => TheoremTag::T31Fourth,
        T31Variant::Third => TheoremTag::T31Third,
    };
    let mut r = BoundReport::new(tag);
    r.push("A_hat_k", a_hat / (1.0 + rk));
    r.push("B_hat_k", op * b_hat / (2.0 * (1.0 + rk)));
    let c_hat = s.c_w_k + trace.sqrt() * s.c_r_k;
    r.push("C_hat_k", (1.0 + rk) / (2.0 * s.q) * c_hat);
    r.push("D_hat_k", (1.0 + rk) / (2.0 * s.q) * s.d_hat_k);
    match variant {
        T31Variant::Fourth => {
            r.push("E_hat_k", (1.0 + rk) * op.powf(1.5) * (c.c3 * s.e_psi_k * f_hat).sqrt());
        }
        T31Variant::Third => {
            let e = s.e_prime_k;
            let f_prime = if e > 0.0 {
                1.0 + (c.c2 * op * op * e / f_hat).ln().abs()
            } else {
                1.0
            };
            r.push("E_prime_k", c.c2 * (1.0 + rk) * op * op * e * f_prime);
        }
    }
    Ok(finish(r))
}

/// Inputs of the local limit bound for `Y` under its own pair.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct LltInputs {
    pub sigma: f64,
    /// `E R1²` with `E(ΔY | Y) = -λ(Y + R1)`.
    pub r1_second_moment: f64,
    /// `R2 = |P(ΔY = 1 | Y) - P(ΔY = 1)|/λ`; `E R2`, `E R2|Y|`,
    /// `sup_k E(R2 1{Y = k})`.
    pub r2_mean: f64,
    pub r2_abs_y_mean: f64,
    pub r2_indicator_sup: f64,
    pub sup_pmf: f64,
}

impl LltInputs {
    /// Exact inputs for `Y = Bin(n, p) - np` under single-coordinate
    /// resampling: `λ = 1/n`, `R1 = 0`, `R2 = p|Y|`.
    pub fn binomial(n: usize, p: f64) -> Self {
        let law = crate::core::CountLaw::binomial(n, p);
        let mut r2 = 0.0;
        let mut r2y = 0.0;
        let mut sup_ind: f64 = 0.0;
        for (c, &pr) in law.pmf.iter().enumerate() {
            let y = law.y_of(c);
            let v = p * y.abs();
            r2 += pr * v;
            r2y += pr * v * y.abs();
            sup_ind = sup_ind.max(pr * v);
        }
        LltInputs {
            sigma: law.variance().sqrt(),
            r1_second_moment: 0.0,
            r2_mean: r2,
            r2_abs_y_mean: r2y,
            r2_indicator_sup: sup_ind,
            sup_pmf: law.pmf.iter().cloned().fold(0.0, f64::max),
        }
    }
}

/// `C/σ + (sqrt(E R1²)/σ)(2 + 1/sqrt(2e) + σ sup P(Y=k)) + E R2/(σ² sqrt(2e))
///  + E(R2|Y|)/σ³ + (2 + sup E(R2 1{Y=k}))/σ`.
pub fn bound_t16_llt(inputs: &LltInputs, universal_c: f64) -> Result<BoundReport> {
    let s = inputs.sigma;
    if !(s > 0.0) {
        return Err(invalid("sigma must be positive"));
    }
    nonneg("E R1^2", inputs.r1_second_moment)?;
    nonneg("E R2", inputs.r2_mean)?;
    nonneg("E R2|Y|", inputs.r2_abs_y_mean)?;
    nonneg("sup E R2 1{Y=k}", inputs.r2_indicator_sup)?;
    nonneg("C", universal_c)?;
    let root_2e = (2.0 * E).sqrt();
    let mut r = BoundReport::new(TheoremTag::T16);
    r.push("C_over_sigma", universal_c / s);
    r.push(
        "R1",
        inputs.r1_second_moment.sqrt() / s * (2.0 + 1.0 / root_2e + s * inputs.sup_pmf),
    );
    r.push("R2", inputs.r2_mean / (s * s * root_2e));
    r.push("R2_abs_Y", inputs.r2_abs_y_mean / (s * s * s));
    r.push("R2_indicator", (2.0 + inputs.r2_indicator_sup) / s);
    r.caveats
        .push(format!("universal constant C = {universal_c} is user supplied"));
    Ok(finish(r))
}

/// `max{ε_Y, k/σ_Y²}/(1 - ε_Y)`, the envelope for `|1 - p_{k-1}/p_k|` with
/// implied constant one.
pub fn llt_ratio_bound(eps_y: f64, k: i64, sigma_y: f64) -> Result<f64> {
    if !(eps_y < 1.0) || eps_y < 0.0 {
        return Err(invalid("eps_Y must lie in [0, 1)"));
    }
    if !(sigma_y > 0.0) {
        return Err(invalid("sigma_Y must be positive"));
    }
    Ok(eps_y.max(k.unsigned_abs() as f64 / (sigma_y * sigma_y)) / (1.0 - eps_y))
}

/// The same envelope with `|k|` floored at one lattice step, so that the
/// `1/σ_Y²` scale of the ratio at `k = 0` is kept.
pub fn llt_ratio_envelope(eps_y: f64, k: i64, sigma_y: f64) -> Result<f64> {
    llt_ratio_bound(eps_y, k.abs().max(1), sigma_y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::core::diag2;
    use proptest::prelude::*;

    fn summary() -> ResidualSummary {
        ResidualSummary {
            dim: 1,
            p_k: 0.1,
            p_km1: 0.09,
            r_k: 0.9,
            lambda: 0.01,
            q: 0.25,
            psi: 2.0,
            abs_r1_minus_at_k: 0.05,
            abs_r1_plus_at_km1: 0.04,
            abs_r2_minus_at_k: 0.03,
            abs_r2_plus_at_km1: 0.02,
            abs_r1_sum_at_k: 0.06,
            abs_r2_sum_at_k: 0.05,
            c_w_k: 0.01,
            c_r_k: 0.008,
            c_hat_k: 0.01 + ABS_Z_MEAN * 0.008,
            d_hat_k: 0.1,
            e_hat_k: 1e-4,
            e_psi_k: 5e-3,
            e_prime_k: 4e-2,
            w2_mean: 1.1,
            c_uncond: 0.001,
            d_uncond: 0.001,
            e_uncond: 1e-4,
            ..Default::default()
        }
    }

    #[test]
    fn constants() {
        let c = stein_constants();
        assert!(c.c2 > 0.9678 && c.c2 < 0.9680 && c.c2 < 1.0);
        assert!(c.c3 > 1.5099 && c.c3 < 1.5101 && c.c3 < 2.0);
        assert_eq!(format!("{:.12}", c.c2), "0.967882898077");
        assert_eq!(format!("{:.12}", c.c3), "1.510013000130");
        assert_eq!(format!("{:.12}", c.sqrt_pi_over_8_quarter), "0.791616743543");
    }

    #[test]
    fn t11_arithmetic() {
        assert_eq!(bound_t11(0.0, 0.0, 0.0, 0.1).unwrap().total, 0.0);
        let r = bound_t11(0.1, 0.1, 0.001, 0.01).unwrap();
        assert!((r.total - 0.213_121_8).abs() < 1e-6);
        assert!(bound_t11(0.1, 0.1, 0.1, 0.0).is_err());
    }

    #[test]
    fn t21_double_entry() {
        let s = summary();
        let r = bound_t21(&s, false).unwrap();
        let expect = 1.0 * (0.05 + 0.001 / 0.1)
            + (1.0 / (2.0 * PI)).sqrt() * (0.03 + 0.001 / 0.1)
            + 2.0 / (3.0 * 0.01 * 2.0 * 0.1) * 1e-4;
        assert!((r.total - expect).abs() < 1e-14);
    }

    #[test]
    fn l22_shrinks_with_ratio() {
        let mut s = summary();
        let mut last = f64::INFINITY;
        for rk in [1.0, 10.0, 100.0] {
            s.r_k = rk;
            s.abs_r1_plus_at_km1 = 0.0;
            s.abs_r2_plus_at_km1 = 0.0;
            let r = bound_l22(&s).unwrap();
            let ab = r.term("A_hat_k").unwrap() + r.term("B_hat_k").unwrap();
            assert!(ab < last);
            last = ab;
        }
    }

    #[test]
    fn t23_is_halved_sum_plus_cubic_slack() {
        let s = summary();
        let t23 = bound_t23(&s).unwrap();
        let l22 = bound_l22(&s).unwrap();
        let l51 = bound_l51(&s, 1.0).unwrap();
        let mass = s.p_k + s.p_km1;
        // Dividing the summed inequalities by 2p_k leaves the third-moment
        // term at (1+r)Ê/(3λψ); the stated coefficient is twice that.
        let halved = (mass * l22.total + l51.total) / (2.0 * s.p_k);
        let slack = (1.0 + s.r_k) * s.e_hat_k / (3.0 * s.lambda * s.psi);
        // Ĉ uses E|Z| in one dimension, sqrt(tr Σ) = 1 in the comparison.
        let c_gap = (1.0 + s.r_k) / (2.0 * s.q) * (ABS_Z_MEAN - 1.0) * s.c_r_k;
        assert!((t23.total - (halved + slack + c_gap)).abs() < 1e-12);
        assert!((t23.term("C_hat_k").unwrap() - (1.0 + s.r_k) / (2.0 * s.q) * s.c_hat_k).abs() < 1e-15);
    }

    #[test]
    fn t31_norms() {
        assert!((inv_sqrt_op_norm(&diag2(4.0, 1.0), 2).unwrap() - 1.0).abs() < 1e-12);
        assert!(inv_sqrt_op_norm(&[[1.0, 1.0], [1.0, 1.0]], 2).is_err());
        let mut s = ResidualSummary {
            dim: 2,
            p_k: 0.1,
            p_km1: 0.1,
            r_k: 1.0,
            lambda: 0.01,
            q: 0.25,
            psi: 1.0,
            ..Default::default()
        };
        s.w2_mean = 0.0;
        for v in [T31Variant::Fourth, T31Variant::Third] {
            assert_eq!(bound_t31(&s, &diag2(1.0, 1.0), v).unwrap().total, 0.0);
        }
    }

    #[test]
    fn llt_examples() {
        let r = bound_t16_llt(
            &LltInputs {
                sigma: 10.0,
                r1_second_moment: 0.0,
                r2_mean: 0.0,
                r2_abs_y_mean: 0.0,
                r2_indicator_sup: 0.0,
                sup_pmf: 0.04,
            },
            1.0,
        )
        .unwrap();
        assert!((r.total - 0.3).abs() < 1e-15);
        assert!((llt_ratio_bound(0.01, 0, 5.0).unwrap() - 0.01 / 0.99).abs() < 1e-15);
        assert_eq!(llt_ratio_bound(0.0, 0, 5.0).unwrap(), 0.0);
        assert!(llt_ratio_bound(1.0, 0, 5.0).is_err());
    }

    fn bump(s: &ResidualSummary, field: usize, d: f64) -> ResidualSummary {
        let mut t = s.clone();
        let slot = match field {
            0 => &mut t.abs_r1_minus_at_k,
            1 => &mut t.abs_r1_plus_at_km1,
            2 => &mut t.abs_r2_minus_at_k,
            3 => &mut t.abs_r2_plus_at_km1,
            4 => &mut t.c_hat_k,
            5 => &mut t.d_hat_k,
            6 => &mut t.e_hat_k,
            7 => &mut t.c_uncond,
            8 => &mut t.d_uncond,
            9 => &mut t.e_uncond,
            10 => &mut t.abs_r1_sum_at_k,
            11 => &mut t.abs_r2_sum_at_k,
            12 => &mut t.e_psi_k,
            13 => &mut t.c_w_k,
            _ => &mut t.c_r_k,
        };
        *slot += d;
        t
    }

    proptest! {
        #[test]
        fn totals_are_monotone(field in 0usize..15, d in 0.0f64..1.0) {
            let s = summary();
            let t = bump(&s, field, d);
            let id = diag2(1.0, 1.0);
            let pairs = [
                (bound_t21(&s, false).unwrap().total, bound_t21(&t, false).unwrap().total),
                (bound_t21(&s, true).unwrap().total, bound_t21(&t, true).unwrap().total),
                (bound_l22(&s).unwrap().total, bound_l22(&t).unwrap().total),
                (bound_t23(&s).unwrap().total, bound_t23(&t).unwrap().total),
                (bound_l51(&s, 1.0).unwrap().total, bound_l51(&t, 1.0).unwrap().total),
                (
                    bound_t31(&s, &id, T31Variant::Fourth).unwrap().total,
                    bound_t31(&t, &id, T31Variant::Fourth).unwrap().total,
                ),
            ];
            for (a, b) in pairs {
                prop_assert!(b >= a - 1e-15);
                prop_assert!(a >= 0.0);
            }
        }

        #[test]
        fn t11_t13_monotone(x in proptest::array::uniform4(0.0f64..1.0), d in 0.0f64..1.0, i in 0usize..4) {
            let mut y = x;
            y[i] += d;
            let a = bound_t11(x[0], x[1], x[2], 0.5).unwrap().total;
            let b = bound_t11(y[0], y[1], y[2], 0.5).unwrap().total;
            prop_assert!(b >= a);
            let a = bound_t13(x[0], x[1], 1.0, x[2], x[3], 2.0).unwrap().total;
            let b = bound_t13(y[0], y[1], 1.0, y[2], y[3], 2.0).unwrap().total;
            prop_assert!(b >= a);
        }
    }
}
