//! Domain types shared by every model and every bound.
//!
//! Vectors are stored in fixed `[f64; 2]` slots; a model of dimension one
//! only uses the first slot and keeps the second at zero.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

pub const MAX_DIM: usize = 2;
pub type Vec2 = [f64; MAX_DIM];
pub type Mat2 = [[f64; MAX_DIM]; MAX_DIM];

/// Tolerance for lattice membership of an observed `Y`.
pub const LATTICE_TOL: f64 = 1e-9;

pub const ZERO2: Vec2 = [0.0; 2];
pub const ZERO22: Mat2 = [[0.0; 2]; 2];

pub fn diag2(a: f64, b: f64) -> Mat2 {
    [[a, 0.0], [0.0, b]]
}

pub fn mat_vec(m: &Mat2, v: &Vec2, dim: usize) -> Vec2 {
    let mut out = ZERO2;
    for i in 0..dim {
        for j in 0..dim {
            out[i] += m[i][j] * v[j];
        }
    }
    out
}

pub fn mat_mul(a: &Mat2, b: &Mat2, dim: usize) -> Mat2 {
    let mut out = ZERO22;
    for i in 0..dim {
        for j in 0..dim {
            for k in 0..dim {
                out[i][j] += a[i][k] * b[k][j];
            }
        }
    }
    out
}

pub fn mat_add(a: &Mat2, b: &Mat2, s: f64) -> Mat2 {
    let mut out = *a;
    for i in 0..MAX_DIM {
        for j in 0..MAX_DIM {
            out[i][j] += s * b[i][j];
        }
    }
    out
}

pub fn mat_scale(a: &Mat2, s: f64) -> Mat2 {
    mat_add(&ZERO22, a, s)
}

pub fn det(m: &Mat2, dim: usize) -> f64 {
    match dim {
        1 => m[0][0],
        _ => m[0][0] * m[1][1] - m[0][1] * m[1][0],
    }
}

pub fn inverse(m: &Mat2, dim: usize) -> Option<Mat2> {
    let d = det(m, dim);
    if d.abs() < 1e-300 || !d.is_finite() {
        return None;
    }
    Some(match dim {
        1 => [[1.0 / d, 0.0], [0.0, 0.0]],
        _ => [
            [m[1][1] / d, -m[0][1] / d],
            [-m[1][0] / d, m[0][0] / d],
        ],
    })
}

pub fn norm(v: &Vec2, dim: usize) -> f64 {
    v[..dim].iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Hilbert-Schmidt (Frobenius) norm.
pub fn hs_norm(m: &Mat2, dim: usize) -> f64 {
    let mut s = 0.0;
    for row in m.iter().take(dim) {
        for x in row.iter().take(dim) {
            s += x * x;
        }
    }
    s.sqrt()
}

/// Lattice `zeta + Z` with span one.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LatticeSpec {
    pub zeta: f64,
}

impl LatticeSpec {
    /// The lattice of `c - mean` for integer `c`.
    pub fn for_mean(mean: f64) -> Self {
        let mut zeta = (-mean).rem_euclid(1.0);
        if !(1e-12..=1.0 - 1e-12).contains(&zeta) {
            zeta = 0.0;
        }
        LatticeSpec { zeta }
    }

    pub fn contains(&self, y: f64) -> bool {
        let r = (y - self.zeta).rem_euclid(1.0);
        r < LATTICE_TOL || 1.0 - r < LATTICE_TOL
    }
}

/// Law of an integer count `c`; the conditioning statistic is `Y = c - mean`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CountLaw {
    pub mean: f64,
    pub pmf: Vec<f64>,
}

impl CountLaw {
    pub fn binomial(n: usize, p: f64) -> Self {
        let q = 1.0 - p;
        let mut w = vec![0.0; n + 1];
        let mode = (((n + 1) as f64) * p).floor().min(n as f64) as usize;
        w[mode] = 1.0;
        for k in mode..n {
            w[k + 1] = w[k] * ((n - k) as f64 / (k + 1) as f64) * (p / q);
        }
        for k in (1..=mode).rev() {
            w[k - 1] = w[k] * (k as f64 / (n - k + 1) as f64) * (q / p);
        }
        let total = crate::stats::neumaier_sum(w.iter().copied());
        for x in &mut w {
            *x /= total;
        }
        CountLaw {
            mean: n as f64 * p,
            pmf: w,
        }
    }

    /// Law of the sum of two independent counts.
    pub fn convolve(&self, other: &CountLaw) -> Self {
        let mut pmf = vec![0.0; self.pmf.len() + other.pmf.len() - 1];
        for (i, a) in self.pmf.iter().enumerate() {
            for (j, b) in other.pmf.iter().enumerate() {
                pmf[i + j] += a * b;
            }
        }
        CountLaw {
            mean: self.mean + other.mean,
            pmf,
        }
    }

    pub fn lattice(&self) -> LatticeSpec {
        LatticeSpec::for_mean(self.mean)
    }

    /// Count at lattice offset zero: the smallest count with `Y >= 0`.
    pub fn base_count(&self) -> i64 {
        (self.mean - 1e-9).ceil() as i64
    }

    /// Count sitting at the integer lattice offset `k`, if in range.
    pub fn count_for(&self, k: i64) -> Option<usize> {
        let c = self.base_count() + k;
        (c >= 0 && (c as usize) < self.pmf.len()).then_some(c as usize)
    }

    pub fn y_of(&self, count: usize) -> f64 {
        count as f64 - self.mean
    }

    pub fn prob(&self, count: usize) -> f64 {
        self.pmf.get(count).copied().unwrap_or(0.0)
    }

    /// `E Y^r`.
    pub fn moment(&self, r: i32) -> f64 {
        crate::stats::neumaier_sum(
            self.pmf
                .iter()
                .enumerate()
                .map(|(c, p)| p * self.y_of(c).powi(r)),
        )
    }

    pub fn variance(&self) -> f64 {
        self.moment(2)
    }

    /// `r_k = P(Y = k-1) / P(Y = k)`.
    pub fn ratio(&self, k: i64) -> Option<f64> {
        let c = self.count_for(k)?;
        if c == 0 || self.pmf[c] == 0.0 {
            return None;
        }
        Some(self.pmf[c - 1] / self.pmf[c])
    }
}

/// Constants of the exchangeable pair, with drift constants in the units of
/// the normalised statistic `W`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PairConstants {
    pub lambda: f64,
    pub q: f64,
    pub sigma_y2: f64,
    pub psi: Mat2,
    pub psi_plus: Mat2,
    pub psi_minus: Mat2,
    pub a_plus: f64,
    pub a_minus: f64,
    pub b_plus: Vec2,
    pub b_minus: Vec2,
}

impl PairConstants {
    /// Scalar drift `M1± = -λ(a± ψ W + b± Y + R1±)`.
    pub fn scalar(lambda: f64, sigma_y2: f64, psi: f64, a_plus: f64, b_plus: f64) -> Self {
        let a_minus = 1.0 - a_plus;
        PairConstants {
            lambda,
            q: lambda * sigma_y2,
            sigma_y2,
            psi: diag2(psi, 0.0),
            psi_plus: diag2(a_plus * psi, 0.0),
            psi_minus: diag2(a_minus * psi, 0.0),
            a_plus,
            a_minus,
            b_plus: [b_plus, 0.0],
            b_minus: [-b_plus, 0.0],
        }
    }

    pub fn psi_scalar(&self) -> f64 {
        self.psi[0][0]
    }

    pub fn validate(&self, dim: usize) -> Result<()> {
        if !(self.lambda > 0.0 && self.lambda < 1.0) {
            return Err(invalid(format!("lambda = {} not in (0,1)", self.lambda)));
        }
        if (self.q - self.lambda * self.sigma_y2).abs() > 1e-12 * self.q.abs().max(1.0) {
            return Err(invalid("Q differs from lambda * sigma_Y^2"));
        }
        if (self.a_plus + self.a_minus - 1.0).abs() > 1e-12 {
            return Err(invalid("a+ + a- != 1"));
        }
        for i in 0..dim {
            if (self.b_plus[i] + self.b_minus[i]).abs() > 1e-12 {
                return Err(invalid("b+ + b- != 0"));
            }
            for j in 0..dim {
                let s = self.psi_plus[i][j] + self.psi_minus[i][j];
                if (s - self.psi[i][j]).abs() > 1e-12 {
                    return Err(invalid("Psi+ + Psi- != Psi"));
                }
            }
        }
        if inverse(&self.psi, dim).is_none() {
            return Err(invalid("Psi is singular"));
        }
        Ok(())
    }

    /// `α = (a+ - a-) / 2Q`.
    pub fn alpha(&self) -> f64 {
        (self.a_plus - self.a_minus) / (2.0 * self.q)
    }

    /// `θ = b+ / Q`.
    pub fn theta(&self) -> Vec2 {
        [self.b_plus[0] / self.q, self.b_plus[1] / self.q]
    }

    /// `A = (Ψ+ - Ψ-) / 2Q`.
    pub fn a_matrix(&self) -> Mat2 {
        mat_scale(&mat_add(&self.psi_plus, &self.psi_minus, -1.0), 0.5 / self.q)
    }
}

/// How the pair splits its drift.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum PairCase {
    /// `W` moves only together with `Y`; drift is split by the sign of `ΔY`.
    Split,
    /// `W` also moves while `Y` stays; the stay-restricted pair has its own
    /// rate `lambda0` and carries the classical bound.
    Stay { lambda0: f64 },
}

/// What a model declares about itself.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Contract {
    pub model: String,
    pub dim: usize,
    pub lattice: LatticeSpec,
    pub constants: PairConstants,
    pub case: PairCase,
    pub analytic_moments: bool,
    /// Exact conditional sampling given `Y` is available.
    pub sufficiency: bool,
    /// `log2` of the number of configurations.
    pub state_bits: f64,
    /// Exhaustive enumeration fits the oracle budget.
    pub enumerable: bool,
    /// Standard deviation of the raw statistic, per coordinate: `W = X / x_scale`.
    pub x_scale: Vec2,
}

/// One exchangeable-pair transition.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairStep {
    pub delta_w: Vec2,
    pub delta_y: i8,
}

/// Conditional moments of one configuration, averaged over every proposal.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct MomentProfile {
    pub dim: usize,
    pub w: Vec2,
    pub y: f64,
    pub m0_plus: f64,
    pub m0_minus: f64,
    pub m1_plus: Vec2,
    pub m1_minus: Vec2,
    pub m2_plus: Mat2,
    pub m2_minus: Mat2,
    /// Moments restricted to `ΔY = 0`.
    pub m1_stay: Vec2,
    pub m2_stay: Mat2,
    /// `E(|ΔW|)`, `E(|ΔW|^3)`, `E(|ΔW|^4)` over all proposals.
    pub abs_dw: f64,
    pub abs_dw3: f64,
    pub abs_dw4: f64,
    pub abs_dw3_stay: f64,
    /// `E(|(λΨ)^{-1} ΔW| |ΔW|^3)` and the same with `|ΔW|^2`.
    pub psi_dw3: f64,
    pub psi_dw2: f64,
}

/// Conditional expectations consumed by the bound evaluators.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct ResidualSummary {
    pub model: String,
    pub dim: usize,
    pub k: i64,
    pub y_k: f64,
    pub p_k: f64,
    pub p_km1: f64,
    pub r_k: f64,
    pub lambda: f64,
    pub q: f64,
    pub psi: f64,
    pub samples_k: usize,
    pub samples_km1: usize,
    pub acceptance: f64,
    /// `E(|R1-| | Y=k)` (multivariate: `|Ψ^{-1} R1-|`).
    pub abs_r1_minus_at_k: f64,
    pub abs_r1_plus_at_km1: f64,
    /// `E(|R2-| | Y=k)` (multivariate: `‖Ψ^{-1} Γ2-‖_HS`).
    pub abs_r2_minus_at_k: f64,
    pub abs_r2_plus_at_km1: f64,
    /// `E(|R1+ + R1-| | Y=k)` and the same for `R2`.
    pub abs_r1_sum_at_k: f64,
    pub abs_r2_sum_at_k: f64,
    /// `Ĉ_k` split as `E(|W| S | ·) + c E(S | ·)` with `S = |R0+| + |R0-|`;
    /// `c_hat_k` uses `c = E|Z|` in one dimension and `sqrt(tr Σ)` otherwise.
    pub c_w_k: f64,
    pub c_r_k: f64,
    pub c_hat_k: f64,
    pub d_hat_k: f64,
    /// `E(|ΔW|^3 | Y∈{k-1,k})`.
    pub e_hat_k: f64,
    /// `E(|(λΨ)^{-1}ΔW||ΔW|^3 | Y∈{k-1,k})`.
    pub e_psi_k: f64,
    /// Multivariate third-moment variant `E(|(λΨ)^{-1}ΔW||ΔW|^2 | Y∈{k-1,k})`.
    pub e_prime_k: f64,
    pub f_hat_k: f64,
    pub w2_mean: f64,
    /// Unconditional `E|R1+ - R1-|`, `E|R2+ - R2-|` and `E|ΔW|^3`.
    pub c_uncond: f64,
    pub d_uncond: f64,
    pub e_uncond: f64,
    /// Stay-restricted residuals at `Y=k`.
    pub abs_r1_stay_at_k: f64,
    pub abs_r2_stay_at_k: f64,
    pub dw3_stay_at_k: f64,
    pub lambda0: Option<f64>,
    pub holder: Option<HolderTerms>,
    pub stderr: BTreeMap<String, f64>,
}

impl ResidualSummary {
    /// `Â_k = E(|R1-| | k) + r_k E(|R1+| | k-1)`.
    pub fn a_hat(&self) -> f64 {
        self.abs_r1_minus_at_k + self.r_k * self.abs_r1_plus_at_km1
    }

    pub fn b_hat(&self) -> f64 {
        self.abs_r2_minus_at_k + self.r_k * self.abs_r2_plus_at_km1
    }
}

/// Conditional expectations bounded through unconditional `p`-norms.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct HolderTerms {
    pub p: f64,
    pub r1_minus_norm: f64,
    pub r2_minus_norm: f64,
    pub a_k: f64,
    pub b_k: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum TheoremTag {
    #[serde(rename = "T1.1")]
    T11,
    #[serde(rename = "T1.3")]
    T13,
    #[serde(rename = "T1.6")]
    T16,
    #[serde(rename = "T2.1")]
    T21,
    #[serde(rename = "L2.2")]
    L22,
    #[serde(rename = "T2.3")]
    T23,
    #[serde(rename = "T3.1-4mom")]
    T31Fourth,
    #[serde(rename = "T3.1-3mom")]
    T31Third,
    #[serde(rename = "L5.1")]
    L51,
}

impl TheoremTag {
    pub fn parse(s: &str) -> Option<Self> {
        let s = s.to_ascii_lowercase().replace(['.', '-', '_'], "");
        Some(match s.as_str() {
            "t11" => TheoremTag::T11,
            "t13" => TheoremTag::T13,
            "t16" | "t16llt" => TheoremTag::T16,
            "t21" => TheoremTag::T21,
            "l22" => TheoremTag::L22,
            "t23" => TheoremTag::T23,
            "t31" | "t314mom" | "t31fourth" => TheoremTag::T31Fourth,
            "t313mom" | "t31third" => TheoremTag::T31Third,
            "l51" => TheoremTag::L51,
            _ => return None,
        })
    }
}

/// Per-term breakdown of a bound. Term order is the order of the formula.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BoundReport {
    pub theorem: TheoremTag,
    pub terms: Vec<(String, f64)>,
    pub total: f64,
    pub caveats: Vec<String>,
}

impl BoundReport {
    pub fn new(theorem: TheoremTag) -> Self {
        BoundReport {
            theorem,
            terms: Vec::new(),
            total: 0.0,
            caveats: Vec::new(),
        }
    }

    pub fn term(&self, name: &str) -> Option<f64> {
        self.terms.iter().find(|(n, _)| n == name).map(|t| t.1)
    }

    pub(crate) fn push(&mut self, name: &str, value: f64) {
        self.terms.push((name.to_string(), value));
    }

    /// JSON object with stable key order.
    pub fn to_json(&self) -> serde_json::Value {
        let terms: serde_json::Map<String, serde_json::Value> = self
            .terms
            .iter()
            .map(|(k, v)| (k.clone(), serde_json::json!(v)))
            .collect();
        serde_json::json!({
            "theorem": self.theorem,
            "terms": terms,
            "total": self.total,
            "caveats": self.caveats,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lattice_offsets() {
        let l = LatticeSpec::for_mean(50.0);
        assert_eq!(l.zeta, 0.0);
        let l = LatticeSpec::for_mean(2.3);
        assert!((l.zeta - 0.7).abs() < 1e-12);
        assert!(l.contains(-2.3 + 5.0));
        assert!(!l.contains(0.5));
    }

    #[test]
    fn binomial_ratio_at_center() {
        let law = CountLaw::binomial(100, 0.5);
        let r = law.ratio(0).unwrap();
        assert!((r - 50.0 / 51.0).abs() < 1e-13);
        assert!((law.variance() - 25.0).abs() < 1e-10);
    }

    #[test]
    fn count_mapping_with_fractional_mean() {
        let law = CountLaw::binomial(10, 0.33);
        assert_eq!(law.base_count(), 4);
        assert!(law.lattice().contains(law.y_of(law.count_for(-1).unwrap())));
    }

    #[test]
    fn inverse_roundtrip() {
        let m = [[2.0, 1.0], [0.5, 3.0]];
        let inv = inverse(&m, 2).unwrap();
        let id = mat_mul(&m, &inv, 2);
        assert!((id[0][0] - 1.0).abs() < 1e-14 && id[0][1].abs() < 1e-14);
    }
}
