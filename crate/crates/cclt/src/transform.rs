//! Change of variable that symmetrises an asymmetric drift
//! `M1± = -λ(a± Ψ W + b± Y + R1±)` and removes the quadratic and cubic
//! curvature of `E(W | Y)`.
//!
//! `W0 = X + λAXY + (λθ/2)(Y² - EY²) + (λ²(A+α)θ/3)(Y³ - EY³)` with
//! `A = (Ψ+ - Ψ-)/2Q`, `α = (a+ - a-)/2Q` and `θ = b+/Q`; in one dimension
//! `A = ψα`. All inputs are in the units of the model's normalised `W`.

use serde::Serialize;

use crate::core::{mat_scale, mat_vec, Contract, CountLaw, Mat2, MomentProfile, PairConstants, Vec2, ZERO2};
use crate::empirics::STREAM_SIGMA;
use crate::error::{invalid, Error, Result};
use crate::models::{CondMoments, Move, Obs, PairModel};
use crate::moments::exact_moments;
use crate::rng::{run_blocks, SimRng};
use crate::stats::Moments;

/// The change of variable for one model.
#[derive(Clone, Debug, Serialize)]
pub struct ChangeOfVariable {
    pub dim: usize,
    pub lambda: f64,
    pub a: Mat2,
    pub alpha: f64,
    pub theta: Vec2,
    pub ey2: f64,
    pub ey3: f64,
}

impl ChangeOfVariable {
    pub fn new(c: &PairConstants, dim: usize, law: &CountLaw) -> Result<Self> {
        if c.q == 0.0 {
            return Err(invalid("Q = 0"));
        }
        Ok(ChangeOfVariable {
            dim,
            lambda: c.lambda,
            a: c.a_matrix(),
            alpha: c.alpha(),
            theta: c.theta(),
            ey2: law.moment(2),
            ey3: law.moment(3),
        })
    }

    pub fn is_identity(&self) -> bool {
        self.a.iter().flatten().all(|&v| v == 0.0) && self.theta.iter().all(|&v| v == 0.0)
    }

    /// `(I + λAy)` applied to `x`.
    fn linear(&self, x: &Vec2, y: f64) -> Vec2 {
        let ax = mat_vec(&self.a, x, self.dim);
        let mut out = ZERO2;
        for i in 0..self.dim {
            out[i] = x[i] + self.lambda * ax[i] * y;
        }
        out
    }

    /// `(λθ/2)(y² - EY²) + (λ²(A + α)θ/3)(y³ - EY³)`.
    pub fn shift(&self, y: f64) -> Vec2 {
        let l = self.lambda;
        let at = mat_vec(&self.a, &self.theta, self.dim);
        let mut out = ZERO2;
        for i in 0..self.dim {
            let cubic = (at[i] + self.alpha * self.theta[i]) * l * l / 3.0;
            out[i] = 0.5 * l * self.theta[i] * (y * y - self.ey2) + cubic * (y * y * y - self.ey3);
        }
        out
    }

    pub fn apply(&self, x: &Vec2, y: f64) -> Vec2 {
        let lin = self.linear(x, y);
        let s = self.shift(y);
        [lin[0] + s[0], lin[1] + s[1]]
    }

    /// Exact `Var(W0_i)` from the conditional law of `X` given the count.
    pub fn exact_variance(&self, law: &CountLaw, cond: &dyn Fn(usize) -> Option<CondMoments>) -> Option<Vec2> {
        let mut second = [0.0; 2];
        let mut first = [0.0; 2];
        for (count, &p) in law.pmf.iter().enumerate() {
            if p == 0.0 {
                continue;
            }
            let y = law.y_of(count);
            let cm = cond(count)?;
            let s = self.shift(y);
            for i in 0..self.dim {
                // Row i of (I + λAy).
                let mut row = [0.0; 2];
                for j in 0..self.dim {
                    row[j] = self.lambda * self.a[i][j] * y + if i == j { 1.0 } else { 0.0 };
                }
                let mean = row[0] * cm.mean[0] + row[1] * cm.mean[1] + s[i];
                let var = (0..self.dim)
                    .flat_map(|j| (0..self.dim).map(move |l| (j, l)))
                    .map(|(j, l)| row[j] * cm.cov[j][l] * row[l])
                    .sum::<f64>();
                second[i] += p * (var + mean * mean);
                first[i] += p * mean;
            }
        }
        Some([
            second[0] - first[0] * first[0],
            second[1] - first[1] * first[1],
        ])
    }
}

/// `W0(X, Y)` for a univariate model.
pub fn change_of_variable_uni(x: f64, y: f64, c: &PairConstants, ey2: f64, ey3: f64) -> Result<f64> {
    if c.q == 0.0 {
        return Err(invalid("Q = 0"));
    }
    let (l, psi, alpha, theta) = (c.lambda, c.psi_scalar(), c.alpha(), c.theta()[0]);
    Ok(x + l * psi * alpha * x * y
        + 0.5 * l * theta * (y * y - ey2)
        + l * l * (psi + 1.0) * alpha * theta / 3.0 * (y * y * y - ey3))
}

/// `W0(X, Y)` for a model of any dimension.
pub fn change_of_variable_multi(
    x: &Vec2,
    y: f64,
    c: &PairConstants,
    dim: usize,
    ey2: f64,
    ey3: f64,
) -> Result<Vec2> {
    if c.q == 0.0 {
        return Err(invalid("Q = 0"));
    }
    let cov = ChangeOfVariable {
        dim,
        lambda: c.lambda,
        a: c.a_matrix(),
        alpha: c.alpha(),
        theta: c.theta(),
        ey2,
        ey3,
    };
    Ok(cov.apply(x, y))
}

/// How `σ_{W0}` was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum SigmaSource {
    Identity,
    Exact,
    MonteCarlo { samples: usize },
}

pub const DEFAULT_SIGMA_SAMPLES: usize = 200_000;

/// A model seen through its change of variable: `W = W0 / σ_{W0}` per
/// coordinate, with the symmetric contract `a± = 1/2`, `b± = 0`,
/// `Ψ± = Ψ/2`.
#[derive(Clone, Debug)]
pub struct Transformed<M: PairModel> {
    pub inner: M,
    pub cov: ChangeOfVariable,
    pub sigma: Vec2,
    pub sigma_source: SigmaSource,
    constants: PairConstants,
}

impl<M: PairModel> Transformed<M> {
    /// Uses the exact `σ_{W0}` when the model knows its conditional law and
    /// Monte Carlo with `samples` draws otherwise.
    pub fn new(inner: M, samples: usize, seed: u64) -> Result<Self> {
        let dim = inner.dim();
        let c = inner.constants().clone();
        c.validate(dim)?;
        let cov = ChangeOfVariable::new(&c, dim, inner.count_law())?;
        let (sigma, sigma_source) = if cov.is_identity() {
            ([1.0, if dim == 2 { 1.0 } else { 0.0 }], SigmaSource::Identity)
        } else if let Some(v) = cov.exact_variance(inner.count_law(), &|m| inner.conditional_w(m)) {
            ([v[0].sqrt(), v[1].sqrt()], SigmaSource::Exact)
        } else {
            if samples < 2 {
                return Err(invalid("Monte Carlo scale needs samples >= 2"));
            }
            let parts = run_blocks(seed, STREAM_SIGMA, samples, |rng, _, len| {
                let mut m = [Moments::default(); 2];
                for _ in 0..len {
                    let o = inner.observe(&inner.sample(rng));
                    let w0 = cov.apply(&o.w, o.y);
                    m[0].push(w0[0]);
                    m[1].push(w0[1]);
                }
                m
            });
            let mut m = [Moments::default(); 2];
            for b in &parts {
                m[0].merge(&b[0]);
                m[1].merge(&b[1]);
            }
            (
                [m[0].variance().sqrt(), m[1].variance().sqrt()],
                SigmaSource::MonteCarlo { samples },
            )
        };
        if (0..dim).any(|i| !(sigma[i] > 0.0)) {
            return Err(invalid("transformed statistic has zero variance"));
        }
        let half = mat_scale(&c.psi, 0.5);
        let constants = PairConstants {
            psi_plus: half,
            psi_minus: half,
            a_plus: 0.5,
            a_minus: 0.5,
            b_plus: ZERO2,
            b_minus: ZERO2,
            ..c
        };
        Ok(Transformed {
            inner,
            cov,
            sigma,
            sigma_source,
            constants,
        })
    }

    /// Scaled `W0` for an inner observation.
    pub fn w_of(&self, w: &Vec2, y: f64) -> Vec2 {
        let w0 = self.cov.apply(w, y);
        let mut out = ZERO2;
        for i in 0..self.inner.dim() {
            out[i] = w0[i] / self.sigma[i];
        }
        out
    }
}

impl<M: PairModel> PairModel for Transformed<M> {
    type Config = M::Config;

    fn name(&self) -> &'static str {
        self.inner.name()
    }

    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn constants(&self) -> &PairConstants {
        &self.constants
    }

    fn contract(&self) -> Contract {
        let mut c = self.inner.contract();
        c.model = format!("{}+change-of-variable", c.model);
        c.constants = self.constants.clone();
        c.analytic_moments = false;
        c
    }

    fn count_law(&self) -> &CountLaw {
        self.inner.count_law()
    }

    fn sample(&self, rng: &mut SimRng) -> M::Config {
        self.inner.sample(rng)
    }

    fn sample_given_count(&self, count: usize, rng: &mut SimRng) -> Option<M::Config> {
        self.inner.sample_given_count(count, rng)
    }

    fn rejection_candidate(&self, target: usize, rng: &mut SimRng) -> Option<M::Config> {
        self.inner.rejection_candidate(target, rng)
    }

    fn count(&self, cfg: &M::Config) -> usize {
        self.inner.count(cfg)
    }

    fn observe(&self, cfg: &M::Config) -> Obs {
        let o = self.inner.observe(cfg);
        Obs {
            w: self.w_of(&o.w, o.y),
            y: o.y,
        }
    }

    fn for_each_move(&self, cfg: &M::Config, f: &mut dyn FnMut(Move)) {
        let o = self.inner.observe(cfg);
        let base = self.w_of(&o.w, o.y);
        self.inner.for_each_move(cfg, &mut |mv| {
            let w = [o.w[0] + mv.dw[0], o.w[1] + mv.dw[1]];
            let next = self.w_of(&w, o.y + mv.dy as f64);
            f(Move {
                prob: mv.prob,
                dw: [next[0] - base[0], next[1] - base[1]],
                dy: mv.dy,
            });
        });
    }

    fn step(&self, cfg: &mut M::Config, rng: &mut SimRng) {
        self.inner.step(cfg, rng)
    }

    fn declared_r0(&self, cfg: &M::Config) -> [f64; 2] {
        self.inner.declared_r0(cfg)
    }

    fn for_each_config(&self, f: &mut dyn FnMut(f64, &M::Config)) -> Result<()> {
        self.inner.for_each_config(f)
    }
}

/// Cubic polynomial in `Y`, lowest degree first.
type Poly = [f64; 4];

fn poly_eval(p: &Poly, y: f64) -> f64 {
    ((p[3] * y + p[2]) * y + p[1]) * y + p[0]
}

/// Components of `R̃1± = -M1±(W0)/λ - ½ψW0` for one configuration, in
/// units of `W0` (before division by `σ_{W0}`).
#[derive(Clone, Copy, Debug, Default, Serialize)]
pub struct TransformedResidual {
    /// `X` and `R1` terms:
    /// `λψ²αa±X(Y±1) + λψαa±XY - ½λψ²αXY + R1±(1 + λψα(Y±1))`.
    pub eps0: f64,
    /// Linear, quadratic-beyond-lead, and cubic-plus-constant parts of the
    /// `Y` polynomial.
    pub eps1: f64,
    pub eps2: f64,
    pub eps3: f64,
    /// `(λθ/2)(1 - ψ/2)(Y² - EY²)`.
    pub lead: f64,
    /// `-(δ0±/λ)(±λψαX + Δg±)` with `δ0± = M0± - Q ± λa±Y`.
    pub m0_remainder: f64,
    /// Sum of the components.
    pub total: f64,
    /// `R̃1±` computed directly from the enumerated moves.
    pub direct: f64,
}

impl TransformedResidual {
    pub fn abs_sum(&self) -> f64 {
        self.eps0.abs()
            + self.eps1.abs()
            + self.eps2.abs()
            + self.eps3.abs()
            + self.lead.abs()
            + self.m0_remainder.abs()
    }
}

/// Residual components of the transformed univariate model at one
/// configuration, `[plus, minus]`.
pub fn transformed_residuals_uni<M: PairModel>(
    t: &Transformed<M>,
    cfg: &M::Config,
) -> Result<[TransformedResidual; 2]> {
    if t.dim() != 1 {
        return Err(Error::Unsupported("univariate residuals need a one-dimensional model".into()));
    }
    let c = t.inner.constants();
    let (l, psi, alpha, theta, q) = (c.lambda, c.psi_scalar(), c.alpha(), c.theta()[0], c.q);
    let raw = exact_moments(&t.inner, cfg);
    let direct = exact_moments(t, cfg);
    let (x, y) = (raw.w[0], raw.y);
    let c2 = 0.5 * l * theta;
    let c3 = l * l * (psi + 1.0) * alpha * theta / 3.0;
    let g: Poly = [-c2 * t.cov.ey2 - c3 * t.cov.ey3, 0.0, c2, c3];
    // g(Y ± 1) - g(Y) as polynomials in Y.
    let dg = |s: f64| -> Poly {
        [
            c2 + c3 * s,
            2.0 * c2 * s + 3.0 * c3,
            3.0 * c3 * s,
            0.0,
        ]
    };
    let w0 = poly_eval(&g, y) + x * (1.0 + l * psi * alpha * y);
    let sigma = t.sigma[0];
    let mut out = [TransformedResidual::default(); 2];
    for (idx, s) in [(0usize, 1.0f64), (1, -1.0)] {
        let (a, b, m0, m1) = if idx == 0 {
            (c.a_plus, c.b_plus[0], raw.m0_plus, raw.m1_plus[0])
        } else {
            (c.a_minus, c.b_minus[0], raw.m0_minus, raw.m1_minus[0])
        };
        let r1 = -m1 / l - a * psi * x - b * y;
        let factor = 1.0 + l * psi * alpha * (y + s);
        let eps0 = l * psi * psi * alpha * a * x * (y + s) + l * psi * alpha * a * x * y
            - 0.5 * l * psi * psi * alpha * x * y
            + r1 * factor;
        // b Y (1 + λψα(Y ± 1)) - ((Q ∓ λaY)/λ) Δg - ½ψ g(Y).
        let d = dg(s);
        let mut poly: Poly = [0.0; 4];
        poly[1] += b * (1.0 + l * psi * alpha * s);
        poly[2] += b * l * psi * alpha;
        for i in 0..3 {
            poly[i] -= q / l * d[i];
            poly[i + 1] += s * a * d[i];
        }
        for i in 0..4 {
            poly[i] -= 0.5 * psi * g[i];
        }
        let lead_coef = c2 * (1.0 - 0.5 * psi);
        let delta0 = m0 - q + s * l * a * y;
        let m0_remainder = -(delta0 / l) * (s * l * psi * alpha * x + poly_eval(&d, y));
        let comp = TransformedResidual {
            eps0,
            eps1: poly[1] * y,
            eps2: (poly[2] - lead_coef) * y * y,
            eps3: poly[3] * y * y * y + poly[0] + lead_coef * t.cov.ey2,
            lead: lead_coef * (y * y - t.cov.ey2),
            m0_remainder,
            total: 0.0,
            direct: 0.0,
        };
        let m1_direct = if idx == 0 { direct.m1_plus[0] } else { direct.m1_minus[0] };
        out[idx] = TransformedResidual {
            total: (comp.eps0 + comp.eps1 + comp.eps2 + comp.eps3 + comp.lead + comp.m0_remainder)
                / sigma,
            direct: -m1_direct / l - 0.5 * psi * w0 / sigma,
            eps0: comp.eps0 / sigma,
            eps1: comp.eps1 / sigma,
            eps2: comp.eps2 / sigma,
            eps3: comp.eps3 / sigma,
            lead: comp.lead / sigma,
            m0_remainder: comp.m0_remainder / sigma,
        };
    }
    Ok(out)
}

/// Exact check of the symmetrised drift given `Y = k`:
/// `|E(M1+ + M1- + λψW | Y = k)|` against `λ Σ± E(Σ|components| | Y = k)`.
#[derive(Clone, Debug, Serialize)]
pub struct DriftCheck {
    pub k: i64,
    pub drift: f64,
    pub envelope: f64,
    /// Largest `|total - direct|` over the configurations.
    pub max_decomposition_error: f64,
}

pub fn symmetrised_drift_check<M: PairModel>(t: &Transformed<M>, k: i64) -> Result<DriftCheck> {
    let law = t.count_law();
    let target = law
        .count_for(k)
        .ok_or_else(|| invalid(format!("lattice offset {k} is outside the support")))?;
    let c = t.constants();
    let (l, psi) = (c.lambda, c.psi_scalar());
    let mut weight = 0.0;
    let mut drift = 0.0;
    let mut env = 0.0;
    let mut err: f64 = 0.0;
    let mut failure = None;
    t.for_each_config(&mut |w, cfg| {
        if t.count(cfg) != target || failure.is_some() {
            return;
        }
        let prof: MomentProfile = exact_moments(t, cfg);
        match transformed_residuals_uni(t, cfg) {
            Ok(r) => {
                weight += w;
                drift += w * (prof.m1_plus[0] + prof.m1_minus[0] + l * psi * prof.w[0]);
                env += w * l * (r[0].abs_sum() + r[1].abs_sum());
                for ri in r {
                    err = err.max((ri.total - ri.direct).abs());
                }
            }
            Err(e) => failure = Some(e),
        }
    })?;
    if let Some(e) = failure {
        return Err(e);
    }
    if weight == 0.0 {
        return Err(Error::RareEvent(0.0));
    }
    Ok(DriftCheck {
        k,
        drift: (drift / weight).abs(),
        envelope: env / weight,
        max_decomposition_error: err,
    })
}

/// Second-moment residual of the transformed pair against its envelope,
/// with the implied constant set to one:
///
/// `λ^{1/2}ψ|α|(σ_W0^{-1} sqrt(‖λ(1+R2)‖_{2p}‖Y‖_{2p}) + ‖X‖_p/σ_W0)
/// + λ^{1/2}|θ|‖Y‖_p/σ_W0 + λ^{3/2}(ψ+1)|αθ|‖Y²‖_p/σ_W0`.
#[derive(Clone, Debug, Serialize)]
pub struct R2Envelope {
    pub p: f64,
    pub envelope: f64,
    /// `‖R̃2+ - R2+‖_p` and the same for `-`, the deviation introduced by the
    /// change of variable.
    pub deviation: [f64; 2],
    /// Constant needed for the envelope to cover the larger deviation.
    pub implied_constant: f64,
}

pub fn r2_envelope<M: PairModel>(t: &Transformed<M>, p: f64) -> Result<R2Envelope> {
    if t.dim() != 1 {
        return Err(Error::Unsupported("envelope is univariate".into()));
    }
    let c = t.inner.constants();
    let (l, psi, alpha, theta) = (c.lambda, c.psi_scalar(), c.alpha(), c.theta()[0]);
    let tc = t.constants();
    let mut acc = [0.0f64; 6];
    let mut weight = 0.0;
    t.for_each_config(&mut |w, cfg| {
        let raw = exact_moments(&t.inner, cfg);
        let tr = exact_moments(t, cfg);
        let r2_raw = [raw.m2_plus[0][0] / l - psi, raw.m2_minus[0][0] / l - psi];
        let r2_t = [tr.m2_plus[0][0] / tc.lambda - psi, tr.m2_minus[0][0] / tc.lambda - psi];
        let r2 = r2_raw[0].abs().max(r2_raw[1].abs());
        weight += w;
        acc[0] += w * (l * (1.0 + r2)).abs().powf(2.0 * p);
        acc[1] += w * raw.y.abs().powf(2.0 * p);
        acc[2] += w * raw.w[0].abs().powf(p);
        acc[3] += w * raw.y.abs().powf(p);
        acc[4] += w * (r2_t[0] - r2_raw[0]).abs().powf(p);
        acc[5] += w * (r2_t[1] - r2_raw[1]).abs().powf(p);
    })?;
    let norm = |v: f64, e: f64| (v / weight).powf(1.0 / e);
    let s = t.sigma[0];
    let y2p = norm(acc[3], p);
    let y_sq_p = {
        // ‖Y²‖_p = ‖Y‖_{2p}².
        let v = norm(acc[1], 2.0 * p);
        v * v
    };
    let envelope = l.sqrt() * psi * alpha.abs()
        * ((norm(acc[0], 2.0 * p) * norm(acc[1], 2.0 * p)).sqrt() / s + norm(acc[2], p) / s)
        + l.sqrt() * theta.abs() * y2p / s
        + l.powf(1.5) * (psi + 1.0) * (alpha * theta).abs() * y_sq_p / s;
    let deviation = [norm(acc[4], p), norm(acc[5], p)];
    let worst = deviation[0].max(deviation[1]);
    Ok(R2Envelope {
        p,
        envelope,
        deviation,
        implied_constant: if envelope > 0.0 { worst / envelope } else { f64::INFINITY },
    })
}

/// Exact `E(X | Y = k)` against its closed form, and the conditional mean
/// left after the change of variable.
#[derive(Clone, Debug, Serialize)]
pub struct ConditionalMeanReport {
    pub model: String,
    pub n: usize,
    pub k: i64,
    /// In units of the raw statistic `X`.
    pub exact: f64,
    pub closed_form: f64,
    pub discrepancy: f64,
    /// `E(W | Y = k)` after the change of variable, in units of `σ_{W0}`.
    pub transformed_mean: f64,
}

/// Supported for `pattern01` and `wedge-edge`.
pub fn conditional_mean_check<M: PairModel>(
    t: &Transformed<M>,
    n: usize,
    p: f64,
    k: i64,
) -> Result<ConditionalMeanReport> {
    let inner = &t.inner;
    let law = inner.count_law();
    let count = law
        .count_for(k)
        .ok_or_else(|| invalid(format!("lattice offset {k} is outside the support")))?;
    let cm = inner
        .conditional_w(count)
        .ok_or_else(|| Error::Unsupported(format!("no conditional law for {}", inner.name())))?;
    let scale = inner.contract().x_scale[0];
    let y = law.y_of(count);
    let exact = cm.mean[0] * scale;
    let q = 1.0 - p;
    let alpha = (2.0 * p - 1.0) / (2.0 * p * q);
    let nf = n as f64;
    let closed_form = match inner.name() {
        "pattern01" => nf * p * q / (nf - 1.0) * (1.0 - 2.0 * alpha * y / nf - y * y / (nf * p * q)),
        "wedge-edge" => {
            let big = nf * (nf - 1.0) / 2.0;
            -(2.0 * big * p * q / (nf + 1.0)) * (1.0 - 2.0 * alpha * y / big - y * y / (big * p * q))
        }
        other => return Err(Error::Unsupported(format!("no closed-form mean for {other}"))),
    };
    let w0 = t.cov.linear(&cm.mean, y)[0] + t.cov.shift(y)[0];
    Ok(ConditionalMeanReport {
        model: inner.name().to_string(),
        n,
        k,
        exact,
        closed_form,
        discrepancy: (exact - closed_form).abs(),
        transformed_mean: w0 / t.sigma[0],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{Pattern01, WedgeEdge};

    #[test]
    fn identity_when_symmetric() {
        let c = PairConstants::scalar(0.01, 25.0, 2.0, 0.5, 0.0);
        assert_eq!(change_of_variable_uni(0.3, 2.0, &c, 25.0, 0.0).unwrap(), 0.3);
    }

    #[test]
    fn one_dimensional_forms_agree() {
        let m = Pattern01::new(20, 0.3).unwrap();
        let c = m.constants();
        let law = m.count_law();
        let (e2, e3) = (law.moment(2), law.moment(3));
        for (x, y) in [(0.4, -2.3), (-1.1, 3.7), (0.0, 0.0)] {
            let u = change_of_variable_uni(x, y, c, e2, e3).unwrap();
            let v = change_of_variable_multi(&[x, 0.0], y, c, 1, e2, e3).unwrap();
            assert!((u - v[0]).abs() < 1e-14);
        }
    }

    #[test]
    fn pattern_conditional_mean_closed_form() {
        let t = Transformed::new(Pattern01::new(8, 0.5).unwrap(), 0, 0).unwrap();
        let r = conditional_mean_check(&t, 8, 0.5, 0).unwrap();
        assert!((r.exact - 2.0 / 7.0).abs() < 1e-12);
        assert!(r.discrepancy < 1e-12);
    }

    #[test]
    fn wedge_conditional_mean_closed_form() {
        let t = Transformed::new(WedgeEdge::new(5, 0.5).unwrap(), 0, 0).unwrap();
        for k in -3..=3 {
            let r = conditional_mean_check(&t, 5, 0.5, k).unwrap();
            assert!(r.discrepancy < 1e-10, "{r:?}");
        }
    }

    #[test]
    fn decomposition_sums_to_direct_residual() {
        let t = Transformed::new(Pattern01::new(10, 0.3).unwrap(), 0, 0).unwrap();
        for k in -2..=2 {
            let chk = symmetrised_drift_check(&t, k).unwrap();
            assert!(chk.max_decomposition_error < 1e-9, "{chk:?}");
            assert!(chk.drift <= chk.envelope + 1e-12);
        }
    }

    #[test]
    fn scaling_is_exact_for_pattern() {
        let t = Transformed::new(Pattern01::new(12, 0.3).unwrap(), 0, 0).unwrap();
        assert_eq!(t.sigma_source, SigmaSource::Exact);
        let mut s = 0.0;
        let mut m = 0.0;
        t.for_each_config(&mut |w, c| {
            let v = t.observe(c).w[0];
            s += w * v * v;
            m += w * v;
        })
        .unwrap();
        assert!((s - m * m - 1.0).abs() < 1e-10);
    }
}
