//! Conditional sampling, Wasserstein-1 distances to the standard normal,
//! rate regression, and the local-limit check on the count law.

use std::f64::consts::PI;

use rand::Rng;
use serde::Serialize;

use crate::core::{CountLaw, Vec2};
use crate::error::{invalid, Error, Result};
use crate::models::PairModel;
use crate::normal;
use crate::rng::{run_blocks, substream};
use crate::stats::{fit_line, LineFit, Neumaier};

/// Smallest admissible `P(count)` for conditioning.
pub const RARE_FLOOR: f64 = 1e-6;

/// Stream offsets keep independent experiments on disjoint substreams.
pub(crate) const STREAM_AT_K: u64 = 0;
pub(crate) const STREAM_AT_KM1: u64 = 1 << 32;
pub(crate) const STREAM_UNCONDITIONAL: u64 = 2 << 32;
pub(crate) const STREAM_DIRECTIONS: u64 = 3 << 32;
pub(crate) const STREAM_CHAIN: u64 = 4 << 32;
pub(crate) const STREAM_SIGMA: u64 = 5 << 32;

/// Draws `total` configurations from the law given `count`, exactly when the
/// model has a sufficient-statistic sampler and by rejection otherwise, and
/// maps each through `f`. Returns the images in block order and the
/// acceptance rate.
pub fn map_conditional<M, T, F>(
    model: &M,
    count: usize,
    total: usize,
    seed: u64,
    stream_base: u64,
    f: F,
) -> Result<(Vec<T>, f64)>
where
    M: PairModel,
    T: Send,
    F: Fn(&M::Config) -> T + Sync + Send,
{
    let prob = model.count_law().prob(count);
    if prob < RARE_FLOOR {
        return Err(Error::RareEvent(prob));
    }
    let exact = model.contract().sufficiency;
    let blocks = run_blocks(seed, stream_base, total, |rng, _, len| {
        let mut out = Vec::with_capacity(len);
        let mut attempts = 0u64;
        while out.len() < len {
            attempts += 1;
            let cfg = if exact {
                model.sample_given_count(count, rng)
            } else {
                model.rejection_candidate(count, rng)
            };
            if let Some(c) = cfg {
                out.push(f(&c));
            }
        }
        (out, attempts)
    });
    let mut values = Vec::with_capacity(total);
    let mut attempts = 0u64;
    for (v, a) in blocks {
        values.extend(v);
        attempts += a;
    }
    let acceptance = if attempts == 0 {
        1.0
    } else {
        total as f64 / attempts as f64
    };
    Ok((values, acceptance))
}

/// `W` conditioned on `Y = k`.
#[derive(Clone, Debug, Serialize)]
pub struct ConditionalSample {
    pub values: Vec<Vec2>,
    pub dim: usize,
    pub k: i64,
    pub count: usize,
    pub acceptance: f64,
    pub seed: u64,
}

impl ConditionalSample {
    pub fn coordinate(&self, i: usize) -> Vec<f64> {
        self.values.iter().map(|v| v[i]).collect()
    }
}

pub fn sample_conditional<M: PairModel>(
    model: &M,
    k: i64,
    target: usize,
    seed: u64,
) -> Result<ConditionalSample> {
    let count = model
        .count_law()
        .count_for(k)
        .ok_or_else(|| invalid(format!("lattice offset {k} is outside the support")))?;
    let (values, acceptance) =
        map_conditional(model, count, target, seed, STREAM_AT_K, |c| model.observe(c).w)?;
    Ok(ConditionalSample {
        values,
        dim: model.dim(),
        k,
        count,
        acceptance,
        seed,
    })
}

/// `∫_a^b (level - Φ(x)) dx`, evaluated on the side of zero where the
/// antiderivative does not cancel.
fn integral_level_minus_cdf(level: f64, a: f64, b: f64) -> f64 {
    if a >= 0.0 {
        (normal::sf_integral(a) - normal::sf_integral(b)) - (1.0 - level) * (b - a)
    } else if b <= 0.0 {
        level * (b - a) - (normal::cdf_integral(b) - normal::cdf_integral(a))
    } else {
        integral_level_minus_cdf(level, a, 0.0) + integral_level_minus_cdf(level, 0.0, b)
    }
}

fn abs_integral(level: f64, a: f64, b: f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    let c = if level <= 0.0 {
        f64::NEG_INFINITY
    } else if level >= 1.0 {
        f64::INFINITY
    } else {
        normal::quantile(level)
    };
    if c <= a {
        -integral_level_minus_cdf(level, a, b)
    } else if c >= b {
        integral_level_minus_cdf(level, a, b)
    } else {
        integral_level_minus_cdf(level, a, c) - integral_level_minus_cdf(level, c, b)
    }
}

fn w1_sorted(xs: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mut acc = Neumaier::default();
    acc.add(normal::cdf_integral(xs[0]));
    for i in 1..xs.len() {
        acc.add(abs_integral(i as f64 / n, xs[i - 1], xs[i]));
    }
    acc.add(normal::sf_integral(xs[xs.len() - 1]));
    acc.value()
}

/// `∫ |F_n(x) - Φ(x)| dx`, integrated exactly between order statistics.
pub fn w1_to_std_normal(sample: &[f64]) -> Result<f64> {
    if sample.is_empty() {
        return Err(Error::EmptySample);
    }
    if sample.iter().any(|x| !x.is_finite()) {
        return Err(invalid("sample contains a non-finite value"));
    }
    let mut xs = sample.to_vec();
    xs.sort_by(f64::total_cmp);
    Ok(w1_sorted(&xs))
}

pub const JACKKNIFE_BLOCKS: usize = 20;

/// Delete-one-block jackknife standard error of the W1 estimate.
pub fn w1_jackknife_stderr(sample: &[f64]) -> Result<f64> {
    let b = JACKKNIFE_BLOCKS;
    if sample.len() < 2 * b {
        return Err(invalid("jackknife needs at least 40 points"));
    }
    let len = sample.len();
    let mut stats = Vec::with_capacity(b);
    for j in 0..b {
        let (lo, hi) = (j * len / b, (j + 1) * len / b);
        let rest: Vec<f64> = sample[..lo].iter().chain(&sample[hi..]).copied().collect();
        stats.push(w1_to_std_normal(&rest)?);
    }
    let mean = stats.iter().sum::<f64>() / b as f64;
    let ss: f64 = stats.iter().map(|s| (s - mean).powi(2)).sum();
    Ok(((b as f64 - 1.0) / b as f64 * ss).sqrt())
}

/// Mean over seeded directions of the W1 distance between the projected
/// sample and `N(0,1)`; a proxy for the `d`-dimensional distance to
/// `N(0, I_d)`.
pub fn sliced_w1_to_std_normal(
    sample: &[Vec2],
    dim: usize,
    directions: usize,
    seed: u64,
) -> Result<f64> {
    if sample.is_empty() {
        return Err(Error::EmptySample);
    }
    if dim == 1 {
        return w1_to_std_normal(&sample.iter().map(|v| v[0]).collect::<Vec<_>>());
    }
    if directions < 32 {
        return Err(invalid("sliced distance needs at least 32 directions"));
    }
    let mut rng = substream(seed, STREAM_DIRECTIONS);
    let mut total = 0.0;
    for _ in 0..directions {
        let t: f64 = rng.random_range(0.0..2.0 * PI);
        let (s, c) = t.sin_cos();
        let proj: Vec<f64> = sample.iter().map(|v| c * v[0] + s * v[1]).collect();
        total += w1_to_std_normal(&proj)?;
    }
    Ok(total / directions as f64)
}

/// Least-squares fit of `log distance` on `log n`.
pub fn rate_regression(points: &[(f64, f64)]) -> Result<LineFit> {
    if points.len() < 4 {
        return Err(invalid("rate regression needs at least 4 points"));
    }
    if points.iter().any(|&(n, d)| !(n > 0.0) || !(d > 0.0)) {
        return Err(invalid("rate regression needs positive sizes and distances"));
    }
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    Ok(fit_line(&xs, &ys))
}

#[derive(Clone, Debug, Serialize)]
pub struct LltReport {
    pub sigma: f64,
    /// `sup_y |σ P(Y = y) - σ φ_{σ²}(y)|` over the support.
    pub eps_y: f64,
    pub argmax_y: f64,
}

pub fn llt_check(law: &CountLaw) -> LltReport {
    let s2 = law.variance();
    let sigma = s2.sqrt();
    let mut best = (0.0, 0.0);
    for (c, &p) in law.pmf.iter().enumerate() {
        let y = law.y_of(c);
        let d = (sigma * p - sigma * normal::density(y, s2)).abs();
        if d > best.0 {
            best = (d, y);
        }
    }
    LltReport {
        sigma,
        eps_y: best.0,
        argmax_y: best.1,
    }
}

/// Distance of `(W | Y = k)` to the standard normal, with its jackknife
/// standard error (sliced in two dimensions, error from the spread over
/// directions is not included).
#[derive(Clone, Debug, Serialize)]
pub struct DistanceReport {
    pub k: i64,
    pub samples: usize,
    pub distance: f64,
    pub stderr: f64,
    pub acceptance: f64,
}

pub fn conditional_distance<M: PairModel>(
    model: &M,
    k: i64,
    samples: usize,
    seed: u64,
) -> Result<DistanceReport> {
    let s = sample_conditional(model, k, samples, seed)?;
    let (distance, stderr) = if s.dim == 1 {
        let xs = s.coordinate(0);
        (w1_to_std_normal(&xs)?, w1_jackknife_stderr(&xs)?)
    } else {
        (sliced_w1_to_std_normal(&s.values, s.dim, 64, seed)?, f64::NAN)
    };
    Ok(DistanceReport {
        k,
        samples,
        distance,
        stderr,
        acceptance: s.acceptance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn point_mass_distance_is_mean_abs_normal() {
        let d = w1_to_std_normal(&[0.0; 100]).unwrap();
        assert!((d - (2.0 / PI).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn normal_quantiles_are_close() {
        let n = 10_000;
        let xs: Vec<f64> = (0..n)
            .map(|i| normal::quantile((i as f64 + 0.5) / n as f64))
            .collect();
        assert!(w1_to_std_normal(&xs).unwrap() < 5e-4);
    }

    #[test]
    fn two_point_mass_matches_quadrature() {
        let xs: Vec<f64> = (0..1000).map(|i| if i % 2 == 0 { -1.0 } else { 1.0 }).collect();
        let exact = w1_to_std_normal(&xs).unwrap();
        // Simpson on each piece where the empirical CDF is constant.
        let simpson = |level: f64, a: f64, b: f64| {
            let m = 20_000;
            let h = (b - a) / m as f64;
            let f = |t: f64| (level - normal::cdf(t)).abs();
            let mut s = f(a) + f(b);
            for i in 1..m {
                s += f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
            }
            s * h / 3.0
        };
        let q = simpson(0.0, -12.0, -1.0) + simpson(0.5, -1.0, 1.0) + simpson(1.0, 1.0, 12.0);
        assert!((exact - q).abs() < 1e-6, "{exact} vs {q}");
    }

    #[test]
    fn regression_recovers_power() {
        let pts: Vec<(f64, f64)> = [64.0, 128.0, 256.0, 512.0]
            .iter()
            .map(|&n: &f64| (n, 3.0 * n.powf(-0.5)))
            .collect();
        let fit = rate_regression(&pts).unwrap();
        assert!((fit.slope + 0.5).abs() < 1e-12);
        assert!(rate_regression(&pts[..3]).is_err());
    }

    #[test]
    fn llt_binomial() {
        let r = llt_check(&CountLaw::binomial(100, 0.5));
        assert!(r.eps_y > 0.0 && r.eps_y < 0.01);
    }
}
