//! Darts thrown at a target: the univariate score sum given the number of
//! misses, and a two-dimensional signed variant.

use rand::Rng;

use crate::core::{
    diag2, Contract, CountLaw, MomentProfile, PairCase, PairConstants, ZERO22,
};
use crate::error::{invalid, Error, Result};
use crate::models::{check_prob, random_subset, CondMoments, Move, Obs, PairModel};
use crate::rng::SimRng;

/// Discrete score law on the target: score `scores[j]` with weight
/// `weights[j]`, normalised so `q Σ w s = 0` and `q Σ w s² = 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct ScoreTable {
    pub weights: Vec<f64>,
    pub scores: Vec<f64>,
}

impl ScoreTable {
    /// `s = ±1/sqrt(q)` on two halves of the target.
    pub fn half_split(q: f64) -> Self {
        let s = 1.0 / q.sqrt();
        ScoreTable {
            weights: vec![0.5, 0.5],
            scores: vec![s, -s],
        }
    }

    pub fn validate(&self, q: f64) -> Result<()> {
        if self.weights.len() != self.scores.len() || self.weights.is_empty() {
            return Err(invalid("score table needs matching, non-empty columns"));
        }
        if self.weights.iter().any(|&w| !(w > 0.0)) {
            return Err(invalid("score weights must be positive"));
        }
        let tot: f64 = self.weights.iter().sum();
        let m1: f64 = self.weights.iter().zip(&self.scores).map(|(w, s)| w * s).sum();
        let m2: f64 = self
            .weights
            .iter()
            .zip(&self.scores)
            .map(|(w, s)| w * s * s)
            .sum();
        if (tot - 1.0).abs() > 1e-6 {
            return Err(invalid(format!("score weights sum to {tot}, not 1")));
        }
        let first = self.scores[0];
        if self.scores.iter().all(|&s| (s - first).abs() < 1e-12) {
            return Err(invalid(
                "constant score: a move that keeps Y would never move W",
            ));
        }
        if (q * m1).abs() > 1e-6 {
            return Err(invalid(format!("score mean on target is {}, not 0", q * m1)));
        }
        if (q * m2 - 1.0).abs() > 1e-6 {
            return Err(invalid(format!("score second moment is {}, not 1", q * m2)));
        }
        Ok(())
    }

    fn draw(&self, rng: &mut SimRng) -> usize {
        let mut u: f64 = rng.random();
        for (j, &w) in self.weights.iter().enumerate() {
            if u < w {
                return j;
            }
            u -= w;
        }
        self.weights.len() - 1
    }

    fn second_moment(&self) -> f64 {
        self.weights
            .iter()
            .zip(&self.scores)
            .map(|(w, s)| w * s * s)
            .sum()
    }
}

pub const MISS: i16 = -1;

/// `n` darts; each hits with probability `q` and then scores from the table.
/// `Y = #misses - np` with `p = 1 - q`, `W = n^{-1/2} Σ s(U_i) 1{hit}`.
#[derive(Clone, Debug)]
pub struct Darts {
    pub n: usize,
    pub q: f64,
    pub table: ScoreTable,
    law: CountLaw,
    constants: PairConstants,
}

impl Darts {
    pub fn new(n: usize, q: f64, table: ScoreTable) -> Result<Self> {
        check_prob("q", q)?;
        table.validate(q)?;
        if n == 0 {
            return Err(invalid("darts model needs n >= 1"));
        }
        let p = 1.0 - q;
        let nf = n as f64;
        Ok(Darts {
            n,
            q,
            table,
            law: CountLaw::binomial(n, p),
            constants: PairConstants::scalar(1.0 / nf, nf * p * q, p, 1.0, 0.0),
        })
    }

    pub fn lambda0(&self) -> f64 {
        self.q / self.n as f64
    }

    fn score(&self, d: i16) -> f64 {
        if d == MISS {
            0.0
        } else {
            self.table.scores[d as usize]
        }
    }

    fn enum_limit(&self) -> usize {
        let base = (self.table.scores.len() + 1) as f64;
        (20.0 / base.log2()).floor() as usize
    }
}

impl PairModel for Darts {
    /// Per dart: `MISS` or the index of its score.
    type Config = Vec<i16>;

    fn name(&self) -> &'static str {
        "darts"
    }

    fn dim(&self) -> usize {
        1
    }

    fn constants(&self) -> &PairConstants {
        &self.constants
    }

    fn contract(&self) -> Contract {
        Contract {
            model: self.name().into(),
            dim: 1,
            lattice: self.law.lattice(),
            constants: self.constants.clone(),
            case: PairCase::Stay {
                lambda0: self.lambda0(),
            },
            analytic_moments: true,
            sufficiency: true,
            state_bits: self.n as f64 * ((self.table.scores.len() + 1) as f64).log2(),
            enumerable: self.n <= self.enum_limit(),
            x_scale: [1.0, 0.0],
        }
    }

    fn count_law(&self) -> &CountLaw {
        &self.law
    }

    fn sample(&self, rng: &mut SimRng) -> Vec<i16> {
        (0..self.n)
            .map(|_| {
                if rng.random_bool(self.q) {
                    self.table.draw(rng) as i16
                } else {
                    MISS
                }
            })
            .collect()
    }

    fn sample_given_count(&self, count: usize, rng: &mut SimRng) -> Option<Vec<i16>> {
        if count > self.n {
            return None;
        }
        let miss = random_subset(self.n, count, rng);
        Some(
            miss.into_iter()
                .map(|m| if m == 1 { MISS } else { self.table.draw(rng) as i16 })
                .collect(),
        )
    }

    fn count(&self, cfg: &Vec<i16>) -> usize {
        cfg.iter().filter(|&&d| d == MISS).count()
    }

    fn observe(&self, cfg: &Vec<i16>) -> Obs {
        let s: f64 = cfg.iter().map(|&d| self.score(d)).sum();
        Obs {
            w: [s / (self.n as f64).sqrt(), 0.0],
            y: self.law.y_of(self.count(cfg)),
        }
    }

    fn for_each_move(&self, cfg: &Vec<i16>, f: &mut dyn FnMut(Move)) {
        let nf = self.n as f64;
        let rt = nf.sqrt();
        let p = 1.0 - self.q;
        for &d in cfg {
            let old = self.score(d);
            if d != MISS {
                f(Move {
                    prob: p / nf,
                    dw: [-old / rt, 0.0],
                    dy: 1,
                });
            }
            for (j, &w) in self.table.weights.iter().enumerate() {
                if d == j as i16 {
                    continue;
                }
                f(Move {
                    prob: self.q * w / nf,
                    dw: [(self.table.scores[j] - old) / rt, 0.0],
                    dy: if d == MISS { -1 } else { 0 },
                });
            }
        }
    }

    fn step(&self, cfg: &mut Vec<i16>, rng: &mut SimRng) {
        let i = rng.random_range(0..self.n);
        cfg[i] = if rng.random_bool(self.q) {
            self.table.draw(rng) as i16
        } else {
            MISS
        };
    }

    fn analytic_moments(&self, cfg: &Vec<i16>) -> Option<MomentProfile> {
        let nf = self.n as f64;
        let (p, q) = (1.0 - self.q, self.q);
        let obs = self.observe(cfg);
        let w = obs.w[0];
        let misses = self.count(cfg) as f64;
        let hits_s2: f64 = cfg.iter().map(|&d| self.score(d).powi(2)).sum();
        let sw = self.table.second_moment();
        let hits = nf - misses;
        Some(MomentProfile {
            dim: 1,
            w: obs.w,
            y: obs.y,
            m0_plus: p * hits / nf,
            m0_minus: q * misses / nf,
            m1_plus: [-p * w / nf, 0.0],
            m1_minus: [0.0, 0.0],
            m2_plus: diag2(p * hits_s2 / (nf * nf), 0.0),
            m2_minus: diag2(q * misses * sw / (nf * nf), 0.0),
            m1_stay: [-q * w / nf, 0.0],
            m2_stay: diag2(q * (hits * sw + hits_s2) / (nf * nf), 0.0),
            ..Default::default()
        })
    }

    fn conditional_w(&self, count: usize) -> Option<CondMoments> {
        let nf = self.n as f64;
        Some(CondMoments {
            mean: [0.0, 0.0],
            cov: diag2((nf - count as f64) / (nf * self.q), 0.0),
        })
    }

    fn for_each_config(&self, f: &mut dyn FnMut(f64, &Vec<i16>)) -> Result<()> {
        let limit = self.enum_limit();
        if self.n > limit {
            return Err(Error::Budget {
                what: "darts",
                value: self.n,
                limit,
            });
        }
        let base = self.table.scores.len() + 1;
        let mut cfg = vec![MISS; self.n];
        for mut code in 0..base.pow(self.n as u32) {
            let mut w = 1.0;
            for d in cfg.iter_mut() {
                let c = code % base;
                code /= base;
                if c == 0 {
                    *d = MISS;
                    w *= 1.0 - self.q;
                } else {
                    *d = (c - 1) as i16;
                    w *= self.q * self.table.weights[c - 1];
                }
            }
            f(w, &cfg);
        }
        Ok(())
    }
}

/// Signs `S_i = ±1` and hit bits `V_i ~ Bernoulli(1/2)`;
/// `X = (Σ S_i V̄_i, Σ S_i)`, `W = (X_1 / sqrt(n/4), X_2 / sqrt(n))`,
/// `Y = Σ V_i - n/2`.
#[derive(Clone, Debug)]
pub struct MultiDarts {
    pub n: usize,
    law: CountLaw,
    constants: PairConstants,
}

pub const MAX_ENUM_MULTI: usize = 10;

impl MultiDarts {
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(invalid("multivariate darts needs n >= 2"));
        }
        let nf = n as f64;
        let lambda = 1.0 / nf;
        let sigma_y2 = nf / 4.0;
        let constants = PairConstants {
            lambda,
            q: lambda * sigma_y2,
            sigma_y2,
            psi: diag2(0.5, 0.5),
            psi_plus: [[0.25, -0.25], [-0.25, 0.25]],
            psi_minus: [[0.25, 0.25], [0.25, 0.25]],
            a_plus: 0.5,
            a_minus: 0.5,
            b_plus: [0.0, 0.0],
            b_minus: [0.0, 0.0],
        };
        Ok(MultiDarts {
            n,
            law: CountLaw::binomial(n, 0.5),
            constants,
        })
    }

    fn scales(&self) -> [f64; 2] {
        let nf = self.n as f64;
        [(nf / 4.0).sqrt(), nf.sqrt()]
    }

    fn contribution(s: i8, v: u8) -> [f64; 2] {
        let s = s as f64;
        [s * (v as f64 - 0.5), s]
    }
}

impl PairModel for MultiDarts {
    /// `(S_i, V_i)` per dart.
    type Config = Vec<(i8, u8)>;

    fn name(&self) -> &'static str {
        "multi-darts"
    }

    fn dim(&self) -> usize {
        2
    }

    fn constants(&self) -> &PairConstants {
        &self.constants
    }

    fn contract(&self) -> Contract {
        Contract {
            model: self.name().into(),
            dim: 2,
            lattice: self.law.lattice(),
            constants: self.constants.clone(),
            case: PairCase::Split,
            analytic_moments: false,
            sufficiency: true,
            state_bits: 2.0 * self.n as f64,
            enumerable: self.n <= MAX_ENUM_MULTI,
            x_scale: self.scales(),
        }
    }

    fn count_law(&self) -> &CountLaw {
        &self.law
    }

    fn sample(&self, rng: &mut SimRng) -> Self::Config {
        (0..self.n)
            .map(|_| {
                let s = if rng.random_bool(0.5) { 1 } else { -1 };
                (s, rng.random_bool(0.5) as u8)
            })
            .collect()
    }

    fn sample_given_count(&self, count: usize, rng: &mut SimRng) -> Option<Self::Config> {
        if count > self.n {
            return None;
        }
        let v = random_subset(self.n, count, rng);
        Some(
            v.into_iter()
                .map(|b| (if rng.random_bool(0.5) { 1 } else { -1 }, b))
                .collect(),
        )
    }

    fn count(&self, cfg: &Self::Config) -> usize {
        cfg.iter().filter(|d| d.1 == 1).count()
    }

    fn observe(&self, cfg: &Self::Config) -> Obs {
        let mut x = [0.0; 2];
        for &(s, v) in cfg {
            let c = Self::contribution(s, v);
            x[0] += c[0];
            x[1] += c[1];
        }
        let sc = self.scales();
        Obs {
            w: [x[0] / sc[0], x[1] / sc[1]],
            y: self.law.y_of(self.count(cfg)),
        }
    }

    fn for_each_move(&self, cfg: &Self::Config, f: &mut dyn FnMut(Move)) {
        let nf = self.n as f64;
        let sc = self.scales();
        for &(s, v) in cfg {
            let old = Self::contribution(s, v);
            for s2 in [-1i8, 1] {
                for v2 in [0u8, 1] {
                    if s2 == s && v2 == v {
                        continue;
                    }
                    let new = Self::contribution(s2, v2);
                    f(Move {
                        prob: 0.25 / nf,
                        dw: [(new[0] - old[0]) / sc[0], (new[1] - old[1]) / sc[1]],
                        dy: v2 as i8 - v as i8,
                    });
                }
            }
        }
    }

    fn step(&self, cfg: &mut Self::Config, rng: &mut SimRng) {
        let i = rng.random_range(0..self.n);
        cfg[i] = (
            if rng.random_bool(0.5) { 1 } else { -1 },
            rng.random_bool(0.5) as u8,
        );
    }

    fn conditional_w(&self, count: usize) -> Option<CondMoments> {
        let c = 2.0 * self.law.y_of(count) / self.n as f64;
        let mut cov = ZERO22;
        cov[0][0] = 1.0;
        cov[1][1] = 1.0;
        cov[0][1] = c;
        cov[1][0] = c;
        Some(CondMoments {
            mean: [0.0, 0.0],
            cov,
        })
    }

    fn for_each_config(&self, f: &mut dyn FnMut(f64, &Self::Config)) -> Result<()> {
        if self.n > MAX_ENUM_MULTI {
            return Err(Error::Budget {
                what: "multivariate darts",
                value: self.n,
                limit: MAX_ENUM_MULTI,
            });
        }
        let w = 0.25f64.powi(self.n as i32);
        let mut cfg = vec![(1i8, 0u8); self.n];
        for code in 0u64..(1u64 << (2 * self.n)) {
            for (i, d) in cfg.iter_mut().enumerate() {
                *d = (
                    if (code >> (2 * i)) & 1 == 1 { 1 } else { -1 },
                    ((code >> (2 * i + 1)) & 1) as u8,
                );
            }
            f(w, &cfg);
        }
        Ok(())
    }
}
