//! Balls thrown independently into three urns; `Y` counts the second urn.

use rand::Rng;

use crate::core::{diag2, Contract, CountLaw, MomentProfile, PairCase, PairConstants};
use crate::error::{invalid, Error, Result};
use crate::models::{check_prob, random_subset, CondMoments, Move, Obs, PairModel};
use crate::rng::SimRng;

pub const MAX_ENUM_BALLS: usize = 12;

/// Ball `i` lands in urn `U_i ∈ {1,2,3}` with probabilities `p1, p2, p3`.
/// `Y = V - n p2` with `V = #{U_i = 2}` and
/// `W = sqrt(p1 p3 / ((1-p2) n)) Σ (1{U_i=1}/p1 - 1{U_i=3}/p3)`,
/// which has unit variance.
///
/// Moving a ball out of or into urn 2 has no drift given the rest, so the
/// pair carries the stay-restricted rate `(1-p2)/n`.
#[derive(Clone, Debug)]
pub struct Urn {
    pub n: usize,
    pub probs: [f64; 3],
    law: CountLaw,
    scale: f64,
    constants: PairConstants,
}

impl Urn {
    pub fn new(n: usize, p1: f64, p2: f64) -> Result<Self> {
        check_prob("p1", p1)?;
        check_prob("p2", p2)?;
        if p1 + p2 >= 1.0 {
            return Err(invalid("urn probabilities need p1 + p2 < 1"));
        }
        if n == 0 {
            return Err(invalid("urn model needs n >= 1"));
        }
        let p3 = 1.0 - p1 - p2;
        let nf = n as f64;
        Ok(Urn {
            n,
            probs: [p1, p2, p3],
            law: CountLaw::binomial(n, p2),
            scale: (p1 * p3 / ((1.0 - p2) * nf)).sqrt(),
            constants: PairConstants::scalar(1.0 / nf, nf * p2 * (1.0 - p2), p2, 1.0, 0.0),
        })
    }

    pub fn lambda0(&self) -> f64 {
        (1.0 - self.probs[1]) / self.n as f64
    }

    fn score(&self, urn: u8) -> f64 {
        match urn {
            0 => 1.0 / self.probs[0],
            2 => -1.0 / self.probs[2],
            _ => 0.0,
        }
    }
}

impl PairModel for Urn {
    /// Urn index per ball, `0..3` for urns 1 to 3.
    type Config = Vec<u8>;

    fn name(&self) -> &'static str {
        "urn"
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
            state_bits: self.n as f64 * 3f64.log2(),
            enumerable: self.n <= MAX_ENUM_BALLS,
            x_scale: [1.0, 0.0],
        }
    }

    fn count_law(&self) -> &CountLaw {
        &self.law
    }

    fn sample(&self, rng: &mut SimRng) -> Vec<u8> {
        let [p1, p2, _] = self.probs;
        (0..self.n)
            .map(|_| {
                let u: f64 = rng.random();
                if u < p1 {
                    0
                } else if u < p1 + p2 {
                    1
                } else {
                    2
                }
            })
            .collect()
    }

    fn sample_given_count(&self, count: usize, rng: &mut SimRng) -> Option<Vec<u8>> {
        if count > self.n {
            return None;
        }
        let [p1, _, p3] = self.probs;
        let first = p1 / (p1 + p3);
        let in2 = random_subset(self.n, count, rng);
        Some(
            in2.into_iter()
                .map(|b| {
                    if b == 1 {
                        1
                    } else if rng.random_bool(first) {
                        0
                    } else {
                        2
                    }
                })
                .collect(),
        )
    }

    fn count(&self, cfg: &Vec<u8>) -> usize {
        cfg.iter().filter(|&&u| u == 1).count()
    }

    fn observe(&self, cfg: &Vec<u8>) -> Obs {
        let s: f64 = cfg.iter().map(|&u| self.score(u)).sum();
        Obs {
            w: [self.scale * s, 0.0],
            y: self.law.y_of(self.count(cfg)),
        }
    }

    fn for_each_move(&self, cfg: &Vec<u8>, f: &mut dyn FnMut(Move)) {
        let nf = self.n as f64;
        for &u in cfg {
            for v in 0..3u8 {
                if v == u {
                    continue;
                }
                let dy = (v == 1) as i8 - (u == 1) as i8;
                f(Move {
                    prob: self.probs[v as usize] / nf,
                    dw: [self.scale * (self.score(v) - self.score(u)), 0.0],
                    dy,
                });
            }
        }
    }

    fn step(&self, cfg: &mut Vec<u8>, rng: &mut SimRng) {
        let i = rng.random_range(0..self.n);
        let u: f64 = rng.random();
        let [p1, p2, _] = self.probs;
        cfg[i] = if u < p1 {
            0
        } else if u < p1 + p2 {
            1
        } else {
            2
        };
    }

    fn analytic_moments(&self, cfg: &Vec<u8>) -> Option<MomentProfile> {
        let [p1, p2, p3] = self.probs;
        let nf = self.n as f64;
        let c = [0usize, 1, 2].map(|u| cfg.iter().filter(|&&x| x == u as u8).count() as f64);
        let obs = self.observe(cfg);
        let w = obs.w[0];
        let s2 = self.scale * self.scale;
        let m2p = p2 / nf * s2 * (c[0] / (p1 * p1) + c[2] / (p3 * p3));
        let m2m = c[1] / nf * s2 * (1.0 / p1 + 1.0 / p3);
        let gap = 1.0 / p1 + 1.0 / p3;
        let m2s = s2 * gap * gap * (p3 * c[0] + p1 * c[2]) / nf;
        Some(MomentProfile {
            dim: 1,
            w: obs.w,
            y: obs.y,
            m0_plus: p2 * (nf - c[1]) / nf,
            m0_minus: (1.0 - p2) * c[1] / nf,
            m1_plus: [-p2 * w / nf, 0.0],
            m1_minus: [0.0, 0.0],
            m2_plus: diag2(m2p, 0.0),
            m2_minus: diag2(m2m, 0.0),
            m1_stay: [-self.lambda0() * w, 0.0],
            m2_stay: diag2(m2s, 0.0),
            ..Default::default()
        })
    }

    fn conditional_w(&self, count: usize) -> Option<CondMoments> {
        let (nf, v) = (self.n as f64, count as f64);
        Some(CondMoments {
            mean: [0.0, 0.0],
            cov: diag2((nf - v) / (nf * (1.0 - self.probs[1])), 0.0),
        })
    }

    fn for_each_config(&self, f: &mut dyn FnMut(f64, &Vec<u8>)) -> Result<()> {
        if self.n > MAX_ENUM_BALLS {
            return Err(Error::Budget {
                what: "urn balls",
                value: self.n,
                limit: MAX_ENUM_BALLS,
            });
        }
        let mut cfg = vec![0u8; self.n];
        let total = 3usize.pow(self.n as u32);
        for mut code in 0..total {
            let mut w = 1.0;
            for u in cfg.iter_mut() {
                *u = (code % 3) as u8;
                code /= 3;
                w *= self.probs[*u as usize];
            }
            f(w, &cfg);
        }
        Ok(())
    }
}
