//! Sum of Rademacher summands plus a centred perturbation driven by the
//! Bernoulli bits that make up `Y`.

use rand::Rng;

use crate::core::{diag2, Contract, CountLaw, MomentProfile, PairCase, PairConstants};
use crate::error::{invalid, Result};
use crate::models::{check_prob, random_subset, Move, Obs, PairModel};
use crate::rng::SimRng;

/// `ξ_i = X_i + ε_i ω̄_i` with `X_i = ±1`, `ω_i ~ Bernoulli(p)`, `Σ ε_i = 0`;
/// `W = Σ ξ_i / σ_W`, `Y = Σ ω_i - np`.
///
/// The chain resamples `(X_i, ω_i)` at a uniform site. `Y` moves at rate
/// `λ = 1/n`, while `W` relaxes at rate `2pq/n` along the moves that change
/// `Y`; this is recorded as `ψ = 2pq`.
#[derive(Clone, Debug)]
pub struct Toy {
    pub n: usize,
    pub p: f64,
    pub eps: Vec<f64>,
    law: CountLaw,
    sigma_w: f64,
    constants: PairConstants,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ToyState {
    pub x: Vec<i8>,
    pub omega: Vec<u8>,
}

impl Toy {
    pub fn new(p: f64, eps: Vec<f64>) -> Result<Self> {
        check_prob("p", p)?;
        let n = eps.len();
        if n < 2 {
            return Err(invalid("toy model needs at least two sites"));
        }
        let total: f64 = eps.iter().sum();
        let scale = eps.iter().fold(1.0f64, |m, e| m.max(e.abs()));
        if total.abs() > 1e-9 * scale * n as f64 {
            return Err(invalid(format!("perturbations must sum to 0 (sum = {total})")));
        }
        let q = 1.0 - p;
        let nf = n as f64;
        let sigma_w = (nf + p * q * eps.iter().map(|e| e * e).sum::<f64>()).sqrt();
        Ok(Toy {
            n,
            p,
            eps,
            law: CountLaw::binomial(n, p),
            sigma_w,
            constants: PairConstants::scalar(1.0 / nf, nf * p * q, 2.0 * p * q, 0.5, 0.0),
        })
    }

    /// Alternating perturbation `ε_i = ±amplitude`; `n` must be even.
    pub fn alternating(n: usize, p: f64, amplitude: f64) -> Result<Self> {
        if n % 2 == 1 {
            return Err(invalid("alternating perturbation needs an even n"));
        }
        Toy::new(
            p,
            (0..n)
                .map(|i| if i % 2 == 0 { amplitude } else { -amplitude })
                .collect(),
        )
    }

    pub fn sigma_w(&self) -> f64 {
        self.sigma_w
    }

    /// Rate at which `W` relaxes along `Y`-changing moves.
    pub fn w_rate(&self) -> f64 {
        2.0 * self.p * (1.0 - self.p) / self.n as f64
    }

    fn xi(&self, i: usize, x: i8, omega: u8) -> f64 {
        x as f64 + self.eps[i] * (omega as f64 - self.p)
    }
}

impl PairModel for Toy {
    type Config = ToyState;

    fn name(&self) -> &'static str {
        "toy"
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
            case: PairCase::Split,
            analytic_moments: true,
            sufficiency: true,
            state_bits: 2.0 * self.n as f64,
            enumerable: self.n <= 11,
            x_scale: [self.sigma_w, 0.0],
        }
    }

    fn count_law(&self) -> &CountLaw {
        &self.law
    }

    fn sample(&self, rng: &mut SimRng) -> ToyState {
        ToyState {
            x: (0..self.n)
                .map(|_| if rng.random_bool(0.5) { 1 } else { -1 })
                .collect(),
            omega: (0..self.n).map(|_| rng.random_bool(self.p) as u8).collect(),
        }
    }

    fn sample_given_count(&self, count: usize, rng: &mut SimRng) -> Option<ToyState> {
        if count > self.n {
            return None;
        }
        let omega = random_subset(self.n, count, rng);
        let x = (0..self.n)
            .map(|_| if rng.random_bool(0.5) { 1 } else { -1 })
            .collect();
        Some(ToyState { x, omega })
    }

    fn count(&self, cfg: &ToyState) -> usize {
        cfg.omega.iter().filter(|&&b| b == 1).count()
    }

    fn observe(&self, cfg: &ToyState) -> Obs {
        let s: f64 = (0..self.n)
            .map(|i| self.xi(i, cfg.x[i], cfg.omega[i]))
            .sum();
        Obs {
            w: [s / self.sigma_w, 0.0],
            y: self.law.y_of(self.count(cfg)),
        }
    }

    fn for_each_move(&self, cfg: &ToyState, f: &mut dyn FnMut(Move)) {
        let nf = self.n as f64;
        for i in 0..self.n {
            let old = self.xi(i, cfg.x[i], cfg.omega[i]);
            for x in [-1i8, 1] {
                for omega in [0u8, 1] {
                    if x == cfg.x[i] && omega == cfg.omega[i] {
                        continue;
                    }
                    let pw = if omega == 1 { self.p } else { 1.0 - self.p };
                    f(Move {
                        prob: 0.5 * pw / nf,
                        dw: [(self.xi(i, x, omega) - old) / self.sigma_w, 0.0],
                        dy: omega as i8 - cfg.omega[i] as i8,
                    });
                }
            }
        }
    }

    fn step(&self, cfg: &mut ToyState, rng: &mut SimRng) {
        let i = rng.random_range(0..self.n);
        cfg.x[i] = if rng.random_bool(0.5) { 1 } else { -1 };
        cfg.omega[i] = rng.random_bool(self.p) as u8;
    }

    fn analytic_moments(&self, cfg: &ToyState) -> Option<MomentProfile> {
        let (nf, p) = (self.n as f64, self.p);
        let q = 1.0 - p;
        let s = self.sigma_w;
        let obs = self.observe(cfg);
        let (mut zeros, mut m1p, mut m1m, mut m2p, mut m2m) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for i in 0..self.n {
            let (e, x) = (self.eps[i], cfg.x[i] as f64);
            if cfg.omega[i] == 0 {
                zeros += 1.0;
                m1p += e - x;
                m2p += 1.0 + (e - x) * (e - x);
            } else {
                m1m += -e - x;
                m2m += 1.0 + (e + x) * (e + x);
            }
        }
        Some(MomentProfile {
            dim: 1,
            w: obs.w,
            y: obs.y,
            m0_plus: p * zeros / nf,
            m0_minus: q * (nf - zeros) / nf,
            m1_plus: [p * m1p / (nf * s), 0.0],
            m1_minus: [q * m1m / (nf * s), 0.0],
            m2_plus: diag2(p * m2p / (nf * s * s), 0.0),
            m2_minus: diag2(q * m2m / (nf * s * s), 0.0),
            ..Default::default()
        })
    }

    /// `M0+ - Q = -pY/n` and `M0- - Q = qY/n`.
    fn declared_r0(&self, cfg: &ToyState) -> [f64; 2] {
        let y = self.law.y_of(self.count(cfg));
        let nf = self.n as f64;
        [-self.p * y / nf, (1.0 - self.p) * y / nf]
    }

    fn for_each_config(&self, f: &mut dyn FnMut(f64, &ToyState)) -> Result<()> {
        let n = self.n;
        if n > 11 {
            return Err(crate::Error::Budget {
                what: "toy sites",
                value: n,
                limit: 11,
            });
        }
        let mut st = ToyState {
            x: vec![0; n],
            omega: vec![0; n],
        };
        for mask in 0u64..(1u64 << (2 * n)) {
            let mut w = 1.0;
            for i in 0..n {
                st.x[i] = if (mask >> (2 * i)) & 1 == 1 { 1 } else { -1 };
                st.omega[i] = ((mask >> (2 * i + 1)) & 1) as u8;
                w *= 0.5 * if st.omega[i] == 1 { self.p } else { 1.0 - self.p };
            }
            f(w, &st);
        }
        Ok(())
    }
}
