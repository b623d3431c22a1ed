//! Cyclic binary sequences: the `01`-pattern count given the number of ones,
//! and the odd/even `11`-pattern difference for a two-species sequence.

use rand::Rng;
use rand_distr::{Binomial, Distribution};

use crate::core::{
    diag2, Contract, CountLaw, MomentProfile, PairCase, PairConstants, ZERO2, ZERO22,
};
use crate::error::{Error, Result};
use crate::models::{check_prob, random_subset, CondMoments, Move, Obs, PairModel};
use crate::rng::SimRng;

/// Largest sequence length visited exhaustively.
pub const MAX_ENUM_BITS: usize = 22;

fn for_each_sequence(
    n: usize,
    weight: impl Fn(&[u8]) -> f64,
    f: &mut dyn FnMut(f64, &Vec<u8>),
) -> Result<()> {
    if n > MAX_ENUM_BITS {
        return Err(Error::Budget {
            what: "sequence length",
            value: n,
            limit: MAX_ENUM_BITS,
        });
    }
    let mut bits = vec![0u8; n];
    for mask in 0u64..(1u64 << n) {
        for (i, b) in bits.iter_mut().enumerate() {
            *b = ((mask >> i) & 1) as u8;
        }
        f(weight(&bits), &bits);
    }
    Ok(())
}

/// Number of cyclic `01` patterns.
pub fn count_01(bits: &[u8]) -> usize {
    let n = bits.len();
    (0..n)
        .filter(|&i| bits[i] == 0 && bits[(i + 1) % n] == 1)
        .count()
}

/// `U` = number of `01`'s, `V` = number of ones, `Y = V - np`,
/// `X = U - (1-2p)Y - npq = -Σ ω̄_i ω̄_{i+1}`, `W = X / sqrt(n) pq`.
#[derive(Clone, Debug)]
pub struct Pattern01 {
    pub n: usize,
    pub p: f64,
    law: CountLaw,
    sigma_x: f64,
    constants: PairConstants,
}

impl Pattern01 {
    pub fn new(n: usize, p: f64) -> Result<Self> {
        check_prob("p", p)?;
        if n < 4 {
            return Err(crate::error::invalid("pattern01 needs n >= 4"));
        }
        let q = 1.0 - p;
        let nf = n as f64;
        let sigma_x = nf.sqrt() * p * q;
        let constants = PairConstants::scalar(1.0 / nf, nf * p * q, 2.0, p, 2.0 * p * q / sigma_x);
        Ok(Pattern01 {
            n,
            p,
            law: CountLaw::binomial(n, p),
            sigma_x,
            constants,
        })
    }

    pub fn sigma_x(&self) -> f64 {
        self.sigma_x
    }

    /// Raw statistic `X` for a sequence.
    pub fn x_of(&self, bits: &[u8]) -> f64 {
        let ones = bits.iter().filter(|&&b| b == 1).count();
        self.x_from_counts(count_01(bits), ones)
    }

    pub fn x_from_counts(&self, u: usize, ones: usize) -> f64 {
        let (n, p) = (self.n as f64, self.p);
        let y = ones as f64 - n * p;
        u as f64 - (1.0 - 2.0 * p) * y - n * p * (1.0 - p)
    }

    /// Exact `E(U | V = m)` and `Var(U | V = m)` for the cyclic sequence.
    pub fn runs_moments(n: usize, m: usize) -> (f64, f64) {
        if m == 0 || m == n {
            return (0.0, 0.0);
        }
        let (nf, mf) = (n as f64, m as f64);
        let mean = mf * (nf - mf) / (nf - 1.0);
        let var = mf * (mf - 1.0) * (nf - mf) * (nf - mf - 1.0)
            / ((nf - 1.0) * (nf - 1.0) * (nf - 2.0));
        (mean, var)
    }

    fn neighbours(&self, bits: &[u8], i: usize) -> (u8, u8) {
        let n = self.n;
        (bits[(i + n - 1) % n], bits[(i + 1) % n])
    }
}

impl PairModel for Pattern01 {
    type Config = Vec<u8>;

    fn name(&self) -> &'static str {
        "pattern01"
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
            state_bits: self.n as f64,
            enumerable: self.n <= MAX_ENUM_BITS,
            x_scale: [self.sigma_x, 0.0],
        }
    }

    fn count_law(&self) -> &CountLaw {
        &self.law
    }

    fn sample(&self, rng: &mut SimRng) -> Vec<u8> {
        (0..self.n).map(|_| rng.random_bool(self.p) as u8).collect()
    }

    fn sample_given_count(&self, count: usize, rng: &mut SimRng) -> Option<Vec<u8>> {
        (count <= self.n).then(|| random_subset(self.n, count, rng))
    }

    fn count(&self, cfg: &Vec<u8>) -> usize {
        cfg.iter().filter(|&&b| b == 1).count()
    }

    fn observe(&self, cfg: &Vec<u8>) -> Obs {
        let ones = self.count(cfg);
        Obs {
            w: [self.x_from_counts(count_01(cfg), ones) / self.sigma_x, 0.0],
            y: self.law.y_of(ones),
        }
    }

    fn for_each_move(&self, cfg: &Vec<u8>, f: &mut dyn FnMut(Move)) {
        let (nf, p) = (self.n as f64, self.p);
        let c = 1.0 - 2.0 * p;
        for i in 0..self.n {
            let (l, r) = self.neighbours(cfg, i);
            if cfg[i] == 0 {
                let du = (1 - l) as f64 - r as f64;
                f(Move {
                    prob: p / nf,
                    dw: [(du - c) / self.sigma_x, 0.0],
                    dy: 1,
                });
            } else {
                let du = r as f64 - (1 - l) as f64;
                f(Move {
                    prob: (1.0 - p) / nf,
                    dw: [(du + c) / self.sigma_x, 0.0],
                    dy: -1,
                });
            }
        }
    }

    fn step(&self, cfg: &mut Vec<u8>, rng: &mut SimRng) {
        let i = rng.random_range(0..self.n);
        cfg[i] = rng.random_bool(self.p) as u8;
    }

    /// Closed forms for `M0±`, `M1±`, and `M2±` from the neighbourhood
    /// pattern counts `#abc` of a cyclic scan.
    fn analytic_moments(&self, cfg: &Vec<u8>) -> Option<MomentProfile> {
        let (nf, p) = (self.n as f64, self.p);
        let q = 1.0 - p;
        let obs = self.observe(cfg);
        let (x, y) = (obs.w[0] * self.sigma_x, obs.y);
        let mut pat = [0usize; 8];
        for i in 0..self.n {
            let (l, r) = self.neighbours(cfg, i);
            pat[((l as usize) << 2) | ((cfg[i] as usize) << 1) | r as usize] += 1;
        }
        let c = 1.0 - 2.0 * p;
        let s2 = self.sigma_x * self.sigma_x;
        let plus = pat[0b000] as f64 * (1.0 - c).powi(2)
            + (pat[0b001] + pat[0b100]) as f64 * c * c
            + pat[0b101] as f64 * (1.0 + c).powi(2);
        let minus = pat[0b010] as f64 * (c - 1.0).powi(2)
            + (pat[0b011] + pat[0b110]) as f64 * c * c
            + pat[0b111] as f64 * (1.0 + c).powi(2);
        Some(MomentProfile {
            dim: 1,
            w: obs.w,
            y,
            m0_plus: p * q - p * y / nf,
            m0_minus: p * q + q * y / nf,
            m1_plus: [-(2.0 * p * x + 2.0 * p * q * y) / (nf * self.sigma_x), 0.0],
            m1_minus: [-(2.0 * q * x - 2.0 * p * q * y) / (nf * self.sigma_x), 0.0],
            m2_plus: diag2(p * plus / (nf * s2), 0.0),
            m2_minus: diag2(q * minus / (nf * s2), 0.0),
            ..Default::default()
        })
    }

    fn conditional_w(&self, count: usize) -> Option<CondMoments> {
        let (mean_u, var_u) = Self::runs_moments(self.n, count);
        let (n, p) = (self.n as f64, self.p);
        let y = self.law.y_of(count);
        let mean_x = mean_u - (1.0 - 2.0 * p) * y - n * p * (1.0 - p);
        Some(CondMoments {
            mean: [mean_x / self.sigma_x, 0.0],
            cov: diag2(var_u / (self.sigma_x * self.sigma_x), 0.0),
        })
    }

    fn for_each_config(&self, f: &mut dyn FnMut(f64, &Vec<u8>)) -> Result<()> {
        let p = self.p;
        let n = self.n;
        for_each_sequence(
            n,
            |bits| {
                let ones = bits.iter().filter(|&&b| b == 1).count() as i32;
                p.powi(ones) * (1.0 - p).powi(n as i32 - ones)
            },
            f,
        )
    }
}

/// Two-species sequence: site `j` (0-based) is Bernoulli(p) for even `j`
/// and Bernoulli(1-p) for odd `j`. `X = Σ_j (-1)^{j+1} ω_j ω_{j+1}` counts
/// `11`'s starting at even (1-based) positions minus those at odd ones.
#[derive(Clone, Debug)]
pub struct EvenOdd11 {
    pub n: usize,
    pub p: f64,
    law: CountLaw,
    sigma_x: f64,
    constants: PairConstants,
}

impl EvenOdd11 {
    pub fn new(n: usize, p: f64) -> Result<Self> {
        check_prob("p", p)?;
        if n < 4 || n % 2 == 1 {
            return Err(crate::error::invalid("evenodd11 needs an even n >= 4"));
        }
        let q = 1.0 - p;
        let nf = n as f64;
        let half = CountLaw::binomial(n / 2, p);
        let law = half.convolve(&CountLaw::binomial(n / 2, q));
        Ok(EvenOdd11 {
            n,
            p,
            law,
            sigma_x: nf.sqrt() * p * q,
            constants: PairConstants::scalar(1.0 / nf, nf * p * q, 2.0, 0.5, 0.0),
        })
    }

    pub fn sigma_x(&self) -> f64 {
        self.sigma_x
    }

    pub fn site_p(&self, j: usize) -> f64 {
        if j.is_multiple_of(2) {
            self.p
        } else {
            1.0 - self.p
        }
    }

    fn sign(j: usize) -> f64 {
        if j.is_multiple_of(2) {
            -1.0
        } else {
            1.0
        }
    }

    pub fn x_of(&self, bits: &[u8]) -> f64 {
        let n = self.n;
        (0..n)
            .map(|j| Self::sign(j) * (bits[j] * bits[(j + 1) % n]) as f64)
            .sum()
    }

    /// `R2±` in units of `X` through centred-triple sums (`ω̄_j = ω_j - p_j`).
    pub fn r2_centered(&self, bits: &[u8]) -> [f64; 2] {
        let n = self.n;
        let (p, q) = (self.p, 1.0 - self.p);
        let wb = |j: usize| bits[j % n] as f64 - self.site_p(j % n);
        let mut plus = 0.0;
        let mut minus = 0.0;
        for i in 0..n {
            let (l, c, r) = (wb(i + n - 1), wb(i), wb(i + 1));
            let pi = self.site_p(i);
            let qi = 1.0 - pi;
            let common = p * q * (r * r + l * l - 2.0 * p * q) - 2.0 * p * q * l * r;
            plus += common - pi * c * (l * l + r * r) + 2.0 * pi * l * c * r;
            minus += common + qi * c * (l * l + r * r) - 2.0 * qi * l * c * r;
        }
        [plus, minus]
    }
}

impl PairModel for EvenOdd11 {
    type Config = Vec<u8>;

    fn name(&self) -> &'static str {
        "evenodd11"
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
            sufficiency: false,
            state_bits: self.n as f64,
            enumerable: self.n <= MAX_ENUM_BITS,
            x_scale: [self.sigma_x, 0.0],
        }
    }

    fn count_law(&self) -> &CountLaw {
        &self.law
    }

    fn sample(&self, rng: &mut SimRng) -> Vec<u8> {
        (0..self.n)
            .map(|j| rng.random_bool(self.site_p(j)) as u8)
            .collect()
    }

    /// Draws the two per-species counts first and only builds the sequence
    /// when they add up to `target`; same law as plain rejection.
    fn rejection_candidate(&self, target: usize, rng: &mut SimRng) -> Option<Vec<u8>> {
        let h = (self.n / 2) as u64;
        let a = Binomial::new(h, self.p).ok()?.sample(rng) as usize;
        let b = Binomial::new(h, 1.0 - self.p).ok()?.sample(rng) as usize;
        if a + b != target {
            return None;
        }
        let even = random_subset(self.n / 2, a, rng);
        let odd = random_subset(self.n / 2, b, rng);
        Some(
            (0..self.n)
                .map(|j| if j % 2 == 0 { even[j / 2] } else { odd[j / 2] })
                .collect(),
        )
    }

    fn count(&self, cfg: &Vec<u8>) -> usize {
        cfg.iter().filter(|&&b| b == 1).count()
    }

    fn observe(&self, cfg: &Vec<u8>) -> Obs {
        Obs {
            w: [self.x_of(cfg) / self.sigma_x, 0.0],
            y: self.law.y_of(self.count(cfg)),
        }
    }

    fn for_each_move(&self, cfg: &Vec<u8>, f: &mut dyn FnMut(Move)) {
        let n = self.n;
        let nf = n as f64;
        for j in 0..n {
            let l = cfg[(j + n - 1) % n] as f64;
            let r = cfg[(j + 1) % n] as f64;
            let grad = Self::sign(j) * r + Self::sign((j + n - 1) % n) * l;
            let pj = self.site_p(j);
            if cfg[j] == 0 {
                f(Move {
                    prob: pj / nf,
                    dw: [grad / self.sigma_x, 0.0],
                    dy: 1,
                });
            } else {
                f(Move {
                    prob: (1.0 - pj) / nf,
                    dw: [-grad / self.sigma_x, 0.0],
                    dy: -1,
                });
            }
        }
    }

    fn step(&self, cfg: &mut Vec<u8>, rng: &mut SimRng) {
        let j = rng.random_range(0..self.n);
        cfg[j] = rng.random_bool(self.site_p(j)) as u8;
    }

    fn analytic_moments(&self, cfg: &Vec<u8>) -> Option<MomentProfile> {
        let nf = self.n as f64;
        let obs = self.observe(cfg);
        let mut m0p = 0.0;
        let mut m0m = 0.0;
        for (j, &b) in cfg.iter().enumerate() {
            if b == 0 {
                m0p += self.site_p(j);
            } else {
                m0m += 1.0 - self.site_p(j);
            }
        }
        let s2 = self.sigma_x * self.sigma_x;
        let r2 = self.r2_centered(cfg);
        let lam = 1.0 / nf;
        Some(MomentProfile {
            dim: 1,
            w: obs.w,
            y: obs.y,
            m0_plus: m0p / nf,
            m0_minus: m0m / nf,
            m1_plus: [-obs.w[0] / nf, 0.0],
            m1_minus: [-obs.w[0] / nf, 0.0],
            m2_plus: diag2(lam * (2.0 + r2[0] / s2), 0.0),
            m2_minus: diag2(lam * (2.0 + r2[1] / s2), 0.0),
            m1_stay: ZERO2,
            m2_stay: ZERO22,
            ..Default::default()
        })
    }

    /// `M0+ - Q = -(1/n) Σ p_j ω̄_j`, `M0- - Q = (1/n) Σ q_j ω̄_j`; these
    /// reduce to `∓λ Y / 2` only when `p = 1/2`.
    fn declared_r0(&self, cfg: &Vec<u8>) -> [f64; 2] {
        let nf = self.n as f64;
        let mut plus = 0.0;
        let mut minus = 0.0;
        for (j, &b) in cfg.iter().enumerate() {
            let pj = self.site_p(j);
            let wb = b as f64 - pj;
            plus -= pj * wb;
            minus += (1.0 - pj) * wb;
        }
        [plus / nf, minus / nf]
    }

    fn for_each_config(&self, f: &mut dyn FnMut(f64, &Vec<u8>)) -> Result<()> {
        for_each_sequence(
            self.n,
            |bits| {
                bits.iter()
                    .enumerate()
                    .map(|(j, &b)| {
                        let pj = self.site_p(j);
                        if b == 1 {
                            pj
                        } else {
                            1.0 - pj
                        }
                    })
                    .product()
            },
            f,
        )
    }
}
