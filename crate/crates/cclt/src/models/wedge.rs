//! Centred wedge count of `G(n, p)` given the number of edges.

use rand::Rng;

use crate::core::{diag2, Contract, CountLaw, MomentProfile, PairCase, PairConstants};
use crate::error::{invalid, Error, Result};
use crate::models::graph::{choose, edge_list, Graph};
use crate::models::{check_prob, CondMoments, Move, Obs, PairModel};
use crate::rng::SimRng;

/// Largest vertex count enumerated exhaustively (`2^28` graphs).
pub const MAX_ENUM_VERTICES: usize = 8;

/// `X = Ũ = U - 2(n-2)pY - N(n-2)p²`, `Y = E - Np`, `W = X / σ_X` with
/// `σ_X² = N(n-2)p²q²` and `N = C(n,2)`.
#[derive(Clone, Debug)]
pub struct WedgeEdge {
    pub n: usize,
    pub p: f64,
    law: CountLaw,
    sigma_x: f64,
    constants: PairConstants,
}

impl WedgeEdge {
    pub fn new(n: usize, p: f64) -> Result<Self> {
        check_prob("p", p)?;
        if n < 4 {
            return Err(invalid("graph models need n >= 4"));
        }
        let q = 1.0 - p;
        let big = n * (n - 1) / 2;
        let bf = big as f64;
        let sigma_x = (bf * (n - 2) as f64).sqrt() * p * q;
        let b_plus = -2.0 * (n - 2) as f64 * p * q / sigma_x;
        Ok(WedgeEdge {
            n,
            p,
            law: CountLaw::binomial(big, p),
            sigma_x,
            constants: PairConstants::scalar(1.0 / bf, bf * p * q, 2.0, p, b_plus),
        })
    }

    pub fn slots(&self) -> usize {
        self.n * (self.n - 1) / 2
    }

    pub fn sigma_x(&self) -> f64 {
        self.sigma_x
    }

    /// Exact `E(U | E = m)` and `E(U² | E = m)` under `G(n, m)`.
    pub fn wedge_moments_given_edges(n: usize, m: usize) -> (f64, f64) {
        let big = (n * (n - 1) / 2) as f64;
        let falling = |x: f64, k: usize| (0..k).fold(1.0, |a, i| a * (x - i as f64));
        let ratio = |k: usize| {
            let den = falling(big, k);
            if den == 0.0 {
                0.0
            } else {
                falling(m as f64, k) / den
            }
        };
        let slots = n as f64 * choose(n - 1, 2);
        let shared = big * 2.0 * (n as f64 - 2.0) * (2.0 * n as f64 - 5.0);
        let mean = slots * ratio(2);
        let second = slots * ratio(2) + shared * ratio(3) + (slots * slots - slots - shared) * ratio(4);
        (mean, second)
    }

    /// One step of the edge-swap chain: two uniform slots exchange their
    /// states. It preserves `E`, hence every `G(n, m)` law.
    pub fn swap_step(&self, g: &mut Graph, rng: &mut SimRng) {
        let list = edge_list(self.n);
        let a = list[rng.random_range(0..list.len())];
        let b = list[rng.random_range(0..list.len())];
        let (ha, hb) = (g.has(a.0, a.1), g.has(b.0, b.1));
        if ha != hb {
            g.set(a.0, a.1, hb);
            g.set(b.0, b.1, ha);
        }
    }
}

pub(crate) fn enumerate_graphs(
    n: usize,
    p: f64,
    f: &mut dyn FnMut(f64, &Graph),
) -> Result<()> {
    if n > MAX_ENUM_VERTICES {
        return Err(Error::Budget {
            what: "graph vertices",
            value: n,
            limit: MAX_ENUM_VERTICES,
        });
    }
    let big = n * (n - 1) / 2;
    for mask in 0u64..(1u64 << big) {
        let g = Graph::from_mask(n, mask);
        let e = g.edges() as i32;
        f(p.powi(e) * (1.0 - p).powi(big as i32 - e), &g);
    }
    Ok(())
}

impl PairModel for WedgeEdge {
    type Config = Graph;

    fn name(&self) -> &'static str {
        "wedge-edge"
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
            state_bits: self.slots() as f64,
            enumerable: self.n <= MAX_ENUM_VERTICES,
            x_scale: [self.sigma_x, 0.0],
        }
    }

    fn count_law(&self) -> &CountLaw {
        &self.law
    }

    fn sample(&self, rng: &mut SimRng) -> Graph {
        Graph::random(self.n, self.p, rng)
    }

    fn sample_given_count(&self, count: usize, rng: &mut SimRng) -> Option<Graph> {
        (count <= self.slots()).then(|| Graph::random_m(self.n, count, rng))
    }

    fn count(&self, g: &Graph) -> usize {
        g.edges()
    }

    fn observe(&self, g: &Graph) -> Obs {
        Obs {
            w: [g.centred_wedges(self.p) / self.sigma_x, 0.0],
            y: self.law.y_of(g.edges()),
        }
    }

    fn for_each_move(&self, g: &Graph, f: &mut dyn FnMut(Move)) {
        let bf = self.slots() as f64;
        for (i, j) in edge_list(self.n) {
            let du = g.flip_deltas(i, j, self.p)[1];
            if g.has(i, j) {
                f(Move {
                    prob: (1.0 - self.p) / bf,
                    dw: [du / self.sigma_x, 0.0],
                    dy: -1,
                });
            } else {
                f(Move {
                    prob: self.p / bf,
                    dw: [du / self.sigma_x, 0.0],
                    dy: 1,
                });
            }
        }
    }

    fn step(&self, g: &mut Graph, rng: &mut SimRng) {
        let list = edge_list(self.n);
        let (i, j) = list[rng.random_range(0..list.len())];
        g.set(i, j, rng.random_bool(self.p));
    }

    /// Closed-form drift; second moments from degree statistics with
    /// `a_v = d_v - p(n-2)`.
    fn analytic_moments(&self, g: &Graph) -> Option<MomentProfile> {
        let (p, q) = (self.p, 1.0 - self.p);
        let bf = self.slots() as f64;
        let m = (self.n - 2) as f64;
        let obs = self.observe(g);
        let (x, y) = (obs.w[0] * self.sigma_x, obs.y);
        let a: Vec<f64> = (0..self.n).map(|v| g.degree(v) as f64 - p * m).collect();
        let s1: f64 = a.iter().sum();
        let s2: f64 = a.iter().map(|v| v * v).sum();
        let mut present = 0.0;
        let mut removal = 0.0;
        for (i, j) in edge_list(self.n) {
            if g.has(i, j) {
                let s = a[i] + a[j];
                present += s * s;
                removal += (s - 2.0) * (s - 2.0);
            }
        }
        let sx2 = self.sigma_x * self.sigma_x;
        let e = g.edges() as f64;
        Some(MomentProfile {
            dim: 1,
            w: obs.w,
            y,
            m0_plus: p * (bf - e) / bf,
            m0_minus: q * e / bf,
            m1_plus: [-(2.0 * p * x - 2.0 * m * p * q * y) / (bf * self.sigma_x), 0.0],
            m1_minus: [-(2.0 * q * x + 2.0 * m * p * q * y) / (bf * self.sigma_x), 0.0],
            m2_plus: diag2(p * (m * s2 + s1 * s1 - present) / (bf * sx2), 0.0),
            m2_minus: diag2(q * removal / (bf * sx2), 0.0),
            ..Default::default()
        })
    }

    fn conditional_w(&self, count: usize) -> Option<CondMoments> {
        let (mean_u, second) = Self::wedge_moments_given_edges(self.n, count);
        let (p, m) = (self.p, (self.n - 2) as f64);
        let y = self.law.y_of(count);
        let bf = self.slots() as f64;
        let mean_x = mean_u - 2.0 * m * p * y - bf * m * p * p;
        let var = (second - mean_u * mean_u).max(0.0);
        Some(CondMoments {
            mean: [mean_x / self.sigma_x, 0.0],
            cov: diag2(var / (self.sigma_x * self.sigma_x), 0.0),
        })
    }

    fn for_each_config(&self, f: &mut dyn FnMut(f64, &Graph)) -> Result<()> {
        enumerate_graphs(self.n, self.p, f)
    }
}
