//! Centred triangle and wedge counts of `G(n, p)` jointly, given the number
//! of edges.

use rand::Rng;

use crate::core::{Contract, CountLaw, PairCase, PairConstants};
use crate::error::{invalid, Result};
use crate::models::graph::{choose, edge_list, Graph};
use crate::models::wedge::{enumerate_graphs, MAX_ENUM_VERTICES};
use crate::models::{check_prob, Move, Obs, PairModel};
use crate::rng::SimRng;

/// `X = (T̃, Ũ)` with `σ_T̃² = C(n,3)(pq)³` and `σ_Ũ² = N(n-2)(pq)²`;
/// `W = (T̃/σ_T̃, Ũ/σ_Ũ)`.
///
/// Drift in `X` units: `Ψ+ = ((3p, -pq), (0, 2p))`,
/// `Ψ- = ((3q, pq), (0, 2q))`, `b± = (0, ∓2(n-2)pq)`.
#[derive(Clone, Debug)]
pub struct TriangleWedge {
    pub n: usize,
    pub p: f64,
    law: CountLaw,
    sigma: [f64; 2],
    constants: PairConstants,
}

impl TriangleWedge {
    pub fn new(n: usize, p: f64) -> Result<Self> {
        check_prob("p", p)?;
        if n < 4 {
            return Err(invalid("graph models need n >= 4"));
        }
        let q = 1.0 - p;
        let pq = p * q;
        let big = n * (n - 1) / 2;
        let bf = big as f64;
        let m = (n - 2) as f64;
        let sigma = [
            (choose(n, 3) * pq.powi(3)).sqrt(),
            (bf * m).sqrt() * pq,
        ];
        // Conjugate the X-unit drift matrices by diag(σ) to get W units.
        let conj = |x: [[f64; 2]; 2]| {
            let mut out = x;
            for (i, row) in out.iter_mut().enumerate() {
                for (j, v) in row.iter_mut().enumerate() {
                    *v *= sigma[j] / sigma[i];
                }
            }
            out
        };
        let psi_plus = conj([[3.0 * p, -pq], [0.0, 2.0 * p]]);
        let psi_minus = conj([[3.0 * q, pq], [0.0, 2.0 * q]]);
        let bu = 2.0 * m * pq / sigma[1];
        let constants = PairConstants {
            lambda: 1.0 / bf,
            q: pq,
            sigma_y2: bf * pq,
            psi: [[3.0, 0.0], [0.0, 2.0]],
            psi_plus,
            psi_minus,
            a_plus: p,
            a_minus: q,
            b_plus: [0.0, -bu],
            b_minus: [0.0, bu],
        };
        Ok(TriangleWedge {
            n,
            p,
            law: CountLaw::binomial(big, p),
            sigma,
            constants,
        })
    }

    pub fn slots(&self) -> usize {
        self.n * (self.n - 1) / 2
    }

    pub fn sigma_x(&self) -> [f64; 2] {
        self.sigma
    }
}

impl PairModel for TriangleWedge {
    type Config = Graph;

    fn name(&self) -> &'static str {
        "triangle-wedge"
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
            state_bits: self.slots() as f64,
            enumerable: self.n <= MAX_ENUM_VERTICES,
            x_scale: self.sigma,
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
            w: [
                g.centred_triangles(self.p) / self.sigma[0],
                g.centred_wedges(self.p) / self.sigma[1],
            ],
            y: self.law.y_of(g.edges()),
        }
    }

    fn for_each_move(&self, g: &Graph, f: &mut dyn FnMut(Move)) {
        let bf = self.slots() as f64;
        for (i, j) in edge_list(self.n) {
            let d = g.flip_deltas(i, j, self.p);
            let dw = [d[0] / self.sigma[0], d[1] / self.sigma[1]];
            if g.has(i, j) {
                f(Move {
                    prob: (1.0 - self.p) / bf,
                    dw,
                    dy: -1,
                });
            } else {
                f(Move {
                    prob: self.p / bf,
                    dw,
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

    fn for_each_config(&self, f: &mut dyn FnMut(f64, &Graph)) -> Result<()> {
        enumerate_graphs(self.n, self.p, f)
    }
}
