//! Concrete exchangeable-pair models.
//!
//! Every model exposes its configuration type, exact and conditional
//! samplers, the finite list of one-step proposals of its Glauber chain, and
//! (where a closed form exists) analytic conditional moments.

use crate::core::{Contract, CountLaw, Mat2, MomentProfile, PairConstants, Vec2};
use crate::error::{Error, Result};
use crate::rng::SimRng;

pub mod binary;
pub mod darts;
pub mod graph;
pub mod subgraph;
pub mod toy;
pub mod triangle;
pub mod urn;
pub mod wedge;

pub use binary::{EvenOdd11, Pattern01};
pub use darts::{Darts, MultiDarts, ScoreTable};
pub use subgraph::{SubgraphModel, SubgraphSpec};
pub use toy::Toy;
pub use triangle::TriangleWedge;
pub use urn::Urn;
pub use wedge::WedgeEdge;

/// Observed pair `(W, Y)`, with `W` normalised to unit variance per coordinate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Obs {
    pub w: Vec2,
    pub y: f64,
}

/// One proposal of the chain: probability, change of `W`, change of `Y`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Move {
    pub prob: f64,
    pub dw: Vec2,
    pub dy: i8,
}

/// Conditional mean and covariance of `W` given the count.
#[derive(Clone, Copy, Debug)]
pub struct CondMoments {
    pub mean: Vec2,
    pub cov: Mat2,
}

pub trait PairModel: Send + Sync {
    type Config: Clone + Send + Sync;

    fn name(&self) -> &'static str;
    fn dim(&self) -> usize;
    fn constants(&self) -> &PairConstants;
    fn contract(&self) -> Contract;
    fn count_law(&self) -> &CountLaw;

    fn sample(&self, rng: &mut SimRng) -> Self::Config;

    /// Exact draw from the law given the count; `None` when the model has no
    /// sufficient-statistic sampler.
    fn sample_given_count(&self, _count: usize, _rng: &mut SimRng) -> Option<Self::Config> {
        None
    }

    /// One rejection attempt at hitting `target`.
    fn rejection_candidate(&self, target: usize, rng: &mut SimRng) -> Option<Self::Config> {
        let c = self.sample(rng);
        (self.count(&c) == target).then_some(c)
    }

    fn count(&self, cfg: &Self::Config) -> usize;
    fn observe(&self, cfg: &Self::Config) -> Obs;

    /// Every proposal that changes the configuration. The remaining
    /// probability mass leaves it unchanged.
    fn for_each_move(&self, cfg: &Self::Config, f: &mut dyn FnMut(Move));

    /// One Glauber step in place.
    fn step(&self, cfg: &mut Self::Config, rng: &mut SimRng);

    fn analytic_moments(&self, _cfg: &Self::Config) -> Option<MomentProfile> {
        None
    }

    /// `R0±` in the form the model declares (default `∓λ a± Y`).
    fn declared_r0(&self, cfg: &Self::Config) -> [f64; 2] {
        let c = self.constants();
        let y = self.observe(cfg).y;
        [-c.lambda * c.a_plus * y, c.lambda * c.a_minus * y]
    }

    fn conditional_w(&self, _count: usize) -> Option<CondMoments> {
        None
    }

    /// Visits every configuration with its probability.
    fn for_each_config(&self, _f: &mut dyn FnMut(f64, &Self::Config)) -> Result<()> {
        Err(Error::NotEnumerable(self.name().to_string()))
    }
}

pub(crate) fn check_prob(name: &str, p: f64) -> Result<()> {
    if p > 0.0 && p < 1.0 {
        Ok(())
    } else {
        Err(crate::error::invalid(format!("{name} = {p} must lie in (0,1)")))
    }
}

/// Uniformly random `m`-subset of `0..n` as a 0/1 vector.
pub(crate) fn random_subset(n: usize, m: usize, rng: &mut SimRng) -> Vec<u8> {
    let mut bits = vec![0u8; n];
    if m * 2 <= n {
        for i in rand::seq::index::sample(rng, n, m) {
            bits[i] = 1;
        }
    } else {
        bits.iter_mut().for_each(|b| *b = 1);
        for i in rand::seq::index::sample(rng, n, n - m) {
            bits[i] = 0;
        }
    }
    bits
}
