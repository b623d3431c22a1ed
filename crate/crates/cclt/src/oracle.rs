//! Exhaustive enumeration at small sizes. Binary sequences and graphs are
//! visited in Gray-code order so each step flips one bit or edge and the
//! statistics are updated locally; a fixed stride of checkpoints recomputes
//! them from scratch.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::models::binary::MAX_ENUM_BITS;
use crate::models::graph::{choose, edge_list, Graph};
use crate::models::subgraph::{ext, graph_mask, SubgraphModel, SubgraphSpec};
use crate::models::wedge::MAX_ENUM_VERTICES;
use crate::stats::Neumaier;

/// Low bits enumerated by Gray code inside one block; the remaining high
/// bits index the blocks.
const GRAY_LOW_BITS: usize = 16;
/// Every `CHECKPOINT_STRIDE`-th state is recomputed from scratch.
const CHECKPOINT_STRIDE: u64 = 4099;

fn par_blocks<T: Send>(blocks: u64, f: impl Fn(u64) -> T + Sync + Send) -> Vec<T> {
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..blocks).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..blocks).map(f).collect()
    }
}

fn split(bits: usize) -> (usize, u64) {
    let low = bits.min(GRAY_LOW_BITS);
    (low, 1u64 << (bits - low))
}

/// Which cyclic nearest-neighbour statistic to count.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum BinaryStatistic {
    /// Number of `01` patterns.
    Count01,
    /// `11`'s starting at odd 0-based sites minus those at even sites.
    EvenOdd11,
}

impl BinaryStatistic {
    fn pair(self, i: usize, a: u8, b: u8) -> i64 {
        match self {
            BinaryStatistic::Count01 => (a == 0 && b == 1) as i64,
            BinaryStatistic::EvenOdd11 => {
                let s = if i.is_multiple_of(2) { -1 } else { 1 };
                s * (a & b) as i64
            }
        }
    }

    fn full(self, bits: &[u8]) -> i64 {
        let n = bits.len();
        (0..n).map(|i| self.pair(i, bits[i], bits[(i + 1) % n])).sum()
    }

    /// Contribution of the two pairs that contain site `i`.
    fn local(self, bits: &[u8], i: usize) -> i64 {
        let n = bits.len();
        let l = (i + n - 1) % n;
        self.pair(l, bits[l], bits[i]) + self.pair(i, bits[i], bits[(i + 1) % n])
    }
}

/// Site-level success probabilities of a binary model.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum SiteLaw {
    /// Every site is Bernoulli(p).
    Iid(f64),
    /// Even sites Bernoulli(p), odd sites Bernoulli(1-p).
    Alternating(f64),
}

impl SiteLaw {
    fn weight_table(self, n: usize) -> Vec<Vec<f64>> {
        let (pe, po) = match self {
            SiteLaw::Iid(p) => (p, p),
            SiteLaw::Alternating(p) => (p, 1.0 - p),
        };
        let even = n.div_ceil(2);
        let odd = n / 2;
        (0..=even)
            .map(|a| {
                (0..=odd)
                    .map(|b| {
                        pe.powi(a as i32)
                            * (1.0 - pe).powi((even - a) as i32)
                            * po.powi(b as i32)
                            * (1.0 - po).powi((odd - b) as i32)
                    })
                    .collect()
            })
            .collect()
    }
}

/// Law of an integer statistic given the count of ones.
#[derive(Clone, Debug, Serialize)]
pub struct CountSlice {
    pub count: usize,
    pub prob: f64,
    pub mean: f64,
    pub variance: f64,
    /// Conditional pmf keyed by the statistic's value.
    pub law: BTreeMap<i64, f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ExactBinaryLaw {
    pub n: usize,
    pub site_law: SiteLaw,
    pub statistic: BinaryStatistic,
    pub slices: Vec<CountSlice>,
    pub checkpoints: u64,
}

impl ExactBinaryLaw {
    pub fn slice(&self, count: usize) -> Option<&CountSlice> {
        self.slices.iter().find(|s| s.count == count)
    }
}

#[derive(Default)]
struct BinaryAcc {
    weight: Vec<Neumaier>,
    first: Vec<Neumaier>,
    second: Vec<Neumaier>,
    law: Vec<BTreeMap<i64, f64>>,
    checkpoints: u64,
    mismatches: u64,
}

/// Exact joint law of `(statistic, number of ones)` over all `2^n`
/// sequences.
pub fn enumerate_binary(n: usize, site_law: SiteLaw, statistic: BinaryStatistic) -> Result<ExactBinaryLaw> {
    if n > MAX_ENUM_BITS {
        return Err(Error::Budget {
            what: "sequence length",
            value: n,
            limit: MAX_ENUM_BITS,
        });
    }
    if n < 2 {
        return Err(invalid("sequences need n >= 2"));
    }
    let table = site_law.weight_table(n);
    let (low, blocks) = split(n);
    let parts = par_blocks(blocks, |hi| {
        let mut acc = BinaryAcc {
            weight: vec![Neumaier::default(); n + 1],
            first: vec![Neumaier::default(); n + 1],
            second: vec![Neumaier::default(); n + 1],
            law: vec![BTreeMap::new(); n + 1],
            ..Default::default()
        };
        let mut bits: Vec<u8> = (0..n).map(|i| ((hi << low) >> i & 1) as u8).collect();
        let mut ones = [0usize; 2];
        for (i, &b) in bits.iter().enumerate() {
            ones[i % 2] += b as usize;
        }
        let mut stat = statistic.full(&bits);
        for j in 0u64..(1u64 << low) {
            if j > 0 {
                let i = j.trailing_zeros() as usize;
                stat -= statistic.local(&bits, i);
                bits[i] ^= 1;
                if bits[i] == 1 {
                    ones[i % 2] += 1;
                } else {
                    ones[i % 2] -= 1;
                }
                stat += statistic.local(&bits, i);
            }
            if j % CHECKPOINT_STRIDE == 0 {
                acc.checkpoints += 1;
                if statistic.full(&bits) != stat {
                    acc.mismatches += 1;
                }
            }
            let w = table[ones[0]][ones[1]];
            let c = ones[0] + ones[1];
            let s = stat as f64;
            acc.weight[c].add(w);
            acc.first[c].add(w * s);
            acc.second[c].add(w * s * s);
            *acc.law[c].entry(stat).or_insert(0.0) += w;
        }
        acc
    });
    let mut weight = vec![Neumaier::default(); n + 1];
    let mut first = vec![Neumaier::default(); n + 1];
    let mut second = vec![Neumaier::default(); n + 1];
    let mut law = vec![BTreeMap::<i64, f64>::new(); n + 1];
    let (mut checkpoints, mut mismatches) = (0, 0);
    for part in parts {
        for c in 0..=n {
            weight[c].add(part.weight[c].value());
            first[c].add(part.first[c].value());
            second[c].add(part.second[c].value());
            for (k, v) in &part.law[c] {
                *law[c].entry(*k).or_insert(0.0) += v;
            }
        }
        checkpoints += part.checkpoints;
        mismatches += part.mismatches;
    }
    if mismatches > 0 {
        return Err(invalid(format!(
            "incremental statistic disagreed with recomputation at {mismatches} checkpoints"
        )));
    }
    let slices = (0..=n)
        .filter(|&c| weight[c].value() > 0.0)
        .map(|c| {
            let w = weight[c].value();
            let mean = first[c].value() / w;
            CountSlice {
                count: c,
                prob: w,
                mean,
                variance: (second[c].value() / w - mean * mean).max(0.0),
                law: law[c].iter().map(|(k, v)| (*k, v / w)).collect(),
            }
        })
        .collect();
    Ok(ExactBinaryLaw {
        n,
        site_law,
        statistic,
        slices,
        checkpoints,
    })
}

/// Conditional moments of wedge and triangle counts given the number of
/// edges.
#[derive(Clone, Debug, Serialize)]
pub struct GraphSlice {
    pub edges: usize,
    pub prob: f64,
    pub graphs: u64,
    pub mean_wedges: f64,
    pub var_wedges: f64,
    pub mean_triangles: f64,
    pub var_triangles: f64,
    pub cov: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ExactGraphLaw {
    pub n: usize,
    pub p: f64,
    pub slices: Vec<GraphSlice>,
    pub checkpoints: u64,
}

/// Integer sums over all graphs with a given number of edges.
#[derive(Clone, Default)]
struct GraphSums {
    graphs: Vec<u64>,
    u: Vec<u128>,
    t: Vec<u128>,
    uu: Vec<u128>,
    tt: Vec<u128>,
    ut: Vec<u128>,
    checkpoints: u64,
    mismatches: u64,
}

impl GraphSums {
    fn new(slots: usize) -> Self {
        GraphSums {
            graphs: vec![0; slots + 1],
            u: vec![0; slots + 1],
            t: vec![0; slots + 1],
            uu: vec![0; slots + 1],
            tt: vec![0; slots + 1],
            ut: vec![0; slots + 1],
            ..Default::default()
        }
    }

    fn merge(&mut self, o: &GraphSums) {
        for e in 0..self.graphs.len() {
            self.graphs[e] += o.graphs[e];
            self.u[e] += o.u[e];
            self.t[e] += o.t[e];
            self.uu[e] += o.uu[e];
            self.tt[e] += o.tt[e];
            self.ut[e] += o.ut[e];
        }
        self.checkpoints += o.checkpoints;
        self.mismatches += o.mismatches;
    }
}

fn graph_sums(n: usize) -> Result<GraphSums> {
    if n > MAX_ENUM_VERTICES {
        return Err(Error::Budget {
            what: "graph vertices",
            value: n,
            limit: MAX_ENUM_VERTICES,
        });
    }
    if n < 2 {
        return Err(invalid("graphs need n >= 2"));
    }
    let list = edge_list(n);
    let slots = list.len();
    let (low, blocks) = split(slots);
    let parts = par_blocks(blocks, |hi| {
        let mut acc = GraphSums::new(slots);
        let mut g = Graph::from_mask(n, hi << low);
        let mut u = g.wedges() as i64;
        let mut t = g.triangles() as i64;
        for j in 0u64..(1u64 << low) {
            if j > 0 {
                let (a, b) = list[j.trailing_zeros() as usize];
                let codeg = g.codegree(a, b) as i64;
                if g.has(a, b) {
                    g.set(a, b, false);
                    u -= (g.degree(a) + g.degree(b)) as i64;
                    t -= codeg;
                } else {
                    u += (g.degree(a) + g.degree(b)) as i64;
                    t += codeg;
                    g.set(a, b, true);
                }
            }
            if j % CHECKPOINT_STRIDE == 0 {
                acc.checkpoints += 1;
                if g.wedges() as i64 != u || g.triangles() as i64 != t {
                    acc.mismatches += 1;
                }
            }
            let e = g.edges();
            let (uu, tt) = (u as u128, t as u128);
            acc.graphs[e] += 1;
            acc.u[e] += uu;
            acc.t[e] += tt;
            acc.uu[e] += uu * uu;
            acc.tt[e] += tt * tt;
            acc.ut[e] += uu * tt;
        }
        acc
    });
    let mut total = GraphSums::new(slots);
    for p in &parts {
        total.merge(p);
    }
    if total.mismatches > 0 {
        return Err(invalid(format!(
            "incremental graph counts disagreed with recomputation at {} checkpoints",
            total.mismatches
        )));
    }
    Ok(total)
}

/// Exact conditional moments of wedges and triangles in `G(n, p)` given the
/// number of edges, over all `2^{C(n,2)}` graphs.
pub fn enumerate_graphs(n: usize, p: f64) -> Result<ExactGraphLaw> {
    crate::models::check_prob("p", p)?;
    let s = graph_sums(n)?;
    let slots = s.graphs.len() - 1;
    let slices = (0..=slots)
        .map(|e| {
            let c = s.graphs[e] as f64;
            let mu = s.u[e] as f64 / c;
            let mt = s.t[e] as f64 / c;
            GraphSlice {
                edges: e,
                prob: c * p.powi(e as i32) * (1.0 - p).powi((slots - e) as i32),
                graphs: s.graphs[e],
                mean_wedges: mu,
                var_wedges: s.uu[e] as f64 / c - mu * mu,
                mean_triangles: mt,
                var_triangles: s.tt[e] as f64 / c - mt * mt,
                cov: s.ut[e] as f64 / c - mu * mt,
            }
        })
        .collect();
    Ok(ExactGraphLaw {
        n,
        p,
        slices,
        checkpoints: s.checkpoints,
    })
}

/// Law of the urn model's `W` given the number of balls in urn 2, from
/// trinomial sums.
#[derive(Clone, Debug, Serialize)]
pub struct UrnSlice {
    pub v: usize,
    pub prob: f64,
    pub mean: f64,
    pub variance: f64,
    /// `(W, probability)` pairs sorted by `W`.
    pub law: Vec<(f64, f64)>,
}

pub fn enumerate_urn(n: usize, p1: f64, p2: f64) -> Result<Vec<UrnSlice>> {
    let urn = crate::models::Urn::new(n, p1, p2)?;
    let [p1, p2, p3] = urn.probs;
    let scale = (p1 * p3 / ((1.0 - p2) * n as f64)).sqrt();
    let ln_fact: Vec<f64> = (0..=n)
        .scan(0.0, |acc, i| {
            if i > 0 {
                *acc += (i as f64).ln();
            }
            Some(*acc)
        })
        .collect();
    let mut out = Vec::with_capacity(n + 1);
    for v in 0..=n {
        let mut law = Vec::new();
        let mut total = Neumaier::default();
        for a in 0..=(n - v) {
            let b = n - v - a;
            let lp = ln_fact[n] - ln_fact[a] - ln_fact[v] - ln_fact[b]
                + a as f64 * p1.ln()
                + v as f64 * p2.ln()
                + b as f64 * p3.ln();
            let pr = lp.exp();
            total.add(pr);
            law.push((scale * (a as f64 / p1 - b as f64 / p3), pr));
        }
        let prob = total.value();
        let mean = law.iter().map(|(w, q)| w * q).sum::<f64>() / prob;
        let second = law.iter().map(|(w, q)| w * w * q).sum::<f64>() / prob;
        law.sort_by(|x, y| x.0.total_cmp(&y.0));
        for e in &mut law {
            e.1 /= prob;
        }
        out.push(UrnSlice {
            v,
            prob,
            mean,
            variance: (second - mean * mean).max(0.0),
            law,
        });
    }
    Ok(out)
}

/// A probability in `(0, 1)` given as `num/den`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Fraction {
    pub num: i64,
    pub den: i64,
}

impl Fraction {
    pub fn new(num: i64, den: i64) -> Result<Self> {
        if den <= 0 || num <= 0 || num >= den {
            return Err(invalid("probability fraction must lie strictly between 0 and 1"));
        }
        Ok(Fraction { num, den })
    }

    fn rational(self) -> BigRational {
        BigRational::new(BigInt::from(self.num), BigInt::from(self.den))
    }

    pub fn value(self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct DecompositionCheck {
    pub n: usize,
    pub p: Fraction,
    pub pattern: String,
    /// `E R_H`, exact rational rendered as a string, and its value.
    pub mean_residual_exact: String,
    pub mean_residual: f64,
    /// `max |R_H|` over all graphs.
    pub max_abs_residual: f64,
    /// `E R_H T̃` and `E R_H Ũ`.
    pub cov_triangles: f64,
    pub cov_wedges: f64,
    /// `E R_H² / (Var Ĥ / n)`.
    pub scaled_second_moment: f64,
    /// Enumerated `Var Ĥ` against the closed form.
    pub var_hat_enumerated: f64,
    pub var_hat_formula: f64,
    pub ext_t: f64,
    pub ext_u: f64,
}

fn pow(r: &BigRational, e: usize) -> BigRational {
    let mut out = BigRational::one();
    for _ in 0..e {
        out *= r;
    }
    out
}

fn binom_big(n: usize, k: usize) -> BigInt {
    (0..k).fold(BigInt::one(), |acc, i| acc * BigInt::from(n - i) / BigInt::from(i + 1))
}

/// Exhaustive check of `Ĥ - EĤ = p^{m-3}ext(T,H) T̃ + p^{m-2}ext(U,H) Ũ + R_H`
/// with `E R_H` in exact rational arithmetic.
pub fn exact_decomposition_check(n: usize, p: Fraction, pattern: &SubgraphSpec) -> Result<DecompositionCheck> {
    if n > 7 {
        return Err(Error::Budget {
            what: "vertices for the decomposition check",
            value: n,
            limit: 7,
        });
    }
    if pattern.v > 5 {
        return Err(Error::Budget {
            what: "pattern vertices",
            value: pattern.v,
            limit: 5,
        });
    }
    let pf = p.value();
    let model = SubgraphModel::new(n, pf, pattern.clone())?;
    let list = edge_list(n);
    let slots = list.len();
    let copies = model.copies().to_vec();
    let (low, blocks) = split(slots);
    struct Part {
        h_by_edges: Vec<u128>,
        sums: [Neumaier; 5],
        max_abs: f64,
    }
    let parts = par_blocks(blocks, |hi| {
        let mut part = Part {
            h_by_edges: vec![0; slots + 1],
            sums: [Neumaier::default(); 5],
            max_abs: 0.0,
        };
        for j in 0u64..(1u64 << low) {
            let mask = (hi << low) | (j ^ (j >> 1));
            let g = Graph::from_mask(n, mask);
            let gm = graph_mask(&g);
            let h = copies.iter().filter(|&&c| c & gm == c).count();
            let e = g.edges();
            part.h_by_edges[e] += h as u128;
            let w = pf.powi(e as i32) * (1.0 - pf).powi((slots - e) as i32);
            let r = model.residual(&g);
            let hh = model.h_hat(&g) - model.mean_hat;
            part.sums[0].add(w * r);
            part.sums[1].add(w * r * r);
            part.sums[2].add(w * r * g.centred_triangles(pf));
            part.sums[3].add(w * r * g.centred_wedges(pf));
            part.sums[4].add(w * hh * hh);
            part.max_abs = part.max_abs.max(r.abs());
        }
        part
    });
    let mut h_by_edges = vec![0u128; slots + 1];
    let mut sums = [Neumaier::default(); 5];
    let mut max_abs: f64 = 0.0;
    for part in &parts {
        for e in 0..=slots {
            h_by_edges[e] += part.h_by_edges[e];
        }
        for i in 0..5 {
            sums[i].add(part.sums[i].value());
        }
        max_abs = max_abs.max(part.max_abs);
    }
    // E R_H = E H - κ E E - (|S| p^m - κ N p); T̃ and Ũ have mean zero.
    let pr = p.rational();
    let qr = BigRational::one() - &pr;
    let m = pattern.m();
    let mut e_h = BigRational::zero();
    let mut e_edges = BigRational::zero();
    for e in 0..=slots {
        let w = pow(&pr, e) * pow(&qr, slots - e);
        e_h += &w * BigRational::from_integer(BigInt::from(h_by_edges[e]));
        e_edges += &w * BigRational::from_integer(binom_big(slots, e) * BigInt::from(e));
    }
    let size_s = BigRational::from_integer(BigInt::from(copies.len()));
    let big_n = BigRational::from_integer(BigInt::from(slots));
    let kappa = BigRational::from_integer(BigInt::from(m)) * &size_s * pow(&pr, m.saturating_sub(1)) / &big_n;
    let mean_hat = &size_s * pow(&pr, m) - &kappa * &big_n * &pr;
    let mean_res = e_h - &kappa * e_edges - mean_hat;
    let var_formula = model.var_hat();
    let var_enum = sums[4].value();
    Ok(DecompositionCheck {
        n,
        p,
        pattern: format!("{:?}", pattern.edges),
        mean_residual: mean_res.to_f64().unwrap_or(f64::NAN),
        mean_residual_exact: if mean_res.is_zero() {
            "0".into()
        } else {
            format!("{}{}", if mean_res.is_negative() { "-" } else { "" }, mean_res.abs())
        },
        max_abs_residual: max_abs,
        cov_triangles: sums[2].value(),
        cov_wedges: sums[3].value(),
        scaled_second_moment: if var_formula > 0.0 {
            sums[1].value() / (var_formula / n as f64)
        } else {
            0.0
        },
        var_hat_enumerated: var_enum,
        var_hat_formula: var_formula,
        ext_t: ext(&SubgraphSpec::triangle(), pattern, n),
        ext_u: ext(&SubgraphSpec::wedge(), pattern, n),
    })
}

/// One row of the conditional-mean comparison against a closed form.
#[derive(Clone, Debug, Serialize)]
pub struct OracleRow {
    pub count: usize,
    pub exact_mean: f64,
    pub formula_mean: f64,
    pub exact_variance: f64,
    pub formula_variance: Option<f64>,
}

/// `E(#01 | V = m)` and `Var(#01 | V = m)` against `m(n-m)/(n-1)` and the
/// variance formula `C(m,2)C(n-m,2)/((n-1)C(n-1,2))`.
pub fn pattern01_table(n: usize) -> Result<Vec<OracleRow>> {
    let law = enumerate_binary(n, SiteLaw::Iid(0.5), BinaryStatistic::Count01)?;
    let nf = n as f64;
    Ok(law
        .slices
        .iter()
        .map(|s| {
            let m = s.count;
            let mf = m as f64;
            OracleRow {
                count: m,
                exact_mean: s.mean,
                formula_mean: mf * (nf - mf) / (nf - 1.0),
                exact_variance: s.variance,
                formula_variance: Some(
                    choose(m, 2) * choose(n - m, 2) / ((nf - 1.0) * choose(n - 1, 2)),
                ),
            }
        })
        .collect())
}

/// `E(wedges | E = m)` against `2m(m-1)/(n+1)`.
pub fn wedge_table(n: usize) -> Result<Vec<OracleRow>> {
    let law = enumerate_graphs(n, 0.5)?;
    let nf = n as f64;
    Ok(law
        .slices
        .iter()
        .map(|s| {
            let m = s.edges as f64;
            OracleRow {
                count: s.edges,
                exact_mean: s.mean_wedges,
                formula_mean: 2.0 * m * (m - 1.0) / (nf + 1.0),
                exact_variance: s.var_wedges,
                formula_variance: None,
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::binary::count_01;

    #[test]
    fn small_pattern_examples() {
        let law = enumerate_binary(4, SiteLaw::Iid(0.5), BinaryStatistic::Count01).unwrap();
        assert!((law.slice(2).unwrap().mean - 4.0 / 3.0).abs() < 1e-14);
        assert_eq!(law.slice(4).unwrap().law.keys().copied().collect::<Vec<_>>(), vec![0]);
        let law = enumerate_binary(6, SiteLaw::Iid(0.5), BinaryStatistic::Count01).unwrap();
        assert!((law.slice(3).unwrap().variance - 0.36).abs() < 1e-14);
    }

    #[test]
    fn gray_code_matches_direct_count() {
        let n = 11;
        let law = enumerate_binary(n, SiteLaw::Iid(0.5), BinaryStatistic::Count01).unwrap();
        let mut counts = vec![BTreeMap::<i64, f64>::new(); n + 1];
        let mut bits = vec![0u8; n];
        for mask in 0u64..(1 << n) {
            for (i, b) in bits.iter_mut().enumerate() {
                *b = (mask >> i & 1) as u8;
            }
            let ones = bits.iter().map(|&b| b as usize).sum::<usize>();
            *counts[ones].entry(count_01(&bits) as i64).or_insert(0.0) += 1.0;
        }
        for s in &law.slices {
            let total: f64 = counts[s.count].values().sum();
            for (k, v) in &counts[s.count] {
                assert!((s.law[k] - v / total).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn marginal_is_binomial() {
        let law = enumerate_binary(12, SiteLaw::Iid(0.3), BinaryStatistic::Count01).unwrap();
        let bin = crate::core::CountLaw::binomial(12, 0.3);
        for s in &law.slices {
            assert!((s.prob - bin.pmf[s.count]).abs() < 1e-12);
        }
        let law = enumerate_binary(10, SiteLaw::Alternating(0.3), BinaryStatistic::EvenOdd11).unwrap();
        let conv = crate::core::CountLaw::binomial(5, 0.3).convolve(&crate::core::CountLaw::binomial(5, 0.7));
        for s in &law.slices {
            assert!((s.prob - conv.pmf[s.count]).abs() < 1e-12);
        }
    }

    #[test]
    fn graph_examples() {
        let law = enumerate_graphs(4, 0.5).unwrap();
        assert!((law.slices[2].mean_wedges - 0.8).abs() < 1e-14);
        assert!((law.slices[3].mean_triangles - 0.2).abs() < 1e-14);
        assert_eq!(law.slices[0].mean_wedges, 0.0);
        assert_eq!(law.slices[0].mean_triangles, 0.0);
    }

    #[test]
    fn urn_examples() {
        let s = enumerate_urn(2, 1.0 / 3.0, 1.0 / 3.0).unwrap();
        assert!((s[1].prob - 4.0 / 9.0).abs() < 1e-14);
        assert_eq!(s[2].law.len(), 1);
        assert!(s[2].law[0].0.abs() < 1e-15);
        for sl in enumerate_urn(7, 0.25, 0.5).unwrap() {
            assert!(sl.mean.abs() < 1e-12);
        }
    }

    #[test]
    fn triangle_residual_vanishes() {
        let f = Fraction::new(1, 3).unwrap();
        let c = exact_decomposition_check(5, f, &SubgraphSpec::triangle()).unwrap();
        assert_eq!(c.mean_residual_exact, "0");
        assert!(c.max_abs_residual < 1e-12);
    }
}
