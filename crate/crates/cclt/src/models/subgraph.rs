//! Counts of a fixed pattern graph `H` in `G(n, p)`, projected off the edge
//! count, and their split into triangle, wedge, and remainder parts.

use std::collections::HashSet;

use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::models::graph::{choose, edge_index, Graph};
use crate::models::check_prob;
use crate::rng::SimRng;

pub const MAX_PATTERN_VERTICES: usize = 8;
/// Edge masks are `u64`, so `C(n,2) <= 64`.
pub const MAX_COPY_VERTICES: usize = 11;

/// Simple pattern graph on `v` vertices.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SubgraphSpec {
    pub v: usize,
    pub edges: Vec<(usize, usize)>,
}

impl SubgraphSpec {
    pub fn new(v: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        if v == 0 || v > MAX_PATTERN_VERTICES {
            return Err(Error::Budget {
                what: "pattern vertices",
                value: v,
                limit: MAX_PATTERN_VERTICES,
            });
        }
        let mut seen = HashSet::new();
        for &(a, b) in &edges {
            if a == b || a >= v || b >= v {
                return Err(invalid(format!("bad pattern edge {a}-{b}")));
            }
            if !seen.insert((a.min(b), a.max(b))) {
                return Err(invalid(format!("repeated pattern edge {a}-{b}")));
            }
        }
        Ok(SubgraphSpec { v, edges })
    }

    pub fn edge() -> Self {
        SubgraphSpec { v: 2, edges: vec![(0, 1)] }
    }

    pub fn wedge() -> Self {
        SubgraphSpec { v: 3, edges: vec![(0, 1), (1, 2)] }
    }

    pub fn triangle() -> Self {
        SubgraphSpec { v: 3, edges: vec![(0, 1), (1, 2), (0, 2)] }
    }

    pub fn path(v: usize) -> Self {
        SubgraphSpec {
            v,
            edges: (1..v).map(|i| (i - 1, i)).collect(),
        }
    }

    pub fn cycle(v: usize) -> Self {
        let mut s = Self::path(v);
        s.edges.push((v - 1, 0));
        s
    }

    pub fn complete(v: usize) -> Self {
        let mut edges = Vec::new();
        for j in 1..v {
            for i in 0..j {
                edges.push((i, j));
            }
        }
        SubgraphSpec { v, edges }
    }

    /// `triangle`, `wedge`, `edge`, `k4`, `p4`, `c4`, `kN`, `pN`, `cN`, or an
    /// explicit list such as `0-1,1-2,2-0`.
    pub fn parse(s: &str) -> Result<Self> {
        let t = s.trim().to_ascii_lowercase();
        let num = |rest: &str| -> Result<usize> {
            rest.parse()
                .map_err(|_| invalid(format!("unknown pattern `{s}`")))
        };
        match t.as_str() {
            "triangle" => return Ok(Self::triangle()),
            "wedge" => return Ok(Self::wedge()),
            "edge" => return Ok(Self::edge()),
            _ => {}
        }
        if t.contains('-') {
            let mut edges = Vec::new();
            let mut v = 0;
            for part in t.split(',') {
                let (a, b) = part
                    .split_once('-')
                    .ok_or_else(|| invalid(format!("bad edge `{part}`")))?;
                let (a, b) = (num(a.trim())?, num(b.trim())?);
                v = v.max(a + 1).max(b + 1);
                edges.push((a, b));
            }
            return Self::new(v, edges);
        }
        let (kind, rest) = t.split_at(1);
        let v = num(rest)?;
        let spec = match kind {
            "k" if v >= 2 => Self::complete(v),
            "p" if v >= 2 => Self::path(v),
            "c" if v >= 3 => Self::cycle(v),
            _ => return Err(invalid(format!("unknown pattern `{s}`"))),
        };
        Self::new(spec.v, spec.edges)
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    fn adjacency(&self) -> Vec<Vec<bool>> {
        let mut a = vec![vec![false; self.v]; self.v];
        for &(x, y) in &self.edges {
            a[x][y] = true;
            a[y][x] = true;
        }
        a
    }

    /// Subgraph spanned by a subset of the edges, on their endpoints only.
    pub fn spanned(&self, subset: &[usize]) -> SubgraphSpec {
        let mut relabel = vec![usize::MAX; self.v];
        let mut v = 0;
        let mut edges = Vec::new();
        for &e in subset {
            let (a, b) = self.edges[e];
            for x in [a, b] {
                if relabel[x] == usize::MAX {
                    relabel[x] = v;
                    v += 1;
                }
            }
            edges.push((relabel[a], relabel[b]));
        }
        SubgraphSpec { v, edges }
    }
}

/// Number of injective maps `F → H` sending edges to edges.
pub fn injective_homomorphisms(f: &SubgraphSpec, h: &SubgraphSpec) -> u64 {
    if f.v > h.v {
        return 0;
    }
    let fa = f.adjacency();
    let ha = h.adjacency();
    let fdeg: Vec<usize> = fa.iter().map(|r| r.iter().filter(|&&b| b).count()).collect();
    let hdeg: Vec<usize> = ha.iter().map(|r| r.iter().filter(|&&b| b).count()).collect();
    let mut map = vec![usize::MAX; f.v];
    let mut used = vec![false; h.v];
    fn go(
        i: usize,
        fa: &[Vec<bool>],
        ha: &[Vec<bool>],
        fdeg: &[usize],
        hdeg: &[usize],
        map: &mut [usize],
        used: &mut [bool],
    ) -> u64 {
        if i == map.len() {
            return 1;
        }
        let mut total = 0;
        for t in 0..ha.len() {
            if used[t] || hdeg[t] < fdeg[i] {
                continue;
            }
            if (0..i).any(|j| fa[i][j] && !ha[t][map[j]]) {
                continue;
            }
            used[t] = true;
            map[i] = t;
            total += go(i + 1, fa, ha, fdeg, hdeg, map, used);
            used[t] = false;
        }
        total
    }
    go(0, &fa, &ha, &fdeg, &hdeg, &mut map, &mut used)
}

pub fn automorphisms(h: &SubgraphSpec) -> u64 {
    injective_homomorphisms(h, h)
}

/// `(a)_k = a (a-1) ... (a-k+1)` as a float.
fn falling(a: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (a - i) as f64)
}

/// Number of ways to extend a fixed copy of `F` inside `K_n` to a copy of
/// `H`: `inj(F → H) (n - v_F)! / ((n - v_H)! |Aut H|)`.
pub fn ext(f: &SubgraphSpec, h: &SubgraphSpec, n: usize) -> f64 {
    if h.v > n || f.v > h.v {
        return 0.0;
    }
    injective_homomorphisms(f, h) as f64 * falling(n - f.v, h.v - f.v) / automorphisms(h) as f64
}

/// Number of copies of `H` in `K_n`.
pub fn copies_in_complete(h: &SubgraphSpec, n: usize) -> f64 {
    if h.v > n {
        return 0.0;
    }
    falling(n, h.v) / automorphisms(h) as f64
}

/// Edge masks of every copy of `H` in `K_n`.
pub fn copy_masks(h: &SubgraphSpec, n: usize) -> Result<Vec<u64>> {
    if n > MAX_COPY_VERTICES {
        return Err(Error::Budget {
            what: "vertices for copy masks",
            value: n,
            limit: MAX_COPY_VERTICES,
        });
    }
    let mut out = HashSet::new();
    let mut map = vec![0usize; h.v];
    let mut used = vec![false; n];
    fn go(
        i: usize,
        h: &SubgraphSpec,
        n: usize,
        map: &mut [usize],
        used: &mut [bool],
        out: &mut HashSet<u64>,
    ) {
        if i == h.v {
            let mask = h
                .edges
                .iter()
                .fold(0u64, |m, &(a, b)| m | 1 << edge_index(map[a], map[b]));
            out.insert(mask);
            return;
        }
        for t in 0..n {
            if !used[t] {
                used[t] = true;
                map[i] = t;
                go(i + 1, h, n, map, used, out);
                used[t] = false;
            }
        }
    }
    go(0, h, n, &mut map, &mut used, &mut out);
    let mut v: Vec<u64> = out.into_iter().collect();
    v.sort_unstable();
    Ok(v)
}

/// Edge mask of a graph (needs `C(n,2) <= 64`).
pub fn graph_mask(g: &Graph) -> u64 {
    let mut mask = 0u64;
    for j in 1..g.n {
        for i in 0..j {
            if g.has(i, j) {
                mask |= 1 << edge_index(i, j);
            }
        }
    }
    mask
}

/// `Ĥ = H - κ E` with `κ = m |S| p^{m-1} / N`, and the decomposition
/// `Ĥ - EĤ = p^{m-3} ext(T,H) T̃ + p^{m-2} ext(U,H) Ũ + R_H`.
#[derive(Clone, Debug)]
pub struct SubgraphModel {
    pub n: usize,
    pub p: f64,
    pub spec: SubgraphSpec,
    copies: Vec<u64>,
    pub size_s: f64,
    pub kappa: f64,
    pub ext_t: f64,
    pub ext_u: f64,
    pub coef_t: f64,
    pub coef_u: f64,
    pub mean_hat: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct DecompositionSummary {
    pub n: usize,
    pub p: f64,
    pub ext_t: f64,
    pub ext_u: f64,
    pub var_hat: f64,
    pub var_residual: f64,
    pub rho1: f64,
    pub rho2: f64,
}

impl SubgraphModel {
    pub fn new(n: usize, p: f64, spec: SubgraphSpec) -> Result<Self> {
        check_prob("p", p)?;
        if n < spec.v.max(4) {
            return Err(invalid("need n >= max(4, v(H))"));
        }
        let copies = copy_masks(&spec, n)?;
        let m = spec.m();
        let big = (n * (n - 1) / 2) as f64;
        let size_s = copies_in_complete(&spec, n);
        let kappa = m as f64 * size_s * p.powi(m as i32 - 1) / big;
        let ext_t = ext(&SubgraphSpec::triangle(), &spec, n);
        let ext_u = ext(&SubgraphSpec::wedge(), &spec, n);
        let coef_t = if ext_t == 0.0 { 0.0 } else { p.powi(m as i32 - 3) * ext_t };
        let coef_u = if ext_u == 0.0 { 0.0 } else { p.powi(m as i32 - 2) * ext_u };
        Ok(SubgraphModel {
            n,
            p,
            mean_hat: size_s * p.powi(m as i32) - kappa * big * p,
            spec,
            copies,
            size_s,
            kappa,
            ext_t,
            ext_u,
            coef_t,
            coef_u,
        })
    }

    pub fn copies(&self) -> &[u64] {
        &self.copies
    }

    pub fn count(&self, g: &Graph) -> usize {
        let mask = graph_mask(g);
        self.copies.iter().filter(|&&c| c & mask == c).count()
    }

    pub fn h_hat(&self, g: &Graph) -> f64 {
        self.count(g) as f64 - self.kappa * g.edges() as f64
    }

    pub fn residual(&self, g: &Graph) -> f64 {
        self.h_hat(g)
            - self.mean_hat
            - self.coef_t * g.centred_triangles(self.p)
            - self.coef_u * g.centred_wedges(self.p)
    }

    /// Exact `Var Ĥ` from the chaos expansion over edge subsets of `H`.
    pub fn var_hat(&self) -> f64 {
        let m = self.spec.m();
        let pq = self.p * (1.0 - self.p);
        let mut total = 0.0;
        for subset in 1u32..(1 << m) {
            let l = subset.count_ones() as usize;
            if l < 2 {
                continue;
            }
            let idx: Vec<usize> = (0..m).filter(|e| (subset >> e) & 1 == 1).collect();
            let f = self.spec.spanned(&idx);
            total += ext(&f, &self.spec, self.n)
                * self.p.powi(2 * (m - l) as i32)
                * pq.powi(l as i32);
        }
        self.size_s * total
    }

    pub fn sigma_triangles(&self) -> f64 {
        let pq = self.p * (1.0 - self.p);
        (choose(self.n, 3) * pq.powi(3)).sqrt()
    }

    pub fn sigma_wedges(&self) -> f64 {
        let pq = self.p * (1.0 - self.p);
        ((self.n * (self.n - 1) / 2) as f64 * (self.n - 2) as f64).sqrt() * pq
    }

    pub fn summary(&self) -> DecompositionSummary {
        let var_hat = self.var_hat();
        let t = self.coef_t * self.sigma_triangles();
        let u = self.coef_u * self.sigma_wedges();
        let sd = var_hat.sqrt();
        DecompositionSummary {
            n: self.n,
            p: self.p,
            ext_t: self.ext_t,
            ext_u: self.ext_u,
            var_hat,
            var_residual: (var_hat - t * t - u * u).max(0.0),
            rho1: t / sd,
            rho2: u / sd,
        }
    }

    pub fn sample(&self, rng: &mut SimRng) -> Graph {
        Graph::random(self.n, self.p, rng)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn extension_counts() {
        let t = SubgraphSpec::triangle();
        let u = SubgraphSpec::wedge();
        assert_eq!(ext(&t, &SubgraphSpec::complete(4), 5), 2.0);
        assert_eq!(ext(&u, &SubgraphSpec::path(4), 5), 4.0);
        assert_eq!(ext(&t, &t, 9), 1.0);
        assert_eq!(ext(&u, &t, 9), 1.0);
        assert_eq!(automorphisms(&SubgraphSpec::complete(4)), 24);
        assert_eq!(automorphisms(&SubgraphSpec::cycle(5)), 10);
    }

    #[test]
    fn copy_counts_match_complete_graph() {
        for (h, n) in [
            (SubgraphSpec::triangle(), 6),
            (SubgraphSpec::path(4), 6),
            (SubgraphSpec::complete(4), 7),
        ] {
            let masks = copy_masks(&h, n).unwrap();
            assert_eq!(masks.len() as f64, copies_in_complete(&h, n));
        }
    }

    #[test]
    fn parse_patterns() {
        assert_eq!(SubgraphSpec::parse("K4").unwrap().m(), 6);
        assert_eq!(SubgraphSpec::parse("p4").unwrap().m(), 3);
        assert_eq!(SubgraphSpec::parse("0-1,1-2,2-0").unwrap().m(), 3);
        assert!(SubgraphSpec::parse("k9").is_err());
        assert!(SubgraphSpec::parse("0-0").is_err());
    }
}
