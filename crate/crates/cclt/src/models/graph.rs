//! Simple graphs on `n` labelled vertices with bitset adjacency, degree
//! bookkeeping, and the centred wedge and triangle statistics.

use rand::seq::index;
use rand::Rng;

use crate::rng::SimRng;

/// Edge slot of `{i, j}`, `i < j`: `j(j-1)/2 + i`.
pub fn edge_index(i: usize, j: usize) -> usize {
    let (i, j) = if i < j { (i, j) } else { (j, i) };
    j * (j - 1) / 2 + i
}

/// Endpoints of every edge slot in slot order.
pub fn edge_list(n: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::with_capacity(n * (n - 1) / 2);
    for j in 1..n {
        for i in 0..j {
            out.push((i, j));
        }
    }
    out
}

pub fn choose(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    pub n: usize,
    words: usize,
    adj: Vec<u64>,
    deg: Vec<u32>,
    edges: usize,
}

impl Graph {
    pub fn empty(n: usize) -> Self {
        let words = n.div_ceil(64).max(1);
        Graph {
            n,
            words,
            adj: vec![0; n * words],
            deg: vec![0; n],
            edges: 0,
        }
    }

    /// Graph whose edge slots are the low bits of `mask`.
    pub fn from_mask(n: usize, mask: u64) -> Self {
        let mut g = Graph::empty(n);
        for (e, &(i, j)) in edge_list(n).iter().enumerate() {
            if (mask >> e) & 1 == 1 {
                g.set(i, j, true);
            }
        }
        g
    }

    /// `G(n, p)`.
    pub fn random(n: usize, p: f64, rng: &mut SimRng) -> Self {
        let mut g = Graph::empty(n);
        for j in 1..n {
            for i in 0..j {
                if rng.random_bool(p) {
                    g.set(i, j, true);
                }
            }
        }
        g
    }

    /// `G(n, m)`: a uniform set of `m` edges.
    pub fn random_m(n: usize, m: usize, rng: &mut SimRng) -> Self {
        let list = edge_list(n);
        let big = list.len();
        let mut g = Graph::empty(n);
        if 2 * m <= big {
            for e in index::sample(rng, big, m) {
                g.set(list[e].0, list[e].1, true);
            }
        } else {
            let mut on = vec![true; big];
            for e in index::sample(rng, big, big - m) {
                on[e] = false;
            }
            for (e, &(i, j)) in list.iter().enumerate() {
                if on[e] {
                    g.set(i, j, true);
                }
            }
        }
        g
    }

    pub fn slots(&self) -> usize {
        self.n * (self.n - 1) / 2
    }

    pub fn edges(&self) -> usize {
        self.edges
    }

    pub fn degree(&self, v: usize) -> usize {
        self.deg[v] as usize
    }

    pub fn has(&self, i: usize, j: usize) -> bool {
        (self.adj[i * self.words + j / 64] >> (j % 64)) & 1 == 1
    }

    pub fn set(&mut self, i: usize, j: usize, on: bool) {
        if self.has(i, j) == on || i == j {
            return;
        }
        self.adj[i * self.words + j / 64] ^= 1 << (j % 64);
        self.adj[j * self.words + i / 64] ^= 1 << (i % 64);
        if on {
            self.deg[i] += 1;
            self.deg[j] += 1;
            self.edges += 1;
        } else {
            self.deg[i] -= 1;
            self.deg[j] -= 1;
            self.edges -= 1;
        }
    }

    pub fn flip(&mut self, i: usize, j: usize) {
        let on = !self.has(i, j);
        self.set(i, j, on);
    }

    /// Common neighbours of `i` and `j`.
    pub fn codegree(&self, i: usize, j: usize) -> usize {
        let a = &self.adj[i * self.words..(i + 1) * self.words];
        let b = &self.adj[j * self.words..(j + 1) * self.words];
        a.iter().zip(b).map(|(x, y)| (x & y).count_ones() as usize).sum()
    }

    pub fn neighbours(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.n).filter(move |&u| self.has(v, u))
    }

    /// Number of paths of length two.
    pub fn wedges(&self) -> f64 {
        self.deg.iter().map(|&d| choose(d as usize, 2)).sum()
    }

    pub fn triangles(&self) -> f64 {
        let mut t = 0usize;
        for j in 1..self.n {
            for i in 0..j {
                if self.has(i, j) {
                    t += self.codegree(i, j);
                }
            }
        }
        t as f64 / 3.0
    }

    /// `Ũ = Σ_wedges (ω - p)(ω' - p)`, computed per centre vertex.
    pub fn centred_wedges(&self, p: f64) -> f64 {
        let n = self.n as f64;
        self.deg
            .iter()
            .map(|&d| {
                let d = d as f64;
                let s = d - p * (n - 1.0);
                let sq = d * (1.0 - p) * (1.0 - p) + (n - 1.0 - d) * p * p;
                0.5 * (s * s - sq)
            })
            .sum()
    }

    /// `T̃ = Σ_triangles Π (ω - p)` through `T - pU + p²(n-2)Y + 2 C(n,3) p³`.
    pub fn centred_triangles(&self, p: f64) -> f64 {
        let n = self.n;
        let y = self.edges as f64 - self.slots() as f64 * p;
        self.triangles() - p * self.wedges()
            + p * p * (n as f64 - 2.0) * y
            + 2.0 * choose(n, 3) * p.powi(3)
    }

    /// Changes of `(T̃, Ũ)` when slot `{i,j}` flips, before the flip.
    pub fn flip_deltas(&self, i: usize, j: usize, p: f64) -> [f64; 2] {
        let on = self.has(i, j) as usize as f64;
        let sign = 1.0 - 2.0 * on;
        let m = (self.n - 2) as f64;
        let di = self.deg[i] as f64 - on;
        let dj = self.deg[j] as f64 - on;
        let du = sign * ((di - p * m) + (dj - p * m));
        let dt = sign * (self.codegree(i, j) as f64 - p * di - p * dj + p * p * m);
        [dt, du]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::substream;

    fn brute_centred(g: &Graph, p: f64) -> (f64, f64) {
        let n = g.n;
        let w = |i: usize, j: usize| g.has(i, j) as u8 as f64 - p;
        let mut u = 0.0;
        let mut t = 0.0;
        for c in 0..n {
            for a in 0..n {
                for b in (a + 1)..n {
                    if a != c && b != c {
                        u += w(a, c) * w(b, c);
                    }
                }
            }
        }
        for a in 0..n {
            for b in (a + 1)..n {
                for c in (b + 1)..n {
                    t += w(a, b) * w(b, c) * w(a, c);
                }
            }
        }
        (t, u)
    }

    #[test]
    fn centred_statistics_match_brute_force() {
        let mut rng = substream(3, 0);
        for n in [4, 5, 7, 70] {
            let g = Graph::random(n, 0.3, &mut rng);
            let (t, u) = brute_centred(&g, 0.3);
            assert!((g.centred_triangles(0.3) - t).abs() < 1e-7 * (1.0 + t.abs()));
            assert!((g.centred_wedges(0.3) - u).abs() < 1e-7 * (1.0 + u.abs()));
        }
    }

    #[test]
    fn flip_deltas_match_recomputation() {
        let mut rng = substream(4, 0);
        let mut g = Graph::random(9, 0.4, &mut rng);
        for (i, j) in edge_list(9) {
            let before = [g.centred_triangles(0.4), g.centred_wedges(0.4)];
            let d = g.flip_deltas(i, j, 0.4);
            g.flip(i, j);
            let after = [g.centred_triangles(0.4), g.centred_wedges(0.4)];
            assert!((after[0] - before[0] - d[0]).abs() < 1e-9);
            assert!((after[1] - before[1] - d[1]).abs() < 1e-9);
        }
    }

    #[test]
    fn edge_slots_follow_fixed_order() {
        assert_eq!(edge_index(0, 1), 0);
        assert_eq!(edge_index(2, 0), 1);
        assert_eq!(edge_index(1, 2), 2);
        for (e, (i, j)) in edge_list(8).into_iter().enumerate() {
            assert_eq!(edge_index(i, j), e);
        }
    }
}
