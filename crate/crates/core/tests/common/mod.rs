//! Test-side oracles shared by the integration targets. Nothing here calls
//! into the sampler or trainers; pair distributions are computed from the
//! raw edge list with dense matrix powers.

#![allow(dead_code, clippy::needless_range_loop)]

use std::collections::{BTreeMap, HashMap};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wembed::optimizer::UpdateScratch;
use wembed::{Edge, Model64, SharedMatrix, VertexId};

pub type PairKey = (usize, String, String);

/// Dense transition model over the distinct names of an edge list.
pub struct Chain {
    pub names: Vec<String>,
    /// Row-normalized transition matrix; all-zero rows for dangling vertices.
    pub step: Vec<Vec<f64>>,
    pub weight: Vec<Vec<f64>>,
}

impl Chain {
    /// `uniform` ignores weights and moves to each out-neighbor with equal
    /// probability.
    pub fn new(edges: &[Edge], uniform: bool) -> Chain {
        let mut names: Vec<String> = Vec::new();
        let mut index = HashMap::new();
        for e in edges {
            for n in [&e.source, &e.target] {
                if !index.contains_key(n) {
                    index.insert(n.clone(), names.len());
                    names.push(n.clone());
                }
            }
        }
        let n = names.len();
        let mut weight = vec![vec![0.0; n]; n];
        for e in edges {
            let w = if uniform { 1.0 } else { e.weight };
            let (s, t) = (index[&e.source], index[&e.target]);
            if uniform {
                weight[s][t] = w;
            } else {
                weight[s][t] += w;
            }
        }
        let step = weight
            .iter()
            .map(|row| {
                let total: f64 = row.iter().sum();
                row.iter().map(|w| if total > 0.0 { w / total } else { 0.0 }).collect()
            })
            .collect();
        Chain { names, step, weight }
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    /// `P^k` for k = 0..=max.
    pub fn powers(&self, max: usize) -> Vec<Vec<Vec<f64>>> {
        let n = self.len();
        let mut out = vec![identity(n)];
        for k in 1..=max {
            out.push(matmul(&out[k - 1], &self.step));
        }
        out
    }

    fn out_weights(&self) -> Vec<f64> {
        self.weight.iter().map(|r| r.iter().sum()).collect()
    }

    fn key(&self, slot: usize, a: usize, b: usize) -> PairKey {
        (slot, self.names[a].clone(), self.names[b].clone())
    }

    /// Expected share of `(walk[i], walk[j])` pairs with `|i - j|` in
    /// `offsets`, walks of `length` steps started uniformly over all vertices.
    /// `slot_of` maps an offset to the sink slot it is reported under.
    pub fn walk_pairs(&self, length: usize, offsets: &[usize], slot_of: impl Fn(usize) -> usize) -> BTreeMap<PairKey, f64> {
        let n = self.len();
        let powers = self.powers(length);
        let start = vec![1.0 / n as f64; n];
        let position: Vec<Vec<f64>> = (0..=length).map(|i| vecmat(&start, &powers[i])).collect();
        let mut out = BTreeMap::new();
        for i in 0..=length {
            for &k in offsets {
                if i + k > length {
                    continue;
                }
                // (walk[i], walk[i+k]) and the mirrored (walk[i+k], walk[i])
                for a in 0..n {
                    for b in 0..n {
                        let p = position[i][a] * powers[k][a][b];
                        if p > 0.0 {
                            *out.entry(self.key(slot_of(k), a, b)).or_insert(0.0) += p;
                            *out.entry(self.key(slot_of(k), b, a)).or_insert(0.0) += p;
                        }
                    }
                }
            }
        }
        out
    }

    /// Edge pairs drawn with probability `w(a, b) / W`.
    pub fn edge_pairs(&self) -> BTreeMap<PairKey, f64> {
        let mut out = BTreeMap::new();
        for a in 0..self.len() {
            for b in 0..self.len() {
                if self.weight[a][b] > 0.0 {
                    out.insert(self.key(0, a, b), self.weight[a][b]);
                }
            }
        }
        out
    }

    /// Start vertex by out-weight paired with each vertex reached in 1..=length steps.
    pub fn start_pairs(&self, length: usize) -> BTreeMap<PairKey, f64> {
        let start = self.out_weights();
        let powers = self.powers(length);
        let mut out = BTreeMap::new();
        for a in 0..self.len() {
            for b in 0..self.len() {
                let reach: f64 = (1..=length).map(|s| powers[s][a][b]).sum();
                if start[a] * reach > 0.0 {
                    out.insert(self.key(0, a, b), start[a] * reach);
                }
            }
        }
        out
    }
}

fn identity(n: usize) -> Vec<Vec<f64>> {
    (0..n).map(|i| (0..n).map(|j| f64::from(u8::from(i == j))).collect()).collect()
}

fn matmul(a: &[Vec<f64>], b: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = a.len();
    (0..n)
        .map(|i| (0..n).map(|j| (0..n).map(|k| a[i][k] * b[k][j]).sum()).collect())
        .collect()
}

fn vecmat(v: &[f64], m: &[Vec<f64>]) -> Vec<f64> {
    (0..v.len()).map(|j| (0..v.len()).map(|k| v[k] * m[k][j]).sum()).collect()
}

pub fn normalize(dist: &BTreeMap<PairKey, f64>) -> BTreeMap<PairKey, f64> {
    let total: f64 = dist.values().sum();
    dist.iter().map(|(k, v)| (k.clone(), v / total)).collect()
}

/// L1 distance between two distributions, restricted to `slot` when given.
pub fn l1(a: &BTreeMap<PairKey, f64>, b: &BTreeMap<PairKey, f64>) -> f64 {
    let mut keys: Vec<&PairKey> = a.keys().chain(b.keys()).collect();
    keys.sort();
    keys.dedup();
    keys.into_iter()
        .map(|k| (a.get(k).copied().unwrap_or(0.0) - b.get(k).copied().unwrap_or(0.0)).abs())
        .sum()
}

pub fn restrict(dist: &BTreeMap<PairKey, f64>, slot: usize) -> BTreeMap<PairKey, f64> {
    dist.iter().filter(|(k, _)| k.0 == slot).map(|(k, v)| (k.clone(), *v)).collect()
}

/// A random skip-gram instance: vertex 0 against context 1 and negatives 2...
pub struct GradientCase {
    pub model: Model64,
    pub negatives: Vec<VertexId>,
    pub dim: usize,
}

pub const CENTER: VertexId = VertexId(0);
pub const POSITIVE: VertexId = VertexId(1);

impl GradientCase {
    pub fn random(rng: &mut ChaCha8Rng, dim: usize) -> GradientCase {
        let k = rng.random_range(0..=5usize);
        let rows = 2 + k;
        let phi = SharedMatrix::from_fn(rows, dim, |_, _| rng.random_range(-0.8..0.8));
        let ctx = SharedMatrix::from_fn(rows, dim, |_, _| rng.random_range(-0.8..0.8));
        GradientCase {
            model: Model64::from_matrices(phi, ctx),
            negatives: (2..rows as u32).map(VertexId).collect(),
            dim,
        }
    }

    pub fn loss(&self) -> f64 {
        let neg: Vec<_> = self.negatives.iter().map(|&k| (CENTER, k)).collect();
        self.model.objective_value(&[(CENTER, POSITIVE)], &neg)
    }

    fn cells(&self) -> Vec<(&SharedMatrix<f64>, VertexId)> {
        let mut out = vec![(self.model.vertex_matrix(), CENTER), (self.model.context_matrix(), POSITIVE)];
        out.extend(self.negatives.iter().map(|&k| (self.model.context_matrix(), k)));
        out
    }

    /// Negated central differences of the loss over every touched parameter.
    pub fn numeric_direction(&self, h: f64) -> Vec<f64> {
        let mut out = Vec::new();
        for (m, row) in self.cells() {
            for c in 0..self.dim {
                let x = m.get(row, c);
                m.set(row, c, x + h);
                let up = self.loss();
                m.set(row, c, x - h);
                let down = self.loss();
                m.set(row, c, x);
                out.push(-(up - down) / (2.0 * h));
            }
        }
        out
    }

    pub fn snapshot(&self) -> Vec<f64> {
        self.cells().into_iter().flat_map(|(m, row)| m.row_vec(row)).collect()
    }

    pub fn step(&self, alpha: f64) {
        let mut scratch = UpdateScratch::new(self.dim);
        self.model.update_pair(&mut scratch, CENTER, POSITIVE, &self.negatives, alpha, true);
    }

    /// Relative error between the applied step divided by `alpha` and the
    /// finite-difference descent direction.
    pub fn step_error(&self, alpha: f64) -> f64 {
        let expected = self.numeric_direction(1e-5);
        let before = self.snapshot();
        self.step(alpha);
        let analytic: Vec<f64> = self.snapshot().iter().zip(&before).map(|(a, b)| (a - b) / alpha).collect();
        let diff: f64 = analytic.iter().zip(&expected).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
        let norm: f64 = expected.iter().map(|y| y * y).sum::<f64>().sqrt();
        diff / norm
    }
}

pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
