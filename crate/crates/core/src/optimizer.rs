//! Embedding matrices and the negative-sampling SGD step.
//!
//! For a vertex `i`, positive context `j` and negatives `k`, the loss is
//!
//! ```text
//! -log σ(Φ_i · Φ'_j) - Σ_k log σ(-Φ_i · Φ'_k)
//! ```
//!
//! so the ascent coefficient is `1 - σ(x)` for the positive and `-σ(x)` for
//! each negative. Context rows move by `α g Φ_i` as they are visited; the
//! gradient on `Φ_i` is accumulated against the pre-update context rows and
//! applied once at the end.
//!
//! Matrices are shared between workers without locks (see [`crate::scalar`]).

use std::sync::atomic::{AtomicU64, Ordering};

use rand::Rng;

use crate::graph::VertexId;
use crate::scalar::Scalar;

pub const SIGMOID_BOUND: f64 = 6.0;
pub const SIGMOID_TABLE_SIZE: usize = 1024;

/// Sigmoid sampled on an even grid over `[-6, 6]` with linear interpolation
/// between grid points. Saturates to exactly 0 and 1 outside the range.
#[derive(Debug, Clone)]
pub struct SigmoidTable<F> {
    values: Vec<F>,
    scale: F,
    bound: F,
}

impl<F: Scalar> Default for SigmoidTable<F> {
    fn default() -> Self {
        Self::new()
    }
}

impl<F: Scalar> SigmoidTable<F> {
    pub fn new() -> Self {
        let step = 2.0 * SIGMOID_BOUND / (SIGMOID_TABLE_SIZE - 1) as f64;
        let values = (0..SIGMOID_TABLE_SIZE)
            .map(|i| F::of(sigmoid(-SIGMOID_BOUND + i as f64 * step)))
            .collect();
        SigmoidTable {
            values,
            scale: F::of(1.0 / step),
            bound: F::of(SIGMOID_BOUND),
        }
    }

    #[inline]
    pub fn get(&self, x: F) -> F {
        if x > self.bound {
            return F::one();
        }
        if x < -self.bound {
            return F::zero();
        }
        let pos = (x + self.bound) * self.scale;
        let idx = pos.to_usize().unwrap_or(0).min(SIGMOID_TABLE_SIZE - 2);
        let frac = pos - F::from_usize(idx).unwrap();
        let lo = self.values[idx];
        lo + frac * (self.values[idx + 1] - lo)
    }
}

pub fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// `ln σ(x)`, stable for large |x|.
pub fn log_sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        -(-x).exp().ln_1p()
    } else {
        x - x.exp().ln_1p()
    }
}

/// Dense row-major matrix whose elements can be read and written from many
/// threads at once.
#[derive(Debug)]
pub struct SharedMatrix<F: Scalar> {
    rows: usize,
    dim: usize,
    cells: Vec<F::Cell>,
}

impl<F: Scalar> SharedMatrix<F> {
    pub fn zeros(rows: usize, dim: usize) -> Self {
        Self::from_fn(rows, dim, |_, _| F::zero())
    }

    /// Entries uniform in `[-0.5/dim, 0.5/dim]`.
    pub fn uniform<R: Rng + ?Sized>(rows: usize, dim: usize, rng: &mut R) -> Self {
        let half = 0.5 / dim as f64;
        Self::from_fn(rows, dim, |_, _| F::of(rng.random_range(-half..=half)))
    }

    pub fn from_fn(rows: usize, dim: usize, mut f: impl FnMut(usize, usize) -> F) -> Self {
        let mut cells = Vec::with_capacity(rows * dim);
        for r in 0..rows {
            for c in 0..dim {
                cells.push(F::new_cell(f(r, c)));
            }
        }
        SharedMatrix { rows, dim, cells }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    fn row(&self, r: VertexId) -> &[F::Cell] {
        let start = r.index() * self.dim;
        &self.cells[start..start + self.dim]
    }

    #[inline]
    pub fn get(&self, r: VertexId, c: usize) -> F {
        F::load(&self.row(r)[c])
    }

    #[inline]
    pub fn set(&self, r: VertexId, c: usize, value: F) {
        F::store(&self.row(r)[c], value)
    }

    #[inline]
    pub fn read_row(&self, r: VertexId, out: &mut [F]) {
        for (o, cell) in out.iter_mut().zip(self.row(r)) {
            *o = F::load(cell);
        }
    }

    pub fn row_vec(&self, r: VertexId) -> Vec<F> {
        let mut out = vec![F::zero(); self.dim];
        self.read_row(r, &mut out);
        out
    }

    #[inline]
    pub fn dot(&self, r: VertexId, x: &[F]) -> F {
        self.row(r)
            .iter()
            .zip(x)
            .fold(F::zero(), |acc, (cell, &v)| acc + F::load(cell) * v)
    }

    /// `row += a * x`
    #[inline]
    pub fn axpy(&self, r: VertexId, a: F, x: &[F]) {
        for (cell, &v) in self.row(r).iter().zip(x) {
            F::store(cell, F::load(cell) + a * v);
        }
        debug_assert!(self.row(r).iter().all(|c| F::load(c).is_finite()));
    }

    /// Row-major copy of every element.
    pub fn to_vec(&self) -> Vec<F> {
        self.cells.iter().map(F::load).collect()
    }
}

impl<F: Scalar> Clone for SharedMatrix<F> {
    fn clone(&self) -> Self {
        let data = self.to_vec();
        Self::from_fn(self.rows, self.dim, |r, c| data[r * self.dim + c])
    }
}

/// Per-worker buffers for [`sgd_step`].
#[derive(Debug, Clone)]
pub struct UpdateScratch<F> {
    vertex: Vec<F>,
    grad: Vec<F>,
}

impl<F: Scalar> UpdateScratch<F> {
    pub fn new(dim: usize) -> Self {
        UpdateScratch {
            vertex: vec![F::zero(); dim],
            grad: vec![F::zero(); dim],
        }
    }
}

/// One SGD step for the pair `(vertex, context)` against `negatives`.
///
/// `vertices` and `contexts` may be the same matrix, which gives the
/// single-matrix first-order proximity update. When `update_vertex` is false
/// the vertex row is left untouched and only context rows move.
#[allow(clippy::too_many_arguments)]
pub fn sgd_step<F: Scalar>(
    vertices: &SharedMatrix<F>,
    contexts: &SharedMatrix<F>,
    sigmoid: &SigmoidTable<F>,
    scratch: &mut UpdateScratch<F>,
    vertex: VertexId,
    context: VertexId,
    negatives: &[VertexId],
    alpha: F,
    update_vertex: bool,
) {
    let UpdateScratch { vertex: phi, grad } = scratch;
    vertices.read_row(vertex, phi);
    grad.iter_mut().for_each(|g| *g = F::zero());

    let targets = std::iter::once((context, F::one())).chain(negatives.iter().map(|&k| (k, F::zero())));
    for (target, label) in targets {
        let dot = contexts.dot(target, phi);
        let g = (label - sigmoid.get(dot)) * alpha;
        for (acc, cell) in grad.iter_mut().zip(contexts.row(target)) {
            *acc += g * F::load(cell);
        }
        contexts.axpy(target, g, phi);
    }

    if update_vertex {
        vertices.axpy(vertex, F::one(), grad);
    }
}

/// Vertex-role matrix `Φ` and context-role matrix `Φ'`.
#[derive(Debug, Clone)]
pub struct EmbeddingModel<F: Scalar> {
    vertex: SharedMatrix<F>,
    context: SharedMatrix<F>,
    sigmoid: SigmoidTable<F>,
}

impl<F: Scalar> EmbeddingModel<F> {
    /// `Φ` uniform in `[-0.5/d, 0.5/d]`, `Φ'` all zero.
    pub fn new<R: Rng + ?Sized>(vertices: usize, dim: usize, rng: &mut R) -> Self {
        EmbeddingModel {
            vertex: SharedMatrix::uniform(vertices, dim, rng),
            context: SharedMatrix::zeros(vertices, dim),
            sigmoid: SigmoidTable::new(),
        }
    }

    pub fn from_matrices(vertex: SharedMatrix<F>, context: SharedMatrix<F>) -> Self {
        assert_eq!((vertex.rows(), vertex.dim()), (context.rows(), context.dim()));
        EmbeddingModel {
            vertex,
            context,
            sigmoid: SigmoidTable::new(),
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex.rows()
    }

    pub fn dim(&self) -> usize {
        self.vertex.dim()
    }

    pub fn vertex_matrix(&self) -> &SharedMatrix<F> {
        &self.vertex
    }

    pub fn context_matrix(&self) -> &SharedMatrix<F> {
        &self.context
    }

    pub fn sigmoid(&self) -> &SigmoidTable<F> {
        &self.sigmoid
    }

    /// `σ(Φ_i · Φ'_j)` through the lookup table.
    pub fn score(&self, vertex: VertexId, context: VertexId) -> F {
        let phi = self.vertex.row_vec(vertex);
        self.sigmoid.get(self.context.dot(context, &phi))
    }

    pub fn update_pair(
        &self,
        scratch: &mut UpdateScratch<F>,
        vertex: VertexId,
        context: VertexId,
        negatives: &[VertexId],
        alpha: F,
        update_vertex: bool,
    ) {
        sgd_step(
            &self.vertex,
            &self.context,
            &self.sigmoid,
            scratch,
            vertex,
            context,
            negatives,
            alpha,
            update_vertex,
        );
    }

    /// Loss over explicit positive and negative pairs, with an exact sigmoid.
    pub fn objective_value(&self, positives: &[(VertexId, VertexId)], negatives: &[(VertexId, VertexId)]) -> f64 {
        let dot = |(v, c): (VertexId, VertexId)| {
            let phi = self.vertex.row_vec(v);
            self.context.dot(c, &phi).as_f64()
        };
        let pos: f64 = positives.iter().map(|&p| log_sigmoid(dot(p))).sum();
        let neg: f64 = negatives.iter().map(|&p| log_sigmoid(-dot(p))).sum();
        -pos - neg
    }
}

/// Linear learning-rate decay driven by a shared update counter.
#[derive(Debug)]
pub struct TrainProgress {
    total: u64,
    completed: AtomicU64,
    alpha0: f64,
    alpha_min: f64,
}

impl TrainProgress {
    pub fn new(total: u64, alpha0: f64) -> Self {
        TrainProgress {
            total: total.max(1),
            completed: AtomicU64::new(0),
            alpha0,
            alpha_min: alpha0 * 1e-4,
        }
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn completed(&self) -> u64 {
        self.completed.load(Ordering::Relaxed)
    }

    pub fn advance(&self, updates: u64) {
        self.completed.fetch_add(updates, Ordering::Relaxed);
    }

    /// `max(α_min, α₀ (1 - completed / total))`
    pub fn alpha(&self) -> f64 {
        decay_alpha(self.alpha0, self.alpha_min, self.completed(), self.total)
    }

    pub fn alpha_min(&self) -> f64 {
        self.alpha_min
    }
}

pub fn decay_alpha(alpha0: f64, alpha_min: f64, completed: u64, total: u64) -> f64 {
    let remaining = 1.0 - completed as f64 / total.max(1) as f64;
    (alpha0 * remaining).max(alpha_min)
}
