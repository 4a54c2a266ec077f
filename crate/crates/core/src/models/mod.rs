//! Training procedures built on vertex-context sampling.
//!
//! Every trainer is split into an emission loop, which draws positive
//! `(vertex, context)` pairs from the graph, and a [`PairSink`] that consumes
//! them. Training plugs in a sink that draws negatives and applies an SGD
//! step; [`pair_counts`] plugs in a counting sink so the emitted pair
//! distribution can be audited through exactly the same code path.

mod config;
mod deepwalk;
mod hpe;
mod line;
pub mod walk;
mod walklets;

use std::collections::HashMap;
use std::thread;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub use config::{LineOrder, ModelKind, TrainConfig};
pub use deepwalk::train_deepwalk;
pub use hpe::train_hpe;
pub use line::{train_line, LineModel};
pub use walk::{generate_walk, generate_walk_into, offset_pairs, window_pairs};
pub use walklets::{train_walklets, WalkletsModel};

use crate::embeddings::Embeddings;
use crate::error::Result;
use crate::graph::{Graph, VertexId};
use crate::optimizer::{sgd_step, EmbeddingModel, SharedMatrix, SigmoidTable, TrainProgress, UpdateScratch};
use crate::sampler::GraphSampler;
use crate::scalar::Scalar;

pub type WorkerRng = ChaCha8Rng;

/// Consumer of positive pairs. `slot` selects which of a trainer's
/// independent models the pair belongs to (the step offset for Walklets,
/// always 0 otherwise).
pub trait PairSink {
    fn pair(&mut self, slot: usize, vertex: VertexId, context: VertexId, rng: &mut WorkerRng);
}

const INIT_STREAM: u64 = 1;
const SHUFFLE_STREAM: u64 = 1 << 32;

/// Generator used to initialize model parameters.
pub(crate) fn init_rng(seed: u64, model: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(INIT_STREAM + model);
    rng
}

/// Worker `w` draws from a generator seeded with `seed + w`.
pub(crate) fn worker_rng(seed: u64, worker: usize) -> WorkerRng {
    ChaCha8Rng::seed_from_u64(seed.wrapping_add(worker as u64))
}

pub(crate) fn shuffle_rng(seed: u64, epoch: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(SHUFFLE_STREAM + epoch as u64);
    rng
}

/// Share of `total` units handled by `worker` out of `workers`.
pub(crate) fn split(total: u64, worker: usize, workers: usize) -> u64 {
    let (w, n) = (worker as u64, workers as u64);
    total / n + u64::from(w < total % n)
}

/// Runs `emit` on `workers` threads, each with its own sink and generator,
/// and returns the sinks in worker order.
pub(crate) fn run_workers<S, M, E>(seed: u64, workers: usize, make_sink: M, emit: E) -> Vec<S>
where
    S: Send,
    M: Fn(usize) -> S + Sync,
    E: Fn(usize, &mut WorkerRng, &mut S) + Sync,
{
    let run = |worker: usize| {
        let mut sink = make_sink(worker);
        let mut rng = worker_rng(seed, worker);
        emit(worker, &mut rng, &mut sink);
        sink
    };
    if workers <= 1 {
        return vec![run(0)];
    }
    thread::scope(|scope| {
        let handles: Vec<_> = (0..workers).map(|w| scope.spawn(move || run(w))).collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("training worker panicked"))
            .collect()
    })
}

pub(crate) enum UpdateTarget<'a, F: Scalar> {
    /// One `Φ/Φ'` model per slot.
    Models(&'a [EmbeddingModel<F>]),
    /// Single-matrix first-order model and/or `Φ/Φ'` second-order model,
    /// both updated from the same pair and negatives.
    Line {
        first: Option<&'a SharedMatrix<F>>,
        second: Option<&'a EmbeddingModel<F>>,
    },
}

/// Progress is published to the shared counter in batches of this many updates.
const PROGRESS_BATCH: u64 = 1024;

pub(crate) struct SgdSink<'a, F: Scalar> {
    sampler: &'a GraphSampler<'a>,
    target: UpdateTarget<'a, F>,
    progress: &'a TrainProgress,
    negatives: usize,
    neg_buf: Vec<VertexId>,
    scratch: UpdateScratch<F>,
    sigmoid: SigmoidTable<F>,
    pending: u64,
    alpha: F,
}

impl<'a, F: Scalar> SgdSink<'a, F> {
    pub(crate) fn new(
        sampler: &'a GraphSampler<'a>,
        target: UpdateTarget<'a, F>,
        progress: &'a TrainProgress,
        negatives: usize,
        dim: usize,
    ) -> Self {
        SgdSink {
            sampler,
            target,
            progress,
            negatives,
            neg_buf: Vec::with_capacity(negatives),
            scratch: UpdateScratch::new(dim),
            sigmoid: SigmoidTable::new(),
            pending: 0,
            alpha: F::of(progress.alpha()),
        }
    }

    fn flush(&mut self) {
        self.progress.advance(self.pending);
        self.pending = 0;
        self.alpha = F::of(self.progress.alpha());
    }
}

impl<F: Scalar> Drop for SgdSink<'_, F> {
    fn drop(&mut self) {
        self.flush();
    }
}

impl<F: Scalar> PairSink for SgdSink<'_, F> {
    fn pair(&mut self, slot: usize, vertex: VertexId, context: VertexId, rng: &mut WorkerRng) {
        self.neg_buf.clear();
        for _ in 0..self.negatives {
            self.neg_buf.push(self.sampler.negative_sampling(rng));
        }
        match &self.target {
            UpdateTarget::Models(models) => {
                models[slot].update_pair(&mut self.scratch, vertex, context, &self.neg_buf, self.alpha, true);
            }
            UpdateTarget::Line { first, second } => {
                if let Some(m) = first {
                    sgd_step(
                        m,
                        m,
                        &self.sigmoid,
                        &mut self.scratch,
                        vertex,
                        context,
                        &self.neg_buf,
                        self.alpha,
                        true,
                    );
                }
                if let Some(m) = second {
                    m.update_pair(&mut self.scratch, vertex, context, &self.neg_buf, self.alpha, true);
                }
            }
        }
        self.pending += 1;
        if self.pending == PROGRESS_BATCH {
            self.flush();
        }
    }
}

#[derive(Debug, Default)]
struct CountingSink {
    counts: HashMap<(usize, VertexId, VertexId), u64>,
}

impl PairSink for CountingSink {
    fn pair(&mut self, slot: usize, vertex: VertexId, context: VertexId, _rng: &mut WorkerRng) {
        *self.counts.entry((slot, vertex, context)).or_default() += 1;
    }
}

/// Positive pairs `(slot, vertex, context)` emitted by the trainer selected
/// in `cfg`, with their multiplicities. No parameters are updated.
pub fn pair_counts(graph: &Graph, cfg: &TrainConfig) -> Result<HashMap<(usize, VertexId, VertexId), u64>> {
    cfg.validate()?;
    let sampler = GraphSampler::new(graph)?;
    let sinks = emit_all(&sampler, cfg, |_| CountingSink::default());
    let mut total: HashMap<_, u64> = HashMap::new();
    for sink in sinks {
        for (k, c) in sink.counts {
            *total.entry(k).or_default() += c;
        }
    }
    Ok(total)
}

/// Runs the emission loop of `cfg.model` across all workers.
pub(crate) fn emit_all<S, M>(sampler: &GraphSampler<'_>, cfg: &TrainConfig, make_sink: M) -> Vec<S>
where
    S: PairSink + Send,
    M: Fn(usize) -> S + Sync,
{
    match cfg.model {
        ModelKind::DeepWalk => deepwalk::emit(sampler, cfg, make_sink),
        ModelKind::Walklets => walklets::emit(sampler, cfg, make_sink),
        ModelKind::Line => line::emit(sampler, cfg, make_sink),
        ModelKind::Hpe => hpe::emit(sampler, cfg, make_sink),
    }
}

/// Trains the model selected in `cfg` and returns the per-vertex output
/// vectors (concatenated for Walklets and two-order LINE).
pub fn train<F: Scalar>(graph: &Graph, cfg: &TrainConfig) -> Result<Embeddings<F>> {
    let names = graph.names();
    Ok(match cfg.model {
        ModelKind::DeepWalk => {
            Embeddings::from_matrix(names, train_deepwalk::<F>(graph, cfg)?.vertex_matrix())
        }
        ModelKind::Walklets => train_walklets::<F>(graph, cfg)?.embeddings(names)?,
        ModelKind::Line => train_line::<F>(graph, cfg)?.embeddings(names)?,
        ModelKind::Hpe => Embeddings::from_matrix(names, train_hpe::<F>(graph, cfg)?.vertex_matrix()),
    })
}
