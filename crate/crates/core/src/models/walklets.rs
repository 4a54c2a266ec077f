use super::deepwalk::for_each_walk;
use super::walk::offset_pairs;
use super::{init_rng, PairSink, SgdSink, TrainConfig, UpdateTarget};
use crate::embeddings::Embeddings;
use crate::error::Result;
use crate::graph::Graph;
use crate::optimizer::{EmbeddingModel, TrainProgress};
use crate::sampler::GraphSampler;
use crate::scalar::Scalar;

/// One independent model per walk step offset.
#[derive(Debug, Clone)]
pub struct WalkletsModel<F: Scalar> {
    pub offsets: Vec<usize>,
    pub models: Vec<EmbeddingModel<F>>,
}

impl<F: Scalar> WalkletsModel<F> {
    /// Per-vertex concatenation of every offset model's `Φ` row.
    pub fn embeddings(&self, names: &[String]) -> Result<Embeddings<F>> {
        let parts: Vec<_> = self
            .models
            .iter()
            .map(|m| Embeddings::from_matrix(names, m.vertex_matrix()))
            .collect();
        Embeddings::concat(&parts)
    }
}

/// Walks as in DeepWalk, but a pair `(v_i, v_{i±k})` only trains the model
/// for offset `k`.
pub fn train_walklets<F: Scalar>(graph: &Graph, cfg: &TrainConfig) -> Result<WalkletsModel<F>> {
    cfg.validate()?;
    let sampler = GraphSampler::new(graph)?;
    let offsets = cfg.offsets();
    let models: Vec<EmbeddingModel<F>> = (0..offsets.len())
        .map(|slot| EmbeddingModel::new(graph.vertex_count(), cfg.dimensions, &mut init_rng(cfg.seed, slot as u64)))
        .collect();

    let steps = cfg.walk_length + 1;
    let per_walk: u64 = offsets.iter().map(|&k| 2 * steps.saturating_sub(k) as u64).sum();
    let progress = TrainProgress::new((cfg.walk_times * graph.vertex_count()) as u64 * per_walk, cfg.alpha);
    emit(&sampler, cfg, |_| {
        SgdSink::new(&sampler, UpdateTarget::Models(&models), &progress, cfg.negatives, cfg.dimensions)
    });
    Ok(WalkletsModel { offsets, models })
}

pub(super) fn emit<S, M>(sampler: &GraphSampler<'_>, cfg: &TrainConfig, make_sink: M) -> Vec<S>
where
    S: PairSink + Send,
    M: Fn(usize) -> S + Sync,
{
    let offsets = cfg.offsets();
    for_each_walk(sampler, cfg, make_sink, |walk, rng, sink| {
        for (slot, &k) in offsets.iter().enumerate() {
            offset_pairs(walk, k, |a, b| sink.pair(slot, a, b, rng));
        }
    })
}
