use super::{init_rng, run_workers, split, PairSink, SgdSink, TrainConfig, UpdateTarget};
use crate::error::Result;
use crate::graph::Graph;
use crate::optimizer::{EmbeddingModel, TrainProgress};
use crate::sampler::GraphSampler;
use crate::scalar::Scalar;

/// Draws a start vertex by out-weight, walks up to `walk_length` steps from
/// it, and pairs the start vertex with every vertex reached. Only the start
/// vertex's `Φ` row is ever updated; walk vertices and negatives are
/// trained in their context role.
pub fn train_hpe<F: Scalar>(graph: &Graph, cfg: &TrainConfig) -> Result<EmbeddingModel<F>> {
    cfg.validate()?;
    let sampler = GraphSampler::new(graph)?;
    let model = EmbeddingModel::new(graph.vertex_count(), cfg.dimensions, &mut init_rng(cfg.seed, 0));
    let progress = TrainProgress::new(cfg.sample_times * cfg.walk_length as u64, cfg.alpha);
    let models = std::slice::from_ref(&model);
    emit(&sampler, cfg, |_| {
        SgdSink::new(&sampler, UpdateTarget::Models(models), &progress, cfg.negatives, cfg.dimensions)
    });
    Ok(model)
}

pub(super) fn emit<S, M>(sampler: &GraphSampler<'_>, cfg: &TrainConfig, make_sink: M) -> Vec<S>
where
    S: PairSink + Send,
    M: Fn(usize) -> S + Sync,
{
    run_workers(cfg.seed, cfg.workers, make_sink, |worker, rng, sink| {
        for _ in 0..split(cfg.sample_times, worker, cfg.workers) {
            let start = sampler.vertex_sampling(rng);
            let mut next = sampler.context_sampling(start, rng);
            for _ in 0..cfg.walk_length {
                let Some(context) = next else { break };
                sink.pair(0, start, context, rng);
                next = sampler.context_sampling(context, rng);
            }
        }
    })
}
