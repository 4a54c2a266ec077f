use super::{init_rng, run_workers, split, PairSink, SgdSink, TrainConfig, UpdateTarget};
use crate::embeddings::Embeddings;
use crate::error::Result;
use crate::graph::Graph;
use crate::optimizer::{EmbeddingModel, SharedMatrix, TrainProgress};
use crate::sampler::GraphSampler;
use crate::scalar::Scalar;

/// First-order proximity uses one matrix for both roles; second-order uses
/// a vertex/context pair.
#[derive(Debug, Clone)]
pub struct LineModel<F: Scalar> {
    pub first: Option<SharedMatrix<F>>,
    pub second: Option<EmbeddingModel<F>>,
}

impl<F: Scalar> LineModel<F> {
    /// `[Φ_o1 | Φ_o2]` for whichever orders were trained.
    /// Output vectors. With both orders trained, each order's rows are
    /// scaled to unit length before concatenation `[first | second]`.
    pub fn embeddings(&self, names: &[String]) -> Result<Embeddings<F>> {
        let mut parts = Vec::new();
        if let Some(m) = &self.first {
            parts.push(Embeddings::from_matrix(names, m));
        }
        if let Some(m) = &self.second {
            parts.push(Embeddings::from_matrix(names, m.vertex_matrix()));
        }
        if parts.len() > 1 {
            parts.iter_mut().for_each(Embeddings::normalize_rows);
        }
        Embeddings::concat(&parts)
    }
}

/// Draws `sample_times` edges as (source by out-weight, context by edge
/// weight) and updates the selected orders from each.
pub fn train_line<F: Scalar>(graph: &Graph, cfg: &TrainConfig) -> Result<LineModel<F>> {
    cfg.validate()?;
    let sampler = GraphSampler::new(graph)?;
    let (n, d) = (graph.vertex_count(), cfg.dimensions);
    let first = cfg
        .line_order
        .first()
        .then(|| SharedMatrix::uniform(n, d, &mut init_rng(cfg.seed, 0)));
    let second = cfg
        .line_order
        .second()
        .then(|| EmbeddingModel::new(n, d, &mut init_rng(cfg.seed, 1)));

    let progress = TrainProgress::new(cfg.sample_times, cfg.alpha);
    emit(&sampler, cfg, |_| {
        let target = UpdateTarget::Line {
            first: first.as_ref(),
            second: second.as_ref(),
        };
        SgdSink::new(&sampler, target, &progress, cfg.negatives, d)
    });
    Ok(LineModel { first, second })
}

pub(super) fn emit<S, M>(sampler: &GraphSampler<'_>, cfg: &TrainConfig, make_sink: M) -> Vec<S>
where
    S: PairSink + Send,
    M: Fn(usize) -> S + Sync,
{
    run_workers(cfg.seed, cfg.workers, make_sink, |worker, rng, sink| {
        for _ in 0..split(cfg.sample_times, worker, cfg.workers) {
            let source = sampler.vertex_sampling(rng);
            let context = sampler
                .context_sampling(source, rng)
                .expect("sources are drawn only among vertices with out-edges");
            sink.pair(0, source, context, rng);
        }
    })
}
