use std::ops::Range;

use rand::seq::SliceRandom;

use super::walk::{generate_walk_into, window_pair_count, window_pairs};
use super::{init_rng, run_workers, shuffle_rng, split, PairSink, SgdSink, TrainConfig, UpdateTarget};
use crate::error::Result;
use crate::graph::{Graph, VertexId};
use crate::optimizer::{EmbeddingModel, TrainProgress};
use crate::sampler::GraphSampler;
use crate::scalar::Scalar;

/// Skip-gram over weighted walks: every epoch starts one walk from each
/// vertex in a seeded shuffled order and trains on all window pairs.
pub fn train_deepwalk<F: Scalar>(graph: &Graph, cfg: &TrainConfig) -> Result<EmbeddingModel<F>> {
    cfg.validate()?;
    let sampler = GraphSampler::new(graph)?;
    let model = EmbeddingModel::new(graph.vertex_count(), cfg.dimensions, &mut init_rng(cfg.seed, 0));
    let budget = (cfg.walk_times * graph.vertex_count()) as u64 * window_pair_count(cfg.walk_length + 1, cfg.window);
    let progress = TrainProgress::new(budget, cfg.alpha);
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
    for_each_walk(sampler, cfg, make_sink, |walk, rng, sink| {
        window_pairs(walk, cfg.window, |a, b| sink.pair(0, a, b, rng));
    })
}

/// Drives `visit` over `walk_times` epochs of walks, one per start vertex
/// per epoch. Each epoch's shuffled start order is split into contiguous
/// chunks, one per worker.
pub(super) fn for_each_walk<S, M, V>(sampler: &GraphSampler<'_>, cfg: &TrainConfig, make_sink: M, visit: V) -> Vec<S>
where
    S: PairSink + Send,
    M: Fn(usize) -> S + Sync,
    V: Fn(&[VertexId], &mut super::WorkerRng, &mut S) + Sync,
{
    let n = sampler.graph().vertex_count();
    run_workers(cfg.seed, cfg.workers, make_sink, |worker, rng, sink| {
        let chunk = chunk_range(n, worker, cfg.workers);
        let mut order: Vec<VertexId> = Vec::with_capacity(n);
        let mut walk = Vec::with_capacity(cfg.walk_length + 1);
        for epoch in 0..cfg.walk_times {
            order.clear();
            order.extend((0..n).map(VertexId::from));
            order.shuffle(&mut shuffle_rng(cfg.seed, epoch));
            for &start in &order[chunk.clone()] {
                generate_walk_into(sampler, start, cfg.walk_length, rng, &mut walk);
                visit(&walk, rng, sink);
            }
        }
    })
}

fn chunk_range(n: usize, worker: usize, workers: usize) -> Range<usize> {
    let start: u64 = (0..worker).map(|w| split(n as u64, w, workers)).sum();
    let len = split(n as u64, worker, workers);
    start as usize..(start + len) as usize
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Edge;
    use crate::models::{pair_counts, ModelKind};

    fn chain() -> Graph {
        Graph::from_edges(&[Edge::new("a", "b", 1.0), Edge::new("b", "c", 1.0)]).unwrap()
    }

    #[test]
    fn chunks_partition_vertices() {
        for n in [1, 5, 8, 13] {
            for workers in 1..5 {
                let mut covered = Vec::new();
                for w in 0..workers {
                    covered.extend(chunk_range(n, w, workers));
                }
                assert_eq!(covered, (0..n).collect::<Vec<_>>());
            }
        }
    }

    #[test]
    fn chain_pairs() {
        let cfg = TrainConfig {
            model: ModelKind::DeepWalk,
            walk_times: 3,
            walk_length: 2,
            window: 1,
            ..Default::default()
        };
        let counts = pair_counts(&chain(), &cfg).unwrap();
        let (a, b, c) = (VertexId(0), VertexId(1), VertexId(2));
        // per epoch: walk abc gives ab ba bc cb, walk bc gives bc cb, walk c nothing
        assert_eq!(counts[&(0, a, b)], 3);
        assert_eq!(counts[&(0, b, a)], 3);
        assert_eq!(counts[&(0, b, c)], 6);
        assert_eq!(counts[&(0, c, b)], 6);
        assert_eq!(counts.len(), 4);
    }

    #[test]
    fn single_worker_is_deterministic() {
        let cfg = TrainConfig {
            dimensions: 4,
            walk_times: 5,
            walk_length: 4,
            window: 2,
            negatives: 2,
            ..Default::default()
        };
        let a = train_deepwalk::<f32>(&chain(), &cfg).unwrap();
        let b = train_deepwalk::<f32>(&chain(), &cfg).unwrap();
        assert_eq!(a.vertex_matrix().to_vec(), b.vertex_matrix().to_vec());
        assert_eq!(a.context_matrix().to_vec(), b.context_matrix().to_vec());
    }
}
