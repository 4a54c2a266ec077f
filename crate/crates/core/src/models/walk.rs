use rand::Rng;

use crate::graph::VertexId;
use crate::sampler::GraphSampler;

/// Weighted random walk of at most `length` steps from `start`, written into
/// `walk`. Stops early at a vertex without out-edges.
pub fn generate_walk_into<R: Rng + ?Sized>(
    sampler: &GraphSampler<'_>,
    start: VertexId,
    length: usize,
    rng: &mut R,
    walk: &mut Vec<VertexId>,
) {
    walk.clear();
    walk.push(start);
    let mut current = start;
    for _ in 0..length {
        match sampler.context_sampling(current, rng) {
            Some(next) => {
                walk.push(next);
                current = next;
            }
            None => break,
        }
    }
}

pub fn generate_walk<R: Rng + ?Sized>(
    sampler: &GraphSampler<'_>,
    start: VertexId,
    length: usize,
    rng: &mut R,
) -> Vec<VertexId> {
    let mut walk = Vec::with_capacity(length + 1);
    generate_walk_into(sampler, start, length, rng, &mut walk);
    walk
}

/// Calls `emit(walk[i], walk[j])` for every `j` within `window` of `i`,
/// clipped to the walk, `j != i`.
pub fn window_pairs(walk: &[VertexId], window: usize, mut emit: impl FnMut(VertexId, VertexId)) {
    for i in 0..walk.len() {
        let lo = i.saturating_sub(window);
        let hi = (i + window).min(walk.len() - 1);
        for j in lo..=hi {
            if j != i {
                emit(walk[i], walk[j]);
            }
        }
    }
}

/// Calls `emit(walk[i], walk[i ± offset])` for every position where the
/// partner lies inside the walk.
pub fn offset_pairs(walk: &[VertexId], offset: usize, mut emit: impl FnMut(VertexId, VertexId)) {
    for i in 0..walk.len() {
        if i >= offset {
            emit(walk[i], walk[i - offset]);
        }
        if i + offset < walk.len() {
            emit(walk[i], walk[i + offset]);
        }
    }
}

/// Number of window pairs produced by an untruncated walk of `len` vertices.
pub fn window_pair_count(len: usize, window: usize) -> u64 {
    (0..len)
        .map(|i| (i.min(window) + (len - 1 - i).min(window)) as u64)
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{Edge, Graph};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::collections::BTreeSet;

    fn ids(xs: &[u32]) -> Vec<VertexId> {
        xs.iter().map(|&x| VertexId(x)).collect()
    }

    fn collect(f: impl FnOnce(&mut dyn FnMut(VertexId, VertexId))) -> BTreeSet<(u32, u32)> {
        let mut out = BTreeSet::new();
        f(&mut |a: VertexId, b: VertexId| {
            out.insert((a.0, b.0));
        });
        out
    }

    #[test]
    fn chain_walk_is_unique() {
        let g = Graph::from_edges(&[Edge::new("a", "b", 1.0), Edge::new("b", "c", 1.0)]).unwrap();
        let s = GraphSampler::new(&g).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert_eq!(generate_walk(&s, VertexId(0), 2, &mut rng), ids(&[0, 1, 2]));
        assert_eq!(generate_walk(&s, VertexId(2), 5, &mut rng), ids(&[2]));
        assert_eq!(generate_walk(&s, VertexId(0), 5, &mut rng), ids(&[0, 1, 2]));
    }

    #[test]
    fn second_step_follows_weights() {
        let g = Graph::from_edges(&[Edge::new("a", "b", 1.0), Edge::new("a", "c", 3.0)]).unwrap();
        let s = GraphSampler::new(&g).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mut walk = Vec::new();
        let mut hits = 0;
        for _ in 0..1_000_000 {
            generate_walk_into(&s, VertexId(0), 1, &mut rng, &mut walk);
            hits += (walk[1] == VertexId(2)) as usize;
        }
        assert!((hits as f64 / 1e6 - 0.75).abs() < 0.005);
    }

    #[test]
    fn window_enumeration() {
        let walk = ids(&[0, 1, 2]);
        let pairs = collect(|emit| window_pairs(&walk, 1, emit));
        assert_eq!(pairs, [(0, 1), (1, 0), (1, 2), (2, 1)].into_iter().collect());
    }

    #[test]
    fn offset_enumeration() {
        let walk = ids(&[0, 1, 2, 3]);
        let pairs = collect(|emit| offset_pairs(&walk, 2, emit));
        assert_eq!(pairs, [(0, 2), (2, 0), (1, 3), (3, 1)].into_iter().collect());
    }

    #[test]
    fn pair_counts_match_enumeration() {
        for len in 1..12 {
            for w in 1..6 {
                let walk: Vec<VertexId> = (0..len as u32).map(VertexId).collect();
                let mut n = 0;
                window_pairs(&walk, w, |_, _| n += 1);
                assert_eq!(n, window_pair_count(len, w));
            }
        }
    }
}
