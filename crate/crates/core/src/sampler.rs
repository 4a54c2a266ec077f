//! Vertex, context and negative sampling over a [`Graph`].
//!
//! Three alias structures are kept:
//!
//! * a source table over out-weight sums, where the cell index is the vertex
//!   id (no reference array);
//! * one sub-table per context block, stored back to back in two flat arrays
//!   of length |E| and resolved to vertices through the graph's own target
//!   array;
//! * a negative table over `ln(1 + in_weight)`.
//!
//! Every draw is a single uniform variate and constant work.

use std::fmt;

use rand::Rng;

use crate::alias::{self, AliasTable};
use crate::error::{Error, Result};
use crate::graph::{Graph, VertexId, VertexType};

/// Element counts of the sampler's arrays.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SizeReport {
    pub source_cells: usize,
    pub context_cells: usize,
    pub context_refs: usize,
    pub negative_cells: usize,
}

impl fmt::Display for SizeReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "source_cells: {}", self.source_cells)?;
        writeln!(f, "context_cells: {}", self.context_cells)?;
        writeln!(f, "context_refs: {}", self.context_refs)?;
        write!(f, "negative_cells: {}", self.negative_cells)
    }
}

#[derive(Debug, Clone)]
struct TypedGroup {
    ty: VertexType,
    start: usize,
    end: usize,
}

/// Context sub-blocks split by target partition, for typed graphs only.
#[derive(Debug, Clone)]
struct TypedTables {
    sources: Vec<Option<(AliasTable, Vec<VertexId>)>>,
    group_offsets: Vec<usize>,
    groups: Vec<TypedGroup>,
    targets: Vec<VertexId>,
    prob: Vec<f64>,
    alias: Vec<u32>,
}

#[derive(Debug, Clone)]
pub struct GraphSampler<'g> {
    graph: &'g Graph,
    source: AliasTable,
    context_prob: Vec<f64>,
    context_alias: Vec<u32>,
    negative: AliasTable,
    typed: Option<TypedTables>,
}

impl<'g> GraphSampler<'g> {
    pub fn new(graph: &'g Graph) -> Result<Self> {
        let total = graph.total_weight();
        if total.is_nan() || total <= 0.0 {
            return Err(Error::ZeroWeight);
        }

        let source = AliasTable::from_nonnegative(graph.out_weight_sums())?;

        let mut context_prob = vec![0.0; graph.edge_count()];
        let mut context_alias = vec![0u32; graph.edge_count()];
        for v in graph.vertices() {
            let range = graph.block_range(v);
            if range.is_empty() {
                continue;
            }
            let (_, weights) = graph.context_block(v);
            alias::build_into(
                weights,
                &mut context_prob[range.clone()],
                &mut context_alias[range],
            );
        }

        let noise: Vec<f64> = graph.in_weight_sums().iter().map(|&w| w.ln_1p()).collect();
        let negative = AliasTable::from_nonnegative(&noise)?;

        let typed = graph.is_typed().then(|| build_typed(graph)).transpose()?;

        Ok(GraphSampler {
            graph,
            source,
            context_prob,
            context_alias,
            negative,
            typed,
        })
    }

    pub fn graph(&self) -> &'g Graph {
        self.graph
    }

    /// Draws a vertex with probability proportional to its out-weight sum.
    #[inline]
    pub fn vertex_sampling<R: Rng + ?Sized>(&self, rng: &mut R) -> VertexId {
        VertexId::from(self.source.draw(rng))
    }

    /// Draws a neighbor of `v` proportionally to edge weight, or `None` when
    /// `v` has no out-edges.
    #[inline]
    pub fn context_sampling<R: Rng + ?Sized>(&self, v: VertexId, rng: &mut R) -> Option<VertexId> {
        let range = self.graph.block_range(v);
        if range.is_empty() {
            return None;
        }
        let local = alias::pick(
            &self.context_prob[range.clone()],
            &self.context_alias[range],
            rng.random::<f64>(),
        );
        Some(self.graph.context_block(v).0[local])
    }

    /// Draws a noise vertex with probability proportional to `ln(1 + in_weight)`.
    #[inline]
    pub fn negative_sampling<R: Rng + ?Sized>(&self, rng: &mut R) -> VertexId {
        VertexId::from(self.negative.draw(rng))
    }

    /// Vertex sampling restricted to one partition. `None` when the partition
    /// has no vertex with out-edges.
    pub fn typed_vertex_sampling<R: Rng + ?Sized>(
        &self,
        ty: VertexType,
        rng: &mut R,
    ) -> Option<VertexId> {
        match &self.typed {
            Some(tables) => {
                let (table, ids) = tables.sources.get(ty as usize)?.as_ref()?;
                Some(ids[table.draw(rng)])
            }
            None => (ty == 0).then(|| self.vertex_sampling(rng)),
        }
    }

    /// Context sampling restricted to neighbors in partition `ty`.
    pub fn typed_context_sampling<R: Rng + ?Sized>(
        &self,
        v: VertexId,
        ty: VertexType,
        rng: &mut R,
    ) -> Option<VertexId> {
        let Some(tables) = &self.typed else {
            return if ty == 0 { self.context_sampling(v, rng) } else { None };
        };
        let groups = &tables.groups[tables.group_offsets[v.index()]..tables.group_offsets[v.index() + 1]];
        let group = groups.iter().find(|g| g.ty == ty)?;
        let local = alias::pick(
            &tables.prob[group.start..group.end],
            &tables.alias[group.start..group.end],
            rng.random::<f64>(),
        );
        Some(tables.targets[group.start + local])
    }

    pub fn size_report(&self) -> SizeReport {
        SizeReport {
            source_cells: self.source.len(),
            context_cells: self.context_prob.len(),
            context_refs: self.graph.edge_count(),
            negative_cells: self.negative.len(),
        }
    }

    pub fn source_table(&self) -> &AliasTable {
        &self.source
    }

    pub fn negative_table(&self) -> &AliasTable {
        &self.negative
    }
}

fn build_typed(graph: &Graph) -> Result<TypedTables> {
    let max_type = graph.vertex_types().iter().copied().max().unwrap_or(0) as usize;

    let mut sources = Vec::with_capacity(max_type + 1);
    for ty in 0..=max_type {
        let ids: Vec<VertexId> = graph
            .vertices()
            .filter(|&v| graph.vertex_type(v) as usize == ty && graph.out_weight_sums()[v.index()] > 0.0)
            .collect();
        if ids.is_empty() {
            sources.push(None);
            continue;
        }
        let weights: Vec<f64> = ids.iter().map(|v| graph.out_weight_sums()[v.index()]).collect();
        sources.push(Some((AliasTable::new(&weights)?, ids)));
    }

    let mut group_offsets = Vec::with_capacity(graph.vertex_count() + 1);
    let mut groups = Vec::new();
    let mut targets = Vec::with_capacity(graph.edge_count());
    let mut weights = Vec::with_capacity(graph.edge_count());
    group_offsets.push(0);
    for v in graph.vertices() {
        let (block_targets, block_weights) = graph.context_block(v);
        let mut order: Vec<usize> = (0..block_targets.len()).collect();
        order.sort_by_key(|&i| (graph.vertex_type(block_targets[i]), block_targets[i]));
        let first_group = groups.len();
        for i in order {
            let ty = graph.vertex_type(block_targets[i]);
            let pos = targets.len();
            let extends_last = groups.len() > first_group && groups.last().map(|g: &TypedGroup| g.ty) == Some(ty);
            if extends_last {
                groups.last_mut().unwrap().end = pos + 1;
            } else {
                groups.push(TypedGroup {
                    ty,
                    start: pos,
                    end: pos + 1,
                });
            }
            targets.push(block_targets[i]);
            weights.push(block_weights[i]);
        }
        group_offsets.push(groups.len());
    }

    let mut prob = vec![0.0; targets.len()];
    let mut alias_idx = vec![0u32; targets.len()];
    for g in &groups {
        alias::build_into(
            &weights[g.start..g.end],
            &mut prob[g.start..g.end],
            &mut alias_idx[g.start..g.end],
        );
    }

    Ok(TypedTables {
        sources,
        group_offsets,
        groups,
        targets,
        prob,
        alias: alias_idx,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Edge;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::collections::HashMap;

    const DRAWS: usize = 1_000_000;

    fn graph(edges: &[(&str, &str, f64)]) -> Graph {
        let edges: Vec<Edge> = edges.iter().map(|&(s, t, w)| Edge::new(s, t, w)).collect();
        Graph::from_edges(&edges).unwrap()
    }

    fn frequencies(n: usize, mut draw: impl FnMut() -> usize) -> Vec<f64> {
        let mut counts = vec![0usize; n];
        for _ in 0..DRAWS {
            counts[draw()] += 1;
        }
        counts.iter().map(|&c| c as f64 / DRAWS as f64).collect()
    }

    fn l1(a: &[f64], b: &[f64]) -> f64 {
        a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum()
    }

    fn rng() -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(42)
    }

    #[test]
    fn chain_source_and_negative_tables() {
        let g = graph(&[("a", "b", 1.0), ("b", "c", 1.0)]);
        let s = GraphSampler::new(&g).unwrap();
        let src = s.source_table().reconstructed_probabilities();
        assert_eq!(src[2], 0.0);
        assert!((src[0] - 0.5).abs() < 1e-12);

        let mut r = rng();
        let freq = frequencies(3, || s.vertex_sampling(&mut r).index());
        assert_eq!(freq[2], 0.0);
        assert!((freq[0] - 0.5).abs() < 0.005);

        let neg = s.negative_table().reconstructed_probabilities();
        assert_eq!(neg[0], 0.0);
        assert!((neg[1] - 0.5).abs() < 1e-12);
        assert!((neg[2] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn star_context_sampling() {
        let g = graph(&[("center", "x", 1.0), ("center", "y", 3.0)]);
        let s = GraphSampler::new(&g).unwrap();
        let center = g.vertex_id("center").unwrap();
        let mut r = rng();
        let freq = frequencies(3, || s.context_sampling(center, &mut r).unwrap().index());
        assert!(l1(&freq, &[0.0, 0.25, 0.75]) < 0.005, "{freq:?}");
    }

    #[test]
    fn vertex_sampling_cases() {
        let g = graph(&[("a", "b", 1.0)]);
        let s = GraphSampler::new(&g).unwrap();
        let mut r = rng();
        assert!((0..1000).all(|_| s.vertex_sampling(&mut r) == VertexId(0)));

        let g = graph(&[("a", "b", 1.0), ("c", "b", 1.0)]);
        let s = GraphSampler::new(&g).unwrap();
        let freq = frequencies(3, || s.vertex_sampling(&mut r).index());
        assert!((freq[0] - 0.5).abs() < 0.005 && (freq[2] - 0.5).abs() < 0.005);

        // out-weights (1, 2, 0)
        let g = graph(&[("a", "b", 1.0), ("b", "c", 2.0)]);
        let s = GraphSampler::new(&g).unwrap();
        let freq = frequencies(3, || s.vertex_sampling(&mut r).index());
        assert!(l1(&freq, &[1.0 / 3.0, 2.0 / 3.0, 0.0]) < 0.005, "{freq:?}");
    }

    #[test]
    fn context_sampling_cases() {
        let g = graph(&[("v", "u", 1.0), ("w", "x", 1.0), ("w", "y", 1.0), ("z", "x", 1.0), ("z", "y", 4.0)]);
        let s = GraphSampler::new(&g).unwrap();
        let mut r = rng();
        let v = g.vertex_id("v").unwrap();
        let u = g.vertex_id("u").unwrap();
        assert!((0..1000).all(|_| s.context_sampling(v, &mut r) == Some(u)));
        assert_eq!(s.context_sampling(u, &mut r), None);

        let (x, y) = (g.vertex_id("x").unwrap().index(), g.vertex_id("y").unwrap().index());
        let w = g.vertex_id("w").unwrap();
        let freq = frequencies(g.vertex_count(), || s.context_sampling(w, &mut r).unwrap().index());
        assert!((freq[x] - 0.5).abs() < 0.005);

        let z = g.vertex_id("z").unwrap();
        let freq = frequencies(g.vertex_count(), || s.context_sampling(z, &mut r).unwrap().index());
        assert!((freq[x] - 0.2).abs() + (freq[y] - 0.8).abs() < 0.005);
    }

    #[test]
    fn negative_sampling_cases() {
        let mut r = rng();
        let e = std::f64::consts::E;

        // in-weights (0, e-1, e-1)
        let g = graph(&[("a", "b", e - 1.0), ("a", "c", e - 1.0)]);
        let s = GraphSampler::new(&g).unwrap();
        let freq = frequencies(3, || s.negative_sampling(&mut r).index());
        assert_eq!(freq[0], 0.0);
        assert!((freq[1] - 0.5).abs() < 0.005);

        // in-weights (e-1, e^2-1) on a two-cycle: ln ratios 1:2
        let g = graph(&[("a", "b", e * e - 1.0), ("b", "a", e - 1.0)]);
        let s = GraphSampler::new(&g).unwrap();
        let freq = frequencies(2, || s.negative_sampling(&mut r).index());
        assert!(l1(&freq, &[1.0 / 3.0, 2.0 / 3.0]) < 0.005, "{freq:?}");

        // equal in-weights are uniform over vertices that have in-edges
        let g = graph(&[("a", "b", 2.0), ("a", "c", 2.0), ("a", "d", 2.0)]);
        let s = GraphSampler::new(&g).unwrap();
        let freq = frequencies(4, || s.negative_sampling(&mut r).index());
        assert!(l1(&freq, &[0.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0]) < 0.005);
    }

    fn typed_graph() -> Graph {
        let edges = vec![
            Edge::new("v", "item1", 1.0),
            Edge::new("v", "item2", 1.0),
            Edge::new("v", "user2", 5.0),
            Edge::new("user2", "item1", 2.0),
        ];
        let types: HashMap<String, VertexType> = [("v", 0), ("user2", 0), ("item1", 1), ("item2", 1)]
            .into_iter()
            .map(|(k, t)| (k.to_string(), t))
            .collect();
        Graph::from_typed_edges(&edges, &types).unwrap()
    }

    #[test]
    fn typed_context_sampling_renormalizes() {
        let g = typed_graph();
        let s = GraphSampler::new(&g).unwrap();
        let v = g.vertex_id("v").unwrap();
        let mut r = rng();
        let freq = frequencies(g.vertex_count(), || s.typed_context_sampling(v, 1, &mut r).unwrap().index());
        let (i1, i2) = (g.vertex_id("item1").unwrap().index(), g.vertex_id("item2").unwrap().index());
        assert!((freq[i1] - 0.5).abs() < 0.005 && (freq[i2] - 0.5).abs() < 0.005);
        assert!((freq[i1] + freq[i2] - 1.0).abs() < 1e-12);

        let user2 = g.vertex_id("user2").unwrap();
        assert!((0..100).all(|_| s.typed_context_sampling(v, 0, &mut r) == Some(user2)));
        assert_eq!(s.typed_context_sampling(user2, 0, &mut r), None);
        assert_eq!(s.typed_context_sampling(v, 7, &mut r), None);
    }

    #[test]
    fn typed_vertex_sampling_restricts_partition() {
        let edges = vec![
            Edge::new("u1", "i1", 1.0),
            Edge::new("i1", "u1", 1.0),
            Edge::new("u2", "i2", 3.0),
            Edge::new("i2", "u2", 3.0),
        ];
        let types: HashMap<String, VertexType> = [("u1", 0), ("u2", 0), ("i1", 1), ("i2", 1)]
            .into_iter()
            .map(|(k, t)| (k.to_string(), t))
            .collect();
        let g = Graph::from_typed_edges(&edges, &types).unwrap();
        let s = GraphSampler::new(&g).unwrap();
        let mut r = rng();
        for _ in 0..1000 {
            let v = s.typed_vertex_sampling(1, &mut r).unwrap();
            assert_eq!(g.vertex_type(v), 1);
        }
        assert_eq!(s.typed_vertex_sampling(2, &mut r), None);
    }

    #[test]
    fn size_report_counts() {
        let chain = graph(&[("a", "b", 1.0), ("b", "c", 1.0)]);
        let report = GraphSampler::new(&chain).unwrap().size_report();
        assert_eq!(
            report,
            SizeReport {
                source_cells: 3,
                context_cells: 2,
                context_refs: 2,
                negative_cells: 3
            }
        );
        assert!(report.to_string().starts_with("source_cells: 3\n"));

        let clique = graph(&[
            ("a", "b", 1.0),
            ("b", "a", 1.0),
            ("b", "c", 1.0),
            ("c", "b", 1.0),
            ("a", "c", 1.0),
            ("c", "a", 1.0),
        ]);
        assert_eq!(GraphSampler::new(&clique).unwrap().size_report().context_cells, 6);

        let single = graph(&[("a", "b", 1.0)]);
        let report = GraphSampler::new(&single).unwrap().size_report();
        assert_eq!((report.source_cells, report.context_cells), (2, 1));
    }
}
