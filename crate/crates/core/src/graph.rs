//! Weighted edge-list ingestion and the sequential vertex-context store.
//!
//! Every vertex owns one contiguous block of `(target, weight)` entries in a
//! shared edge array, sorted by target id. The blocks laid end to end form
//! the full edge distribution, which is what lets the sampler build one alias
//! table per block without any extra reference array for sources.

use std::collections::HashMap;
use std::fmt;
use std::io::{BufRead, Write};

use crate::error::{Error, Result};

/// Partition label of a vertex. Untyped graphs put every vertex in partition 0.
pub type VertexType = u8;

/// Dense vertex index in `0..graph.vertex_count()`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct VertexId(pub u32);

impl VertexId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl From<usize> for VertexId {
    #[inline]
    fn from(i: usize) -> Self {
        VertexId(i as u32)
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Edge {
    pub source: String,
    pub target: String,
    pub weight: f64,
}

impl Edge {
    pub fn new(source: impl Into<String>, target: impl Into<String>, weight: f64) -> Self {
        Edge {
            source: source.into(),
            target: target.into(),
            weight,
        }
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct ParseOptions {
    /// Emit both `(s, t, w)` and `(t, s, w)` for every line.
    pub undirected: bool,
    /// Label source-column vertices type 0 and target-column vertices type 1.
    pub typed: bool,
}

/// Parsed edges plus, in typed mode, the column-derived vertex types.
#[derive(Debug, Clone, Default)]
pub struct EdgeList {
    pub edges: Vec<Edge>,
    pub types: Option<HashMap<String, VertexType>>,
}

pub const SOURCE_TYPE: VertexType = 0;
pub const TARGET_TYPE: VertexType = 1;

/// Reads `<source> <target> <weight>` lines. Blank lines and lines starting
/// with `#` are skipped.
pub fn parse_edge_list<R: BufRead>(reader: R, options: ParseOptions) -> Result<EdgeList> {
    let mut edges = Vec::new();
    let mut types: HashMap<String, VertexType> = HashMap::new();

    for (i, line) in reader.lines().enumerate() {
        let line_no = i + 1;
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = trimmed.split_whitespace().collect();
        if fields.len() != 3 {
            return Err(Error::Parse {
                line: line_no,
                message: format!("expected 3 fields, found {}", fields.len()),
            });
        }
        let weight: f64 = fields[2].parse().map_err(|_| Error::Parse {
            line: line_no,
            message: format!("weight `{}` is not a number", fields[2]),
        })?;
        if !(weight.is_finite() && weight > 0.0) {
            return Err(Error::Parse {
                line: line_no,
                message: format!("weight must be positive and finite, got `{}`", fields[2]),
            });
        }
        let (source, target) = (fields[0], fields[1]);

        if options.typed {
            for (name, ty) in [(source, SOURCE_TYPE), (target, TARGET_TYPE)] {
                match types.get(name) {
                    Some(&seen) if seen != ty => return Err(Error::TypeConflict(name.to_string())),
                    Some(_) => {}
                    None => {
                        types.insert(name.to_string(), ty);
                    }
                }
            }
        }

        edges.push(Edge::new(source, target, weight));
        if options.undirected {
            edges.push(Edge::new(target, source, weight));
        }
    }

    Ok(EdgeList {
        edges,
        types: options.typed.then_some(types),
    })
}

/// Writes edges back in the format [`parse_edge_list`] reads.
pub fn write_edge_list<W: Write>(edges: &[Edge], mut out: W) -> Result<()> {
    for e in edges {
        writeln!(out, "{} {} {}", e.source, e.target, e.weight)?;
    }
    out.flush()?;
    Ok(())
}

/// Immutable weighted directed graph in sequential vertex-context layout.
#[derive(Debug, Clone)]
pub struct Graph {
    names: Vec<String>,
    index: HashMap<String, VertexId>,
    /// `offsets[v]..offsets[v + 1]` is v's context block.
    offsets: Vec<usize>,
    targets: Vec<VertexId>,
    weights: Vec<f64>,
    out_weight: Vec<f64>,
    in_weight: Vec<f64>,
    types: Vec<VertexType>,
    typed: bool,
}

impl Graph {
    pub fn from_edges(edges: &[Edge]) -> Result<Graph> {
        Self::build(edges, None)
    }

    /// Builds a graph whose vertices carry partition labels. Every vertex
    /// named by an edge must appear in `types`.
    pub fn from_typed_edges(edges: &[Edge], types: &HashMap<String, VertexType>) -> Result<Graph> {
        Self::build(edges, Some(types))
    }

    pub fn from_edge_list(list: &EdgeList) -> Result<Graph> {
        Self::build(&list.edges, list.types.as_ref())
    }

    fn build(edges: &[Edge], types: Option<&HashMap<String, VertexType>>) -> Result<Graph> {
        if edges.is_empty() {
            return Err(Error::EmptyGraph);
        }

        let mut names = Vec::new();
        let mut index: HashMap<String, VertexId> = HashMap::new();
        let mut intern = |name: &str| -> VertexId {
            if let Some(&id) = index.get(name) {
                return id;
            }
            let id = VertexId::from(names.len());
            names.push(name.to_string());
            index.insert(name.to_string(), id);
            id
        };

        let mut triples = Vec::with_capacity(edges.len());
        for edge in edges {
            if !(edge.weight.is_finite() && edge.weight > 0.0) {
                return Err(Error::InvalidWeights(format!(
                    "edge {} -> {} has weight {}",
                    edge.source, edge.target, edge.weight
                )));
            }
            let s = intern(&edge.source);
            let t = intern(&edge.target);
            triples.push((s, t, edge.weight));
        }

        // Stable sort keeps file order among duplicates so the summation order is fixed.
        triples.sort_by_key(|&(s, t, _)| (s, t));

        let n = names.len();
        let mut offsets = vec![0usize; n + 1];
        let mut targets: Vec<VertexId> = Vec::with_capacity(triples.len());
        let mut weights: Vec<f64> = Vec::with_capacity(triples.len());
        let mut sources: Vec<VertexId> = Vec::with_capacity(triples.len());
        for (s, t, w) in triples {
            if sources.last() == Some(&s) && targets.last() == Some(&t) {
                *weights.last_mut().unwrap() += w;
            } else {
                sources.push(s);
                targets.push(t);
                weights.push(w);
            }
        }

        let mut out_weight = vec![0.0; n];
        let mut in_weight = vec![0.0; n];
        for ((s, t), w) in sources.iter().zip(&targets).zip(&weights) {
            offsets[s.index() + 1] += 1;
            out_weight[s.index()] += w;
            in_weight[t.index()] += w;
        }
        for v in 0..n {
            offsets[v + 1] += offsets[v];
        }

        let vertex_types = match types {
            Some(map) => names
                .iter()
                .map(|name| {
                    map.get(name)
                        .copied()
                        .ok_or_else(|| Error::UnknownVertex(format!("{name} has no type label")))
                })
                .collect::<Result<Vec<_>>>()?,
            None => vec![0; n],
        };

        Ok(Graph {
            names,
            index,
            offsets,
            targets,
            weights,
            out_weight,
            in_weight,
            types: vertex_types,
            typed: types.is_some(),
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.names.len()
    }

    pub fn edge_count(&self) -> usize {
        self.targets.len()
    }

    pub fn vertex_id(&self, name: &str) -> Result<VertexId> {
        self.index
            .get(name)
            .copied()
            .ok_or_else(|| Error::UnknownVertex(name.to_string()))
    }

    pub fn name(&self, v: VertexId) -> &str {
        &self.names[v.index()]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    /// Targets and weights of v's context block.
    pub fn context_block(&self, v: VertexId) -> (&[VertexId], &[f64]) {
        let range = self.block_range(v);
        (&self.targets[range.clone()], &self.weights[range])
    }

    pub(crate) fn block_range(&self, v: VertexId) -> std::ops::Range<usize> {
        self.offsets[v.index()]..self.offsets[v.index() + 1]
    }

    pub fn out_degree(&self, v: VertexId) -> usize {
        self.block_range(v).len()
    }

    pub fn out_weight_sums(&self) -> &[f64] {
        &self.out_weight
    }

    pub fn in_weight_sums(&self) -> &[f64] {
        &self.in_weight
    }

    pub fn vertex_type(&self, v: VertexId) -> VertexType {
        self.types[v.index()]
    }

    pub fn vertex_types(&self) -> &[VertexType] {
        &self.types
    }

    pub fn is_typed(&self) -> bool {
        self.typed
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// All edges in block order as `(source, target, weight)`.
    pub fn edges(&self) -> impl Iterator<Item = (VertexId, VertexId, f64)> + '_ {
        (0..self.vertex_count()).flat_map(move |v| {
            let v = VertexId::from(v);
            let (targets, weights) = self.context_block(v);
            targets.iter().zip(weights).map(move |(&t, &w)| (v, t, w))
        })
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> {
        (0..self.vertex_count()).map(VertexId::from)
    }
}
