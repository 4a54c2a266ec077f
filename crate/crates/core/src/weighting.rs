//! Edge re-weighting schemes for language and preference networks.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

use log::warn;

use crate::error::{Error, Result};
use crate::graph::{Edge, VertexType, SOURCE_TYPE};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeightScheme {
    /// Every edge weighs 1.
    Binary,
    /// Raw co-occurrence counts.
    Tf,
    /// `tf(i, j) · ln(|V| / df(j))`, `df(j)` = distinct sources linking to `j`.
    TfIdf,
    /// Raw ratings.
    Rating,
    /// `r(u, i) · ln(|U| / #raters(i))` over the user (source) partition.
    RatingIrf,
}

impl FromStr for WeightScheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "binary" => Ok(WeightScheme::Binary),
            "tf" => Ok(WeightScheme::Tf),
            "tfidf" | "tf-idf" => Ok(WeightScheme::TfIdf),
            "rating" => Ok(WeightScheme::Rating),
            "rating-irf" | "rating_irf" => Ok(WeightScheme::RatingIrf),
            other => Err(Error::Config(format!("unknown weighting scheme `{other}`"))),
        }
    }
}

impl fmt::Display for WeightScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            WeightScheme::Binary => "binary",
            WeightScheme::Tf => "tf",
            WeightScheme::TfIdf => "tfidf",
            WeightScheme::Rating => "rating",
            WeightScheme::RatingIrf => "rating-irf",
        })
    }
}

/// Sums duplicate `(source, target)` edges, keeping first-appearance order.
pub fn aggregate(edges: &[Edge]) -> Vec<Edge> {
    let mut position: HashMap<(&str, &str), usize> = HashMap::new();
    let mut out: Vec<Edge> = Vec::new();
    for e in edges {
        match position.get(&(e.source.as_str(), e.target.as_str())) {
            Some(&i) => out[i].weight += e.weight,
            None => {
                position.insert((&e.source, &e.target), out.len());
                out.push(e.clone());
            }
        }
    }
    out
}

/// Applies `scheme` to `edges` after aggregating duplicates. `types` is the
/// column-derived partition map and is required for [`WeightScheme::RatingIrf`].
///
/// Edges whose new weight is zero (a target linked from every source) are
/// dropped with a warning.
pub fn reweight(
    edges: &[Edge],
    scheme: WeightScheme,
    types: Option<&HashMap<String, VertexType>>,
) -> Result<Vec<Edge>> {
    let mut edges = aggregate(edges);
    match scheme {
        WeightScheme::Binary => edges.iter_mut().for_each(|e| e.weight = 1.0),
        WeightScheme::Tf | WeightScheme::Rating => {}
        WeightScheme::TfIdf => {
            let vertices: HashSet<&str> = edges
                .iter()
                .flat_map(|e| [e.source.as_str(), e.target.as_str()])
                .collect();
            let df = in_link_counts(&edges);
            let n = vertices.len() as f64;
            let idf: HashMap<String, f64> = df.into_iter().map(|(t, c)| (t, (n / c as f64).ln())).collect();
            edges.iter_mut().for_each(|e| e.weight *= idf[&e.target]);
        }
        WeightScheme::RatingIrf => {
            let types = types.ok_or_else(|| {
                Error::Config("rating-irf needs a typed (user -> item) edge list".into())
            })?;
            let users = edges
                .iter()
                .filter(|e| types.get(&e.source) == Some(&SOURCE_TYPE))
                .map(|e| e.source.as_str())
                .collect::<HashSet<_>>()
                .len() as f64;
            let raters = in_link_counts(&edges);
            let irf: HashMap<String, f64> = raters
                .into_iter()
                .map(|(t, c)| (t, (users / c as f64).ln()))
                .collect();
            edges.iter_mut().for_each(|e| e.weight *= irf[&e.target]);
        }
    }

    let before = edges.len();
    edges.retain(|e| e.weight > 0.0);
    if edges.len() < before {
        warn!(
            "{scheme}: dropped {} edge(s) whose weight became zero",
            before - edges.len()
        );
    }
    Ok(edges)
}

/// Number of distinct sources linking to each target of an aggregated list.
fn in_link_counts(edges: &[Edge]) -> HashMap<String, usize> {
    let mut counts: HashMap<String, usize> = HashMap::new();
    for e in edges {
        *counts.entry(e.target.clone()).or_default() += 1;
    }
    counts
}
