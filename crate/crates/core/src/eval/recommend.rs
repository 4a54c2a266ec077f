use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;
use std::str::FromStr;

use rand::seq::IndexedRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::embeddings::{cosine, dot, Embeddings};
use crate::error::{Error, Result};
use crate::graph::Edge;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Scorer {
    #[default]
    Dot,
    Cosine,
}

impl FromStr for Scorer {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dot" => Ok(Scorer::Dot),
            "cosine" => Ok(Scorer::Cosine),
            other => Err(Error::Config(format!("unknown scorer `{other}`"))),
        }
    }
}

/// Ranks `candidates` (embedding row indices) by their mean score against
/// the query rows and returns the top `k`, skipping `exclude`. Ties go to
/// the lower row index.
pub fn recommend<F: Scalar>(
    embeddings: &Embeddings<F>,
    queries: &[usize],
    candidates: &[usize],
    k: usize,
    exclude: &HashSet<usize>,
    scorer: Scorer,
) -> Vec<usize> {
    if queries.is_empty() {
        return Vec::new();
    }
    let mut scored: Vec<(f64, usize)> = candidates
        .iter()
        .filter(|c| !exclude.contains(c))
        .map(|&c| {
            let item = embeddings.row(c);
            let total: f64 = queries
                .iter()
                .map(|&q| {
                    let query = embeddings.row(q);
                    match scorer {
                        Scorer::Dot => dot(query, item).as_f64(),
                        Scorer::Cosine => cosine(query, item).as_f64(),
                    }
                })
                .sum();
            (total / queries.len() as f64, c)
        })
        .collect();
    scored.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
    scored.truncate(k);
    scored.into_iter().map(|(_, c)| c).collect()
}

fn hits_in_top_k(ranked: &[usize], relevant: &HashSet<usize>, k: usize) -> usize {
    ranked.iter().take(k).filter(|r| relevant.contains(r)).count()
}

/// `|relevant ∩ top-k| / |relevant|`
pub fn recall_at_k(ranked: &[usize], relevant: &HashSet<usize>, k: usize) -> f64 {
    if relevant.is_empty() {
        return 0.0;
    }
    hits_in_top_k(ranked, relevant, k) as f64 / relevant.len() as f64
}

/// 1 when any relevant item is in the top k.
pub fn hit_ratio_at_k(ranked: &[usize], relevant: &HashSet<usize>, k: usize) -> f64 {
    f64::from(hits_in_top_k(ranked, relevant, k) > 0)
}

/// Sum of precision@r over the ranks r ≤ k holding a relevant item, divided
/// by `min(|relevant|, k)`.
pub fn average_precision_at_k(ranked: &[usize], relevant: &HashSet<usize>, k: usize) -> f64 {
    let denom = relevant.len().min(k);
    if denom == 0 {
        return 0.0;
    }
    let mut hits = 0;
    let mut sum = 0.0;
    for (r, item) in ranked.iter().take(k).enumerate() {
        if relevant.contains(item) {
            hits += 1;
            sum += hits as f64 / (r + 1) as f64;
        }
    }
    sum / denom as f64
}

/// Train/test interactions for item-item recommendation. Users are
/// queried with items drawn from their training interactions and scored on
/// their test items.
#[derive(Debug, Clone)]
pub struct RecEvalSplit {
    train: BTreeMap<String, BTreeSet<String>>,
    test: BTreeMap<String, BTreeSet<String>>,
    pub queries: usize,
    pub cutoffs: Vec<usize>,
    pub runs: usize,
    pub seed: u64,
    pub scorer: Scorer,
}

impl RecEvalSplit {
    /// Builds a split from `user item weight` edge lists (weights ignored).
    pub fn new(train: &[Edge], test: &[Edge]) -> Result<Self> {
        let group = |edges: &[Edge]| {
            let mut map: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
            for e in edges {
                map.entry(e.source.clone()).or_default().insert(e.target.clone());
            }
            map
        };
        let (train, test) = (group(train), group(test));
        for (user, items) in &test {
            if let Some(seen) = train.get(user) {
                if let Some(item) = items.intersection(seen).next() {
                    return Err(Error::Evaluation(format!(
                        "test interaction ({user}, {item}) also appears in training"
                    )));
                }
            }
        }
        Ok(RecEvalSplit {
            train,
            test,
            queries: 5,
            cutoffs: vec![10, 20, 30],
            runs: 10,
            seed: 1,
            scorer: Scorer::Dot,
        })
    }

    pub fn users(&self) -> usize {
        self.test.len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CutoffMetrics {
    pub k: usize,
    pub recall: f64,
    pub hit_ratio: f64,
    pub map: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricReport {
    pub cutoffs: Vec<CutoffMetrics>,
    /// Users with at least one test item and one usable training item.
    pub users: usize,
    pub runs: usize,
}

impl MetricReport {
    pub fn at(&self, k: usize) -> Option<&CutoffMetrics> {
        self.cutoffs.iter().find(|c| c.k == k)
    }

    /// `metric,k,value` lines with a header.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("metric,k,value\n");
        for c in &self.cutoffs {
            out.push_str(&format!("recall,{},{:.6}\n", c.k, c.recall));
            out.push_str(&format!("hr,{},{:.6}\n", c.k, c.hit_ratio));
            out.push_str(&format!("map,{},{:.6}\n", c.k, c.map));
        }
        out
    }
}

impl fmt::Display for MetricReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "users: {}  runs: {}", self.users, self.runs)?;
        for c in &self.cutoffs {
            let r = format!("Recall@{}:", c.k);
            let h = format!("HR@{}:", c.k);
            let m = format!("mAP@{}:", c.k);
            writeln!(f, "{r:<11} {:.4}  {h:<7} {:.4}  {m:<8} {:.4}", c.recall, c.hit_ratio, c.map)?;
        }
        Ok(())
    }
}

/// Averages Recall@k, HR@k and mAP@k over users, then over `split.runs`
/// seeded draws of the query items.
pub fn eval_recommendation<F: Scalar>(embeddings: &Embeddings<F>, split: &RecEvalSplit) -> Result<MetricReport> {
    if split.cutoffs.is_empty() || split.runs == 0 || split.queries == 0 {
        return Err(Error::Evaluation("need at least one cutoff, run and query".into()));
    }
    let max_k = *split.cutoffs.iter().max().unwrap();

    let lookup = |items: &BTreeSet<String>| -> Vec<usize> {
        items.iter().filter_map(|i| embeddings.position(i)).collect()
    };
    let candidates: BTreeSet<usize> = split
        .train
        .values()
        .chain(split.test.values())
        .flat_map(&lookup)
        .collect();
    let candidates: Vec<usize> = candidates.into_iter().collect();

    struct UserCase {
        train: Vec<usize>,
        test: HashSet<usize>,
        test_len: usize,
    }
    let cases: Vec<UserCase> = split
        .test
        .iter()
        .filter_map(|(user, test_items)| {
            let train = lookup(split.train.get(user)?);
            if train.is_empty() || test_items.is_empty() {
                return None;
            }
            Some(UserCase {
                train,
                test: lookup(test_items).into_iter().collect(),
                test_len: test_items.len(),
            })
        })
        .collect();
    if cases.is_empty() {
        return Err(Error::Evaluation("no user has both usable training and test items".into()));
    }

    let mut sums = vec![(0.0, 0.0, 0.0); split.cutoffs.len()];
    for run in 0..split.runs {
        let mut rng = ChaCha8Rng::seed_from_u64(split.seed);
        rng.set_stream(run as u64);
        let mut run_sums = vec![(0.0, 0.0, 0.0); split.cutoffs.len()];
        for case in &cases {
            let queries: Vec<usize> = case
                .train
                .choose_multiple(&mut rng, split.queries.min(case.train.len()))
                .copied()
                .collect();
            let exclude: HashSet<usize> = case.train.iter().copied().collect();
            let ranked = recommend(embeddings, &queries, &candidates, max_k, &exclude, split.scorer);
            for (acc, &k) in run_sums.iter_mut().zip(&split.cutoffs) {
                let hits = hits_in_top_k(&ranked, &case.test, k);
                acc.0 += hits as f64 / case.test_len as f64;
                acc.1 += f64::from(hits > 0);
                acc.2 += ap_with_total(&ranked, &case.test, case.test_len, k);
            }
        }
        for (s, r) in sums.iter_mut().zip(run_sums) {
            let n = cases.len() as f64;
            s.0 += r.0 / n;
            s.1 += r.1 / n;
            s.2 += r.2 / n;
        }
    }

    let runs = split.runs as f64;
    Ok(MetricReport {
        cutoffs: split
            .cutoffs
            .iter()
            .zip(sums)
            .map(|(&k, (r, h, m))| CutoffMetrics {
                k,
                recall: r / runs,
                hit_ratio: h / runs,
                map: m / runs,
            })
            .collect(),
        users: cases.len(),
        runs: split.runs,
    })
}

/// Average precision where `total` counts relevant items even if they have
/// no vector and so can never be ranked.
fn ap_with_total(ranked: &[usize], relevant: &HashSet<usize>, total: usize, k: usize) -> f64 {
    let denom = total.min(k);
    if denom == 0 {
        return 0.0;
    }
    average_precision_at_k(ranked, relevant, k) * relevant.len().min(k) as f64 / denom as f64
}
