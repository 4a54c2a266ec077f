use std::collections::HashSet;
use std::io::BufRead;

use super::rank::spearman;
use crate::embeddings::{cosine, Embeddings};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Word pairs with human similarity scores.
#[derive(Debug, Clone, Default)]
pub struct SimilarityBenchmark {
    pub rows: Vec<(String, String, f64)>,
}

impl SimilarityBenchmark {
    pub fn new(rows: Vec<(String, String, f64)>) -> Result<Self> {
        let mut seen = HashSet::new();
        for (a, b, score) in &rows {
            if !score.is_finite() {
                return Err(Error::Evaluation(format!("non-finite score for ({a}, {b})")));
            }
            let key = if a <= b { (a, b) } else { (b, a) };
            if !seen.insert(key) {
                return Err(Error::Evaluation(format!("duplicate pair ({a}, {b})")));
            }
        }
        Ok(SimilarityBenchmark { rows })
    }

    /// Reads `<word1> <word2> <score>` lines; `#` comments and blanks skipped.
    pub fn read<R: BufRead>(reader: R) -> Result<Self> {
        let mut rows = Vec::new();
        for (i, line) in reader.lines().enumerate() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            let parsed = match fields.as_slice() {
                [a, b, s] => s.parse::<f64>().ok().map(|s| (a.to_string(), b.to_string(), s)),
                _ => None,
            };
            rows.push(parsed.ok_or_else(|| Error::Parse {
                line: i + 1,
                message: "expected `<word1> <word2> <score>`".into(),
            })?);
        }
        Self::new(rows)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityReport {
    pub rho: f64,
    pub covered: usize,
    pub skipped: usize,
}

/// Spearman correlation between embedding cosines and human scores over the
/// pairs whose words both have vectors. Out-of-vocabulary pairs are skipped.
pub fn eval_word_similarity<F: Scalar>(
    embeddings: &Embeddings<F>,
    benchmark: &SimilarityBenchmark,
) -> Result<SimilarityReport> {
    let mut predicted = Vec::new();
    let mut human = Vec::new();
    for (a, b, score) in &benchmark.rows {
        if let (Some(va), Some(vb)) = (embeddings.get(a), embeddings.get(b)) {
            predicted.push(cosine(va, vb).as_f64());
            human.push(*score);
        }
    }
    let covered = predicted.len();
    let skipped = benchmark.rows.len() - covered;
    if covered < 2 {
        return Err(Error::Evaluation(format!(
            "only {covered} benchmark pair(s) covered by the embeddings ({skipped} skipped)"
        )));
    }
    Ok(SimilarityReport {
        rho: spearman(&predicted, &human)?,
        covered,
        skipped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn emb(rows: &[(&str, [f64; 2])]) -> Embeddings<f64> {
        Embeddings::new(
            rows.iter().map(|(n, _)| n.to_string()).collect(),
            2,
            rows.iter().flat_map(|(_, v)| *v).collect(),
        )
        .unwrap()
    }

    fn bench(rows: &[(&str, &str, f64)]) -> SimilarityBenchmark {
        SimilarityBenchmark::new(rows.iter().map(|&(a, b, s)| (a.into(), b.into(), s)).collect()).unwrap()
    }

    #[test]
    fn all_oov_is_an_error() {
        let e = emb(&[("x", [1.0, 0.0])]);
        let err = eval_word_similarity(&e, &bench(&[("a", "b", 1.0), ("c", "d", 2.0)])).unwrap_err();
        assert!(err.to_string().contains("2 skipped"));
    }

    #[test]
    fn identical_and_orthogonal_pairs() {
        let e = emb(&[("a", [1.0, 0.0]), ("b", [1.0, 0.0]), ("c", [0.0, 1.0])]);
        let r = eval_word_similarity(&e, &bench(&[("a", "b", 10.0), ("a", "c", 0.0), ("a", "zzz", 3.0)])).unwrap();
        assert_abs_diff_eq!(r.rho, 1.0, epsilon = 1e-12);
        assert_eq!((r.covered, r.skipped), (2, 1));
    }

    #[test]
    fn rank_perfect_fixture() {
        let e = emb(&[("a", [1.0, 0.0]), ("b", [0.9, 0.1]), ("c", [0.5, 0.5]), ("d", [0.0, 1.0])]);
        let b = bench(&[("a", "b", 9.0), ("a", "c", 5.0), ("a", "d", 1.0), ("b", "d", 2.0)]);
        assert_abs_diff_eq!(eval_word_similarity(&e, &b).unwrap().rho, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn benchmark_validation() {
        assert!(SimilarityBenchmark::read("a b 1\nb a 2\n".as_bytes()).is_err());
        assert!(SimilarityBenchmark::read("a b x\n".as_bytes()).is_err());
        assert_eq!(SimilarityBenchmark::read("# h\na b 1.5\n".as_bytes()).unwrap().rows.len(), 1);
    }
}
