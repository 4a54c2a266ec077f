//! Embedding quality metrics: rank correlation against human similarity
//! judgements, and top-k item-item recommendation.

mod rank;
mod recommend;
mod similarity;

pub use rank::{average_ranks, spearman};
pub use recommend::{
    average_precision_at_k, eval_recommendation, hit_ratio_at_k, recall_at_k, recommend, CutoffMetrics,
    MetricReport, RecEvalSplit, Scorer,
};
pub use similarity::{eval_word_similarity, SimilarityBenchmark, SimilarityReport};
