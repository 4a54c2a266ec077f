//! Vertex-context sampling, skip-gram training and evaluation for weighted
//! graph embeddings.
//!
//! The numeric core is generic over [`Scalar`] (`f32` or `f64`); the
//! `*32` / `*64` aliases below pick one.

pub mod alias;
pub mod embeddings;
pub mod error;
pub mod eval;
pub mod graph;
pub mod models;
pub mod optimizer;
pub mod sampler;
pub mod scalar;
pub mod weighting;

pub use alias::{AliasTable, CdfSampler};
pub use embeddings::{cosine, dot, Embeddings};
pub use error::{Error, Result};
pub use graph::{parse_edge_list, write_edge_list, Edge, EdgeList, Graph, ParseOptions, VertexId, VertexType};
pub use models::{pair_counts, train, LineOrder, ModelKind, TrainConfig};
pub use optimizer::{EmbeddingModel, SharedMatrix, SigmoidTable, TrainProgress};
pub use sampler::{GraphSampler, SizeReport};
pub use scalar::Scalar;
pub use weighting::{reweight, WeightScheme};

pub type Embeddings32 = Embeddings<f32>;
pub type Embeddings64 = Embeddings<f64>;
pub type Model32 = EmbeddingModel<f32>;
pub type Model64 = EmbeddingModel<f64>;
pub type Matrix32 = SharedMatrix<f32>;
pub type Matrix64 = SharedMatrix<f64>;
