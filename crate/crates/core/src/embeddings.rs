//! Named vertex vectors and their word2vec-style text format:
//!
//! ```text
//! <count> <dim>
//! <name> <v1> ... <vdim>
//! ```
//!
//! Values are written with six decimals.

use std::collections::HashMap;
use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::optimizer::SharedMatrix;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct Embeddings<F> {
    names: Vec<String>,
    index: HashMap<String, usize>,
    dim: usize,
    data: Vec<F>,
}

impl<F: Scalar> Embeddings<F> {
    pub fn new(names: Vec<String>, dim: usize, data: Vec<F>) -> Result<Self> {
        if data.len() != names.len() * dim {
            return Err(Error::Format(format!(
                "{} values for {} rows of dimension {dim}",
                data.len(),
                names.len()
            )));
        }
        let mut index = HashMap::with_capacity(names.len());
        for (i, name) in names.iter().enumerate() {
            if index.insert(name.clone(), i).is_some() {
                return Err(Error::Format(format!("duplicate vertex `{name}`")));
            }
        }
        Ok(Embeddings {
            names,
            index,
            dim,
            data,
        })
    }

    pub fn from_matrix(names: &[String], matrix: &SharedMatrix<F>) -> Self {
        assert_eq!(names.len(), matrix.rows());
        Self::new(names.to_vec(), matrix.dim(), matrix.to_vec()).expect("matrix shape matches names")
    }

    /// Joins several embeddings of the same vertices side by side.
    pub fn concat(parts: &[Embeddings<F>]) -> Result<Self> {
        let first = parts.first().ok_or_else(|| Error::Format("nothing to concatenate".into()))?;
        if parts.iter().any(|p| p.names != first.names) {
            return Err(Error::Format("concatenated embeddings disagree on vertices".into()));
        }
        let dim: usize = parts.iter().map(|p| p.dim).sum();
        let mut data = Vec::with_capacity(first.len() * dim);
        for row in 0..first.len() {
            for part in parts {
                data.extend_from_slice(part.row(row));
            }
        }
        Self::new(first.names.clone(), dim, data)
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn position(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn row(&self, i: usize) -> &[F] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn get(&self, name: &str) -> Option<&[F]> {
        self.position(name).map(|i| self.row(i))
    }

    /// Scales every row to unit L2 norm. All-zero rows stay zero.
    pub fn normalize_rows(&mut self) {
        for row in self.data.chunks_mut(self.dim.max(1)) {
            let norm = row.iter().map(|&x| x * x).fold(F::zero(), |a, b| a + b).sqrt();
            if norm > F::zero() {
                row.iter_mut().for_each(|x| *x /= norm);
            }
        }
    }

    pub fn write<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "{} {}", self.len(), self.dim)?;
        for (i, name) in self.names.iter().enumerate() {
            write!(out, "{name}")?;
            for x in self.row(i) {
                write!(out, " {x:.6}")?;
            }
            writeln!(out)?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn read<R: BufRead>(reader: R) -> Result<Self> {
        let mut lines = reader.lines();
        let header = lines.next().ok_or_else(|| Error::Format("empty file".into()))??;
        let mut fields = header.split_whitespace();
        let mut header_field = || -> Result<usize> {
            fields
                .next()
                .and_then(|f| f.parse().ok())
                .ok_or_else(|| Error::Format(format!("bad header `{header}`")))
        };
        let count = header_field()?;
        let dim = header_field()?;

        let mut names = Vec::with_capacity(count);
        let mut data = Vec::with_capacity(count * dim);
        for (i, line) in lines.enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let mut parts = line.split_whitespace();
            let name = parts.next().unwrap();
            let before = data.len();
            for p in parts {
                let x: f64 = p
                    .parse()
                    .map_err(|_| Error::Format(format!("line {}: bad value `{p}`", i + 2)))?;
                data.push(F::of(x));
            }
            if data.len() - before != dim {
                return Err(Error::Format(format!(
                    "line {}: expected {dim} values, found {}",
                    i + 2,
                    data.len() - before
                )));
            }
            names.push(name.to_string());
        }
        if names.len() != count {
            return Err(Error::Format(format!("header says {count} rows, found {}", names.len())));
        }
        Self::new(names, dim, data)
    }
}

pub fn dot<F: Scalar>(a: &[F], b: &[F]) -> F {
    a.iter().zip(b).fold(F::zero(), |acc, (&x, &y)| acc + x * y)
}

/// Cosine similarity; 0 when either vector is zero.
pub fn cosine<F: Scalar>(a: &[F], b: &[F]) -> F {
    let norms = (dot(a, a) * dot(b, b)).sqrt();
    if norms > F::zero() {
        dot(a, b) / norms
    } else {
        F::zero()
    }
}
