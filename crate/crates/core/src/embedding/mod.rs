//! Embedding spaces, cosine geometry and random-pair baselines.

mod io;

pub use io::{
    file_meta, load_embeddings, load_glove_text, load_native, load_word2vec_binary, read_glove_text,
    read_word2vec_binary, read_word2vec_binary_limited, save_embeddings, save_glove_text, save_native, save_word2vec_binary,
    sidecar_path, write_glove_text, write_word2vec_binary, Format,
};

use std::collections::{BTreeSet, HashMap, HashSet};

use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::trainer::TrainConfig;

/// Where an embedding space came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Provenance {
    File { path: String, format: Format },
    Trained { config: TrainConfig },
    Synthetic { description: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpaceMeta {
    /// Corpus label used to group spaces in dimension sweeps.
    pub label: String,
    pub dimension: usize,
    pub vocab_size: usize,
    pub provenance: Provenance,
}

/// Dense term-by-dimension matrix. Rows are stored verbatim, never normalized.
#[derive(Debug, Clone)]
pub struct EmbeddingSpace {
    terms: Vec<String>,
    index: HashMap<String, usize>,
    matrix: Vec<f64>,
    dim: usize,
    meta: SpaceMeta,
}

impl EmbeddingSpace {
    /// Validates and builds a space. `matrix` is row-major, `terms.len() * dim` long.
    ///
    /// `meta.dimension` and `meta.vocab_size` are overwritten with the actual shape.
    pub fn new(terms: Vec<String>, matrix: Vec<f64>, dim: usize, mut meta: SpaceMeta) -> Result<Self> {
        if dim < 2 {
            return Err(Error::Format(format!("dimension must be at least 2, got {dim}")));
        }
        if matrix.len() != terms.len() * dim {
            return Err(Error::Format(format!(
                "matrix has {} entries, expected {} x {dim}",
                matrix.len(),
                terms.len()
            )));
        }
        let mut index = HashMap::with_capacity(terms.len());
        for (i, term) in terms.iter().enumerate() {
            if index.insert(term.clone(), i).is_some() {
                return Err(Error::Format(format!("duplicate term {term:?}")));
            }
        }
        for (term, row) in terms.iter().zip(matrix.chunks_exact(dim)) {
            if row.iter().any(|v| !v.is_finite()) {
                return Err(Error::Format(format!("non-finite entry in row {term:?}")));
            }
            if row.iter().all(|&v| v == 0.0) {
                return Err(Error::Format(format!("all-zero row {term:?}")));
            }
        }
        meta.dimension = dim;
        meta.vocab_size = terms.len();
        Ok(EmbeddingSpace {
            terms,
            index,
            matrix,
            dim,
            meta,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &[String] {
        &self.terms
    }

    pub fn meta(&self) -> &SpaceMeta {
        &self.meta
    }

    pub fn label(&self) -> &str {
        &self.meta.label
    }

    pub fn set_label(&mut self, label: impl Into<String>) {
        self.meta.label = label.into();
    }

    pub fn matrix(&self) -> &[f64] {
        &self.matrix
    }

    pub fn contains(&self, term: &str) -> bool {
        self.index.contains_key(term)
    }

    pub fn id(&self, term: &str) -> Option<usize> {
        self.index.get(term).copied()
    }

    pub fn row(&self, id: usize) -> &[f64] {
        &self.matrix[id * self.dim..(id + 1) * self.dim]
    }

    pub fn vector(&self, term: &str) -> Option<&[f64]> {
        self.id(term).map(|i| self.row(i))
    }

    pub fn rows(&self) -> impl Iterator<Item = (&str, &[f64])> {
        self.terms
            .iter()
            .map(String::as_str)
            .zip(self.matrix.chunks_exact(self.dim))
    }

    /// Euclidean norm of every row, in id order.
    pub fn norms(&self) -> Vec<f64> {
        self.matrix.chunks_exact(self.dim).map(norm).collect()
    }

    /// Applies `f` to every row. The output rows must keep the dimension.
    pub fn map_rows<F>(&self, f: F) -> Result<Self>
    where
        F: Fn(&[f64]) -> Vec<f64>,
    {
        let mut matrix = Vec::with_capacity(self.matrix.len());
        for row in self.matrix.chunks_exact(self.dim) {
            let mapped = f(row);
            if mapped.len() != self.dim {
                return Err(Error::LengthMismatch(mapped.len(), self.dim));
            }
            matrix.extend(mapped);
        }
        EmbeddingSpace::new(self.terms.clone(), matrix, self.dim, self.meta.clone())
    }

    /// Resolves every term or reports all of the missing ones.
    pub fn vectors_for<'a, S: AsRef<str>>(&'a self, terms: &[S]) -> Result<Vec<&'a [f64]>> {
        let mut missing = Vec::new();
        let mut out = Vec::with_capacity(terms.len());
        for term in terms {
            match self.vector(term.as_ref()) {
                Some(v) => out.push(v),
                None => missing.push(term.as_ref().to_owned()),
            }
        }
        if missing.is_empty() {
            Ok(out)
        } else {
            Err(Error::MissingTerms(missing))
        }
    }
}

pub(crate) fn dot(u: &[f64], v: &[f64]) -> f64 {
    u.iter().zip(v).map(|(a, b)| a * b).sum()
}

pub(crate) fn norm(u: &[f64]) -> f64 {
    dot(u, u).sqrt()
}

/// Cosine similarity clamped to `[-1, 1]`.
pub fn cosine(u: &[f64], v: &[f64]) -> Result<f64> {
    if u.len() != v.len() {
        return Err(Error::LengthMismatch(u.len(), v.len()));
    }
    let nu = norm(u);
    let nv = norm(v);
    if nu == 0.0 || nv == 0.0 {
        return Err(Error::ZeroNorm);
    }
    Ok((dot(u, v) / (nu * nv)).clamp(-1.0, 1.0))
}

/// Sorted intersection of the vocabularies of all `spaces`.
pub fn common_vocabulary(spaces: &[&EmbeddingSpace]) -> Result<Vec<String>> {
    let (first, rest) = spaces
        .split_first()
        .ok_or_else(|| Error::InvalidTermSet("no embedding spaces given".into()))?;
    let common: BTreeSet<String> = first
        .terms()
        .iter()
        .filter(|t| rest.iter().all(|s| s.contains(t)))
        .cloned()
        .collect();
    if common.is_empty() {
        return Err(Error::EmptyIntersection);
    }
    Ok(common.into_iter().collect())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WordPairSample {
    pub pairs: Vec<(String, String)>,
    pub seed: u64,
}

/// Maps a rank in `0..C(m, 2)` onto the pair `(i, j)` with `i < j`, ordered by `j` then `i`.
fn unrank_pair(k: u64) -> (usize, usize) {
    let mut j = ((1.0 + (1.0 + 8.0 * k as f64).sqrt()) / 2.0).floor() as u64;
    while j * (j - 1) / 2 > k {
        j -= 1;
    }
    while (j + 1) * j / 2 <= k {
        j += 1;
    }
    let i = k - j * (j - 1) / 2;
    (i as usize, j as usize)
}

/// Draws `n` distinct unordered pairs uniformly without replacement.
pub fn sample_random_pairs<S: AsRef<str>>(terms: &[S], n: usize, seed: u64) -> Result<WordPairSample> {
    let m = terms.len() as u64;
    if m < 2 {
        return Err(Error::InvalidTermSet("need at least two terms to sample pairs".into()));
    }
    let mut seen = HashSet::with_capacity(terms.len());
    for t in terms {
        if !seen.insert(t.as_ref()) {
            return Err(Error::InvalidTermSet(format!("duplicate term {:?}", t.as_ref())));
        }
    }
    if n == 0 {
        return Err(Error::InvalidTermSet("pair count must be at least 1".into()));
    }
    let available = m * (m - 1) / 2;
    if n as u64 > available {
        return Err(Error::TooManyPairs {
            requested: n as u64,
            available,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pairs = index::sample(&mut rng, available as usize, n)
        .into_iter()
        .map(|k| {
            let (i, j) = unrank_pair(k as u64);
            (terms[i].as_ref().to_owned(), terms[j].as_ref().to_owned())
        })
        .collect();
    Ok(WordPairSample { pairs, seed })
}

/// Mean of `|cosine|` over the sampled pairs.
pub fn average_abs_cosine(space: &EmbeddingSpace, sample: &WordPairSample) -> Result<f64> {
    let mut missing: BTreeSet<String> = BTreeSet::new();
    for (a, b) in &sample.pairs {
        for t in [a, b] {
            if !space.contains(t) {
                missing.insert(t.clone());
            }
        }
    }
    if !missing.is_empty() {
        return Err(Error::MissingTerms(missing.into_iter().collect()));
    }
    if sample.pairs.is_empty() {
        return Err(Error::InvalidTermSet("empty pair sample".into()));
    }
    let mut total = 0.0;
    for (a, b) in &sample.pairs {
        let u = space.vector(a).expect("checked above");
        let v = space.vector(b).expect("checked above");
        total += cosine(u, v)?.abs();
    }
    Ok(total / sample.pairs.len() as f64)
}
