//! Bias direction, per-word bias and direct bias.
//!
//! The bias direction `g` is the first principal component of the signed
//! differences `{x_i - y_i} ∪ {y_i - x_i}` of paired contrast terms, oriented
//! so that G1 terms project positively on average. The bias of a word is its
//! cosine with `g`; direct bias is the mean absolute bias over a neutral set.

use std::collections::{BTreeMap, HashSet};
use std::fs;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::embedding::{cosine, dot, norm, EmbeddingSpace, SpaceMeta};
use crate::error::{Error, Result};

/// Ordered `(G1 term, G2 term)` pairs. Pairs are never split when resampled.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermPairSet {
    pairs: Vec<(String, String)>,
    label: String,
}

impl TermPairSet {
    pub fn new(pairs: Vec<(String, String)>, label: impl Into<String>) -> Result<Self> {
        if pairs.is_empty() {
            return Err(Error::InvalidTermSet("term pair set is empty".into()));
        }
        if let Some((a, _)) = pairs.iter().find(|(a, b)| a == b) {
            return Err(Error::InvalidTermSet(format!("pair with identical terms {a:?}")));
        }
        Ok(TermPairSet {
            pairs,
            label: label.into(),
        })
    }

    /// Parses one whitespace-separated pair per line; `#` starts a comment.
    pub fn parse(text: &str, label: impl Into<String>) -> Result<Self> {
        let mut pairs = Vec::new();
        for (i, line) in content_lines(text) {
            let fields: Vec<&str> = line.split_whitespace().collect();
            match fields[..] {
                [a, b] => pairs.push((a.to_owned(), b.to_owned())),
                _ => {
                    return Err(Error::Parse {
                        location: format!("line {i}"),
                        message: format!("expected two terms, found {}", fields.len()),
                    })
                }
            }
        }
        Self::new(pairs, label)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, file_label(path))
    }

    pub fn pairs(&self) -> &[(String, String)] {
        &self.pairs
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Exchanges the roles of G1 and G2.
    pub fn swapped(&self) -> Self {
        TermPairSet {
            pairs: self.pairs.iter().map(|(a, b)| (b.clone(), a.clone())).collect(),
            label: self.label.clone(),
        }
    }
}

/// Nominally neutral words W. Duplicates are dropped, first occurrence kept.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NeutralTermSet {
    terms: Vec<String>,
    label: String,
}

impl NeutralTermSet {
    pub fn new<S: Into<String>>(terms: impl IntoIterator<Item = S>, label: impl Into<String>) -> Result<Self> {
        let mut seen = HashSet::new();
        let terms: Vec<String> = terms
            .into_iter()
            .map(Into::into)
            .filter(|t| seen.insert(t.clone()))
            .collect();
        if terms.is_empty() {
            return Err(Error::InvalidTermSet("neutral term set is empty".into()));
        }
        Ok(NeutralTermSet {
            terms,
            label: label.into(),
        })
    }

    /// Parses one term per line; `#` starts a comment.
    pub fn parse(text: &str, label: impl Into<String>) -> Result<Self> {
        let mut terms = Vec::new();
        for (i, line) in content_lines(text) {
            if line.split_whitespace().count() != 1 {
                return Err(Error::Parse {
                    location: format!("line {i}"),
                    message: "expected a single term".into(),
                });
            }
            terms.push(line.to_owned());
        }
        Self::new(terms, label)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, file_label(path))
    }

    pub fn terms(&self) -> &[String] {
        &self.terms
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, line)| {
        let line = line.split('#').next().unwrap_or("").trim();
        (!line.is_empty()).then_some((i + 1, line))
    })
}

fn file_label(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Orientation {
    /// Mean of `cos(x_i, g) - cos(y_i, g)` over the pairs is non-negative.
    TowardG1,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BiasDirection {
    pub vector: Vec<f64>,
    /// Top eigenvalue over the trace. Values near `1 / rank` flag a tie.
    pub explained_variance_ratio: f64,
    pub pairs_used: usize,
    #[serde(default)]
    pub dropped_pairs: Vec<(String, String)>,
    pub orientation: Orientation,
}

const PCA_TOLERANCE: f64 = 1e-10;
const PCA_MAX_ITERATIONS: usize = 10_000;
const START_PERTURBATION: f64 = 1e-3;

/// Top eigenvector of the covariance of `vectors` by power iteration,
/// together with its share of the total variance.
///
/// Iteration starts from the first centered vector (or `e1` if it is zero),
/// nudged by a fixed pseudo-random vector whose sign follows the start so
/// that negating the input negates the result exactly.
pub fn first_principal_component<V: AsRef<[f64]>>(vectors: &[V]) -> Result<(Vec<f64>, f64)> {
    if vectors.len() < 2 {
        return Err(Error::Stats("principal component needs at least two vectors".into()));
    }
    let d = vectors[0].as_ref().len();
    if let Some(v) = vectors.iter().find(|v| v.as_ref().len() != d) {
        return Err(Error::LengthMismatch(v.as_ref().len(), d));
    }
    let n = vectors.len() as f64;
    let mut mean = vec![0.0; d];
    for v in vectors {
        for (m, x) in mean.iter_mut().zip(v.as_ref()) {
            *m += x;
        }
    }
    mean.iter_mut().for_each(|m| *m /= n);
    let centered: Vec<Vec<f64>> = vectors
        .iter()
        .map(|v| v.as_ref().iter().zip(&mean).map(|(x, m)| x - m).collect())
        .collect();

    let trace: f64 = centered.iter().map(|x| dot(x, x)).sum::<f64>() / n;
    if !(trace > 0.0) {
        return Err(Error::DegenerateDifferences);
    }
    let cov_mul = |v: &[f64]| -> Vec<f64> {
        let mut out = vec![0.0; d];
        for x in &centered {
            let p = dot(x, v);
            for (o, xi) in out.iter_mut().zip(x) {
                *o += p * xi;
            }
        }
        out.iter_mut().for_each(|o| *o /= n);
        out
    };

    let mut v = start_vector(&centered[0], d);
    if norm(&cov_mul(&v)) == 0.0 {
        let largest = centered
            .iter()
            .max_by(|a, b| norm(a).total_cmp(&norm(b)))
            .expect("at least two vectors");
        v = normalized(largest);
    }
    for _ in 0..PCA_MAX_ITERATIONS {
        let next = normalized(&cov_mul(&v));
        let delta = next.iter().zip(&v).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        v = next;
        if delta < PCA_TOLERANCE {
            break;
        }
    }
    let eigenvalue = dot(&v, &cov_mul(&v));
    Ok((v, (eigenvalue / trace).clamp(0.0, 1.0)))
}

fn normalized(v: &[f64]) -> Vec<f64> {
    let n = norm(v);
    v.iter().map(|x| x / n).collect()
}

fn start_vector(first: &[f64], d: usize) -> Vec<f64> {
    let base = if norm(first) > 0.0 {
        normalized(first)
    } else {
        let mut e1 = vec![0.0; d];
        e1[0] = 1.0;
        e1
    };
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_b1a5);
    let nudge: Vec<f64> = (0..d).map(|_| rng.random_range(-1.0..1.0)).collect();
    let nudge = normalized(&nudge);
    let sign = if dot(&base, &nudge) < 0.0 { -1.0 } else { 1.0 };
    let start: Vec<f64> = base
        .iter()
        .zip(&nudge)
        .map(|(b, q)| b + sign * START_PERTURBATION * q)
        .collect();
    normalized(&start)
}

/// Direction and variance ratio from already-resolved `(x_i, y_i)` vectors.
pub(crate) fn direction_from_vectors(pairs: &[(&[f64], &[f64])]) -> Result<(Vec<f64>, f64)> {
    let mut diffs = Vec::with_capacity(pairs.len() * 2);
    for (x, y) in pairs {
        if x.len() != y.len() {
            return Err(Error::LengthMismatch(x.len(), y.len()));
        }
        let d: Vec<f64> = x.iter().zip(y.iter()).map(|(a, b)| a - b).collect();
        let neg: Vec<f64> = d.iter().map(|v| -v).collect();
        diffs.push(d);
        diffs.push(neg);
    }
    let (mut g, ratio) = first_principal_component(&diffs)?;
    let mut lean = 0.0;
    for (x, y) in pairs {
        lean += cosine(x, &g)? - cosine(y, &g)?;
    }
    if lean < 0.0 {
        g.iter_mut().for_each(|v| *v = -*v);
    }
    Ok((g, ratio))
}

pub(crate) fn mean_abs_cosine(g: &[f64], vectors: &[&[f64]]) -> Result<f64> {
    let mut total = 0.0;
    for v in vectors {
        total += cosine(v, g)?.abs();
    }
    Ok(total / vectors.len() as f64)
}

/// Builds the bias direction from the pairs whose terms are both in `space`.
pub fn bias_direction(space: &EmbeddingSpace, pairs: &TermPairSet) -> Result<BiasDirection> {
    let mut resolved = Vec::new();
    let mut dropped = Vec::new();
    for (a, b) in pairs.pairs() {
        match (space.vector(a), space.vector(b)) {
            (Some(x), Some(y)) => resolved.push((x, y)),
            _ => dropped.push((a.clone(), b.clone())),
        }
    }
    if resolved.is_empty() {
        return Err(Error::NoPairsInVocabulary);
    }
    let (vector, ratio) = direction_from_vectors(&resolved)?;
    Ok(BiasDirection {
        vector,
        explained_variance_ratio: ratio,
        pairs_used: resolved.len(),
        dropped_pairs: dropped,
        orientation: Orientation::TowardG1,
    })
}

/// Signed bias of `term`: its cosine with the bias direction.
pub fn word_bias(space: &EmbeddingSpace, direction: &BiasDirection, term: &str) -> Result<f64> {
    let v = space
        .vector(term)
        .ok_or_else(|| Error::MissingTerms(vec![term.to_owned()]))?;
    cosine(v, &direction.vector)
}

/// Mean absolute bias over the neutral terms present in `space`, plus the
/// terms that had to be dropped. The mean is over retained terms only.
pub fn direct_bias(
    space: &EmbeddingSpace,
    direction: &BiasDirection,
    neutral: &NeutralTermSet,
) -> Result<(f64, Vec<String>)> {
    let (retained, dropped): (Vec<&String>, Vec<&String>) =
        neutral.terms().iter().partition(|t| space.contains(t));
    if retained.is_empty() {
        return Err(Error::NoNeutralTerms);
    }
    let vectors: Vec<&[f64]> = retained
        .iter()
        .map(|t| space.vector(t).expect("partitioned on membership"))
        .collect();
    let value = mean_abs_cosine(&direction.vector, &vectors)?;
    Ok((value, dropped.into_iter().cloned().collect()))
}

/// How the report was computed, recorded so numbers stay auditable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodNotes {
    pub principal_component: String,
    pub difference_vectors_normalized: bool,
    pub missing_terms: String,
}

impl Default for MethodNotes {
    fn default() -> Self {
        MethodNotes {
            principal_component: "power iteration on the covariance of centered signed differences".into(),
            difference_vectors_normalized: false,
            missing_terms: "dropped and reported; means use retained counts".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BiasReport {
    pub direction: BiasDirection,
    pub word_biases: BTreeMap<String, f64>,
    pub direct_bias: f64,
    pub dropped_terms: Vec<String>,
    pub space_meta: SpaceMeta,
    #[serde(default)]
    pub pairs_label: String,
    #[serde(default)]
    pub neutral_label: String,
    #[serde(default)]
    pub method: MethodNotes,
}

impl BiasReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(json: &str) -> Result<Self> {
        Ok(serde_json::from_str(json)?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }
}

/// Direction, per-word biases and direct bias in one report.
pub fn bias_profile(space: &EmbeddingSpace, pairs: &TermPairSet, neutral: &NeutralTermSet) -> Result<BiasReport> {
    let direction = bias_direction(space, pairs)?;
    let mut word_biases = BTreeMap::new();
    let mut dropped_terms = Vec::new();
    for term in neutral.terms() {
        match space.vector(term) {
            Some(v) => {
                word_biases.insert(term.clone(), cosine(v, &direction.vector)?);
            }
            None => dropped_terms.push(term.clone()),
        }
    }
    if word_biases.is_empty() {
        return Err(Error::NoNeutralTerms);
    }
    let direct_bias = word_biases.values().map(|b| b.abs()).sum::<f64>() / word_biases.len() as f64;
    Ok(BiasReport {
        direction,
        word_biases,
        direct_bias,
        dropped_terms,
        space_meta: space.meta().clone(),
        pairs_label: pairs.label().to_owned(),
        neutral_label: neutral.label().to_owned(),
        method: MethodNotes::default(),
    })
}
