//! Tokenization, vocabulary construction and corpus streaming.

use std::collections::HashMap;
use std::fs;
use std::path::Path;

use rayon::prelude::*;

use crate::error::{Error, Result};

pub const DEFAULT_MIN_COUNT: u64 = 5;
pub const DEFAULT_MAX_VOCAB: usize = 50_000;

/// Splits `text` on whitespace, strips surrounding punctuation and lowercases.
///
/// Only tokens made of alphabetic characters and apostrophes survive, so
/// numbers, URLs and mixed tokens such as `abc123` are dropped.
pub fn tokenize(text: &str) -> Vec<String> {
    text.split_whitespace().filter_map(normalize_token).collect()
}

fn normalize_token(raw: &str) -> Option<String> {
    let trimmed = raw.trim_matches(|c: char| !c.is_alphanumeric());
    if trimmed.is_empty() {
        return None;
    }
    let lowered = trimmed.to_lowercase();
    if !lowered.chars().all(|c| c.is_alphabetic() || c == '\'') {
        return None;
    }
    Some(lowered)
}

/// Tokenized documents. Context windows never cross document boundaries.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TokenStream {
    documents: Vec<Vec<String>>,
}

impl TokenStream {
    pub fn new(documents: Vec<Vec<String>>) -> Self {
        let documents = documents.into_iter().filter(|d| !d.is_empty()).collect();
        TokenStream { documents }
    }

    /// Treats every line of `text` as one document.
    pub fn from_text(text: &str) -> Self {
        let lines: Vec<&str> = text.lines().collect();
        let documents = lines.par_iter().map(|line| tokenize(line)).collect();
        Self::new(documents)
    }

    pub fn from_files<P: AsRef<Path>>(paths: &[P]) -> Result<Self> {
        let mut documents = Vec::new();
        for path in paths {
            let path = path.as_ref();
            let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
            documents.extend(Self::from_text(&text).documents);
        }
        Ok(TokenStream { documents })
    }

    pub fn documents(&self) -> &[Vec<String>] {
        &self.documents
    }

    pub fn tokens(&self) -> impl Iterator<Item = &str> {
        self.documents.iter().flatten().map(String::as_str)
    }

    pub fn token_count(&self) -> usize {
        self.documents.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.token_count() == 0
    }
}

/// Terms with their dense ids and occurrence counts.
///
/// Ids are assigned by descending count, ties broken lexicographically, so
/// the same stream always produces the same ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vocabulary {
    terms: Vec<String>,
    counts: Vec<u64>,
    index: HashMap<String, usize>,
}

impl Vocabulary {
    /// Builds a vocabulary from `(term, count)` entries, sorting them into id order.
    pub fn from_counts(entries: impl IntoIterator<Item = (String, u64)>) -> Self {
        let mut entries: Vec<(String, u64)> = entries.into_iter().collect();
        entries.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        let (terms, counts): (Vec<_>, Vec<_>) = entries.into_iter().unzip();
        let index = terms
            .iter()
            .enumerate()
            .map(|(i, t)| (t.clone(), i))
            .collect();
        Vocabulary {
            terms,
            counts,
            index,
        }
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

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn id(&self, term: &str) -> Option<usize> {
        self.index.get(term).copied()
    }

    pub fn count(&self, term: &str) -> Option<u64> {
        self.id(term).map(|i| self.counts[i])
    }

    pub fn total_count(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Relative frequency of each retained term among retained tokens.
    pub fn frequencies(&self) -> Vec<f64> {
        let total = self.total_count() as f64;
        self.counts.iter().map(|&c| c as f64 / total).collect()
    }
}

/// Counts the stream and keeps terms seen at least `min_count` times, capped
/// at the `max_size` most frequent.
pub fn build_vocabulary(stream: &TokenStream, min_count: u64, max_size: usize) -> Result<Vocabulary> {
    if min_count < 1 {
        return Err(Error::InvalidConfig("min_count must be at least 1".into()));
    }
    if max_size < 1 {
        return Err(Error::InvalidConfig("max_size must be at least 1".into()));
    }
    if stream.is_empty() {
        return Err(Error::EmptyCorpus);
    }

    let counts = stream
        .documents()
        .par_iter()
        .fold(HashMap::<&str, u64>::new, |mut acc, doc| {
            for token in doc {
                *acc.entry(token.as_str()).or_default() += 1;
            }
            acc
        })
        .reduce(HashMap::new, |mut a, b| {
            for (term, count) in b {
                *a.entry(term).or_default() += count;
            }
            a
        });

    let mut vocab = Vocabulary::from_counts(
        counts
            .into_iter()
            .filter(|&(_, c)| c >= min_count)
            .map(|(t, c)| (t.to_owned(), c)),
    );
    vocab.terms.truncate(max_size);
    vocab.counts.truncate(max_size);
    vocab.index.retain(|_, id| *id < max_size);

    if vocab.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    Ok(vocab)
}
