use std::collections::BTreeMap;
use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bias::{bias_direction, direct_bias, NeutralTermSet, TermPairSet};
use crate::embedding::EmbeddingSpace;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub dimension: usize,
    pub direct_bias: f64,
    pub corpus_label: String,
}

/// Direct bias against dimension, grouped by corpus label and ordered by
/// dimension within each corpus.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepCurve {
    pub points: Vec<SweepPoint>,
}

impl SweepCurve {
    pub fn corpus(&self, label: &str) -> Vec<&SweepPoint> {
        self.points.iter().filter(|p| p.corpus_label == label).collect()
    }

    pub fn labels(&self) -> Vec<&str> {
        let mut labels: Vec<&str> = self.points.iter().map(|p| p.corpus_label.as_str()).collect();
        labels.dedup();
        labels
    }

    /// Columns: `corpus,dimension,direct_bias`.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["corpus", "dimension", "direct_bias"])?;
        for p in &self.points {
            out.write_record([p.corpus_label.clone(), p.dimension.to_string(), p.direct_bias.to_string()])?;
        }
        out.flush()?;
        Ok(())
    }
}

/// Computes direct bias for every space with the same term sets.
///
/// Each corpus label needs at least two spaces. A space listed twice yields
/// two identical points.
pub fn dimension_sweep(spaces: &[&EmbeddingSpace], pairs: &TermPairSet, neutral: &NeutralTermSet) -> Result<SweepCurve> {
    let mut groups: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
    for (i, space) in spaces.iter().enumerate() {
        groups.entry(space.label()).or_default().push(i);
    }
    if let Some((label, members)) = groups.iter().find(|(_, m)| m.len() < 2) {
        return Err(Error::Stats(format!(
            "corpus {label:?} has {} space(s); a sweep needs at least two per corpus",
            members.len()
        )));
    }
    let values: Vec<f64> = spaces
        .par_iter()
        .map(|space| {
            let direction = bias_direction(space, pairs)?;
            direct_bias(space, &direction, neutral).map(|(v, _)| v)
        })
        .collect::<Result<_>>()?;

    let mut points = Vec::with_capacity(spaces.len());
    for (label, mut members) in groups {
        members.sort_by_key(|&i| spaces[i].dim());
        points.extend(members.into_iter().map(|i| SweepPoint {
            dimension: spaces[i].dim(),
            direct_bias: values[i],
            corpus_label: label.to_owned(),
        }));
    }
    Ok(SweepCurve { points })
}
