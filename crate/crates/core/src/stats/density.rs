use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::bias::BiasReport;
use crate::error::{Error, Result};

pub const DENSITY_BINS: usize = 64;

/// Normalized fixed-bin histogram of signed biases over `[-1, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BiasDensity {
    pub bin_edges: Vec<f64>,
    pub masses: Vec<f64>,
    pub n: usize,
}

impl BiasDensity {
    /// Columns: `bin_low,bin_high,mass`.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["bin_low", "bin_high", "mass"])?;
        for (edges, mass) in self.bin_edges.windows(2).zip(&self.masses) {
            out.write_record([edges[0].to_string(), edges[1].to_string(), mass.to_string()])?;
        }
        out.flush()?;
        Ok(())
    }
}

fn bin_of(value: f64) -> usize {
    let scaled = ((value + 1.0) * (DENSITY_BINS as f64 / 2.0)).floor();
    scaled.clamp(0.0, (DENSITY_BINS - 1) as f64) as usize
}

/// Histogram of arbitrary values in `[-1, 1]`; `-1` lands in the first bin
/// and `1` in the last.
pub fn density_of(values: &[f64]) -> Result<BiasDensity> {
    if values.is_empty() {
        return Err(Error::Stats("density of an empty sample".into()));
    }
    if let Some(v) = values.iter().find(|v| !(-1.0..=1.0).contains(*v)) {
        return Err(Error::Stats(format!("value {v} outside [-1, 1]")));
    }
    let mut counts = vec![0usize; DENSITY_BINS];
    for &v in values {
        counts[bin_of(v)] += 1;
    }
    let half = DENSITY_BINS as f64 / 2.0;
    let bin_edges = (0..=DENSITY_BINS).map(|k| k as f64 / half - 1.0).collect();
    let n = values.len();
    let masses = counts.iter().map(|&c| c as f64 / n as f64).collect();
    Ok(BiasDensity { bin_edges, masses, n })
}

pub fn bias_density(report: &BiasReport) -> Result<BiasDensity> {
    let values: Vec<f64> = report.word_biases.values().copied().collect();
    density_of(&values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn edges_and_boundaries() {
        let d = density_of(&[-1.0, 1.0, 0.0]).unwrap();
        assert_eq!(d.bin_edges.len(), 65);
        assert_eq!(d.bin_edges[0], -1.0);
        assert_eq!(d.bin_edges[32], 0.0);
        assert_eq!(d.bin_edges[64], 1.0);
        assert!(d.bin_edges.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(d.masses[0], 1.0 / 3.0);
        assert_eq!(d.masses[63], 1.0 / 3.0);
        assert_eq!(d.masses[32], 1.0 / 3.0);
    }

    #[test]
    fn single_zero() {
        let d = density_of(&[0.0]).unwrap();
        assert_eq!(d.masses[32], 1.0);
        assert_eq!(d.masses.iter().filter(|&&m| m > 0.0).count(), 1);
    }

    #[test]
    fn uniform_sample_is_flat() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let values: Vec<f64> = (0..10_000).map(|_| rng.random_range(-1.0..1.0)).collect();
        let d = density_of(&values).unwrap();
        let max = d.masses.iter().cloned().fold(f64::MIN, f64::max);
        let min = d.masses.iter().cloned().fold(f64::MAX, f64::min);
        assert!(max / min < 2.0);
        assert!((d.masses.iter().sum::<f64>() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn rejects_empty_and_out_of_range() {
        assert!(density_of(&[]).is_err());
        assert!(density_of(&[1.5]).is_err());
    }
}
