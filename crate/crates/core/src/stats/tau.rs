use std::collections::BTreeSet;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::bias::BiasReport;
use crate::error::{Error, Result};

/// Number of tied pairs within runs of equal values in a sorted sequence.
fn tied_pairs<T: PartialEq>(sorted: impl Iterator<Item = T>) -> u64 {
    let mut total = 0u64;
    let mut run = 0u64;
    let mut prev: Option<T> = None;
    for item in sorted {
        if prev.as_ref() == Some(&item) {
            run += 1;
        } else {
            total += run * (run + 1) / 2;
            run = 0;
        }
        prev = Some(item);
    }
    total + run * (run + 1) / 2
}

/// Sorts `ys` in place with a stable merge sort and returns the number of
/// inversions (element exchanges) performed.
fn count_exchanges(ys: &mut [f64], buf: &mut [f64]) -> u64 {
    let n = ys.len();
    if n < 2 {
        return 0;
    }
    let mid = n / 2;
    let mut swaps = count_exchanges(&mut ys[..mid], &mut buf[..mid]);
    swaps += count_exchanges(&mut ys[mid..], &mut buf[mid..]);
    let (mut i, mut j, mut k) = (0, mid, 0);
    while i < mid && j < n {
        if ys[j] < ys[i] {
            buf[k] = ys[j];
            swaps += (mid - i) as u64;
            j += 1;
        } else {
            buf[k] = ys[i];
            i += 1;
        }
        k += 1;
    }
    buf[k..k + mid - i].copy_from_slice(&ys[i..mid]);
    k += mid - i;
    buf[k..k + n - j].copy_from_slice(&ys[j..n]);
    ys.copy_from_slice(&buf[..n]);
    swaps
}

/// Tie-corrected Kendall tau-b in O(n log n) (Knight's algorithm).
pub fn kendall_tau(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() {
        return Err(Error::LengthMismatch(xs.len(), ys.len()));
    }
    if xs.len() < 2 {
        return Err(Error::TauUndefined("need at least two observations".into()));
    }
    if xs.iter().chain(ys).any(|v| v.is_nan()) {
        return Err(Error::TauUndefined("NaN in input".into()));
    }
    let n = xs.len() as u64;
    let mut order: Vec<usize> = (0..xs.len()).collect();
    order.sort_by(|&a, &b| xs[a].total_cmp(&xs[b]).then(ys[a].total_cmp(&ys[b])));

    let x_ties = tied_pairs(order.iter().map(|&i| xs[i]));
    let joint_ties = tied_pairs(order.iter().map(|&i| (xs[i], ys[i])));

    let mut sorted_y: Vec<f64> = order.iter().map(|&i| ys[i]).collect();
    let mut buf = vec![0.0; sorted_y.len()];
    let exchanges = count_exchanges(&mut sorted_y, &mut buf);
    let y_ties = tied_pairs(sorted_y.iter().copied());

    let total = n * (n - 1) / 2;
    if x_ties == total || y_ties == total {
        return Err(Error::TauUndefined("constant input".into()));
    }
    let concordant_minus_discordant =
        total as f64 - x_ties as f64 - y_ties as f64 + joint_ties as f64 - 2.0 * exchanges as f64;
    let denom = ((total - x_ties) as f64 * (total - y_ties) as f64).sqrt();
    Ok((concordant_minus_discordant / denom).clamp(-1.0, 1.0))
}

/// Pairwise Kendall tau-b between the signed word-bias rankings of several reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TauMatrix {
    pub labels: Vec<String>,
    pub values: Vec<Vec<f64>>,
    /// Size of the neutral-term intersection the coefficients were computed on.
    pub common_terms: usize,
}

impl TauMatrix {
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i][j]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// `label,<label_1>,...,<label_n>` header, then one row per space.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(std::iter::once("label").chain(self.labels.iter().map(String::as_str)))?;
        for (label, row) in self.labels.iter().zip(&self.values) {
            let mut record = vec![label.clone()];
            record.extend(row.iter().map(|v| v.to_string()));
            out.write_record(&record)?;
        }
        out.flush()?;
        Ok(())
    }
}

/// Label used for a report in tau matrices: corpus label plus dimension.
pub fn report_label(report: &BiasReport) -> String {
    format!("{}:d{}", report.space_meta.label, report.space_meta.dimension)
}

pub fn rank_stability_matrix(reports: &[BiasReport]) -> Result<TauMatrix> {
    if reports.len() < 2 {
        return Err(Error::Stats("rank stability needs at least two reports".into()));
    }
    let common: BTreeSet<&String> = reports[0]
        .word_biases
        .keys()
        .filter(|t| reports[1..].iter().all(|r| r.word_biases.contains_key(*t)))
        .collect();
    if common.len() < 2 {
        return Err(Error::Stats(format!(
            "reports share {} neutral terms, need at least 2",
            common.len()
        )));
    }
    let series: Vec<Vec<f64>> = reports
        .iter()
        .map(|r| common.iter().map(|t| r.word_biases[*t]).collect())
        .collect();
    let n = reports.len();
    let mut values = vec![vec![1.0; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let tau = kendall_tau(&series[i], &series[j])?;
            values[i][j] = tau;
            values[j][i] = tau;
        }
    }
    Ok(TauMatrix {
        labels: reports.iter().map(report_label).collect(),
        values,
        common_terms: common.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// All-pairs concordance count, the textbook definition of tau-b.
    fn brute_force_tau_b(xs: &[f64], ys: &[f64]) -> f64 {
        let (mut c, mut d, mut tx, mut ty) = (0i64, 0i64, 0i64, 0i64);
        for i in 0..xs.len() {
            for j in i + 1..xs.len() {
                let sx = (xs[i] - xs[j]).signum() * ((xs[i] != xs[j]) as i32 as f64);
                let sy = (ys[i] - ys[j]).signum() * ((ys[i] != ys[j]) as i32 as f64);
                match (sx == 0.0, sy == 0.0) {
                    (true, true) => {}
                    (true, false) => tx += 1,
                    (false, true) => ty += 1,
                    (false, false) if sx == sy => c += 1,
                    (false, false) => d += 1,
                }
            }
        }
        (c - d) as f64 / (((c + d + tx) * (c + d + ty)) as f64).sqrt()
    }

    #[test]
    fn examples() {
        assert_eq!(kendall_tau(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0]).unwrap(), 1.0);
        assert_eq!(kendall_tau(&[1.0, 2.0, 3.0, 4.0], &[4.0, 3.0, 2.0, 1.0]).unwrap(), -1.0);
        let t = kendall_tau(&[1.0, 2.0, 3.0, 4.0], &[1.0, 3.0, 2.0, 4.0]).unwrap();
        assert!((t - 4.0 / 6.0).abs() < 1e-12);
    }

    #[test]
    fn errors() {
        assert!(matches!(kendall_tau(&[1.0, 2.0], &[1.0]), Err(Error::LengthMismatch(2, 1))));
        assert!(kendall_tau(&[1.0], &[1.0]).is_err());
        assert!(matches!(kendall_tau(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]), Err(Error::TauUndefined(_))));
        assert!(kendall_tau(&[1.0, 2.0], &[f64::NAN, 1.0]).is_err());
    }

    #[test]
    fn ties_match_brute_force() {
        let xs = [1.0, 1.0, 2.0, 3.0, 3.0, 3.0, 4.0];
        let ys = [2.0, 1.0, 2.0, 2.0, 5.0, 5.0, 0.0];
        let fast = kendall_tau(&xs, &ys).unwrap();
        assert!((fast - brute_force_tau_b(&xs, &ys)).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn agrees_with_brute_force(pairs in proptest::collection::vec((0u8..6, 0u8..6), 2..50)) {
            let xs: Vec<f64> = pairs.iter().map(|p| p.0 as f64).collect();
            let ys: Vec<f64> = pairs.iter().map(|p| p.1 as f64).collect();
            match kendall_tau(&xs, &ys) {
                Ok(t) => {
                    prop_assert!((t - brute_force_tau_b(&xs, &ys)).abs() < 1e-12);
                    prop_assert!(t.abs() <= 1.0);
                    prop_assert_eq!(t, kendall_tau(&ys, &xs).unwrap());
                }
                Err(_) => {
                    let constant = |v: &[f64]| v.iter().all(|a| *a == v[0]);
                    prop_assert!(constant(&xs) || constant(&ys));
                }
            }
        }
    }
}
