//! Shared builders and independent oracles for the integration tests.
#![allow(dead_code)]

use std::io::Write;

use embias::embedding::{Provenance, SpaceMeta};
use embias::{EmbeddingSpace, NeutralTermSet, TermPairSet};
use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

pub fn meta(label: &str) -> SpaceMeta {
    SpaceMeta {
        label: label.into(),
        dimension: 0,
        vocab_size: 0,
        provenance: Provenance::Synthetic {
            description: "integration test".into(),
        },
    }
}

pub fn space_from_rows(label: &str, terms: Vec<String>, rows: Vec<Vec<f64>>) -> EmbeddingSpace {
    let dim = rows[0].len();
    let matrix = rows.into_iter().flatten().collect();
    EmbeddingSpace::new(terms, matrix, dim, meta(label)).unwrap()
}

pub fn gaussian(rng: &mut ChaCha8Rng, d: usize) -> Vec<f64> {
    (0..d).map(|_| StandardNormal.sample(rng)).collect()
}

/// A random space with `k` pairs `x{i}`/`y{i}` separated along a hidden axis
/// and `w` neutral terms `n{j}`, so the first principal component is well
/// separated from the rest.
pub struct Planted {
    pub space: EmbeddingSpace,
    pub pairs: TermPairSet,
    pub neutral: NeutralTermSet,
    pub axis: Vec<f64>,
}

pub fn planted(seed: u64, d: usize, k: usize, w: usize) -> Planted {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let axis = unit(&gaussian(&mut rng, d));
    let mut terms = Vec::new();
    let mut rows = Vec::new();
    let mut pair_list = Vec::new();
    for i in 0..k {
        let center = gaussian(&mut rng, d);
        let strength = 3.0 + rng.random_range(0.0..2.0);
        let noise = 0.3 / (d as f64).sqrt();
        for (name, sign) in [(format!("x{i}"), 1.0), (format!("y{i}"), -1.0)] {
            let row: Vec<f64> = center
                .iter()
                .zip(&axis)
                .map(|(c, a)| c + sign * strength * a + noise * rng.sample::<f64, _>(StandardNormal))
                .collect();
            terms.push(name);
            rows.push(row);
        }
        pair_list.push((format!("x{i}"), format!("y{i}")));
    }
    for j in 0..w {
        let lean = rng.random_range(-1.0..1.0);
        let row: Vec<f64> = gaussian(&mut rng, d).iter().zip(&axis).map(|(g, a)| g + lean * a).collect();
        terms.push(format!("n{j}"));
        rows.push(row);
    }
    Planted {
        space: space_from_rows("planted", terms, rows),
        pairs: TermPairSet::new(pair_list, "planted pairs").unwrap(),
        neutral: NeutralTermSet::new((0..w).map(|j| format!("n{j}")), "planted neutral").unwrap(),
        axis,
    }
}

pub fn unit(v: &[f64]) -> Vec<f64> {
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.iter().map(|x| x / n).collect()
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Haar-distributed orthogonal matrix from the QR factorization of a Gaussian
/// matrix, with the sign fix that makes the distribution uniform.
pub fn random_orthogonal(rng: &mut ChaCha8Rng, d: usize) -> DMatrix<f64> {
    let a = DMatrix::from_fn(d, d, |_, _| rng.sample::<f64, _>(StandardNormal));
    let qr = a.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..d {
        if r[(j, j)] < 0.0 {
            let mut col = q.column_mut(j);
            col.neg_mut();
        }
    }
    q
}

pub fn rotate(space: &EmbeddingSpace, q: &DMatrix<f64>) -> EmbeddingSpace {
    space
        .map_rows(|row| {
            let v = q * nalgebra::DVector::from_column_slice(row);
            v.iter().copied().collect()
        })
        .unwrap()
}

/// Top eigenvector and explained-variance ratio from a full dense
/// eigendecomposition of the covariance.
pub fn dense_principal_component(vectors: &[Vec<f64>]) -> (Vec<f64>, f64) {
    let n = vectors.len();
    let d = vectors[0].len();
    let data = DMatrix::from_fn(n, d, |i, j| vectors[i][j]);
    let mean = data.row_mean();
    let centered = DMatrix::from_fn(n, d, |i, j| data[(i, j)] - mean[j]);
    let cov = centered.transpose() * &centered / n as f64;
    let eig = SymmetricEigen::new(cov);
    let (top, &value) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .unwrap();
    let trace: f64 = eig.eigenvalues.iter().sum();
    (eig.eigenvectors.column(top).iter().copied().collect(), value / trace)
}

/// Tau-b by enumerating every pair.
pub fn brute_force_tau(xs: &[f64], ys: &[f64]) -> f64 {
    let (mut concordant, mut discordant, mut tied_x, mut tied_y) = (0i64, 0i64, 0i64, 0i64);
    for i in 0..xs.len() {
        for j in i + 1..xs.len() {
            let dx = (xs[i] - xs[j]).partial_cmp(&0.0).unwrap() as i64;
            let dy = (ys[i] - ys[j]).partial_cmp(&0.0).unwrap() as i64;
            match (dx, dy) {
                (0, 0) => {}
                (0, _) => tied_x += 1,
                (_, 0) => tied_y += 1,
                _ if dx == dy => concordant += 1,
                _ => discordant += 1,
            }
        }
    }
    let n0 = (concordant + discordant) as f64;
    let denom = ((n0 + tied_x as f64) * (n0 + tied_y as f64)).sqrt();
    (concordant - discordant) as f64 / denom
}

/// One summary line per acceptance criterion. Written to the process stdout
/// directly so it shows up even when the harness captures test output.
pub fn report(criterion: &str, pass: bool, detail: &str) {
    let status = if pass { "PASS" } else { "FAIL" };
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "[acceptance] criterion {criterion}: {status} ({detail})");
}
