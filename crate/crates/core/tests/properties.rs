mod common;

use common::*;
use embias::bias::first_principal_component;
use embias::fixture::gaussian_space;
use embias::stats::*;
use embias::*;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn config() -> ProptestConfig {
    ProptestConfig {
        cases: 24,
        ..ProptestConfig::default()
    }
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn report_invariants(seed in 0u64..10_000, d in prop::sample::select(vec![4usize, 16, 64])) {
        let p = planted(seed, d, 4, 30);
        let r = bias_profile(&p.space, &p.pairs, &p.neutral).unwrap();
        let g_norm = dot(&r.direction.vector, &r.direction.vector).sqrt();
        prop_assert!((g_norm - 1.0).abs() <= 1e-6);
        prop_assert!(r.word_biases.values().all(|b| (-1.0..=1.0).contains(b)));
        prop_assert!((0.0..=1.0).contains(&r.direct_bias));
        let mean = r.word_biases.values().map(|b| b.abs()).sum::<f64>() / r.word_biases.len() as f64;
        prop_assert!((mean - r.direct_bias).abs() <= 1e-12);
        prop_assert!(r.direction.pairs_used >= 1);
    }

    #[test]
    fn scale_rotation_swap_duplication(seed in 0u64..10_000, c in 0.01f64..100.0) {
        let p = planted(seed, 12, 4, 20);
        let base = bias_profile(&p.space, &p.pairs, &p.neutral).unwrap();

        let scaled = p.space.map_rows(|r| r.iter().map(|v| v * c).collect()).unwrap();
        let s = bias_profile(&scaled, &p.pairs, &p.neutral).unwrap();
        prop_assert!((s.direct_bias - base.direct_bias).abs() <= 1e-9);
        for (t, v) in &base.word_biases {
            prop_assert!((s.word_biases[t] - v).abs() <= 1e-9);
        }

        let q = random_orthogonal(&mut ChaCha8Rng::seed_from_u64(seed), 12);
        let r = bias_profile(&rotate(&p.space, &q), &p.pairs, &p.neutral).unwrap();
        for (t, v) in &base.word_biases {
            prop_assert!((r.word_biases[t] - v).abs() <= 1e-6);
        }

        let sw = bias_profile(&p.space, &p.pairs.swapped(), &p.neutral).unwrap();
        prop_assert_eq!(sw.direct_bias, base.direct_bias);
        for (t, v) in &base.word_biases {
            prop_assert_eq!(sw.word_biases[t], -v);
        }

        let doubled: Vec<(String, String)> = p.pairs.pairs().iter().chain(p.pairs.pairs()).cloned().collect();
        let g2 = bias_direction(&p.space, &TermPairSet::new(doubled, "x").unwrap()).unwrap().vector;
        for (a, b) in base.direction.vector.iter().zip(&g2) {
            prop_assert!((a - b).abs() <= 1e-9);
        }
    }

    /// Random 10-vector sets in d=6 with one stretched, randomly rotated axis,
    /// kept when the top component is separated.
    #[test]
    fn power_iteration_matches_dense_eigen(seed in 0u64..100_000, stretch in 1.5f64..6.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let q = random_orthogonal(&mut rng, 6);
        let vectors: Vec<Vec<f64>> = (0..10)
            .map(|_| {
                let mut v = gaussian(&mut rng, 6);
                v[0] *= stretch;
                (&q * nalgebra::DVector::from_vec(v)).iter().copied().collect()
            })
            .collect();
        let (oracle, oracle_ratio) = dense_principal_component(&vectors);
        prop_assume!(oracle_ratio >= 0.55);
        let (g, ratio) = first_principal_component(&vectors).unwrap();
        prop_assert!(dot(&g, &oracle).abs() >= 1.0 - 1e-9);
        prop_assert!((ratio - oracle_ratio).abs() <= 1e-9);
    }

    #[test]
    fn tau_is_symmetric_and_bounded(xs in prop::collection::vec(-5i32..5, 2..40), seed in 0u64..1000) {
        let xs: Vec<f64> = xs.into_iter().map(f64::from).collect();
        prop_assume!(xs.iter().any(|&x| x != xs[0]));
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ys: Vec<f64> = xs.iter().map(|x| x + 3.0 * gaussian(&mut rng, 1)[0]).collect();
        let a = kendall_tau(&xs, &ys).unwrap();
        prop_assert_eq!(a, kendall_tau(&ys, &xs).unwrap());
        prop_assert!(a.abs() <= 1.0);
        prop_assert_eq!(kendall_tau(&xs, &xs).unwrap(), 1.0);
        prop_assert!((a - brute_force_tau(&xs, &ys)).abs() <= 1e-12);
    }

    #[test]
    fn density_masses_sum_to_one(values in prop::collection::vec(-1.0f64..=1.0, 1..500)) {
        let d = density_of(&values).unwrap();
        prop_assert_eq!(d.bin_edges.len(), 65);
        prop_assert!(d.bin_edges.windows(2).all(|w| w[0] < w[1]));
        prop_assert!(d.masses.iter().all(|&m| m >= 0.0));
        prop_assert!((d.masses.iter().sum::<f64>() - 1.0).abs() <= 1e-9);
        prop_assert_eq!(d.n, values.len());
    }

    #[test]
    fn comparison_is_antisymmetric(seed in 0u64..10_000) {
        let a = planted(seed, 8, 3, 15);
        let b = planted(seed + 1, 8, 3, 15);
        let ab = compare_corpora(&a.space, &b.space, &a.pairs, &a.neutral, 200, seed, Pairing::Paired).unwrap();
        let ba = compare_corpora(&b.space, &a.space, &a.pairs, &a.neutral, 200, seed, Pairing::Paired).unwrap();
        prop_assert_eq!(ab.p_value + ba.p_value, 1.0);
        for (x, y) in ab.deltas.iter().zip(&ba.deltas) {
            prop_assert_eq!(*x, -*y);
        }
    }
}

#[test]
fn three_pairs_in_four_dimensions_match_dense_eigen() {
    let axis = unit(&[0.2, -0.9, 0.3, 0.1]);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut terms = Vec::new();
    let mut rows = Vec::new();
    let mut diffs = Vec::new();
    for i in 0..3 {
        let c = gaussian(&mut rng, 4);
        let noise: Vec<f64> = gaussian(&mut rng, 4).iter().map(|v| 0.1 * v).collect();
        let x: Vec<f64> = (0..4).map(|k| c[k] + 2.0 * axis[k] + noise[k]).collect();
        let y: Vec<f64> = (0..4).map(|k| c[k] - 2.0 * axis[k]).collect();
        let d: Vec<f64> = x.iter().zip(&y).map(|(a, b)| a - b).collect();
        diffs.push(d.iter().map(|v| -v).collect());
        diffs.push(d);
        terms.extend([format!("x{i}"), format!("y{i}")]);
        rows.extend([x, y]);
    }
    let space = space_from_rows("four", terms, rows);
    let pairs = TermPairSet::new((0..3).map(|i| (format!("x{i}"), format!("y{i}"))).collect(), "p").unwrap();
    let g = bias_direction(&space, &pairs).unwrap();
    let (oracle, ratio) = dense_principal_component(&diffs);
    assert!(dot(&g.vector, &oracle).abs() >= 1.0 - 1e-9);
    assert!((g.explained_variance_ratio - ratio).abs() < 1e-9);
    assert!(dot(&g.vector, &axis) > 0.9);
}

#[test]
fn rank_stability_examples() {
    let p = planted(1, 16, 4, 30);
    let a = bias_profile(&p.space, &p.pairs, &p.neutral).unwrap();
    let m = rank_stability_matrix(&[a.clone(), a.clone()]).unwrap();
    assert_eq!(m.values, vec![vec![1.0, 1.0], vec![1.0, 1.0]]);

    let mut flipped = a.clone();
    flipped.word_biases.values_mut().for_each(|v| *v = -*v);
    assert_eq!(rank_stability_matrix(&[a.clone(), flipped]).unwrap().get(0, 1), -1.0);

    let others: Vec<BiasReport> = (2..4)
        .map(|s| {
            let q = planted(s, 16, 4, 30);
            let mut r = bias_profile(&q.space, &p.pairs, &p.neutral).unwrap();
            r.space_meta.label = format!("c{s}");
            r
        })
        .collect();
    let m = rank_stability_matrix(&[a, others[0].clone(), others[1].clone()]).unwrap();
    for i in 0..3 {
        assert_eq!(m.get(i, i), 1.0);
        for j in 0..3 {
            assert_eq!(m.get(i, j), m.get(j, i));
            assert!(m.get(i, j).abs() <= 1.0);
        }
    }
    assert_eq!(m.common_terms, 30);

    let mut small = others[0].clone();
    small.word_biases.retain(|t, _| t == "n0");
    assert!(rank_stability_matrix(&[others[1].clone(), small]).is_err());
}

fn gaussian_sweep_space(d: usize, seed: u64) -> EmbeddingSpace {
    let mut s = gaussian_space(2010, d, seed).unwrap();
    s.set_label("gaussian");
    s
}

fn gaussian_terms() -> (TermPairSet, NeutralTermSet) {
    let pairs = TermPairSet::new((0..5).map(|i| (format!("w{}", 2 * i), format!("w{}", 2 * i + 1))).collect(), "p").unwrap();
    let neutral = NeutralTermSet::new((10..2010).map(|i| format!("w{i}")), "w").unwrap();
    (pairs, neutral)
}

#[test]
fn gaussian_sweep_tracks_concentration_law() {
    let (pairs, neutral) = gaussian_terms();
    let spaces: Vec<EmbeddingSpace> = [25, 100, 400].iter().map(|&d| gaussian_sweep_space(d, d as u64)).collect();
    let refs: Vec<&EmbeddingSpace> = spaces.iter().collect();
    let curve = dimension_sweep(&refs, &pairs, &neutral).unwrap();
    assert_eq!(curve.labels(), ["gaussian"]);
    for point in curve.corpus("gaussian") {
        let law = (2.0 / (std::f64::consts::PI * point.dimension as f64)).sqrt();
        let rel = (point.direct_bias - law).abs() / law;
        assert!(rel < 0.25, "d={} bias {} law {law}", point.dimension, point.direct_bias);
    }
}

#[test]
fn sweep_groups_orders_and_keeps_duplicates() {
    let (pairs, neutral) = gaussian_terms();
    let big = gaussian_sweep_space(40, 1);
    let small = gaussian_sweep_space(10, 2);
    let mut other = gaussian_sweep_space(20, 3);
    other.set_label("another");
    let mut other2 = gaussian_sweep_space(30, 4);
    other2.set_label("another");
    let curve = dimension_sweep(&[&big, &other, &small, &other2, &big], &pairs, &neutral).unwrap();
    assert_eq!(curve.labels(), ["another", "gaussian"]);
    let dims: Vec<usize> = curve.corpus("gaussian").iter().map(|p| p.dimension).collect();
    assert_eq!(dims, [10, 40, 40]);
    let g = curve.corpus("gaussian");
    assert_eq!(g[1], g[2]);
    for label in curve.labels() {
        let dims: Vec<usize> = curve.corpus(label).iter().map(|p| p.dimension).collect();
        assert!(dims.windows(2).all(|w| w[0] <= w[1]));
    }
    assert!(dimension_sweep(&[&big, &other], &pairs, &neutral).is_err());

    let mut csv = Vec::new();
    curve.write_csv(&mut csv).unwrap();
    let text = String::from_utf8(csv).unwrap();
    assert!(text.starts_with("corpus,dimension,direct_bias\nanother,20,"));
    assert_eq!(text.lines().count(), 6);
}

#[test]
fn bootstrap_is_deterministic_and_thread_count_independent() {
    let p = planted(9, 24, 6, 40);
    let run = |threads: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| bootstrap_direct_bias(&p.space, &p.pairs, &p.neutral, 300, 42).unwrap())
    };
    let one = run(1);
    assert_eq!(one, run(1));
    assert_eq!(one, run(4));
    assert_ne!(one.replicates, bootstrap_direct_bias(&p.space, &p.pairs, &p.neutral, 300, 43).unwrap().replicates);
    assert_eq!(one.n_replicates, one.replicates.len());
    assert!(one.ci_low <= one.ci_high);
    assert!(one.replicates.iter().all(|v| (0.0..=1.0).contains(v)));
    assert_eq!(one.policy.skipped, 0);
}
