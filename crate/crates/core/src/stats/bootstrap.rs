use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bias::{direction_from_vectors, mean_abs_cosine, NeutralTermSet, TermPairSet};
use crate::embedding::EmbeddingSpace;
use crate::error::{Error, Result};

pub const DEFAULT_REPLICATES: usize = 1000;
const MAX_SKIPPED_FRACTION: f64 = 0.10;
const CI_LOW: f64 = 0.025;
const CI_HIGH: f64 = 0.975;

/// How replicates were drawn; stored with every result.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResamplingPolicy {
    /// Pairs are drawn as units, with replacement, from this many usable pairs.
    pub pair_pool: usize,
    /// Neutral terms are drawn with replacement from this many usable terms.
    pub neutral_pool: usize,
    pub requested_replicates: usize,
    /// Replicates dropped because their difference set was degenerate.
    pub skipped: usize,
    pub interval: String,
    pub pairing: Pairing,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Pairing {
    /// Both spaces see the same resampled term indices in each replicate.
    Paired,
    /// Each space is resampled independently.
    Unpaired,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BootstrapResult {
    pub replicates: Vec<f64>,
    pub point_estimate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub n_replicates: usize,
    pub seed: u64,
    pub policy: ResamplingPolicy,
}

/// Nearest-rank percentile: the smallest sample with at least `q` of the
/// mass at or below it. Always returns an observed value.
pub fn percentile(sorted: &[f64], q: f64) -> f64 {
    let n = sorted.len();
    let rank = (q * n as f64).ceil() as usize;
    sorted[rank.clamp(1, n) - 1]
}

fn replicate_rng(seed: u64, replicate: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(replicate);
    rng
}

/// Resampled pair and neutral-term indices for one replicate.
struct Draw {
    pairs: Vec<usize>,
    neutral: Vec<usize>,
}

impl Draw {
    fn new(rng: &mut ChaCha8Rng, n_pairs: usize, n_neutral: usize) -> Self {
        let pairs = (0..n_pairs).map(|_| rng.random_range(0..n_pairs)).collect();
        let neutral = (0..n_neutral).map(|_| rng.random_range(0..n_neutral)).collect();
        Draw { pairs, neutral }
    }
}

/// Term vectors resolved once per space so replicates only shuffle indices.
struct Resolved<'a> {
    pairs: Vec<(&'a [f64], &'a [f64])>,
    neutral: Vec<&'a [f64]>,
}

impl<'a> Resolved<'a> {
    fn new(space: &'a EmbeddingSpace, pairs: &[(String, String)], neutral: &[String]) -> Self {
        let get = |t: &str| space.vector(t).expect("usable terms are checked against every space");
        Resolved {
            pairs: pairs.iter().map(|(a, b)| (get(a), get(b))).collect(),
            neutral: neutral.iter().map(|t| get(t)).collect(),
        }
    }

    fn full(&self) -> Result<f64> {
        let (g, _) = direction_from_vectors(&self.pairs)?;
        mean_abs_cosine(&g, &self.neutral)
    }

    /// `Ok(None)` marks a degenerate replicate.
    fn replicate(&self, draw: &Draw) -> Result<Option<f64>> {
        let pairs: Vec<_> = draw.pairs.iter().map(|&i| self.pairs[i]).collect();
        let neutral: Vec<_> = draw.neutral.iter().map(|&i| self.neutral[i]).collect();
        match direction_from_vectors(&pairs) {
            Ok((g, _)) => mean_abs_cosine(&g, &neutral).map(Some),
            Err(Error::DegenerateDifferences) => Ok(None),
            Err(e) => Err(e),
        }
    }
}

/// Pairs and neutral terms present in every space, in file order.
fn usable_terms(
    spaces: &[&EmbeddingSpace],
    pairs: &TermPairSet,
    neutral: &NeutralTermSet,
) -> Result<(Vec<(String, String)>, Vec<String>)> {
    let in_all = |t: &str| spaces.iter().all(|s| s.contains(t));
    let usable_pairs: Vec<(String, String)> = pairs
        .pairs()
        .iter()
        .filter(|(a, b)| in_all(a) && in_all(b))
        .cloned()
        .collect();
    if usable_pairs.is_empty() {
        return Err(Error::NoPairsInVocabulary);
    }
    let usable_neutral: Vec<String> = neutral.terms().iter().filter(|t| in_all(t)).cloned().collect();
    if usable_neutral.is_empty() {
        return Err(Error::NoNeutralTerms);
    }
    Ok((usable_pairs, usable_neutral))
}

fn check_replicates(n_replicates: usize) -> Result<()> {
    if n_replicates < 1 {
        return Err(Error::InvalidConfig("n_replicates must be at least 1".into()));
    }
    Ok(())
}

fn check_skipped(skipped: usize, total: usize) -> Result<()> {
    if skipped as f64 > MAX_SKIPPED_FRACTION * total as f64 {
        return Err(Error::TooManySkipped { skipped, total });
    }
    Ok(())
}

/// Distribution of direct bias when G1/G2 pairs and neutral terms are resampled
/// with replacement. Replicates are independent given `(seed, index)` and are
/// computed in parallel; results equal a sequential run bit for bit.
pub fn bootstrap_direct_bias(
    space: &EmbeddingSpace,
    pairs: &TermPairSet,
    neutral: &NeutralTermSet,
    n_replicates: usize,
    seed: u64,
) -> Result<BootstrapResult> {
    check_replicates(n_replicates)?;
    let (usable_pairs, usable_neutral) = usable_terms(&[space], pairs, neutral)?;
    let resolved = Resolved::new(space, &usable_pairs, &usable_neutral);
    let point_estimate = resolved.full()?;

    let outcomes: Vec<Option<f64>> = (0..n_replicates as u64)
        .into_par_iter()
        .map(|r| {
            let draw = Draw::new(&mut replicate_rng(seed, r), usable_pairs.len(), usable_neutral.len());
            resolved.replicate(&draw)
        })
        .collect::<Result<_>>()?;

    let replicates: Vec<f64> = outcomes.iter().flatten().copied().collect();
    let skipped = n_replicates - replicates.len();
    check_skipped(skipped, n_replicates)?;

    let mut sorted = replicates.clone();
    sorted.sort_by(f64::total_cmp);
    Ok(BootstrapResult {
        ci_low: percentile(&sorted, CI_LOW),
        ci_high: percentile(&sorted, CI_HIGH),
        n_replicates: replicates.len(),
        replicates,
        point_estimate,
        seed,
        policy: ResamplingPolicy {
            pair_pool: usable_pairs.len(),
            neutral_pool: usable_neutral.len(),
            requested_replicates: n_replicates,
            skipped,
            interval: "percentile (nearest rank) 2.5/97.5".into(),
            pairing: Pairing::Paired,
        },
    })
}

/// Bootstrap comparison of two spaces under term resampling.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    /// Share of replicates with `bias_a - bias_b <= 0`, ties counted as one half.
    /// Small values are evidence that A is more biased than B.
    pub p_value: f64,
    pub deltas: Vec<f64>,
    pub point_delta: f64,
    pub seed: u64,
    pub policy: ResamplingPolicy,
}

/// Compares the direct bias of two spaces. Term sets are restricted to terms
/// present in both spaces; in paired mode both spaces see the same draws.
pub fn compare_corpora(
    space_a: &EmbeddingSpace,
    space_b: &EmbeddingSpace,
    pairs: &TermPairSet,
    neutral: &NeutralTermSet,
    n_replicates: usize,
    seed: u64,
    pairing: Pairing,
) -> Result<Comparison> {
    check_replicates(n_replicates)?;
    let (usable_pairs, usable_neutral) = usable_terms(&[space_a, space_b], pairs, neutral)?;
    let a = Resolved::new(space_a, &usable_pairs, &usable_neutral);
    let b = Resolved::new(space_b, &usable_pairs, &usable_neutral);
    let point_delta = a.full()? - b.full()?;
    let (k, w) = (usable_pairs.len(), usable_neutral.len());

    let outcomes: Vec<Option<f64>> = (0..n_replicates as u64)
        .into_par_iter()
        .map(|r| {
            let draw_a = Draw::new(&mut replicate_rng(seed, r), k, w);
            let draw_b = match pairing {
                Pairing::Paired => None,
                Pairing::Unpaired => Some(Draw::new(&mut replicate_rng(seed, r | 1 << 63), k, w)),
            };
            let va = a.replicate(&draw_a)?;
            let vb = b.replicate(draw_b.as_ref().unwrap_or(&draw_a))?;
            Ok(va.zip(vb).map(|(x, y)| x - y))
        })
        .collect::<Result<_>>()?;

    let deltas: Vec<f64> = outcomes.iter().flatten().copied().collect();
    let skipped = n_replicates - deltas.len();
    check_skipped(skipped, n_replicates)?;

    let below = deltas.iter().filter(|&&d| d < 0.0).count();
    let ties = deltas.iter().filter(|&&d| d == 0.0).count();
    let p_value = (2 * below + ties) as f64 / (2 * deltas.len()) as f64;

    Ok(Comparison {
        p_value,
        deltas,
        point_delta,
        seed,
        policy: ResamplingPolicy {
            pair_pool: k,
            neutral_pool: w,
            requested_replicates: n_replicates,
            skipped,
            interval: "one-sided bootstrap p-value, ties count one half".into(),
            pairing,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embedding::test_support::space;

    fn pairs(list: &[(&str, &str)]) -> TermPairSet {
        TermPairSet::new(list.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect(), "p").unwrap()
    }

    fn neutral(list: &[&str]) -> NeutralTermSet {
        NeutralTermSet::new(list.iter().copied(), "w").unwrap()
    }

    #[test]
    fn nearest_rank_percentile() {
        let v = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(percentile(&v, 0.025), 1.0);
        assert_eq!(percentile(&v, 0.5), 2.0);
        assert_eq!(percentile(&v, 0.975), 4.0);
        assert_eq!(percentile(&[7.0], 0.5), 7.0);
    }

    #[test]
    fn singleton_sets_give_zero_width_interval() {
        let s = space(&[("he", &[1.0, 0.1]), ("she", &[-1.0, 0.2]), ("nurse", &[-0.3, 1.0])]);
        let r = bootstrap_direct_bias(&s, &pairs(&[("he", "she")]), &neutral(&["nurse"]), 200, 1).unwrap();
        assert!(r.replicates.iter().all(|&v| v == r.point_estimate));
        assert_eq!(r.ci_low, r.ci_high);
        assert_eq!(r.n_replicates, 200);
    }

    #[test]
    fn degenerate_replicates_are_counted() {
        // "a"/"b" share a vector, so draws using only that pair are degenerate.
        let s = space(&[
            ("a", &[1.0, 1.0]),
            ("b", &[1.0, 1.0]),
            ("he", &[1.0, 0.0]),
            ("she", &[-1.0, 0.0]),
            ("w", &[0.3, 0.4]),
        ]);
        let err = bootstrap_direct_bias(&s, &pairs(&[("a", "b"), ("he", "she")]), &neutral(&["w"]), 400, 3).unwrap_err();
        assert!(matches!(err, Error::TooManySkipped { .. }), "{err}");
    }

    #[test]
    fn missing_terms_are_errors() {
        let s = space(&[("he", &[1.0, 0.0]), ("she", &[-1.0, 0.0])]);
        assert!(matches!(
            bootstrap_direct_bias(&s, &pairs(&[("x", "y")]), &neutral(&["he"]), 10, 0),
            Err(Error::NoPairsInVocabulary)
        ));
        assert!(matches!(
            bootstrap_direct_bias(&s, &pairs(&[("he", "she")]), &neutral(&["zz"]), 10, 0),
            Err(Error::NoNeutralTerms)
        ));
        assert!(bootstrap_direct_bias(&s, &pairs(&[("he", "she")]), &neutral(&["he"]), 0, 0).is_err());
    }

    #[test]
    fn unpaired_self_comparison_is_not_degenerate() {
        let s = space(&[
            ("he", &[1.0, 0.1, 0.0]),
            ("she", &[-1.0, 0.2, 0.1]),
            ("man", &[0.8, -0.3, 0.2]),
            ("woman", &[-0.9, 0.0, 0.4]),
            ("w1", &[0.3, 0.4, 0.1]),
            ("w2", &[-0.5, 0.2, 0.7]),
            ("w3", &[0.1, -0.9, 0.3]),
        ]);
        let p = pairs(&[("he", "she"), ("man", "woman")]);
        let w = neutral(&["w1", "w2", "w3"]);
        let paired = compare_corpora(&s, &s, &p, &w, 300, 5, Pairing::Paired).unwrap();
        assert_eq!(paired.p_value, 0.5);
        let unpaired = compare_corpora(&s, &s, &p, &w, 300, 5, Pairing::Unpaired).unwrap();
        assert!(unpaired.deltas.iter().any(|&d| d != 0.0));
    }
}
