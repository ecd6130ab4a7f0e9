//! Deterministic fixtures: vendored term lists, a generated English-like corpus
//! with planted gender skews, and i.i.d. Gaussian embedding spaces.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{weighted::WeightedAliasIndex, Distribution, StandardNormal};

use crate::bias::{NeutralTermSet, TermPairSet};
use crate::embedding::{EmbeddingSpace, Provenance, SpaceMeta};
use crate::error::Result;

/// Ten definitional female/male pairs, female term first.
pub const GENDER_PAIRS: &str = include_str!("../data/gender_pairs.txt");
/// Occupation names used as the neutral set.
pub const PROFESSIONS: &str = include_str!("../data/professions.txt");

pub fn gender_pairs() -> TermPairSet {
    TermPairSet::parse(GENDER_PAIRS, "gender_pairs").expect("vendored pair list parses")
}

pub fn professions() -> NeutralTermSet {
    NeutralTermSet::parse(PROFESSIONS, "professions").expect("vendored profession list parses")
}

const FUNCTION_WORDS: &[&str] = &[
    "the", "a", "of", "and", "in", "to", "was", "with", "for", "on", "at", "by", "from", "that", "this", "it", "as",
    "is", "had", "not", "but", "were", "which", "there", "been", "would", "about", "after", "into", "over",
];
const VERBS: &[&str] = &[
    "said", "met", "called", "thanked", "visited", "helped", "joined", "told", "asked", "hired", "praised", "followed",
];
const ONSETS: &[&str] = &[
    "b", "c", "d", "f", "g", "h", "j", "k", "l", "m", "n", "p", "r", "s", "t", "v", "w", "z", "br", "cl", "dr", "gr",
    "pl", "st", "tr", "sh", "ch", "th",
];
const NUCLEI: &[&str] = &["a", "e", "i", "o", "u", "ai", "ea", "ou", "io", "ee"];
const CODAS: &[&str] = &["", "n", "r", "l", "s", "m", "t", "nd", "rk", "st"];

/// Parameters of the generated corpus. Documents are single lines; each has a
/// topic and mixes topical filler with sentences about people and occupations.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticCorpus {
    pub target_bytes: usize,
    pub seed: u64,
    pub topics: usize,
    pub words_per_topic: usize,
    /// Size of each gender-specific context pool.
    pub gendered_context_words: usize,
    /// Largest absolute skew; a profession's female share is `(1 + s) / 2`.
    pub max_skew: f64,
}

impl Default for SyntheticCorpus {
    fn default() -> Self {
        SyntheticCorpus {
            target_bytes: 10 << 20,
            seed: 2024,
            topics: 120,
            words_per_topic: 40,
            gendered_context_words: 30,
            max_skew: 0.9,
        }
    }
}

struct Lexicon {
    topics: Vec<Vec<String>>,
    female_context: Vec<String>,
    male_context: Vec<String>,
    female: Vec<String>,
    male: Vec<String>,
    professions: Vec<String>,
    home_topic: Vec<usize>,
    female_share: Vec<f64>,
}

fn pseudo_word(rng: &mut ChaCha8Rng, taken: &mut std::collections::HashSet<String>) -> String {
    loop {
        let syllables = rng.random_range(2..=3);
        let mut w = String::new();
        for _ in 0..syllables {
            w.push_str(ONSETS[rng.random_range(0..ONSETS.len())]);
            w.push_str(NUCLEI[rng.random_range(0..NUCLEI.len())]);
        }
        w.push_str(CODAS[rng.random_range(0..CODAS.len())]);
        if taken.insert(w.clone()) {
            return w;
        }
    }
}

fn zipf(n: usize) -> WeightedAliasIndex<f64> {
    WeightedAliasIndex::new((1..=n).map(|r| 1.0 / r as f64).collect()).expect("non-empty positive weights")
}

impl SyntheticCorpus {
    /// Skew in [-max_skew, max_skew] planted for each profession; positive
    /// values lean toward the female (first) term of each pair.
    pub fn skews(&self) -> BTreeMap<String, f64> {
        let lex = self.lexicon();
        lex.professions
            .iter()
            .zip(&lex.female_share)
            .map(|(p, q)| (p.clone(), 2.0 * q - 1.0))
            .collect()
    }

    fn lexicon(&self) -> Lexicon {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let pairs = gender_pairs();
        let professions: Vec<String> = professions().terms().to_vec();
        let mut taken: std::collections::HashSet<String> = FUNCTION_WORDS
            .iter()
            .chain(VERBS)
            .map(|s| s.to_string())
            .chain(professions.iter().cloned())
            .chain(pairs.pairs().iter().flat_map(|(a, b)| [a.clone(), b.clone()]))
            .collect();
        let mut words = |n: usize, rng: &mut ChaCha8Rng| (0..n).map(|_| pseudo_word(rng, &mut taken)).collect::<Vec<_>>();
        let topics = (0..self.topics).map(|_| words(self.words_per_topic, &mut rng)).collect();
        let female_context = words(self.gendered_context_words, &mut rng);
        let male_context = words(self.gendered_context_words, &mut rng);
        let home_topic = professions.iter().map(|_| rng.random_range(0..self.topics)).collect();
        let female_share = professions
            .iter()
            .map(|_| (1.0 + rng.random_range(-self.max_skew..=self.max_skew)) / 2.0)
            .collect();
        Lexicon {
            topics,
            female_context,
            male_context,
            female: pairs.pairs().iter().map(|(a, _)| a.clone()).collect(),
            male: pairs.pairs().iter().map(|(_, b)| b.clone()).collect(),
            professions,
            home_topic,
            female_share,
        }
    }

    /// Generates the corpus text, one document per line.
    pub fn generate(&self) -> String {
        let lex = self.lexicon();
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed ^ 0x636f_7270);
        let topic_rank = zipf(self.words_per_topic);
        let topic_pick = zipf(self.topics);
        let profession_pick = zipf(lex.professions.len());
        let gender_rank = zipf(lex.female.len());
        let context_rank = zipf(self.gendered_context_words);

        let mut out = String::with_capacity(self.target_bytes + 4096);
        let mut sentence: Vec<&str> = Vec::with_capacity(16);
        while out.len() < self.target_bytes {
            let topic = topic_pick.sample(&mut rng);
            let sentences = rng.random_range(6..=14);
            for s in 0..sentences {
                sentence.clear();
                let kind: f64 = rng.random();
                let fw = |rng: &mut ChaCha8Rng| FUNCTION_WORDS[rng.random_range(0..FUNCTION_WORDS.len())];
                if kind < 0.3 {
                    let p = profession_pick.sample(&mut rng);
                    let female = rng.random::<f64>() < lex.female_share[p];
                    let home = &lex.topics[lex.home_topic[p]];
                    let (gendered, context) = if female {
                        (&lex.female, &lex.female_context)
                    } else {
                        (&lex.male, &lex.male_context)
                    };
                    sentence.push("the");
                    sentence.push(&lex.professions[p]);
                    sentence.push(VERBS[rng.random_range(0..VERBS.len())]);
                    sentence.push(&gendered[gender_rank.sample(&mut rng)]);
                    sentence.push(fw(&mut rng));
                    sentence.push(&home[topic_rank.sample(&mut rng)]);
                    if rng.random::<f64>() < 0.5 {
                        sentence.push(&context[context_rank.sample(&mut rng)]);
                    }
                    sentence.push(&home[topic_rank.sample(&mut rng)]);
                } else if kind < 0.5 {
                    let (gendered, context) = if rng.random::<bool>() {
                        (&lex.female, &lex.female_context)
                    } else {
                        (&lex.male, &lex.male_context)
                    };
                    sentence.push(&gendered[gender_rank.sample(&mut rng)]);
                    sentence.push(fw(&mut rng));
                    sentence.push(&context[context_rank.sample(&mut rng)]);
                    sentence.push(&lex.topics[topic][topic_rank.sample(&mut rng)]);
                    sentence.push(&gendered[gender_rank.sample(&mut rng)]);
                    sentence.push(&context[context_rank.sample(&mut rng)]);
                } else {
                    let len = rng.random_range(5..=11);
                    for k in 0..len {
                        if k % 3 == 1 {
                            sentence.push(fw(&mut rng));
                        } else {
                            sentence.push(&lex.topics[topic][topic_rank.sample(&mut rng)]);
                        }
                    }
                }
                if s > 0 {
                    out.push(' ');
                }
                let mut first = true;
                for w in &sentence {
                    if !first {
                        out.push(' ');
                    }
                    first = false;
                    out.push_str(w);
                }
                out.push('.');
            }
            out.push('\n');
        }
        out
    }
}

/// Space of `n` terms (`w0`, `w1`, ...) with i.i.d. standard normal entries.
pub fn gaussian_space(n: usize, dim: usize, seed: u64) -> Result<EmbeddingSpace> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let matrix: Vec<f64> = (0..n * dim).map(|_| StandardNormal.sample(&mut rng)).collect();
    let terms = (0..n).map(|i| format!("w{i}")).collect();
    let meta = SpaceMeta {
        label: format!("gaussian-d{dim}"),
        dimension: dim,
        vocab_size: n,
        provenance: Provenance::Synthetic {
            description: format!("i.i.d. N(0,1) entries, seed {seed}"),
        },
    };
    EmbeddingSpace::new(terms, matrix, dim, meta)
}
