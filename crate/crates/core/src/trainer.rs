//! Skip-gram with negative sampling.
//!
//! The trainer follows the reference word2vec recipe: frequent-word
//! subsampling, a dynamic context window, negatives drawn from the unigram
//! distribution raised to 0.75 and a learning rate decaying linearly to
//! 1/100 of its initial value. Only center vectors are emitted.
//!
//! With `workers > 1` the corpus is sharded and workers update the shared
//! weights without locks. Runs are bit-reproducible only with one worker.

use std::sync::atomic::{AtomicU32, AtomicU64, Ordering};

use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::weighted::WeightedAliasIndex;
use serde::{Deserialize, Serialize};

use crate::corpus::{TokenStream, Vocabulary};
use crate::embedding::{EmbeddingSpace, Provenance, SpaceMeta};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub dimension: usize,
    /// Maximum context offset.
    pub window: usize,
    /// Noise samples per positive pair.
    pub negatives: usize,
    pub epochs: usize,
    pub initial_lr: f64,
    /// Subsampling threshold; 0 disables subsampling.
    pub subsample_t: f64,
    pub seed: u64,
    #[serde(default = "one")]
    pub workers: usize,
}

fn one() -> usize {
    1
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            dimension: 100,
            window: 5,
            negatives: 5,
            epochs: 5,
            initial_lr: 0.025,
            subsample_t: 1e-3,
            seed: 1,
            workers: 1,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: &str| Err(Error::InvalidConfig(msg.to_owned()));
        if self.dimension < 2 {
            return fail("dimension must be at least 2");
        }
        if self.window < 1 {
            return fail("window must be at least 1");
        }
        if self.negatives < 1 {
            return fail("negatives must be at least 1");
        }
        if self.epochs < 1 {
            return fail("epochs must be at least 1");
        }
        if !(self.initial_lr.is_finite() && self.initial_lr > 0.0) {
            return fail("initial_lr must be positive");
        }
        if !(self.subsample_t.is_finite() && self.subsample_t >= 0.0) {
            return fail("subsample_t must be non-negative");
        }
        if self.workers < 1 {
            return fail("workers must be at least 1");
        }
        Ok(())
    }
}

/// Probability of keeping a token with relative frequency `f` at threshold `t`.
pub fn keep_probability(f: f64, t: f64) -> f64 {
    if t <= 0.0 || f <= 0.0 {
        return 1.0;
    }
    let r = t / f;
    (r.sqrt() + r).min(1.0)
}

/// Randomly discards frequent tokens. Tokens outside `vocab` are kept.
pub fn subsample(stream: &TokenStream, vocab: &Vocabulary, t: f64, seed: u64) -> TokenStream {
    if t <= 0.0 {
        return stream.clone();
    }
    let freqs = vocab.frequencies();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let documents = stream
        .documents()
        .iter()
        .map(|doc| {
            doc.iter()
                .filter(|tok| match vocab.id(tok) {
                    Some(id) => rng.random::<f64>() < keep_probability(freqs[id], t),
                    None => true,
                })
                .cloned()
                .collect()
        })
        .collect();
    TokenStream::new(documents)
}

/// Unigram counts raised to 0.75, sampled in O(1) with an alias table.
pub struct NoiseDistribution {
    probabilities: Vec<f64>,
    alias: WeightedAliasIndex<f64>,
}

impl NoiseDistribution {
    pub const POWER: f64 = 0.75;

    pub fn new(counts: &[u64]) -> Result<Self> {
        let weights: Vec<f64> = counts.iter().map(|&c| (c as f64).powf(Self::POWER)).collect();
        let total: f64 = weights.iter().sum();
        if total <= 0.0 {
            return Err(Error::EmptyCorpus);
        }
        let probabilities = weights.iter().map(|w| w / total).collect();
        let alias = WeightedAliasIndex::new(weights)
            .map_err(|e| Error::InvalidConfig(format!("noise distribution: {e}")))?;
        Ok(NoiseDistribution {
            probabilities,
            alias,
        })
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        self.alias.sample(rng)
    }
}

fn log_sigmoid(x: f64) -> f64 {
    // log(1 / (1 + e^-x)) without overflow for large |x|
    -((-x).max(0.0) + (-(x.abs())).exp().ln_1p())
}

/// Negative log-likelihood of one positive pair and its noise samples.
pub fn sgns_loss(center: &[f64], context: &[f64], negatives: &[&[f64]]) -> f64 {
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    let mut loss = -log_sigmoid(dot(center, context));
    for neg in negatives {
        loss -= log_sigmoid(-dot(center, neg));
    }
    loss
}

/// Row-level access to the center (input) and context (output) matrices.
trait Params {
    fn dot(&self, center: usize, context: usize) -> f32;
    /// `out[context] += g * in[center]` and `acc += g * out[context]` (pre-update).
    fn update_context(&mut self, center: usize, context: usize, g: f32, acc: &mut [f32]);
    fn add_center(&mut self, center: usize, acc: &[f32]);
}

struct Exclusive<'a> {
    input: &'a mut [f32],
    output: &'a mut [f32],
    dim: usize,
}

impl Params for Exclusive<'_> {
    #[inline]
    fn dot(&self, center: usize, context: usize) -> f32 {
        let d = self.dim;
        let a = &self.input[center * d..(center + 1) * d];
        let b = &self.output[context * d..(context + 1) * d];
        let mut lanes = [0f32; 8];
        let mut ca = a.chunks_exact(8);
        let mut cb = b.chunks_exact(8);
        for (x, y) in (&mut ca).zip(&mut cb) {
            for k in 0..8 {
                lanes[k] += x[k] * y[k];
            }
        }
        let tail: f32 = ca.remainder().iter().zip(cb.remainder()).map(|(x, y)| x * y).sum();
        lanes.iter().sum::<f32>() + tail
    }

    #[inline]
    fn update_context(&mut self, center: usize, context: usize, g: f32, acc: &mut [f32]) {
        let d = self.dim;
        let a = &self.input[center * d..(center + 1) * d];
        let b = &mut self.output[context * d..(context + 1) * d];
        for ((acc, bv), av) in acc.iter_mut().zip(b.iter_mut()).zip(a) {
            *acc += g * *bv;
            *bv += g * av;
        }
    }

    #[inline]
    fn add_center(&mut self, center: usize, acc: &[f32]) {
        let d = self.dim;
        for (v, a) in self.input[center * d..(center + 1) * d].iter_mut().zip(acc) {
            *v += a;
        }
    }
}

/// Racy lock-free view used by parallel workers.
#[derive(Clone, Copy)]
struct Shared<'a> {
    input: &'a [AtomicU32],
    output: &'a [AtomicU32],
    dim: usize,
}

#[inline]
fn load(cell: &AtomicU32) -> f32 {
    f32::from_bits(cell.load(Ordering::Relaxed))
}

#[inline]
fn store(cell: &AtomicU32, v: f32) {
    cell.store(v.to_bits(), Ordering::Relaxed)
}

impl Params for Shared<'_> {
    fn dot(&self, center: usize, context: usize) -> f32 {
        let d = self.dim;
        let a = &self.input[center * d..(center + 1) * d];
        let b = &self.output[context * d..(context + 1) * d];
        a.iter().zip(b).map(|(x, y)| load(x) * load(y)).sum()
    }

    fn update_context(&mut self, center: usize, context: usize, g: f32, acc: &mut [f32]) {
        let d = self.dim;
        let a = &self.input[center * d..(center + 1) * d];
        let b = &self.output[context * d..(context + 1) * d];
        for ((acc, bv), av) in acc.iter_mut().zip(b).zip(a) {
            let old = load(bv);
            *acc += g * old;
            store(bv, old + g * load(av));
        }
    }

    fn add_center(&mut self, center: usize, acc: &[f32]) {
        let d = self.dim;
        for (v, a) in self.input[center * d..(center + 1) * d].iter().zip(acc) {
            store(v, load(v) + a);
        }
    }
}

fn sigmoid(x: f32) -> f32 {
    1.0 / (1.0 + (-x).exp())
}

/// One SGD step on a (center, context, negatives) triple. Returns the loss
/// evaluated before the update.
fn sgns_step<P: Params>(
    params: &mut P,
    center: usize,
    context: usize,
    negatives: &[usize],
    lr: f32,
    acc: &mut [f32],
) -> f64 {
    acc.iter_mut().for_each(|a| *a = 0.0);
    let mut loss = 0.0;
    for (target, label) in std::iter::once((context, 1.0f32)).chain(negatives.iter().map(|&n| (n, 0.0))) {
        let f = params.dot(center, target);
        let g = (label - sigmoid(f)) * lr;
        loss -= if label > 0.0 {
            log_sigmoid(f as f64)
        } else {
            log_sigmoid(-f as f64)
        };
        params.update_context(center, target, g, acc);
    }
    params.add_center(center, acc);
    loss
}

/// Per-epoch diagnostics from a training run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainStats {
    /// Mean loss per positive pair, one entry per epoch.
    pub epoch_losses: Vec<f64>,
    pub pairs: u64,
}

struct Schedule<'a> {
    initial_lr: f64,
    total_tokens: f64,
    processed: &'a AtomicU64,
}

impl Schedule<'_> {
    const FLUSH: u64 = 10_000;

    fn lr(&self, pending: u64) -> f32 {
        let done = self.processed.load(Ordering::Relaxed) + pending;
        let progress = (done as f64 / self.total_tokens).min(1.0);
        (self.initial_lr * (1.0 - 0.99 * progress)) as f32
    }
}

struct Shard<'a> {
    docs: &'a [Vec<usize>],
    keep: &'a [f64],
    noise: &'a NoiseDistribution,
    config: &'a TrainConfig,
    schedule: &'a Schedule<'a>,
}

#[derive(Default, Clone, Copy)]
struct EpochTally {
    loss: f64,
    pairs: u64,
}

impl Shard<'_> {
    fn run_epoch<P: Params>(&self, params: &mut P, rng: &mut ChaCha8Rng) -> EpochTally {
        let mut tally = EpochTally::default();
        let mut acc = vec![0f32; self.config.dimension];
        let mut kept = Vec::new();
        let mut negs = Vec::with_capacity(self.config.negatives);
        let mut pending = 0u64;
        for doc in self.docs {
            kept.clear();
            kept.extend(doc.iter().copied().filter(|&id| {
                let p = self.keep[id];
                p >= 1.0 || rng.random::<f64>() < p
            }));
            for pos in 0..kept.len() {
                let center = kept[pos];
                let lr = self.schedule.lr(pending);
                let span = rng.random_range(1..=self.config.window);
                let lo = pos.saturating_sub(span);
                let hi = (pos + span).min(kept.len() - 1);
                for ctx_pos in lo..=hi {
                    if ctx_pos == pos {
                        continue;
                    }
                    let context = kept[ctx_pos];
                    negs.clear();
                    for _ in 0..self.config.negatives {
                        let n = self.noise.sample(rng);
                        if n != context {
                            negs.push(n);
                        }
                    }
                    tally.loss += sgns_step(params, center, context, &negs, lr, &mut acc);
                    tally.pairs += 1;
                }
            }
            pending += doc.len() as u64;
            if pending >= Schedule::FLUSH {
                self.schedule.processed.fetch_add(pending, Ordering::Relaxed);
                pending = 0;
            }
        }
        self.schedule.processed.fetch_add(pending, Ordering::Relaxed);
        tally
    }
}

fn worker_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Trains center vectors for every vocabulary term. See [`train_sgns_with_stats`].
pub fn train_sgns(stream: &TokenStream, vocab: &Vocabulary, config: &TrainConfig) -> Result<EmbeddingSpace> {
    train_sgns_with_stats(stream, vocab, config).map(|(space, _)| space)
}

pub fn train_sgns_with_stats(
    stream: &TokenStream,
    vocab: &Vocabulary,
    config: &TrainConfig,
) -> Result<(EmbeddingSpace, TrainStats)> {
    config.validate()?;
    if vocab.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let docs: Vec<Vec<usize>> = stream
        .documents()
        .iter()
        .map(|doc| doc.iter().filter_map(|t| vocab.id(t)).collect::<Vec<_>>())
        .filter(|ids| ids.len() >= 2)
        .collect();
    if docs.is_empty() {
        return Err(Error::NoTrainingPairs);
    }

    let dim = config.dimension;
    let n = vocab.len();
    let mut init_rng = worker_rng(config.seed, u64::MAX);
    let bound = 0.5 / dim as f32;
    let mut input: Vec<f32> = (0..n * dim)
        .map(|_| init_rng.random_range(-bound..bound))
        .collect();
    let mut output = vec![0f32; n * dim];

    let keep: Vec<f64> = vocab
        .frequencies()
        .iter()
        .map(|&f| keep_probability(f, config.subsample_t))
        .collect();
    let noise = NoiseDistribution::new(vocab.counts())?;
    let total_tokens: u64 = docs.iter().map(|d| d.len() as u64).sum();
    let processed = AtomicU64::new(0);
    let schedule = Schedule {
        initial_lr: config.initial_lr,
        total_tokens: (total_tokens * config.epochs as u64) as f64,
        processed: &processed,
    };

    let workers = config.workers.min(docs.len());
    let chunk = docs.len().div_ceil(workers);
    let shards: Vec<Shard> = docs
        .chunks(chunk)
        .map(|docs| Shard {
            docs,
            keep: &keep,
            noise: &noise,
            config,
            schedule: &schedule,
        })
        .collect();
    let mut rngs: Vec<ChaCha8Rng> = (0..shards.len() as u64).map(|i| worker_rng(config.seed, i)).collect();

    let mut stats = TrainStats {
        epoch_losses: Vec::with_capacity(config.epochs),
        pairs: 0,
    };
    for _ in 0..config.epochs {
        let tallies: Vec<EpochTally> = if shards.len() == 1 {
            let mut params = Exclusive {
                input: &mut input,
                output: &mut output,
                dim,
            };
            vec![shards[0].run_epoch(&mut params, &mut rngs[0])]
        } else {
            // SAFETY: AtomicU32 has the same size and alignment as f32, and the
            // exclusive borrows guarantee no non-atomic access during the scope.
            let shared = Shared {
                input: unsafe { &*(input.as_mut_slice() as *mut [f32] as *const [AtomicU32]) },
                output: unsafe { &*(output.as_mut_slice() as *mut [f32] as *const [AtomicU32]) },
                dim,
            };
            std::thread::scope(|scope| {
                let handles: Vec<_> = shards
                    .iter()
                    .zip(rngs.iter_mut())
                    .map(|(shard, rng)| {
                        let mut params = shared;
                        scope.spawn(move || shard.run_epoch(&mut params, rng))
                    })
                    .collect();
                handles.into_iter().map(|h| h.join().expect("worker panicked")).collect()
            })
        };
        let loss: f64 = tallies.iter().map(|t| t.loss).sum();
        let pairs: u64 = tallies.iter().map(|t| t.pairs).sum();
        stats.pairs += pairs;
        stats.epoch_losses.push(if pairs > 0 { loss / pairs as f64 } else { f64::NAN });
    }
    if stats.pairs == 0 {
        return Err(Error::NoTrainingPairs);
    }

    let meta = SpaceMeta {
        label: "corpus".into(),
        dimension: dim,
        vocab_size: n,
        provenance: Provenance::Trained { config: config.clone() },
    };
    let matrix = input.into_iter().map(f64::from).collect();
    let space = EmbeddingSpace::new(vocab.terms().to_vec(), matrix, dim, meta)?;
    Ok((space, stats))
}
