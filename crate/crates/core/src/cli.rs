//! Command-line front end. [`dispatch`] parses arguments, runs one command
//! and maps the outcome to an exit code: 0 success, 1 usage, 2 data error.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use log::info;
use serde::Serialize;

use crate::bias::{bias_profile, BiasReport, NeutralTermSet, TermPairSet};
use crate::corpus::{build_vocabulary, TokenStream, DEFAULT_MAX_VOCAB, DEFAULT_MIN_COUNT};
use crate::embedding::{
    average_abs_cosine, common_vocabulary, load_embeddings, sample_random_pairs, save_embeddings, EmbeddingSpace,
    Format, SpaceMeta,
};
use crate::error::Error;
use crate::manifest::RunManifest;
use crate::stats::{
    bias_density, bootstrap_direct_bias, compare_corpora, dimension_sweep, rank_stability_matrix, BootstrapResult,
    Comparison, Pairing, DENSITY_BINS,
};
use crate::trainer::{train_sgns, TrainConfig};

#[derive(Parser, Debug)]
#[command(name = "embias", version, about = "Direct-bias measurement and stability analysis for word embeddings")]
struct Cli {
    /// Worker threads for training and resampling. Training is bit-reproducible only with 1.
    #[arg(long, global = true, default_value_t = 1, value_parser = clap::value_parser!(u16).range(1..))]
    workers: u16,

    /// Log progress to standard error.
    #[arg(short, long, global = true)]
    verbose: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Train skip-gram embeddings on text files (one document per line).
    Train(TrainArgs),
    /// Bias direction, per-word biases and direct bias as a JSON report.
    Bias(BiasArgs),
    /// Kendall tau-b matrix between the word-bias rankings of several reports.
    #[command(after_help = "CSV columns: label, then one column per report (<corpus>:d<dim>); cells are tau-b.")]
    Tau(TauArgs),
    /// Fixed 64-bin density of the signed word biases in a report.
    #[command(after_help = "CSV columns: bin_low,bin_high,mass (64 rows over [-1, 1], masses sum to 1).")]
    Density(DensityArgs),
    /// Direct bias of several spaces, grouped by corpus and ordered by dimension.
    #[command(after_help = "CSV columns: corpus,dimension,direct_bias.")]
    Sweep(SweepArgs),
    /// Bootstrap distribution of direct bias under term-set resampling.
    Bootstrap(BootstrapArgs),
    /// Bootstrap comparison of two spaces; p is the share of replicates with bias(A) <= bias(B).
    Compare(CompareArgs),
    /// Mean |cosine| of random word pairs drawn from the shared vocabulary.
    #[command(
        name = "random-cos",
        after_help = "CSV columns: label,dimension,pairs,mean_abs_cosine,isotropic_reference \
                      (reference is sqrt(2/(pi*d))). Pairs are drawn uniformly, not by frequency."
    )]
    RandomCos(RandomCosArgs),
    /// Check that output files parse and are internally consistent.
    Validate(ValidateArgs),
    /// Convert embeddings between glove text, word2vec binary and native.
    Convert(ConvertArgs),
}

#[derive(Args, Debug, Serialize)]
struct TrainArgs {
    /// Corpus text files.
    #[arg(long, required = true, num_args = 1..)]
    corpus: Vec<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_MIN_COUNT)]
    min_count: u64,
    #[arg(long, default_value_t = DEFAULT_MAX_VOCAB)]
    max_vocab: usize,
    #[arg(long, default_value_t = 100)]
    dim: usize,
    #[arg(long, default_value_t = 5)]
    window: usize,
    #[arg(long, default_value_t = 5)]
    negatives: usize,
    #[arg(long, default_value_t = 5)]
    epochs: usize,
    #[arg(long, default_value_t = 0.025)]
    lr: f64,
    /// Frequent-word subsampling threshold; 0 disables it.
    #[arg(long, default_value_t = 1e-3)]
    subsample: f64,
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Native)]
    format: Format,
    /// Corpus label stored in the metadata; defaults to the output file stem.
    #[arg(long)]
    label: Option<String>,
}

#[derive(Args, Debug, Serialize)]
struct TermArgs {
    /// Pair file: two terms per line, `#` starts a comment.
    #[arg(long)]
    pairs: PathBuf,
    /// Neutral-term file: one term per line, `#` starts a comment.
    #[arg(long)]
    neutral: PathBuf,
}

#[derive(Args, Debug, Serialize)]
struct BiasArgs {
    #[arg(long)]
    embeddings: PathBuf,
    /// Input format; inferred from the extension and sidecar when omitted.
    #[arg(long, value_enum)]
    format: Option<Format>,
    #[command(flatten)]
    terms: TermArgs,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug, Serialize)]
struct TauArgs {
    #[arg(long, required = true, num_args = 2..)]
    reports: Vec<PathBuf>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug, Serialize)]
struct DensityArgs {
    #[arg(long)]
    report: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug, Serialize)]
struct SweepArgs {
    /// Comma-separated embedding files, each optionally written `label=path`.
    /// Without a label the sidecar label or the file stem is used.
    #[arg(long, required = true, value_delimiter = ',', num_args = 1..)]
    embeddings: Vec<String>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    #[command(flatten)]
    terms: TermArgs,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug, Serialize)]
struct BootstrapArgs {
    #[arg(long)]
    embeddings: PathBuf,
    #[arg(long, value_enum)]
    format: Option<Format>,
    #[command(flatten)]
    terms: TermArgs,
    #[arg(long, default_value_t = crate::stats::DEFAULT_REPLICATES)]
    replicates: usize,
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug, Serialize)]
struct CompareArgs {
    #[arg(long)]
    a: PathBuf,
    #[arg(long)]
    b: PathBuf,
    #[arg(long, value_enum)]
    format: Option<Format>,
    #[command(flatten)]
    terms: TermArgs,
    #[arg(long, default_value_t = crate::stats::DEFAULT_REPLICATES)]
    replicates: usize,
    #[arg(long)]
    seed: u64,
    /// Resample the two spaces independently instead of with shared indices.
    #[arg(long)]
    unpaired: bool,
    /// Also write the JSON result here (it is always printed to standard output).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
struct RandomCosArgs {
    #[arg(long, required = true, num_args = 1..)]
    embeddings: Vec<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    #[arg(long, default_value_t = 1000)]
    pairs: usize,
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug, Serialize)]
struct ValidateArgs {
    /// JSON reports, CSV tables, manifests or embedding files.
    #[arg(required = true)]
    paths: Vec<PathBuf>,
    /// For manifests, also recompute the input hashes.
    #[arg(long)]
    check_inputs: bool,
}

#[derive(Args, Debug, Serialize)]
struct ConvertArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum)]
    from: Option<Format>,
    #[arg(long)]
    output: PathBuf,
    #[arg(long, value_enum)]
    to: Format,
}

enum Failure {
    Usage(String),
    Data(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Data(e)
    }
}

type Outcome = std::result::Result<(), Failure>;

/// Runs the tool on `argv` (including the program name) and returns the exit code.
pub fn dispatch<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
        }
    };
    let level = if cli.verbose { log::LevelFilter::Info } else { log::LevelFilter::Warn };
    let _ = env_logger::Builder::new().filter_level(level).try_init();

    let pool = match rayon::ThreadPoolBuilder::new().num_threads(cli.workers as usize).build() {
        Ok(pool) => pool,
        Err(e) => {
            eprintln!("error: cannot start worker pool: {e}");
            return 2;
        }
    };
    match pool.install(|| run(&cli)) {
        Ok(()) => 0,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            1
        }
        Err(Failure::Data(e)) => {
            eprintln!("error: {e}");
            2
        }
    }
}

fn run(cli: &Cli) -> Outcome {
    let workers = cli.workers as usize;
    match &cli.command {
        Command::Train(a) => train(a, workers),
        Command::Bias(a) => bias(a, workers),
        Command::Tau(a) => tau(a, workers),
        Command::Density(a) => density(a, workers),
        Command::Sweep(a) => sweep(a, workers),
        Command::Bootstrap(a) => bootstrap(a, workers),
        Command::Compare(a) => compare(a, workers),
        Command::RandomCos(a) => random_cos(a, workers),
        Command::Validate(a) => validate(a),
        Command::Convert(a) => convert(a, workers),
    }
}

fn manifest<A: Serialize>(command: &str, args: &A, workers: usize) -> Result<RunManifest, Error> {
    let mut manifest = RunManifest::new(command, args)?;
    if let Some(map) = manifest.args.as_object_mut() {
        map.insert("workers".into(), workers.into());
    }
    Ok(manifest)
}

fn write_output(path: &Path, contents: &[u8], manifest: &RunManifest) -> Result<(), Error> {
    fs::write(path, contents).map_err(|e| Error::io(path, e))?;
    let written = manifest.write_for(path)?;
    info!("wrote {} and {}", path.display(), written.display());
    Ok(())
}

fn json_bytes<T: Serialize>(value: &T) -> Result<Vec<u8>, Error> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s.into_bytes())
}

fn csv_bytes(write: impl FnOnce(&mut Vec<u8>) -> Result<(), Error>) -> Result<Vec<u8>, Error> {
    let mut buf = Vec::new();
    write(&mut buf)?;
    Ok(buf)
}

fn load_terms(terms: &TermArgs) -> Result<(TermPairSet, NeutralTermSet), Error> {
    Ok((TermPairSet::load(&terms.pairs)?, NeutralTermSet::load(&terms.neutral)?))
}

fn train(a: &TrainArgs, workers: usize) -> Outcome {
    let config = TrainConfig {
        dimension: a.dim,
        window: a.window,
        negatives: a.negatives,
        epochs: a.epochs,
        initial_lr: a.lr,
        subsample_t: a.subsample,
        seed: a.seed,
        workers,
    };
    config.validate().map_err(|e| Failure::Usage(e.to_string()))?;
    let stream = TokenStream::from_files(&a.corpus)?;
    let vocab = build_vocabulary(&stream, a.min_count, a.max_vocab)?;
    info!("{} tokens, vocabulary of {}", stream.token_count(), vocab.len());
    let mut space = train_sgns(&stream, &vocab, &config)?;
    let label = match &a.label {
        Some(l) => l.clone(),
        None => file_stem(&a.out),
    };
    space.set_label(label);

    let mut m = manifest("train", a, workers)?.seed("seed", a.seed);
    for path in &a.corpus {
        m = m.input(path)?;
    }
    save_embeddings(&space, &a.out, a.format)?;
    m.write_for(&a.out)?;
    Ok(())
}

fn file_stem(path: &Path) -> String {
    path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()
}

fn bias(a: &BiasArgs, workers: usize) -> Outcome {
    let space = load_embeddings(&a.embeddings, a.format)?;
    let (pairs, neutral) = load_terms(&a.terms)?;
    let report = bias_profile(&space, &pairs, &neutral)?;
    let m = manifest("bias", a, workers)?
        .input(&a.embeddings)?
        .input(&a.terms.pairs)?
        .input(&a.terms.neutral)?;
    write_output(&a.out, report.to_json()?.as_bytes(), &m)?;
    Ok(())
}

fn tau(a: &TauArgs, workers: usize) -> Outcome {
    let reports = a.reports.iter().map(BiasReport::load).collect::<Result<Vec<_>, _>>()?;
    let matrix = rank_stability_matrix(&reports)?;
    let mut m = manifest("tau", a, workers)?;
    for path in &a.reports {
        m = m.input(path)?;
    }
    write_output(&a.out, &csv_bytes(|b| matrix.write_csv(b))?, &m)?;
    Ok(())
}

fn density(a: &DensityArgs, workers: usize) -> Outcome {
    let report = BiasReport::load(&a.report)?;
    let density = bias_density(&report)?;
    let m = manifest("density", a, workers)?.input(&a.report)?;
    write_output(&a.out, &csv_bytes(|b| density.write_csv(b))?, &m)?;
    Ok(())
}

fn sweep_entry(entry: &str) -> (Option<&str>, &Path) {
    if !Path::new(entry).exists() {
        if let Some((label, path)) = entry.split_once('=') {
            if !label.is_empty() {
                return (Some(label), Path::new(path));
            }
        }
    }
    (None, Path::new(entry))
}

fn sweep(a: &SweepArgs, workers: usize) -> Outcome {
    let (pairs, neutral) = load_terms(&a.terms)?;
    let mut m = manifest("sweep", a, workers)?.input(&a.terms.pairs)?.input(&a.terms.neutral)?;
    let mut spaces = Vec::with_capacity(a.embeddings.len());
    for entry in &a.embeddings {
        let (label, path) = sweep_entry(entry);
        let mut space = load_embeddings(path, a.format)?;
        if let Some(label) = label {
            space.set_label(label);
        }
        m = m.input(path)?;
        spaces.push(space);
    }
    let refs: Vec<&EmbeddingSpace> = spaces.iter().collect();
    let curve = dimension_sweep(&refs, &pairs, &neutral)?;
    write_output(&a.out, &csv_bytes(|b| curve.write_csv(b))?, &m)?;
    Ok(())
}

fn bootstrap(a: &BootstrapArgs, workers: usize) -> Outcome {
    let space = load_embeddings(&a.embeddings, a.format)?;
    let (pairs, neutral) = load_terms(&a.terms)?;
    let result = bootstrap_direct_bias(&space, &pairs, &neutral, a.replicates, a.seed)?;
    let m = manifest("bootstrap", a, workers)?
        .seed("seed", a.seed)
        .input(&a.embeddings)?
        .input(&a.terms.pairs)?
        .input(&a.terms.neutral)?;
    write_output(&a.out, &json_bytes(&result)?, &m)?;
    Ok(())
}

fn compare(a: &CompareArgs, workers: usize) -> Outcome {
    let space_a = load_embeddings(&a.a, a.format)?;
    let space_b = load_embeddings(&a.b, a.format)?;
    let (pairs, neutral) = load_terms(&a.terms)?;
    let pairing = if a.unpaired { Pairing::Unpaired } else { Pairing::Paired };
    let result = compare_corpora(&space_a, &space_b, &pairs, &neutral, a.replicates, a.seed, pairing)?;
    let bytes = json_bytes(&result)?;
    if let Some(out) = &a.out {
        let m = manifest("compare", a, workers)?
            .seed("seed", a.seed)
            .input(&a.a)?
            .input(&a.b)?
            .input(&a.terms.pairs)?
            .input(&a.terms.neutral)?;
        write_output(out, &bytes, &m)?;
    }
    print!("{}", String::from_utf8_lossy(&bytes));
    Ok(())
}

fn random_cos(a: &RandomCosArgs, workers: usize) -> Outcome {
    let spaces = a
        .embeddings
        .iter()
        .map(|p| load_embeddings(p, a.format))
        .collect::<Result<Vec<_>, _>>()?;
    let refs: Vec<&EmbeddingSpace> = spaces.iter().collect();
    let common = common_vocabulary(&refs)?;
    let sample = sample_random_pairs(&common, a.pairs, a.seed)?;
    let bytes = csv_bytes(|buf| {
        let mut w = csv::Writer::from_writer(buf);
        w.write_record(["label", "dimension", "pairs", "mean_abs_cosine", "isotropic_reference"])?;
        for space in &spaces {
            let mean = average_abs_cosine(space, &sample)?;
            let reference = (2.0 / (std::f64::consts::PI * space.dim() as f64)).sqrt();
            w.write_record([
                space.label().to_string(),
                space.dim().to_string(),
                sample.pairs.len().to_string(),
                mean.to_string(),
                reference.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    })?;
    let mut m = manifest("random-cos", a, workers)?.seed("seed", a.seed);
    m.args["sampling"] = "uniform without replacement over the shared vocabulary".into();
    for path in &a.embeddings {
        m = m.input(path)?;
    }
    write_output(&a.out, &bytes, &m)?;
    Ok(())
}

fn convert(a: &ConvertArgs, workers: usize) -> Outcome {
    let space = load_embeddings(&a.input, a.from)?;
    let m = manifest("convert", a, workers)?.input(&a.input)?;
    save_embeddings(&space, &a.output, a.to)?;
    m.write_for(&a.output)?;
    Ok(())
}

fn validate(a: &ValidateArgs) -> Outcome {
    let mut failures = 0;
    for path in &a.paths {
        match validate_file(path, a.check_inputs) {
            Ok(kind) => println!("ok {}: {kind}", path.display()),
            Err(e) => {
                println!("invalid {}: {e}", path.display());
                failures += 1;
            }
        }
    }
    if failures > 0 {
        return Err(Failure::Data(Error::Format(format!("{failures} file(s) failed validation"))));
    }
    Ok(())
}

fn invalid(msg: impl Into<String>) -> Error {
    Error::Format(msg.into())
}

fn check(ok: bool, msg: &str) -> Result<(), Error> {
    if ok {
        Ok(())
    } else {
        Err(invalid(msg))
    }
}

fn validate_file(path: &Path, check_inputs: bool) -> Result<String, Error> {
    match path.extension().and_then(|e| e.to_str()) {
        Some("json") => {
            let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
            validate_json(&text, check_inputs)
        }
        Some("csv") => {
            let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
            validate_csv(&text)
        }
        _ => {
            let space = load_embeddings(path, None)?;
            Ok(format!("embeddings, {} terms x {} dimensions", space.len(), space.dim()))
        }
    }
}

fn validate_json(text: &str, check_inputs: bool) -> Result<String, Error> {
    let value: serde_json::Value = serde_json::from_str(text)?;
    let has = |k: &str| value.get(k).is_some();
    if has("input_hashes") && has("command") {
        let m: RunManifest = serde_json::from_value(value)?;
        if check_inputs {
            let stale = m.stale_inputs()?;
            check(stale.is_empty(), &format!("inputs changed since the run: {}", stale.join(", ")))?;
        }
        Ok(format!("manifest for `{}`", m.command))
    } else if has("word_biases") && has("direction") {
        let r: BiasReport = serde_json::from_value(value)?;
        check(r.word_biases.values().all(|b| (-1.0..=1.0).contains(b)), "word bias outside [-1, 1]")?;
        check((0.0..=1.0).contains(&r.direct_bias), "direct bias outside [0, 1]")?;
        check(r.direction.vector.len() == r.space_meta.dimension, "direction length differs from dimension")?;
        Ok(format!("bias report, {} terms", r.word_biases.len()))
    } else if has("replicates") && has("point_estimate") {
        let r: BootstrapResult = serde_json::from_value(value)?;
        check(r.n_replicates == r.replicates.len(), "replicate count mismatch")?;
        check(r.ci_low <= r.ci_high, "interval bounds out of order")?;
        Ok(format!("bootstrap result, {} replicates", r.n_replicates))
    } else if has("p_value") && has("deltas") {
        let c: Comparison = serde_json::from_value(value)?;
        check((0.0..=1.0).contains(&c.p_value), "p-value outside [0, 1]")?;
        Ok(format!("comparison, p = {}", c.p_value))
    } else if has("provenance") && has("label") {
        let meta: SpaceMeta = serde_json::from_value(value)?;
        Ok(format!("embedding metadata for {:?}", meta.label))
    } else {
        Err(invalid("unrecognized JSON document"))
    }
}

fn parse_cell(cell: &str, row: usize) -> Result<f64, Error> {
    let v: f64 = cell.parse().map_err(|_| invalid(format!("row {row}: {cell:?} is not a number")))?;
    check(v.is_finite(), &format!("row {row}: non-finite value"))?;
    Ok(v)
}

fn validate_csv(text: &str) -> Result<String, Error> {
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let header: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
    let rows: Vec<csv::StringRecord> = reader.records().collect::<Result<_, _>>()?;
    let numeric = |from: usize| -> Result<Vec<Vec<f64>>, Error> {
        rows.iter()
            .enumerate()
            .map(|(i, r)| r.iter().skip(from).map(|c| parse_cell(c, i + 1)).collect())
            .collect()
    };
    let h: Vec<&str> = header.iter().map(String::as_str).collect();
    match h.as_slice() {
        ["bin_low", "bin_high", "mass"] => {
            let values = numeric(0)?;
            check(values.len() == DENSITY_BINS, "density needs 64 bins")?;
            let total: f64 = values.iter().map(|r| r[2]).sum();
            check((total - 1.0).abs() < 1e-9, "masses do not sum to 1")?;
            Ok("density table".into())
        }
        ["corpus", "dimension", "direct_bias"] => {
            let values = numeric(1)?;
            check(values.iter().all(|r| r[0] >= 2.0 && (0.0..=1.0).contains(&r[1])), "bad sweep row")?;
            Ok(format!("sweep table, {} points", values.len()))
        }
        ["label", "dimension", "pairs", "mean_abs_cosine", "isotropic_reference"] => {
            let values = numeric(1)?;
            check(values.iter().all(|r| (0.0..=1.0).contains(&r[2])), "mean |cos| outside [0, 1]")?;
            Ok(format!("random-cosine table, {} spaces", values.len()))
        }
        ["label", labels @ ..] => {
            let values = numeric(1)?;
            check(values.len() == labels.len(), "tau matrix is not square")?;
            for (i, row) in values.iter().enumerate() {
                check(row.iter().all(|v| (-1.0..=1.0).contains(v)), "tau outside [-1, 1]")?;
                check(row[i] == 1.0, "tau diagonal is not 1")?;
            }
            Ok(format!("tau matrix, {} reports", labels.len()))
        }
        _ => Err(invalid("unrecognized CSV header")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn train_defaults_match_config_defaults() {
        let cli = Cli::try_parse_from(["embias", "train", "--corpus", "c.txt", "--seed", "3", "--out", "o.bin"]).unwrap();
        let Command::Train(a) = cli.command else { panic!() };
        let d = TrainConfig::default();
        assert_eq!(
            (a.dim, a.window, a.negatives, a.epochs, a.lr, a.subsample),
            (d.dimension, d.window, d.negatives, d.epochs, d.initial_lr, d.subsample_t)
        );
        assert_eq!(cli.workers, 1);
    }

    #[test]
    fn exit_codes_for_usage() {
        assert_eq!(dispatch(["embias", "--help"]), 0);
        assert_eq!(dispatch(["embias", "--version"]), 0);
        assert_eq!(dispatch(["embias", "--bogus"]), 1);
        assert_eq!(dispatch(["embias", "frobnicate"]), 1);
        assert_eq!(dispatch(["embias", "bootstrap", "--embeddings", "e.bin"]), 1);
        assert_eq!(dispatch(["embias", "--workers", "0", "validate", "x.json"]), 1);
    }

    #[test]
    fn unreadable_input_is_a_data_error() {
        let dir = tempfile::tempdir().unwrap();
        let missing = dir.path().join("nope.json");
        let out = dir.path().join("d.csv");
        let code = dispatch([
            "embias".as_ref(),
            "density".as_ref(),
            "--report".as_ref(),
            missing.as_os_str(),
            "--out".as_ref(),
            out.as_os_str(),
        ]);
        assert_eq!(code, 2);
        assert!(!out.exists());
    }

    #[test]
    fn sweep_entries_take_optional_labels() {
        assert_eq!(sweep_entry("wiki=a/b.bin"), (Some("wiki"), Path::new("a/b.bin")));
        assert_eq!(sweep_entry("a/b.bin"), (None, Path::new("a/b.bin")));
        assert_eq!(sweep_entry("=x.bin"), (None, Path::new("=x.bin")));
    }

    #[test]
    fn csv_validation() {
        assert!(validate_csv("label,a,b\na,1,0.5\nb,0.5,1\n").is_ok());
        assert!(validate_csv("label,a,b\na,1,0.5\nb,0.5,0.9\n").is_err());
        assert!(validate_csv("corpus,dimension,direct_bias\nx,16,0.2\n").is_ok());
        assert!(validate_csv("corpus,dimension,direct_bias\nx,16,nan\n").is_err());
        assert!(validate_csv("what,ever\n1,2\n").is_err());
    }
}
