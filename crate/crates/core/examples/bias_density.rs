//! Histogram of signed word biases for a trained space, drawn as text bars.

use embias::fixture::{gender_pairs, professions, SyntheticCorpus};
use embias::stats::bias_density;
use embias::{bias_profile, build_vocabulary, train_sgns, TokenStream, TrainConfig};

fn main() -> embias::Result<()> {
    let corpus = SyntheticCorpus {
        target_bytes: 1 << 20,
        ..Default::default()
    };
    let stream = TokenStream::from_text(&corpus.generate());
    let vocab = build_vocabulary(&stream, 5, 50_000)?;
    let config = TrainConfig {
        dimension: 32,
        ..Default::default()
    };
    let space = train_sgns(&stream, &vocab, &config)?;
    let report = bias_profile(&space, &gender_pairs(), &professions())?;
    let density = bias_density(&report)?;

    println!("{} words", density.n);
    for (edges, mass) in density.bin_edges.windows(2).zip(&density.masses) {
        if *mass > 0.0 {
            let bar = "#".repeat((mass * 200.0).round() as usize);
            println!("[{:+.2}, {:+.2}) {:.3} {bar}", edges[0], edges[1], mass);
        }
    }
    Ok(())
}
