//! Bootstrap interval for direct bias, and a paired comparison between spaces
//! trained on a strongly and a weakly skewed corpus.

use embias::fixture::{gender_pairs, professions, SyntheticCorpus};
use embias::stats::{bootstrap_direct_bias, compare_corpora, Pairing};
use embias::{build_vocabulary, train_sgns, EmbeddingSpace, TokenStream, TrainConfig};

fn train(max_skew: f64) -> embias::Result<EmbeddingSpace> {
    let corpus = SyntheticCorpus {
        target_bytes: 1 << 20,
        max_skew,
        ..Default::default()
    };
    let stream = TokenStream::from_text(&corpus.generate());
    let vocab = build_vocabulary(&stream, 5, 50_000)?;
    let config = TrainConfig {
        dimension: 32,
        ..Default::default()
    };
    let mut space = train_sgns(&stream, &vocab, &config)?;
    space.set_label(format!("skew{max_skew}"));
    Ok(space)
}

fn main() -> embias::Result<()> {
    let (pairs, neutral) = (gender_pairs(), professions());
    let strong = train(0.9)?;
    let weak = train(0.1)?;

    for space in [&strong, &weak] {
        let boot = bootstrap_direct_bias(space, &pairs, &neutral, 500, 11)?;
        println!(
            "{}: direct bias {:.4}, 95% interval [{:.4}, {:.4}]",
            space.label(),
            boot.point_estimate,
            boot.ci_low,
            boot.ci_high
        );
    }

    let cmp = compare_corpora(&strong, &weak, &pairs, &neutral, 500, 11, Pairing::Paired)?;
    println!(
        "difference {:+.4}, p = {:.4} ({} replicates)",
        cmp.point_delta,
        cmp.p_value,
        cmp.deltas.len()
    );
    Ok(())
}
