//! Kendall tau between the word-bias rankings of spaces trained with
//! different seeds and dimensions on the same corpus.

use embias::fixture::{gender_pairs, professions, SyntheticCorpus};
use embias::stats::rank_stability_matrix;
use embias::{bias_profile, build_vocabulary, train_sgns, TokenStream, TrainConfig};

fn main() -> embias::Result<()> {
    let corpus = SyntheticCorpus {
        target_bytes: 2 << 20,
        ..Default::default()
    };
    let stream = TokenStream::from_text(&corpus.generate());
    let vocab = build_vocabulary(&stream, 5, 50_000)?;
    let (pairs, neutral) = (gender_pairs(), professions());

    let mut reports = Vec::new();
    for (seed, dimension) in [(1, 32), (2, 32), (1, 64)] {
        let config = TrainConfig {
            dimension,
            seed,
            epochs: 3,
            ..Default::default()
        };
        let mut space = train_sgns(&stream, &vocab, &config)?;
        space.set_label(format!("seed{seed}"));
        reports.push(bias_profile(&space, &pairs, &neutral)?);
    }
    let matrix = rank_stability_matrix(&reports)?;
    println!("{} shared occupations", matrix.common_terms);
    matrix.write_csv(std::io::stdout().lock())
}
