//! Direct bias of one corpus trained at several dimensions, written as CSV.

use embias::fixture::{gender_pairs, professions, SyntheticCorpus};
use embias::stats::dimension_sweep;
use embias::{build_vocabulary, train_sgns, TokenStream, TrainConfig};

fn main() -> embias::Result<()> {
    let corpus = SyntheticCorpus {
        target_bytes: 2 << 20,
        ..Default::default()
    };
    let stream = TokenStream::from_text(&corpus.generate());
    let vocab = build_vocabulary(&stream, 5, 50_000)?;

    let mut spaces = Vec::new();
    for dimension in [16, 32, 64] {
        let config = TrainConfig {
            dimension,
            epochs: 3,
            ..Default::default()
        };
        let mut space = train_sgns(&stream, &vocab, &config)?;
        space.set_label("synthetic");
        spaces.push(space);
    }
    let refs: Vec<_> = spaces.iter().collect();
    let curve = dimension_sweep(&refs, &gender_pairs(), &professions())?;
    curve.write_csv(std::io::stdout().lock())
}
