//! Trains a small space on the synthetic corpus, profiles its gender bias and
//! checks the measured word biases against the skews planted by the generator.

use embias::fixture::{gender_pairs, professions, SyntheticCorpus};
use embias::stats::kendall_tau;
use embias::{bias_profile, build_vocabulary, train_sgns, TokenStream, TrainConfig};

fn main() -> embias::Result<()> {
    let corpus = SyntheticCorpus {
        target_bytes: 2 << 20,
        ..Default::default()
    };
    let stream = TokenStream::from_text(&corpus.generate());
    let vocab = build_vocabulary(&stream, 5, 50_000)?;
    println!("{} tokens, {} types", stream.token_count(), vocab.len());

    let config = TrainConfig {
        dimension: 50,
        ..Default::default()
    };
    let mut space = train_sgns(&stream, &vocab, &config)?;
    space.set_label("synthetic");

    let report = bias_profile(&space, &gender_pairs(), &professions())?;
    println!(
        "direct bias {:.4}, first component explains {:.1}% over {} pairs",
        report.direct_bias,
        100.0 * report.direction.explained_variance_ratio,
        report.direction.pairs_used
    );
    println!("{} occupations missing from the vocabulary", report.dropped_terms.len());

    let mut ranked: Vec<(&String, &f64)> = report.word_biases.iter().collect();
    ranked.sort_by(|a, b| b.1.total_cmp(a.1));
    println!("most female-leaning:");
    for (term, b) in ranked.iter().take(5) {
        println!("  {term:<16} {b:+.3}");
    }
    println!("most male-leaning:");
    for (term, b) in ranked.iter().rev().take(5) {
        println!("  {term:<16} {b:+.3}");
    }

    let planted = corpus.skews();
    let (measured, truth): (Vec<f64>, Vec<f64>) = report
        .word_biases
        .iter()
        .map(|(term, b)| (*b, planted[term]))
        .unzip();
    println!("tau against planted skews: {:.3}", kendall_tau(&measured, &truth)?);
    Ok(())
}
