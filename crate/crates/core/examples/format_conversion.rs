//! Writes one space in every supported format, reads each back and reports
//! the largest coordinate change and the manifest-style digest of each file.

use embias::embedding::{load_embeddings, save_embeddings, Format};
use embias::fixture::gaussian_space;
use embias::manifest::sha256_file;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let space = gaussian_space(500, 25, 3)?;
    let dir = tempfile::tempdir()?;

    for (format, name) in [
        (Format::Glove, "space.txt"),
        (Format::Word2vec, "space.w2v"),
        (Format::Native, "space.bin"),
    ] {
        let path = dir.path().join(name);
        save_embeddings(&space, &path, format)?;
        let back = load_embeddings(&path, Some(format))?;
        let max_err = space
            .matrix()
            .iter()
            .zip(back.matrix())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        println!(
            "{format:?}: {} x {}, label {:?}, max error {max_err:.2e}, sha256 {}",
            back.len(),
            back.dim(),
            back.label(),
            &sha256_file(&path)?[..16]
        );
    }
    Ok(())
}
