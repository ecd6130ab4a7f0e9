//! Mean |cos| between random word pairs in isotropic Gaussian spaces,
//! next to the large-d reference sqrt(2 / (pi d)).

use embias::embedding::{average_abs_cosine, sample_random_pairs};
use embias::fixture::gaussian_space;

fn main() -> embias::Result<()> {
    println!("{:>5} {:>10} {:>10}", "dim", "mean|cos|", "reference");
    for dim in [2, 8, 32, 128, 512] {
        let space = gaussian_space(2000, dim, 7)?;
        let sample = sample_random_pairs(space.terms(), 10_000, 1)?;
        let mean = average_abs_cosine(&space, &sample)?;
        let reference = (2.0 / (std::f64::consts::PI * dim as f64)).sqrt();
        println!("{dim:>5} {mean:>10.4} {reference:>10.4}");
    }
    Ok(())
}
