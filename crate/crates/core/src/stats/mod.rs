//! Stability battery: rank agreement across spaces, bias densities,
//! dimension sweeps and bootstrap significance over term samples.

mod bootstrap;
mod density;
mod sweep;
mod tau;

pub use bootstrap::{
    bootstrap_direct_bias, compare_corpora, percentile, BootstrapResult, Comparison, Pairing,
    ResamplingPolicy, DEFAULT_REPLICATES,
};
pub use density::{bias_density, density_of, BiasDensity, DENSITY_BINS};
pub use sweep::{dimension_sweep, SweepCurve, SweepPoint};
pub use tau::{kendall_tau, rank_stability_matrix, TauMatrix};
