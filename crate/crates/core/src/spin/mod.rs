//! Spin models on a window: configurations, reproducible seeding and the
//! samplers for the example models (i.i.d., Gaussian level sets, Ising,
//! determinantal).

mod config;
mod dpp;
mod gaussian;
pub mod io;
mod ising;
mod model;
mod seed;
mod window;

pub use config::SpinConfiguration;
pub use dpp::{sample_determinantal, DeterminantalSampler};
pub use gaussian::{sample_gaussian_levelset, GaussianLevelSetSampler, GaussianClusteringConstants};
pub use ising::{sample_ising, IsingSampler, BETA_CRITICAL_2D};
pub use model::{ModelSpec, PreparedModel};
pub use seed::SeedPolicy;
pub use window::Window;

pub(crate) use window::l1_between;

use std::sync::Arc;

use rand::Rng;

/// Each site occupied independently with probability `p`.
pub fn sample_iid<R: Rng + ?Sized>(window: &Arc<Window>, p: f64, rng: &mut R) -> SpinConfiguration {
    let occupied = (0..window.len()).map(|_| rng.random::<f64>() < p).collect();
    SpinConfiguration::from_bits(window.clone(), occupied)
}

/// Bitwise complement on the window.
pub fn complement(config: &SpinConfiguration) -> SpinConfiguration {
    config.complement()
}
