use std::sync::Arc;

use rand::Rng;

use super::{SpinConfiguration, Window};
use crate::error::{Error, Result};

/// Critical inverse temperature of the square-lattice Ising model,
/// `ln(1 + √2) / 2`.
pub const BETA_CRITICAL_2D: f64 = 0.440_686_793_509_771_5;

/// Heat-bath Glauber dynamics for the nearest-neighbour Ising model
/// `P(σ) ∝ exp(β Σ_{i~j} σ_i σ_j + h Σ_i σ_i)` with free boundary.
///
/// The output is an MCMC approximation of the finite-volume Gibbs measure
/// after `burn_in + sweeps` full sequential sweeps, not an exact sample.
#[derive(Debug, Clone)]
pub struct IsingSampler {
    window: Arc<Window>,
    beta: f64,
    h: f64,
    sweeps: u32,
    burn_in: u32,
}

impl IsingSampler {
    pub fn window(&self) -> &Arc<Window> {
        &self.window
    }

    pub fn new(window: Arc<Window>, beta: f64, h: f64, sweeps: u32, burn_in: u32) -> Result<Self> {
        window.require_lattice("Ising sampling")?;
        if !(beta >= 0.0) || !beta.is_finite() {
            return Err(Error::param("model.beta", "inverse temperature must be finite and >= 0"));
        }
        if !h.is_finite() {
            return Err(Error::param("model.h", "external field must be finite"));
        }
        Ok(IsingSampler {
            window,
            beta,
            h,
            sweeps,
            burn_in,
        })
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> SpinConfiguration {
        let w = self.window.len();
        let mut spins: Vec<i8> = (0..w).map(|_| if rng.random::<bool>() { 1 } else { -1 }).collect();
        for _ in 0..self.burn_in as u64 + self.sweeps as u64 {
            for i in 0..w {
                let field: i32 = self.window.neighbors(i).iter().map(|&j| spins[j] as i32).sum();
                let local = self.beta * field as f64 + self.h;
                // P(σ_i = +1 | rest) = 1 / (1 + e^{-2 L})
                let p_up = 1.0 / (1.0 + (-2.0 * local).exp());
                spins[i] = if rng.random::<f64>() < p_up { 1 } else { -1 };
            }
        }
        let bits = spins.iter().map(|&s| s == 1).collect();
        SpinConfiguration::from_bits(self.window.clone(), bits)
    }
}

pub fn sample_ising<R: Rng + ?Sized>(
    window: &Arc<Window>,
    beta: f64,
    h: f64,
    sweeps: u32,
    burn_in: u32,
    rng: &mut R,
) -> Result<SpinConfiguration> {
    Ok(IsingSampler::new(window.clone(), beta, h, sweeps, burn_in)?.sample(rng))
}
