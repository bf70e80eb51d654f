use std::sync::Arc;

use nalgebra::{DMatrix, SymmetricEigen};
use rand::Rng;
use rand_distr::StandardNormal;

use super::{SpinConfiguration, Window};
use crate::error::{Error, Result};

/// Largest window handled by dense factorization.
pub const DENSE_SITE_LIMIT: usize = 5_000;

/// Clustering constants of the level-set model: `C_k = 2^{14/5} k^{8/5}`,
/// `c_k = 1`, `φ(t) = e^{-a t}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianClusteringConstants {
    pub decay_rate: f64,
}

impl GaussianClusteringConstants {
    pub fn big_c(&self, k: usize) -> f64 {
        2f64.powf(14.0 / 5.0) * (k as f64).powf(8.0 / 5.0)
    }

    pub fn small_c(&self, _k: usize) -> f64 {
        1.0
    }

    pub fn phi(&self, t: f64) -> f64 {
        (-self.decay_rate * t).exp()
    }
}

/// Super-level set `{x : X(x) >= u}` of a centred stationary Gaussian field
/// with covariance `exp(-a d(x, y))`, sampled exactly through a Cholesky
/// factor of the window covariance.
#[derive(Debug, Clone)]
pub struct GaussianLevelSetSampler {
    window: Arc<Window>,
    level: f64,
    decay_rate: f64,
    /// Lower-triangular factor, row-major, `w × w`.
    factor: Vec<f64>,
}

impl GaussianLevelSetSampler {
    pub fn window(&self) -> &Arc<Window> {
        &self.window
    }

    pub fn new(window: Arc<Window>, a: f64, u: f64) -> Result<Self> {
        if !(a > 0.0) || !a.is_finite() {
            return Err(Error::param("model.a", "decay rate must be positive and finite"));
        }
        if u.is_nan() {
            return Err(Error::param("model.u", "level must be a number"));
        }
        let w = window.len();
        if w > DENSE_SITE_LIMIT {
            return Err(Error::ResourceLimit {
                what: "dense Gaussian factorization",
                requested: w,
                cap: DENSE_SITE_LIMIT,
            });
        }
        let dist = window.distance_matrix()?;
        let cov: Vec<f64> = dist.iter().map(|&d| (-a * d as f64).exp()).collect();
        let factor = cholesky(&cov, w).map_err(|leading_minor| {
            let m = DMatrix::from_row_slice(w, w, &cov);
            let min_eigenvalue = SymmetricEigen::new(m).eigenvalues.min();
            Error::NotPositiveDefinite {
                leading_minor,
                min_eigenvalue,
            }
        })?;
        Ok(GaussianLevelSetSampler {
            window,
            level: u,
            decay_rate: a,
            factor,
        })
    }

    pub fn clustering_constants(&self) -> GaussianClusteringConstants {
        GaussianClusteringConstants {
            decay_rate: self.decay_rate,
        }
    }

    /// One draw of the underlying Gaussian vector.
    pub fn sample_field<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        let w = self.window.len();
        let z: Vec<f64> = (0..w).map(|_| rng.sample(StandardNormal)).collect();
        (0..w)
            .map(|i| {
                let row = &self.factor[i * w..i * w + i + 1];
                row.iter().zip(&z).map(|(l, z)| l * z).sum()
            })
            .collect()
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> SpinConfiguration {
        let field = self.sample_field(rng);
        let bits = field.iter().map(|&x| x >= self.level).collect();
        SpinConfiguration::from_bits(self.window.clone(), bits)
    }
}

pub fn sample_gaussian_levelset<R: Rng + ?Sized>(
    window: &Arc<Window>,
    a: f64,
    u: f64,
    rng: &mut R,
) -> Result<SpinConfiguration> {
    Ok(GaussianLevelSetSampler::new(window.clone(), a, u)?.sample(rng))
}

/// Row-major Cholesky `A = L Lᵀ`. On failure returns the 1-based order of
/// the first leading minor that is not positive.
pub(crate) fn cholesky(a: &[f64], n: usize) -> std::result::Result<Vec<f64>, usize> {
    let mut l = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..=i {
            let mut s = a[i * n + j];
            for k in 0..j {
                s -= l[i * n + k] * l[j * n + k];
            }
            if i == j {
                if !(s > 0.0) {
                    return Err(i + 1);
                }
                l[i * n + i] = s.sqrt();
            } else {
                l[i * n + j] = s / l[j * n + j];
            }
        }
    }
    Ok(l)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cayley::GroupKind;
    use crate::spin::SeedPolicy;

    #[test]
    fn cholesky_reconstructs() {
        let a = [4.0, 2.0, 0.4, 2.0, 5.0, 1.0, 0.4, 1.0, 3.0];
        let l = cholesky(&a, 3).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let s: f64 = (0..3).map(|k| l[i * 3 + k] * l[j * 3 + k]).sum();
                assert!((s - a[i * 3 + j]).abs() < 1e-12);
            }
        }
        assert_eq!(cholesky(&[1.0, 2.0, 2.0, 1.0], 2), Err(2));
    }

    #[test]
    fn high_level_is_empty() {
        let w = Window::for_kind(GroupKind::IntegerLattice(2), 3).unwrap();
        let s = GaussianLevelSetSampler::new(w, 1.0, 10.0).unwrap();
        let seeds = SeedPolicy::new(1);
        for r in 0..50 {
            assert_eq!(s.sample(&mut seeds.stream(r)).count(), 0);
        }
    }

    #[test]
    fn invalid_rate_rejected() {
        let w = Window::for_kind(GroupKind::IntegerLattice(2), 1).unwrap();
        assert!(GaussianLevelSetSampler::new(w, 0.0, 0.0).is_err());
    }

    #[test]
    fn clustering_constants_match_closed_form() {
        let c = GaussianClusteringConstants { decay_rate: 2.0 };
        assert!((c.big_c(1) - 2f64.powf(2.8)).abs() < 1e-12);
        assert!((c.big_c(2) - 2f64.powf(2.8) * 2f64.powf(1.6)).abs() < 1e-12);
        assert_eq!(c.small_c(5), 1.0);
        assert!((c.phi(1.5) - (-3.0f64).exp()).abs() < 1e-15);
    }
}
