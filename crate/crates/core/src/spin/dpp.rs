use std::sync::Arc;

use nalgebra::{DMatrix, SymmetricEigen};
use rand::Rng;

use super::{SpinConfiguration, Window};
use crate::error::{Error, Result};

/// Eigenvalues within this distance outside `[0, 1]` are clipped.
pub const EIGEN_CLIP_TOLERANCE: f64 = 1e-10;

/// Exact sampler for the determinantal process with kernel
/// `K(x, y) = κ exp(-α d(x, y))` restricted to a window.
///
/// Spectral algorithm: keep eigenvector `v_i` with probability `λ_i`, then
/// draw points one at a time from the projection DPP spanned by the kept
/// vectors, projecting out each chosen coordinate.
#[derive(Debug, Clone)]
pub struct DeterminantalSampler {
    window: Arc<Window>,
    kernel: Vec<f64>,
    eigenvalues: Vec<f64>,
    /// Column-major eigenvectors: `eigenvectors[c][i]`.
    eigenvectors: Vec<Vec<f64>>,
}

impl DeterminantalSampler {
    pub fn window(&self) -> &Arc<Window> {
        &self.window
    }

    pub fn new(window: Arc<Window>, kappa: f64, alpha: f64) -> Result<Self> {
        if !(kappa > 0.0 && kappa <= 1.0) {
            return Err(Error::param("model.kappa", "scale must lie in (0, 1]"));
        }
        if !(alpha > 0.0) {
            return Err(Error::param("model.alpha", "decay rate must be positive"));
        }
        let dist = window.distance_matrix()?;
        let kernel: Vec<f64> = dist.iter().map(|&d| kappa * (-alpha * d as f64).exp()).collect();
        Self::from_kernel(window, kernel)
    }

    /// Sampler for an arbitrary symmetric kernel on the window (row-major).
    pub fn from_kernel(window: Arc<Window>, kernel: Vec<f64>) -> Result<Self> {
        let w = window.len();
        assert_eq!(kernel.len(), w * w);
        let eig = SymmetricEigen::new(DMatrix::from_row_slice(w, w, &kernel));
        let (min, max) = eig
            .eigenvalues
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &l| (lo.min(l), hi.max(l)));
        if min < -EIGEN_CLIP_TOLERANCE || max > 1.0 + EIGEN_CLIP_TOLERANCE {
            return Err(Error::KernelNotContraction { min, max });
        }
        let eigenvalues = eig.eigenvalues.iter().map(|l| l.clamp(0.0, 1.0)).collect();
        let eigenvectors = (0..w).map(|c| eig.eigenvectors.column(c).iter().copied().collect()).collect();
        Ok(DeterminantalSampler {
            window,
            kernel,
            eigenvalues,
            eigenvectors,
        })
    }

    pub fn kernel(&self, i: usize, j: usize) -> f64 {
        self.kernel[i * self.window.len() + j]
    }

    pub fn spectrum(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// `det(K(x_i, x_j))` over the given sites.
    pub fn principal_minor(&self, sites: &[usize]) -> f64 {
        let k = sites.len();
        if k == 0 {
            return 1.0;
        }
        let m = DMatrix::from_fn(k, k, |a, b| self.kernel(sites[a], sites[b]));
        m.determinant()
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> SpinConfiguration {
        let w = self.window.len();
        let mut basis: Vec<Vec<f64>> = self
            .eigenvalues
            .iter()
            .zip(&self.eigenvectors)
            .filter(|(&l, _)| rng.random::<f64>() < l)
            .map(|(_, v)| v.clone())
            .collect();

        let mut occupied = vec![false; w];
        while !basis.is_empty() {
            let k = basis.len() as f64;
            let weights: Vec<f64> = (0..w)
                .map(|i| basis.iter().map(|v| v[i] * v[i]).sum::<f64>() / k)
                .collect();
            let chosen = draw_index(&weights, rng);
            occupied[chosen] = true;

            // Eliminate the coordinate `chosen` using the column with the
            // largest entry there, then drop that column and re-orthonormalize.
            let pivot = (0..basis.len())
                .max_by(|&a, &b| basis[a][chosen].abs().total_cmp(&basis[b][chosen].abs()))
                .expect("basis is non-empty");
            let pv = basis.swap_remove(pivot);
            for v in basis.iter_mut() {
                let ratio = v[chosen] / pv[chosen];
                for (x, p) in v.iter_mut().zip(&pv) {
                    *x -= ratio * p;
                }
                v[chosen] = 0.0;
            }
            gram_schmidt(&mut basis);
        }
        SpinConfiguration::from_bits(self.window.clone(), occupied)
    }
}

pub fn sample_determinantal<R: Rng + ?Sized>(
    window: &Arc<Window>,
    kappa: f64,
    alpha: f64,
    rng: &mut R,
) -> Result<SpinConfiguration> {
    Ok(DeterminantalSampler::new(window.clone(), kappa, alpha)?.sample(rng))
}

fn draw_index<R: Rng + ?Sized>(weights: &[f64], rng: &mut R) -> usize {
    let total: f64 = weights.iter().sum();
    let mut target = rng.random::<f64>() * total;
    for (i, &wt) in weights.iter().enumerate() {
        if target < wt {
            return i;
        }
        target -= wt;
    }
    // Rounding left a sliver past the end: take the last positive weight.
    weights.iter().rposition(|&wt| wt > 0.0).unwrap_or(weights.len() - 1)
}

fn gram_schmidt(basis: &mut [Vec<f64>]) {
    for c in 0..basis.len() {
        let (done, rest) = basis.split_at_mut(c);
        let v = &mut rest[0];
        for u in done.iter() {
            let dot: f64 = u.iter().zip(v.iter()).map(|(a, b)| a * b).sum();
            for (x, y) in v.iter_mut().zip(u) {
                *x -= dot * y;
            }
        }
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        for x in v.iter_mut() {
            *x /= norm;
        }
    }
}
