//! Direct estimate of `σ² = Σ_z Cov(ξ(O), ξ(z))`, pooled over translates
//! of the origin and truncated at `|z| <= ρ`.

use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use super::stats::{clustering_decay_fit, variance, DecayFit};
use crate::cayley::GroupKind;
use crate::error::{Error, Result};
use crate::scores::{Locality, ScoreFunction};
use crate::spin::{ModelSpec, SeedPolicy, Window};

pub const DIRECT_BATCHES: usize = 20;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShellCovariance {
    /// Graph distance `|z|`.
    pub distance: u32,
    pub sites: usize,
    /// `Σ_{|z| = s} Cov(ξ(O), ξ(z))`.
    pub covariance: f64,
    pub se: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SigmaEstimate {
    pub sigma_squared: f64,
    pub se: f64,
    pub rho_max: u32,
    pub window_radius: u32,
    pub base_points: usize,
    pub replicates: usize,
    pub shells: Vec<ShellCovariance>,
    /// `Σ_{s > ρ}` of the fitted shell decay `exp(a + b s)`, when the decay
    /// fit has signal and a negative slope.
    pub tail_bound: Option<f64>,
    pub decay: DecayFit,
}

/// Pairs `(x, x·z)` for base points `x ∈ W_{N-2ρ}` and offsets `z ∈ W_ρ`.
pub(crate) struct PairIndex {
    rho: u32,
    bases: Vec<usize>,
    /// `targets[b * offsets + k]` is the window index of `bases[b] · z_k`.
    targets: Vec<usize>,
    offset_shell: Vec<u32>,
    shell_sizes: Vec<usize>,
}

impl PairIndex {
    pub(crate) fn new(window: &Arc<Window>, rho: u32, margin: u32) -> Result<Self> {
        let n = window.radius();
        if n < 2 * rho + margin {
            return Err(Error::MarginViolated(format!(
                "window radius {n} is below 2*rho_max + score radius = {}",
                2 * rho + margin
            )));
        }
        let kind = window.kind();
        let offsets: Vec<usize> = (0..window.len()).filter(|&i| window.norm(i) <= rho).collect();
        let bases: Vec<usize> = (0..window.len()).filter(|&i| window.norm(i) <= n - 2 * rho).collect();
        let mut shell_sizes = vec![0usize; rho as usize + 1];
        let offset_shell: Vec<u32> = offsets.iter().map(|&k| window.norm(k)).collect();
        for &s in &offset_shell {
            shell_sizes[s as usize] += 1;
        }
        let mut targets = Vec::with_capacity(bases.len() * offsets.len());
        for &b in &bases {
            for &k in &offsets {
                let g = kind.compose(window.site(b), window.site(k))?;
                let t = window.index_of(&g).ok_or_else(|| {
                    Error::MarginViolated(format!("translate {:?} left the window", g.coords()))
                })?;
                targets.push(t);
            }
        }
        Ok(PairIndex {
            rho,
            bases,
            targets,
            offset_shell,
            shell_sizes,
        })
    }

    /// Per-replicate sums: `[Σ_x ξ(x), Σ_x ξ(x) Σ_{|z|=0} ξ(xz), …, Σ_{|z|=ρ}]`.
    pub(crate) fn accumulate(&self, values: &[f64]) -> Vec<f64> {
        let k = self.offset_shell.len();
        let mut out = vec![0.0; self.rho as usize + 2];
        for (b, &x) in self.bases.iter().enumerate() {
            let vx = values[x];
            out[0] += vx;
            if vx == 0.0 {
                continue;
            }
            for (j, &t) in self.targets[b * k..(b + 1) * k].iter().enumerate() {
                out[1 + self.offset_shell[j] as usize] += vx * values[t];
            }
        }
        out
    }

    fn shell_estimates(&self, rows: &[&Vec<f64>]) -> Vec<f64> {
        let denom = (rows.len() * self.bases.len()) as f64;
        let mu = rows.iter().map(|r| r[0]).sum::<f64>() / denom;
        (0..=self.rho as usize)
            .map(|s| rows.iter().map(|r| r[1 + s]).sum::<f64>() / denom - self.shell_sizes[s] as f64 * mu * mu)
            .collect()
    }

    /// Combines per-replicate accumulators into the shell covariances, with
    /// batch-means standard errors over contiguous replicate batches.
    pub(crate) fn finish(&self, per_replicate: &[Vec<f64>], window_radius: u32) -> Result<SigmaEstimate> {
        let r = per_replicate.len();
        if r < DIRECT_BATCHES {
            return Err(Error::TooFewReplicates {
                needed: DIRECT_BATCHES,
                got: r,
            });
        }
        let all: Vec<&Vec<f64>> = per_replicate.iter().collect();
        let shells = self.shell_estimates(&all);
        let batch_shells: Vec<Vec<f64>> = (0..DIRECT_BATCHES)
            .map(|b| {
                let lo = b * r / DIRECT_BATCHES;
                let hi = (b + 1) * r / DIRECT_BATCHES;
                self.shell_estimates(&all[lo..hi])
            })
            .collect();
        let bse = |f: &dyn Fn(&[f64]) -> f64| {
            let xs: Vec<f64> = batch_shells.iter().map(|v| f(v)).collect();
            (variance(&xs) / DIRECT_BATCHES as f64).sqrt()
        };
        let sigma_squared = shells.iter().sum::<f64>();
        let se = bse(&|v| v.iter().sum());
        let shells: Vec<ShellCovariance> = shells
            .iter()
            .enumerate()
            .map(|(s, &c)| ShellCovariance {
                distance: s as u32,
                sites: self.shell_sizes[s],
                covariance: c,
                se: bse(&|v| v[s]),
            })
            .collect();

        let tail_shells: Vec<&ShellCovariance> = shells.iter().filter(|c| c.distance >= 1).collect();
        let decay = clustering_decay_fit(
            &tail_shells.iter().map(|c| c.distance as f64).collect::<Vec<_>>(),
            &tail_shells.iter().map(|c| c.covariance.abs()).collect::<Vec<_>>(),
            &tail_shells.iter().map(|c| c.se).collect::<Vec<_>>(),
        );
        let tail_bound = match decay {
            DecayFit::Fit {
                slope, intercept, ..
            } if slope < 0.0 => {
                let first = (intercept + slope * (self.rho as f64 + 1.0)).exp();
                Some(first / (1.0 - slope.exp()))
            }
            _ => None,
        };
        Ok(SigmaEstimate {
            sigma_squared,
            se,
            rho_max: self.rho,
            window_radius,
            base_points: self.bases.len(),
            replicates: r,
            shells,
            tail_bound,
            decay,
        })
    }
}

/// Score radius that must fit inside the margin for exact values.
pub(crate) fn score_margin(score: &dyn ScoreFunction) -> u32 {
    match score.locality() {
        Locality::Local(r) => r,
        Locality::QuasiLocal => 0,
    }
}

/// Samples `replicates` configurations on `W_N` and estimates `σ²` from
/// covariances between `ξ(x)` and `ξ(x·z)`, `x ∈ W_{N-2ρ}`, `z ∈ W_ρ`.
/// Runs on the current rayon pool; replicate `r` uses stream
/// `seeds.replicate(0, r)`.
pub fn sigma_squared_direct(
    model: &ModelSpec,
    kind: GroupKind,
    score: &dyn ScoreFunction,
    rho_max: u32,
    window_radius: u32,
    replicates: usize,
    seeds: &SeedPolicy,
) -> Result<SigmaEstimate> {
    let window = Window::for_kind(kind, window_radius)?;
    let pairs = PairIndex::new(&window, rho_max, score_margin(score))?;
    let prepared = model.prepare(&window)?;
    let per_replicate: Vec<Vec<f64>> = (0..replicates)
        .into_par_iter()
        .map(|r| {
            let config = prepared.sample(&mut seeds.replicate(0, r as u32));
            let values: Vec<f64> = score.evaluate_all(&config).into_iter().map(|(v, _)| v).collect();
            pairs.accumulate(&values)
        })
        .collect();
    pairs.finish(&per_replicate, window_radius)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scores::{ConstantScore, ScoreSpec};

    const Z2: GroupKind = GroupKind::IntegerLattice(2);

    #[test]
    fn constant_score_under_iid_gives_bernoulli_variance() {
        let model = ModelSpec::Iid { p: 0.3 };
        let est = sigma_squared_direct(&model, Z2, &ConstantScore { value: 1.0 }, 2, 8, 400, &SeedPolicy::new(3))
            .unwrap();
        assert!((est.sigma_squared - 0.21).abs() < 4.0 * est.se, "{est:?}");
        for shell in &est.shells[1..] {
            assert!(shell.covariance.abs() < 4.0 * shell.se + 1e-12, "{shell:?}");
        }
    }

    #[test]
    fn local_score_has_no_covariance_beyond_twice_its_radius() {
        let score = ScoreSpec::IntrinsicVolume { j: 1 }.build(Z2).unwrap();
        let est = sigma_squared_direct(&ModelSpec::Iid { p: 0.5 }, Z2, score.as_ref(), 4, 10, 400, &SeedPolicy::new(4))
            .unwrap();
        for shell in est.shells.iter().filter(|s| s.distance > 2) {
            assert!(shell.covariance.abs() < 4.0 * shell.se, "{shell:?}");
        }
    }

    #[test]
    fn margin_is_enforced() {
        let r = sigma_squared_direct(
            &ModelSpec::Iid { p: 0.5 },
            Z2,
            &ConstantScore { value: 1.0 },
            5,
            8,
            50,
            &SeedPolicy::new(1),
        );
        assert!(matches!(r, Err(Error::MarginViolated(_))));
    }

    #[test]
    fn heisenberg_translates_stay_inside() {
        let w = Window::for_kind(GroupKind::Heisenberg3, 4).unwrap();
        let p = PairIndex::new(&w, 1, 0).unwrap();
        assert_eq!(p.shell_sizes, vec![1, 4]);
    }
}
