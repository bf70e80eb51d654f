//! Monte Carlo tails of the stabilization radius.

use serde::Serialize;

use super::{Radius, ScoreFunction};
use crate::error::{Error, Result};
use crate::spin::{PreparedModel, SeedPolicy};

/// `P̂(R(x, P_n) >= t | x occupied)`, maximized over the probed sites.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TailEstimate {
    pub t: u32,
    pub probability: f64,
    pub se: f64,
    /// Window index of the site attaining the maximum.
    pub site: usize,
    /// Replicates in which that site was occupied.
    pub occupied: usize,
}

/// Samples `replicates` configurations and, for each `t` in `t_grid`,
/// reports the largest conditional tail over `sites`. Unbounded radii
/// count as exceeding every `t`.
pub fn empirical_radius_tail(
    score: &dyn ScoreFunction,
    model: &PreparedModel,
    sites: &[usize],
    t_grid: &[u32],
    replicates: usize,
    seeds: &SeedPolicy,
) -> Result<Vec<TailEstimate>> {
    if sites.is_empty() {
        return Err(Error::param("sites", "need at least one probe site"));
    }
    if replicates == 0 {
        return Err(Error::TooFewReplicates { needed: 1, got: 0 });
    }
    let mut occupied = vec![0usize; sites.len()];
    let mut exceed = vec![vec![0usize; t_grid.len()]; sites.len()];
    for r in 0..replicates {
        let config = model.sample(&mut seeds.replicate(0, r as u32));
        for (s, &site) in sites.iter().enumerate() {
            if !config.is_occupied(site) {
                continue;
            }
            occupied[s] += 1;
            let radius = score.stabilization_radius(site, &config);
            for (k, &t) in t_grid.iter().enumerate() {
                let over = match radius {
                    Radius::Finite(rad) => rad >= t,
                    Radius::Unbounded => true,
                };
                if over {
                    exceed[s][k] += 1;
                }
            }
        }
    }
    Ok(t_grid
        .iter()
        .enumerate()
        .map(|(k, &t)| {
            let mut best = TailEstimate {
                t,
                probability: 0.0,
                se: 0.0,
                site: sites[0],
                occupied: occupied[0],
            };
            for (s, &site) in sites.iter().enumerate() {
                let m = occupied[s];
                if m == 0 {
                    continue;
                }
                let p = exceed[s][k] as f64 / m as f64;
                if p > best.probability || best.occupied == 0 {
                    best = TailEstimate {
                        t,
                        probability: p,
                        se: (p * (1.0 - p) / m as f64).sqrt(),
                        site,
                        occupied: m,
                    };
                }
            }
            best
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cayley::GroupKind;
    use crate::scores::{nn_distance_score, IntrinsicVolumeScore};
    use crate::spin::{ModelSpec, Window};

    #[test]
    fn local_score_has_no_tail_beyond_its_range() {
        let w = Window::for_kind(GroupKind::IntegerLattice(2), 4).unwrap();
        let model = ModelSpec::Iid { p: 0.5 }.prepare(&w).unwrap();
        let o = w.lookup(&[0, 0]).unwrap();
        let tail = empirical_radius_tail(
            &IntrinsicVolumeScore::new(0).unwrap(),
            &model,
            &[o],
            &[3, 4, 5],
            200,
            &SeedPolicy::new(1),
        )
        .unwrap();
        assert!(tail.iter().all(|e| e.probability == 0.0));
    }

    #[test]
    fn full_occupation_gives_radius_one() {
        let w = Window::for_kind(GroupKind::IntegerLattice(2), 3).unwrap();
        let model = ModelSpec::Iid { p: 1.0 }.prepare(&w).unwrap();
        let o = w.lookup(&[0, 0]).unwrap();
        let tail =
            empirical_radius_tail(&nn_distance_score(2), &model, &[o], &[1, 2], 10, &SeedPolicy::new(1)).unwrap();
        assert_eq!(tail[0].probability, 1.0);
        assert_eq!(tail[1].probability, 0.0);
    }
}
