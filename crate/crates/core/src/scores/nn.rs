//! Nearest-neighbour distance score on `Z^d`.

use super::{for_each_sphere_offset, GrowthBound, Locality, Radius, ScoreFunction};
use crate::spin::SpinConfiguration;

/// `ξ_NN(x, μ) = Σ_y |x - y| 1[(x, y) is a nearest-neighbour edge]`.
///
/// Every point at the minimal distance contributes, so mutual edges are
/// counted once from each endpoint.
#[derive(Debug, Clone, Copy)]
pub struct NearestNeighbourScore {
    dim: usize,
}

/// Nearest-neighbour score on `Z^dim`.
pub fn nn_distance_score(dim: usize) -> NearestNeighbourScore {
    NearestNeighbourScore { dim }
}

impl NearestNeighbourScore {
    /// Smallest `r >= 1` with an occupied site on the ℓ1 sphere of radius
    /// `r` around `site`, and the number of such sites.
    fn nearest(&self, site: usize, config: &SpinConfiguration) -> Option<(u32, usize)> {
        let window = config.window();
        let x = window.site(site).coords();
        let d = x.len();
        let max_r = 2 * window.radius();
        let mut y = vec![0i64; d];
        for r in 1..=max_r {
            let mut hits = 0;
            for_each_sphere_offset(d, r, |z| {
                for k in 0..d {
                    y[k] = x[k] + z[k];
                }
                if config.occupied_at(&y) {
                    hits += 1;
                }
            });
            if hits > 0 {
                return Some((r, hits));
            }
        }
        None
    }
}

impl ScoreFunction for NearestNeighbourScore {
    fn name(&self) -> String {
        "nearest_neighbour".to_string()
    }

    fn evaluate(&self, site: usize, config: &SpinConfiguration) -> f64 {
        if !config.is_occupied(site) {
            return 0.0;
        }
        match self.nearest(site, config) {
            Some((r, hits)) => (r as usize * hits) as f64,
            None => 0.0,
        }
    }

    fn stabilization_radius(&self, site: usize, config: &SpinConfiguration) -> Radius {
        if !config.is_occupied(site) {
            return Radius::Finite(0);
        }
        match self.nearest(site, config) {
            Some((r, _)) => Radius::Finite(r),
            None => Radius::Unbounded,
        }
    }

    fn locality(&self) -> Locality {
        Locality::QuasiLocal
    }

    /// The ℓ1 sphere of radius `t` in `Z^d` has at most `2^d t^(d-1)`
    /// points, so `ξ_NN <= 2^d t^d`.
    fn growth(&self) -> Option<GrowthBound> {
        Some(GrowthBound {
            c_star: (1u64 << self.dim) as f64,
            kappa: self.dim as f64,
        })
    }

    fn evaluate_all(&self, config: &SpinConfiguration) -> Vec<(f64, Radius)> {
        (0..config.len())
            .map(|i| {
                if !config.is_occupied(i) {
                    return (0.0, Radius::Finite(0));
                }
                match self.nearest(i, config) {
                    Some((r, hits)) => ((r as usize * hits) as f64, Radius::Finite(r)),
                    None => (0.0, Radius::Unbounded),
                }
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cayley::GroupKind;
    use crate::scores::{total_mass, truncate_to_local};
    use crate::spin::Window;
    use std::sync::Arc;

    fn cfg(points: &[[i64; 2]]) -> SpinConfiguration {
        let w = Window::for_kind(GroupKind::IntegerLattice(2), 6).unwrap();
        let refs: Vec<&[i64]> = points.iter().map(|p| p.as_slice()).collect();
        SpinConfiguration::from_coords(w, &refs)
    }

    #[test]
    fn mutual_pair_counts_twice() {
        assert_eq!(total_mass(&nn_distance_score(2), &cfg(&[[0, 0], [2, 0]])).value, 4.0);
    }

    #[test]
    fn singleton() {
        let c = cfg(&[[0, 0]]);
        let i = c.support()[0];
        assert_eq!(nn_distance_score(2).evaluate(i, &c), 0.0);
        assert_eq!(nn_distance_score(2).stabilization_radius(i, &c), Radius::Unbounded);
    }

    #[test]
    fn ties_all_contribute() {
        let c = cfg(&[[0, 0], [1, 0], [0, 1]]);
        let o = c.window().lookup(&[0, 0]).unwrap();
        assert_eq!(nn_distance_score(2).evaluate(o, &c), 2.0);
    }

    #[test]
    fn truncation() {
        let c = cfg(&[[0, 0], [5, 0]]);
        let o = c.window().lookup(&[0, 0]).unwrap();
        let nn: Arc<dyn ScoreFunction> = Arc::new(nn_distance_score(2));
        assert_eq!(truncate_to_local(nn.clone(), 3).evaluate(o, &c), 0.0);
        assert_eq!(truncate_to_local(nn.clone(), 6).evaluate(o, &c), 5.0);
        assert_eq!(truncate_to_local(nn, 0).evaluate(o, &c), 0.0);
    }
}
