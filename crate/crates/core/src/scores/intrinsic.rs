//! Intrinsic volumes of the union of closed unit squares `C(μ)` in `Z²`.
//!
//! Every vertex, edge and face of `C(μ)` is shared equally among the
//! squares that contain it, so the per-site values add up exactly to
//! `V_j(C(μ))`.

use super::{Locality, Radius, ScoreFunction};
use crate::error::{Error, Result};
use crate::spin::SpinConfiguration;

const FACE_NEIGHBOURS: [[i64; 2]; 4] = [[1, 0], [-1, 0], [0, 1], [0, -1]];
const CORNERS: [[i64; 2]; 4] = [[1, 1], [1, -1], [-1, 1], [-1, -1]];

/// `V_0` (Euler characteristic), `V_1` (half perimeter) or `V_2` (area).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IntrinsicVolumeScore {
    j: usize,
}

impl IntrinsicVolumeScore {
    pub fn new(j: usize) -> Result<Self> {
        if j > 2 {
            return Err(Error::param("intrinsic_volume.j", "must be 0, 1 or 2 in d = 2"));
        }
        Ok(IntrinsicVolumeScore { j })
    }

    pub fn index(&self) -> usize {
        self.j
    }
}

/// `(V_0, V_1, V_2)`.
pub fn intrinsic_volume_scores(d: usize) -> Result<[IntrinsicVolumeScore; 3]> {
    if d != 2 {
        return Err(Error::UnsupportedGraph {
            graph: format!("z{d}"),
            operation: "intrinsic volumes",
        });
    }
    Ok([0, 1, 2].map(|j| IntrinsicVolumeScore { j }))
}

fn occupied_offset(config: &SpinConfiguration, x: &[i64], dx: i64, dy: i64) -> bool {
    config.occupied_at(&[x[0] + dx, x[1] + dy])
}

impl ScoreFunction for IntrinsicVolumeScore {
    fn name(&self) -> String {
        format!("intrinsic_volume(j={})", self.j)
    }

    fn evaluate(&self, site: usize, config: &SpinConfiguration) -> f64 {
        if !config.is_occupied(site) {
            return 0.0;
        }
        let x = config.window().site(site).coords();
        debug_assert_eq!(x.len(), 2, "intrinsic volumes need Z²");
        let faces = FACE_NEIGHBOURS
            .iter()
            .filter(|e| occupied_offset(config, x, e[0], e[1]))
            .count() as f64;
        match self.j {
            2 => 1.0,
            1 => 2.0 - faces / 2.0,
            _ => {
                // Face: +1. Each edge: -1/(squares on it). Each corner: +1/(squares at it).
                let edges: f64 = FACE_NEIGHBOURS
                    .iter()
                    .map(|e| if occupied_offset(config, x, e[0], e[1]) { 0.5 } else { 1.0 })
                    .sum();
                let corners: f64 = CORNERS
                    .iter()
                    .map(|c| {
                        let m = 1
                            + occupied_offset(config, x, c[0], 0) as u32
                            + occupied_offset(config, x, 0, c[1]) as u32
                            + occupied_offset(config, x, c[0], c[1]) as u32;
                        1.0 / m as f64
                    })
                    .sum();
                1.0 - edges + corners
            }
        }
    }

    fn stabilization_radius(&self, _site: usize, _config: &SpinConfiguration) -> Radius {
        Radius::Finite(self.reach())
    }

    fn locality(&self) -> Locality {
        Locality::Local(self.reach())
    }
}

impl IntrinsicVolumeScore {
    /// ℓ1 reach: diagonal corners sit at distance 2.
    fn reach(&self) -> u32 {
        2 - self.j as u32
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cayley::GroupKind;
    use crate::scores::total_mass;
    use crate::spin::Window;

    fn volumes(points: &[[i64; 2]]) -> [f64; 3] {
        let w = Window::for_kind(GroupKind::IntegerLattice(2), 6).unwrap();
        let refs: Vec<&[i64]> = points.iter().map(|p| p.as_slice()).collect();
        let c = SpinConfiguration::from_coords(w, &refs);
        intrinsic_volume_scores(2)
            .unwrap()
            .map(|s| (total_mass(&s, &c).value * 1e9).round() / 1e9)
    }

    #[test]
    fn single_cube() {
        assert_eq!(volumes(&[[0, 0]]), [1.0, 2.0, 1.0]);
    }

    #[test]
    fn bar() {
        assert_eq!(volumes(&[[0, 0], [1, 0], [2, 0]]), [1.0, 4.0, 3.0]);
    }

    #[test]
    fn annulus() {
        let ring: Vec<[i64; 2]> = (-1..=1)
            .flat_map(|a| (-1..=1).map(move |b| [a, b]))
            .filter(|p| *p != [0, 0])
            .collect();
        assert_eq!(volumes(&ring), [0.0, 8.0, 8.0]);
    }

    #[test]
    fn diagonal_pair_is_connected() {
        // Two squares touching at a corner: one component, perimeter 8.
        assert_eq!(volumes(&[[0, 0], [1, 1]]), [1.0, 4.0, 2.0]);
    }

    #[test]
    fn other_dimensions_rejected() {
        assert!(intrinsic_volume_scores(3).is_err());
        assert!(IntrinsicVolumeScore::new(3).is_err());
    }
}
