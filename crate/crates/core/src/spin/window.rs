use std::collections::HashMap;
use std::sync::Arc;

use crate::cayley::{CayleyGraph, GroupKind, GroupPoint};
use crate::error::{Error, Result};

/// The observation window `W_n = W_n(O)` with a site index that follows `≺`.
#[derive(Debug)]
pub struct Window {
    graph: Arc<CayleyGraph>,
    radius: u32,
    sites: Vec<GroupPoint>,
    norms: Vec<u32>,
    index: HashMap<GroupPoint, usize>,
    /// Dense lookup over the bounding box `[-n, n]^d` (lattices only).
    grid: Option<Vec<u32>>,
    neighbors: Vec<Vec<usize>>,
}

const NO_SITE: u32 = u32::MAX;
const DENSE_GRID_LIMIT: usize = 1 << 24;

impl Window {
    pub fn new(graph: Arc<CayleyGraph>, radius: u32) -> Result<Self> {
        let kind = graph.kind();
        let ball = graph.ball(&kind.identity(), radius)?;
        let sites = ball.members;
        let norms = ball.distances;
        let index: HashMap<GroupPoint, usize> =
            sites.iter().cloned().enumerate().map(|(i, g)| (g, i)).collect();

        let grid = match kind.lattice_dim() {
            Some(d) => {
                let side = 2 * radius as usize + 1;
                side.checked_pow(d as u32)
                    .filter(|&cells| cells <= DENSE_GRID_LIMIT)
                    .map(|cells| {
                        let mut grid = vec![NO_SITE; cells];
                        for (i, g) in sites.iter().enumerate() {
                            grid[dense_offset(g.coords(), radius)] = i as u32;
                        }
                        grid
                    })
            }
            None => None,
        };

        let neighbors = sites
            .iter()
            .map(|g| {
                graph
                    .neighbors(g)
                    .iter()
                    .filter_map(|h| index.get(h).copied())
                    .collect()
            })
            .collect();

        Ok(Window {
            graph,
            radius,
            sites,
            norms,
            index,
            grid,
            neighbors,
        })
    }

    /// Convenience constructor with a fresh graph.
    pub fn for_kind(kind: GroupKind, radius: u32) -> Result<Arc<Self>> {
        Ok(Arc::new(Self::new(Arc::new(CayleyGraph::new(kind)), radius)?))
    }

    pub fn graph(&self) -> &Arc<CayleyGraph> {
        &self.graph
    }

    pub fn kind(&self) -> GroupKind {
        self.graph.kind()
    }

    pub fn radius(&self) -> u32 {
        self.radius
    }

    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    pub fn sites(&self) -> &[GroupPoint] {
        &self.sites
    }

    pub fn site(&self, i: usize) -> &GroupPoint {
        &self.sites[i]
    }

    /// Graph distance of site `i` from the origin.
    pub fn norm(&self, i: usize) -> u32 {
        self.norms[i]
    }

    pub fn index_of(&self, g: &GroupPoint) -> Option<usize> {
        self.index.get(g).copied()
    }

    /// Site index for raw lattice coordinates, without allocating.
    pub fn lookup(&self, coords: &[i64]) -> Option<usize> {
        if let Some(grid) = &self.grid {
            let r = self.radius as i64;
            if coords.iter().any(|&c| c < -r || c > r) {
                return None;
            }
            let i = grid[dense_offset(coords, self.radius)];
            return (i != NO_SITE).then_some(i as usize);
        }
        self.index.get(&GroupPoint(coords.to_vec())).copied()
    }

    /// Window indices of the Cayley-graph neighbours of site `i`.
    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.neighbors[i]
    }

    pub fn distance(&self, i: usize, j: usize) -> Result<u32> {
        self.graph.distance(&self.sites[i], &self.sites[j])
    }

    /// All pairwise graph distances, row-major.
    pub fn distance_matrix(&self) -> Result<Vec<u32>> {
        let w = self.len();
        let mut out = vec![0u32; w * w];
        match self.kind().lattice_dim() {
            Some(_) => {
                for i in 0..w {
                    for j in 0..w {
                        out[i * w + j] = l1_between(self.sites[i].coords(), self.sites[j].coords());
                    }
                }
            }
            None => {
                for i in 0..w {
                    for j in i..w {
                        let d = self.distance(i, j)?;
                        out[i * w + j] = d;
                        out[j * w + i] = d;
                    }
                }
            }
        }
        Ok(out)
    }

    pub(crate) fn require_lattice(&self, operation: &'static str) -> Result<usize> {
        self.kind().lattice_dim().ok_or_else(|| Error::UnsupportedGraph {
            graph: self.kind().to_string(),
            operation,
        })
    }
}

fn dense_offset(coords: &[i64], radius: u32) -> usize {
    let side = 2 * radius as i64 + 1;
    coords
        .iter()
        .fold(0i64, |acc, &c| acc * side + (c + radius as i64)) as usize
}

pub(crate) fn l1_between(a: &[i64], b: &[i64]) -> u32 {
    a.iter().zip(b).map(|(x, y)| (x - y).unsigned_abs()).sum::<u64>() as u32
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lookup_matches_index() {
        let w = Window::for_kind(GroupKind::IntegerLattice(2), 4).unwrap();
        assert_eq!(w.len(), 41);
        for (i, g) in w.sites().iter().enumerate() {
            assert_eq!(w.lookup(g.coords()), Some(i));
            assert_eq!(w.index_of(g), Some(i));
        }
        assert_eq!(w.lookup(&[4, 1]), None);
        assert_eq!(w.lookup(&[9, 0]), None);
        assert_eq!(w.site(0), &GroupPoint::new(vec![0, 0]));
    }

    #[test]
    fn heisenberg_window_neighbors() {
        let w = Window::for_kind(GroupKind::Heisenberg3, 2).unwrap();
        assert_eq!(w.neighbors(0).len(), 4);
        let dm = w.distance_matrix().unwrap();
        let n = w.len();
        for i in 0..n {
            assert_eq!(dm[i * n + i], 0);
            assert_eq!(dm[i], w.norm(i));
        }
    }
}
