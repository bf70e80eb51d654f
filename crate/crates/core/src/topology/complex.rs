//! Cubical complexes `C(μ)` in doubled coordinates and their GF(2) homology.
//!
//! An elementary cube is stored by its doubled centre: an even coordinate
//! marks a unit interval, an odd one a degenerate point. The closed cube
//! `Q_x` owns the `3^d` cells `2x + δ`, `δ ∈ {-1, 0, 1}^d`.

use std::collections::HashMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::spin::SpinConfiguration;

pub const MAX_COMPLEX_DIM: usize = 3;
pub const DEFAULT_SUPPORT_CAP: usize = 1 << 20;

/// Doubled centre of an elementary cube; unused trailing coordinates are 0.
pub type Cell = [i64; MAX_COMPLEX_DIM];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CubicalComplex {
    dim: usize,
    /// `cells[j]`: sorted `j`-cubes.
    cells: Vec<Vec<Cell>>,
}

/// `(β_0, …, β_{d-1})`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BettiVector(pub Vec<usize>);

impl BettiVector {
    pub fn get(&self, k: usize) -> usize {
        self.0.get(k).copied().unwrap_or(0)
    }

    pub fn euler(&self) -> i64 {
        self.0
            .iter()
            .enumerate()
            .map(|(j, &b)| if j % 2 == 0 { b as i64 } else { -(b as i64) })
            .sum()
    }
}

fn cell_dim(c: &Cell, d: usize) -> usize {
    c[..d].iter().filter(|&&v| v % 2 == 0).count()
}

/// The complex spanned by closed unit cubes at the given lattice points.
pub fn complex_of_points<'a>(d: usize, points: impl IntoIterator<Item = &'a [i64]>) -> Result<CubicalComplex> {
    if d == 0 || d > MAX_COMPLEX_DIM {
        return Err(Error::UnsupportedGraph {
            graph: format!("z{d}"),
            operation: "cubical complexes (1 <= d <= 3)",
        });
    }
    let mut cells: Vec<Vec<Cell>> = vec![Vec::new(); d + 1];
    let total = 3usize.pow(d as u32);
    for p in points {
        for code in 0..total {
            let mut c = [0i64; MAX_COMPLEX_DIM];
            let mut rest = code;
            for k in 0..d {
                c[k] = 2 * p[k] + (rest % 3) as i64 - 1;
                rest /= 3;
            }
            cells[cell_dim(&c, d)].push(c);
        }
    }
    for list in &mut cells {
        list.sort_unstable();
        list.dedup();
    }
    Ok(CubicalComplex { dim: d, cells })
}

pub fn build_complex(config: &SpinConfiguration) -> Result<CubicalComplex> {
    build_complex_capped(config, DEFAULT_SUPPORT_CAP)
}

pub fn build_complex_capped(config: &SpinConfiguration, cap: usize) -> Result<CubicalComplex> {
    let window = config.window();
    let d = window.require_lattice("cubical complexes")?;
    let support = config.support();
    if support.len() > cap {
        return Err(Error::ResourceLimit {
            what: "complex support",
            requested: support.len(),
            cap,
        });
    }
    complex_of_points(d, support.iter().map(|&i| window.site(i).coords()))
}

impl CubicalComplex {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.cells.iter().all(Vec::is_empty)
    }

    /// `|F'_j|` for `j = 0..=d`.
    pub fn counts(&self) -> Vec<usize> {
        self.cells.iter().map(Vec::len).collect()
    }

    pub fn cells(&self, j: usize) -> &[Cell] {
        &self.cells[j]
    }

    /// `Σ_j (-1)^j |F'_j|`.
    pub fn euler_characteristic(&self) -> i64 {
        self.counts()
            .iter()
            .enumerate()
            .map(|(j, &n)| if j % 2 == 0 { n as i64 } else { -(n as i64) })
            .sum()
    }

    /// Codimension-one faces of a cell.
    pub fn faces(&self, c: &Cell) -> Vec<Cell> {
        let mut out = Vec::new();
        for k in 0..self.dim {
            if c[k] % 2 == 0 {
                for delta in [-1, 1] {
                    let mut f = *c;
                    f[k] += delta;
                    out.push(f);
                }
            }
        }
        out
    }

    /// Rank over GF(2) of `∂_j : C_j → C_{j-1}`, `1 <= j <= d`.
    pub fn boundary_rank(&self, j: usize) -> usize {
        assert!(j >= 1 && j <= self.dim);
        let rows: HashMap<Cell, usize> = self.cells[j - 1].iter().enumerate().map(|(i, c)| (*c, i)).collect();
        let words = self.cells[j - 1].len().div_ceil(64);
        let columns = self.cells[j].iter().map(|c| {
            let mut col = vec![0u64; words];
            for f in self.faces(c) {
                let r = rows[&f];
                col[r / 64] ^= 1 << (r % 64);
            }
            col
        });
        gf2_rank(columns, words)
    }

    pub fn betti_numbers(&self) -> BettiVector {
        let d = self.dim;
        let n = self.counts();
        let ranks: Vec<usize> = (0..=d + 1)
            .map(|j| if j == 0 || j > d || n[j] == 0 { 0 } else { self.boundary_rank(j) })
            .collect();
        BettiVector((0..d).map(|j| n[j] - ranks[j] - ranks[j + 1]).collect())
    }
}

pub fn betti_numbers(complex: &CubicalComplex) -> BettiVector {
    complex.betti_numbers()
}

/// Column reduction on bit-packed columns: each column is reduced by the
/// stored column owning its lowest set bit until it is zero or has a new pivot.
fn gf2_rank(columns: impl Iterator<Item = Vec<u64>>, words: usize) -> usize {
    let mut pivots: HashMap<usize, Vec<u64>> = HashMap::new();
    for mut col in columns {
        while let Some(low) = highest_bit(&col, words) {
            match pivots.get(&low) {
                Some(p) => {
                    for (a, b) in col.iter_mut().zip(p) {
                        *a ^= b;
                    }
                }
                None => {
                    pivots.insert(low, col);
                    break;
                }
            }
        }
    }
    pivots.len()
}

fn highest_bit(col: &[u64], words: usize) -> Option<usize> {
    (0..words)
        .rev()
        .find(|&w| col[w] != 0)
        .map(|w| w * 64 + 63 - col[w].leading_zeros() as usize)
}
