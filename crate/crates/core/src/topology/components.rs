//! Connected components of `C(μ)` and the Betti score `ξ_k`.

use serde::Serialize;

use super::complex::{complex_of_points, MAX_COMPLEX_DIM};
use crate::error::{Error, Result};
use crate::scores::{linf_neighbors, Locality, Radius, ScoreFunction};
use crate::spin::SpinConfiguration;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ComponentDecomposition {
    /// Component id per window site (`None` for empty sites).
    pub component_of: Vec<Option<usize>>,
    /// Window site indices of each component, in site order.
    pub components: Vec<Vec<usize>>,
    /// Per window site: largest ℓ1 distance to a site of its component.
    pub reach: Vec<u32>,
}

impl ComponentDecomposition {
    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    /// `d(x, μ) = inf{s : C(x, μ) ⊂ W_{s-1}(x)}`.
    pub fn diameter(&self, site: usize) -> Option<u32> {
        self.component_of[site].map(|_| self.reach[site] + 1)
    }
}

struct UnionFind {
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
            rank: vec![0; n],
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return;
        }
        match self.rank[ra].cmp(&self.rank[rb]) {
            std::cmp::Ordering::Less => self.parent[ra] = rb,
            std::cmp::Ordering::Greater => self.parent[rb] = ra,
            std::cmp::Ordering::Equal => {
                self.parent[rb] = ra;
                self.rank[ra] += 1;
            }
        }
    }
}

/// Union-find over ℓ∞-adjacent occupied sites (closed cubes that touch).
pub fn components(config: &SpinConfiguration) -> Result<ComponentDecomposition> {
    let window = config.window();
    let d = window.require_lattice("component decomposition")?;
    let w = config.len();
    let mut uf = UnionFind::new(w);
    let mut nbrs = Vec::new();
    for i in config.support() {
        linf_neighbors(config, i, &mut nbrs);
        for &j in &nbrs {
            if j > i {
                uf.union(i, j);
            }
        }
    }
    let mut component_of = vec![None; w];
    let mut components: Vec<Vec<usize>> = Vec::new();
    let mut id_of_root = vec![usize::MAX; w];
    for i in config.support() {
        let root = uf.find(i);
        if id_of_root[root] == usize::MAX {
            id_of_root[root] = components.len();
            components.push(Vec::new());
        }
        let id = id_of_root[root];
        component_of[i] = Some(id);
        components[id].push(i);
    }

    // |x - y|_1 = max over sign vectors s of s·(y - x).
    let signs: Vec<Vec<i64>> = (0..1usize << d)
        .map(|m| (0..d).map(|k| if m >> k & 1 == 1 { -1 } else { 1 }).collect())
        .collect();
    let dot = |s: &[i64], x: &[i64]| s.iter().zip(x).map(|(a, b)| a * b).sum::<i64>();
    let mut reach = vec![0u32; w];
    for comp in &components {
        let extremes: Vec<i64> = signs
            .iter()
            .map(|s| comp.iter().map(|&i| dot(s, window.site(i).coords())).max().unwrap())
            .collect();
        for &i in comp {
            let x = window.site(i).coords();
            reach[i] = signs
                .iter()
                .zip(&extremes)
                .map(|(s, &m)| m - dot(s, x))
                .max()
                .unwrap() as u32;
        }
    }
    Ok(ComponentDecomposition {
        component_of,
        components,
        reach,
    })
}

/// `ξ_k(x, μ) = β_k(C(x, μ)) / |C(x, μ)|` on `Z^d`, `d <= 3`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BettiScore {
    k: usize,
    dim: usize,
}

pub fn betti_score(k: usize, d: usize) -> Result<BettiScore> {
    BettiScore::new(k, d)
}

impl BettiScore {
    pub fn new(k: usize, d: usize) -> Result<Self> {
        if d == 0 || d > MAX_COMPLEX_DIM {
            return Err(Error::UnsupportedGraph {
                graph: format!("z{d}"),
                operation: "Betti scores (1 <= d <= 3)",
            });
        }
        if k >= d {
            return Err(Error::param("betti.k", format!("must satisfy 0 <= k <= d - 1 = {}", d - 1)));
        }
        Ok(BettiScore { k, dim: d })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// `β_k` of one connected component.
    fn component_betti(&self, config: &SpinConfiguration, sites: &[usize]) -> usize {
        if self.k == 0 {
            return 1;
        }
        let window = config.window();
        let complex = complex_of_points(self.dim, sites.iter().map(|&i| window.site(i).coords()))
            .expect("dimension validated at construction");
        if self.dim == 2 {
            // Connected planar complex: β_1 = 1 - χ.
            (1 - complex.euler_characteristic()) as usize
        } else {
            complex.betti_numbers().get(self.k)
        }
    }

    /// Sites within this ℓ1 distance of the component determine it.
    fn radius_for(&self, reach: u32) -> Radius {
        Radius::Finite(reach + self.dim as u32)
    }
}

impl ScoreFunction for BettiScore {
    fn name(&self) -> String {
        format!("betti(k={})", self.k)
    }

    fn evaluate(&self, site: usize, config: &SpinConfiguration) -> f64 {
        if !config.is_occupied(site) {
            return 0.0;
        }
        let comp = component_sites(config, site);
        self.component_betti(config, &comp) as f64 / comp.len() as f64
    }

    fn stabilization_radius(&self, site: usize, config: &SpinConfiguration) -> Radius {
        if !config.is_occupied(site) {
            return Radius::Finite(0);
        }
        let comp = component_sites(config, site);
        let window = config.window();
        let x = window.site(site).coords();
        let reach = comp
            .iter()
            .map(|&j| crate::spin::l1_between(x, window.site(j).coords()))
            .max()
            .unwrap_or(0);
        self.radius_for(reach)
    }

    fn locality(&self) -> Locality {
        Locality::QuasiLocal
    }

    fn evaluate_all(&self, config: &SpinConfiguration) -> Vec<(f64, Radius)> {
        let decomposition = components(config).expect("Betti score requires a lattice window");
        let mut out = vec![(0.0, Radius::Finite(0)); config.len()];
        for comp in &decomposition.components {
            let value = self.component_betti(config, comp) as f64 / comp.len() as f64;
            for &i in comp {
                out[i] = (value, self.radius_for(decomposition.reach[i]));
            }
        }
        out
    }
}

fn component_sites(config: &SpinConfiguration, site: usize) -> Vec<usize> {
    let mut comp = vec![site];
    let mut seen = vec![false; config.len()];
    seen[site] = true;
    let mut head = 0;
    let mut nbrs = Vec::new();
    while head < comp.len() {
        linf_neighbors(config, comp[head], &mut nbrs);
        head += 1;
        for &j in &nbrs {
            if !seen[j] {
                seen[j] = true;
                comp.push(j);
            }
        }
    }
    comp
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cayley::GroupKind;
    use crate::scores::total_mass;
    use crate::spin::Window;

    fn cfg(points: &[[i64; 2]]) -> SpinConfiguration {
        let w = Window::for_kind(GroupKind::IntegerLattice(2), 12).unwrap();
        let refs: Vec<&[i64]> = points.iter().map(|p| p.as_slice()).collect();
        SpinConfiguration::from_coords(w, &refs)
    }

    #[test]
    fn component_goldens() {
        assert_eq!(components(&cfg(&[[0, 0], [1, 1]])).unwrap().len(), 1);
        assert_eq!(components(&cfg(&[[0, 0], [0, 1], [5, 5]])).unwrap().len(), 2);
        assert!(components(&cfg(&[])).unwrap().is_empty());
        let dec = components(&cfg(&[[0, 0], [1, 1], [2, 1]])).unwrap();
        let o = dec.components[0].iter().copied().find(|&i| dec.reach[i] == 3).unwrap();
        assert_eq!(dec.diameter(o), Some(4));
    }

    #[test]
    fn betti_score_goldens() {
        let b0 = BettiScore::new(0, 2).unwrap();
        let b1 = BettiScore::new(1, 2).unwrap();
        let single = cfg(&[[0, 0]]);
        let o = single.support()[0];
        assert_eq!(b0.evaluate(o, &single), 1.0);
        assert_eq!(b1.evaluate(o, &single), 0.0);
        let ring: Vec<[i64; 2]> = (-1..=1)
            .flat_map(|a| (-1..=1).map(move |b| [a, b]))
            .filter(|p| *p != [0, 0])
            .collect();
        let c = cfg(&ring);
        for i in c.support() {
            assert_eq!(b1.evaluate(i, &c), 0.125);
        }
        assert_eq!(total_mass(&b1, &c).value, 1.0);
        assert!(BettiScore::new(2, 2).is_err());
    }

    #[test]
    fn evaluate_all_agrees_with_pointwise() {
        let c = cfg(&[[0, 0], [1, 1], [2, 1], [-3, 0], [-3, 2], [-3, 1]]);
        let b = BettiScore::new(0, 2).unwrap();
        let all = b.evaluate_all(&c);
        for i in c.support() {
            assert_eq!(all[i].0, b.evaluate(i, &c));
            assert_eq!(all[i].1, b.stabilization_radius(i, &c));
        }
    }
}
