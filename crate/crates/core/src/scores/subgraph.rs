//! Subgraph counts and component counts of the cubical complex `K(μ)`.
//!
//! The face pattern of a cell set records, for every subset, whether the
//! closed unit cubes share a point and the dimension of their common face.
//! Two sets are isomorphic when some bijection of the cells preserves the
//! whole pattern; for `k <= 6` all `k!` bijections are tried.

use std::collections::HashMap;
use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use super::{linf_neighbors, Locality, Radius, ScoreFunction};
use crate::error::{Error, Result};
use crate::spin::SpinConfiguration;

pub const MAX_TEMPLATE_CELLS: usize = 6;

/// Lattice offsets `z_1 = O, z_2, …, z_k` whose complex `Γ_k` is connected.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<i64>>", into = "Vec<Vec<i64>>")]
pub struct PatternTemplate {
    offsets: Vec<Vec<i64>>,
    /// Spanning tree of the ℓ∞-adjacency graph, as `(child, parent)` pairs.
    certificate: Vec<(usize, usize)>,
}

impl PatternTemplate {
    pub fn new(offsets: Vec<Vec<i64>>) -> Result<Self> {
        let k = offsets.len();
        if k == 0 {
            return Err(Error::param("template", "needs at least one cell"));
        }
        if k > MAX_TEMPLATE_CELLS {
            return Err(Error::param(
                "template",
                format!("{k} cells exceeds the maximum of {MAX_TEMPLATE_CELLS}"),
            ));
        }
        let d = offsets[0].len();
        if d == 0 || offsets.iter().any(|o| o.len() != d) {
            return Err(Error::param("template", "offsets must share one positive dimension"));
        }
        if !offsets.iter().any(|o| o.iter().all(|&c| c == 0)) {
            return Err(Error::param("template", "offsets must include the origin"));
        }
        let mut sorted = offsets.clone();
        sorted.sort();
        sorted.dedup();
        if sorted.len() != k {
            return Err(Error::DuplicatePoints("template"));
        }
        let certificate = spanning_tree(&offsets)
            .ok_or_else(|| Error::param("template", "cells do not form a connected complex"))?;
        Ok(PatternTemplate { offsets, certificate })
    }

    pub fn single_cell(d: usize) -> Self {
        Self::new(vec![vec![0; d]]).expect("single cell is valid")
    }

    pub fn adjacent_pair(d: usize) -> Self {
        let mut e = vec![0; d];
        e[0] = 1;
        Self::new(vec![vec![0; d], e]).expect("pair is valid")
    }

    pub fn cells(&self) -> usize {
        self.offsets.len()
    }

    pub fn dim(&self) -> usize {
        self.offsets[0].len()
    }

    pub fn offsets(&self) -> &[Vec<i64>] {
        &self.offsets
    }

    pub fn certificate(&self) -> &[(usize, usize)] {
        &self.certificate
    }

    fn pattern(&self) -> FacePattern {
        let refs: Vec<&[i64]> = self.offsets.iter().map(Vec::as_slice).collect();
        FacePattern::of(&refs)
    }
}

impl TryFrom<Vec<Vec<i64>>> for PatternTemplate {
    type Error = Error;
    fn try_from(v: Vec<Vec<i64>>) -> Result<Self> {
        PatternTemplate::new(v)
    }
}

impl From<PatternTemplate> for Vec<Vec<i64>> {
    fn from(t: PatternTemplate) -> Self {
        t.offsets
    }
}

fn touching(a: &[i64], b: &[i64]) -> bool {
    a.iter().zip(b).all(|(x, y)| (x - y).abs() <= 1)
}

fn spanning_tree(points: &[Vec<i64>]) -> Option<Vec<(usize, usize)>> {
    let k = points.len();
    let mut seen = vec![false; k];
    seen[0] = true;
    let mut stack = vec![0];
    let mut tree = Vec::new();
    while let Some(i) = stack.pop() {
        for j in 0..k {
            if !seen[j] && touching(&points[i], &points[j]) {
                seen[j] = true;
                tree.push((j, i));
                stack.push(j);
            }
        }
    }
    seen.iter().all(|&s| s).then_some(tree)
}

/// Entry `m` is 0 when the cells in subset `m` are disjoint, otherwise one
/// plus the dimension of their common face.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct FacePattern {
    k: usize,
    faces: [u8; 1 << MAX_TEMPLATE_CELLS],
}

impl FacePattern {
    fn of(points: &[&[i64]]) -> Self {
        let k = points.len();
        debug_assert!(k <= MAX_TEMPLATE_CELLS);
        let d = points[0].len();
        let mut faces = [0u8; 1 << MAX_TEMPLATE_CELLS];
        for mask in 1usize..(1 << k) {
            // Unit boxes meet iff every coordinate spread is at most 1; the
            // common face spans the axes with spread 0.
            let mut dim = 0u8;
            let common = (0..d).all(|axis| {
                let mut lo = i64::MAX;
                let mut hi = i64::MIN;
                for (i, p) in points.iter().enumerate() {
                    if mask >> i & 1 == 1 {
                        lo = lo.min(p[axis]);
                        hi = hi.max(p[axis]);
                    }
                }
                dim += (hi == lo) as u8;
                hi - lo <= 1
            });
            if common {
                faces[mask] = dim + 1;
            }
        }
        FacePattern { k, faces }
    }

    fn histogram(&self) -> [usize; 8] {
        let mut h = [0usize; 8];
        for &f in &self.faces[..1 << self.k] {
            h[f as usize] += 1;
        }
        h
    }

    fn degree_profile(&self) -> Vec<Vec<u8>> {
        let mut deg: Vec<Vec<u8>> = (0..self.k)
            .map(|i| {
                let mut row: Vec<u8> =
                    (0..self.k).filter(|&j| j != i).map(|j| self.faces[(1 << i) | (1 << j)]).collect();
                row.sort_unstable();
                row
            })
            .collect();
        deg.sort_unstable();
        deg
    }

    fn isomorphic(&self, other: &FacePattern) -> bool {
        if self.k != other.k || self.histogram() != other.histogram() {
            return false;
        }
        if self.degree_profile() != other.degree_profile() {
            return false;
        }
        let mut perm: Vec<usize> = (0..self.k).collect();
        let mut used = vec![false; self.k];
        self.search(other, 0, &mut perm, &mut used)
    }

    fn search(&self, other: &FacePattern, pos: usize, perm: &mut [usize], used: &mut [bool]) -> bool {
        if pos == self.k {
            return (1usize..(1 << self.k)).all(|mask| {
                let mut image = 0usize;
                for (i, &target) in perm.iter().enumerate() {
                    if mask >> i & 1 == 1 {
                        image |= 1 << target;
                    }
                }
                self.faces[mask] == other.faces[image]
            });
        }
        for target in 0..self.k {
            if used[target] {
                continue;
            }
            perm[pos] = target;
            used[target] = true;
            if self.search(other, pos + 1, perm, used) {
                return true;
            }
            used[target] = false;
        }
        false
    }
}

/// Shape cache keyed by translation-normalized, sorted coordinates.
#[derive(Debug)]
struct ShapeMatcher {
    target: FacePattern,
    cache: Mutex<HashMap<Vec<i64>, bool>>,
}

impl ShapeMatcher {
    fn new(template: &PatternTemplate) -> Self {
        ShapeMatcher {
            target: template.pattern(),
            cache: Mutex::new(HashMap::new()),
        }
    }

    fn matches(&self, points: &[&[i64]]) -> bool {
        let d = points[0].len();
        let mut mins = vec![i64::MAX; d];
        for p in points {
            for (m, &c) in mins.iter_mut().zip(p.iter()) {
                *m = (*m).min(c);
            }
        }
        let mut normalized: Vec<Vec<i64>> = points
            .iter()
            .map(|p| p.iter().zip(&mins).map(|(c, m)| c - m).collect())
            .collect();
        normalized.sort();
        let key: Vec<i64> = normalized.concat();
        if let Some(&hit) = self.cache.lock().expect("shape cache poisoned").get(&key) {
            return hit;
        }
        let refs: Vec<&[i64]> = normalized.iter().map(Vec::as_slice).collect();
        let result = FacePattern::of(&refs).isomorphic(&self.target);
        self.cache.lock().expect("shape cache poisoned").insert(key, result);
        result
    }
}

/// `ξ(x, μ) = (1/k) #{S ∋ x : S ⊂ μ, |S| = k, K(S) ≅ Γ_k}`, the
/// `1/k!`-weighted sum over ordered tuples. `H` counts copies of `Γ_k`.
#[derive(Debug)]
pub struct SubgraphCountScore {
    template: PatternTemplate,
    matcher: ShapeMatcher,
}

pub fn subgraph_count_score(template: PatternTemplate) -> SubgraphCountScore {
    SubgraphCountScore {
        matcher: ShapeMatcher::new(&template),
        template,
    }
}

impl SubgraphCountScore {
    /// Number of connected `k`-subsets of occupied sites containing `site`
    /// whose complex is isomorphic to the template.
    fn matching_sets(&self, site: usize, config: &SpinConfiguration) -> usize {
        let k = self.template.cells();
        let window = config.window();
        let mut count = 0;
        enumerate_connected(config, site, k, &mut |set| {
            let pts: Vec<&[i64]> = set.iter().map(|&i| window.site(i).coords()).collect();
            if self.matcher.matches(&pts) {
                count += 1;
            }
        });
        count
    }
}

impl ScoreFunction for SubgraphCountScore {
    fn name(&self) -> String {
        format!("subgraph_count(k={})", self.template.cells())
    }

    fn evaluate(&self, site: usize, config: &SpinConfiguration) -> f64 {
        if !config.is_occupied(site) {
            return 0.0;
        }
        self.matching_sets(site, config) as f64 / self.template.cells() as f64
    }

    fn stabilization_radius(&self, _site: usize, _config: &SpinConfiguration) -> Radius {
        Radius::Finite(self.reach())
    }

    fn locality(&self) -> Locality {
        Locality::Local(self.reach())
    }
}

impl SubgraphCountScore {
    /// ℓ1 reach of a chain of `k` touching cubes.
    fn reach(&self) -> u32 {
        (self.template.dim() * (self.template.cells() - 1)) as u32
    }
}

/// `ξ(x, μ) = 1/k` when the component of `x` in `K(μ)` has exactly `k`
/// cells and is isomorphic to `Γ_k`. `H` counts such components.
#[derive(Debug)]
pub struct ComponentCountScore {
    template: PatternTemplate,
    matcher: ShapeMatcher,
}

pub fn component_count_score(template: PatternTemplate) -> ComponentCountScore {
    ComponentCountScore {
        matcher: ShapeMatcher::new(&template),
        template,
    }
}

impl ComponentCountScore {
    fn reach(&self) -> u32 {
        (self.template.dim() * self.template.cells()) as u32
    }
}

impl ScoreFunction for ComponentCountScore {
    fn name(&self) -> String {
        format!("component_count(k={})", self.template.cells())
    }

    fn evaluate(&self, site: usize, config: &SpinConfiguration) -> f64 {
        if !config.is_occupied(site) {
            return 0.0;
        }
        let k = self.template.cells();
        let Some(component) = bounded_component(config, site, k) else {
            return 0.0;
        };
        if component.len() != k {
            return 0.0;
        }
        let window = config.window();
        let pts: Vec<&[i64]> = component.iter().map(|&i| window.site(i).coords()).collect();
        if self.matcher.matches(&pts) {
            1.0 / k as f64
        } else {
            0.0
        }
    }

    fn stabilization_radius(&self, _site: usize, _config: &SpinConfiguration) -> Radius {
        Radius::Finite(self.reach())
    }

    fn locality(&self) -> Locality {
        Locality::Local(self.reach())
    }
}

/// The ℓ∞-connected component of `site`, or `None` once it exceeds `cap` cells.
fn bounded_component(config: &SpinConfiguration, site: usize, cap: usize) -> Option<Vec<usize>> {
    let mut comp = vec![site];
    let mut head = 0;
    let mut nbrs = Vec::new();
    while head < comp.len() {
        linf_neighbors(config, comp[head], &mut nbrs);
        head += 1;
        for &j in &nbrs {
            if !comp.contains(&j) {
                comp.push(j);
                if comp.len() > cap {
                    return None;
                }
            }
        }
    }
    Some(comp)
}

/// Redelmeier enumeration of the connected `k`-subsets of occupied sites
/// that contain `root`; each set is reported exactly once.
pub(crate) fn enumerate_connected(
    config: &SpinConfiguration,
    root: usize,
    k: usize,
    emit: &mut dyn FnMut(&[usize]),
) {
    if !config.is_occupied(root) || k == 0 {
        return;
    }
    let mut current = vec![root];
    if k == 1 {
        emit(&current);
        return;
    }
    let mut seen = vec![root];
    let mut untried = Vec::new();
    let mut nbrs = Vec::new();
    linf_neighbors(config, root, &mut nbrs);
    for &j in &nbrs {
        seen.push(j);
        untried.push(j);
    }
    redelmeier(config, k, &mut current, untried, &mut seen, emit);
}

fn redelmeier(
    config: &SpinConfiguration,
    k: usize,
    current: &mut Vec<usize>,
    mut untried: Vec<usize>,
    seen: &mut Vec<usize>,
    emit: &mut dyn FnMut(&[usize]),
) {
    let mut nbrs = Vec::new();
    while let Some(v) = untried.pop() {
        current.push(v);
        if current.len() == k {
            emit(current);
        } else {
            let mut next = untried.clone();
            let mark = seen.len();
            linf_neighbors(config, v, &mut nbrs);
            for &u in &nbrs {
                if !seen.contains(&u) {
                    seen.push(u);
                    next.push(u);
                }
            }
            redelmeier(config, k, current, next, seen, emit);
            seen.truncate(mark);
        }
        current.pop();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cayley::GroupKind;
    use crate::scores::total_mass;
    use crate::spin::{sample_iid, SeedPolicy, Window};
    use std::sync::Arc;

    fn cfg(points: &[[i64; 2]]) -> SpinConfiguration {
        let w = Window::for_kind(GroupKind::IntegerLattice(2), 12).unwrap();
        let refs: Vec<&[i64]> = points.iter().map(|p| p.as_slice()).collect();
        SpinConfiguration::from_coords(w, &refs)
    }

    fn block() -> SpinConfiguration {
        cfg(&[[0, 0], [1, 0], [0, 1], [1, 1]])
    }

    #[test]
    fn template_validation() {
        assert!(PatternTemplate::new(vec![vec![0, 0], vec![3, 0]]).is_err());
        assert!(PatternTemplate::new(vec![vec![1, 0], vec![2, 0]]).is_err());
        assert!(PatternTemplate::new(vec![vec![0, 0]; 2]).is_err());
        let seven: Vec<Vec<i64>> = (0..7).map(|i| vec![i, 0]).collect();
        assert!(PatternTemplate::new(seven).is_err());
        let t = PatternTemplate::new(vec![vec![0, 0], vec![1, 1], vec![2, 1]]).unwrap();
        assert_eq!(t.certificate().len(), 2);
    }

    #[test]
    fn single_cell_counts_points() {
        let s = subgraph_count_score(PatternTemplate::single_cell(2));
        let c = block();
        assert_eq!(total_mass(&s, &c).value, 4.0);
    }

    #[test]
    fn adjacent_pair_counts() {
        let s = subgraph_count_score(PatternTemplate::adjacent_pair(2));
        assert_eq!(total_mass(&s, &cfg(&[[0, 0], [1, 0]])).value, 1.0);
        assert!((total_mass(&s, &block()).value - 4.0).abs() < 1e-12);
    }

    #[test]
    fn component_counts() {
        let single = component_count_score(PatternTemplate::single_cell(2));
        assert_eq!(total_mass(&single, &cfg(&[[0, 0], [5, 5]])).value, 2.0);
        let pair = component_count_score(PatternTemplate::adjacent_pair(2));
        assert_eq!(total_mass(&pair, &cfg(&[[0, 0], [1, 0], [-5, 3]])).value, 1.0);
        assert_eq!(total_mass(&pair, &block()).value, 0.0);
    }

    #[test]
    fn diagonal_pair_is_not_an_adjacent_pair() {
        let s = subgraph_count_score(PatternTemplate::adjacent_pair(2));
        assert_eq!(total_mass(&s, &cfg(&[[0, 0], [1, 1]])).value, 0.0);
        let diagonal = PatternTemplate::new(vec![vec![0, 0], vec![1, 1]]).unwrap();
        let d = subgraph_count_score(diagonal);
        assert_eq!(total_mass(&d, &cfg(&[[0, 0], [1, 1]])).value, 1.0);
        assert_eq!(total_mass(&d, &cfg(&[[0, 0], [-1, 1]])).value, 1.0);
        assert!((total_mass(&d, &block()).value - 2.0).abs() < 1e-12);
    }

    #[test]
    fn triangle_vs_path() {
        // All three cells of an L-tromino share a corner; a straight bar is a path.
        let tri = PatternTemplate::new(vec![vec![0, 0], vec![1, 0], vec![0, 1]]).unwrap();
        let path = PatternTemplate::new(vec![vec![0, 0], vec![1, 0], vec![2, 0]]).unwrap();
        let bar = cfg(&[[0, 0], [1, 0], [2, 0]]);
        assert_eq!(total_mass(&subgraph_count_score(tri.clone()), &bar).value, 0.0);
        assert!((total_mass(&subgraph_count_score(path), &bar).value - 1.0).abs() < 1e-12);
        // 2x2 block: 4 triangles.
        assert!((total_mass(&subgraph_count_score(tri), &block()).value - 4.0).abs() < 1e-12);
    }

    /// Brute-force oracle: all k-subsets of the support.
    fn brute_subsets(c: &SpinConfiguration, t: &PatternTemplate) -> usize {
        let supp = c.support();
        let k = t.cells();
        let target = t.pattern();
        let mut count = 0;
        let n = supp.len();
        let mut idx: Vec<usize> = (0..k).collect();
        if n < k {
            return 0;
        }
        loop {
            let pts: Vec<&[i64]> = idx.iter().map(|&i| c.window().site(supp[i]).coords()).collect();
            if FacePattern::of(&pts).isomorphic(&target) {
                count += 1;
            }
            let mut i = k;
            loop {
                if i == 0 {
                    return count;
                }
                i -= 1;
                if idx[i] != i + n - k {
                    break;
                }
                if i == 0 && idx[0] == n - k {
                    return count;
                }
            }
            idx[i] += 1;
            for j in i + 1..k {
                idx[j] = idx[j - 1] + 1;
            }
        }
    }

    #[test]
    fn redelmeier_matches_brute_force() {
        let w = Window::for_kind(GroupKind::IntegerLattice(2), 3).unwrap();
        let templates = [
            PatternTemplate::adjacent_pair(2),
            PatternTemplate::new(vec![vec![0, 0], vec![1, 0], vec![2, 0]]).unwrap(),
            PatternTemplate::new(vec![vec![0, 0], vec![1, 0], vec![0, 1], vec![1, 1]]).unwrap(),
        ];
        let seeds = SeedPolicy::new(99);
        for r in 0..20 {
            let c = sample_iid(&w, 0.45, &mut seeds.stream(r));
            for t in &templates {
                let s = subgraph_count_score(t.clone());
                let h = total_mass(&s, &c).value;
                assert!((h - brute_subsets(&c, t) as f64).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn connected_set_enumeration_counts_polykings() {
        // Fixed polykings containing a given cell: k × (1, 4, 20, 110).
        let w = Window::for_kind(GroupKind::IntegerLattice(2), 6).unwrap();
        let full = SpinConfiguration::full(Arc::clone(&w));
        for (k, fixed) in [(1usize, 1usize), (2, 4), (3, 20), (4, 110)] {
            let mut n = 0;
            enumerate_connected(&full, 0, k, &mut |_| n += 1);
            assert_eq!(n, k * fixed, "k={k}");
        }
    }
}
