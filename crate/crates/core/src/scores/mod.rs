//! Score functions `ξ(x, μ)`, their stabilization radii, and total masses
//! `H^ξ(P_n) = Σ_{x ∈ P_n} ξ(x, P_n)`.
//!
//! Scores are evaluated on the window-truncated configuration: sites
//! outside the window always read as empty.

mod intrinsic;
mod lattice;
mod nn;
mod spec;
mod subgraph;
mod tail;

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::spin::SpinConfiguration;

pub use intrinsic::{intrinsic_volume_scores, IntrinsicVolumeScore};
pub use nn::{nn_distance_score, NearestNeighbourScore};
pub use spec::ScoreSpec;
pub use subgraph::{component_count_score, subgraph_count_score, ComponentCountScore, PatternTemplate, SubgraphCountScore};
pub use tail::{empirical_radius_tail, TailEstimate};

pub(crate) use lattice::{for_each_sphere_offset, linf_neighbors};

/// Radius of stabilization `R(x, μ)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum Radius {
    Finite(u32),
    Unbounded,
}

impl Radius {
    pub fn at_most(&self, t: u32) -> bool {
        matches!(*self, Radius::Finite(r) if r <= t)
    }

    pub fn finite(&self) -> Option<u32> {
        match *self {
            Radius::Finite(r) => Some(r),
            Radius::Unbounded => None,
        }
    }
}

impl fmt::Display for Radius {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Radius::Finite(r) => write!(f, "{r}"),
            Radius::Unbounded => f.write_str("inf"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Locality {
    /// `ξ(x, ·)` depends only on `μ ∩ W_r(x)`.
    Local(u32),
    QuasiLocal,
}

/// Declared polynomial growth `|ξ(x, μ ∩ W_t(x))| <= c_* t^κ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GrowthBound {
    pub c_star: f64,
    pub kappa: f64,
}

pub trait ScoreFunction: Send + Sync {
    fn name(&self) -> String;

    /// `ξ(x, μ)` for window site `site`. Must be 0 when the site is empty.
    fn evaluate(&self, site: usize, config: &SpinConfiguration) -> f64;

    fn stabilization_radius(&self, site: usize, config: &SpinConfiguration) -> Radius;

    fn locality(&self) -> Locality;

    fn growth(&self) -> Option<GrowthBound> {
        None
    }

    /// Values and radii for every site of the window (empty sites give 0).
    fn evaluate_all(&self, config: &SpinConfiguration) -> Vec<(f64, Radius)> {
        (0..config.len())
            .map(|i| {
                if config.is_occupied(i) {
                    (self.evaluate(i, config), self.stabilization_radius(i, config))
                } else {
                    (0.0, Radius::Finite(0))
                }
            })
            .collect()
    }
}

impl fmt::Debug for dyn ScoreFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ScoreFunction({})", self.name())
    }
}

/// `ξ ≡ c` on occupied sites.
#[derive(Debug, Clone, Copy)]
pub struct ConstantScore {
    pub value: f64,
}

impl ScoreFunction for ConstantScore {
    fn name(&self) -> String {
        format!("constant({})", self.value)
    }

    fn evaluate(&self, site: usize, config: &SpinConfiguration) -> f64 {
        if config.is_occupied(site) {
            self.value
        } else {
            0.0
        }
    }

    fn stabilization_radius(&self, _site: usize, _config: &SpinConfiguration) -> Radius {
        Radius::Finite(0)
    }

    fn locality(&self) -> Locality {
        Locality::Local(0)
    }
}

/// `ξ̃(x, μ) = ξ(x, μ) 1[R(x, μ) <= t]`.
pub struct TruncatedScore {
    inner: Arc<dyn ScoreFunction>,
    t: u32,
}

pub fn truncate_to_local(score: Arc<dyn ScoreFunction>, t: u32) -> TruncatedScore {
    TruncatedScore { inner: score, t }
}

impl ScoreFunction for TruncatedScore {
    fn name(&self) -> String {
        format!("truncated({},t={})", self.inner.name(), self.t)
    }

    fn evaluate(&self, site: usize, config: &SpinConfiguration) -> f64 {
        if self.inner.stabilization_radius(site, config).at_most(self.t) {
            self.inner.evaluate(site, config)
        } else {
            0.0
        }
    }

    fn stabilization_radius(&self, site: usize, config: &SpinConfiguration) -> Radius {
        match self.inner.stabilization_radius(site, config) {
            Radius::Finite(r) if r <= self.t => Radius::Finite(r),
            _ => Radius::Finite(self.t),
        }
    }

    fn locality(&self) -> Locality {
        Locality::Local(self.t)
    }

    fn evaluate_all(&self, config: &SpinConfiguration) -> Vec<(f64, Radius)> {
        self.inner
            .evaluate_all(config)
            .into_iter()
            .map(|(v, r)| match r {
                Radius::Finite(r) if r <= self.t => (v, Radius::Finite(r)),
                _ => (0.0, Radius::Finite(self.t)),
            })
            .collect()
    }
}

/// Restricts a score to the open half-space `x_1 > 0` (or `x_1 < 0`).
/// Scores on opposite half-spaces have disjoint supports by construction.
pub struct HalfSpaceScore {
    inner: Arc<dyn ScoreFunction>,
    positive: bool,
}

impl HalfSpaceScore {
    pub fn new(inner: Arc<dyn ScoreFunction>, positive: bool) -> Self {
        HalfSpaceScore { inner, positive }
    }

    fn keeps(&self, site: usize, config: &SpinConfiguration) -> bool {
        let x1 = config.window().site(site).coords()[0];
        if self.positive {
            x1 > 0
        } else {
            x1 < 0
        }
    }
}

impl ScoreFunction for HalfSpaceScore {
    fn name(&self) -> String {
        format!("{}[x1{}0]", self.inner.name(), if self.positive { ">" } else { "<" })
    }

    fn evaluate(&self, site: usize, config: &SpinConfiguration) -> f64 {
        if self.keeps(site, config) {
            self.inner.evaluate(site, config)
        } else {
            0.0
        }
    }

    fn stabilization_radius(&self, site: usize, config: &SpinConfiguration) -> Radius {
        if self.keeps(site, config) {
            self.inner.stabilization_radius(site, config)
        } else {
            Radius::Finite(0)
        }
    }

    fn locality(&self) -> Locality {
        self.inner.locality()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TotalMassResult {
    pub value: f64,
    pub contributions: Option<Vec<f64>>,
    /// Occupied sites whose stabilization ball leaves the window.
    pub truncated_sites: usize,
}

/// `H^ξ(μ)`, summed in site order.
pub fn total_mass(score: &dyn ScoreFunction, config: &SpinConfiguration) -> TotalMassResult {
    total_mass_with(score, config, false)
}

pub fn total_mass_with(score: &dyn ScoreFunction, config: &SpinConfiguration, keep: bool) -> TotalMassResult {
    let window = config.window();
    let n = window.radius();
    let all = score.evaluate_all(config);
    let mut value = 0.0;
    let mut truncated_sites = 0;
    for (i, &(v, r)) in all.iter().enumerate() {
        if !config.is_occupied(i) {
            continue;
        }
        value += v;
        let leaves = match r {
            Radius::Finite(r) => window.norm(i) + r > n,
            Radius::Unbounded => true,
        };
        if leaves {
            truncated_sites += 1;
        }
    }
    TotalMassResult {
        value,
        contributions: keep.then(|| all.iter().map(|&(v, _)| v).collect()),
        truncated_sites,
    }
}

/// Per-site dump as CSV `x,y,...,value,radius` over occupied sites.
pub fn site_contributions_csv(score: &dyn ScoreFunction, config: &SpinConfiguration) -> String {
    let window = config.window();
    let names: Vec<&str> = match window.kind().lattice_dim() {
        Some(1) => vec!["x"],
        Some(2) => vec!["x", "y"],
        Some(3) => vec!["x", "y", "z"],
        Some(d) => (0..d).map(|_| "x").collect(),
        None => vec!["a", "b", "c"],
    };
    let header: Vec<String> = if names.iter().all(|n| *n == "x") && names.len() > 1 {
        (1..=names.len()).map(|i| format!("x{i}")).collect()
    } else {
        names.iter().map(|s| s.to_string()).collect()
    };
    let mut out = format!("{},value,radius\n", header.join(","));
    for (i, (v, r)) in score.evaluate_all(config).into_iter().enumerate() {
        if !config.is_occupied(i) {
            continue;
        }
        let coords: Vec<String> = window.site(i).coords().iter().map(|c| c.to_string()).collect();
        out.push_str(&format!("{},{},{}\n", coords.join(","), v, r));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cayley::GroupKind;
    use crate::spin::Window;

    #[test]
    fn constant_score_counts_support() {
        let w = Window::for_kind(GroupKind::IntegerLattice(2), 3).unwrap();
        let c = SpinConfiguration::from_sites(w.clone(), [0, 3, 7, 11]);
        let one = ConstantScore { value: 1.0 };
        assert_eq!(total_mass(&one, &c).value, 4.0);
        assert_eq!(total_mass(&one, &SpinConfiguration::empty(w)).value, 0.0);
    }

    #[test]
    fn truncation_of_local_score_is_identity() {
        let w = Window::for_kind(GroupKind::IntegerLattice(2), 3).unwrap();
        let c = SpinConfiguration::from_sites(w.clone(), [0, 1, 2, 9]);
        let inner: Arc<dyn ScoreFunction> = Arc::new(intrinsic::IntrinsicVolumeScore::new(1).unwrap());
        let t = truncate_to_local(inner.clone(), 3);
        for i in 0..w.len() {
            assert_eq!(t.evaluate(i, &c), inner.evaluate(i, &c));
        }
    }

    #[test]
    fn contributions_csv_shape() {
        let w = Window::for_kind(GroupKind::IntegerLattice(2), 1).unwrap();
        let c = SpinConfiguration::from_sites(w, [0]);
        let csv = site_contributions_csv(&ConstantScore { value: 2.0 }, &c);
        assert_eq!(csv, "x,y,value,radius\n0,0,2,0\n");
    }
}
