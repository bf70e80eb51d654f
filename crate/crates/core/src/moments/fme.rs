//! Factorial moment expansion kernels and exact verification of the
//! expansion for i.i.d. models by exhaustive enumeration.
//!
//! Window sites are indexed in `≺` order (norm, then lexicographic), so the
//! `≺`-truncation `μ_{|x}` keeps exactly the sites with smaller index.

use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use super::correlation::MixedMomentSpec;
use crate::error::{Error, Result};
use crate::scores::{
    component_count_score, subgraph_count_score, total_mass, PatternTemplate, ScoreFunction,
};
use crate::spin::{SpinConfiguration, Window};

/// Largest window the exhaustive `2^w` enumeration accepts.
pub const MAX_ENUMERATION_SITES: usize = 20;

/// A functional `ψ` of finite configurations on a window.
pub type Functional<'a> = dyn Fn(&SpinConfiguration) -> f64 + Sync + 'a;

/// The catalog of functionals checked against the expansion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FmeFunctional {
    /// `1[μ = o]`.
    EmptyIndicator,
    /// `|μ|`.
    Occupancy,
    /// Number of adjacent (ℓ∞) pairs.
    PairSubgraph,
    /// Number of components that are adjacent pairs.
    PairComponent,
}

impl FmeFunctional {
    pub const CATALOG: [FmeFunctional; 4] = [
        FmeFunctional::EmptyIndicator,
        FmeFunctional::Occupancy,
        FmeFunctional::PairSubgraph,
        FmeFunctional::PairComponent,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            FmeFunctional::EmptyIndicator => "empty_indicator",
            FmeFunctional::Occupancy => "occupancy",
            FmeFunctional::PairSubgraph => "pair_subgraph",
            FmeFunctional::PairComponent => "pair_component",
        }
    }

    /// The functional as a closure on configurations of `window`.
    pub fn functional(&self, window: &Window) -> Result<Box<Functional<'static>>> {
        Ok(match self {
            FmeFunctional::EmptyIndicator => Box::new(|c: &SpinConfiguration| (c.count() == 0) as u8 as f64),
            FmeFunctional::Occupancy => Box::new(|c: &SpinConfiguration| c.count() as f64),
            FmeFunctional::PairSubgraph => {
                let d = window.require_lattice("pair subgraph functional")?;
                let s = subgraph_count_score(PatternTemplate::adjacent_pair(d));
                Box::new(move |c: &SpinConfiguration| total_mass(&s, c).value)
            }
            FmeFunctional::PairComponent => {
                let d = window.require_lattice("pair component functional")?;
                let s = component_count_score(PatternTemplate::adjacent_pair(d));
                Box::new(move |c: &SpinConfiguration| total_mass(&s, c).value)
            }
        })
    }
}

impl std::str::FromStr for FmeFunctional {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        FmeFunctional::CATALOG
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::param("functional", format!("unknown functional `{s}`")))
    }
}

/// `ψ(μ) = Π_j ξ(x_j, μ)^{k_j}`.
pub fn mixed_moment_functional<'a>(score: &'a dyn ScoreFunction, spec: &'a MixedMomentSpec) -> Box<Functional<'a>> {
    Box::new(move |c: &SpinConfiguration| {
        spec.sites
            .iter()
            .zip(&spec.powers)
            .map(|(&x, &k)| score.evaluate(x, c).powi(k as i32))
            .product()
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FmeKernelValue {
    pub order: usize,
    pub sites: Vec<usize>,
    pub value: f64,
}

/// `D^l ψ(μ)(y_1..y_l) = Σ_{J ⊆ [l]} (-1)^{l-|J|} ψ(μ_{|x*} + Σ_{j∈J} δ_{y_j})`
/// with `x*` the `≺`-smallest `y_j`. For `l = 0` this is `ψ(o)`.
pub fn fme_kernel(psi: &Functional<'_>, sites: &[usize], base: &SpinConfiguration) -> Result<FmeKernelValue> {
    let window = base.window();
    let mut sorted = sites.to_vec();
    sorted.sort_unstable();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::DuplicatePoints("kernel sites"));
    }
    if sites.iter().any(|&y| y >= window.len()) {
        return Err(Error::OutsideWindow);
    }
    let l = sites.len();
    if l > MAX_ENUMERATION_SITES {
        return Err(Error::ResourceLimit {
            what: "kernel order",
            requested: l,
            cap: MAX_ENUMERATION_SITES,
        });
    }
    let empty = SpinConfiguration::empty(Arc::clone(window));
    if l == 0 {
        return Ok(FmeKernelValue {
            order: 0,
            sites: Vec::new(),
            value: psi(&empty),
        });
    }
    let x_star = sorted[0];
    let truncated: Vec<bool> = (0..window.len()).map(|i| i < x_star && base.is_occupied(i)).collect();
    let mut value = 0.0;
    for j in 0u64..(1 << l) {
        let mut bits = truncated.clone();
        for (slot, &y) in sites.iter().enumerate() {
            if j >> slot & 1 == 1 {
                bits[y] = true;
            }
        }
        let sign = if (l - j.count_ones() as usize).is_multiple_of(2) { 1.0 } else { -1.0 };
        value += sign * psi(&SpinConfiguration::from_bits(Arc::clone(window), bits));
    }
    Ok(FmeKernelValue {
        order: l,
        sites: sites.to_vec(),
        value,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FmeCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub diff: f64,
    /// `Σ_{|A| = l} D^A p^l` for `l = 0..=w`: the series term by order.
    pub terms: Vec<f64>,
}

fn check_enumerable(window: &Window, p: f64) -> Result<usize> {
    let w = window.len();
    if w > MAX_ENUMERATION_SITES {
        return Err(Error::ResourceLimit {
            what: "exhaustive enumeration sites",
            requested: w,
            cap: MAX_ENUMERATION_SITES,
        });
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::param("p", "must lie in [0, 1]"));
    }
    Ok(w)
}

/// `ψ` on every configuration of the window, indexed by occupancy mask.
fn tabulate(psi: &Functional<'_>, window: &Arc<Window>, sites: &[usize], fixed: &[usize]) -> Vec<f64> {
    let m = sites.len();
    (0u64..(1 << m))
        .into_par_iter()
        .map(|mask| {
            let mut bits = vec![false; window.len()];
            for &x in fixed {
                bits[x] = true;
            }
            for (k, &s) in sites.iter().enumerate() {
                if mask >> k & 1 == 1 {
                    bits[s] = true;
                }
            }
            psi(&SpinConfiguration::from_bits(Arc::clone(window), bits))
        })
        .collect()
}

/// In-place Möbius transform: `f[A] <- Σ_{B ⊆ A} (-1)^{|A \ B|} f[B]`.
fn mobius(f: &mut [f64], m: usize) {
    for bit in 0..m {
        for mask in 0..f.len() {
            if mask >> bit & 1 == 1 {
                f[mask] -= f[mask ^ (1 << bit)];
            }
        }
    }
}

fn series(kernels: &[f64], m: usize, p: f64, prefactor: f64) -> (f64, Vec<f64>) {
    let mut terms = vec![0.0; m + 1];
    for (mask, &d) in kernels.iter().enumerate() {
        let l = mask.count_ones() as usize;
        terms[l] += d * p.powi(l as i32);
    }
    let terms: Vec<f64> = terms.into_iter().map(|t| t * prefactor).collect();
    (terms.iter().sum(), terms)
}

fn exhaustive(table: &[f64], m: usize, p: f64, prefactor: f64) -> f64 {
    let weights: Vec<f64> = (0..=m).map(|k| p.powi(k as i32) * (1.0 - p).powi((m - k) as i32)).collect();
    table
        .iter()
        .enumerate()
        .map(|(mask, &v)| v * weights[mask.count_ones() as usize])
        .sum::<f64>()
        * prefactor
}

/// `E[ψ(P)]` for i.i.d.(p) by summing over all `2^w` configurations,
/// against `Σ_{A ⊆ W} D^A ψ(o) p^{|A|}`, the expansion at base `o` with
/// the `1/l!` over ordered tuples folded into unordered sets.
pub fn fme_expansion_check(psi: &Functional<'_>, window: &Arc<Window>, p: f64) -> Result<FmeCheck> {
    let w = check_enumerable(window, p)?;
    let sites: Vec<usize> = (0..w).collect();
    let mut table = tabulate(psi, window, &sites, &[]);
    let lhs = exhaustive(&table, w, p, 1.0);
    mobius(&mut table, w);
    let (rhs, terms) = series(&table, w, p, 1.0);
    Ok(FmeCheck {
        lhs,
        rhs,
        diff: (lhs - rhs).abs(),
        terms,
    })
}

/// The `ψ!` form for a functional that vanishes unless every site of `x`
/// is occupied: `E[ψ(P)] = p^{|X|} Σ_{A ⊆ W \ X} D^A ψ!(o) p^{|A|}` with
/// `ψ!(μ) = ψ(μ + Σ_j δ_{x_j})`.
pub fn fme_psi_check(psi: &Functional<'_>, window: &Arc<Window>, p: f64, x: &[usize]) -> Result<FmeCheck> {
    let w = check_enumerable(window, p)?;
    let mut sorted = x.to_vec();
    sorted.sort_unstable();
    if sorted.windows(2).any(|s| s[0] == s[1]) {
        return Err(Error::DuplicatePoints("ψ! sites"));
    }
    if x.iter().any(|&i| i >= w) {
        return Err(Error::OutsideWindow);
    }
    let all: Vec<usize> = (0..w).collect();
    let lhs = exhaustive(&tabulate(psi, window, &all, &[]), w, p, 1.0);
    let rest: Vec<usize> = (0..w).filter(|i| !x.contains(i)).collect();
    let mut shifted = tabulate(psi, window, &rest, x);
    mobius(&mut shifted, rest.len());
    let (rhs, terms) = series(&shifted, rest.len(), p, p.powi(x.len() as i32));
    Ok(FmeCheck {
        lhs,
        rhs,
        diff: (lhs - rhs).abs(),
        terms,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cayley::GroupKind;
    use crate::scores::ConstantScore;

    fn z2(n: u32) -> Arc<Window> {
        Window::for_kind(GroupKind::IntegerLattice(2), n).unwrap()
    }

    #[test]
    fn kernel_goldens() {
        let w = z2(1);
        let o = SpinConfiguration::empty(Arc::clone(&w));
        let count = |c: &SpinConfiguration| c.count() as f64;
        let constant = |_: &SpinConfiguration| 3.0;
        assert_eq!(fme_kernel(&count, &[], &o).unwrap().value, 0.0);
        assert_eq!(fme_kernel(&constant, &[], &o).unwrap().value, 3.0);
        assert_eq!(fme_kernel(&constant, &[2], &o).unwrap().value, 0.0);
        assert_eq!(fme_kernel(&count, &[1, 3], &o).unwrap().value, 0.0);
        assert_eq!(fme_kernel(&count, &[1], &o).unwrap().value, 1.0);
        assert!(fme_kernel(&count, &[1, 1], &o).is_err());
    }

    #[test]
    fn empty_indicator_series() {
        let w = z2(1);
        let f = FmeFunctional::EmptyIndicator.functional(&w).unwrap();
        let c = fme_expansion_check(&*f, &w, 0.5).unwrap();
        assert!((c.lhs - 0.5f64.powi(5)).abs() < 1e-15);
        assert!(c.diff < 1e-12);
    }

    #[test]
    fn occupancy_series_truncates_after_first_order() {
        let w = z2(1);
        let f = FmeFunctional::Occupancy.functional(&w).unwrap();
        let c = fme_expansion_check(&*f, &w, 0.25).unwrap();
        assert_eq!(c.lhs, 1.25);
        assert!(c.terms[2..].iter().all(|&t| t == 0.0));
    }

    #[test]
    fn psi_shriek_form() {
        let w = z2(1);
        let one = ConstantScore { value: 1.0 };
        let spec = MixedMomentSpec::new(vec![0, 2], vec![1, 2]).unwrap();
        let f = mixed_moment_functional(&one, &spec);
        let c = fme_psi_check(&*f, &w, 0.5, &spec.sites).unwrap();
        assert!((c.lhs - 0.25).abs() < 1e-15);
        assert!(c.diff < 1e-12);
    }

    #[test]
    fn rejects_large_windows() {
        let w = z2(3);
        assert!(fme_expansion_check(&|_: &SpinConfiguration| 0.0, &w, 0.5).is_err());
    }
}
