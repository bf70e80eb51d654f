//! Cayley graph geometry: group laws, word metric, balls, inner boundaries
//! and growth sequences.
//!
//! Two presentations are supported: the integer lattice `Z^d` with the
//! standard generators `±e_i`, and the discrete Heisenberg group `H_3(Z)`
//! in upper-triangular normal form `(a, b, c)` with generators `a^{±1}`,
//! `b^{±1}`. Edges join `g` and `g∘s` for `s` in the generating set, so the
//! graph distance is `d(g, h) = |g⁻¹∘h|`.

use std::cmp::Ordering;
use std::collections::{HashMap, HashSet};
use std::fmt;
use std::str::FromStr;
use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default cap on the number of sites in a ball.
pub const DEFAULT_SITE_CAP: usize = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum GroupKind {
    IntegerLattice(usize),
    Heisenberg3,
}

impl GroupKind {
    pub fn coordinate_len(&self) -> usize {
        match *self {
            GroupKind::IntegerLattice(d) => d,
            GroupKind::Heisenberg3 => 3,
        }
    }

    /// Lattice dimension, or `None` for non-abelian groups.
    pub fn lattice_dim(&self) -> Option<usize> {
        match *self {
            GroupKind::IntegerLattice(d) => Some(d),
            GroupKind::Heisenberg3 => None,
        }
    }

    pub fn identity(&self) -> GroupPoint {
        GroupPoint(vec![0; self.coordinate_len()])
    }

    /// The symmetric generating set `S`.
    pub fn generators(&self) -> Vec<GroupPoint> {
        match *self {
            GroupKind::IntegerLattice(d) => {
                let mut gens = Vec::with_capacity(2 * d);
                for i in 0..d {
                    for sign in [1, -1] {
                        let mut c = vec![0; d];
                        c[i] = sign;
                        gens.push(GroupPoint(c));
                    }
                }
                gens
            }
            GroupKind::Heisenberg3 => vec![
                GroupPoint(vec![1, 0, 0]),
                GroupPoint(vec![-1, 0, 0]),
                GroupPoint(vec![0, 1, 0]),
                GroupPoint(vec![0, -1, 0]),
            ],
        }
    }

    pub fn check(&self, g: &GroupPoint) -> Result<()> {
        let expected = self.coordinate_len();
        if g.0.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                found: g.0.len(),
            });
        }
        Ok(())
    }

    pub fn compose(&self, g: &GroupPoint, h: &GroupPoint) -> Result<GroupPoint> {
        self.check(g)?;
        self.check(h)?;
        Ok(self.compose_unchecked(g, h))
    }

    pub(crate) fn compose_unchecked(&self, g: &GroupPoint, h: &GroupPoint) -> GroupPoint {
        match self {
            GroupKind::IntegerLattice(_) => {
                GroupPoint(g.0.iter().zip(&h.0).map(|(a, b)| a + b).collect())
            }
            // [[1,a,c],[0,1,b],[0,0,1]] · [[1,a',c'],[0,1,b'],[0,0,1]]
            GroupKind::Heisenberg3 => GroupPoint(vec![
                g.0[0] + h.0[0],
                g.0[1] + h.0[1],
                g.0[2] + h.0[2] + g.0[0] * h.0[1],
            ]),
        }
    }

    pub fn inverse(&self, g: &GroupPoint) -> GroupPoint {
        match self {
            GroupKind::IntegerLattice(_) => GroupPoint(g.0.iter().map(|a| -a).collect()),
            GroupKind::Heisenberg3 => {
                let (a, b, c) = (g.0[0], g.0[1], g.0[2]);
                GroupPoint(vec![-a, -b, a * b - c])
            }
        }
    }

    /// `|B_n|` for the `|S|`-regular tree, which dominates every Cayley ball.
    pub fn tree_ball_size(&self, n: u32) -> f64 {
        let s = self.generators().len() as f64;
        if s <= 2.0 {
            return 2.0 * n as f64 + 1.0;
        }
        1.0 + s * ((s - 1.0).powi(n as i32) - 1.0) / (s - 2.0)
    }
}

impl fmt::Display for GroupKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupKind::IntegerLattice(d) => write!(f, "z{d}"),
            GroupKind::Heisenberg3 => f.write_str("heisenberg3"),
        }
    }
}

impl FromStr for GroupKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.trim().to_ascii_lowercase();
        if lower == "heisenberg3" || lower == "h3" {
            return Ok(GroupKind::Heisenberg3);
        }
        if let Some(rest) = lower.strip_prefix('z') {
            if let Ok(d) = rest.parse::<usize>() {
                if d >= 1 {
                    return Ok(GroupKind::IntegerLattice(d));
                }
            }
        }
        Err(Error::param("graph", format!("unknown graph `{s}` (expected zD or heisenberg3)")))
    }
}

impl TryFrom<String> for GroupKind {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<GroupKind> for String {
    fn from(k: GroupKind) -> String {
        k.to_string()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupPoint(pub Vec<i64>);

impl GroupPoint {
    pub fn new(coords: impl Into<Vec<i64>>) -> Self {
        GroupPoint(coords.into())
    }

    pub fn coords(&self) -> &[i64] {
        &self.0
    }

    pub fn l1(&self) -> u64 {
        self.0.iter().map(|c| c.unsigned_abs()).sum()
    }
}

impl fmt::Display for GroupPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|c| c.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// A graph-distance ball `W_n(center)`.
#[derive(Debug, Clone)]
pub struct Ball {
    pub center: GroupPoint,
    pub radius: u32,
    /// Sorted by distance from the centre, then lexicographically.
    pub members: Vec<GroupPoint>,
    /// `distances[i]` is the graph distance of `members[i]` from the centre.
    pub distances: Vec<u32>,
}

impl Ball {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, g: &GroupPoint) -> bool {
        self.members.contains(g)
    }

    pub fn member_set(&self) -> HashSet<GroupPoint> {
        self.members.iter().cloned().collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GrowthRow {
    pub n: u32,
    pub w_n: usize,
    pub boundary: usize,
    pub ratio: f64,
}

#[derive(Default)]
struct ShellCache {
    dist: HashMap<GroupPoint, u32>,
    shells: Vec<Vec<GroupPoint>>,
}

/// A Cayley graph with a memoized BFS from the identity.
///
/// Shells are only ever appended, so results are immutable once computed
/// and the graph can be shared between threads.
pub struct CayleyGraph {
    kind: GroupKind,
    cap: usize,
    generators: Vec<GroupPoint>,
    cache: Mutex<ShellCache>,
}

impl fmt::Debug for CayleyGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CayleyGraph")
            .field("kind", &self.kind)
            .field("cap", &self.cap)
            .finish()
    }
}

impl CayleyGraph {
    pub fn new(kind: GroupKind) -> Self {
        Self::with_cap(kind, DEFAULT_SITE_CAP)
    }

    pub fn with_cap(kind: GroupKind, cap: usize) -> Self {
        let identity = kind.identity();
        let mut cache = ShellCache::default();
        cache.dist.insert(identity.clone(), 0);
        cache.shells.push(vec![identity]);
        CayleyGraph {
            kind,
            cap,
            generators: kind.generators(),
            cache: Mutex::new(cache),
        }
    }

    pub fn kind(&self) -> GroupKind {
        self.kind
    }

    pub fn site_cap(&self) -> usize {
        self.cap
    }

    pub fn generators(&self) -> &[GroupPoint] {
        &self.generators
    }

    pub fn neighbors(&self, g: &GroupPoint) -> Vec<GroupPoint> {
        self.generators
            .iter()
            .map(|s| self.kind.compose_unchecked(g, s))
            .collect()
    }

    fn expand_to(&self, cache: &mut ShellCache, radius: u32) -> Result<()> {
        if let Some(d) = self.kind.lattice_dim() {
            let size = lattice_ball_size(d, radius);
            if size > self.cap as u128 {
                return Err(Error::ResourceLimit {
                    what: "ball",
                    requested: usize::try_from(size).unwrap_or(usize::MAX),
                    cap: self.cap,
                });
            }
        }
        while cache.shells.len() <= radius as usize {
            let r = cache.shells.len() as u32;
            let mut next = Vec::new();
            for g in &cache.shells[r as usize - 1] {
                for s in &self.generators {
                    let h = self.kind.compose_unchecked(g, s);
                    if !cache.dist.contains_key(&h) {
                        cache.dist.insert(h.clone(), r);
                        next.push(h);
                    }
                }
            }
            if cache.dist.len() > self.cap {
                return Err(Error::ResourceLimit {
                    what: "ball",
                    requested: cache.dist.len(),
                    cap: self.cap,
                });
            }
            next.sort();
            cache.shells.push(next);
        }
        Ok(())
    }

    /// Word length `|g|` with respect to the generating set.
    pub fn norm(&self, g: &GroupPoint) -> Result<u32> {
        self.kind.check(g)?;
        if self.kind.lattice_dim().is_some() {
            return Ok(g.l1() as u32);
        }
        self.bfs_norm(g)
    }

    /// Word length found by BFS, for any kind. Lattice callers normally use
    /// the closed form; this is the oracle it is checked against.
    pub fn bfs_norm(&self, g: &GroupPoint) -> Result<u32> {
        self.kind.check(g)?;
        let mut cache = self.cache.lock().expect("shell cache poisoned");
        loop {
            if let Some(&d) = cache.dist.get(g) {
                return Ok(d);
            }
            let next = cache.shells.len() as u32;
            self.expand_to(&mut cache, next)?;
        }
    }

    pub fn distance(&self, g: &GroupPoint, h: &GroupPoint) -> Result<u32> {
        self.kind.check(g)?;
        self.kind.check(h)?;
        let delta = self.kind.compose_unchecked(&self.kind.inverse(g), h);
        self.norm(&delta)
    }

    /// Shells `0..=radius` of the BFS from the identity.
    pub fn shells(&self, radius: u32) -> Result<Vec<Vec<GroupPoint>>> {
        let mut cache = self.cache.lock().expect("shell cache poisoned");
        self.expand_to(&mut cache, radius)?;
        Ok(cache.shells[..=radius as usize].to_vec())
    }

    /// Number of sites at distance exactly `r`, for each `r <= radius`.
    pub fn shell_sizes(&self, radius: u32) -> Result<Vec<usize>> {
        let mut cache = self.cache.lock().expect("shell cache poisoned");
        self.expand_to(&mut cache, radius)?;
        Ok(cache.shells[..=radius as usize].iter().map(Vec::len).collect())
    }

    pub fn ball(&self, center: &GroupPoint, n: u32) -> Result<Ball> {
        self.kind.check(center)?;
        let shells = self.shells(n)?;
        let mut members = Vec::new();
        let mut distances = Vec::new();
        for (r, shell) in shells.iter().enumerate() {
            let mut translated: Vec<GroupPoint> = shell
                .iter()
                .map(|x| self.kind.compose_unchecked(center, x))
                .collect();
            translated.sort();
            distances.extend(std::iter::repeat_n(r as u32, translated.len()));
            members.extend(translated);
        }
        Ok(Ball {
            center: center.clone(),
            radius: n,
            members,
            distances,
        })
    }

    /// The total order `≺`: word norm first, then lexicographic coordinates.
    pub fn order_cmp(&self, u: &GroupPoint, v: &GroupPoint) -> Result<Ordering> {
        let nu = self.norm(u)?;
        let nv = self.norm(v)?;
        Ok(nu.cmp(&nv).then_with(|| u.cmp(v)))
    }

    /// `{x ∈ A : some neighbour of x lies outside A}`.
    pub fn inner_boundary(&self, set: &[GroupPoint]) -> Vec<GroupPoint> {
        let lookup: HashSet<&GroupPoint> = set.iter().collect();
        let mut out: Vec<GroupPoint> = set
            .iter()
            .filter(|x| {
                self.generators
                    .iter()
                    .any(|s| !lookup.contains(&self.kind.compose_unchecked(x, s)))
            })
            .cloned()
            .collect();
        out.sort();
        out.dedup();
        out
    }

    /// Rows `(n, w_n, |∂W_n|, |∂W_n|/w_n)` for `0 <= n <= n_max`, with the
    /// growth bounds `n <= w_n <= |B^tree_n|` checked for every `n >= 1`.
    pub fn growth_report(&self, n_max: u32) -> Result<Vec<GrowthRow>> {
        let mut cache = self.cache.lock().expect("shell cache poisoned");
        self.expand_to(&mut cache, n_max + 1)?;
        let mut rows = Vec::with_capacity(n_max as usize + 1);
        let mut w = 0usize;
        for n in 0..=n_max {
            w += cache.shells[n as usize].len();
            // Only the outer shell of W_n can have neighbours outside it.
            let boundary = cache.shells[n as usize]
                .iter()
                .filter(|g| {
                    self.generators.iter().any(|s| {
                        let h = self.kind.compose_unchecked(g, s);
                        cache.dist.get(&h).is_some_and(|&d| d > n)
                    })
                })
                .count();
            if n >= 1 {
                let lower = n as f64;
                let upper = self.kind.tree_ball_size(n);
                if (w as f64) < lower || (w as f64) > upper {
                    return Err(Error::GrowthBound {
                        n,
                        w_n: w,
                        lower,
                        upper,
                    });
                }
            }
            rows.push(GrowthRow {
                n,
                w_n: w,
                boundary,
                ratio: boundary as f64 / w as f64,
            });
        }
        Ok(rows)
    }
}

/// Growth report rendered as CSV with header `n,w_n,boundary,ratio`.
/// `|W_n|` in `Z^d`: `Σ_k 2^k C(d, k) C(n, k)`, saturating.
fn lattice_ball_size(d: usize, n: u32) -> u128 {
    let mut total: u128 = 0;
    let mut c_d: u128 = 1;
    let mut c_n: u128 = 1;
    for k in 0..=d.min(n as usize) as u128 {
        if k > 0 {
            c_d = c_d * (d as u128 - k + 1) / k;
            c_n = c_n.saturating_mul(n as u128 - k + 1) / k;
        }
        total = total.saturating_add(c_d.saturating_mul(c_n).saturating_mul(1u128 << k.min(100)));
    }
    total
}

pub fn growth_csv(rows: &[GrowthRow]) -> String {
    let mut out = String::from("n,w_n,boundary,ratio\n");
    for r in rows {
        out.push_str(&format!("{},{},{},{}\n", r.n, r.w_n, r.boundary, r.ratio));
    }
    out
}
