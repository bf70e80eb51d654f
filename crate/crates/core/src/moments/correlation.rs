//! Monte Carlo correlation functions, clustering gaps, mixed moments and
//! void probabilities over a sample of replicate configurations.

use std::collections::HashMap;

use rand_distr::{Binomial, Distribution};
use serde::Serialize;

use super::cumulants::{ursell_from_subset_moments, BOOTSTRAP_RESAMPLES};
use crate::error::{Error, Result};
use crate::scores::ScoreFunction;
use crate::spin::{SeedPolicy, SpinConfiguration, Window};

fn check_distinct(points: &[usize], what: &'static str) -> Result<()> {
    let mut sorted = points.to_vec();
    sorted.sort_unstable();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::DuplicatePoints(what));
    }
    Ok(())
}

fn check_in_window(points: &[usize], replicates: &[SpinConfiguration]) -> Result<()> {
    let w = replicates.first().map_or(0, |c| c.len());
    if points.iter().any(|&i| i >= w) {
        return Err(Error::OutsideWindow);
    }
    Ok(())
}

fn all_occupied(config: &SpinConfiguration, points: &[usize]) -> bool {
    points.iter().all(|&i| config.is_occupied(i))
}

fn mean_se(sum: f64, sum_sq: f64, n: usize) -> (f64, f64) {
    let nf = n as f64;
    let mean = sum / nf;
    if n < 2 {
        return (mean, f64::NAN);
    }
    let var = ((sum_sq - nf * mean * mean) / (nf - 1.0)).max(0.0);
    (mean, (var / nf).sqrt())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorrelationEstimate {
    pub points: Vec<usize>,
    pub k: usize,
    pub estimate: f64,
    pub se: f64,
    pub replicates: usize,
}

/// `ρ̂^(k)(x_1, …, x_k)`: fraction of replicates with every point occupied.
pub fn estimate_correlation(replicates: &[SpinConfiguration], points: &[usize]) -> Result<CorrelationEstimate> {
    check_distinct(points, "correlation points")?;
    check_in_window(points, replicates)?;
    if replicates.is_empty() {
        return Err(Error::TooFewReplicates { needed: 1, got: 0 });
    }
    let r = replicates.len();
    let hits = replicates.iter().filter(|c| all_occupied(c, points)).count();
    let p = hits as f64 / r as f64;
    Ok(CorrelationEstimate {
        points: points.to_vec(),
        k: points.len(),
        estimate: p,
        se: (p * (1.0 - p) / r as f64).sqrt(),
        replicates: r,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClusteringGap {
    /// `ρ̂(P ∪ Q) - ρ̂(P) ρ̂(Q)`.
    pub signed: f64,
    /// `|signed|`.
    pub gap: f64,
    pub se: f64,
    /// Smallest graph distance between the two sets.
    pub separation: u32,
}

/// Clustering gap with a multinomial bootstrap SE over the four joint
/// outcomes of (all of `P` occupied, all of `Q` occupied).
pub fn clustering_gap(
    replicates: &[SpinConfiguration],
    p_set: &[usize],
    q_set: &[usize],
    seeds: &SeedPolicy,
) -> Result<ClusteringGap> {
    check_distinct(p_set, "P")?;
    check_distinct(q_set, "Q")?;
    if p_set.iter().any(|x| q_set.contains(x)) {
        return Err(Error::Overlap);
    }
    if p_set.is_empty() || q_set.is_empty() {
        return Err(Error::param("sets", "P and Q must be non-empty"));
    }
    check_in_window(p_set, replicates)?;
    check_in_window(q_set, replicates)?;
    if replicates.len() < 2 {
        return Err(Error::TooFewReplicates {
            needed: 2,
            got: replicates.len(),
        });
    }
    let window = replicates[0].window();
    let mut separation = u32::MAX;
    for &x in p_set {
        for &y in q_set {
            separation = separation.min(window.distance(x, y)?);
        }
    }
    // counts[a + 2b]
    let mut counts = [0u64; 4];
    for c in replicates {
        let a = all_occupied(c, p_set) as usize;
        let b = all_occupied(c, q_set) as usize;
        counts[a + 2 * b] += 1;
    }
    let r = replicates.len() as u64;
    let gap_of = |c: &[u64; 4]| {
        let rf = r as f64;
        let both = c[3] as f64 / rf;
        let pa = (c[1] + c[3]) as f64 / rf;
        let pb = (c[2] + c[3]) as f64 / rf;
        both - pa * pb
    };
    let signed = gap_of(&counts);
    let probs: Vec<f64> = counts.iter().map(|&c| c as f64 / r as f64).collect();
    let mut rng = seeds.auxiliary(0x6A9);
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    for _ in 0..BOOTSTRAP_RESAMPLES {
        // Sequential conditional binomials draw one multinomial sample.
        let mut left = r;
        let mut mass = 1.0;
        let mut draw = [0u64; 4];
        for k in 0..3 {
            if left == 0 || mass <= 0.0 {
                break;
            }
            let q = (probs[k] / mass).clamp(0.0, 1.0);
            let x = Binomial::new(left, q).expect("valid binomial").sample(&mut rng);
            draw[k] = x;
            left -= x;
            mass -= probs[k];
        }
        draw[3] = left;
        let g = gap_of(&draw);
        sum += g;
        sum_sq += g * g;
    }
    let b = BOOTSTRAP_RESAMPLES as f64;
    let se = ((sum_sq - sum * sum / b) / (b - 1.0)).max(0.0).sqrt();
    Ok(ClusteringGap {
        signed,
        gap: signed.abs(),
        se,
        separation,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PooledGap {
    pub distance: u32,
    pub signed: f64,
    pub gap: f64,
    pub se: f64,
    pub pairs: usize,
}

/// Singleton clustering gaps pooled over all site pairs `(x, y)` at graph
/// distance `s` with both sites inside `W_{inner}`. Under stationarity each
/// pair estimates the same gap; the SE uses batch means over contiguous
/// replicate blocks.
pub fn pooled_pair_gaps(
    replicates: &[SpinConfiguration],
    distances: &[u32],
    inner: u32,
    batches: usize,
) -> Result<Vec<PooledGap>> {
    let r = replicates.len();
    if batches < 2 || r < 2 * batches {
        return Err(Error::TooFewReplicates {
            needed: 2 * batches.max(2),
            got: r,
        });
    }
    let window = replicates[0].window();
    if inner > window.radius() {
        return Err(Error::param("inner", "must not exceed the window radius"));
    }
    let dist = window.distance_matrix()?;
    let w = window.len();
    let sites: Vec<usize> = (0..w).filter(|&i| window.norm(i) <= inner).collect();
    let bits: Vec<Vec<f64>> = replicates
        .iter()
        .map(|c| c.bits().iter().map(|&b| b as u8 as f64).collect())
        .collect();

    let gap_over = |range: std::ops::Range<usize>, pairs: &[(usize, usize)]| {
        let m = range.len() as f64;
        let mut marg = vec![0.0; w];
        for c in &bits[range.clone()] {
            for &i in &sites {
                marg[i] += c[i];
            }
        }
        let mut joint = 0.0;
        for c in &bits[range] {
            for &(x, y) in pairs {
                joint += c[x] * c[y];
            }
        }
        let np = pairs.len() as f64;
        let product: f64 = pairs.iter().map(|&(x, y)| marg[x] * marg[y]).sum::<f64>() / (m * m);
        joint / (m * np) - product / np
    };

    let mut out = Vec::with_capacity(distances.len());
    for &s in distances {
        let pairs: Vec<(usize, usize)> = sites
            .iter()
            .flat_map(|&x| sites.iter().filter(move |&&y| y > x).map(move |&y| (x, y)))
            .filter(|&(x, y)| dist[x * w + y] == s)
            .collect();
        if pairs.is_empty() {
            return Err(Error::param("distances", format!("no pairs at distance {s} inside W_{inner}")));
        }
        let signed = gap_over(0..r, &pairs);
        let size = r / batches;
        let batch_gaps: Vec<f64> = (0..batches).map(|b| gap_over(b * size..(b + 1) * size, &pairs)).collect();
        let mean = batch_gaps.iter().sum::<f64>() / batches as f64;
        let var = batch_gaps.iter().map(|g| (g - mean).powi(2)).sum::<f64>() / (batches as f64 - 1.0);
        out.push(PooledGap {
            distance: s,
            signed,
            gap: signed.abs(),
            se: (var / batches as f64).sqrt(),
            pairs: pairs.len(),
        });
    }
    Ok(out)
}

/// Distinct sites `x_1..x_p` with powers `k_1..k_p >= 1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct MixedMomentSpec {
    pub sites: Vec<usize>,
    pub powers: Vec<u32>,
}

impl MixedMomentSpec {
    pub fn new(sites: Vec<usize>, powers: Vec<u32>) -> Result<Self> {
        if sites.len() != powers.len() {
            return Err(Error::DimensionMismatch {
                expected: sites.len(),
                found: powers.len(),
            });
        }
        if sites.is_empty() {
            return Err(Error::param("sites", "need at least one site"));
        }
        check_distinct(&sites, "mixed moment sites")?;
        if powers.contains(&0) {
            return Err(Error::param("powers", "powers must be >= 1"));
        }
        // Canonical order: by site index.
        let mut pairs: Vec<(usize, u32)> = sites.into_iter().zip(powers).collect();
        pairs.sort_unstable();
        Ok(MixedMomentSpec {
            sites: pairs.iter().map(|p| p.0).collect(),
            powers: pairs.iter().map(|p| p.1).collect(),
        })
    }

    fn sub_spec(&self, mask: usize) -> MixedMomentSpec {
        let (sites, powers) = (0..self.sites.len())
            .filter(|i| mask >> i & 1 == 1)
            .map(|i| (self.sites[i], self.powers[i]))
            .unzip();
        MixedMomentSpec { sites, powers }
    }

    /// All non-empty sub-specs, indexed by bitmask over the sites.
    pub fn sub_specs(&self) -> Vec<MixedMomentSpec> {
        (1..1usize << self.sites.len()).map(|m| self.sub_spec(m)).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MomentEntry {
    /// Site coordinates.
    pub sites: Vec<Vec<i64>>,
    pub powers: Vec<u32>,
    pub estimate: f64,
    pub se: f64,
}

/// Estimated mixed moments keyed by spec.
#[derive(Debug, Clone, Default)]
pub struct MixedMomentTable {
    entries: HashMap<MixedMomentSpec, (f64, f64)>,
    order: Vec<MixedMomentSpec>,
}

impl MixedMomentTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, spec: MixedMomentSpec, estimate: f64, se: f64) {
        if self.entries.insert(spec.clone(), (estimate, se)).is_none() {
            self.order.push(spec);
        }
    }

    pub fn get(&self, spec: &MixedMomentSpec) -> Option<(f64, f64)> {
        self.entries.get(spec).copied()
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// Rows in insertion order with coordinates resolved.
    pub fn rows(&self, window: &Window) -> Vec<MomentEntry> {
        self.order
            .iter()
            .map(|s| {
                let (estimate, se) = self.entries[s];
                MomentEntry {
                    sites: s.sites.iter().map(|&i| window.site(i).coords().to_vec()).collect(),
                    powers: s.powers.clone(),
                    estimate,
                    se,
                }
            })
            .collect()
    }

    pub fn to_json(&self, window: &Window) -> serde_json::Value {
        serde_json::to_value(self.rows(window)).expect("moment rows serialize")
    }

    /// Estimates every sub-spec of `spec` (including itself) from the replicates.
    pub fn fill(&mut self, replicates: &[SpinConfiguration], score: &dyn ScoreFunction, spec: &MixedMomentSpec) {
        for sub in spec.sub_specs() {
            if self.entries.contains_key(&sub) {
                continue;
            }
            let e = mixed_moment(replicates, score, &sub);
            self.insert(sub, e.0, e.1);
        }
    }
}

/// Monte Carlo mean and SE of `Π_i ξ(x_i, P_n)^{k_i}`.
pub fn mixed_moment(replicates: &[SpinConfiguration], score: &dyn ScoreFunction, spec: &MixedMomentSpec) -> (f64, f64) {
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    for c in replicates {
        let v: f64 = spec
            .sites
            .iter()
            .zip(&spec.powers)
            .map(|(&x, &k)| score.evaluate(x, c).powi(k as i32))
            .product();
        sum += v;
        sum_sq += v * v;
    }
    mean_se(sum, sum_sq, replicates.len())
}

/// `m_⊤(spec)` from a table holding every sub-spec.
pub fn ursell_from_moments(table: &MixedMomentTable, spec: &MixedMomentSpec) -> Result<f64> {
    let p = spec.sites.len();
    let mut moments = vec![1.0; 1 << p];
    for (mask, slot) in moments.iter_mut().enumerate().skip(1) {
        let sub = spec.sub_spec(mask);
        *slot = table
            .get(&sub)
            .ok_or_else(|| Error::MissingSubSpec {
                sites: sub.sites.clone(),
                powers: sub.powers.clone(),
            })?
            .0;
    }
    Ok(ursell_from_subset_moments(p, &moments)[(1 << p) - 1])
}

/// `S_k(H) = Σ_{x_1..x_k ∈ W} κ(ξ(x_1), …, ξ(x_k))`, with each joint
/// cumulant expanded over set partitions of the `k` slots and each block
/// moment read from the table as a mixed moment with multiplicities as powers.
pub fn cumulant_of_total_from_table(table: &MixedMomentTable, sites: &[usize], k: usize) -> Result<f64> {
    let partitions = super::cumulants::set_partitions(k);
    let mut tuple = vec![0usize; k];
    let mut total = 0.0;
    let n = sites.len();
    let count = n.pow(k as u32);
    for code in 0..count {
        let mut c = code;
        for slot in tuple.iter_mut() {
            *slot = sites[c % n];
            c /= n;
        }
        let mut kappa = 0.0;
        for part in &partitions {
            let b = part.len();
            let mut prod = 1.0;
            for block in &part.blocks {
                let mut mult: Vec<(usize, u32)> = Vec::new();
                for &slot in block {
                    match mult.iter_mut().find(|(s, _)| *s == tuple[slot]) {
                        Some((_, m)) => *m += 1,
                        None => mult.push((tuple[slot], 1)),
                    }
                }
                let spec = MixedMomentSpec::new(mult.iter().map(|m| m.0).collect(), mult.iter().map(|m| m.1).collect())?;
                let (m, _) = table.get(&spec).ok_or_else(|| Error::MissingSubSpec {
                    sites: spec.sites.clone(),
                    powers: spec.powers.clone(),
                })?;
                prod *= m;
            }
            let sign = if b % 2 == 1 { 1.0 } else { -1.0 };
            kappa += sign * (1..b).map(|i| i as f64).product::<f64>() * prod;
        }
        total += kappa;
    }
    Ok(total)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VoidEstimate {
    pub t: u32,
    pub ball_size: usize,
    pub empirical: f64,
    pub se: f64,
    /// `(1 - p)^{w_t}` for i.i.d. models.
    pub exact: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VoidFit {
    pub a: f64,
    pub a_prime: f64,
    pub nu: f64,
    pub r_squared: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VoidReport {
    pub estimates: Vec<VoidEstimate>,
    /// `log P̂ ≈ log A - a' t^ν`, best `ν` on a grid; `None` with fewer than
    /// two positive estimates.
    pub fit: Option<VoidFit>,
}

/// `P̂(P_n(W_t(z)) = 0)` for each `t`.
pub fn void_probability_check(
    replicates: &[SpinConfiguration],
    z: usize,
    t_values: &[u32],
    iid_p: Option<f64>,
) -> Result<VoidReport> {
    if replicates.is_empty() {
        return Err(Error::TooFewReplicates { needed: 1, got: 0 });
    }
    let window = replicates[0].window();
    let mut estimates = Vec::new();
    for &t in t_values {
        let ball: Vec<usize> = (0..window.len())
            .map(|i| window.distance(z, i).map(|d| (i, d)))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .filter(|&(_, d)| d <= t)
            .map(|(i, _)| i)
            .collect();
        if window.norm(z) + t > window.radius() {
            return Err(Error::MarginViolated(format!(
                "W_{t}(z) with |z| = {} leaves W_{}",
                window.norm(z),
                window.radius()
            )));
        }
        let r = replicates.len();
        let voids = replicates
            .iter()
            .filter(|c| ball.iter().all(|&i| !c.is_occupied(i)))
            .count();
        let p_hat = voids as f64 / r as f64;
        estimates.push(VoidEstimate {
            t,
            ball_size: ball.len(),
            empirical: p_hat,
            se: (p_hat * (1.0 - p_hat) / r as f64).sqrt(),
            exact: iid_p.map(|p| (1.0 - p).powi(ball.len() as i32)),
        });
    }
    let pts: Vec<(f64, f64)> = estimates
        .iter()
        .filter(|e| e.empirical > 0.0)
        .map(|e| (e.t as f64, e.empirical.ln()))
        .collect();
    let fit = [0.5, 0.75, 1.0, 1.25, 1.5, 1.75, 2.0, 2.5, 3.0]
        .iter()
        .filter_map(|&nu: &f64| {
            let xs: Vec<(f64, f64)> = pts.iter().map(|&(t, y)| (t.powf(nu), y)).collect();
            crate::topology::linear_fit(&xs).map(|(slope, icpt, r2)| VoidFit {
                a: icpt.exp(),
                a_prime: -slope,
                nu,
                r_squared: r2,
            })
        })
        .max_by(|a, b| a.r_squared.total_cmp(&b.r_squared));
    Ok(VoidReport { estimates, fit })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DiameterSplit {
    /// Indices into the input, sorted; contains index 0.
    pub part: Vec<usize>,
    pub complement: Vec<usize>,
    pub separation: u32,
    pub diameter: u32,
}

/// Bipartition with `d(I, I^c) >= diam / (p - 1)`: remove a heaviest edge
/// of a minimum spanning tree. Among heaviest edges the one giving the
/// lexicographically smallest `I` (the side holding point 0) wins.
pub fn diameter_split(p: usize, dist: impl Fn(usize, usize) -> u32) -> Result<DiameterSplit> {
    if p < 2 {
        return Err(Error::param("points", "need at least two points"));
    }
    let mut diameter = 0;
    for i in 0..p {
        for j in i + 1..p {
            diameter = diameter.max(dist(i, j));
        }
    }
    // Prim, ties to the lowest index.
    let mut in_tree = vec![false; p];
    let mut best = vec![(u32::MAX, 0usize); p];
    let mut edges = Vec::with_capacity(p - 1);
    in_tree[0] = true;
    for j in 1..p {
        best[j] = (dist(0, j), 0);
    }
    for _ in 1..p {
        let v = (0..p)
            .filter(|&j| !in_tree[j])
            .min_by_key(|&j| (best[j].0, j))
            .expect("vertices remain");
        in_tree[v] = true;
        edges.push((best[v].1, v, best[v].0));
        for j in 0..p {
            if !in_tree[j] {
                let d = dist(v, j);
                if d < best[j].0 {
                    best[j] = (d, v);
                }
            }
        }
    }
    let heaviest = edges.iter().map(|e| e.2).max().expect("p >= 2");
    let mut candidates: Vec<(Vec<usize>, Vec<usize>)> = edges
        .iter()
        .filter(|e| e.2 == heaviest)
        .map(|cut| {
            // Component of 0 in the tree without `cut`.
            let mut side = vec![false; p];
            side[0] = true;
            let mut stack = vec![0];
            while let Some(u) = stack.pop() {
                for e in &edges {
                    if std::ptr::eq(e, cut) {
                        continue;
                    }
                    for (a, b) in [(e.0, e.1), (e.1, e.0)] {
                        if a == u && !side[b] {
                            side[b] = true;
                            stack.push(b);
                        }
                    }
                }
            }
            let part: Vec<usize> = (0..p).filter(|&i| side[i]).collect();
            let comp: Vec<usize> = (0..p).filter(|&i| !side[i]).collect();
            (part, comp)
        })
        .collect();
    candidates.sort();
    let (part, complement) = candidates.swap_remove(0);
    let separation = part
        .iter()
        .flat_map(|&i| complement.iter().map(move |&j| (i, j)))
        .map(|(i, j)| dist(i, j))
        .min()
        .expect("both sides non-empty");
    Ok(DiameterSplit {
        part,
        complement,
        separation,
        diameter,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cayley::GroupKind;
    use crate::scores::ConstantScore;
    use crate::spin::sample_iid;

    fn iid(n: u32, p: f64, reps: usize, seed: u64) -> Vec<SpinConfiguration> {
        let w = Window::for_kind(GroupKind::IntegerLattice(2), n).unwrap();
        let s = SeedPolicy::new(seed);
        (0..reps).map(|r| sample_iid(&w, p, &mut s.stream(r as u64))).collect()
    }

    #[test]
    fn correlation_basics() {
        let full = iid(2, 1.0, 10, 1);
        assert_eq!(estimate_correlation(&full, &[0, 3, 5]).unwrap().estimate, 1.0);
        assert!(matches!(estimate_correlation(&full, &[1, 1]), Err(Error::DuplicatePoints(_))));
        let reps = iid(2, 0.5, 4000, 2);
        let e = estimate_correlation(&reps, &[0, 1]).unwrap();
        assert!((e.estimate - 0.25).abs() < 4.0 * e.se);
    }

    #[test]
    fn gap_rejects_overlap() {
        let reps = iid(2, 0.5, 10, 1);
        assert!(matches!(
            clustering_gap(&reps, &[0, 1], &[1, 2], &SeedPolicy::new(1)),
            Err(Error::Overlap)
        ));
    }

    #[test]
    fn iid_gap_is_null() {
        let reps = iid(3, 0.5, 5000, 3);
        let g = clustering_gap(&reps, &[0], &[5, 6], &SeedPolicy::new(3)).unwrap();
        assert!(g.signed.abs() < 4.0 * g.se, "{g:?}");
        assert!(g.se > 0.0);
    }

    #[test]
    fn mixed_moment_and_ursell() {
        let full = iid(2, 1.0, 5, 1);
        let one = ConstantScore { value: 1.0 };
        let spec = MixedMomentSpec::new(vec![0, 2], vec![1, 1]).unwrap();
        assert_eq!(mixed_moment(&full, &one, &spec).0, 1.0);
        let mut table = MixedMomentTable::new();
        table.fill(&full, &one, &spec);
        assert_eq!(table.len(), 3);
        assert_eq!(ursell_from_moments(&table, &spec).unwrap(), 0.0);
        let missing = MixedMomentSpec::new(vec![0, 4], vec![1, 1]).unwrap();
        assert!(matches!(
            ursell_from_moments(&table, &missing),
            Err(Error::MissingSubSpec { .. })
        ));
    }

    #[test]
    fn split_goldens() {
        let xs = [0i64, 1, 10];
        let s = diameter_split(3, |i, j| (xs[i] - xs[j]).unsigned_abs() as u32).unwrap();
        assert_eq!((s.part.clone(), s.separation, s.diameter), (vec![0, 1], 9, 10));
        let s = diameter_split(2, |_, _| 7).unwrap();
        assert_eq!((s.part, s.complement, s.separation), (vec![0], vec![1], 7));
        let eq = [0i64, 3, 6, 9];
        let s = diameter_split(4, |i, j| (eq[i] - eq[j]).unsigned_abs() as u32).unwrap();
        assert_eq!(s.separation, 3);
        assert_eq!(s.part, vec![0]);
    }

    #[test]
    fn void_exact_for_full_and_empty() {
        let full = iid(4, 1.0, 20, 1);
        let r = void_probability_check(&full, 0, &[1, 2], Some(1.0)).unwrap();
        assert!(r.estimates.iter().all(|e| e.empirical == 0.0));
        let empty = iid(4, 0.0, 20, 1);
        let r = void_probability_check(&empty, 0, &[1, 2], Some(0.0)).unwrap();
        assert!(r.estimates.iter().all(|e| e.empirical == 1.0 && e.exact == Some(1.0)));
        assert_eq!(r.estimates[1].ball_size, 13);
    }
}
