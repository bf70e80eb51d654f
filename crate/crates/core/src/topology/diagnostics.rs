//! Planar duality check, subcriticality probe and Betti CSV reports.

use serde::Serialize;

use super::complex::{build_complex, BettiVector};
use super::components::components;
use crate::error::{Error, Result};
use crate::scores::for_each_sphere_offset;
use crate::spin::{PreparedModel, SeedPolicy, SpinConfiguration};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DualityReport {
    pub beta1: usize,
    pub bounded_holes: usize,
    pub agrees: bool,
}

/// Compares `β_1(C(μ))` with the number of bounded components of the
/// complement in `R²`, found by a 4-connected flood fill of empty squares
/// over the padded bounding box of the window.
pub fn duality_check_2d(config: &SpinConfiguration) -> Result<DualityReport> {
    let window = config.window();
    if window.require_lattice("duality check")? != 2 {
        return Err(Error::UnsupportedGraph {
            graph: window.kind().to_string(),
            operation: "duality check (d = 2 only)",
        });
    }
    let beta1 = build_complex(config)?.betti_numbers().get(1);

    let r = window.radius() as i64 + 1;
    let side = (2 * r + 1) as usize;
    let idx = |x: i64, y: i64| (x + r) as usize * side + (y + r) as usize;
    let mut empty = vec![true; side * side];
    for i in config.support() {
        let c = window.site(i).coords();
        empty[idx(c[0], c[1])] = false;
    }
    let mut label = vec![usize::MAX; side * side];
    let mut regions = 0;
    let mut stack = Vec::new();
    for x in -r..=r {
        for y in -r..=r {
            let s = idx(x, y);
            if !empty[s] || label[s] != usize::MAX {
                continue;
            }
            label[s] = regions;
            stack.push((x, y));
            while let Some((a, b)) = stack.pop() {
                for (da, db) in [(1, 0), (-1, 0), (0, 1), (0, -1)] {
                    let (u, v) = (a + da, b + db);
                    if u < -r || u > r || v < -r || v > r {
                        continue;
                    }
                    let t = idx(u, v);
                    if empty[t] && label[t] == usize::MAX {
                        label[t] = regions;
                        stack.push((u, v));
                    }
                }
            }
            regions += 1;
        }
    }
    // The padding ring is empty and connected, and it is the unbounded region.
    let bounded_holes = regions - 1;
    Ok(DualityReport {
        beta1,
        bounded_holes,
        agrees: beta1 == bounded_holes,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConnectionRow {
    pub distance: u32,
    pub probability: f64,
    pub se: f64,
    pub pairs_per_replicate: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SubcriticalityReport {
    pub rows: Vec<ConnectionRow>,
    /// Least-squares fit of `ln P̂` against distance over rows with `P̂ > 0`;
    /// `None` when fewer than two such rows exist.
    pub slope: Option<f64>,
    pub intercept: Option<f64>,
    pub r_squared: Option<f64>,
}

/// Estimates `P(y ∈ C(x, P))` for `|x - y|_1 = s`, `s = 1..=max_distance`,
/// pooling by stationarity over base points `x ∈ W_{n - s_max}` and all `y`
/// on the sphere. Standard errors come from the spread of per-replicate
/// averages.
pub fn subcriticality_probe(
    model: &PreparedModel,
    max_distance: u32,
    replicates: usize,
    seeds: &SeedPolicy,
) -> Result<SubcriticalityReport> {
    if replicates < 2 {
        return Err(Error::TooFewReplicates {
            needed: 2,
            got: replicates,
        });
    }
    let window = model.window().clone();
    let d = window.require_lattice("subcriticality probe")?;
    let n = window.radius();
    if max_distance == 0 || max_distance > n {
        return Err(Error::param("max_distance", format!("must lie in 1..={n}")));
    }
    let inner = n - max_distance;
    let bases: Vec<usize> = (0..window.len()).filter(|&i| window.norm(i) <= inner).collect();
    let pairs: Vec<Vec<(usize, usize)>> = (1..=max_distance)
        .map(|s| {
            let mut out = Vec::new();
            let mut y = vec![0i64; d];
            for &x in &bases {
                let xc = window.site(x).coords();
                for_each_sphere_offset(d, s, |z| {
                    for k in 0..d {
                        y[k] = xc[k] + z[k];
                    }
                    out.push((x, window.lookup(&y).expect("sphere stays inside the window")));
                });
            }
            out
        })
        .collect();

    let mut per_rep = vec![Vec::with_capacity(replicates); max_distance as usize];
    for r in 0..replicates {
        let config = model.sample(&mut seeds.replicate(0, r as u32));
        let dec = components(&config)?;
        for (s, list) in pairs.iter().enumerate() {
            let hits = list
                .iter()
                .filter(|&&(x, y)| dec.component_of[x].is_some() && dec.component_of[x] == dec.component_of[y])
                .count();
            per_rep[s].push(hits as f64 / list.len() as f64);
        }
    }

    let rows: Vec<ConnectionRow> = per_rep
        .iter()
        .enumerate()
        .map(|(s, xs)| {
            let m = xs.len() as f64;
            let mean = xs.iter().sum::<f64>() / m;
            let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (m - 1.0);
            ConnectionRow {
                distance: s as u32 + 1,
                probability: mean,
                se: (var / m).sqrt(),
                pairs_per_replicate: pairs[s].len(),
            }
        })
        .collect();

    let points: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.probability > 0.0)
        .map(|r| (r.distance as f64, r.probability.ln()))
        .collect();
    let fit = linear_fit(&points);
    Ok(SubcriticalityReport {
        rows,
        slope: fit.map(|f| f.0),
        intercept: fit.map(|f| f.1),
        r_squared: fit.map(|f| f.2),
    })
}

/// Ordinary least squares `y = a x + b`; returns `(a, b, R²)`. A perfect
/// horizontal fit reports `R² = 1`.
pub(crate) fn linear_fit(points: &[(f64, f64)]) -> Option<(f64, f64, f64)> {
    let m = points.len();
    if m < 2 {
        return None;
    }
    let mf = m as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / mf;
    let my = points.iter().map(|p| p.1).sum::<f64>() / mf;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = points.iter().map(|p| (p.1 - my).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let a = sxy / sxx;
    let b = my - a * mx;
    let ss_res: f64 = points.iter().map(|p| (p.1 - a * p.0 - b).powi(2)).sum();
    let r2 = if syy == 0.0 { 1.0 } else { 1.0 - ss_res / syy };
    Some((a, b, r2))
}

/// CSV `replicate,n,beta0,...,beta_{d-1}`.
pub fn betti_csv(rows: &[(usize, u32, BettiVector)]) -> String {
    let d = rows.first().map_or(0, |r| r.2 .0.len());
    let mut out = String::from("replicate,n");
    for k in 0..d {
        out.push_str(&format!(",beta{k}"));
    }
    out.push('\n');
    for (rep, n, b) in rows {
        out.push_str(&format!("{rep},{n}"));
        for v in &b.0 {
            out.push_str(&format!(",{v}"));
        }
        out.push('\n');
    }
    out
}
