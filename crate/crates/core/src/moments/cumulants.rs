//! Set partitions, the moment–cumulant transform, Ursell functions and
//! sample cumulants.

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::spin::SeedPolicy;

pub const MAX_CUMULANT_ORDER: usize = 10;
pub const BOOTSTRAP_RESAMPLES: usize = 200;

/// A set partition of `{0, …, k-1}`; blocks are sorted and ordered by
/// their smallest element.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Partition {
    pub blocks: Vec<Vec<usize>>,
}

impl Partition {
    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }
}

/// Calls `f` once for every partition of `{0, …, k-1}`, via restricted
/// growth strings.
pub fn for_each_partition(k: usize, mut f: impl FnMut(&Partition)) {
    if k == 0 {
        f(&Partition { blocks: Vec::new() });
        return;
    }
    let mut labels = vec![0usize; k];
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    rgs(&mut labels, 0, 0, &mut blocks, &mut f);
}

fn rgs(labels: &mut [usize], pos: usize, max_label: usize, blocks: &mut Vec<Vec<usize>>, f: &mut impl FnMut(&Partition)) {
    if pos == labels.len() {
        f(&Partition { blocks: blocks.clone() });
        return;
    }
    let limit = if pos == 0 { 0 } else { max_label + 1 };
    for label in 0..=limit {
        labels[pos] = label;
        if label == blocks.len() {
            blocks.push(vec![pos]);
        } else {
            blocks[label].push(pos);
        }
        rgs(labels, pos + 1, max_label.max(label), blocks, f);
        if blocks[label].len() == 1 {
            blocks.pop();
        } else {
            blocks[label].pop();
        }
    }
}

pub fn set_partitions(k: usize) -> Vec<Partition> {
    let mut out = Vec::new();
    for_each_partition(k, |p| out.push(p.clone()));
    out
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|i| i as f64).product()
}

fn check_order(k: usize) -> Result<()> {
    if k > MAX_CUMULANT_ORDER {
        return Err(Error::ResourceLimit {
            what: "cumulant order",
            requested: k,
            cap: MAX_CUMULANT_ORDER,
        });
    }
    Ok(())
}

/// `S_k = Σ_{γ ∈ Π[k]} (-1)^{|γ|-1} (|γ|-1)! Π_i M_{|γ(i)|}` for every
/// `k = 1..=M.len()`.
pub fn moments_to_cumulants(moments: &[f64]) -> Result<Vec<f64>> {
    check_order(moments.len())?;
    Ok((1..=moments.len())
        .map(|k| {
            let mut s = 0.0;
            for_each_partition(k, |p| {
                let b = p.len();
                let sign = if b % 2 == 1 { 1.0 } else { -1.0 };
                let prod: f64 = p.blocks.iter().map(|blk| moments[blk.len() - 1]).product();
                s += sign * factorial(b - 1) * prod;
            });
            s
        })
        .collect())
}

/// `M_k = Σ_{γ ∈ Π[k]} Π_i S_{|γ(i)|}`.
pub fn cumulants_to_moments(cumulants: &[f64]) -> Result<Vec<f64>> {
    check_order(cumulants.len())?;
    Ok((1..=cumulants.len())
        .map(|k| {
            let mut m = 0.0;
            for_each_partition(k, |p| {
                m += p.blocks.iter().map(|blk| cumulants[blk.len() - 1]).product::<f64>();
            });
            m
        })
        .collect())
}

/// Truncated moments `m_⊤(S)` for every non-empty subset `S` of `p`
/// variables, given the plain moments `m(S)` indexed by bitmask
/// (`moments[0]` is ignored). Uses `m(S) = Σ_{B ∋ min S} m_⊤(B) m(S \ B)`.
pub fn ursell_from_subset_moments(p: usize, moments: &[f64]) -> Vec<f64> {
    assert_eq!(moments.len(), 1 << p);
    let m = |s: usize| if s == 0 { 1.0 } else { moments[s] };
    let mut ursell = vec![0.0; 1 << p];
    for s in 1usize..(1 << p) {
        let low = s & s.wrapping_neg();
        let rest = s ^ low;
        let mut acc = m(s);
        // Proper sub-blocks B = low ∪ T with T ⊊ rest.
        let mut t = rest;
        loop {
            t = t.wrapping_sub(1) & rest;
            if t == rest {
                break;
            }
            let b = low | t;
            acc -= ursell[b] * m(s ^ b);
            if t == 0 {
                break;
            }
        }
        ursell[s] = acc;
    }
    ursell
}

/// Cumulants of orders `1..=4` with bootstrap standard errors.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CumulantVector {
    pub values: Vec<f64>,
    pub se: Vec<f64>,
}

/// Unbiased k-statistics `k_1..k_order` (`order <= 4`).
pub fn k_statistics(values: &[f64], order: usize) -> Vec<f64> {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let central = |r: i32| values.iter().map(|v| (v - mean).powi(r)).sum::<f64>() / n;
    let (m2, m3, m4) = (central(2), central(3), central(4));
    let all = [
        mean,
        n / (n - 1.0) * m2,
        n * n / ((n - 1.0) * (n - 2.0)) * m3,
        n * n * ((n + 1.0) * m4 - 3.0 * (n - 1.0) * m2 * m2) / ((n - 1.0) * (n - 2.0) * (n - 3.0)),
    ];
    all[..order].to_vec()
}

pub fn sample_cumulants(values: &[f64], order: usize, seeds: &SeedPolicy) -> Result<CumulantVector> {
    if order == 0 || order > 4 {
        return Err(Error::param("order", "k-statistics are available for orders 1..=4"));
    }
    if values.len() < 10 {
        return Err(Error::TooFewReplicates {
            needed: 10,
            got: values.len(),
        });
    }
    let point = k_statistics(values, order);
    let mut rng = seeds.auxiliary(0xB007);
    let n = values.len();
    let mut sums = vec![0.0; order];
    let mut squares = vec![0.0; order];
    let mut resample = vec![0.0; n];
    for _ in 0..BOOTSTRAP_RESAMPLES {
        for v in resample.iter_mut() {
            *v = values[rng.random_range(0..n)];
        }
        for (j, k) in k_statistics(&resample, order).into_iter().enumerate() {
            sums[j] += k;
            squares[j] += k * k;
        }
    }
    let b = BOOTSTRAP_RESAMPLES as f64;
    let se = sums
        .iter()
        .zip(&squares)
        .map(|(s, q)| ((q - s * s / b) / (b - 1.0)).max(0.0).sqrt())
        .collect();
    Ok(CumulantVector { values: point, se })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Bell numbers by the triangle recurrence.
    fn bell(k: usize) -> usize {
        let mut row = vec![1usize];
        for _ in 0..k {
            let mut next = vec![*row.last().unwrap()];
            for &x in &row {
                next.push(next.last().unwrap() + x);
            }
            row = next;
        }
        row[0]
    }

    #[test]
    fn partition_counts_are_bell_numbers() {
        for k in 0..=8 {
            assert_eq!(set_partitions(k).len(), bell(k), "k={k}");
        }
        assert_eq!(bell(8), 4140);
    }

    #[test]
    fn partitions_are_exact_covers() {
        for p in set_partitions(5) {
            let mut all: Vec<usize> = p.blocks.concat();
            all.sort();
            assert_eq!(all, vec![0, 1, 2, 3, 4]);
        }
    }

    #[test]
    fn goldens() {
        assert_eq!(moments_to_cumulants(&[1.0, 2.0, 5.0]).unwrap(), vec![1.0, 1.0, 1.0]);
        assert_eq!(moments_to_cumulants(&[0.0, 1.0, 0.0]).unwrap(), vec![0.0, 1.0, 0.0]);
        assert_eq!(moments_to_cumulants(&[2.5]).unwrap(), vec![2.5]);
        assert!(moments_to_cumulants(&[0.0; 11]).is_err());
    }

    #[test]
    fn round_trip() {
        let s = [0.3, 1.2, -0.7, 2.0, 0.1];
        let m = cumulants_to_moments(&s).unwrap();
        let back = moments_to_cumulants(&m).unwrap();
        for (a, b) in s.iter().zip(&back) {
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn ursell_of_independent_variables_vanishes() {
        // Three independent variables with means 0.5, 0.3, 0.2.
        let means = [0.5, 0.3, 0.2];
        let m: Vec<f64> = (0..8usize)
            .map(|s| (0..3).filter(|i| s >> i & 1 == 1).map(|i| means[i]).product())
            .collect();
        let u = ursell_from_subset_moments(3, &m);
        assert!((u[0b001] - 0.5).abs() < 1e-15);
        assert!(u[0b011].abs() < 1e-15);
        assert!(u[0b111].abs() < 1e-15);
    }

    #[test]
    fn ursell_pair_is_covariance() {
        let m = vec![1.0, 0.4, 0.6, 0.3];
        let u = ursell_from_subset_moments(2, &m);
        assert!((u[3] - (0.3 - 0.24)).abs() < 1e-15);
    }

    #[test]
    fn constant_sample() {
        let c = sample_cumulants(&[4.0; 20], 4, &SeedPolicy::new(1)).unwrap();
        assert_eq!(c.values, vec![4.0, 0.0, 0.0, 0.0]);
        assert!(sample_cumulants(&[1.0; 9], 2, &SeedPolicy::new(1)).is_err());
    }
}
