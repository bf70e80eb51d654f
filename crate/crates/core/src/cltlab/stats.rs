//! Fits and tests applied to replicate total masses.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::Rng;
use serde::Serialize;
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};
use crate::moments::BOOTSTRAP_RESAMPLES;
use crate::spin::SeedPolicy;

pub const MIN_NORMALITY_SAMPLE: usize = 100;

pub(crate) fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Unbiased sample variance.
pub(crate) fn variance(xs: &[f64]) -> f64 {
    let m = mean(xs);
    xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() as f64 - 1.0)
}

/// Standard error of the unbiased sample variance.
pub(crate) fn variance_se(xs: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let m = mean(xs);
    let m2 = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / n;
    let m4 = xs.iter().map(|x| (x - m).powi(4)).sum::<f64>() / n;
    ((m4 - m2 * m2 * (n - 3.0) / (n - 1.0)) / n).max(0.0).sqrt()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VarianceFit {
    /// Least-squares slope of `Var(H_n)` on `w_n` through the origin.
    pub slope: f64,
    pub slope_se: f64,
    /// Centered coefficient of determination.
    pub r_squared: f64,
    /// `(w_n, Var(H_n) / w_n, SE)` per grid point.
    pub normalized: Vec<(usize, f64, f64)>,
}

fn origin_fit(ws: &[f64], vs: &[f64]) -> (f64, f64) {
    let sxy: f64 = ws.iter().zip(vs).map(|(w, v)| w * v).sum();
    let sxx: f64 = ws.iter().map(|w| w * w).sum();
    let slope = sxy / sxx;
    let mv = mean(vs);
    let ss_tot: f64 = vs.iter().map(|v| (v - mv).powi(2)).sum();
    let ss_res: f64 = ws.iter().zip(vs).map(|(w, v)| (v - slope * w).powi(2)).sum();
    let r2 = if ss_tot == 0.0 {
        if ss_res == 0.0 {
            1.0
        } else {
            0.0
        }
    } else {
        1.0 - ss_res / ss_tot
    };
    (slope, r2)
}

/// `Var(H_n) ≈ σ² w_n` across the grid. The slope SE comes from resampling
/// replicates independently at every grid point.
pub fn variance_scaling_fit(samples: &[(usize, &[f64])], seeds: &SeedPolicy) -> Result<VarianceFit> {
    if samples.len() < 4 {
        return Err(Error::DegenerateGrid(format!(
            "need at least 4 grid points, got {}",
            samples.len()
        )));
    }
    if samples.iter().any(|(_, v)| v.len() < 2) {
        return Err(Error::TooFewReplicates { needed: 2, got: 1 });
    }
    let ws: Vec<f64> = samples.iter().map(|(w, _)| *w as f64).collect();
    let vs: Vec<f64> = samples.iter().map(|(_, v)| variance(v)).collect();
    let (slope, r_squared) = origin_fit(&ws, &vs);

    let mut rng = seeds.auxiliary(0x5CA1);
    let mut boot = Vec::with_capacity(BOOTSTRAP_RESAMPLES);
    let mut buf = Vec::new();
    for _ in 0..BOOTSTRAP_RESAMPLES {
        let resampled: Vec<f64> = samples
            .iter()
            .map(|(_, v)| {
                buf.clear();
                buf.extend((0..v.len()).map(|_| v[rng.random_range(0..v.len())]));
                variance(&buf)
            })
            .collect();
        boot.push(origin_fit(&ws, &resampled).0);
    }
    let slope_se = variance(&boot).sqrt();
    let normalized = samples
        .iter()
        .map(|(w, v)| (*w, variance(v) / *w as f64, variance_se(v) / *w as f64))
        .collect();
    Ok(VarianceFit {
        slope,
        slope_se,
        r_squared,
        normalized,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormalityTest {
    pub n: usize,
    /// `sup |F_n - Φ|` after standardizing by the sample mean and SD.
    pub ks_statistic: f64,
    /// Lilliefors p-value (Dallal–Wilkinson approximation), which accounts
    /// for the estimated mean and SD.
    pub p_value: f64,
    /// Kolmogorov p-value as if the parameters were known; anti-conservative
    /// here and reported for reference only.
    pub p_value_known_parameters: f64,
    pub skewness: f64,
    pub excess_kurtosis: f64,
    pub caveat: &'static str,
}

const NORMALITY_CAVEAT: &str =
    "parameters estimated from the sample; p_value uses the Lilliefors null, p_value_known_parameters does not";

pub fn normality_test(values: &[f64]) -> Result<NormalityTest> {
    let n = values.len();
    if n < MIN_NORMALITY_SAMPLE {
        return Err(Error::TooFewReplicates {
            needed: MIN_NORMALITY_SAMPLE,
            got: n,
        });
    }
    let m = mean(values);
    let nf = n as f64;
    let m2 = values.iter().map(|x| (x - m).powi(2)).sum::<f64>() / nf;
    if !(m2 > 0.0) {
        return Err(Error::ZeroVariance);
    }
    let sd = (m2 * nf / (nf - 1.0)).sqrt();
    let m3 = values.iter().map(|x| (x - m).powi(3)).sum::<f64>() / nf;
    let m4 = values.iter().map(|x| (x - m).powi(4)).sum::<f64>() / nf;

    let phi = Normal::standard();
    let mut z: Vec<f64> = values.iter().map(|x| (x - m) / sd).collect();
    z.sort_by(f64::total_cmp);
    let mut d = 0.0f64;
    for (i, &zi) in z.iter().enumerate() {
        let f = phi.cdf(zi);
        d = d.max((i as f64 + 1.0) / nf - f).max(f - i as f64 / nf);
    }
    Ok(NormalityTest {
        n,
        ks_statistic: d,
        p_value: lilliefors_p_value(d, n),
        p_value_known_parameters: kolmogorov_p_value(d, n),
        skewness: m3 / m2.powf(1.5),
        excess_kurtosis: m4 / (m2 * m2) - 3.0,
        caveat: NORMALITY_CAVEAT,
    })
}

/// Dallal–Wilkinson approximation to the Lilliefors null distribution,
/// with Stephens' modified statistic above `p = 0.1`.
pub fn lilliefors_p_value(d: f64, n: usize) -> f64 {
    let nf = n as f64;
    let (kd, nd) = if n <= 100 { (d, nf) } else { (d * (nf / 100.0).powf(0.49), 100.0) };
    let mut p = (-7.01256 * kd * kd * (nd + 2.78019) + 2.99587 * kd * (nd + 2.78019).sqrt() - 0.122119
        + 0.974598 / nd.sqrt()
        + 1.67997 / nd)
        .exp();
    if p > 0.1 {
        let kk = (nf.sqrt() - 0.01 + 0.85 / nf.sqrt()) * d;
        p = if kk <= 0.302 {
            1.0
        } else if kk <= 0.5 {
            2.76773 - 19.828315 * kk + 80.709644 * kk.powi(2) - 138.55152 * kk.powi(3) + 81.218052 * kk.powi(4)
        } else if kk <= 0.9 {
            -4.901232 + 40.662806 * kk - 97.490286 * kk.powi(2) + 94.029866 * kk.powi(3) - 32.355711 * kk.powi(4)
        } else if kk <= 1.31 {
            6.198765 - 19.39896 * kk + 23.159607 * kk.powi(2) - 7.800368 * kk.powi(3)
        } else {
            0.0
        };
    }
    p.clamp(0.0, 1.0)
}

/// Asymptotic Kolmogorov tail with Stephens' small-sample correction.
pub fn kolmogorov_p_value(d: f64, n: usize) -> f64 {
    let sn = (n as f64).sqrt();
    let lambda = (sn + 0.12 + 0.11 / sn) * d;
    if lambda < 1e-3 {
        return 1.0;
    }
    let mut sum = 0.0;
    for k in 1..=100 {
        let kf = k as f64;
        let term = (-2.0 * kf * kf * lambda * lambda).exp();
        sum += if k % 2 == 1 { term } else { -term };
        if term < 1e-16 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CovarianceEstimate {
    pub w_n: usize,
    /// `w_n^{-1}` times the sample covariance, symmetrized.
    pub matrix: Vec<Vec<f64>>,
    pub se: Vec<Vec<f64>>,
    pub min_eigenvalue: f64,
}

fn scaled_covariance(columns: &[&[f64]], rows: &[usize], w: f64) -> Vec<Vec<f64>> {
    let k = columns.len();
    let r = rows.len() as f64;
    let means: Vec<f64> = columns.iter().map(|c| rows.iter().map(|&i| c[i]).sum::<f64>() / r).collect();
    let mut out = vec![vec![0.0; k]; k];
    for a in 0..k {
        for b in a..k {
            let s: f64 = rows
                .iter()
                .map(|&i| (columns[a][i] - means[a]) * (columns[b][i] - means[b]))
                .sum();
            let v = s / (r - 1.0) / w;
            out[a][b] = v;
            out[b][a] = v;
        }
    }
    out
}

/// `Σ̂ = w_n^{-1} Cov(H^{ξ_1}, …, H^{ξ_k})` with bootstrap SEs per entry.
pub fn multivariate_covariance(columns: &[&[f64]], w_n: usize, seeds: &SeedPolicy) -> Result<CovarianceEstimate> {
    let k = columns.len();
    if k < 2 {
        return Err(Error::param("scores", "covariance needs at least two scores"));
    }
    let r = columns[0].len();
    if columns.iter().any(|c| c.len() != r) {
        return Err(Error::DimensionMismatch {
            expected: r,
            found: columns.iter().map(|c| c.len()).find(|&l| l != r).unwrap_or(r),
        });
    }
    if r < 2 {
        return Err(Error::TooFewReplicates { needed: 2, got: r });
    }
    let w = w_n as f64;
    let all: Vec<usize> = (0..r).collect();
    let matrix = scaled_covariance(columns, &all, w);

    let mut rng = seeds.auxiliary(0xC0F);
    let mut sum = vec![vec![0.0; k]; k];
    let mut sq = vec![vec![0.0; k]; k];
    let mut rows = vec![0usize; r];
    for _ in 0..BOOTSTRAP_RESAMPLES {
        for slot in rows.iter_mut() {
            *slot = rng.random_range(0..r);
        }
        let m = scaled_covariance(columns, &rows, w);
        for a in 0..k {
            for b in 0..k {
                sum[a][b] += m[a][b];
                sq[a][b] += m[a][b] * m[a][b];
            }
        }
    }
    let bn = BOOTSTRAP_RESAMPLES as f64;
    let se = (0..k)
        .map(|a| {
            (0..k)
                .map(|b| ((sq[a][b] - sum[a][b] * sum[a][b] / bn) / (bn - 1.0)).max(0.0).sqrt())
                .collect()
        })
        .collect();
    let flat: Vec<f64> = matrix.iter().flatten().copied().collect();
    let eig = SymmetricEigen::new(DMatrix::from_row_slice(k, k, &flat));
    let min_eigenvalue = eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(CovarianceEstimate {
        w_n,
        matrix,
        se,
        min_eigenvalue,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum DecayFit {
    Fit {
        slope: f64,
        intercept: f64,
        r_squared: f64,
        /// Stretched exponent with the best weighted fit of `log gap` on `s^b`.
        best_b: f64,
        stretched_slope: f64,
        stretched_r_squared: f64,
        usable_bins: usize,
    },
    InsufficientSignal {
        usable_bins: usize,
    },
}

pub const MIN_USABLE_BINS: usize = 4;
const STRETCH_GRID: [f64; 7] = [0.25, 0.5, 0.75, 1.0, 1.25, 1.5, 2.0];

/// Weighted least squares `y = a x + c` with weights `wt`; returns `(a, c, R²)`.
fn weighted_fit(xs: &[f64], ys: &[f64], wt: &[f64]) -> (f64, f64, f64) {
    let sw: f64 = wt.iter().sum();
    let mx = xs.iter().zip(wt).map(|(x, w)| x * w).sum::<f64>() / sw;
    let my = ys.iter().zip(wt).map(|(y, w)| y * w).sum::<f64>() / sw;
    let sxx: f64 = xs.iter().zip(wt).map(|(x, w)| w * (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).zip(wt).map(|((x, y), w)| w * (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().zip(wt).map(|(y, w)| w * (y - my).powi(2)).sum();
    let a = sxy / sxx;
    let c = my - a * mx;
    let ss_res: f64 = xs.iter().zip(ys).zip(wt).map(|((x, y), w)| w * (y - a * x - c).powi(2)).sum();
    (a, c, if syy == 0.0 { 1.0 } else { 1.0 - ss_res / syy })
}

/// Fits `log gap` against `s` (and `s^b`) over bins whose gap exceeds its
/// standard error, weighting each bin by `(gap / se)²`. Bins with zero SE
/// and a positive gap get unit weight.
pub fn clustering_decay_fit(distances: &[f64], gaps: &[f64], ses: &[f64]) -> DecayFit {
    let usable: Vec<usize> = (0..distances.len())
        .filter(|&i| gaps[i] > 0.0 && gaps[i].is_finite() && gaps[i] > ses[i])
        .collect();
    if usable.len() < MIN_USABLE_BINS {
        return DecayFit::InsufficientSignal {
            usable_bins: usable.len(),
        };
    }
    let ys: Vec<f64> = usable.iter().map(|&i| gaps[i].ln()).collect();
    let wt: Vec<f64> = usable
        .iter()
        .map(|&i| if ses[i] > 0.0 { (gaps[i] / ses[i]).powi(2) } else { 1.0 })
        .collect();
    let xs: Vec<f64> = usable.iter().map(|&i| distances[i]).collect();
    let (slope, intercept, r_squared) = weighted_fit(&xs, &ys, &wt);
    let (best_b, stretched_slope, stretched_r_squared) = STRETCH_GRID
        .iter()
        .map(|&b| {
            let xb: Vec<f64> = xs.iter().map(|x| x.powf(b)).collect();
            let (a, _, r2) = weighted_fit(&xb, &ys, &wt);
            (b, a, r2)
        })
        .max_by(|a, b| a.2.total_cmp(&b.2))
        .expect("grid is non-empty");
    DecayFit::Fit {
        slope,
        intercept,
        r_squared,
        best_b,
        stretched_slope,
        stretched_r_squared,
        usable_bins: usable.len(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand_distr::{Distribution, StandardNormal};

    #[test]
    fn lilliefors_matches_reference_values() {
        // Dallal-Wilkinson region: statsmodels `pval_lf`.
        for (d, n, p) in [
            (0.08, 200, 0.003366173253796461),
            (0.03, 1000, 0.03381348312742053),
            (0.12, 50, 0.06934361419272671),
            (0.06, 500, 0.00019149796689191248),
        ] {
            let got = lilliefors_p_value(d, n);
            assert!((got - p).abs() < 1e-9 * p.max(1.0), "d={d} n={n}: {got} vs {p}");
        }
        // Upper region: Monte Carlo with 10^5 standardized normal samples.
        for (d, n, p) in [(0.05, 200, 0.25814), (0.04, 150, 0.81627)] {
            let got = lilliefors_p_value(d, n);
            assert!((got - p).abs() < 0.03, "d={d} n={n}: {got} vs {p}");
        }
    }

    #[test]
    fn normality_rejects_constants_and_small_samples() {
        assert!(matches!(normality_test(&[1.0; 200]), Err(Error::ZeroVariance)));
        assert!(normality_test(&[1.0, 2.0]).is_err());
    }

    #[test]
    fn normal_draws_pass() {
        let mut rng = SeedPolicy::new(7).stream(0);
        let xs: Vec<f64> = (0..1000).map(|_| StandardNormal.sample(&mut rng)).collect();
        let t = normality_test(&xs).unwrap();
        assert!(t.p_value > 0.001);
        assert!(t.skewness.abs() < 0.3);
    }

    #[test]
    fn exact_exponential_decay() {
        let s: Vec<f64> = (1..=5).map(f64::from).collect();
        let g: Vec<f64> = s.iter().map(|x| (-2.0 * x).exp()).collect();
        match clustering_decay_fit(&s, &g, &[0.0; 5]) {
            DecayFit::Fit { slope, best_b, .. } => {
                assert!((slope + 2.0).abs() < 0.1);
                assert_eq!(best_b, 1.0);
            }
            other => panic!("{other:?}"),
        }
        assert_eq!(
            clustering_decay_fit(&s, &[0.0; 5], &[0.01; 5]),
            DecayFit::InsufficientSignal { usable_bins: 0 }
        );
    }

    #[test]
    fn variance_fit_rejects_short_grids() {
        let v = [1.0, 2.0, 3.0];
        assert!(matches!(
            variance_scaling_fit(&[(1, &v[..]), (2, &v[..])], &SeedPolicy::new(1)),
            Err(Error::DegenerateGrid(_))
        ));
    }

    #[test]
    fn duplicated_columns_give_equal_entries() {
        let mut rng = SeedPolicy::new(2).stream(0);
        let xs: Vec<f64> = (0..300).map(|_| StandardNormal.sample(&mut rng)).collect();
        let c = multivariate_covariance(&[&xs, &xs], 10, &SeedPolicy::new(2)).unwrap();
        assert_eq!(c.matrix[0][0], c.matrix[1][1]);
        assert_eq!(c.matrix[0][1], c.matrix[0][0]);
        assert!(c.min_eigenvalue.abs() < 1e-12);
    }
}
