//! Executes an experiment plan and writes its result directory.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use super::direct::{score_margin, PairIndex, SigmaEstimate};
use super::plan::ExperimentPlan;
use super::stats::{
    mean, multivariate_covariance, normality_test, variance, variance_scaling_fit, variance_se,
    CovarianceEstimate, NormalityTest, VarianceFit, MIN_NORMALITY_SAMPLE,
};
use crate::error::{Error, Result};
use crate::scores::{total_mass, ScoreFunction};
use crate::spin::{SeedPolicy, Window};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Either a computed statistic or the reason it was not computed.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Outcome<T> {
    Computed(T),
    Skipped { reason: String },
}

impl<T> Outcome<T> {
    fn from_result(r: Result<T>) -> Self {
        match r {
            Ok(v) => Outcome::Computed(v),
            Err(e) => Outcome::Skipped { reason: e.to_string() },
        }
    }

    pub fn computed(&self) -> Option<&T> {
        match self {
            Outcome::Computed(v) => Some(v),
            Outcome::Skipped { .. } => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScoreStats {
    pub score: String,
    #[serde(skip)]
    pub values: Vec<f64>,
    pub mean: f64,
    pub mean_se: f64,
    pub variance: f64,
    pub variance_se: f64,
    /// Replicates in which some stabilization ball left the window.
    pub truncated_replicates: usize,
    pub normality: Outcome<NormalityTest>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridResult {
    pub n: u32,
    pub w_n: usize,
    pub scores: Vec<ScoreStats>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScoreSummary {
    pub score: String,
    pub variance_fit: Outcome<VarianceFit>,
    /// `slope - 4 SE > 0`.
    pub slope_positive: Option<bool>,
    pub sigma_direct: Outcome<SigmaEstimate>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Metadata {
    pub tool: &'static str,
    pub version: &'static str,
    pub seed: u64,
    pub config_hash: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentResult {
    pub metadata: Metadata,
    pub plan: ExperimentPlan,
    pub grid: Vec<GridResult>,
    pub scores: Vec<ScoreSummary>,
    pub covariance: Outcome<CovarianceEstimate>,
}

/// Runs `f` on a dedicated pool; `workers == 0` uses rayon's default size.
pub fn with_workers<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::param("workers", e.to_string()))?;
    Ok(pool.install(f))
}

fn unique_names(plan: &ExperimentPlan) -> Vec<String> {
    let mut names: Vec<String> = Vec::new();
    for s in &plan.scores {
        let base = s.to_string();
        let seen = names.iter().filter(|n| **n == base || n.starts_with(&format!("{base}#"))).count();
        names.push(if seen == 0 { base } else { format!("{base}#{}", seen + 1) });
    }
    names
}

struct ReplicateOutput {
    masses: Vec<f64>,
    truncated: Vec<bool>,
    direct: Vec<Vec<f64>>,
}

/// Runs every `(n, replicate)` pair; replicate `r` at grid index `g` draws
/// from `seeds.replicate(g, r)`, so results do not depend on `workers`.
pub fn run(plan: &ExperimentPlan, seed: u64, workers: usize) -> Result<ExperimentResult> {
    plan.validate()?;
    with_workers(workers, || run_in_pool(plan, seed))?
}

fn run_in_pool(plan: &ExperimentPlan, seed: u64) -> Result<ExperimentResult> {
    let seeds = SeedPolicy::new(seed);
    let scores: Vec<Arc<dyn ScoreFunction>> =
        plan.scores.iter().map(|s| s.build(plan.graph)).collect::<Result<_>>()?;
    let names = unique_names(plan);
    let last = plan.n_grid.len() - 1;
    let n_max = plan.n_grid[last];
    let rho = plan.rho_max.unwrap_or(n_max / 4);

    let mut grid = Vec::with_capacity(plan.n_grid.len());
    let mut direct_pairs: Vec<Result<PairIndex>> = Vec::new();
    let mut direct_rows: Vec<Vec<Vec<f64>>> = vec![Vec::new(); scores.len()];
    for (g, &n) in plan.n_grid.iter().enumerate() {
        let window = Window::for_kind(plan.graph, n)?;
        let model = plan.model.prepare(&window)?;
        if g == last {
            direct_pairs = scores
                .iter()
                .map(|s| PairIndex::new(&window, rho, score_margin(s.as_ref())))
                .collect();
        }
        let outputs: Vec<ReplicateOutput> = (0..plan.replicates)
            .into_par_iter()
            .map(|r| {
                let config = model.sample(&mut seeds.replicate(g as u32, r as u32));
                let mut out = ReplicateOutput {
                    masses: Vec::with_capacity(scores.len()),
                    truncated: Vec::with_capacity(scores.len()),
                    direct: Vec::new(),
                };
                for (k, score) in scores.iter().enumerate() {
                    let mass = total_mass(score.as_ref(), &config);
                    if !mass.value.is_finite() {
                        return Err(Error::Replicate {
                            n,
                            replicate: r,
                            source: Box::new(Error::param("score", format!("{} is not finite", names[k]))),
                        });
                    }
                    out.masses.push(mass.value);
                    out.truncated.push(mass.truncated_sites > 0);
                    if g == last {
                        if let Ok(pairs) = &direct_pairs[k] {
                            let values: Vec<f64> =
                                score.evaluate_all(&config).into_iter().map(|(v, _)| v).collect();
                            out.direct.push(pairs.accumulate(&values));
                        }
                    }
                }
                Ok(out)
            })
            .collect::<Result<_>>()?;

        let mut stats = Vec::with_capacity(scores.len());
        for k in 0..scores.len() {
            let values: Vec<f64> = outputs.iter().map(|o| o.masses[k]).collect();
            let r = values.len() as f64;
            let var = variance(&values);
            let normality = if values.len() < MIN_NORMALITY_SAMPLE {
                Outcome::Skipped {
                    reason: format!("needs at least {MIN_NORMALITY_SAMPLE} replicates"),
                }
            } else {
                Outcome::from_result(normality_test(&values))
            };
            stats.push(ScoreStats {
                score: names[k].clone(),
                mean: mean(&values),
                mean_se: (var / r).sqrt(),
                variance: var,
                variance_se: variance_se(&values),
                truncated_replicates: outputs.iter().filter(|o| o.truncated[k]).count(),
                normality,
                values,
            });
        }
        if g == last {
            let mut slot = 0;
            for (k, pairs) in direct_pairs.iter().enumerate() {
                if pairs.is_ok() {
                    direct_rows[k] = outputs.iter().map(|o| o.direct[slot].clone()).collect();
                    slot += 1;
                }
            }
        }
        grid.push(GridResult {
            n,
            w_n: window.len(),
            scores: stats,
        });
    }

    let summaries = (0..scores.len())
        .map(|k| {
            let samples: Vec<(usize, &[f64])> = grid.iter().map(|gr| (gr.w_n, &gr.scores[k].values[..])).collect();
            let variance_fit = Outcome::from_result(variance_scaling_fit(&samples, &seeds));
            let slope_positive = variance_fit.computed().map(|f| f.slope - 4.0 * f.slope_se > 0.0);
            let sigma_direct = Outcome::from_result(match &direct_pairs[k] {
                Ok(pairs) => pairs.finish(&direct_rows[k], n_max),
                Err(e) => Err(clone_error(e)),
            });
            ScoreSummary {
                score: names[k].clone(),
                variance_fit,
                slope_positive,
                sigma_direct,
            }
        })
        .collect();

    let top = &grid[last];
    let columns: Vec<&[f64]> = top.scores.iter().map(|s| &s.values[..]).collect();
    let covariance = Outcome::from_result(multivariate_covariance(&columns, top.w_n, &seeds));

    let mut echoed = plan.clone();
    echoed.seed = Some(seed);
    echoed.rho_max = Some(rho);
    Ok(ExperimentResult {
        metadata: Metadata {
            tool: "spinclust",
            version: TOOL_VERSION,
            seed,
            config_hash: plan.config_hash(),
        },
        plan: echoed,
        grid,
        scores: summaries,
        covariance,
    })
}

fn clone_error(e: &Error) -> Error {
    match e {
        Error::MarginViolated(m) => Error::MarginViolated(m.clone()),
        other => Error::param("rho_max", other.to_string()),
    }
}

/// `#`-prefixed metadata lines shared by every CSV output.
pub fn metadata_header(seed: u64, config_hash: &str) -> String {
    format!("# tool=spinclust version={TOOL_VERSION}\n# seed={seed}\n# config_hash={config_hash}\n")
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

impl ExperimentResult {
    pub fn raw_csv(&self) -> String {
        let mut out = metadata_header(self.metadata.seed, &self.metadata.config_hash);
        out.push_str("n,replicate,score,H\n");
        for gr in &self.grid {
            let reps = gr.scores.first().map_or(0, |s| s.values.len());
            for r in 0..reps {
                for s in &gr.scores {
                    let _ = writeln!(out, "{},{},{},{}", gr.n, r, csv_field(&s.score), s.values[r]);
                }
            }
        }
        out
    }

    pub fn summary_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("summary serializes");
        s.push('\n');
        s
    }

    pub fn plan_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.plan).expect("plan serializes");
        s.push('\n');
        s
    }

    pub fn report_md(&self) -> String {
        let m = &self.metadata;
        let mut out = String::new();
        let _ = writeln!(out, "# Experiment report\n");
        let _ = writeln!(
            out,
            "- tool: spinclust {}\n- seed: {}\n- config hash: `{}`\n- graph: {}\n- model: {:?}\n- replicates per radius: {}\n",
            m.version, m.seed, m.config_hash, self.plan.graph, self.plan.model, self.plan.replicates
        );
        let _ = writeln!(out, "## Per-radius statistics\n");
        let _ = writeln!(out, "| n | w_n | score | mean | variance | Var/w_n | KS p (Lilliefors) | truncated |");
        let _ = writeln!(out, "|---|---|---|---|---|---|---|---|");
        for gr in &self.grid {
            for s in &gr.scores {
                let p = match &s.normality {
                    Outcome::Computed(t) => format!("{:.4}", t.p_value),
                    Outcome::Skipped { .. } => "-".into(),
                };
                let _ = writeln!(
                    out,
                    "| {} | {} | {} | {:.6} | {:.6} | {:.6} | {} | {} |",
                    gr.n,
                    gr.w_n,
                    s.score,
                    s.mean,
                    s.variance,
                    s.variance / gr.w_n as f64,
                    p,
                    s.truncated_replicates
                );
            }
        }
        let _ = writeln!(out, "\n## Variance scaling and direct sigma^2\n");
        let _ = writeln!(out, "| score | slope | slope SE | R^2 | slope > 0 | sigma^2 direct | SE | tail bound |");
        let _ = writeln!(out, "|---|---|---|---|---|---|---|---|");
        for s in &self.scores {
            let (slope, se, r2) = match &s.variance_fit {
                Outcome::Computed(f) => (
                    format!("{:.6}", f.slope),
                    format!("{:.6}", f.slope_se),
                    format!("{:.4}", f.r_squared),
                ),
                Outcome::Skipped { reason } => (reason.clone(), "-".into(), "-".into()),
            };
            let (sd, sdse, tail) = match &s.sigma_direct {
                Outcome::Computed(e) => (
                    format!("{:.6}", e.sigma_squared),
                    format!("{:.6}", e.se),
                    e.tail_bound.map_or("-".into(), |t| format!("{t:.3e}")),
                ),
                Outcome::Skipped { reason } => (reason.clone(), "-".into(), "-".into()),
            };
            let pos = s.slope_positive.map_or("-".to_string(), |b| b.to_string());
            let _ = writeln!(out, "| {} | {slope} | {se} | {r2} | {pos} | {sd} | {sdse} | {tail} |", s.score);
        }
        let _ = writeln!(out, "\n## Covariance matrix\n");
        match &self.covariance {
            Outcome::Computed(c) => {
                let _ = writeln!(out, "w_n = {}, minimum eigenvalue = {:.6e}\n", c.w_n, c.min_eigenvalue);
                for (row, se) in c.matrix.iter().zip(&c.se) {
                    let cells: Vec<String> =
                        row.iter().zip(se).map(|(v, e)| format!("{v:.6} ± {e:.6}")).collect();
                    let _ = writeln!(out, "    {}", cells.join("  "));
                }
            }
            Outcome::Skipped { reason } => {
                let _ = writeln!(out, "not computed: {reason}");
            }
        }
        let _ = writeln!(
            out,
            "\nNormality p-values account for the estimated mean and SD (Lilliefors null); the Kolmogorov p-value in summary.json does not."
        );
        out
    }

    /// Writes `plan.json`, `raw.csv`, `summary.json` and `report.md`,
    /// creating the directory if needed.
    pub fn write_dir(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir)?;
        fs::write(dir.join("plan.json"), self.plan_json())?;
        fs::write(dir.join("raw.csv"), self.raw_csv())?;
        fs::write(dir.join("summary.json"), self.summary_json())?;
        fs::write(dir.join("report.md"), self.report_md())?;
        Ok(())
    }

    pub fn grid_point(&self, n: u32) -> Option<&GridResult> {
        self.grid.iter().find(|g| g.n == n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn plan(text: &str) -> ExperimentPlan {
        ExperimentPlan::parse(text).unwrap()
    }

    const ONES: &str = r#"
graph = "z2"
n_grid = [6]
replicates = 200

[model]
kind = "iid"
p = 0.3

[[scores]]
name = "occupancy"

[[scores]]
name = "occupancy"
"#;

    #[test]
    fn occupancy_mean_and_variance_are_binomial() {
        let res = run(&plan(ONES), 11, 2).unwrap();
        let g = &res.grid[0];
        let w = g.w_n as f64;
        let s = &g.scores[0];
        assert!((s.mean / w - 0.3).abs() < 4.0 * s.mean_se / w);
        assert!((s.variance / w - 0.21).abs() < 4.0 * s.variance_se / w);
        assert_eq!(g.scores[1].score, "occupancy#2");
        let c = res.covariance.computed().unwrap();
        assert_eq!(c.matrix[0][0], c.matrix[0][1]);
        assert_eq!(c.matrix[1][1], c.matrix[1][0]);
    }

    #[test]
    fn results_do_not_depend_on_workers() {
        let p = plan(&ONES.replace("[6]", "[2, 3, 4, 5]").replace("200", "60"));
        let a = run(&p, 5, 1).unwrap();
        let b = run(&p, 5, 4).unwrap();
        assert_eq!(a.raw_csv(), b.raw_csv());
        assert_eq!(a.summary_json(), b.summary_json());
        assert!(a.raw_csv().starts_with("# tool=spinclust"));
    }

    #[test]
    fn writes_all_files() {
        let dir = tempfile::tempdir().unwrap();
        let res = run(&plan(&ONES.replace("200", "50")), 1, 1).unwrap();
        res.write_dir(&dir.path().join("out")).unwrap();
        for f in ["plan.json", "raw.csv", "summary.json", "report.md"] {
            assert!(dir.path().join("out").join(f).exists(), "{f}");
        }
        let echoed: ExperimentPlan =
            serde_json::from_str(&fs::read_to_string(dir.path().join("out/plan.json")).unwrap()).unwrap();
        assert_eq!(echoed.seed, Some(1));
    }
}
