//! `spinclust` command-line entry point.

mod args;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::Parser;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use args::{Cli, Command, Resolved, SetupFile, DEFAULT_SEED};
use spinclust::cayley::CayleyGraph;
use spinclust::cltlab::{self, config_hash_of, metadata_header, ExperimentPlan, TOOL_VERSION};
use spinclust::moments::{
    clustering_gap, estimate_correlation, fme_expansion_check, pooled_pair_gaps, sample_cumulants,
    void_probability_check, FmeFunctional,
};
use spinclust::scores::{total_mass, ScoreFunction};
use spinclust::spin::io::{parse_configuration, write_configuration};
use spinclust::spin::{SeedPolicy, SpinConfiguration, Window};
use spinclust::topology::{betti_csv, build_complex};
use spinclust::{Error, Result};

const FME_TOLERANCE: f64 = 1e-9;
const POOLED_BATCHES: usize = 20;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_validation() { 1 } else { 2 })
        }
    }
}

struct Context<'a> {
    cli: &'a Cli,
    seed: u64,
}

impl Context<'_> {
    fn seeds(&self) -> SeedPolicy {
        SeedPolicy::new(self.seed)
    }

    fn log(&self, msg: impl AsRef<str>) {
        if self.cli.verbose > 0 {
            eprintln!("{}", msg.as_ref());
        }
    }

    fn csv(&self, params: &impl Serialize, body: &str, default_name: &str) -> Result<()> {
        let mut text = metadata_header(self.seed, &config_hash_of(params));
        text.push_str(body);
        self.emit(&text, default_name)
    }

    fn json(&self, params: &impl Serialize, result: &impl Serialize, default_name: &str) -> Result<()> {
        let doc = json!({
            "metadata": {
                "tool": "spinclust",
                "version": TOOL_VERSION,
                "seed": self.seed,
                "config_hash": config_hash_of(params),
            },
            "parameters": params,
            "result": result,
        });
        let mut text = serde_json::to_string_pretty(&doc)?;
        text.push('\n');
        self.emit(&text, default_name)
    }

    /// Writes to `--out` (a directory when it has no extension) or stdout.
    fn emit(&self, text: &str, default_name: &str) -> Result<()> {
        match &self.cli.out {
            Some(out) => {
                let path = output_path(out, default_name)?;
                fs::write(&path, text)?;
                self.log(format!("wrote {}", path.display()));
            }
            None => {
                let mut stdout = std::io::stdout().lock();
                stdout.write_all(text.as_bytes())?;
            }
        }
        Ok(())
    }
}

fn output_path(out: &Path, default_name: &str) -> Result<PathBuf> {
    if out.extension().is_some() && !out.is_dir() {
        if let Some(parent) = out.parent().filter(|p| !p.as_os_str().is_empty()) {
            fs::create_dir_all(parent)?;
        }
        Ok(out.to_path_buf())
    } else {
        fs::create_dir_all(out)?;
        Ok(out.join(default_name))
    }
}

fn read_config_file(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Config {
        path: path.display().to_string(),
        message: format!("cannot read configuration file: {e}"),
    })
}

fn setup_file(cli: &Cli) -> Result<Option<SetupFile>> {
    let Some(path) = &cli.config else { return Ok(None) };
    let text = read_config_file(path)?;
    let file: SetupFile = toml::from_str(&text).map_err(|e| Error::Config {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    file.model.validate()?;
    Ok(Some(file))
}

fn lookup(window: &Window, coords: &[i64]) -> Result<usize> {
    window.lookup(coords).ok_or(Error::OutsideWindow)
}

/// Draws `replicates` configurations; replicate `r` uses `seeds.replicate(0, r)`.
fn draw(ctx: &Context, setup: &Resolved, replicates: usize) -> Result<(Arc<Window>, Vec<SpinConfiguration>)> {
    let window = Window::for_kind(setup.graph, setup.n)?;
    let model = setup.model.prepare(&window)?;
    let seeds = ctx.seeds();
    ctx.log(format!("sampling {replicates} replicates of {} on {} W_{}", setup.model, setup.graph, setup.n));
    let configs = cltlab::with_workers(ctx.cli.workers, || {
        (0..replicates)
            .into_par_iter()
            .map(|r| model.sample(&mut seeds.replicate(0, r as u32)))
            .collect()
    })?;
    Ok((window, configs))
}

fn execute(cli: &Cli) -> Result<()> {
    if let Command::Clt = cli.command {
        return run_clt(cli);
    }
    let ctx = Context {
        cli,
        seed: cli.seed.unwrap_or(DEFAULT_SEED),
    };
    match &cli.command {
        Command::Growth { graph, nmax } => {
            let rows = CayleyGraph::new(*graph).growth_report(*nmax)?;
            let params = json!({"command": "growth", "graph": graph, "nmax": nmax});
            ctx.csv(&params, &spinclust::cayley::growth_csv(&rows), "growth.csv")
        }
        Command::Sample { setup, replicates } => {
            let setup = setup.resolve(setup_file(cli)?.as_ref())?;
            let (_, configs) = draw(&ctx, &setup, *replicates)?;
            let params = json!({"command": "sample", "setup": setup, "replicates": replicates});
            let hash = config_hash_of(&params);
            let model = setup.model.to_string();
            let files: Vec<String> = configs
                .iter()
                .map(|c| {
                    format!(
                        "# tool=spinclust version={TOOL_VERSION}\n# config_hash={hash}\n{}",
                        write_configuration(&model, Some(ctx.seed), c)
                    )
                })
                .collect();
            match &cli.out {
                Some(dir) => {
                    fs::create_dir_all(dir)?;
                    for (r, text) in files.iter().enumerate() {
                        fs::write(dir.join(format!("replicate_{r:04}.txt")), text)?;
                    }
                    ctx.log(format!("wrote {} files to {}", files.len(), dir.display()));
                    Ok(())
                }
                None => {
                    print!("{}", files.join("\n"));
                    Ok(())
                }
            }
        }
        Command::Stats {
            setup,
            replicates,
            scores,
        } => {
            let setup = setup.resolve(setup_file(cli)?.as_ref())?;
            let built: Vec<Arc<dyn ScoreFunction>> =
                scores.iter().map(|s| s.build(setup.graph)).collect::<Result<_>>()?;
            let (_, configs) = draw(&ctx, &setup, *replicates)?;
            let rows: Vec<Vec<(f64, usize)>> = cltlab::with_workers(cli.workers, || {
                configs
                    .par_iter()
                    .map(|c| {
                        built
                            .iter()
                            .map(|s| {
                                let m = total_mass(s.as_ref(), c);
                                (m.value, m.truncated_sites)
                            })
                            .collect()
                    })
                    .collect()
            })?;
            let mut body = String::from("replicate,score,H,truncated_sites\n");
            for (r, row) in rows.iter().enumerate() {
                for (spec, (h, t)) in scores.iter().zip(row) {
                    body.push_str(&format!("{r},\"{spec}\",{h},{t}\n"));
                }
            }
            let params = json!({"command": "stats", "setup": setup, "replicates": replicates, "scores": scores});
            ctx.csv(&params, &body, "stats.csv")
        }
        Command::Correlate {
            setup,
            replicates,
            p,
            q,
            pooled,
        } => {
            let setup = setup.resolve(setup_file(cli)?.as_ref())?;
            if p.is_none() && pooled.is_empty() {
                return Err(Error::Config {
                    path: "p".into(),
                    message: "pass --p (and optionally --q) or --pooled".into(),
                });
            }
            let (window, configs) = draw(&ctx, &setup, *replicates)?;
            let sites = |pts: &args::Points| -> Result<Vec<usize>> {
                pts.0.iter().map(|c| lookup(&window, c)).collect()
            };
            let mut result = serde_json::Map::new();
            if let Some(p) = p {
                let p_sites = sites(p)?;
                match q {
                    Some(q) => {
                        let gap = clustering_gap(&configs, &p_sites, &sites(q)?, &ctx.seeds())?;
                        result.insert("clustering_gap".into(), serde_json::to_value(gap)?);
                    }
                    None => {
                        let est = estimate_correlation(&configs, &p_sites)?;
                        result.insert("correlation".into(), serde_json::to_value(est)?);
                    }
                }
            }
            if !pooled.is_empty() {
                let inner = setup.n.saturating_sub(pooled.iter().copied().max().unwrap_or(0));
                let gaps = pooled_pair_gaps(&configs, pooled, inner, POOLED_BATCHES)?;
                result.insert("pooled_gaps".into(), serde_json::to_value(gaps)?);
            }
            let params = json!({
                "command": "correlate", "setup": setup, "replicates": replicates,
                "p": p, "q": q, "pooled": pooled,
            });
            ctx.json(&params, &result, "correlate.json")
        }
        Command::Cumulants { input, order } => {
            let text = read_config_file(input)?;
            let values = parse_values(&text)?;
            let cumulants = sample_cumulants(&values, *order, &ctx.seeds())?;
            let params = json!({"command": "cumulants", "input": input, "order": order, "values": values.len()});
            ctx.json(&params, &cumulants, "cumulants.json")
        }
        Command::FmeVerify {
            graph,
            n,
            p,
            functional,
        } => {
            let window = Window::for_kind(*graph, *n)?;
            let list: Vec<FmeFunctional> = match functional {
                Some(name) => vec![name.parse()?],
                None => FmeFunctional::CATALOG.to_vec(),
            };
            let mut body = String::from("functional,lhs,rhs,diff\n");
            let mut worst = 0.0f64;
            for f in list {
                let psi = f.functional(&window)?;
                let check = fme_expansion_check(psi.as_ref(), &window, *p)?;
                worst = worst.max(check.diff);
                body.push_str(&format!("{},{},{},{:e}\n", f.name(), check.lhs, check.rhs, check.diff));
            }
            let params = json!({"command": "fme-verify", "graph": graph, "n": n, "p": p, "functional": functional});
            ctx.csv(&params, &body, "fme.csv")?;
            if worst > FME_TOLERANCE {
                return Err(Error::VerificationFailed(format!(
                    "expansion differs from enumeration by {worst:e} (> {FME_TOLERANCE:e})"
                )));
            }
            Ok(())
        }
        Command::Void {
            setup,
            replicates,
            z,
            t,
        } => {
            let setup = setup.resolve(setup_file(cli)?.as_ref())?;
            let (window, configs) = draw(&ctx, &setup, *replicates)?;
            let centre = match z {
                Some(c) => lookup(&window, c)?,
                None => 0,
            };
            let iid_p = match setup.model {
                spinclust::spin::ModelSpec::Iid { p } => Some(p),
                _ => None,
            };
            let report = void_probability_check(&configs, centre, t, iid_p)?;
            let params = json!({"command": "void", "setup": setup, "replicates": replicates, "z": z, "t": t});
            ctx.json(&params, &report, "void.json")
        }
        Command::Betti {
            input,
            setup,
            replicates,
        } => {
            let (params, configs) = match input {
                Some(path) => {
                    let file = parse_configuration(&read_config_file(path)?)?;
                    (json!({"command": "betti", "input": path}), vec![file.config])
                }
                None => {
                    let setup = setup.resolve(setup_file(cli)?.as_ref())?;
                    let (_, configs) = draw(&ctx, &setup, *replicates)?;
                    (json!({"command": "betti", "setup": setup, "replicates": replicates}), configs)
                }
            };
            let rows = configs
                .iter()
                .enumerate()
                .map(|(r, c)| Ok((r, c.window().radius(), build_complex(c)?.betti_numbers())))
                .collect::<Result<Vec<_>>>()?;
            ctx.csv(&params, &betti_csv(&rows), "betti.csv")
        }
        Command::Clt => unreachable!("handled above"),
    }
}

fn run_clt(cli: &Cli) -> Result<()> {
    let path = cli.config.as_ref().ok_or_else(|| Error::Config {
        path: "config".into(),
        message: "clt needs --config <plan.toml>".into(),
    })?;
    let plan = ExperimentPlan::parse(&read_config_file(path)?).map_err(|e| match e {
        Error::Config { path: key, message } => Error::Config {
            path: format!("{}: {key}", path.display()),
            message,
        },
        other => other,
    })?;
    let seed = cli.seed.or(plan.seed).unwrap_or(DEFAULT_SEED);
    let out = cli.out.clone().unwrap_or_else(|| PathBuf::from("spinclust-out"));
    if cli.verbose > 0 {
        eprintln!(
            "running {} radii x {} replicates x {} scores (seed {seed})",
            plan.n_grid.len(),
            plan.replicates,
            plan.scores.len()
        );
    }
    let result = cltlab::run(&plan, seed, cli.workers)?;
    result.write_dir(&out)?;
    println!("{}", out.display());
    Ok(())
}

/// Numbers one per line; `#` lines and non-numeric header lines are
/// skipped, and comma-separated lines contribute their last field.
fn parse_values(text: &str) -> Result<Vec<f64>> {
    let mut values = Vec::new();
    let mut seen_numeric = false;
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let field = line.rsplit(',').next().unwrap_or(line).trim().trim_matches('"');
        match field.parse::<f64>() {
            Ok(v) => {
                seen_numeric = true;
                values.push(v);
            }
            Err(_) if !seen_numeric => continue,
            Err(e) => {
                return Err(Error::Parse {
                    line: i + 1,
                    message: format!("`{field}` is not a number: {e}"),
                })
            }
        }
    }
    Ok(values)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn values_skip_headers_and_metadata() {
        let v = parse_values("# seed=1\nn,replicate,score,H\n8,0,x,1.5\n8,1,x,2\n").unwrap();
        assert_eq!(v, vec![1.5, 2.0]);
        assert!(parse_values("1\nabc\n").is_err());
    }
}
