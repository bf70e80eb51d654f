//! Command-line definitions and parsers for the small value formats used
//! by the subcommands.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use spinclust::cayley::GroupKind;
use spinclust::scores::ScoreSpec;
use spinclust::spin::ModelSpec;
use spinclust::{Error, Result};

pub const DEFAULT_SEED: u64 = 0xC1A0;

#[derive(Debug, Parser)]
#[command(name = "spinclust", version, about = "Clustering spin models on Cayley graphs")]
pub struct Cli {
    /// Master seed (decimal or 0x-prefixed hex); defaults to 0xC1A0.
    #[arg(long, global = true, value_parser = parse_seed)]
    pub seed: Option<u64>,

    /// Worker threads; 0 uses one per core.
    #[arg(long, global = true, default_value_t = 0)]
    pub workers: usize,

    /// Output file or directory; created if missing.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// TOML configuration file.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Progress messages on stderr (repeat for more).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Ball sizes and boundary ratios `n,w_n,boundary,ratio`.
    Growth {
        #[arg(long, default_value = "z2", value_parser = parse_graph)]
        graph: GroupKind,
        #[arg(long, default_value_t = 10)]
        nmax: u32,
    },
    /// Draw configurations and write them as text files.
    Sample {
        #[command(flatten)]
        setup: Setup,
        #[arg(long, default_value_t = 1)]
        replicates: usize,
    },
    /// Total masses `H` of scores over replicates.
    Stats {
        #[command(flatten)]
        setup: Setup,
        #[arg(long, default_value_t = 100)]
        replicates: usize,
        /// Score: a short name (occupancy, nn, beta0, beta1, V0, V1, V2)
        /// or an inline TOML table such as `{name = "betti", k = 1}`.
        #[arg(long = "score", required = true, value_parser = parse_score)]
        scores: Vec<ScoreSpec>,
    },
    /// Correlation `ρ(P)` or the clustering gap between `P` and `Q`.
    Correlate {
        #[command(flatten)]
        setup: Setup,
        #[arg(long, default_value_t = 10_000)]
        replicates: usize,
        /// Points of `P` as `x,y;x,y`.
        #[arg(long, value_parser = parse_points)]
        p: Option<Points>,
        /// Points of `Q` as `x,y;x,y`; when given, reports the clustering gap.
        #[arg(long, value_parser = parse_points)]
        q: Option<Points>,
        /// Pool single-site gaps over all pairs at these distances.
        #[arg(long, value_delimiter = ',')]
        pooled: Vec<u32>,
    },
    /// k-statistics with bootstrap standard errors.
    Cumulants {
        /// File of values, one per line; CSV input uses the last column.
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 4)]
        order: usize,
    },
    /// Factorial moment expansion against exhaustive enumeration.
    #[command(name = "fme-verify")]
    FmeVerify {
        #[arg(long, default_value = "z2", value_parser = parse_graph)]
        graph: GroupKind,
        #[arg(long, default_value_t = 1)]
        n: u32,
        #[arg(long)]
        p: f64,
        /// Catalog entry, or every entry when omitted.
        #[arg(long)]
        functional: Option<String>,
    },
    /// Void probabilities of balls around a site.
    Void {
        #[command(flatten)]
        setup: Setup,
        #[arg(long, default_value_t = 10_000)]
        replicates: usize,
        /// Ball centre as `x,y`.
        #[arg(long, value_parser = parse_point)]
        z: Option<Vec<i64>>,
        #[arg(long, value_delimiter = ',', default_values_t = [1u32, 2, 3, 4])]
        t: Vec<u32>,
    },
    /// Full CLT experiment from `--config`.
    Clt,
    /// Betti numbers of a configuration file or of sampled replicates.
    Betti {
        /// Configuration file written by `sample`.
        #[arg(long)]
        input: Option<PathBuf>,
        #[command(flatten)]
        setup: Setup,
        #[arg(long, default_value_t = 1)]
        replicates: usize,
    },
}

/// Graph, radius and model, either from flags or from `--config`.
#[derive(Debug, Clone, Args)]
pub struct Setup {
    #[arg(long, value_parser = parse_graph)]
    pub graph: Option<GroupKind>,
    /// Window radius.
    #[arg(long)]
    pub n: Option<u32>,
    /// Model as an inline TOML table, e.g. `{kind = "iid", p = 0.5}`.
    #[arg(long, value_parser = parse_model)]
    pub model: Option<ModelSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Points(pub Vec<Vec<i64>>);

pub fn parse_seed(s: &str) -> std::result::Result<u64, String> {
    let t = s.trim();
    let parsed = match t.strip_prefix("0x").or_else(|| t.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(hex, 16),
        None => t.parse(),
    };
    parsed.map_err(|e| format!("invalid seed `{s}`: {e}"))
}

pub fn parse_graph(s: &str) -> std::result::Result<GroupKind, String> {
    s.parse::<GroupKind>().map_err(|e| e.to_string())
}

pub fn parse_point(s: &str) -> std::result::Result<Vec<i64>, String> {
    s.split(',')
        .map(|c| c.trim().parse::<i64>().map_err(|e| format!("invalid coordinate `{c}`: {e}")))
        .collect()
}

pub fn parse_points(s: &str) -> std::result::Result<Points, String> {
    s.split(';').filter(|p| !p.trim().is_empty()).map(parse_point).collect::<std::result::Result<_, _>>().map(Points)
}

fn inline_table<T: for<'de> Deserialize<'de>>(key: &str, s: &str) -> std::result::Result<T, String> {
    #[derive(Deserialize)]
    struct Wrapper<T> {
        v: T,
    }
    let text = format!("v = {s}");
    toml::from_str::<Wrapper<T>>(&text)
        .map(|w| w.v)
        .map_err(|e| format!("invalid {key} `{s}`: {}", e.message()))
}

pub fn parse_model(s: &str) -> std::result::Result<ModelSpec, String> {
    let model: ModelSpec = inline_table("model", s)?;
    model.validate().map_err(|e| e.to_string())?;
    Ok(model)
}

pub fn parse_score(s: &str) -> std::result::Result<ScoreSpec, String> {
    let t = s.trim();
    if t.starts_with('{') {
        return inline_table("score", t);
    }
    Ok(match t {
        "occupancy" => ScoreSpec::Occupancy {},
        "nn" => ScoreSpec::NearestNeighbour {},
        "beta0" => ScoreSpec::Betti { k: 0 },
        "beta1" => ScoreSpec::Betti { k: 1 },
        "V0" | "v0" => ScoreSpec::IntrinsicVolume { j: 0 },
        "V1" | "v1" => ScoreSpec::IntrinsicVolume { j: 1 },
        "V2" | "v2" => ScoreSpec::IntrinsicVolume { j: 2 },
        other => return Err(format!("unknown score `{other}`")),
    })
}

/// Plain configuration for the sampling subcommands.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SetupFile {
    pub graph: GroupKind,
    pub n: u32,
    pub model: ModelSpec,
}

/// Effective graph, radius and model after merging flags over `--config`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Resolved {
    pub graph: GroupKind,
    pub n: u32,
    pub model: ModelSpec,
}

impl Setup {
    pub fn resolve(&self, file: Option<&SetupFile>) -> Result<Resolved> {
        let missing = |what: &str| Error::Config {
            path: what.to_string(),
            message: format!("pass --{what} or set `{what}` in --config"),
        };
        let graph = self.graph.or(file.map(|f| f.graph)).ok_or_else(|| missing("graph"))?;
        let n = self.n.or(file.map(|f| f.n)).ok_or_else(|| missing("n"))?;
        let model = self
            .model
            .clone()
            .or_else(|| file.map(|f| f.model.clone()))
            .ok_or_else(|| missing("model"))?;
        Ok(Resolved { graph, n, model })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeds_accept_hex_and_decimal() {
        assert_eq!(parse_seed("0xC1A0"), Ok(49568));
        assert_eq!(parse_seed("17"), Ok(17));
        assert!(parse_seed("x").is_err());
    }

    #[test]
    fn points_and_scores() {
        assert_eq!(parse_points("0,0;3,-1"), Ok(Points(vec![vec![0, 0], vec![3, -1]])));
        assert_eq!(parse_score("beta1"), Ok(ScoreSpec::Betti { k: 1 }));
        assert_eq!(parse_score("{name = \"betti\", k = 0}"), Ok(ScoreSpec::Betti { k: 0 }));
        assert!(parse_score("nope").is_err());
        assert_eq!(parse_model("{kind = \"iid\", p = 0.25}"), Ok(ModelSpec::Iid { p: 0.25 }));
        assert!(parse_model("{kind = \"iid\", p = 2.0}").is_err());
    }
}
