//! Experiment plans: a TOML document naming the model, graph, window
//! radii, replicate count and scores.
//!
//! ```toml
//! graph = "z2"
//! n_grid = [8, 12, 16, 20, 24]
//! replicates = 500
//!
//! [model]
//! kind = "iid"
//! p = 0.5
//!
//! [[scores]]
//! name = "betti"
//! k = 0
//! ```

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::cayley::GroupKind;
use crate::error::{Error, Result};
use crate::scores::ScoreSpec;
use crate::spin::ModelSpec;

pub const MIN_REPLICATES: usize = 50;

fn default_variance_r2() -> f64 {
    0.98
}

fn default_normality_p() -> f64 {
    0.01
}

/// Pass/fail thresholds recorded alongside the results.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Thresholds {
    #[serde(default = "default_variance_r2")]
    pub variance_r2: f64,
    #[serde(default = "default_normality_p")]
    pub normality_p: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds {
            variance_r2: default_variance_r2(),
            normality_p: default_normality_p(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentPlan {
    pub graph: GroupKind,
    pub n_grid: Vec<u32>,
    pub replicates: usize,
    /// Master seed; the command line may override it.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Truncation radius of the direct `σ²` estimate; defaults to `n_max / 4`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho_max: Option<u32>,
    pub model: ModelSpec,
    pub scores: Vec<ScoreSpec>,
    #[serde(default)]
    pub thresholds: Thresholds,
}

impl ExperimentPlan {
    /// Parses and validates; every error names the offending key path.
    pub fn parse(text: &str) -> Result<Self> {
        let de = toml::Deserializer::parse(text).map_err(|e| Error::Config {
            path: String::new(),
            message: e.to_string(),
        })?;
        let plan: ExperimentPlan = serde_path_to_error::deserialize(de).map_err(|e| Error::Config {
            path: e.path().to_string(),
            message: e.inner().message().to_string(),
        })?;
        plan.validate()?;
        Ok(plan)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("plan serializes to TOML")
    }

    pub fn validate(&self) -> Result<()> {
        let config = |path: &str, message: String| Error::Config {
            path: path.to_string(),
            message,
        };
        if self.n_grid.is_empty() {
            return Err(config("n_grid", "must list at least one radius".into()));
        }
        if let Some(w) = self.n_grid.windows(2).find(|w| w[0] >= w[1]) {
            return Err(config(
                "n_grid",
                format!("radii must be strictly increasing ({} then {})", w[0], w[1]),
            ));
        }
        if self.replicates < MIN_REPLICATES {
            return Err(config(
                "replicates",
                format!("{} is below the minimum of {MIN_REPLICATES}", self.replicates),
            ));
        }
        if self.scores.is_empty() {
            return Err(config("scores", "must list at least one score".into()));
        }
        self.model.validate().map_err(|e| match e {
            Error::InvalidParameter { name, reason } => Error::Config { path: name, message: reason },
            other => other,
        })?;
        for (i, s) in self.scores.iter().enumerate() {
            s.build(self.graph).map_err(|e| config(&format!("scores[{i}]"), e.to_string()))?;
        }
        for (key, v) in [
            ("thresholds.variance_r2", self.thresholds.variance_r2),
            ("thresholds.normality_p", self.thresholds.normality_p),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return Err(config(key, format!("{v} is outside [0, 1]")));
            }
        }
        Ok(())
    }

    /// SHA-256 of the canonical JSON form of the plan, as lowercase hex.
    pub fn config_hash(&self) -> String {
        config_hash_of(self)
    }
}

/// SHA-256 of the compact JSON form of any serializable configuration.
pub fn config_hash_of<T: Serialize + ?Sized>(value: &T) -> String {
    let canonical = serde_json::to_string(value).expect("configuration serializes to JSON");
    Sha256::digest(canonical.as_bytes())
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
graph = "z2"
n_grid = [2, 4]
replicates = 50

[model]
kind = "iid"
p = 0.5

[[scores]]
name = "occupancy"
"#;

    fn path_of(text: &str) -> String {
        match ExperimentPlan::parse(text) {
            Err(Error::Config { path, .. }) => path,
            other => panic!("expected a config error, got {other:?}"),
        }
    }

    #[test]
    fn round_trip_is_fixed_point() {
        let plan = ExperimentPlan::parse(MINIMAL).unwrap();
        let text = plan.to_toml();
        let again = ExperimentPlan::parse(&text).unwrap();
        assert_eq!(plan, again);
        assert_eq!(text, again.to_toml());
    }

    #[test]
    fn errors_name_key_paths() {
        assert_eq!(path_of(&MINIMAL.replace("p = 0.5", "p = 1.5")), "model.p");
        assert_eq!(path_of(&MINIMAL.replace("[2, 4]", "[8, 8]")), "n_grid");
        assert_eq!(path_of(&MINIMAL.replace("replicates = 50", "replicates = 10")), "replicates");
        assert_eq!(path_of(&format!("bogus = 1\n{MINIMAL}")), "bogus");
        assert_eq!(path_of(&format!("{MINIMAL}extra = 1\n")), "scores[0]");
        assert_eq!(path_of(&MINIMAL.replace("replicates = 50", "replicates = \"many\"")), "replicates");
    }

    #[test]
    fn hash_is_stable_and_sensitive() {
        let a = ExperimentPlan::parse(MINIMAL).unwrap();
        let b = ExperimentPlan::parse(&MINIMAL.replace("p = 0.5", "p = 0.25")).unwrap();
        assert_eq!(a.config_hash(), a.clone().config_hash());
        assert_ne!(a.config_hash(), b.config_hash());
        assert_eq!(a.config_hash().len(), 64);
    }
}
