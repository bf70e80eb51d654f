//! Score selection by name and parameters, as written in experiment configs.
//!
//! ```toml
//! [[scores]]
//! name = "subgraph"
//! template = [[0, 0], [1, 0]]
//! ```

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{
    component_count_score, nn_distance_score, subgraph_count_score, truncate_to_local, ConstantScore,
    HalfSpaceScore, IntrinsicVolumeScore, PatternTemplate, ScoreFunction,
};
use crate::cayley::GroupKind;
use crate::error::{Error, Result};
use crate::topology::BettiScore;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case", deny_unknown_fields)]
pub enum ScoreSpec {
    /// `ξ ≡ 1` on occupied sites; `H` is the number of occupied sites.
    Occupancy {},
    Constant { value: f64 },
    Subgraph { template: PatternTemplate },
    Component { template: PatternTemplate },
    IntrinsicVolume { j: usize },
    NearestNeighbour {},
    Betti { k: usize },
    Truncated { inner: Box<ScoreSpec>, t: u32 },
    HalfSpace { inner: Box<ScoreSpec>, positive: bool },
}

impl ScoreSpec {
    pub fn build(&self, kind: GroupKind) -> Result<Arc<dyn ScoreFunction>> {
        let lattice = |op: &'static str| {
            kind.lattice_dim().ok_or(Error::UnsupportedGraph {
                graph: kind.to_string(),
                operation: op,
            })
        };
        let dim_matches = |t: &PatternTemplate, d: usize| {
            if t.dim() == d {
                Ok(())
            } else {
                Err(Error::DimensionMismatch {
                    expected: d,
                    found: t.dim(),
                })
            }
        };
        Ok(match self {
            ScoreSpec::Occupancy {} => Arc::new(ConstantScore { value: 1.0 }),
            ScoreSpec::Constant { value } => Arc::new(ConstantScore { value: *value }),
            ScoreSpec::Subgraph { template } => {
                dim_matches(template, lattice("subgraph counts")?)?;
                Arc::new(subgraph_count_score(template.clone()))
            }
            ScoreSpec::Component { template } => {
                dim_matches(template, lattice("component counts")?)?;
                Arc::new(component_count_score(template.clone()))
            }
            ScoreSpec::IntrinsicVolume { j } => {
                let d = lattice("intrinsic volumes")?;
                if d != 2 {
                    return Err(Error::UnsupportedGraph {
                        graph: kind.to_string(),
                        operation: "intrinsic volumes",
                    });
                }
                Arc::new(IntrinsicVolumeScore::new(*j)?)
            }
            ScoreSpec::NearestNeighbour {} => Arc::new(nn_distance_score(lattice("nearest-neighbour score")?)),
            ScoreSpec::Betti { k } => Arc::new(BettiScore::new(*k, lattice("Betti scores")?)?),
            ScoreSpec::Truncated { inner, t } => Arc::new(truncate_to_local(inner.build(kind)?, *t)),
            ScoreSpec::HalfSpace { inner, positive } => {
                lattice("half-space restriction")?;
                Arc::new(HalfSpaceScore::new(inner.build(kind)?, *positive))
            }
        })
    }
}

impl fmt::Display for ScoreSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScoreSpec::Occupancy {} => f.write_str("occupancy"),
            ScoreSpec::Constant { value } => write!(f, "constant({value})"),
            ScoreSpec::Subgraph { template } => write!(f, "subgraph(k={})", template.cells()),
            ScoreSpec::Component { template } => write!(f, "component(k={})", template.cells()),
            ScoreSpec::IntrinsicVolume { j } => write!(f, "V{j}"),
            ScoreSpec::NearestNeighbour {} => f.write_str("nn"),
            ScoreSpec::Betti { k } => write!(f, "beta{k}"),
            ScoreSpec::Truncated { inner, t } => write!(f, "{inner}|R<={t}"),
            ScoreSpec::HalfSpace { inner, positive } => {
                write!(f, "{inner}[x1{}0]", if *positive { ">" } else { "<" })
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[derive(Deserialize)]
    struct Wrapper {
        scores: Vec<ScoreSpec>,
    }

    #[test]
    fn parses_and_builds() {
        let text = r#"
            [[scores]]
            name = "subgraph"
            template = [[0, 0], [1, 0]]

            [[scores]]
            name = "truncated"
            t = 3
            inner = { name = "nearest_neighbour" }

            [[scores]]
            name = "occupancy"
        "#;
        let w: Wrapper = toml::from_str(text).unwrap();
        assert_eq!(w.scores.len(), 3);
        for s in &w.scores {
            s.build(GroupKind::IntegerLattice(2)).unwrap();
        }
    }

    #[test]
    fn rejects_unknown_fields_and_bad_templates() {
        assert!(toml::from_str::<Wrapper>("[[scores]]\nname = \"occupancy\"\nextra = 1\n").is_err());
        assert!(toml::from_str::<Wrapper>("[[scores]]\nname = \"subgraph\"\ntemplate = [[0,0],[4,0]]\n").is_err());
        let s = ScoreSpec::Subgraph {
            template: PatternTemplate::adjacent_pair(3),
        };
        assert!(matches!(
            s.build(GroupKind::IntegerLattice(2)),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(ScoreSpec::NearestNeighbour {}.build(GroupKind::Heisenberg3).is_err());
    }
}
