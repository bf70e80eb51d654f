//! Plain-text configuration files.
//!
//! ```text
//! # model=iid(p=0.5)
//! # graph=z2
//! # n=3
//! # seed=49568
//! 0 0
//! 1 -1
//! ```
//!
//! Metadata lines start with `#`; every other non-empty line holds the
//! space-separated coordinates of one occupied site, in window order.

use std::sync::Arc;

use super::{SpinConfiguration, Window};
use crate::cayley::{GroupKind, GroupPoint};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigurationFile {
    pub model: String,
    pub seed: Option<u64>,
    pub config: SpinConfiguration,
}

pub fn write_configuration(model: &str, seed: Option<u64>, config: &SpinConfiguration) -> String {
    let window = config.window();
    let mut out = String::new();
    out.push_str(&format!("# model={model}\n"));
    out.push_str(&format!("# graph={}\n", window.kind()));
    out.push_str(&format!("# n={}\n", window.radius()));
    if let Some(seed) = seed {
        out.push_str(&format!("# seed={seed}\n"));
    }
    for i in config.support() {
        let coords: Vec<String> = window.site(i).coords().iter().map(|c| c.to_string()).collect();
        out.push_str(&coords.join(" "));
        out.push('\n');
    }
    out
}

pub fn parse_configuration(text: &str) -> Result<ConfigurationFile> {
    let mut model = None;
    let mut graph: Option<GroupKind> = None;
    let mut radius: Option<u32> = None;
    let mut seed = None;
    let mut points: Vec<(usize, Vec<i64>)> = Vec::new();

    for (lineno, line) in text.lines().enumerate() {
        let line_no = lineno + 1;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(meta) = line.strip_prefix('#') {
            let Some((key, value)) = meta.trim().split_once('=') else {
                continue;
            };
            let value = value.trim();
            let bad = |what: &str| Error::Parse {
                line: line_no,
                message: format!("invalid {what} `{value}`"),
            };
            match key.trim() {
                "model" => model = Some(value.to_string()),
                "graph" => graph = Some(value.parse().map_err(|_| bad("graph"))?),
                "n" => radius = Some(value.parse().map_err(|_| bad("radius"))?),
                "seed" => seed = Some(value.parse().map_err(|_| bad("seed"))?),
                _ => {}
            }
            continue;
        }
        let coords = line
            .split_whitespace()
            .map(|t| t.parse::<i64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| Error::Parse {
                line: line_no,
                message: format!("bad coordinate: {e}"),
            })?;
        points.push((line_no, coords));
    }

    let missing = |what: &str| Error::Parse {
        line: 0,
        message: format!("missing `# {what}=` header"),
    };
    let kind = graph.ok_or_else(|| missing("graph"))?;
    let n = radius.ok_or_else(|| missing("n"))?;
    let window = Window::for_kind(kind, n)?;
    let mut sites = Vec::with_capacity(points.len());
    for (line, coords) in points {
        let g = GroupPoint(coords);
        kind.check(&g).map_err(|e| Error::Parse {
            line,
            message: e.to_string(),
        })?;
        let i = window.index_of(&g).ok_or(Error::Parse {
            line,
            message: format!("site {g} lies outside W_{n}"),
        })?;
        sites.push(i);
    }
    Ok(ConfigurationFile {
        model: model.unwrap_or_default(),
        seed,
        config: SpinConfiguration::from_sites(Arc::clone(&window), sites),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spin::{sample_iid, SeedPolicy};
    use proptest::prelude::*;

    #[test]
    fn parse_rejects_out_of_window() {
        let text = "# graph=z2\n# n=1\n3 3\n";
        assert!(matches!(parse_configuration(text), Err(Error::Parse { line: 3, .. })));
        let text = "# graph=z2\n1 0\n";
        assert!(parse_configuration(text).is_err());
    }

    proptest! {
        #[test]
        fn write_parse_write_is_identity(seed in any::<u64>(), p in 0.0f64..=1.0, n in 0u32..6) {
            let w = Window::for_kind(GroupKind::IntegerLattice(2), n).unwrap();
            let c = sample_iid(&w, p, &mut SeedPolicy::new(seed).stream(0));
            let text = write_configuration("iid", Some(seed), &c);
            let back = parse_configuration(&text).unwrap();
            prop_assert_eq!(&back.config, &c);
            prop_assert_eq!(write_configuration(&back.model, back.seed, &back.config), text);
        }
    }
}
