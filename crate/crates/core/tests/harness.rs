use std::collections::BTreeSet;
use std::fs;
use std::path::PathBuf;

use spinclust::cltlab::{run, ExperimentPlan, Outcome};

fn repo(rel: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..").join(rel)
}

#[test]
fn committed_configs_parse_and_round_trip() {
    for name in ["configs/iid_beta0.toml", "configs/intrinsic_volumes.toml"] {
        let plan = ExperimentPlan::parse(&fs::read_to_string(repo(name)).unwrap()).unwrap();
        assert_eq!(ExperimentPlan::parse(&plan.to_toml()).unwrap(), plan, "{name}");
    }
}

#[test]
fn schema_lists_every_plan_key() {
    let schema: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(repo("schema/plan.schema.json")).unwrap()).unwrap();
    let documented: BTreeSet<String> = schema["properties"].as_object().unwrap().keys().cloned().collect();
    let mut plan = ExperimentPlan::parse(&fs::read_to_string(repo("configs/iid_beta0.toml")).unwrap()).unwrap();
    plan.rho_max = Some(2);
    let emitted: BTreeSet<String> =
        serde_json::to_value(&plan).unwrap().as_object().unwrap().keys().cloned().collect();
    assert_eq!(documented, emitted);
}

#[test]
fn constant_zero_score_has_zero_slope() {
    let plan = ExperimentPlan::parse(
        "graph = \"z2\"\nn_grid = [2, 3, 4, 5]\nreplicates = 50\n[model]\nkind = \"iid\"\np = 0.5\n\
         [[scores]]\nname = \"constant\"\nvalue = 0.0\n",
    )
    .unwrap();
    let res = run(&plan, 3, 2).unwrap();
    let Outcome::Computed(fit) = &res.scores[0].variance_fit else { panic!("fit skipped") };
    assert_eq!(fit.slope, 0.0);
    assert!(matches!(res.grid[3].scores[0].normality, Outcome::Skipped { .. }));
}

#[test]
fn occupancy_slope_and_direct_sigma_agree() {
    let plan = ExperimentPlan::parse(
        "graph = \"z2\"\nn_grid = [4, 6, 8, 10]\nreplicates = 400\nrho_max = 2\n[model]\nkind = \"iid\"\np = 0.5\n\
         [[scores]]\nname = \"occupancy\"\n",
    )
    .unwrap();
    let res = run(&plan, 9, 0).unwrap();
    let fit = res.scores[0].variance_fit.computed().unwrap();
    assert!((fit.slope - 0.25).abs() < 4.0 * fit.slope_se, "{fit:?}");
    let direct = res.scores[0].sigma_direct.computed().unwrap();
    let band = 4.0 * (fit.slope_se.powi(2) + direct.se.powi(2)).sqrt();
    assert!((direct.sigma_squared - fit.slope).abs() < band);
    assert_eq!(res.scores[0].slope_positive, Some(true));
}
