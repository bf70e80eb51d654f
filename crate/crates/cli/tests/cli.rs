use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn spinclust(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spinclust"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn data_rows(text: &str) -> Vec<String> {
    text.lines().filter(|l| !l.starts_with('#')).skip(1).map(str::to_string).collect()
}

fn repo_file(rel: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..").join(rel).display().to_string()
}

#[test]
fn growth_on_z1_counts_intervals() {
    let o = spinclust(&["growth", "--graph", "z1", "--nmax", "5"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with("# tool=spinclust version="));
    assert!(text.contains("# seed=49568\n"));
    let w: Vec<u64> = data_rows(&text).iter().map(|r| r.split(',').nth(1).unwrap().parse().unwrap()).collect();
    assert_eq!(w, vec![1, 3, 5, 7, 9, 11]);
}

#[test]
fn fme_verify_reports_tiny_differences() {
    let o = spinclust(&["fme-verify", "--p", "0.5", "--n", "1", "--graph", "z2"]);
    assert_eq!(o.status.code(), Some(0));
    let rows = data_rows(&stdout(&o));
    assert_eq!(rows.len(), 4);
    for row in rows {
        let f: Vec<&str> = row.split(',').collect();
        let (lhs, rhs, diff): (f64, f64, f64) = (f[1].parse().unwrap(), f[2].parse().unwrap(), f[3].parse().unwrap());
        assert!((lhs - rhs).abs() < 1e-9 && diff < 1e-9, "{row}");
    }
}

#[test]
fn missing_config_is_a_validation_error() {
    let o = spinclust(&["clt", "--config", "/definitely/not/here.toml"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("/definitely/not/here.toml"));
}

#[test]
fn unknown_subcommand_and_bad_values_exit_one() {
    assert_eq!(spinclust(&["frobnicate"]).status.code(), Some(1));
    let o = spinclust(&["sample", "--graph", "z2", "--n", "2", "--model", "{kind = \"iid\", p = 1.5}"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn config_errors_name_the_key() {
    let dir = tempfile::tempdir().unwrap();
    let plan = dir.path().join("plan.toml");
    let text = fs::read_to_string(repo_file("configs/iid_beta0.toml")).unwrap();
    fs::write(&plan, text.replace("p = 0.5", "p = 1.5")).unwrap();
    let o = spinclust(&["clt", "--config", plan.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("model.p"));
}

#[test]
fn resource_limits_exit_two() {
    let o = spinclust(&["growth", "--graph", "z3", "--nmax", "2000"]);
    assert_eq!(o.status.code(), Some(2), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn sample_then_betti_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("samples");
    let o = spinclust(&[
        "sample", "--graph", "z2", "--n", "4", "--model", "{kind = \"iid\", p = 0.5}", "--replicates", "2", "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let file = out.join("replicate_0000.txt");
    assert!(fs::read_to_string(&file).unwrap().contains("# config_hash="));
    let o = spinclust(&["betti", "--input", file.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let rows = data_rows(&stdout(&o));
    assert_eq!(rows.len(), 1);
    assert!(rows[0].starts_with("0,4,"));
}

#[test]
fn stats_and_cumulants_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("stats.csv");
    let o = spinclust(&[
        "stats", "--graph", "z2", "--n", "5", "--model", "{kind = \"iid\", p = 0.5}", "--replicates", "40",
        "--score", "occupancy", "--out", csv.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(&csv).unwrap();
    assert_eq!(data_rows(&text).len(), 40);

    let values = dir.path().join("h.txt");
    let h: Vec<String> =
        data_rows(&text).iter().map(|r| r.split(',').nth(2).unwrap().to_string()).collect();
    fs::write(&values, h.join("\n")).unwrap();
    let o = spinclust(&["cumulants", "--input", values.to_str().unwrap(), "--order", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(doc["metadata"]["seed"], 49568);
    let mean: f64 = h.iter().map(|v| v.parse::<f64>().unwrap()).sum::<f64>() / 40.0;
    assert!((doc["result"]["values"][0].as_f64().unwrap() - mean).abs() < 1e-9);
}

#[test]
fn correlate_and_void_emit_json() {
    let model = "{kind = \"iid\", p = 0.5}";
    let o = spinclust(&[
        "correlate", "--graph", "z2", "--n", "3", "--model", model, "--replicates", "2000", "--p", "0,0", "--q",
        "2,0",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let doc: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let gap = &doc["result"]["clustering_gap"];
    assert!(gap["signed"].as_f64().unwrap().abs() < 4.0 * gap["se"].as_f64().unwrap() + 1e-12);

    let o = spinclust(&["void", "--graph", "z2", "--n", "3", "--model", model, "--replicates", "500", "--t", "0,1"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let doc: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(doc["result"]["estimates"].as_array().unwrap().len(), 2);
}

#[test]
fn setup_file_supplies_missing_flags() {
    let o = spinclust(&[
        "sample", "--config", &repo_file("configs/gaussian_setup.toml"), "--n", "3", "--replicates", "1",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("# graph=z2\n# n=3\n"));
    let o = spinclust(&["sample", "--n", "3"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn clt_writes_identical_results_across_worker_counts() {
    let dir = tempfile::tempdir().unwrap();
    let plan = dir.path().join("plan.toml");
    fs::write(
        &plan,
        "graph = \"z2\"\nn_grid = [2, 3, 4, 5]\nreplicates = 60\n\n[model]\nkind = \"iid\"\np = 0.5\n\n\
         [[scores]]\nname = \"betti\"\nk = 0\n\n[[scores]]\nname = \"occupancy\"\n",
    )
    .unwrap();
    let run = |workers: &str, name: &str| {
        let out = dir.path().join(name);
        let o = spinclust(&[
            "clt", "--config", plan.to_str().unwrap(), "--workers", workers, "--seed", "7", "--out",
            out.to_str().unwrap(),
        ]);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
        out
    };
    let a = run("1", "a");
    let b = run("4", "b");
    for f in ["raw.csv", "summary.json", "plan.json", "report.md"] {
        assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap(), "{f}");
    }
    let raw = fs::read_to_string(a.join("raw.csv")).unwrap();
    assert!(raw.contains("# seed=7\n"));
    assert_eq!(data_rows(&raw).len(), 4 * 60 * 2);
}
