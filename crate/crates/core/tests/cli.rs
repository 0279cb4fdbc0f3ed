use std::path::Path;
use std::process::{Command, Output};

fn expflow(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_expflow"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn fixtures_lists_at_least_six() {
    let dir = tempfile::tempdir().unwrap();
    let o = expflow(dir.path(), &["fixtures"]);
    assert_eq!(o.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(doc["result"].as_array().unwrap().len() >= 6);
    assert_eq!(doc["schema_version"], 1);
}

#[test]
fn config_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        vec!["certify"],
        vec!["certify", "fixture=no-such-fixture"],
        vec!["certify", "fixture=suspended-cat-map", "eps=-1"],
        vec!["entropy", "fixture=suspended-full-shift", "colour=blue"],
        vec!["entropy", "fixture=suspended-full-shift", "t_ladder=4,x"],
        vec!["frobnicate"],
    ] {
        let o = expflow(dir.path(), &args);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", stderr(&o));
    }
}

#[test]
fn config_file_with_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(
        &cfg,
        "# full shift reference\nfixture = suspended-full-shift\neps_ladder = 0.5\nt_ladder = 2, 3\nseed = 5\n",
    )
    .unwrap();
    let o = expflow(dir.path(), &["entropy", "--config", cfg.to_str().unwrap(), "csv=table.csv", "out=table.json"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let csv = std::fs::read_to_string(dir.path().join("table.csv")).unwrap();
    assert!(csv.starts_with("# seed=5\n"));
    assert!(csv.lines().any(|l| l == "eps,t,pool,count,rate"));
    let doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("table.json")).unwrap()).unwrap();
    assert_eq!(doc["seed"], 5);
    assert_eq!(doc["config"]["t_ladder"], "2, 3");
    assert!(doc["config"].get("out").is_none());
}

#[test]
fn certify_verify_and_tamper() {
    let dir = tempfile::tempdir().unwrap();
    let o = expflow(dir.path(), &["certify", "fixture=suspended-cat-map", "n_max=3", "out=cert.json", "csv=rates.csv"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let rates = std::fs::read_to_string(dir.path().join("rates.csv")).unwrap();
    assert!(rates.lines().any(|l| l == "n,t_n,rate"));

    let o = expflow(dir.path(), &["verify", "certificate=cert.json"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));

    let text = std::fs::read_to_string(dir.path().join("cert.json")).unwrap();
    let mut doc: serde_json::Value = serde_json::from_str(&text).unwrap();
    let ln2 = std::f64::consts::LN_2;
    assert!((doc["result"]["bound_time_changed"].as_f64().unwrap() - ln2).abs() < 1e-12);
    let fam = &mut doc["result"]["families"][2]["shadow_b_n"];
    fam[3]["point"] = fam[0]["point"].clone();
    std::fs::write(dir.path().join("bad.json"), doc.to_string()).unwrap();
    let o = expflow(dir.path(), &["verify", "certificate=bad.json"]);
    assert_eq!(o.status.code(), Some(3));
    let msg = stderr(&o);
    assert!(msg.contains("shadow points 0 (000) and 3 (011)"), "{msg}");
}

#[test]
fn shadow_spec_and_expansivity_reports() {
    let dir = tempfile::tempdir().unwrap();
    let o = expflow(dir.path(), &["shadow", "fixture=suspended-full-shift", "strong=true", "seed=3"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let doc: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(doc["result"]["witness"]["seed"], 3);
    assert_eq!(doc["result"]["witness"]["strong"], true);

    let o = expflow(dir.path(), &["spec", "fixture=full-2-shift", "trials=20"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stderr(&o).contains("20/20"));

    let o = expflow(dir.path(), &["spec", "fixture=suspended-full-shift"]);
    assert_eq!(o.status.code(), Some(2));

    let o = expflow(dir.path(), &["expansivity", "fixture=suspended-cat-map", "pairs=20"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let doc: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(doc["result"]["verdict"]["verdict"], "pass");
}

#[test]
fn code_emits_itinerary_csv() {
    let dir = tempfile::tempdir().unwrap();
    let o = expflow(dir.path(), &["code", "fixture=suspended-full-shift", "points=8", "csv=it.csv", "out=code.json"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let csv = std::fs::read_to_string(dir.path().join("it.csv")).unwrap();
    assert!(csv.lines().any(|l| l == "point_id,index,section,time"));
    let doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("code.json")).unwrap()).unwrap();
    assert_eq!(doc["result"]["alphabet"], 6);
}

#[test]
fn singular_sections_are_a_pipeline_failure() {
    let dir = tempfile::tempdir().unwrap();
    let o = expflow(dir.path(), &["code", "fixture=singular-blown-up"]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
}
