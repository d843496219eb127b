use std::path::Path;
use std::process::Command;

use proptest::prelude::*;
use tdhf_cli::scenarios::{find_scenario, scenario_table};
use tdhf_cli::RunConfig;

fn tdhf(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_tdhf"))
        .args(args)
        .env_remove("TDHF_OUT")
        .output()
        .expect("spawn tdhf")
}

fn csv_files(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "csv"))
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&p).unwrap()))
        .collect();
    files.sort();
    files
}

#[test]
fn list_scenarios_has_entries_and_defaults() {
    let out = tdhf(&["list-scenarios"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text, scenario_table());
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let rows: Vec<csv::StringRecord> = rdr.records().map(|r| r.unwrap()).collect();
    assert!(rows.len() >= 8);
    assert!(rows.iter().all(|r| !r[1].is_empty() && !r[2].is_empty()));
    let n2 = rows.iter().find(|r| &r[0] == "hf-vs-exact-n2").unwrap();
    assert!(n2[3].contains("d=1") && n2[3].contains("M=64") && n2[3].contains("N=2"));
}

#[test]
fn preset_configs_validate_and_round_trip() {
    for line in scenario_table().lines().skip(1) {
        let id = line.split(',').next().unwrap();
        let cfg = (find_scenario(id).unwrap().defaults)();
        cfg.validate().unwrap();
        assert_eq!(RunConfig::from_toml(&cfg.to_toml().unwrap()).unwrap(), cfg);
    }
}

#[test]
fn bad_alpha_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = (find_scenario("fermi-ball-1d").unwrap().defaults)();
    cfg.physics.alpha = 1.5;
    let text = toml::to_string(&cfg).unwrap();
    let path = dir.path().join("bad.toml");
    std::fs::write(&path, text).unwrap();
    let out = tdhf(&["run", "--config", path.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("physics.alpha") && err.contains("(0,1]"), "{err}");
}

#[test]
fn unknown_field_and_scenario_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = (find_scenario("fermi-ball-1d").unwrap().defaults)();
    let text = format!("{}\nextra = 1\n", cfg.to_toml().unwrap());
    let path = dir.path().join("extra.toml");
    std::fs::write(&path, text).unwrap();
    let out = tdhf(&["run", "--config", path.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(tdhf(&["run", "--scenario", "no-such-thing"]).status.code(), Some(2));
    assert_eq!(tdhf(&["run"]).status.code(), Some(2));
    assert_eq!(tdhf(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn same_seed_gives_identical_csvs() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for dir in [&a, &b] {
        let out = tdhf(&["run", "--scenario", "fock-audit", "--seed", "7", "--out", dir.path().to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    }
    let fa = csv_files(&a.path().join("fock-audit"));
    let fb = csv_files(&b.path().join("fock-audit"));
    assert!(!fa.is_empty());
    assert_eq!(fa, fb);
    let manifest = std::fs::read_to_string(a.path().join("fock-audit/manifest.toml")).unwrap();
    assert!(manifest.contains("seed = 7"));
    for (name, _) in &fa {
        assert!(manifest.contains(name.as_str()), "{name} missing from manifest");
    }
    let saved = std::fs::read_to_string(a.path().join("fock-audit/config.toml")).unwrap();
    assert_eq!(RunConfig::from_toml(&saved).unwrap().seed, 7);
}

#[test]
fn fdl_verify_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = tdhf(&["run", "--scenario", "fdl-verify", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8(out.stdout).unwrap().contains("PASS"));
}

#[test]
fn conflicting_scenario_flag_is_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = (find_scenario("fdl-verify").unwrap().defaults)();
    let path = dir.path().join("c.toml");
    std::fs::write(&path, cfg.to_toml().unwrap()).unwrap();
    let out = tdhf(&[
        "run", "--config", path.to_str().unwrap(), "--scenario", "fock-audit", "--out", dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
}

fn finite() -> impl Strategy<Value = f64> {
    prop_oneof![
        any::<f64>().prop_filter("finite", |v| v.is_finite()),
        (1e-300f64..1e300),
        Just(0.1 + 0.2),
        Just(f64::MIN_POSITIVE),
    ]
}

proptest! {
    #[test]
    fn toml_round_trip_is_bit_exact(
        seed in 0u64..=i64::MAX as u64,
        length in finite(),
        alpha in finite(),
        eps in proptest::option::of(finite()),
        dt in finite(),
        t_final in finite(),
        delta in finite(),
        p in finite(),
        stride in 1usize..1000,
    ) {
        let mut cfg = (find_scenario("energy-audit").unwrap().defaults)();
        cfg.seed = seed;
        cfg.grid.length = length;
        cfg.physics.alpha = alpha;
        cfg.physics.epsilon = eps;
        cfg.time.dt = dt;
        cfg.time.t_final = t_final;
        cfg.time.stride = stride;
        cfg.diagnostics.delta = delta;
        cfg.diagnostics.p = p;
        let text = cfg.to_toml().unwrap();
        let back: RunConfig = toml::from_str(&text).unwrap();
        prop_assert_eq!(back.grid.length.to_bits(), length.to_bits());
        prop_assert_eq!(back.physics.alpha.to_bits(), alpha.to_bits());
        prop_assert_eq!(back.physics.epsilon.map(f64::to_bits), eps.map(f64::to_bits));
        prop_assert_eq!(back.time.dt.to_bits(), dt.to_bits());
        prop_assert_eq!(back.time.t_final.to_bits(), t_final.to_bits());
        prop_assert_eq!(back.diagnostics.delta.to_bits(), delta.to_bits());
        prop_assert_eq!(back.diagnostics.p.to_bits(), p.to_bits());
        prop_assert_eq!(back, cfg);
    }
}
