use std::path::Path;
use std::process::{Command, Output};

fn disspec(args: &[&str]) -> Output {
    disspec_env(args, &[])
}

fn disspec_env(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_disspec"));
    cmd.args(args).env_remove("DISSPEC_PRECISION_BITS").env_remove("SOURCE_DATE_EPOCH");
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("run disspec")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn modes_example() {
    let o = disspec(&["modes", "--n", "1", "--gamma", "0.5"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines.len(), 3);
    assert!(lines[0].starts_with("n,multiplicity,re_w,im_w,re_lambda,im_lambda,class"));
    for (line, sign) in lines[1..].iter().zip([1.0, -1.0]) {
        let f: Vec<&str> = line.split(',').collect();
        assert_eq!(f[0], "1");
        assert_eq!(f[1], "3");
        let re: f64 = f[4].parse().unwrap();
        let im: f64 = f[5].parse().unwrap();
        assert!((re - 1.5).abs() < 1e-12);
        assert!((im - sign * 1.3228756555322954).abs() < 1e-12);
        assert_eq!(f[6], "incoming_resonance");
    }
}

#[test]
fn verify_passes_for_subunit_gamma() {
    let o = disspec(&["verify", "--gamma", "0.5", "--n-max", "20"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let out = stdout(&o);
    assert_eq!(out.lines().next().unwrap(), "PASS: q_n(ε)=0 for all n ≤ 20, ε-grid 21");
    assert_eq!(out.lines().count(), 6);
    assert!(out.lines().all(|l| l.starts_with("PASS")));
}

#[test]
fn verify_refuses_supercritical_gamma() {
    assert_eq!(disspec(&["verify", "--gamma", "1.5", "--n-max", "3"]).status.code(), Some(2));
}

#[test]
fn weyl_reports_target() {
    let o = disspec(&["weyl", "--gamma", "0.5", "--r-max", "10", "--steps", "9", "--fit"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.starts_with("r,count\n"));
    assert!(out.contains("# target a2=1.5"));
    assert!(out.contains("# fit window="));
    assert_eq!(out.lines().filter(|l| !l.starts_with('#')).count(), 10);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(disspec(&["modes", "--n", "1"]).status.code(), Some(2));
    assert_eq!(disspec(&["modes", "--n", "x", "--gamma", "0.5"]).status.code(), Some(2));
    assert_eq!(disspec(&["frobnicate"]).status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("s.txt");
    let o = disspec(&["spectrum", "--gamma", "0.5", "--n-max", "2", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains(".json or .csv"));
    assert_eq!(disspec(&["--version"]).status.code(), Some(0));
}

#[test]
fn outputs_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let p = dir.path().join(name);
        let o = disspec_env(&["spectrum", "--gamma", "0.7", "--n-max", "12", "--out", p.to_str().unwrap()], &[("SOURCE_DATE_EPOCH", "1700000000")]);
        assert_eq!(o.status.code(), Some(0));
        std::fs::read(p).unwrap()
    };
    assert_eq!(run("a.csv"), run("b.csv"));
    let a = run("a.json");
    assert_eq!(a, run("b.json"));
    let v: serde_json::Value = serde_json::from_slice(&a).unwrap();
    assert_eq!(v["metadata"]["timestamp"], "2023-11-14T22:13:20Z");
}

#[test]
fn json_round_trip_through_classify() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("s.json");
    let o = disspec(&["spectrum", "--gamma", "0.5", "--n-max", "6", "--out", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&p);
    assert_eq!(v["format_version"], "1");
    assert_eq!(v["metadata"]["n_max"], 6);
    assert_eq!(v["metadata"]["region_params"]["A2"], 4.0);
    let pts = v["points"].as_array().unwrap();
    assert_eq!(pts.len(), (0..=6).map(|n| n + 1).sum::<usize>());

    let o = disspec(&["classify", "--in", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert_eq!(out.lines().next().unwrap(), "n,re_lambda,im_lambda,class,regions");
    assert_eq!(out.lines().count(), pts.len() + 1);
    let params = disspec::regions::default_params(0.5).unwrap();
    for (line, pt) in out.lines().skip(1).zip(pts) {
        let f: Vec<&str> = line.split(',').collect();
        assert_eq!(f[0].parse::<u64>().unwrap(), pt["n"].as_u64().unwrap());
        assert_eq!(f[1].parse::<f64>().unwrap(), pt["lambda"][0].as_f64().unwrap());
        assert_eq!(f[2].parse::<f64>().unwrap(), pt["lambda"][1].as_f64().unwrap());
        assert_eq!(f[3], "incoming_resonance");
        let l = disspec::Complex64::new(pt["lambda"][0].as_f64().unwrap(), pt["lambda"][1].as_f64().unwrap());
        let tags: Vec<&str> = params.tags(l).iter().map(|r| r.tag()).collect();
        assert_eq!(f[4], if tags.is_empty() { "none".to_string() } else { tags.join(";") });
    }
    // a huge C2 pulls the points with |Im λ| ≥ A2 into Λ
    let o = disspec(&["classify", "--in", p.to_str().unwrap(), "--c2", "1e9"]);
    assert!(stdout(&o).lines().any(|l| l.rsplit(',').next().unwrap().split(';').any(|t| t == "Lambda")));

    let csv = dir.path().join("s.csv");
    assert_eq!(disspec(&["spectrum", "--gamma", "0.5", "--n-max", "6", "--out", csv.to_str().unwrap()]).status.code(), Some(0));
    let o = disspec(&["classify", "--in", csv.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().count(), pts.len() + 1);
}

#[test]
fn cache_hits_and_misses() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache");
    let out = dir.path().join("s.json");
    let args = |bits: &'static str| {
        vec!["--precision", bits, "spectrum", "--gamma", "0.3", "--n-max", "8", "--cache", cache.to_str().unwrap(), "--out", out.to_str().unwrap()]
            .into_iter()
            .map(String::from)
            .collect::<Vec<_>>()
    };
    let run = |bits| {
        let a = args(bits);
        disspec(&a.iter().map(String::as_str).collect::<Vec<_>>())
    };
    let first = run("53");
    assert_eq!(first.status.code(), Some(0));
    assert!(!stderr(&first).contains("using cached spectrum"));
    let second = run("53");
    assert!(stderr(&second).contains("using cached spectrum"));
    let other = run("128");
    assert!(!stderr(&other).contains("using cached spectrum"));
    assert_eq!(std::fs::read_dir(&cache).unwrap().count(), 2);
}

#[test]
fn precision_flag_overrides_environment() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("s.json");
    let path = p.to_str().unwrap();
    let env = [("DISSPEC_PRECISION_BITS", "128")];
    disspec_env(&["spectrum", "--gamma", "0.5", "--n-max", "2", "--out", path], &env);
    assert_eq!(json(&p)["metadata"]["precision_bits"], 128);
    disspec_env(&["--precision", "256", "spectrum", "--gamma", "0.5", "--n-max", "2", "--out", path], &env);
    assert_eq!(json(&p)["metadata"]["precision_bits"], 256);
    disspec(&["spectrum", "--gamma", "0.5", "--n-max", "2", "--out", path]);
    assert_eq!(json(&p)["metadata"]["precision_bits"], 53);
}

#[test]
fn perturb_output() {
    let o = disspec(&["perturb", "--n", "1", "--steps", "5"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.starts_with("eta,w,lambda\n"));
    let rows: Vec<Vec<&str>> = out.lines().skip(1).filter(|l| !l.starts_with('#') && !l.starts_with("PASS")).map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 2 * 6 + 1);
    for r in &rows {
        let e: f64 = r[0].parse().unwrap();
        let w: f64 = r[1].parse().unwrap();
        if e == 0.0 {
            assert_eq!(w, 0.0);
            assert_eq!(r[2], "");
        } else {
            assert_eq!(e.signum(), w.signum());
        }
    }
    assert!(out.contains("implicit_derivative=0.5"));
    assert!(out.lines().last().unwrap().starts_with("PASS"));

    let o = disspec(&["perturb", "--n", "5"]);
    assert_eq!(o.status.code(), Some(3));
    let o = disspec(&["perturb", "--n", "5", "--shrink"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("# eta_max=0.0125"));
}
