use std::fs;
use std::process::Command;

use infsurf::experiments::{run_experiment, ExperimentSpec};
use infsurf::report::CsvTable;

fn repro() -> Command {
    Command::new(env!("CARGO_BIN_EXE_repro"))
}

fn without_wall_time(s: &str) -> String {
    s.lines().filter(|l| !l.starts_with("wall_time_s")).collect::<Vec<_>>().join("\n")
}

#[test]
fn list_prints_every_experiment() {
    let out = repro().arg("list").output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 11);
    assert!(text.contains("lemma-four-holed-gap"));
}

#[test]
fn run_writes_report_and_table() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("flute.toml");
    let csv = dir.path().join("tables/flute.csv");
    let status = repro()
        .args(["ex-flute-divergence", "--param", "N=30", "--out"])
        .arg(&out)
        .arg("--csv")
        .arg(&csv)
        .status()
        .unwrap();
    assert!(status.success());
    let doc: toml::Value = toml::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(doc["experiment"].as_str(), Some("ex-flute-divergence"));
    assert_eq!(doc["inputs"]["N"].as_str(), Some("30"));
    assert_eq!(doc["witnesses"][0]["curve"].as_str(), Some("C:30"));
    let lower = doc["bounds"][0]["lower"].as_float().unwrap();
    assert!((lower - 0.5 * 30f64.ln()).abs() < 1e-9);
    let table = CsvTable::parse(&fs::read_to_string(&csv).unwrap()).unwrap();
    assert_eq!(table.rows.len(), 30);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.toml");
    let unknown = repro().args(["no-such-experiment", "--out"]).arg(&out).output().unwrap();
    assert_eq!(unknown.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&unknown.stderr).contains("ElX01"));
    let bad = repro().args(["lemma-qc-twist", "--param", "t_max", "--out"]).arg(&out).output().unwrap();
    assert!(String::from_utf8_lossy(&bad.stderr).contains("ElX02"));
    let failing = repro().args(["prop-infinite-twist", "--out"]).arg(&out).status().unwrap();
    assert_eq!(failing.code(), Some(1));
    let csv = fs::read_to_string(dir.path().join("r.csv")).unwrap();
    assert!(csv.starts_with("n,log_eps,t_n,"));
}

#[test]
fn reports_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let mut texts = Vec::new();
    for (k, jobs) in [(0, "1"), (1, "3")] {
        let out = dir.path().join(format!("g{k}.toml"));
        let status = repro()
            .args(["lemma-four-holed-gap", "--param", "length_step=0.5", "--param", "twist_steps=4", "--jobs", jobs, "--out"])
            .arg(&out)
            .status()
            .unwrap();
        assert!(status.success());
        texts.push((
            without_wall_time(&fs::read_to_string(&out).unwrap()),
            fs::read(dir.path().join(format!("g{k}.csv"))).unwrap(),
        ));
    }
    assert_eq!(texts[0], texts[1]);
}

fn table(id: &str, params: &[(&str, &str)]) -> (infsurf::report::Report, CsvTable) {
    let mut spec = ExperimentSpec::new(id);
    for (k, v) in params {
        spec = spec.param(k, v);
    }
    let r = run_experiment(&spec).unwrap();
    let t = CsvTable::parse(&r.table.to_csv().unwrap()).unwrap();
    (r, t)
}

#[test]
fn verdicts_recompute_from_tables() {
    let (r, t) = table("ex-flute-divergence", &[]);
    let ratio = t.numbers("ratio").unwrap();
    let g = t.numbers("g").unwrap();
    let max = ratio.iter().cloned().fold(0.0, f64::max);
    assert_eq!(0.5 * max.ln(), r.bounds[0].lower);
    assert!(ratio.iter().zip(&g).all(|(a, b)| a >= &(b * (1.0 - 1e-12))));

    let (r, t) = table("lemma-four-holed-gap", &[("length_step", "0.5"), ("twist_steps", "4")]);
    let min = t.numbers("value").unwrap().into_iter().fold(f64::INFINITY, f64::min);
    assert_eq!(min, r.bounds[0].lower);
    assert_eq!(r.verdict_named("K > 1 + 1e-4").unwrap().pass, min > 1.0 + 1e-4);

    let (r, t) = table("check-metric-chain", &[("pairs", "20")]);
    let (lhs, rhs) = (t.numbers("lhs").unwrap(), t.numbers("rhs").unwrap());
    let pass = lhs.iter().zip(&rhs).all(|(a, b)| a <= b);
    assert_eq!(r.verdict_named("2-Lipschitz check passes on every pair").unwrap().pass, pass);

    let (r, t) = table("prop-infinite-twist", &[]);
    let qc = t.numbers("qc_lower").unwrap();
    let by5 = qc[..5].iter().any(|&v| v > 2.0);
    assert_eq!(r.verdict_named("quasiconformal lower bound exceeds 2 by n = 5").unwrap().pass, by5);
    let (p, q) = (t.numbers("partial_bound").unwrap(), t.numbers("reference_bound").unwrap());
    assert!(p.iter().zip(&q).all(|(a, b)| a <= b));

    let (r, t) = table("prop-small-twist", &[]);
    let e = t.numbers("exponent").unwrap();
    let ratio = t.numbers("ratio").unwrap();
    let mut sups: Vec<(f64, f64)> = Vec::new();
    for (x, v) in e.into_iter().zip(ratio) {
        match sups.last_mut() {
            Some((y, s)) if *y == x => *s = s.max(v),
            _ => sups.push((x, v)),
        }
    }
    let decreasing = sups.windows(2).all(|w| w[1].1 < w[0].1);
    assert_eq!(r.verdict_named("sup ratio strictly decreasing in the exponent").unwrap().pass, decreasing);
}

#[test]
fn surface_files_round_trip_on_disk() {
    use infsurf::surface_file::{parse_surface, serialize_surface};
    use infsurf_core::surface::{build_template, Rule, TemplateKind};
    let dir = tempfile::tempdir().unwrap();
    let s = build_template(TemplateKind::Ladder, Rule::Harmonic { scale: 0.7 }, Rule::Const(0.125)).unwrap();
    let path = dir.path().join("ladder.toml");
    fs::write(&path, serialize_surface(&s).unwrap()).unwrap();
    assert_eq!(parse_surface(&fs::read_to_string(&path).unwrap()).unwrap(), s);
}
