use std::path::PathBuf;
use std::process::Command;

use serde_json::Value;
use tempfile::TempDir;
use tiltcert::canonize::{retriangulate_random, Caps};
use tiltcert::fixtures;
use tiltcert::triangulation::{is_isomorphic, pachner_2_3, IdealTriangulation};
use tiltcert_cli::*;

fn write(dir: &TempDir, name: &str, body: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, body).unwrap();
    p
}

fn corpus() -> (TempDir, Vec<PathBuf>) {
    let dir = TempDir::new().unwrap();
    let files = vec![
        write(&dir, "fig8.txt", fixtures::FIGURE_EIGHT),
        write(&dir, "whitehead.txt", fixtures::WHITEHEAD),
        write(&dir, "two_cusp.txt", fixtures::TWO_CUSP_CANONICAL),
    ];
    (dir, files)
}

/// The figure-eight fixture after one 2-3 move, then a short random walk.
fn off_canonical() -> IdealTriangulation {
    let (t, _) = pachner_2_3(&fixtures::figure_eight(), 0).unwrap();
    let t = retriangulate_random(&t, 5, 3);
    assert!(t.num_tets() > 2);
    t
}

fn parse(out: &Output) -> Value {
    serde_json::from_str(&out.stdout).unwrap()
}

fn stage<'a>(report: &'a Value, name: &str) -> &'a Value {
    report["stages"].as_array().unwrap().iter().find(|s| s["stage"] == name).unwrap()
}

#[test]
fn figure_eight_certifies_with_symmetry_order_eight() {
    let (_d, files) = corpus();
    let out = cmd_certify(&files[..1], &CertifyOptions::default());
    assert_eq!(out.code, EXIT_OK);
    let v = parse(&out);
    assert_eq!(v["schema"], 1);
    let r = &v["reports"][0];
    assert_eq!(stage(r, "canonical")["outcome"], "certified_canonical");
    assert_eq!(stage(r, "symmetry")["payload"]["order"], 8);
}

#[test]
fn whitehead_is_inconclusive() {
    let (_d, files) = corpus();
    let out = cmd_certify(&files[1..2], &CertifyOptions::default());
    assert_eq!(out.code, EXIT_FAILED);
    let v = parse(&out);
    assert_eq!(stage(&v["reports"][0], "canonical")["outcome"], "inconclusive");
}

#[test]
fn corrupt_file_exits_two_and_others_still_run() {
    let (d, mut files) = corpus();
    files.push(write(&d, "corrupt.txt", "tets 2 cusps 1\ntet 0: 9 0123\n"));
    files.push(d.path().join("missing.txt"));
    let out = cmd_certify(&files, &CertifyOptions::default());
    assert_eq!(out.code, EXIT_INPUT);
    let v = parse(&out);
    assert_eq!(v["reports"].as_array().unwrap().len(), 5);
    assert_eq!(stage(&v["reports"][0], "canonical")["outcome"], "certified_canonical");
    assert_eq!(stage(&v["reports"][3], "load")["outcome"], "error");
}

#[test]
fn reports_are_reproducible_and_independent_of_jobs() {
    let (_d, files) = corpus();
    let seq = cmd_certify(&files, &CertifyOptions::default()).stdout;
    let again = cmd_certify(&files, &CertifyOptions::default()).stdout;
    let par = cmd_certify(&files, &CertifyOptions { jobs: 4, ..CertifyOptions::default() }).stdout;
    assert_eq!(seq, again);
    assert_eq!(seq, par);
}

#[test]
fn fillings_are_reported() {
    let (_d, files) = corpus();
    let opts = CertifyOptions { fills: vec!["5,1".parse().unwrap()], ..CertifyOptions::default() };
    let v = parse(&cmd_certify(&files[..1], &opts));
    assert_eq!(stage(&v["reports"][0], "fill")["payload"]["homology"], "Z/5");
    assert!("2,4".parse::<Fill>().is_err());
    assert_eq!("1,0:1".parse::<Fill>().unwrap().cusp, 1);
    let bad = CertifyOptions { fills: vec!["1,0:3".parse().unwrap()], ..CertifyOptions::default() };
    assert_eq!(cmd_certify(&files[..1], &bad).code, EXIT_INPUT);
}

#[test]
fn timings_only_on_request() {
    let (_d, files) = corpus();
    let v = parse(&cmd_certify(&files[..1], &CertifyOptions::default()));
    assert!(v["reports"][0].get("wall_time_ms").is_none());
    let v = parse(&cmd_certify(&files[..1], &CertifyOptions { timings: true, ..CertifyOptions::default() }));
    assert!(v["reports"][0]["wall_time_ms"].as_f64().unwrap() >= 0.0);
}

#[test]
fn canonize_keeps_canonical_input() {
    let (d, files) = corpus();
    let out_path = d.path().join("out.txt");
    let opts = CanonizeOptions { out: Some(out_path.clone()), ..CanonizeOptions::default() };
    let out = cmd_canonize(&files[0], &opts);
    assert_eq!(out.code, EXIT_OK);
    assert_eq!(std::fs::read_to_string(out_path).unwrap(), fixtures::FIGURE_EIGHT);
    assert_eq!(parse(&out)["moves"], 0);
}

#[test]
fn canonize_randomized_figure_eight_then_certify() {
    let d = TempDir::new().unwrap();
    let t = off_canonical();
    let input = write(&d, "walked.txt", &t.to_text());
    let cand = d.path().join("cand.txt");
    let trace = d.path().join("trace.json");
    let out = cmd_canonize(&input, &CanonizeOptions { out: Some(cand.clone()), trace: Some(trace.clone()), ..Default::default() });
    assert_eq!(out.code, EXIT_OK);
    let found = IdealTriangulation::from_text(&std::fs::read_to_string(&cand).unwrap()).unwrap();
    assert!(is_isomorphic(&found, &fixtures::figure_eight()));
    let tr: Value = serde_json::from_str(&std::fs::read_to_string(trace).unwrap()).unwrap();
    assert_eq!(tr["status"], "candidate_found");
    assert_eq!(cmd_certify(&[cand], &CertifyOptions::default()).code, EXIT_OK);
}

#[test]
fn canonize_cap_zero_stops_immediately() {
    let d = TempDir::new().unwrap();
    let t = off_canonical();
    let input = write(&d, "walked.txt", &t.to_text());
    let opts = CanonizeOptions { caps: Caps { max_moves: 0, ..Caps::default() }, ..Default::default() };
    let out = cmd_canonize(&input, &opts);
    assert_eq!(out.code, EXIT_FAILED);
    let v = parse(&out);
    assert_eq!(v["status"], "iteration_cap_reached");
    assert_eq!(v["moves"], 0);
    assert!(v["trace"]["moves"].as_array().unwrap().is_empty());
}

#[test]
fn lspace_tables() {
    let v = parse(&cmd_lspace(7, 19, 3, Format::Json));
    let orders: Vec<u64> = v["steps"].as_array().unwrap().iter().map(|s| s["order"].as_u64().unwrap()).collect();
    assert_eq!(orders, [26, 33, 40]);
    let v = parse(&cmd_lspace(1, 1, 5, Format::Json));
    let orders: Vec<u64> = v["steps"].as_array().unwrap().iter().map(|s| s["order"].as_u64().unwrap()).collect();
    assert_eq!(orders, [2, 3, 4, 5, 6]);
    assert_eq!(cmd_lspace(4, 6, 3, Format::Json).code, EXIT_FAILED);
}

#[test]
fn binary_exit_codes() {
    let (d, files) = corpus();
    let bin = env!("CARGO_BIN_EXE_tiltcert");
    let run = |args: &[&std::ffi::OsStr]| Command::new(bin).args(args).env("TILTCERT_JOBS", "2").output().unwrap();
    assert_eq!(run(&["certify".as_ref(), files[0].as_os_str()]).status.code(), Some(0));
    assert_eq!(run(&["certify".as_ref(), files[1].as_os_str()]).status.code(), Some(1));
    let bad = write(&d, "bad.txt", "nonsense");
    assert_eq!(run(&["certify".as_ref(), bad.as_os_str()]).status.code(), Some(2));
    let text = run(&["--format".as_ref(), "text".as_ref(), "lspace".as_ref(), "7".as_ref(), "19".as_ref(), "2".as_ref()]);
    assert!(String::from_utf8(text.stdout).unwrap().contains("order   33"));
}
