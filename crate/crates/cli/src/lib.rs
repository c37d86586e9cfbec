//! Commands behind the `tiltcert` binary. Each returns the text to print and
//! an exit code, so tests can drive them without spawning processes.

use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use tiltcert::algebra::{filled_homology, lspace_cone, Slope};
use tiltcert::canonical::{certified_symmetry_group, certify_canonical, Verdict};
use tiltcert::canonize::{canonize, Caps, Canonized, Termination};
use tiltcert::cusp::DEFAULT_MARGIN;
use tiltcert::geometry::{certify_shapes, solve_approx};
use tiltcert::triangulation::{snappea, IdealTriangulation};

pub const SCHEMA: u32 = 1;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Text,
}

impl std::str::FromStr for Format {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "json" => Ok(Format::Json),
            "text" => Ok(Format::Text),
            _ => Err(format!("unknown format `{s}` (expected json or text)")),
        }
    }
}

/// A requested Dehn filling `p,q` on one cusp.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Fill {
    pub cusp: usize,
    pub slope: Slope,
}

impl std::str::FromStr for Fill {
    type Err = String;
    /// `p,q` or `p,q:cusp`.
    fn from_str(s: &str) -> Result<Self, String> {
        let (pq, cusp) = match s.split_once(':') {
            Some((a, b)) => (a, b.trim().parse::<usize>().map_err(|e| format!("bad cusp in `{s}`: {e}"))?),
            None => (s, 0),
        };
        let (p, q) = pq.split_once(',').ok_or_else(|| format!("expected p,q in `{s}`"))?;
        let p: i64 = p.trim().parse().map_err(|e| format!("bad p in `{s}`: {e}"))?;
        let q: i64 = q.trim().parse().map_err(|e| format!("bad q in `{s}`: {e}"))?;
        let slope = Slope::new(p, q).map_err(|e| e.to_string())?;
        Ok(Fill { cusp, slope })
    }
}

#[derive(Clone, Debug)]
pub struct CertifyOptions {
    pub jobs: usize,
    pub fills: Vec<Fill>,
    pub format: Format,
    pub margin: f64,
    pub timings: bool,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        CertifyOptions { jobs: 1, fills: Vec::new(), format: Format::Json, margin: DEFAULT_MARGIN, timings: false }
    }
}

pub struct Output {
    pub code: i32,
    pub stdout: String,
}

/// Read a triangulation in the native format or the SnapPea format.
pub fn load(path: &Path) -> Result<(IdealTriangulation, String), String> {
    let bytes = std::fs::read(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let hash = format!("{:x}", Sha256::digest(&bytes));
    let text = String::from_utf8(bytes).map_err(|_| format!("{}: not UTF-8", path.display()))?;
    let tri = if text.trim_start().starts_with("% Triangulation") {
        snappea::parse(&text)
    } else {
        IdealTriangulation::from_text(&text)
    }
    .map_err(|e| format!("{}: {e}", path.display()))?;
    Ok((tri, hash))
}

#[derive(Serialize)]
struct FileReport {
    path: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    file_sha256: Option<String>,
    exit_code: i32,
    stages: Vec<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    wall_time_ms: Option<f64>,
}

fn stage(name: &str, outcome: &str, payload: Value) -> Value {
    json!({ "stage": name, "outcome": outcome, "payload": payload })
}

fn certify_file(path: &Path, opts: &CertifyOptions) -> FileReport {
    let start = Instant::now();
    let mut report = FileReport {
        path: path.display().to_string(),
        file_sha256: None,
        exit_code: EXIT_OK,
        stages: Vec::new(),
        wall_time_ms: None,
    };
    let finish = |mut r: FileReport| {
        if opts.timings {
            r.wall_time_ms = Some(start.elapsed().as_secs_f64() * 1e3);
        }
        r
    };

    let (tri, hash) = match load(path) {
        Ok(x) => x,
        Err(e) => {
            report.exit_code = EXIT_INPUT;
            report.stages.push(stage("load", "error", json!(e)));
            return finish(report);
        }
    };
    report.file_sha256 = Some(hash);
    report.stages.push(stage(
        "load",
        "ok",
        json!({ "triangulation_hash": tri.content_hash(), "num_tets": tri.num_tets(), "num_cusps": tri.num_cusps() }),
    ));
    if let Some(f) = opts.fills.iter().find(|f| f.cusp >= tri.num_cusps()) {
        report.exit_code = EXIT_INPUT;
        report.stages.push(stage("fill", "error", json!(format!("no cusp {} to fill", f.cusp))));
        return finish(report);
    }

    let shapes = solve_approx(&tri).map_err(|e| e.to_string()).and_then(|z| certify_shapes(&tri, &z).map_err(|e| e.to_string()));
    let shapes = match shapes {
        Ok(s) => {
            report.stages.push(stage("shapes", "certified", json!({ "boxes": s.boxes, "inflation_rounds": s.inflation_rounds })));
            s
        }
        Err(e) => {
            report.exit_code = EXIT_FAILED;
            report.stages.push(stage("shapes", "failed", json!(e)));
            return finish(report);
        }
    };

    match certify_canonical(&tri, &shapes, opts.margin) {
        Ok(cert) => {
            let outcome = match cert.verdict {
                Verdict::CertifiedCanonical => "certified_canonical",
                Verdict::Inconclusive { .. } => "inconclusive",
            };
            report.stages.push(stage("canonical", outcome, serde_json::to_value(&cert).expect("certificate serializes")));
            match certified_symmetry_group(&tri, &cert) {
                Ok(g) => report.stages.push(stage(
                    "symmetry",
                    "certified",
                    json!({
                        "order": g.order(),
                        "orientation_preserving_order": g.orientation_preserving_order(),
                        "generators": g.generators,
                        "cusp_permutations": g.cusp_permutations,
                    }),
                )),
                Err(e) => {
                    report.exit_code = EXIT_FAILED;
                    report.stages.push(stage("symmetry", "skipped", json!(e.to_string())));
                }
            }
        }
        Err(e) => {
            report.exit_code = EXIT_FAILED;
            report.stages.push(stage("canonical", "failed", json!(e.to_string())));
        }
    }

    if !opts.fills.is_empty() {
        let mut slopes = vec![None; tri.num_cusps()];
        for f in &opts.fills {
            slopes[f.cusp] = Some(f.slope);
        }
        let h = filled_homology(&tri, &slopes);
        let filled: Vec<Value> = slopes.iter().map(|s| s.map_or(Value::Null, |s| json!([s.p(), s.q()]))).collect();
        report.stages.push(stage(
            "fill",
            "ok",
            json!({ "slopes": filled, "homology": h.to_string(), "order": h.order().map(|o| o.to_string()) }),
        ));
    }
    finish(report)
}

fn pool(jobs: usize) -> rayon::ThreadPool {
    rayon::ThreadPoolBuilder::new().num_threads(jobs.max(1)).build().expect("thread pool")
}

fn text_report(r: &FileReport) -> String {
    let mut out = format!("{}\n", r.path);
    for s in &r.stages {
        let name = s["stage"].as_str().unwrap_or("");
        let outcome = s["outcome"].as_str().unwrap_or("");
        let detail = match (name, outcome) {
            ("load", "ok") => format!(" ({} tets, {} cusps)", s["payload"]["num_tets"], s["payload"]["num_cusps"]),
            ("canonical", "inconclusive") => format!(" (faces {})", s["payload"]["verdict"]["faces"]),
            ("symmetry", "certified") => format!(" (order {})", s["payload"]["order"]),
            ("fill", "ok") => format!(" (H1 = {})", s["payload"]["homology"].as_str().unwrap_or("?")),
            (_, "error" | "failed" | "skipped") => format!(": {}", s["payload"].as_str().unwrap_or("")),
            _ => String::new(),
        };
        out.push_str(&format!("  {name}: {outcome}{detail}\n"));
    }
    if let Some(ms) = r.wall_time_ms {
        out.push_str(&format!("  time: {ms:.1} ms\n"));
    }
    out
}

/// Certify every file. Exit code is the worst per-file code.
pub fn cmd_certify(paths: &[PathBuf], opts: &CertifyOptions) -> Output {
    let reports: Vec<FileReport> = pool(opts.jobs).install(|| paths.par_iter().map(|p| certify_file(p, opts)).collect());
    let code = reports.iter().map(|r| r.exit_code).max().unwrap_or(EXIT_OK);
    let stdout = match opts.format {
        Format::Json => {
            let v = json!({ "schema": SCHEMA, "command": "certify", "exit_code": code, "reports": reports });
            serde_json::to_string_pretty(&v).expect("report serializes") + "\n"
        }
        Format::Text => reports.iter().map(text_report).collect(),
    };
    Output { code, stdout }
}

#[derive(Clone, Debug)]
pub struct CanonizeOptions {
    pub seed: u64,
    pub attempts: usize,
    pub jobs: usize,
    pub caps: Caps,
    pub out: Option<PathBuf>,
    pub trace: Option<PathBuf>,
    pub format: Format,
}

impl Default for CanonizeOptions {
    fn default() -> Self {
        CanonizeOptions { seed: 0, attempts: 1, jobs: 1, caps: Caps::default(), out: None, trace: None, format: Format::Json }
    }
}

/// Run `attempts` independent searches with seeds `seed, seed + 1, …`. The
/// lowest seed that finds a candidate wins, so the result does not depend on
/// scheduling.
pub fn cmd_canonize(path: &Path, opts: &CanonizeOptions) -> Output {
    let (tri, _) = match load(path) {
        Ok(x) => x,
        Err(e) => return input_error("canonize", e),
    };
    let seeds: Vec<u64> = (0..opts.attempts.max(1) as u64).map(|k| opts.seed.wrapping_add(k)).collect();
    let runs: Vec<Result<Canonized, String>> = pool(opts.jobs)
        .install(|| seeds.par_iter().map(|&s| canonize(&tri, s, opts.caps).map_err(|e| e.to_string())).collect());
    let best = runs
        .iter()
        .filter_map(|r| r.as_ref().ok())
        .find(|c| c.trace.status == Termination::CandidateFound)
        .or_else(|| runs.iter().filter_map(|r| r.as_ref().ok()).next());
    let Some(best) = best else {
        let err = runs.into_iter().find_map(Result::err).unwrap_or_default();
        let v = json!({ "schema": SCHEMA, "command": "canonize", "exit_code": EXIT_FAILED, "error": err });
        return Output { code: EXIT_FAILED, stdout: render(&v, opts.format) };
    };

    let candidate = best.triangulation.to_text();
    for (target, body) in [(&opts.out, candidate.clone()), (&opts.trace, best.trace.to_json() + "\n")] {
        if let Some(p) = target {
            if let Err(e) = std::fs::write(p, body) {
                return input_error("canonize", format!("{}: {e}", p.display()));
            }
        }
    }
    let code = if best.trace.status == Termination::CandidateFound { EXIT_OK } else { EXIT_FAILED };
    let mut v = json!({
        "schema": SCHEMA,
        "command": "canonize",
        "exit_code": code,
        "seed": best.trace.seed,
        "status": best.trace.status,
        "moves": best.trace.moves.len(),
        "num_tets": best.triangulation.num_tets(),
        "triangulation_hash": best.triangulation.content_hash(),
    });
    if opts.out.is_none() {
        v["candidate"] = json!(candidate);
    }
    if opts.trace.is_none() {
        v["trace"] = serde_json::to_value(&best.trace).expect("trace serializes");
    }
    Output { code, stdout: render(&v, opts.format) }
}

/// Orders of `α + β, 2α + β, …, nα + β` with the additivity check at each step.
pub fn cmd_lspace(order_alpha: u64, order_beta: u64, n: u64, format: Format) -> Output {
    match lspace_cone(order_alpha, order_beta) {
        Ok(cone) => {
            let steps = cone.enumerate(n);
            let code = if steps.iter().all(|s| s.additive) { EXIT_OK } else { EXIT_FAILED };
            let stdout = match format {
                Format::Json => {
                    let v = json!({ "schema": SCHEMA, "command": "lspace", "exit_code": code, "cone": cone, "steps": steps });
                    serde_json::to_string_pretty(&v).expect("table serializes") + "\n"
                }
                Format::Text => {
                    let mut s = format!("alpha order {order_alpha}, beta order {order_beta}\n");
                    for st in &steps {
                        s.push_str(&format!(
                            "{}a+{}b  order {:>4}  = {} + {}  {}\n",
                            st.slope.0,
                            st.slope.1,
                            st.order,
                            st.parent_order,
                            st.alpha_order,
                            if st.additive { "ok" } else { "FAIL" }
                        ));
                    }
                    s
                }
            };
            Output { code, stdout }
        }
        Err(e) => {
            let v = json!({ "schema": SCHEMA, "command": "lspace", "exit_code": EXIT_FAILED, "error": e.to_string() });
            Output { code: EXIT_FAILED, stdout: render(&v, format) }
        }
    }
}

fn render(v: &Value, format: Format) -> String {
    match format {
        Format::Json => serde_json::to_string_pretty(v).expect("value serializes") + "\n",
        Format::Text => match v.as_object() {
            Some(o) => o
                .iter()
                .filter(|(k, _)| !matches!(k.as_str(), "schema" | "trace"))
                .map(|(k, v)| match v.as_str() {
                    Some(s) if s.contains('\n') => format!("{k}:\n{s}"),
                    Some(s) => format!("{k}: {s}\n"),
                    None => format!("{k}: {v}\n"),
                })
                .collect(),
            None => format!("{v}\n"),
        },
    }
}

fn input_error(command: &str, message: String) -> Output {
    let v = json!({ "schema": SCHEMA, "command": command, "exit_code": EXIT_INPUT, "error": message });
    Output { code: EXIT_INPUT, stdout: render(&v, Format::Json) }
}
