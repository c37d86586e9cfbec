//! Browser bindings. Every export takes plain values and returns a JSON
//! string, so the page needs no generated type glue.

use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

use tiltcert::algebra::lspace_cone;
use tiltcert::canonical::{certified_symmetry_group, certify_canonical, Verdict};
use tiltcert::canonize::{canonize, retriangulate_random, Caps};
use tiltcert::cusp::DEFAULT_MARGIN;
use tiltcert::fixtures;
use tiltcert::geometry::{certify_shapes, solve_approx};
use tiltcert::triangulation::{is_isomorphic, IdealTriangulation};

fn error(message: impl ToString) -> String {
    json!({ "error": message.to_string() }).to_string()
}

/// Text of a bundled triangulation: `figure_eight`, `whitehead` or
/// `two_cusp_canonical`.
#[wasm_bindgen]
pub fn fixture(name: &str) -> String {
    match name {
        "figure_eight" => fixtures::FIGURE_EIGHT,
        "whitehead" => fixtures::WHITEHEAD,
        "two_cusp_canonical" => fixtures::TWO_CUSP_CANONICAL,
        _ => "",
    }
    .to_string()
}

fn certify_value(tri: &IdealTriangulation) -> Value {
    let shapes = match solve_approx(tri).map_err(|e| e.to_string()).and_then(|z| certify_shapes(tri, &z).map_err(|e| e.to_string())) {
        Ok(s) => s,
        Err(e) => return json!({ "error": e }),
    };
    let cert = match certify_canonical(tri, &shapes, DEFAULT_MARGIN) {
        Ok(c) => c,
        Err(e) => return json!({ "error": e.to_string() }),
    };
    // One row per face: the worst enclosure over all ledgers.
    let faces: Vec<Value> = (0..tri.faces().len())
        .map(|i| {
            let lo = cert.ledgers.iter().map(|l| l.report.faces[i].tilt.lo()).fold(f64::INFINITY, f64::min);
            let hi = cert.ledgers.iter().map(|l| l.report.faces[i].tilt.hi()).fold(f64::NEG_INFINITY, f64::max);
            json!({ "face": i, "lo": lo, "hi": hi })
        })
        .collect();
    let symmetry = certified_symmetry_group(tri, &cert).ok().map(|g| g.order());
    json!({
        "num_tets": tri.num_tets(),
        "num_cusps": tri.num_cusps(),
        "shapes": shapes.midpoints().iter().map(|z| [z.re, z.im]).collect::<Vec<_>>(),
        "canonical": matches!(cert.verdict, Verdict::CertifiedCanonical),
        "tilts": faces,
        "symmetry_order": symmetry,
    })
}

/// Certify a triangulation given in the native text format.
#[wasm_bindgen]
pub fn certify(text: &str) -> String {
    match IdealTriangulation::from_text(text) {
        Ok(t) => certify_value(&t).to_string(),
        Err(e) => error(e),
    }
}

/// Scramble a triangulation by `moves` random Pachner moves, canonize it
/// again and certify the result.
#[wasm_bindgen]
pub fn scramble_and_canonize(text: &str, seed: u32, moves: u32) -> String {
    let tri = match IdealTriangulation::from_text(text) {
        Ok(t) => t,
        Err(e) => return error(e),
    };
    let walked = retriangulate_random(&tri, seed as u64, moves as usize);
    let caps = Caps { max_moves: 2_000, ..Caps::default() };
    match canonize(&walked, seed as u64, caps) {
        Ok(out) => json!({
            "scrambled": walked.to_text(),
            "scrambled_tets": walked.num_tets(),
            "status": out.trace.status,
            "moves": out.trace.moves.iter().map(|m| serde_json::to_value(m.kind).expect("move serializes")).collect::<Vec<_>>(),
            "candidate": out.triangulation.to_text(),
            "same_as_input": is_isomorphic(&out.triangulation, &tri),
            "certificate": certify_value(&out.triangulation),
        })
        .to_string(),
        Err(e) => error(e),
    }
}

/// Orders of `kα + β` for `k = 1..=n`.
#[wasm_bindgen]
pub fn lspace_table(order_alpha: u32, order_beta: u32, n: u32) -> String {
    match lspace_cone(order_alpha as u64, order_beta as u64) {
        Ok(cone) => serde_json::to_string(&cone.enumerate(n as u64)).expect("table serializes"),
        Err(e) => error(e),
    }
}
