//! Native text format.
//!
//! ```text
//! # comment
//! tets 2 cusps 1
//! tet 0: 1 0132 1 1230 1 2310 1 2103
//! tet 1: 0 0132 0 3201 0 3012 0 2103
//! meridian 0: 0:0:1=1 0:0:2=-1 ...
//! longitude 0: ...
//! ```
//!
//! A file with no curve records at all gets a computed peripheral basis.

use std::fmt::Write;

use thiserror::Error;

use super::{CuspCurves, IdealTriangulation, Perm4, PeripheralCurve, Tetrahedron, ValidationError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("missing {0}")]
    Missing(String),
    #[error(transparent)]
    Validation(#[from] ValidationError),
}

fn syntax(line: usize, message: impl Into<String>) -> ParseError {
    ParseError::Syntax { line, message: message.into() }
}

fn parse_usize(tok: &str, line: usize, what: &str) -> Result<usize, ParseError> {
    tok.parse().map_err(|_| syntax(line, format!("{what}: expected a non-negative integer, found `{tok}`")))
}

pub(super) fn parse(text: &str) -> Result<IdealTriangulation, ParseError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());

    let (hline, header) = lines.next().ok_or_else(|| ParseError::Missing("header line `tets N cusps M`".into()))?;
    let toks: Vec<&str> = header.split_whitespace().collect();
    if toks.len() != 4 || toks[0] != "tets" || toks[2] != "cusps" {
        return Err(syntax(hline, "header must read `tets N cusps M`"));
    }
    let num_tets = parse_usize(toks[1], hline, "tet count")?;
    let num_cusps = parse_usize(toks[3], hline, "cusp count")?;

    let mut tets: Vec<Option<Tetrahedron>> = vec![None; num_tets];
    let mut meridians: Vec<Option<PeripheralCurve>> = vec![None; num_cusps];
    let mut longitudes: Vec<Option<PeripheralCurve>> = vec![None; num_cusps];

    for (ln, line) in lines {
        let (head, body) = line.split_once(':').ok_or_else(|| syntax(ln, "expected `<kind> <index>: ...`"))?;
        let mut head_toks = head.split_whitespace();
        let kind = head_toks.next().unwrap_or("");
        let idx = parse_usize(head_toks.next().ok_or_else(|| syntax(ln, "missing index"))?, ln, "index")?;
        if head_toks.next().is_some() {
            return Err(syntax(ln, "unexpected token before `:`"));
        }
        match kind {
            "tet" => {
                if idx >= num_tets {
                    return Err(syntax(ln, format!("tet index {idx} out of range")));
                }
                if tets[idx].is_some() {
                    return Err(syntax(ln, format!("tet {idx} defined twice")));
                }
                let fields: Vec<&str> = body.split_whitespace().collect();
                if fields.len() != 8 {
                    return Err(syntax(ln, format!("tet {idx}: expected 8 fields, found {}", fields.len())));
                }
                let mut neighbor = [0; 4];
                let mut gluing = [Perm4::IDENTITY; 4];
                for f in 0..4 {
                    neighbor[f] = parse_usize(fields[2 * f], ln, &format!("tet {idx} neighbor {f}"))?;
                    gluing[f] = fields[2 * f + 1].parse().map_err(|e: String| syntax(ln, format!("tet {idx} gluing {f}: {e}")))?;
                }
                tets[idx] = Some(Tetrahedron { neighbor, gluing });
            }
            "meridian" | "longitude" => {
                if idx >= num_cusps {
                    return Err(syntax(ln, format!("cusp index {idx} out of range")));
                }
                let slot = if kind == "meridian" { &mut meridians[idx] } else { &mut longitudes[idx] };
                if slot.is_some() {
                    return Err(syntax(ln, format!("{kind} {idx} defined twice")));
                }
                let mut curve = PeripheralCurve::zero(num_tets);
                for tok in body.split_whitespace() {
                    let (loc, w) = tok.split_once('=').ok_or_else(|| syntax(ln, format!("weight `{tok}` must look like t:v:f=w")))?;
                    let parts: Vec<&str> = loc.split(':').collect();
                    if parts.len() != 3 {
                        return Err(syntax(ln, format!("weight `{tok}` must look like t:v:f=w")));
                    }
                    let t = parse_usize(parts[0], ln, "weight tet")?;
                    let v = parse_usize(parts[1], ln, "weight vertex")?;
                    let f = parse_usize(parts[2], ln, "weight face")?;
                    if t >= num_tets || v > 3 || f > 3 {
                        return Err(syntax(ln, format!("weight `{tok}` out of range")));
                    }
                    let w: i64 = w.parse().map_err(|_| syntax(ln, format!("weight `{tok}`: bad integer")))?;
                    if curve.get(t, v, f) != 0 {
                        return Err(syntax(ln, format!("weight location {loc} repeated")));
                    }
                    curve.set(t, v, f, w);
                }
                *slot = Some(curve);
            }
            other => return Err(syntax(ln, format!("unknown record `{other}`"))),
        }
    }

    let tets = tets
        .into_iter()
        .enumerate()
        .map(|(i, t)| t.ok_or_else(|| ParseError::Missing(format!("tet {i}"))))
        .collect::<Result<Vec<_>, _>>()?;
    if meridians.iter().chain(&longitudes).all(Option::is_none) {
        let tri = IdealTriangulation::with_computed_peripheral(tets)?;
        if tri.num_cusps() != num_cusps {
            return Err(ValidationError::CuspCountMismatch { declared: num_cusps, found: tri.num_cusps() }.into());
        }
        return Ok(tri);
    }
    let mut curves = Vec::with_capacity(num_cusps);
    for (k, (m, l)) in meridians.into_iter().zip(longitudes).enumerate() {
        let meridian = m.ok_or_else(|| ParseError::Missing(format!("meridian {k}")))?;
        let longitude = l.ok_or_else(|| ParseError::Missing(format!("longitude {k}")))?;
        curves.push(CuspCurves { meridian, longitude });
    }
    Ok(IdealTriangulation::new(tets, curves)?)
}

pub(super) fn serialize(tri: &IdealTriangulation) -> String {
    let mut out = String::new();
    writeln!(out, "tets {} cusps {}", tri.num_tets(), tri.num_cusps()).unwrap();
    for (i, tet) in tri.tets().iter().enumerate() {
        write!(out, "tet {i}:").unwrap();
        for f in 0..4 {
            write!(out, " {} {}", tet.neighbor[f], tet.gluing[f]).unwrap();
        }
        out.push('\n');
    }
    for (k, cc) in tri.curves().iter().enumerate() {
        for (name, curve) in [("meridian", &cc.meridian), ("longitude", &cc.longitude)] {
            write!(out, "{name} {k}:").unwrap();
            for (t, v, f, w) in curve.entries() {
                write!(out, " {t}:{v}:{f}={w}").unwrap();
            }
            out.push('\n');
        }
    }
    out
}
