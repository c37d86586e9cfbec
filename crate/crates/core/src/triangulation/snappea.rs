//! Reader for the legacy SnapPea triangulation file format.
//!
//! Kept apart from the native format: only oriented manifolds with torus
//! cusps are accepted, and peripheral curves are taken from the right-handed
//! sheet plus the left-handed one (the latter is zero in oriented files).
//! Shapes, fillings and the solution type are ignored.

use super::{CuspCurves, IdealTriangulation, ParseError, Perm4, PeripheralCurve, Tetrahedron};

struct Tokens<'a> {
    iter: std::vec::IntoIter<(usize, &'a str)>,
}

impl<'a> Tokens<'a> {
    fn next(&mut self, what: &str) -> Result<(usize, &'a str), ParseError> {
        self.iter.next().ok_or_else(|| ParseError::Missing(what.into()))
    }

    fn int(&mut self, what: &str) -> Result<i64, ParseError> {
        let (line, tok) = self.next(what)?;
        tok.parse().map_err(|_| ParseError::Syntax { line, message: format!("{what}: expected an integer, found `{tok}`") })
    }

    fn float(&mut self, what: &str) -> Result<f64, ParseError> {
        let (line, tok) = self.next(what)?;
        tok.parse().map_err(|_| ParseError::Syntax { line, message: format!("{what}: expected a number, found `{tok}`") })
    }
}

pub fn parse(text: &str) -> Result<IdealTriangulation, ParseError> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    let (hl, header) = lines.next().ok_or_else(|| ParseError::Missing("`% Triangulation` header".into()))?;
    if header.trim() != "% Triangulation" {
        return Err(ParseError::Syntax { line: hl, message: "expected `% Triangulation`".into() });
    }
    lines.next().ok_or_else(|| ParseError::Missing("manifold name".into()))?;
    let toks: Vec<(usize, &str)> = lines.flat_map(|(i, l)| l.split_whitespace().map(move |t| (i, t))).collect();
    let mut tk = Tokens { iter: toks.into_iter() };

    tk.next("solution type")?;
    tk.float("volume")?;
    let (line, orient) = tk.next("orientability")?;
    if orient != "oriented_manifold" {
        return Err(ParseError::Syntax { line, message: format!("only oriented manifolds are supported, found `{orient}`") });
    }
    let (_, cs) = tk.next("Chern-Simons flag")?;
    if cs == "CS_known" {
        tk.float("Chern-Simons value")?;
    }
    let or_cusps = tk.int("orientable cusp count")? as usize;
    let nonor_cusps = tk.int("nonorientable cusp count")?;
    if nonor_cusps != 0 {
        return Err(ParseError::Syntax { line, message: "Klein bottle cusps are not supported".into() });
    }
    for _ in 0..or_cusps {
        let (line, kind) = tk.next("cusp type")?;
        if kind != "torus" {
            return Err(ParseError::Syntax { line, message: format!("unsupported cusp type `{kind}`") });
        }
        tk.float("filling m")?;
        tk.float("filling l")?;
    }
    let n = tk.int("tetrahedron count")? as usize;
    let mut tets = Vec::with_capacity(n);
    // curves[tet][meridian/longitude][v][f]
    let mut raw = vec![[[[0i64; 4]; 4]; 2]; n];
    for t in 0..n {
        let mut neighbor = [0; 4];
        for slot in &mut neighbor {
            *slot = tk.int("neighbor")? as usize;
        }
        let mut gluing = [Perm4::IDENTITY; 4];
        for g in &mut gluing {
            let (line, tok) = tk.next("gluing")?;
            *g = tok.parse().map_err(|e: String| ParseError::Syntax { line, message: e })?;
        }
        for _ in 0..4 {
            tk.int("cusp index")?;
        }
        for curve in 0..2 {
            for _sheet in 0..2 {
                for v in 0..4 {
                    for f in 0..4 {
                        raw[t][curve][v][f] += tk.int("peripheral curve")?;
                    }
                }
            }
        }
        tk.float("shape re")?;
        tk.float("shape im")?;
        tets.push(Tetrahedron { neighbor, gluing });
    }

    // Attach curves to our cusp numbering (first appearance).
    let bare = IdealTriangulation::with_computed_peripheral(tets.clone())?;
    let mut curves: Vec<CuspCurves> = (0..bare.num_cusps())
        .map(|_| CuspCurves { meridian: PeripheralCurve::zero(n), longitude: PeripheralCurve::zero(n) })
        .collect();
    for t in 0..n {
        for v in 0..4 {
            let k = bare.cusp_of(t, v);
            for f in 0..4 {
                curves[k].meridian.set(t, v, f, raw[t][0][v][f]);
                curves[k].longitude.set(t, v, f, raw[t][1][v][f]);
            }
        }
    }
    if curves.iter().any(|c| c.meridian.is_zero() || c.longitude.is_zero()) {
        return Ok(bare);
    }
    // The file's crossing sign is opposite to ours when the basis comes out
    // negatively oriented; fix by flipping the longitude.
    let mut oriented = Vec::new();
    for cc in curves {
        let x = super::intersection_number(&bare, &cc.meridian, &cc.longitude);
        oriented.push(if x < 0 { CuspCurves { meridian: cc.meridian, longitude: cc.longitude.negated() } } else { cc });
    }
    Ok(IdealTriangulation::new(tets, oriented)?)
}
