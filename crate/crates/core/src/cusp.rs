//! Horospherical cusp cross-sections from shape enclosures.
//!
//! Each ideal vertex `v` of a tetrahedron meets a cross-section in a
//! Euclidean triangle whose corners sit on the three edges leaving `v`. The
//! corner on edge `(v, a)` has angle `arg` of that edge's parameter, and the
//! two sides meeting there have length ratio `|param|`. Starting from one
//! triangle with a fixed side length, lengths propagate across glued faces.

use serde::Serialize;
use thiserror::Error;

use crate::geometry::{parameter_boxes, ShapeBoxes};
use crate::interval::{ComplexBox, RealInterval};
use crate::triangulation::{ccw_corners, shape_slot, IdealTriangulation};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CuspError {
    #[error("side enclosures disagree across face {face} of tetrahedron {tet}")]
    InconsistentPropagation { tet: usize, face: usize },
    #[error("shape box of tetrahedron {0} is too wide for side ratios")]
    BadShape(usize),
    #[error("seed ({0}, {1}) is not on the requested cusp")]
    BadSeed(usize, usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CircumradiusError {
    #[error("side lengths provably violate the triangle inequality")]
    ProvablyDegenerate,
    #[error("triangle cannot be separated from a degenerate one")]
    NotSeparated,
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("area enclosures too wide to bracket at margin {delta}")]
pub struct BracketingImpossible {
    pub delta: f64,
}

/// Heron's formula: circumradius `abc / (4K)` and area `K`.
fn heron(a: RealInterval, b: RealInterval, c: RealInterval) -> Result<(RealInterval, RealInterval), CircumradiusError> {
    let rad16 = (a + b + c) * (b + c - a) * (a + c - b) * (a + b - c);
    if rad16.is_strictly_negative() {
        return Err(CircumradiusError::ProvablyDegenerate);
    }
    let rad16 = rad16.clamp_nonnegative().ok_or(CircumradiusError::ProvablyDegenerate)?;
    let area = rad16.sqrt().expect("non-negative").scale(0.25);
    let r = (a * b * c).div(area.scale(4.0)).map_err(|_| CircumradiusError::NotSeparated)?;
    Ok((r, area))
}

/// Circumradius of a triangle with the given side enclosures.
pub fn circumradius(a: RealInterval, b: RealInterval, c: RealInterval) -> Result<RealInterval, CircumradiusError> {
    heron(a, b, c).map(|(r, _)| r)
}

/// One horotriangle. `sides[i]` is the side opposite corner
/// `ccw_corners(v)[i]`, lying in that face of the tetrahedron.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct Horotriangle {
    pub sides: [RealInterval; 3],
    pub circumradius: RealInterval,
    pub area: RealInterval,
}

impl Horotriangle {
    /// Side lying in face `f` of a horotriangle at vertex `v`.
    pub fn side_in_face(&self, v: usize, f: usize) -> RealInterval {
        let i = ccw_corners(v).iter().position(|&c| c == f).expect("face differs from vertex");
        self.sides[i]
    }

    fn scaled(&self, f: RealInterval) -> Horotriangle {
        Horotriangle {
            sides: self.sides.map(|s| s * f),
            circumradius: self.circumradius * f,
            area: self.area * f.sqr(),
        }
    }
}

/// Cross-section of a single cusp.
#[derive(Clone, Debug, Serialize)]
pub struct CuspSection {
    pub cusp: usize,
    pub seed: (usize, usize),
    /// Indexed by `4·tet + vertex`; `None` off this cusp.
    pub triangles: Vec<Option<Horotriangle>>,
    pub area: RealInterval,
}

impl CuspSection {
    pub fn triangle(&self, t: usize, v: usize) -> Option<&Horotriangle> {
        self.triangles[4 * t + v].as_ref()
    }

    /// The section with all lengths multiplied by `factor`.
    pub fn scaled(&self, factor: RealInterval) -> CuspSection {
        let triangles: Vec<Option<Horotriangle>> = self.triangles.iter().map(|h| h.map(|h| h.scaled(factor))).collect();
        let area = triangles.iter().flatten().map(|h| h.area).sum();
        CuspSection { cusp: self.cusp, seed: self.seed, triangles, area }
    }

    pub fn circumradius_range(&self) -> (f64, f64) {
        self.triangles.iter().flatten().fold((f64::INFINITY, 0.0), |(lo, hi), h| {
            (lo.min(h.circumradius.lo()), hi.max(h.circumradius.hi()))
        })
    }
}

/// Cross-sections of every cusp.
#[derive(Clone, Debug, Serialize)]
pub struct CuspCrossSection {
    pub cusps: Vec<CuspSection>,
}

impl CuspCrossSection {
    pub fn area(&self, cusp: usize) -> RealInterval {
        self.cusps[cusp].area
    }

    /// Horotriangle at vertex `v` of tetrahedron `t`, whichever cusp it is on.
    pub fn triangle(&self, tri: &IdealTriangulation, t: usize, v: usize) -> &Horotriangle {
        self.cusps[tri.cusp_of(t, v)].triangle(t, v).expect("every horotriangle is reached")
    }
}

/// Default seed of a cusp: its lowest `(tet, vertex)`.
pub fn default_seed(tri: &IdealTriangulation, cusp: usize) -> (usize, usize) {
    tri.cusp_triangles(cusp)[0]
}

/// The side of a seed triangle given the prescribed length: the one joining
/// the two lowest-numbered other vertices.
fn seed_face(v: usize) -> usize {
    (0..4).filter(|&x| x != v).max().expect("three other vertices")
}

/// Side lengths of horotriangle `(t, v)` relative to its side `sides[2]`.
fn side_ratios(z: ComplexBox, t: usize, v: usize) -> Result<[RealInterval; 3], CuspError> {
    let ps = parameter_boxes(z).ok_or(CuspError::BadShape(t))?;
    let p = ccw_corners(v);
    let m = p.map(|a| ps[shape_slot(v, a)].abs());
    // Corner p0 relates sides p1 and p2; corner p1 relates p2 and p0.
    let r0 = RealInterval::ONE.div(m[1]).map_err(|_| CuspError::BadShape(t))?;
    Ok([r0, m[0], RealInterval::ONE])
}

/// Cross-section of `cusp` grown from `seed` with seed side `seed_length`.
pub fn build_cusp_section(
    tri: &IdealTriangulation,
    shapes: &ShapeBoxes,
    cusp: usize,
    seed: (usize, usize),
    seed_length: RealInterval,
) -> Result<CuspSection, CuspError> {
    if tri.cusp_of(seed.0, seed.1) != cusp {
        return Err(CuspError::BadSeed(seed.0, seed.1));
    }
    let n = tri.num_tets();
    let mut ratios = vec![None; 4 * n];
    for &(t, v) in &tri.cusp_triangles(cusp) {
        ratios[4 * t + v] = Some(side_ratios(shapes.boxes[t], t, v)?);
    }
    let index = |v: usize, f: usize| ccw_corners(v).iter().position(|&c| c == f).expect("face differs from vertex");
    // scale[i] multiplies ratios[i].
    let mut scale: Vec<Option<RealInterval>> = vec![None; 4 * n];
    let (st, sv) = seed;
    let r = ratios[4 * st + sv].expect("seed on cusp");
    scale[4 * st + sv] =
        Some(seed_length.div(r[index(sv, seed_face(sv))]).map_err(|_| CuspError::BadShape(st))?);
    let mut queue = std::collections::VecDeque::from([(st, sv)]);
    while let Some((t, v)) = queue.pop_front() {
        let s = scale[4 * t + v].expect("queued triangles are scaled");
        let r = ratios[4 * t + v].expect("on cusp");
        for f in (0..4).filter(|&f| f != v) {
            let (t2, v2, f2) = tri.side_partner(t, v, f);
            let len = s * r[index(v, f)];
            let r2 = ratios[4 * t2 + v2].expect("partner on the same cusp");
            let cand = len.div(r2[index(v2, f2)]).map_err(|_| CuspError::BadShape(t2))?;
            match scale[4 * t2 + v2] {
                None => {
                    scale[4 * t2 + v2] = Some(cand);
                    queue.push_back((t2, v2));
                }
                Some(old) => {
                    let both = old.intersect(&cand).ok_or(CuspError::InconsistentPropagation { tet: t, face: f })?;
                    scale[4 * t2 + v2] = Some(both);
                }
            }
        }
    }
    let mut triangles = vec![None; 4 * n];
    for &(t, v) in &tri.cusp_triangles(cusp) {
        let s = scale[4 * t + v].expect("cusp link is connected");
        let sides = ratios[4 * t + v].expect("on cusp").map(|x| x * s);
        let (circumradius, area) = heron(sides[0], sides[1], sides[2]).map_err(|_| CuspError::BadShape(t))?;
        triangles[4 * t + v] = Some(Horotriangle { sides, circumradius, area });
    }
    let area = triangles.iter().flatten().map(|h: &Horotriangle| h.area).sum();
    Ok(CuspSection { cusp, seed, triangles, area })
}

/// Cross-sections of every cusp, each from its default seed with seed side 1.
pub fn build_cross_section(tri: &IdealTriangulation, shapes: &ShapeBoxes) -> Result<CuspCrossSection, CuspError> {
    let cusps = (0..tri.num_cusps())
        .map(|c| build_cusp_section(tri, shapes, c, default_seed(tri, c), RealInterval::ONE))
        .collect::<Result<_, _>>()?;
    Ok(CuspCrossSection { cusps })
}

/// Multiply every length of `cusp` by `factor`.
pub fn scale(section: &CuspCrossSection, cusp: usize, factor: RealInterval) -> CuspCrossSection {
    let mut out = section.clone();
    out.cusps[cusp] = section.cusps[cusp].scaled(factor);
    out
}

/// Factors `(1 ∓ δ)·√(A0/A1)`, checked to put the scaled `A1` strictly below
/// and strictly above `A0`.
pub fn bracketing_factors(
    area0: RealInterval,
    area1: RealInterval,
    delta: f64,
) -> Result<(RealInterval, RealInterval), BracketingImpossible> {
    let ratio = (area0.mid() / area1.mid()).sqrt();
    let lower = RealInterval::point((1.0 - delta) * ratio);
    let upper = RealInterval::point((1.0 + delta) * ratio);
    if (area1 * lower.sqr()).strictly_less(&area0) && area0.strictly_less(&(area1 * upper.sqr())) {
        Ok((lower, upper))
    } else {
        Err(BracketingImpossible { delta })
    }
}

pub const DEFAULT_MARGIN: f64 = 0.02;
pub const MAX_MARGIN: f64 = 0.32;

/// Scalings `C1⁻`, `C1⁺` of `c1` whose areas strictly bracket `area0`. The
/// margin starts at `delta` and doubles up to [`MAX_MARGIN`].
pub fn make_bracketing_pair(
    area0: RealInterval,
    c1: &CuspSection,
    delta: f64,
) -> Result<(CuspSection, CuspSection), BracketingImpossible> {
    let mut d = delta;
    loop {
        match bracketing_factors(area0, c1.area, d) {
            Ok((lo, hi)) => {
                let (minus, plus) = (c1.scaled(lo), c1.scaled(hi));
                // Areas are recomputed from the scaled triangles; recheck.
                if minus.area.strictly_less(&area0) && area0.strictly_less(&plus.area) {
                    return Ok((minus, plus));
                }
            }
            Err(_) if d * 2.0 <= MAX_MARGIN => {}
            Err(e) => return Err(e),
        }
        if d * 2.0 > MAX_MARGIN {
            return Err(BracketingImpossible { delta: d });
        }
        d *= 2.0;
    }
}
