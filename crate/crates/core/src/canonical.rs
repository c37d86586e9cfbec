//! Tilts and certified canonicity.
//!
//! For a face `F` opposite vertex `i` of tetrahedron `X`,
//! `tilt(X, F) = R_i − Σ_{k≠i} R_k cos θ_ik`, where `R_k` is the circumradius
//! of the horotriangle at vertex `k` and `θ_ik` the dihedral angle along edge
//! `ik`. A face's tilt is the sum over its two sides. A triangulation is the
//! canonical cellulation exactly when every face tilt is negative for cusp
//! cross-sections of equal area. With several cusps the areas cannot be
//! equalised exactly in interval arithmetic, so every other cusp is scaled
//! once slightly below and once slightly above the area of cusp 0, and every
//! combination of the two choices must give negative tilts.

use serde::Serialize;
use thiserror::Error;

use crate::cusp::{build_cross_section, make_bracketing_pair, BracketingImpossible, CuspCrossSection, DEFAULT_MARGIN};
use crate::geometry::{parameter_boxes, ShapeBoxes};
use crate::interval::RealInterval;
use crate::triangulation::{enumerate_isomorphisms, shape_slot, CombinatorialIsomorphism, IdealTriangulation};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FaceVerdict {
    ProvablyNegative,
    Indeterminate,
    ProvablyNonnegative,
}

impl FaceVerdict {
    pub fn of(tilt: RealInterval) -> FaceVerdict {
        if tilt.strictly_less(&RealInterval::ZERO) {
            FaceVerdict::ProvablyNegative
        } else if RealInterval::ZERO.strictly_less(&tilt) {
            FaceVerdict::ProvablyNonnegative
        } else {
            FaceVerdict::Indeterminate
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct FaceTilt {
    pub face: usize,
    pub tilt: RealInterval,
    /// Contributions of the `(tet, face)` side and the other side.
    pub sides: [RealInterval; 2],
    pub verdict: FaceVerdict,
}

#[derive(Clone, Debug, Serialize)]
pub struct TiltReport {
    pub faces: Vec<FaceTilt>,
}

impl TiltReport {
    pub fn all_negative(&self) -> bool {
        self.faces.iter().all(|f| f.verdict == FaceVerdict::ProvablyNegative)
    }
}

/// `tilt(X, F)` for the face of tetrahedron `tet` opposite vertex `face`.
pub fn tilt_side(
    tri: &IdealTriangulation,
    tet: usize,
    face: usize,
    cross: &CuspCrossSection,
    shapes: &ShapeBoxes,
) -> RealInterval {
    let params = parameter_boxes(shapes.boxes[tet]).expect("certified shapes avoid 0 and 1");
    let r = |v: usize| cross.triangle(tri, tet, v).circumradius;
    let mut tilt = r(face);
    for k in (0..4).filter(|&k| k != face) {
        let cos = params[shape_slot(face, k)].cos_arg().expect("nonzero edge parameter");
        tilt = tilt - r(k) * cos;
    }
    tilt
}

pub fn tilt_report(tri: &IdealTriangulation, cross: &CuspCrossSection, shapes: &ShapeBoxes) -> TiltReport {
    let faces = tri
        .faces()
        .iter()
        .enumerate()
        .map(|(i, f)| {
            let a = tilt_side(tri, f.tet, f.face, cross, shapes);
            let b = tilt_side(tri, f.other_tet, f.other_face, cross, shapes);
            let tilt = a + b;
            FaceTilt { face: i, tilt, sides: [a, b], verdict: FaceVerdict::of(tilt) }
        })
        .collect();
    TiltReport { faces }
}

/// Tilts for one choice of scaling of cusps `1..m`.
#[derive(Clone, Debug, Serialize)]
pub struct Ledger {
    /// `-1` or `+1` for each cusp after the first; `0` marks the diagnostic
    /// equal-area ledger.
    pub signs: Vec<i8>,
    /// Scale factor applied to each cusp after the first.
    pub factors: Vec<RealInterval>,
    pub areas: Vec<RealInterval>,
    pub report: TiltReport,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    CertifiedCanonical,
    /// Faces that were not certified negative in some ledger, by decreasing
    /// upper endpoint of their tilt.
    Inconclusive { faces: Vec<usize> },
}

#[derive(Clone, Debug, Serialize)]
pub struct CanonicityCertificate {
    pub triangulation_hash: String,
    pub num_tets: usize,
    pub num_cusps: usize,
    pub shapes: ShapeBoxes,
    /// Unit-seed cross-section areas.
    pub cusp_areas: Vec<RealInterval>,
    /// Smallest lower and largest upper circumradius endpoint, per cusp.
    pub circumradius_range: Vec<(f64, f64)>,
    pub bracketing_margin: Option<f64>,
    pub ledgers: Vec<Ledger>,
    /// Cusps scaled to equal area by an interval factor. Not used for the
    /// verdict: it shows which tilts are consistent with zero.
    pub equal_area: Option<Ledger>,
    pub verdict: Verdict,
}

impl CanonicityCertificate {
    pub fn is_canonical(&self) -> bool {
        self.verdict == Verdict::CertifiedCanonical
    }

    /// Tilt intervals of every face that contain zero, over all ledgers.
    pub fn zero_tilts(&self) -> impl Iterator<Item = &FaceTilt> {
        self.ledgers
            .iter()
            .chain(self.equal_area.iter())
            .flat_map(|l| l.report.faces.iter())
            .filter(|f| f.tilt.contains_zero())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CertifyError {
    #[error("shape boxes are not certified")]
    UncertifiedShapes,
    #[error("cusp cross-section: {0}")]
    CrossSection(#[from] crate::cusp::CuspError),
    #[error("expected {expected} cusps, triangulation has {found}")]
    WrongCuspCount { expected: &'static str, found: usize },
    #[error("{0}")]
    Bracketing(String),
}

impl From<BracketingImpossible> for CertifyError {
    fn from(e: BracketingImpossible) -> Self {
        CertifyError::Bracketing(e.to_string())
    }
}

fn verdict_of(ledgers: &[Ledger], num_faces: usize) -> Verdict {
    if ledgers.iter().all(|l| l.report.all_negative()) {
        return Verdict::CertifiedCanonical;
    }
    let mut worst: Vec<(f64, usize)> = (0..num_faces)
        .filter(|&i| ledgers.iter().any(|l| l.report.faces[i].verdict != FaceVerdict::ProvablyNegative))
        .map(|i| (ledgers.iter().map(|l| l.report.faces[i].tilt.hi()).fold(f64::NEG_INFINITY, f64::max), i))
        .collect();
    worst.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
    Verdict::Inconclusive { faces: worst.into_iter().map(|(_, i)| i).collect() }
}

fn certificate(
    tri: &IdealTriangulation,
    shapes: &ShapeBoxes,
    cross: &CuspCrossSection,
    margin: Option<f64>,
    ledgers: Vec<Ledger>,
    equal_area: Option<Ledger>,
) -> CanonicityCertificate {
    let verdict = verdict_of(&ledgers, tri.faces().len());
    CanonicityCertificate {
        triangulation_hash: tri.content_hash(),
        num_tets: tri.num_tets(),
        num_cusps: tri.num_cusps(),
        shapes: shapes.clone(),
        cusp_areas: cross.cusps.iter().map(|c| c.area).collect(),
        circumradius_range: cross.cusps.iter().map(|c| c.circumradius_range()).collect(),
        bracketing_margin: margin,
        ledgers,
        equal_area,
        verdict,
    }
}

/// Certify a one-cusped triangulation.
pub fn certify_one_cusp(tri: &IdealTriangulation, shapes: &ShapeBoxes) -> Result<CanonicityCertificate, CertifyError> {
    if tri.num_cusps() != 1 {
        return Err(CertifyError::WrongCuspCount { expected: "exactly 1", found: tri.num_cusps() });
    }
    if !shapes.is_certified() {
        return Err(CertifyError::UncertifiedShapes);
    }
    let cross = build_cross_section(tri, shapes)?;
    let report = tilt_report(tri, &cross, shapes);
    let ledger = Ledger { signs: vec![], factors: vec![], areas: vec![cross.area(0)], report };
    Ok(certificate(tri, shapes, &cross, None, vec![ledger], None))
}

/// Certify a triangulation with two or more cusps, with bracketing margin
/// [`DEFAULT_MARGIN`].
pub fn certify_multi_cusp(tri: &IdealTriangulation, shapes: &ShapeBoxes) -> Result<CanonicityCertificate, CertifyError> {
    certify_multi_cusp_with_margin(tri, shapes, DEFAULT_MARGIN)
}

pub fn certify_multi_cusp_with_margin(
    tri: &IdealTriangulation,
    shapes: &ShapeBoxes,
    margin: f64,
) -> Result<CanonicityCertificate, CertifyError> {
    let m = tri.num_cusps();
    if m < 2 {
        return Err(CertifyError::WrongCuspCount { expected: "at least 2", found: m });
    }
    if !shapes.is_certified() {
        return Err(CertifyError::UncertifiedShapes);
    }
    let cross = build_cross_section(tri, shapes)?;
    let area0 = cross.area(0);
    let mut pairs = Vec::with_capacity(m - 1);
    for c in 1..m {
        pairs.push(make_bracketing_pair(area0, &cross.cusps[c], margin)?);
    }
    let mut ledgers = Vec::with_capacity(1 << (m - 1));
    for pattern in 0..(1usize << (m - 1)) {
        let mut scaled = cross.clone();
        let mut signs = Vec::with_capacity(m - 1);
        let mut factors = Vec::with_capacity(m - 1);
        for c in 1..m {
            let plus = pattern >> (c - 1) & 1 == 1;
            let section = if plus { &pairs[c - 1].1 } else { &pairs[c - 1].0 };
            // Recover the factor from a side length for the record.
            factors.push(section.area.div(cross.cusps[c].area).expect("positive area").sqrt().expect("positive"));
            scaled.cusps[c] = section.clone();
            signs.push(if plus { 1 } else { -1 });
        }
        let report = tilt_report(tri, &scaled, shapes);
        let areas = scaled.cusps.iter().map(|c| c.area).collect();
        ledgers.push(Ledger { signs, factors, areas, report });
    }

    let mut equal = cross.clone();
    let mut factors = Vec::with_capacity(m - 1);
    for c in 1..m {
        let f = area0.div(cross.cusps[c].area).expect("positive area").sqrt().expect("positive");
        equal.cusps[c] = cross.cusps[c].scaled(f);
        factors.push(f);
    }
    let equal_area = Ledger {
        signs: vec![0; m - 1],
        factors,
        areas: equal.cusps.iter().map(|c| c.area).collect(),
        report: tilt_report(tri, &equal, shapes),
    };
    Ok(certificate(tri, shapes, &cross, Some(margin), ledgers, Some(equal_area)))
}

/// One- or multi-cusp certification as appropriate.
pub fn certify_canonical(
    tri: &IdealTriangulation,
    shapes: &ShapeBoxes,
    margin: f64,
) -> Result<CanonicityCertificate, CertifyError> {
    if tri.num_cusps() == 1 {
        certify_one_cusp(tri, shapes)
    } else {
        certify_multi_cusp_with_margin(tri, shapes, margin)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("the symmetry group needs a CertifiedCanonical certificate for this triangulation")]
pub struct CertificateRequired;

/// The isometry group of a manifold, read off its certified canonical
/// triangulation.
#[derive(Clone, Debug, Serialize)]
pub struct SymmetryGroup {
    pub elements: Vec<CombinatorialIsomorphism>,
    pub generators: Vec<CombinatorialIsomorphism>,
    /// How each element permutes the cusps, in element order.
    pub cusp_permutations: Vec<Vec<usize>>,
}

impl SymmetryGroup {
    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn is_trivial(&self) -> bool {
        self.elements.len() == 1
    }

    pub fn orientation_preserving_order(&self) -> usize {
        self.elements.iter().filter(|g| g.preserves_orientation()).count()
    }
}

/// Smallest-first generating set: an element is added when it is not in the
/// subgroup generated so far.
fn generators(elements: &[CombinatorialIsomorphism]) -> Vec<CombinatorialIsomorphism> {
    let mut gens: Vec<CombinatorialIsomorphism> = Vec::new();
    let mut span: std::collections::BTreeSet<CombinatorialIsomorphism> = elements.iter().filter(|g| g.is_identity()).cloned().collect();
    for g in elements {
        if span.contains(g) {
            continue;
        }
        gens.push(g.clone());
        let mut frontier: Vec<CombinatorialIsomorphism> = span.iter().cloned().collect();
        while let Some(x) = frontier.pop() {
            for s in &gens {
                let y = s.compose(&x);
                if span.insert(y.clone()) {
                    frontier.push(y);
                }
            }
        }
    }
    gens
}

pub fn certified_symmetry_group(
    tri: &IdealTriangulation,
    cert: &CanonicityCertificate,
) -> Result<SymmetryGroup, CertificateRequired> {
    if !cert.is_canonical() || cert.triangulation_hash != tri.content_hash() {
        return Err(CertificateRequired);
    }
    let elements = enumerate_isomorphisms(tri, tri);
    let cusp_permutations = elements.iter().map(|g| g.cusp_map(tri, tri)).collect();
    let generators = generators(&elements);
    Ok(SymmetryGroup { elements, generators, cusp_permutations })
}
