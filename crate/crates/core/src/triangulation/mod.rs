//! Combinatorial ideal triangulations.
//!
//! Tetrahedron `t` has vertices `0..4`; face `f` is the face opposite vertex
//! `f`. `neighbor[f]` is the tetrahedron glued across face `f` and
//! `gluing[f]` maps the vertices of `t` to the vertices of that neighbour, so
//! `gluing[f](f)` is the neighbour's face. Triangulations are assumed to be
//! consistently oriented: every gluing permutation is odd.
//!
//! Values are immutable once validated. Moves return new triangulations.

mod io;
mod isomorphism;
mod pachner;
mod peripheral;
mod perm;
pub mod snappea;

use std::collections::VecDeque;

use thiserror::Error;

pub use io::ParseError;
pub use isomorphism::{enumerate_isomorphisms, is_isomorphic, CombinatorialIsomorphism};
pub use pachner::{pachner_2_3, pachner_3_2, MoveError, MoveKind, MoveRecord};
pub use peripheral::{intersection_number, PeripheralCurve};
pub use perm::{ccw_corners, edge_index, other_two, shape_slot, Perm4, EDGE_VERTICES};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Tetrahedron {
    pub neighbor: [usize; 4],
    pub gluing: [Perm4; 4],
}

/// One tetrahedron-edge in the cyclic order around its edge class. The edge
/// runs from `a` to `b`; walking on crosses face `c`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EdgeEmbedding {
    pub tet: usize,
    pub a: usize,
    pub b: usize,
    pub c: usize,
    pub d: usize,
}

impl EdgeEmbedding {
    pub fn edge_index(&self) -> usize {
        edge_index(self.a, self.b)
    }
}

#[derive(Clone, Debug)]
pub struct EdgeClass {
    pub members: Vec<EdgeEmbedding>,
}

impl EdgeClass {
    pub fn valence(&self) -> usize {
        self.members.len()
    }
}

/// A glued pair of tetrahedron faces; `(tet, face)` is the lexicographically
/// smaller side.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Face {
    pub tet: usize,
    pub face: usize,
    pub other_tet: usize,
    pub other_face: usize,
    pub gluing: Perm4,
}

/// Meridian and longitude of one cusp.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CuspCurves {
    pub meridian: PeripheralCurve,
    pub longitude: PeripheralCurve,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ValidationError {
    #[error("triangulation has no tetrahedra")]
    Empty,
    #[error("tet {tet} face {face}: neighbor {neighbor} out of range")]
    NeighborOutOfRange { tet: usize, face: usize, neighbor: usize },
    #[error("tet {tet} face {face}: gluing is not an involution")]
    GluingMismatch { tet: usize, face: usize },
    #[error("tet {tet} face {face} is glued to itself")]
    SelfGluedFace { tet: usize, face: usize },
    #[error("tet {tet} face {face}: gluing {perm} is even, triangulation is not consistently oriented")]
    NotOriented { tet: usize, face: usize, perm: Perm4 },
    #[error("triangulation is disconnected")]
    Disconnected,
    #[error("an edge is identified with itself in reverse")]
    EdgeReversed,
    #[error("cusp {cusp} link has Euler characteristic {euler}, not a torus")]
    CuspNotTorus { cusp: usize, euler: i64 },
    #[error("header declares {declared} cusps, gluings give {found}")]
    CuspCountMismatch { declared: usize, found: usize },
    #[error("cusp {cusp} {curve}: {reason}")]
    BadCurve { cusp: usize, curve: &'static str, reason: String },
    #[error("cusp {cusp}: meridian and longitude intersect {value} times, expected ±1")]
    BadIntersection { cusp: usize, value: i64 },
}

#[derive(Clone, Debug)]
pub struct IdealTriangulation {
    tets: Vec<Tetrahedron>,
    curves: Vec<CuspCurves>,
    cusp_of: Vec<[usize; 4]>,
    num_cusps: usize,
    edge_of: Vec<[usize; 6]>,
    edges: Vec<EdgeClass>,
    face_of: Vec<[usize; 4]>,
    faces: Vec<Face>,
}

/// Gluing-derived data shared by validation and construction.
struct Skeleton {
    cusp_of: Vec<[usize; 4]>,
    num_cusps: usize,
    edge_of: Vec<[usize; 6]>,
    edges: Vec<EdgeClass>,
    face_of: Vec<[usize; 4]>,
    faces: Vec<Face>,
}

fn check_gluings(tets: &[Tetrahedron]) -> Result<(), ValidationError> {
    if tets.is_empty() {
        return Err(ValidationError::Empty);
    }
    let n = tets.len();
    for (t, tet) in tets.iter().enumerate() {
        for f in 0..4 {
            let nb = tet.neighbor[f];
            if nb >= n {
                return Err(ValidationError::NeighborOutOfRange { tet: t, face: f, neighbor: nb });
            }
            let sigma = tet.gluing[f];
            let g = sigma.apply(f);
            if nb == t && g == f {
                return Err(ValidationError::SelfGluedFace { tet: t, face: f });
            }
            if tets[nb].neighbor[g] != t || tets[nb].gluing[g] != sigma.inverse() {
                return Err(ValidationError::GluingMismatch { tet: t, face: f });
            }
            if sigma.is_even() {
                return Err(ValidationError::NotOriented { tet: t, face: f, perm: sigma });
            }
        }
    }
    let mut seen = vec![false; n];
    let mut queue = VecDeque::from([0]);
    seen[0] = true;
    while let Some(t) = queue.pop_front() {
        for &nb in &tets[t].neighbor {
            if !seen[nb] {
                seen[nb] = true;
                queue.push_back(nb);
            }
        }
    }
    if seen.iter().any(|s| !s) {
        return Err(ValidationError::Disconnected);
    }
    Ok(())
}

fn derive_skeleton(tets: &[Tetrahedron]) -> Result<Skeleton, ValidationError> {
    let n = tets.len();

    // Vertex classes, numbered by first appearance.
    const UNSET: usize = usize::MAX;
    let mut cusp_of = vec![[UNSET; 4]; n];
    let mut num_cusps = 0;
    for t in 0..n {
        for v in 0..4 {
            if cusp_of[t][v] != UNSET {
                continue;
            }
            cusp_of[t][v] = num_cusps;
            let mut stack = vec![(t, v)];
            while let Some((s, w)) = stack.pop() {
                for f in (0..4).filter(|&f| f != w) {
                    let nb = tets[s].neighbor[f];
                    let nw = tets[s].gluing[f].apply(w);
                    if cusp_of[nb][nw] == UNSET {
                        cusp_of[nb][nw] = num_cusps;
                        stack.push((nb, nw));
                    }
                }
            }
            num_cusps += 1;
        }
    }

    // Edge classes, walking around each edge.
    let mut edge_of = vec![[UNSET; 6]; n];
    let mut edges = Vec::new();
    for t in 0..n {
        for (e, &(a, b)) in EDGE_VERTICES.iter().enumerate() {
            if edge_of[t][e] != UNSET {
                continue;
            }
            let class = edges.len();
            let (c, d) = other_two(a, b);
            let start = EdgeEmbedding { tet: t, a, b, c, d };
            let mut members = Vec::new();
            let mut cur = start;
            loop {
                let ei = cur.edge_index();
                if edge_of[cur.tet][ei] != UNSET {
                    return Err(ValidationError::EdgeReversed);
                }
                edge_of[cur.tet][ei] = class;
                members.push(cur);
                let sigma = tets[cur.tet].gluing[cur.c];
                let next = EdgeEmbedding {
                    tet: tets[cur.tet].neighbor[cur.c],
                    a: sigma.apply(cur.a),
                    b: sigma.apply(cur.b),
                    c: sigma.apply(cur.d),
                    d: sigma.apply(cur.c),
                };
                if next == start {
                    break;
                }
                if next.tet == start.tet && next.edge_index() == e {
                    return Err(ValidationError::EdgeReversed);
                }
                cur = next;
            }
            edges.push(EdgeClass { members });
        }
    }

    let mut face_of = vec![[UNSET; 4]; n];
    let mut faces = Vec::new();
    for t in 0..n {
        for f in 0..4 {
            let nb = tets[t].neighbor[f];
            let g = tets[t].gluing[f].apply(f);
            if (t, f) <= (nb, g) {
                face_of[t][f] = faces.len();
                face_of[nb][g] = faces.len();
                faces.push(Face { tet: t, face: f, other_tet: nb, other_face: g, gluing: tets[t].gluing[f] });
            }
        }
    }

    // Every cusp link must be a torus.
    let mut euler = vec![0i64; num_cusps];
    for row in &cusp_of {
        for &k in row {
            // Each horotriangle contributes F = 1 and E = 3/2.
            euler[k] += 2 - 3;
        }
    }
    for class in &edges {
        let m = class.members[0];
        euler[cusp_of[m.tet][m.a]] += 2;
        euler[cusp_of[m.tet][m.b]] += 2;
    }
    for (cusp, &twice) in euler.iter().enumerate() {
        if twice != 0 {
            return Err(ValidationError::CuspNotTorus { cusp, euler: twice / 2 });
        }
    }

    Ok(Skeleton { cusp_of, num_cusps, edge_of, edges, face_of, faces })
}

impl IdealTriangulation {
    /// Validate gluings and peripheral curves; `curves[k]` belongs to cusp `k`
    /// in first-appearance order.
    pub fn new(tets: Vec<Tetrahedron>, curves: Vec<CuspCurves>) -> Result<Self, ValidationError> {
        check_gluings(&tets)?;
        let sk = derive_skeleton(&tets)?;
        if curves.len() != sk.num_cusps {
            return Err(ValidationError::CuspCountMismatch { declared: curves.len(), found: sk.num_cusps });
        }
        let tri = Self::assemble(tets, curves, sk);
        tri.check_curves()?;
        Ok(tri)
    }

    /// Validate gluings and attach a computed peripheral basis to each cusp.
    /// For a single cusp whose image in rational homology has rank one, the
    /// longitude is the homological longitude.
    pub fn with_computed_peripheral(tets: Vec<Tetrahedron>) -> Result<Self, ValidationError> {
        check_gluings(&tets)?;
        let sk = derive_skeleton(&tets)?;
        let placeholder = (0..sk.num_cusps)
            .map(|_| CuspCurves { meridian: PeripheralCurve::zero(tets.len()), longitude: PeripheralCurve::zero(tets.len()) })
            .collect();
        let mut tri = Self::assemble(tets, placeholder, sk);
        tri.curves = peripheral::compute_framing(&tri);
        tri.check_curves()?;
        Ok(tri)
    }

    fn assemble(tets: Vec<Tetrahedron>, curves: Vec<CuspCurves>, sk: Skeleton) -> Self {
        IdealTriangulation {
            tets,
            curves,
            cusp_of: sk.cusp_of,
            num_cusps: sk.num_cusps,
            edge_of: sk.edge_of,
            edges: sk.edges,
            face_of: sk.face_of,
            faces: sk.faces,
        }
    }

    fn check_curves(&self) -> Result<(), ValidationError> {
        for (cusp, cc) in self.curves.iter().enumerate() {
            for (name, curve) in [("meridian", &cc.meridian), ("longitude", &cc.longitude)] {
                if curve.num_tets() != self.tets.len() {
                    return Err(ValidationError::BadCurve { cusp, curve: name, reason: "wrong number of tetrahedra".into() });
                }
                peripheral::check_curve(self, cusp, curve).map_err(|reason| ValidationError::BadCurve { cusp, curve: name, reason })?;
            }
            let value = intersection_number(self, &cc.meridian, &cc.longitude);
            if value.abs() != 1 {
                return Err(ValidationError::BadIntersection { cusp, value });
            }
        }
        Ok(())
    }

    pub fn num_tets(&self) -> usize {
        self.tets.len()
    }

    pub fn num_cusps(&self) -> usize {
        self.num_cusps
    }

    pub fn tets(&self) -> &[Tetrahedron] {
        &self.tets
    }

    pub fn tet(&self, t: usize) -> &Tetrahedron {
        &self.tets[t]
    }

    pub fn neighbor(&self, t: usize, f: usize) -> usize {
        self.tets[t].neighbor[f]
    }

    pub fn gluing(&self, t: usize, f: usize) -> Perm4 {
        self.tets[t].gluing[f]
    }

    pub fn cusp_of(&self, t: usize, v: usize) -> usize {
        self.cusp_of[t][v]
    }

    pub fn curves(&self) -> &[CuspCurves] {
        &self.curves
    }

    pub fn edges(&self) -> &[EdgeClass] {
        &self.edges
    }

    pub fn edge_of(&self, t: usize, e: usize) -> usize {
        self.edge_of[t][e]
    }

    pub fn faces(&self) -> &[Face] {
        &self.faces
    }

    pub fn face_of(&self, t: usize, f: usize) -> usize {
        self.face_of[t][f]
    }

    /// Horotriangles `(tet, vertex)` of a cusp in lexicographic order.
    pub fn cusp_triangles(&self, cusp: usize) -> Vec<(usize, usize)> {
        (0..self.tets.len()).flat_map(|t| (0..4).map(move |v| (t, v))).filter(|&(t, v)| self.cusp_of[t][v] == cusp).collect()
    }

    /// The horotriangle side glued to side `f` of horotriangle `(t, v)`.
    pub fn side_partner(&self, t: usize, v: usize, f: usize) -> (usize, usize, usize) {
        let sigma = self.tets[t].gluing[f];
        (self.tets[t].neighbor[f], sigma.apply(v), sigma.apply(f))
    }

    /// Valences of the edge classes, in class order.
    pub fn edge_valences(&self) -> Vec<usize> {
        self.edges.iter().map(EdgeClass::valence).collect()
    }

    /// Replace the peripheral curves (same validation as [`Self::new`]).
    pub fn with_curves(&self, curves: Vec<CuspCurves>) -> Result<Self, ValidationError> {
        Self::new(self.tets.clone(), curves)
    }

    /// Text in the native format.
    pub fn to_text(&self) -> String {
        io::serialize(self)
    }

    pub fn from_text(text: &str) -> Result<Self, ParseError> {
        io::parse(text)
    }

    /// Hex SHA-256 of the canonical serialization.
    pub fn content_hash(&self) -> String {
        use sha2::{Digest, Sha256};
        let digest = Sha256::digest(self.to_text().as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// Triangulations are equal when gluings and curves agree exactly.
impl PartialEq for IdealTriangulation {
    fn eq(&self, other: &Self) -> bool {
        self.tets == other.tets && self.curves == other.curves
    }
}

impl Eq for IdealTriangulation {}
