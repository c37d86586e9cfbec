//! First homology of cusped manifolds and their Dehn fillings.

use std::collections::VecDeque;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;
use serde::Serialize;
use thiserror::Error;

use super::presentation::{Presentation, Word};
use super::{smith_normal_form, AbelianGroup, IntegerMatrix};
use crate::triangulation::{CuspCurves, IdealTriangulation, PeripheralCurve};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("slope ({p}, {q}) is not primitive")]
pub struct InvalidSlope {
    pub p: i64,
    pub q: i64,
}

/// A primitive class `p·μ + q·λ` on a cusp torus.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Slope {
    p: i64,
    q: i64,
}

impl Slope {
    pub fn new(p: i64, q: i64) -> Result<Slope, InvalidSlope> {
        if p.gcd(&q) != 1 {
            return Err(InvalidSlope { p, q });
        }
        Ok(Slope { p, q })
    }

    pub fn p(&self) -> i64 {
        self.p
    }

    pub fn q(&self) -> i64 {
        self.q
    }

    pub const MERIDIAN: Slope = Slope { p: 1, q: 0 };
    pub const LONGITUDE: Slope = Slope { p: 0, q: 1 };
}

impl fmt::Display for Slope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.p, self.q)
    }
}

/// A presentation of `H₁` of a cusped manifold together with the classes of
/// each cusp's meridian and longitude.
#[derive(Clone, Debug)]
pub struct HomologyModel {
    num_gens: usize,
    relations: Vec<Vec<BigInt>>,
    peripheral: Vec<(Vec<BigInt>, Vec<BigInt>)>,
}

fn to_big(v: &[i64]) -> Vec<BigInt> {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

impl HomologyModel {
    /// Build directly from relations and peripheral classes.
    pub fn new(num_gens: usize, relations: Vec<Vec<i64>>, peripheral: Vec<(Vec<i64>, Vec<i64>)>) -> Self {
        assert!(relations.iter().all(|r| r.len() == num_gens));
        assert!(peripheral.iter().all(|(m, l)| m.len() == num_gens && l.len() == num_gens));
        HomologyModel {
            num_gens,
            relations: relations.iter().map(|r| to_big(r)).collect(),
            peripheral: peripheral.iter().map(|(m, l)| (to_big(m), to_big(l))).collect(),
        }
    }

    pub fn from_triangulation(tri: &IdealTriangulation) -> Self {
        Self::from_triangulation_curves(tri, tri.curves())
    }

    /// Cellular model on the dual 2-complex: one generator per face, one
    /// relation per edge, and the faces of a spanning tree of the dual graph
    /// set to zero. A dual edge is oriented from the lower side of its face.
    pub fn from_triangulation_curves(tri: &IdealTriangulation, curves: &[CuspCurves]) -> Self {
        let nf = tri.faces().len();
        let sign = |t: usize, f: usize| -> i64 {
            let face = &tri.faces()[tri.face_of(t, f)];
            if (face.tet, face.face) == (t, f) {
                1
            } else {
                -1
            }
        };
        let mut relations = Vec::new();
        for class in tri.edges() {
            let mut row = vec![0i64; nf];
            for m in &class.members {
                row[tri.face_of(m.tet, m.c)] += sign(m.tet, m.c);
            }
            relations.push(row);
        }
        let mut seen = vec![false; tri.num_tets()];
        seen[0] = true;
        let mut queue = VecDeque::from([0]);
        while let Some(t) = queue.pop_front() {
            for f in 0..4 {
                let nb = tri.neighbor(t, f);
                if !seen[nb] {
                    seen[nb] = true;
                    let mut row = vec![0i64; nf];
                    row[tri.face_of(t, f)] = 1;
                    relations.push(row);
                    queue.push_back(nb);
                }
            }
        }
        let class_of = |curve: &PeripheralCurve| -> Vec<i64> {
            let mut v = vec![0i64; nf];
            for (t, _, f, w) in curve.entries() {
                // Entering tet t through face f runs against the dual edge when
                // (t, f) is its lower side.
                v[tri.face_of(t, f)] -= w * sign(t, f);
            }
            // Each crossing is recorded on both sides of its face.
            v.iter().map(|x| x / 2).collect()
        };
        let peripheral = curves.iter().map(|cc| (class_of(&cc.meridian), class_of(&cc.longitude))).collect();
        Self::new(nf, relations, peripheral)
    }

    /// Abelianised presentation; `peripheral[k]` are the words of cusp `k`'s
    /// meridian and longitude.
    pub fn from_presentation(pres: &Presentation, peripheral: &[(Word, Word)]) -> Self {
        let n = pres.num_generators();
        let relations = pres.relators().iter().map(|r| r.exponent_sums(n)).collect();
        let peripheral = peripheral.iter().map(|(m, l)| (m.exponent_sums(n), l.exponent_sums(n))).collect();
        Self::new(n, relations, peripheral)
    }

    /// Exterior of a link in S³ with the given symmetric linking matrix
    /// (diagonal ignored): `H₁` is free on the meridians and each longitude
    /// is the linking-weighted sum of the other meridians.
    pub fn from_linking_matrix(linking: &[Vec<i64>]) -> Self {
        let n = linking.len();
        let peripheral = (0..n)
            .map(|i| {
                let mut mu = vec![0; n];
                mu[i] = 1;
                let lambda = (0..n).map(|j| if j == i { 0 } else { linking[i][j] }).collect();
                (mu, lambda)
            })
            .collect();
        Self::new(n, vec![], peripheral)
    }

    pub fn num_generators(&self) -> usize {
        self.num_gens
    }

    pub fn num_cusps(&self) -> usize {
        self.peripheral.len()
    }

    /// The class of `p·μ + q·λ` on cusp `cusp`.
    pub fn filling_class(&self, cusp: usize, slope: Slope) -> Vec<BigInt> {
        let (m, l) = &self.peripheral[cusp];
        m.iter().zip(l).map(|(a, b)| a * slope.p + b * slope.q).collect()
    }

    fn matrix(&self, extra: Vec<Vec<BigInt>>) -> IntegerMatrix {
        let mut rows: Vec<Vec<BigInt>> = self.relations.iter().cloned().chain(extra).collect();
        if rows.is_empty() {
            rows.push(vec![BigInt::zero(); self.num_gens]);
        }
        IntegerMatrix::from_rows(&rows)
    }

    /// `H₁` of the unfilled manifold.
    pub fn group(&self) -> AbelianGroup {
        AbelianGroup::from_relations(&self.matrix(vec![]))
    }

    /// `H₁` after filling each cusp with `Some` slope.
    pub fn fill(&self, slopes: &[Option<Slope>]) -> AbelianGroup {
        assert_eq!(slopes.len(), self.num_cusps(), "one slope entry per cusp");
        let extra = slopes.iter().enumerate().filter_map(|(k, s)| s.map(|s| self.filling_class(k, s))).collect();
        AbelianGroup::from_relations(&self.matrix(extra))
    }

    /// Images of the meridian and longitude of `cusp` in `H₁ / torsion`,
    /// in coordinates of some basis of the free part.
    pub fn free_images(&self, cusp: usize) -> (Vec<BigInt>, Vec<BigInt>) {
        let m = self.matrix(vec![]);
        let snf = smith_normal_form(&m);
        let r = snf.rank();
        let project = |x: &[BigInt]| -> Vec<BigInt> {
            // Row vector x in the new basis: x · V.
            (r..self.num_gens).map(|j| x.iter().enumerate().map(|(i, xi)| xi * &snf.v[(i, j)]).sum()).collect()
        };
        let (mu, lambda) = &self.peripheral[cusp];
        (project(mu), project(lambda))
    }
}

/// `H₁` of the filling of `tri` along the given slopes (`None` leaves a cusp
/// open).
pub fn filled_homology(tri: &IdealTriangulation, slopes: &[Option<Slope>]) -> AbelianGroup {
    HomologyModel::from_triangulation(tri).fill(slopes)
}
