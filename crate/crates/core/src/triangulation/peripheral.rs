//! Peripheral curves as signed side-crossing weights on cusp triangulations.
//!
//! `weight(t, v, f)` counts the strands of the curve crossing the side of the
//! horotriangle at vertex `v` of tetrahedron `t` that lies in face `f`;
//! positive weights enter the horotriangle. A curve is closed when every
//! horotriangle has zero net inflow and glued sides carry opposite weights.

use std::collections::VecDeque;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};

use super::{ccw_corners, other_two, CuspCurves, IdealTriangulation};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PeripheralCurve {
    weights: Vec<[[i64; 4]; 4]>,
}

impl PeripheralCurve {
    pub fn zero(num_tets: usize) -> Self {
        PeripheralCurve { weights: vec![[[0; 4]; 4]; num_tets] }
    }

    pub fn num_tets(&self) -> usize {
        self.weights.len()
    }

    pub fn get(&self, t: usize, v: usize, f: usize) -> i64 {
        self.weights[t][v][f]
    }

    pub fn set(&mut self, t: usize, v: usize, f: usize, w: i64) {
        self.weights[t][v][f] = w;
    }

    /// Nonzero entries `(t, v, f, w)` in lexicographic order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, usize, i64)> + '_ {
        self.weights.iter().enumerate().flat_map(|(t, per_v)| {
            per_v.iter().enumerate().flat_map(move |(v, per_f)| {
                per_f.iter().enumerate().filter(|(_, &w)| w != 0).map(move |(f, &w)| (t, v, f, w))
            })
        })
    }

    pub fn is_zero(&self) -> bool {
        self.entries().next().is_none()
    }

    /// `a * self + b * other`.
    pub fn combine(&self, a: i64, other: &PeripheralCurve, b: i64) -> PeripheralCurve {
        let mut out = self.clone();
        for (t, per_v) in out.weights.iter_mut().enumerate() {
            for v in 0..4 {
                for f in 0..4 {
                    per_v[v][f] = a * self.weights[t][v][f] + b * other.weights[t][v][f];
                }
            }
        }
        out
    }

    pub fn negated(&self) -> PeripheralCurve {
        self.combine(-1, self, 0)
    }
}

/// Returns a reason string on failure.
pub(super) fn check_curve(tri: &IdealTriangulation, cusp: usize, curve: &PeripheralCurve) -> Result<(), String> {
    for t in 0..tri.num_tets() {
        for v in 0..4 {
            let mut net = 0;
            for f in 0..4 {
                let w = curve.get(t, v, f);
                if w == 0 {
                    continue;
                }
                if f == v {
                    return Err(format!("weight on nonexistent side {t}:{v}:{f}"));
                }
                if tri.cusp_of(t, v) != cusp {
                    return Err(format!("weight at {t}:{v}:{f} lies on cusp {}", tri.cusp_of(t, v)));
                }
                let (pt, pv, pf) = tri.side_partner(t, v, f);
                if curve.get(pt, pv, pf) != -w {
                    return Err(format!("weights at {t}:{v}:{f} and {pt}:{pv}:{pf} do not cancel"));
                }
                net += w;
            }
            if net != 0 {
                return Err(format!("horotriangle {t}:{v} has net inflow {net}"));
            }
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Algebraic intersection numbers.
//
// Each curve is realised inside every horotriangle as a star: one hub point
// joined to one crossing point per side, each spoke carrying the side weight.
// The two curves use different hubs and different crossing points (at 1/3 and
// 2/3 along each side, measured from a side orientation both horotriangles
// agree on), so the realisations are transverse and the signed count of spoke
// crossings is the homological intersection number.

const CORNER_POS: [(f64, f64); 3] = [(0.0, 0.0), (1.0, 0.0), (0.5, 0.866_025_403_784_438_6)];
const HUB_A: (f64, f64) = (0.5 + 0.071, 0.288_675_134_594_812_9 + 0.023);
const HUB_B: (f64, f64) = (0.5 - 0.047, 0.288_675_134_594_812_9 - 0.061);

fn corner_position(v: usize, corner: usize) -> (f64, f64) {
    let k = ccw_corners(v).iter().position(|&c| c == corner).expect("corner differs from v");
    CORNER_POS[k]
}

/// Start and end corner of side `f` of horotriangle `(t, v)`, oriented
/// consistently with the glued side.
fn side_orientation(tri: &IdealTriangulation, t: usize, v: usize, f: usize) -> (usize, usize) {
    let partner = tri.side_partner(t, v, f);
    if (t, v, f) <= partner {
        other_two(v, f)
    } else {
        let (pt, pv, pf) = partner;
        let (x, y) = other_two(pv, pf);
        let back = tri.gluing(pt, pf);
        (back.apply(x), back.apply(y))
    }
}

fn lerp(p: (f64, f64), q: (f64, f64), s: f64) -> (f64, f64) {
    (p.0 + (q.0 - p.0) * s, p.1 + (q.1 - p.1) * s)
}

fn orient(p: (f64, f64), q: (f64, f64), r: (f64, f64)) -> f64 {
    (q.0 - p.0) * (r.1 - p.1) - (q.1 - p.1) * (r.0 - p.0)
}

/// Sign of the crossing of oriented segments `p1→p2` and `p3→p4`, or 0.
pub(super) fn crossing_sign(p1: (f64, f64), p2: (f64, f64), p3: (f64, f64), p4: (f64, f64)) -> i64 {
    let d1 = orient(p1, p2, p3);
    let d2 = orient(p1, p2, p4);
    let d3 = orient(p3, p4, p1);
    let d4 = orient(p3, p4, p2);
    if d1 * d2 < 0.0 && d3 * d4 < 0.0 {
        let cross = (p2.0 - p1.0) * (p4.1 - p3.1) - (p2.1 - p1.1) * (p4.0 - p3.0);
        if cross > 0.0 {
            1
        } else {
            -1
        }
    } else {
        0
    }
}

/// Algebraic intersection number of two closed peripheral curves.
pub fn intersection_number(tri: &IdealTriangulation, a: &PeripheralCurve, b: &PeripheralCurve) -> i64 {
    let mut total = 0;
    for t in 0..tri.num_tets() {
        for v in 0..4 {
            let sides: Vec<usize> = (0..4).filter(|&f| f != v).collect();
            if sides.iter().all(|&f| a.get(t, v, f) == 0) || sides.iter().all(|&f| b.get(t, v, f) == 0) {
                continue;
            }
            let point = |f: usize, s: f64| {
                let (x, y) = side_orientation(tri, t, v, f);
                lerp(corner_position(v, x), corner_position(v, y), s)
            };
            for &f in &sides {
                let wa = a.get(t, v, f);
                if wa == 0 {
                    continue;
                }
                for &g in &sides {
                    let wb = b.get(t, v, g);
                    if wb == 0 {
                        continue;
                    }
                    total += wa * wb * crossing_sign(point(f, 1.0 / 3.0), HUB_A, point(g, 2.0 / 3.0), HUB_B);
                }
            }
        }
    }
    total
}

// ---------------------------------------------------------------------------
// Computing a peripheral basis.

/// Fundamental cycles of the dual graph of one cusp triangulation.
fn fundamental_cycles(tri: &IdealTriangulation, cusp: usize) -> Vec<PeripheralCurve> {
    let triangles = tri.cusp_triangles(cusp);
    let n = tri.num_tets();
    let mut index = vec![[usize::MAX; 4]; n];
    for (i, &(t, v)) in triangles.iter().enumerate() {
        index[t][v] = i;
    }
    // BFS tree: parent side through which each triangle was reached.
    let mut parent: Vec<Option<(usize, usize, usize)>> = vec![None; triangles.len()];
    let mut depth = vec![usize::MAX; triangles.len()];
    let mut tree_side = vec![[false; 4]; n * 4];
    depth[0] = 0;
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        let (t, v) = triangles[i];
        for f in (0..4).filter(|&f| f != v) {
            let (pt, pv, pf) = tri.side_partner(t, v, f);
            let j = index[pt][pv];
            if depth[j] == usize::MAX {
                depth[j] = depth[i] + 1;
                parent[j] = Some((pt, pv, pf));
                tree_side[t * 4 + v][f] = true;
                tree_side[pt * 4 + pv][pf] = true;
                queue.push_back(j);
            }
        }
    }

    // Walk from triangle j up to the root, crossing tree sides.
    let path_to_root = |curve: &mut PeripheralCurve, mut j: usize, sign: i64| {
        while let Some((t, v, f)) = parent[j] {
            // Leave (t, v) through side f into its parent.
            let (pt, pv, pf) = tri.side_partner(t, v, f);
            curve.weights[t][v][f] -= sign;
            curve.weights[pt][pv][pf] += sign;
            j = index[pt][pv];
        }
    };

    let mut cycles = Vec::new();
    for &(t, v) in &triangles {
        for f in (0..4).filter(|&f| f != v) {
            let partner = tri.side_partner(t, v, f);
            if tree_side[t * 4 + v][f] || (t, v, f) > partner {
                continue;
            }
            let (pt, pv, pf) = partner;
            let mut c = PeripheralCurve::zero(n);
            // root → (t,v) [reverse of path up], cross into partner, partner → root.
            path_to_root(&mut c, index[t][v], -1);
            c.weights[t][v][f] -= 1;
            c.weights[pt][pv][pf] += 1;
            path_to_root(&mut c, index[pt][pv], 1);
            cycles.push(c);
        }
    }
    cycles
}

/// A pair of closed curves on the cusp with intersection number `+1`.
pub(super) fn cusp_basis(tri: &IdealTriangulation, cusp: usize) -> (PeripheralCurve, PeripheralCurve) {
    let cycles = fundamental_cycles(tri, cusp);
    let k = cycles.len();
    let mut pairing = vec![vec![0i64; k]; k];
    for i in 0..k {
        for j in i + 1..k {
            let x = intersection_number(tri, &cycles[i], &cycles[j]);
            pairing[i][j] = x;
            pairing[j][i] = -x;
        }
    }
    let (a, b) = (0..k)
        .flat_map(|i| (0..k).map(move |j| (i, j)))
        .find(|&(i, j)| pairing[i][j] != 0)
        .expect("cusp torus has a nondegenerate intersection form");

    // Scaled coordinates of every cycle in the (h_a, h_b) frame.
    let mut rows: Vec<([i64; 2], Vec<i64>)> = (0..k)
        .map(|i| {
            let mut combo = vec![0; k];
            combo[i] = 1;
            ([pairing[i][b], pairing[a][i]], combo)
        })
        .collect();

    // Row-reduce to an echelon basis of the lattice, tracking combinations.
    let reduce_column = |rows: &mut Vec<([i64; 2], Vec<i64>)>, col: usize| -> Option<([i64; 2], Vec<i64>)> {
        loop {
            rows.retain(|r| r.0 != [0, 0] || col == 0);
            let mut nonzero: Vec<usize> = (0..rows.len()).filter(|&i| rows[i].0[col] != 0).collect();
            if nonzero.is_empty() {
                return None;
            }
            nonzero.sort_by_key(|&i| rows[i].0[col].abs());
            let p = nonzero[0];
            if nonzero.len() == 1 {
                return Some(rows.remove(p));
            }
            let pivot = rows[p].clone();
            for &i in &nonzero[1..] {
                let q = rows[i].0[col].div_euclid(pivot.0[col]);
                let row = &mut rows[i];
                row.0[0] -= q * pivot.0[0];
                row.0[1] -= q * pivot.0[1];
                for (x, y) in row.1.iter_mut().zip(&pivot.1) {
                    *x -= q * y;
                }
            }
        }
    };
    let first = reduce_column(&mut rows, 0).expect("h_a has nonzero first coordinate");
    let second = reduce_column(&mut rows, 1).expect("h_b has nonzero second coordinate");

    let build = |combo: &[i64]| {
        let mut c = PeripheralCurve::zero(tri.num_tets());
        for (coef, cyc) in combo.iter().zip(&cycles) {
            if *coef != 0 {
                c = c.combine(1, cyc, *coef);
            }
        }
        c
    };
    let mu = build(&first.1);
    let mut lambda = build(&second.1);
    let x = intersection_number(tri, &mu, &lambda);
    assert!(x.abs() == 1, "reduced cusp basis has intersection {x}");
    if x < 0 {
        lambda = lambda.negated();
    }
    (mu, lambda)
}

/// Peripheral curves for every cusp, with homological framing when there is a
/// single cusp of rational rank one.
pub(super) fn compute_framing(tri: &IdealTriangulation) -> Vec<CuspCurves> {
    let mut out: Vec<CuspCurves> = (0..tri.num_cusps())
        .map(|k| {
            let (meridian, longitude) = cusp_basis(tri, k);
            CuspCurves { meridian, longitude }
        })
        .collect();
    if tri.num_cusps() == 1 {
        let model = crate::algebra::HomologyModel::from_triangulation_curves(tri, &out);
        let (m1, m2) = model.free_images(0);
        if m1.len() == 1 {
            let (m1, m2) = (m1[0].clone(), m2[0].clone());
            let g = m1.gcd(&m2);
            if !g.is_zero() {
                let egcd = m1.extended_gcd(&m2);
                // x*m1 + y*m2 = g
                let (x, y) = (egcd.x, egcd.y);
                let l1 = (&m2 / &g).to_i64().expect("small");
                let l2 = (-(&m1 / &g)).to_i64().expect("small");
                let (x, y) = (x.to_i64().expect("small"), y.to_i64().expect("small"));
                let (b1, b2) = (&out[0].meridian, &out[0].longitude);
                let mu = b1.combine(x, b2, y);
                let mut lambda = b1.combine(l1, b2, l2);
                if intersection_number(tri, &mu, &lambda) < 0 {
                    lambda = lambda.negated();
                }
                out[0] = CuspCurves { meridian: mu, longitude: lambda };
            }
        }
    }
    let _ = BigInt::zero().is_positive();
    out
}
