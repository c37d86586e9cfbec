//! 2-3 and 3-2 Pachner moves.
//!
//! Both moves replace a small ball of tetrahedra. The ball's ideal vertices
//! get abstract ids; every old and new tetrahedron is a list of ids, and
//! boundary faces are matched by their id triangles. Surviving tetrahedra
//! keep their relative order and the new ones are appended.

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use super::{other_two, CuspCurves, IdealTriangulation, Perm4, PeripheralCurve, Tetrahedron, ValidationError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MoveError {
    #[error("index {0} out of range")]
    OutOfRange(usize),
    #[error("move inadmissible: {0}")]
    Inadmissible(String),
    #[error("move produced an invalid triangulation: {0}")]
    Invalid(#[from] ValidationError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MoveKind {
    /// Face index in the input triangulation.
    TwoThree { face: usize },
    /// Edge-class index in the input triangulation.
    ThreeTwo { edge: usize },
}

/// What a move did, enough to transport shapes across it.
#[derive(Clone, Debug)]
pub struct MoveRecord {
    pub kind: MoveKind,
    /// Input tetrahedra that were removed, in ball order.
    pub removed: Vec<usize>,
    /// Number of surviving tetrahedra; new ones start at this index.
    pub first_new: usize,
    old_ids: Vec<[usize; 4]>,
    new_ids: Vec<[usize; 4]>,
}

struct Ball {
    old: Vec<usize>,
    old_ids: Vec<[usize; 4]>,
    internal: Vec<(usize, usize)>,
    new: Vec<[usize; 4]>,
}

fn triangle(ids: &[usize; 4], f: usize) -> [usize; 3] {
    let mut t = [0; 3];
    let mut k = 0;
    for (v, &id) in ids.iter().enumerate() {
        if v != f {
            t[k] = id;
            k += 1;
        }
    }
    t.sort_unstable();
    t
}

/// Relabelling from one id list to another across a shared face: vertices
/// with equal ids correspond and `from_face` goes to `to_face`.
fn face_map(from: &[usize; 4], from_face: usize, to: &[usize; 4], to_face: usize) -> Perm4 {
    let mut img = [0u8; 4];
    for v in 0..4 {
        img[v] = if v == from_face { to_face as u8 } else { to.iter().position(|&x| x == from[v]).expect("shared vertex") as u8 };
    }
    Perm4::new(img).expect("face map is a bijection")
}

/// Signed flows on the internal sides of a disk of horotriangles. `edges[e]
/// = (i, j)`: the value is the inflow on `i`'s side and minus it on `j`'s.
/// At most one independent cycle is expected; its circulation is chosen to
/// minimise total weight.
fn solve_disk_flow(supply: &[i64], edges: &[(usize, usize)]) -> Vec<i64> {
    let n = supply.len();
    let mut adj = vec![Vec::new(); n];
    for (e, &(i, j)) in edges.iter().enumerate() {
        adj[i].push(e);
        adj[j].push(e);
    }
    let mut parent_edge = vec![usize::MAX; n];
    let mut seen = vec![false; n];
    let mut order = vec![0];
    seen[0] = true;
    let mut head = 0;
    while head < order.len() {
        let i = order[head];
        head += 1;
        for &e in &adj[i] {
            let (a, b) = edges[e];
            let j = if a == i { b } else { a };
            if !seen[j] {
                seen[j] = true;
                parent_edge[j] = e;
                order.push(j);
            }
        }
    }
    assert_eq!(order.len(), n, "disk of horotriangles is connected");
    let is_tree: Vec<bool> = (0..edges.len()).map(|e| parent_edge.contains(&e)).collect();

    // Values are affine in one circulation variable: (constant, coefficient).
    let mut value = vec![(0i64, 0i64); edges.len()];
    let mut balance: Vec<(i64, i64)> = supply.iter().map(|&s| (s, 0)).collect();
    let mut free_used = false;
    for (e, &(i, j)) in edges.iter().enumerate() {
        if !is_tree[e] {
            value[e] = if free_used { (0, 0) } else { (0, 1) };
            free_used = true;
            balance[i].0 += value[e].0;
            balance[i].1 += value[e].1;
            balance[j].0 -= value[e].0;
            balance[j].1 -= value[e].1;
        }
    }
    for &i in order.iter().skip(1).rev() {
        let e = parent_edge[i];
        let (a, b) = edges[e];
        let (p, w) = if a == i { (b, (-balance[i].0, -balance[i].1)) } else { (a, balance[i]) };
        value[e] = w;
        // Parent's side of the edge carries the opposite sign of i's side.
        let at_parent = if a == i { (-w.0, -w.1) } else { w };
        balance[p].0 += at_parent.0;
        balance[p].1 += at_parent.1;
        balance[i] = (0, 0);
    }
    debug_assert_eq!(balance[0], (0, 0));

    let mut points: Vec<i64> = value.iter().filter(|v| v.1 != 0).map(|&(a, b)| -a / b).collect();
    points.sort_unstable();
    let c = points.get(points.len().saturating_sub(1) / 2).copied().unwrap_or(0);
    value.iter().map(|&(a, b)| a + b * c).collect()
}

fn replace_ball(tri: &IdealTriangulation, mut ball: Ball) -> Result<(IdealTriangulation, Vec<[usize; 4]>), MoveError> {
    let n_old = tri.num_tets();
    let mut in_ball = vec![usize::MAX; n_old];
    for (i, &t) in ball.old.iter().enumerate() {
        in_ball[t] = i;
    }
    let kept: Vec<usize> = (0..n_old).filter(|&t| in_ball[t] == usize::MAX).collect();
    let mut new_index = vec![usize::MAX; n_old];
    for (i, &t) in kept.iter().enumerate() {
        new_index[t] = i;
    }
    let first_new = kept.len();
    let n_new = first_new + ball.new.len();

    let is_internal = |t: usize, f: usize| ball.internal.contains(&(t, f));
    let find_new_face = |new: &[[usize; 4]], tri_ids: [usize; 3]| -> (usize, usize) {
        let hits: Vec<(usize, usize)> =
            (0..new.len()).flat_map(|k| (0..4).map(move |f| (k, f))).filter(|&(k, f)| triangle(&new[k], f) == tri_ids).collect();
        assert_eq!(hits.len(), 1, "boundary triangle {tri_ids:?} must lie on exactly one new face");
        hits[0]
    };

    // Orient each new tetrahedron compatibly with the old ones.
    for k in 0..ball.new.len() {
        let slot = ball.old.iter().enumerate().find_map(|(i, &t)| {
            (0..4).find_map(|f| {
                if is_internal(t, f) {
                    return None;
                }
                let (kk, ff) = find_new_face(&ball.new, triangle(&ball.old_ids[i], f));
                (kk == k).then_some((i, f, ff))
            })
        });
        let (i, f, ff) = slot.ok_or_else(|| MoveError::Inadmissible("new tetrahedron has no boundary face".into()))?;
        if !face_map(&ball.old_ids[i], f, &ball.new[k], ff).is_even() {
            ball.new[k].swap(2, 3);
        }
    }

    // Boundary slot (ball index, face) -> (new tet k, face, relabelling).
    let boundary = |i: usize, f: usize| -> (usize, usize, Perm4) {
        let (k, ff) = find_new_face(&ball.new, triangle(&ball.old_ids[i], f));
        (k, ff, face_map(&ball.old_ids[i], f, &ball.new[k], ff))
    };

    let placeholder = Tetrahedron { neighbor: [usize::MAX; 4], gluing: [Perm4::IDENTITY; 4] };
    let mut tets = vec![placeholder; n_new];
    for (i, &t) in kept.iter().enumerate() {
        let old = tri.tet(t);
        for f in 0..4 {
            if in_ball[old.neighbor[f]] == usize::MAX {
                tets[i].neighbor[f] = new_index[old.neighbor[f]];
                tets[i].gluing[f] = old.gluing[f];
            }
        }
    }
    // Internal faces among new tetrahedra.
    for k in 0..ball.new.len() {
        for f in 0..4 {
            let tri_ids = triangle(&ball.new[k], f);
            let other = (0..ball.new.len())
                .flat_map(|k2| (0..4).map(move |f2| (k2, f2)))
                .find(|&(k2, f2)| (k2, f2) != (k, f) && triangle(&ball.new[k2], f2) == tri_ids);
            if let Some((k2, f2)) = other {
                tets[first_new + k].neighbor[f] = first_new + k2;
                tets[first_new + k].gluing[f] = face_map(&ball.new[k], f, &ball.new[k2], f2);
            }
        }
    }
    // Boundary faces.
    for (i, &t) in ball.old.iter().enumerate() {
        for f in 0..4 {
            if is_internal(t, f) {
                continue;
            }
            let (k, ff, psi) = boundary(i, f);
            let sigma = tri.gluing(t, f);
            let nb = tri.neighbor(t, f);
            let g = sigma.apply(f);
            if in_ball[nb] != usize::MAX {
                let (k2, _, psi2) = boundary(in_ball[nb], g);
                tets[first_new + k].neighbor[ff] = first_new + k2;
                tets[first_new + k].gluing[ff] = psi2.compose(sigma).compose(psi.inverse());
            } else {
                tets[first_new + k].neighbor[ff] = new_index[nb];
                tets[first_new + k].gluing[ff] = sigma.compose(psi.inverse());
                tets[new_index[nb]].neighbor[g] = first_new + k;
                tets[new_index[nb]].gluing[g] = psi.compose(sigma.inverse());
            }
        }
    }
    if tets.iter().any(|t| t.neighbor.contains(&usize::MAX)) {
        return Err(MoveError::Inadmissible("ball boundary did not close up".into()));
    }

    // Peripheral curves: copy outside the ball, re-solve inside.
    let transport = |curve: &PeripheralCurve| -> PeripheralCurve {
        let mut out = PeripheralCurve::zero(n_new);
        for (t, v, f, w) in curve.entries() {
            if in_ball[t] == usize::MAX {
                out.set(new_index[t], v, f, w);
            }
        }
        let mut supply_side = vec![[[0i64; 4]; 4]; ball.new.len()];
        for (i, &t) in ball.old.iter().enumerate() {
            for f in 0..4 {
                if is_internal(t, f) {
                    continue;
                }
                let (k, ff, psi) = boundary(i, f);
                for v in (0..4).filter(|&v| v != f) {
                    let w = curve.get(t, v, f);
                    supply_side[k][psi.apply(v)][ff] = w;
                    out.set(first_new + k, psi.apply(v), ff, w);
                }
            }
        }
        let ids: Vec<usize> = {
            let mut all: Vec<usize> = ball.new.iter().flatten().copied().collect();
            all.sort_unstable();
            all.dedup();
            all
        };
        for x in ids {
            let nodes: Vec<(usize, usize)> =
                (0..ball.new.len()).flat_map(|k| (0..4).map(move |u| (k, u))).filter(|&(k, u)| ball.new[k][u] == x).collect();
            let node_of = |k: usize, u: usize| nodes.iter().position(|&nd| nd == (k, u)).expect("node");
            let supply: Vec<i64> = nodes.iter().map(|&(k, u)| supply_side[k][u].iter().sum()).collect();
            let mut edges = Vec::new();
            let mut sides = Vec::new();
            for &(k, u) in &nodes {
                for f in (0..4).filter(|&f| f != u) {
                    let t = &tets[first_new + k];
                    let internal = (0..ball.new.len()).any(|k2| {
                        (0..4).any(|f2| (k2, f2) != (k, f) && triangle(&ball.new[k2], f2) == triangle(&ball.new[k], f))
                    });
                    if !internal {
                        continue;
                    }
                    let k2 = t.neighbor[f] - first_new;
                    let u2 = t.gluing[f].apply(u);
                    let f2 = t.gluing[f].apply(f);
                    if (k, u, f) < (k2, u2, f2) {
                        edges.push((node_of(k, u), node_of(k2, u2)));
                        sides.push(((k, u, f), (k2, u2, f2)));
                    }
                }
            }
            let flow = solve_disk_flow(&supply, &edges);
            for (w, ((k, u, f), (k2, u2, f2))) in flow.into_iter().zip(sides) {
                out.set(first_new + k, u, f, w);
                out.set(first_new + k2, u2, f2, -w);
            }
        }
        out
    };
    let curves: Vec<CuspCurves> =
        tri.curves().iter().map(|cc| CuspCurves { meridian: transport(&cc.meridian), longitude: transport(&cc.longitude) }).collect();

    let out = IdealTriangulation::new(tets, curves)?;
    Ok((out, ball.new))
}

fn record(kind: MoveKind, tri: &IdealTriangulation, ball_old: Vec<usize>, old_ids: Vec<[usize; 4]>, new_ids: Vec<[usize; 4]>) -> MoveRecord {
    MoveRecord { kind, first_new: tri.num_tets() - ball_old.len(), removed: ball_old, old_ids, new_ids }
}

/// 2-3 move across face `face` (an index into [`IdealTriangulation::faces`]).
pub fn pachner_2_3(tri: &IdealTriangulation, face: usize) -> Result<(IdealTriangulation, MoveRecord), MoveError> {
    let fc = *tri.faces().get(face).ok_or(MoveError::OutOfRange(face))?;
    let (t0, f0, t1, f1) = (fc.tet, fc.face, fc.other_tet, fc.other_face);
    if t0 == t1 {
        return Err(MoveError::Inadmissible(format!("face {face} joins tetrahedron {t0} to itself")));
    }
    let sigma = fc.gluing;
    const SOUTH: usize = 4;
    let ids0 = [0, 1, 2, 3];
    let mut ids1 = [0; 4];
    for w in 0..4 {
        ids1[w] = if w == f1 { SOUTH } else { sigma.inverse().apply(w) };
    }
    let new: Vec<[usize; 4]> = (0..4)
        .filter(|&x| x != f0)
        .map(|x| {
            let (y, z) = other_two(x, f0);
            [f0, SOUTH, y, z]
        })
        .collect();
    let ball = Ball { old: vec![t0, t1], old_ids: vec![ids0, ids1], internal: vec![(t0, f0), (t1, f1)], new };
    let (out, new_ids) = replace_ball(tri, ball)?;
    Ok((out, record(MoveKind::TwoThree { face }, tri, vec![t0, t1], vec![ids0, ids1], new_ids)))
}

/// 3-2 move removing edge class `edge`, which must have valence three with
/// three distinct tetrahedra.
pub fn pachner_3_2(tri: &IdealTriangulation, edge: usize) -> Result<(IdealTriangulation, MoveRecord), MoveError> {
    let class = tri.edges().get(edge).ok_or(MoveError::OutOfRange(edge))?;
    if class.valence() != 3 {
        return Err(MoveError::Inadmissible(format!("edge {edge} has valence {}", class.valence())));
    }
    let m = &class.members;
    if m[0].tet == m[1].tet || m[1].tet == m[2].tet || m[0].tet == m[2].tet {
        return Err(MoveError::Inadmissible(format!("edge {edge} does not meet three distinct tetrahedra")));
    }
    let mut old_ids = Vec::new();
    let mut internal = Vec::new();
    for (i, e) in m.iter().enumerate() {
        let mut ids = [0; 4];
        ids[e.a] = 0;
        ids[e.b] = 1;
        ids[e.c] = 2 + i;
        ids[e.d] = 2 + (i + 1) % 3;
        old_ids.push(ids);
        internal.push((e.tet, e.c));
        internal.push((e.tet, e.d));
    }
    let old: Vec<usize> = m.iter().map(|e| e.tet).collect();
    let ball = Ball { old: old.clone(), old_ids: old_ids.clone(), internal, new: vec![[2, 3, 4, 0], [2, 3, 4, 1]] };
    let (out, new_ids) = replace_ball(tri, ball)?;
    Ok((out, record(MoveKind::ThreeTwo { edge }, tri, old, old_ids, new_ids)))
}

type Point = (Complex64, Complex64);

fn bracket(p: Point, q: Point) -> Complex64 {
    p.0 * q.1 - p.1 * q.0
}

/// Shape of the tetrahedron with ideal vertices `p[0..4]` (parameter on edge 01).
fn cross_ratio(p: [Point; 4]) -> Complex64 {
    bracket(p[3], p[1]) * bracket(p[2], p[0]) / (bracket(p[2], p[1]) * bracket(p[3], p[0]))
}

/// Fourth vertex `q[3]` of a tetrahedron with shape `z` on edge 01.
fn solve_fourth(q: [Point; 3], z: Complex64) -> Point {
    let k = bracket(q[2], q[1]);
    let m = bracket(q[2], q[0]);
    (z * k * q[0].0 - m * q[1].0, z * k * q[0].1 - m * q[1].1)
}

/// The three edge parameters from `z`.
pub(crate) fn edge_parameters(z: Complex64) -> [Complex64; 3] {
    let one = Complex64::new(1.0, 0.0);
    [z, one / (one - z), (z - one) / z]
}

impl MoveRecord {
    /// The new edge class created by a 2-3 move, as `(tet, a, b)` in the
    /// output triangulation.
    pub fn new_edge(&self) -> Option<(usize, usize, usize)> {
        match self.kind {
            MoveKind::TwoThree { .. } => {
                let ids = self.new_ids[0];
                let a = ids.iter().position(|&x| x == self.old_ids[0][self.face_of_two_three()]).expect("north");
                let b = ids.iter().position(|&x| x == 4).expect("south");
                Some((self.first_new, a, b))
            }
            MoveKind::ThreeTwo { .. } => None,
        }
    }

    fn face_of_two_three(&self) -> usize {
        // The north pole of tet 0 is the vertex every new tet contains
        // besides the south pole.
        (0..4).find(|&v| self.new_ids.iter().all(|ids| ids.contains(&self.old_ids[0][v]))).expect("north pole")
    }

    /// Shapes of the output tetrahedra from shapes (edge-01 parameters) of the
    /// input. `None` when the ball is degenerate.
    pub fn transport_shapes(&self, shapes: &[Complex64]) -> Option<Vec<Complex64>> {
        let num_ids = 5;
        let mut pos: Vec<Option<Point>> = vec![None; num_ids];
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        let ids0 = self.old_ids[0];
        let z0 = shapes[self.removed[0]];
        pos[ids0[0]] = Some((one, zero));
        pos[ids0[1]] = Some((zero, one));
        pos[ids0[2]] = Some((one, one));
        pos[ids0[3]] = Some((z0, one));
        for (i, &t) in self.removed.iter().enumerate().skip(1) {
            let ids = self.old_ids[i];
            let Some(j) = (0..4).find(|&v| pos[ids[v]].is_none()) else { continue };
            // Even relabelling putting the unknown vertex last.
            let rho = Perm4::all().find(|p| p.is_even() && p.apply(3) == j).expect("even perm");
            let q = [0, 1, 2].map(|k| pos[ids[rho.apply(k)]].expect("known vertex"));
            let slot = super::shape_slot(rho.apply(0), rho.apply(1));
            let z = edge_parameters(shapes[t])[slot];
            pos[ids[j]] = Some(solve_fourth(q, z));
        }
        let mut out: Vec<Complex64> = (0..shapes.len()).filter(|t| !self.removed.contains(t)).map(|t| shapes[t]).collect();
        for ids in &self.new_ids {
            let p = ids.map(|x| pos[x].expect("all ball vertices placed"));
            let z = cross_ratio(p);
            if !z.is_finite() || z.norm() < 1e-300 {
                return None;
            }
            out.push(z);
        }
        Some(out)
    }
}
