//! Thurston's gluing equations, a floating-point solver for them, and
//! Krawczyk certification of the complete structure.
//!
//! Each tetrahedron carries one unknown `z` (the parameter of edges 01 and
//! 23); the other edges carry `z' = 1/(1-z)` and `z'' = (z-1)/z`. An edge
//! equation asks the logarithms of the parameters around an edge class to
//! add up to `2πi`. A cusp equation asks the log-holonomy of a peripheral
//! curve to vanish modulo `2πi`.
//!
//! # Certification
//!
//! The square system handed to the Krawczyk test consists of the meridian
//! equation of every cusp plus a maximal independent set of edge equations,
//! scanned in index order, so the dropped edges are the highest-index ones
//! that are dependent on the rest. All equations are in logarithmic form with
//! `arg ∈ (0, π)`, which is meaningful on boxes with strictly positive
//! imaginary part. Once the operator contracts:
//!
//! * every box lies in the upper half-plane (checked);
//! * for each cusp `c`, the edge equations weighted by the number of ends
//!   each edge has at `c` add up to an identity, because the three angles of
//!   every horotriangle sum to `π`; the weight matrix restricted to the
//!   dropped edges is checked to be nonsingular, so the dropped equations
//!   hold as well;
//! * meridian holonomy is trivial, which together with the edge equations
//!   forces the longitude holonomy to be trivial too. The longitude equation
//!   is additionally evaluated over the boxes as a consistency check.

use std::fmt;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::algebra::IntegerMatrix;
use crate::interval::{ComplexBox, RealInterval};
use crate::triangulation::{ccw_corners, shape_slot, IdealTriangulation, PeripheralCurve};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("shape solver did not converge (residual {residual:e} after {iterations} iterations)")]
    NonConvergence { iterations: usize, residual: f64 },
    #[error("tetrahedron {tet} is degenerate or negatively oriented (im z = {im:e})")]
    DegenerateShape { tet: usize, im: f64 },
    #[error("shape boxes could not be validated: {0}")]
    ContractionFailure(String),
}

/// What a row of the gluing system stands for.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RowKind {
    Edge { edge: usize },
    Meridian { cusp: usize },
    Longitude { cusp: usize },
}

/// Integer form of the gluing equations: row `r` reads
/// `Σ_j matrix[r][j]·log(param_j) = iπ·targets[r]`, where columns
/// `3t, 3t+1, 3t+2` hold `log z, log z', log z''` of tetrahedron `t`.
/// Cusp targets are `0` and are only meaningful modulo `2π`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GluingSystem {
    pub matrix: Vec<Vec<i64>>,
    pub targets: Vec<i64>,
    pub kinds: Vec<RowKind>,
    pub num_tets: usize,
}

impl GluingSystem {
    pub fn num_rows(&self) -> usize {
        self.matrix.len()
    }

    /// Row `r` rewritten over `z` alone: `sign · Π z^p (1-z)^q`.
    fn monomial(&self, r: usize) -> (f64, Vec<(i64, i64)>) {
        let row = &self.matrix[r];
        let mut sign = 1.0;
        let pq = (0..self.num_tets)
            .map(|t| {
                let (a, b, c) = (row[3 * t], row[3 * t + 1], row[3 * t + 2]);
                if c.rem_euclid(2) == 1 {
                    sign = -sign;
                }
                (a - c, c - b)
            })
            .collect();
        (sign, pq)
    }
}

/// Signed strand counts past the three corners of horotriangle `(t, v)`,
/// normalised so that one corner carries none.
fn corner_flows(curve: &PeripheralCurve, t: usize, v: usize) -> [i64; 3] {
    let p = ccw_corners(v);
    let w = p.map(|f| curve.get(t, v, f));
    // Flow F_i runs around corner p_i; the inflow on side p_i is
    // F_{i+1} - F_{i+2} read cyclically.
    let mut flows = [0, w[2], -w[1]];
    let mut sorted = flows;
    sorted.sort_unstable();
    let median = sorted[1];
    for x in &mut flows {
        *x -= median;
    }
    flows
}

/// Row of the log-holonomy of a peripheral curve.
fn holonomy_row(tri: &IdealTriangulation, curve: &PeripheralCurve) -> Vec<i64> {
    let mut row = vec![0; 3 * tri.num_tets()];
    for t in 0..tri.num_tets() {
        for v in 0..4 {
            let flows = corner_flows(curve, t, v);
            for (i, &corner) in ccw_corners(v).iter().enumerate() {
                row[3 * t + shape_slot(v, corner)] += flows[i];
            }
        }
    }
    row
}

pub fn gluing_system(tri: &IdealTriangulation) -> GluingSystem {
    let n = tri.num_tets();
    let mut matrix = Vec::new();
    let mut targets = Vec::new();
    let mut kinds = Vec::new();
    for (e, class) in tri.edges().iter().enumerate() {
        let mut row = vec![0; 3 * n];
        for m in &class.members {
            row[3 * m.tet + shape_slot(m.a, m.b)] += 1;
        }
        matrix.push(row);
        targets.push(2);
        kinds.push(RowKind::Edge { edge: e });
    }
    for (c, cc) in tri.curves().iter().enumerate() {
        matrix.push(holonomy_row(tri, &cc.meridian));
        targets.push(0);
        kinds.push(RowKind::Meridian { cusp: c });
        matrix.push(holonomy_row(tri, &cc.longitude));
        targets.push(0);
        kinds.push(RowKind::Longitude { cusp: c });
    }
    GluingSystem { matrix, targets, kinds, num_tets: n }
}

// ---------------------------------------------------------------------------
// Floating point.

const TWO_PI: f64 = std::f64::consts::TAU;

fn params(z: Complex64) -> [Complex64; 3] {
    let one = Complex64::new(1.0, 0.0);
    [z, one / (one - z), (z - one) / z]
}

/// `Σ matrix[r][j]·log(param_j)` with principal logarithms.
fn log_sum(sys: &GluingSystem, r: usize, z: &[Complex64]) -> Complex64 {
    let mut s = Complex64::new(0.0, 0.0);
    for (t, &zt) in z.iter().enumerate() {
        for (k, p) in params(zt).iter().enumerate() {
            let a = sys.matrix[r][3 * t + k];
            if a != 0 {
                s += p.ln() * a as f64;
            }
        }
    }
    s
}

/// Residuals `sign·Π z^p (1-z)^q - 1` of every row.
pub fn product_residuals(sys: &GluingSystem, z: &[Complex64]) -> Vec<Complex64> {
    (0..sys.num_rows())
        .map(|r| {
            let (sign, pq) = sys.monomial(r);
            let mut prod = Complex64::new(sign, 0.0);
            for (t, &(p, q)) in pq.iter().enumerate() {
                prod *= z[t].powi(p as i32) * (Complex64::new(1.0, 0.0) - z[t]).powi(q as i32);
            }
            prod - 1.0
        })
        .collect()
}

/// `∂/∂z_t` of row `r` in logarithmic form.
fn log_derivative(sys: &GluingSystem, r: usize, t: usize, z: Complex64) -> Complex64 {
    let one = Complex64::new(1.0, 0.0);
    let row = &sys.matrix[r];
    let (a, b, c) = (row[3 * t] as f64, row[3 * t + 1] as f64, row[3 * t + 2] as f64);
    a / z + b / (one - z) + c / (z * (z - one))
}

fn max_abs(v: &[Complex64]) -> f64 {
    v.iter().map(|x| x.norm()).fold(0.0, f64::max)
}

/// Log-form residuals of every row; cusp rows are reduced modulo `2πi`.
pub fn log_residuals(sys: &GluingSystem, z: &[Complex64]) -> Vec<Complex64> {
    (0..sys.num_rows())
        .map(|r| {
            let s = log_sum(sys, r, z);
            let k = match sys.kinds[r] {
                RowKind::Edge { .. } => sys.targets[r] as f64 / 2.0,
                _ => (s.im / TWO_PI).round(),
            };
            s - Complex64::new(0.0, TWO_PI * k)
        })
        .collect()
}

fn norm2(v: &[Complex64]) -> f64 {
    v.iter().map(|x| x.norm_sqr()).sum()
}

/// One Levenberg-Marquardt step on the log form of all rows. `damping` is
/// adapted in place; `None` when no improving step exists.
fn newton_step(sys: &GluingSystem, z: &[Complex64], damping: &mut f64) -> Option<Vec<Complex64>> {
    let n = z.len();
    let res = log_residuals(sys, z);
    let base = norm2(&res);
    let jac = DMatrix::from_fn(sys.num_rows(), n, |r, t| log_derivative(sys, r, t, z[t]));
    let rhs = DMatrix::from_fn(sys.num_rows(), 1, |r, _| -res[r]);
    let jh = jac.adjoint();
    let normal = &jh * &jac;
    let g = &jh * rhs;
    for _ in 0..40 {
        let mut m = normal.clone();
        for i in 0..n {
            m[(i, i)] += Complex64::new(*damping * (1.0 + normal[(i, i)].re), 0.0);
        }
        if let Some(delta) = m.lu().solve(&g) {
            let cand: Vec<Complex64> = (0..n).map(|t| z[t] + delta[t]).collect();
            if cand.iter().all(|w| w.is_finite()) && norm2(&log_residuals(sys, &cand)) < base {
                *damping = (*damping / 4.0).max(1e-12);
                return Some(cand);
            }
        }
        *damping *= 4.0;
    }
    None
}

const MAX_ITERATIONS: usize = 100;

const RESTARTS: usize = 32;

/// Solve the gluing equations in floating point. The first start is the
/// regular shape for every tetrahedron; if that fails, up to
/// `RESTARTS` pseudo-random starts from a fixed seed follow. A positively
/// oriented solution is preferred over a degenerate one.
pub fn solve_approx(tri: &IdealTriangulation) -> Result<Vec<Complex64>, GeometryError> {
    let regular = Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_3);
    let first = solve_from(tri, &vec![regular; tri.num_tets()]);
    if first.is_ok() {
        return first;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let mut best = first;
    for _ in 0..RESTARTS {
        let start: Vec<Complex64> =
            (0..tri.num_tets()).map(|_| Complex64::new(rng.gen_range(-1.0..2.0), rng.gen_range(0.1..2.0))).collect();
        match solve_from(tri, &start) {
            Ok(z) => return Ok(z),
            Err(e @ GeometryError::DegenerateShape { .. }) => best = Err(e),
            Err(_) => {}
        }
    }
    best
}

/// Solve the gluing equations starting from `start`.
pub fn solve_from(tri: &IdealTriangulation, start: &[Complex64]) -> Result<Vec<Complex64>, GeometryError> {
    let sys = gluing_system(tri);
    let mut z = start.to_vec();
    let mut residual = max_abs(&product_residuals(&sys, &z));
    let mut iterations = 0;
    let mut damping = 1e-3;
    while iterations < MAX_ITERATIONS && residual >= 1e-15 {
        iterations += 1;
        match newton_step(&sys, &z, &mut damping) {
            Some(next) => {
                z = next;
                residual = max_abs(&product_residuals(&sys, &z));
            }
            None => break,
        }
    }
    if !(residual < 1e-12) {
        return Err(GeometryError::NonConvergence { iterations, residual });
    }
    if let Some((tet, w)) = z.iter().enumerate().find(|(_, w)| w.im <= 1e-9) {
        return Err(GeometryError::DegenerateShape { tet, im: w.im });
    }
    Ok(z)
}

// ---------------------------------------------------------------------------
// Intervals.

/// Per-tetrahedron enclosures of `z`.
#[derive(Clone, Debug, Serialize)]
pub struct ShapeBoxes {
    pub boxes: Vec<ComplexBox>,
    /// Rows of the gluing system used in the square system.
    pub square_rows: Vec<usize>,
    /// Number of times the initial box was doubled before contraction.
    pub inflation_rounds: u32,
    certified: bool,
}

impl ShapeBoxes {
    /// Degenerate boxes around floating-point shapes, without any proof.
    pub fn uncertified(shapes: &[Complex64]) -> ShapeBoxes {
        ShapeBoxes {
            boxes: shapes.iter().map(|z| ComplexBox::point(z.re, z.im)).collect(),
            square_rows: vec![],
            inflation_rounds: 0,
            certified: false,
        }
    }

    pub fn is_certified(&self) -> bool {
        self.certified
    }

    pub fn len(&self) -> usize {
        self.boxes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.boxes.is_empty()
    }

    pub fn midpoints(&self) -> Vec<Complex64> {
        self.boxes.iter().map(|b| Complex64::new(b.re.mid(), b.im.mid())).collect()
    }
}

impl fmt::Display for ShapeBoxes {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (t, b) in self.boxes.iter().enumerate() {
            writeln!(f, "z{t} = {b}")?;
        }
        Ok(())
    }
}

/// Enclosures of `z, z', z''`.
pub fn parameter_boxes(z: ComplexBox) -> Option<[ComplexBox; 3]> {
    let one = ComplexBox::ONE;
    let zp = (one - z).recip().ok()?;
    let zpp = (z - one).div(z).ok()?;
    Some([z, zp, zpp])
}

/// Interval value of `Σ matrix[r][j]·log(param_j)` over `boxes`.
pub fn evaluate_row(sys: &GluingSystem, r: usize, boxes: &[ComplexBox]) -> Option<ComplexBox> {
    let mut s = ComplexBox::point(0.0, 0.0);
    for (t, &b) in boxes.iter().enumerate() {
        let ps = parameter_boxes(b)?;
        for (k, p) in ps.iter().enumerate() {
            let a = sys.matrix[r][3 * t + k];
            if a != 0 {
                s = s + p.log_upper().ok()?.scale(RealInterval::from_int(a));
            }
        }
    }
    Some(s)
}

fn log_derivative_box(sys: &GluingSystem, r: usize, t: usize, z: ComplexBox) -> Option<ComplexBox> {
    let one = ComplexBox::ONE;
    let row = &sys.matrix[r];
    let mut d = ComplexBox::point(0.0, 0.0);
    if row[3 * t] != 0 {
        d = d + z.recip().ok()?.scale(RealInterval::from_int(row[3 * t]));
    }
    if row[3 * t + 1] != 0 {
        d = d + (one - z).recip().ok()?.scale(RealInterval::from_int(row[3 * t + 1]));
    }
    if row[3 * t + 2] != 0 {
        d = d + (z * (z - one)).recip().ok()?.scale(RealInterval::from_int(row[3 * t + 2]));
    }
    Some(d)
}

/// Meridians first, then edges in index order while they raise the rank of
/// the Jacobian at `z`.
fn choose_square_rows(sys: &GluingSystem, z: &[Complex64]) -> Vec<usize> {
    let n = z.len();
    let jac_row = |r: usize| (0..n).map(|t| log_derivative(sys, r, t, z[t])).collect::<Vec<_>>();
    let rank = |rows: &[Vec<Complex64>]| -> usize {
        let m = DMatrix::from_fn(rows.len(), n, |i, j| rows[i][j]);
        let sv = m.singular_values();
        let top = sv.iter().cloned().fold(0.0, f64::max);
        sv.iter().filter(|&&s| s > top * 1e-9).count()
    };
    let mut chosen = Vec::new();
    let mut rows = Vec::new();
    let meridians = (0..sys.num_rows()).filter(|&r| matches!(sys.kinds[r], RowKind::Meridian { .. }));
    let edges = (0..sys.num_rows()).filter(|&r| matches!(sys.kinds[r], RowKind::Edge { .. }));
    for r in meridians.chain(edges) {
        if chosen.len() == n {
            break;
        }
        rows.push(jac_row(r));
        if rank(&rows) == rows.len() {
            chosen.push(r);
        } else {
            rows.pop();
        }
    }
    chosen
}

/// Multiples of `2π` in the log-holonomy of each row at `z`, measured in
/// units of `π`.
fn row_targets(sys: &GluingSystem, rows: &[usize], z: &[Complex64]) -> Vec<i64> {
    rows.iter()
        .map(|&r| match sys.kinds[r] {
            RowKind::Edge { .. } => sys.targets[r],
            _ => 2 * (log_sum(sys, r, z).im / TWO_PI).round() as i64,
        })
        .collect()
}

fn ulp(x: f64) -> f64 {
    let a = x.abs().max(f64::MIN_POSITIVE);
    a.next_up() - a
}

/// Certify that boxes around `approx` contain a unique solution of the
/// gluing equations, and that it is the complete structure with every
/// tetrahedron positively oriented.
pub fn certify_shapes(tri: &IdealTriangulation, approx: &[Complex64]) -> Result<ShapeBoxes, GeometryError> {
    let fail = |m: &str| GeometryError::ContractionFailure(m.to_string());
    let n = tri.num_tets();
    if approx.len() != n {
        return Err(fail("wrong number of shapes"));
    }
    let sys = gluing_system(tri);
    let mut x = approx.to_vec();
    let mut damping = 1e-12;
    for _ in 0..3 {
        match newton_step(&sys, &x, &mut damping) {
            Some(next) => x = next,
            None => break,
        }
    }
    if x.iter().any(|w| !(w.im > 0.0)) {
        return Err(fail("approximate solution is not positively oriented"));
    }

    let rows = choose_square_rows(&sys, &x);
    if rows.len() != n {
        return Err(fail("gluing equations are singular at the approximate solution"));
    }
    check_dropped_edges(tri, &sys, &rows)?;
    let targets = row_targets(&sys, &rows, &x);
    let target_box = |k: i64| ComplexBox::new(RealInterval::ZERO, RealInterval::PI * RealInterval::from_int(k));

    // F at the centre, as an interval.
    let centre: Vec<ComplexBox> = x.iter().map(|w| ComplexBox::point(w.re, w.im)).collect();
    let mut fx = Vec::with_capacity(n);
    for (i, &r) in rows.iter().enumerate() {
        let v = evaluate_row(&sys, r, &centre).ok_or_else(|| fail("centre leaves the upper half-plane"))?;
        fx.push(v - target_box(targets[i]));
    }
    let jc = DMatrix::from_fn(n, n, |i, t| log_derivative(&sys, rows[i], t, x[t]));
    let c = jc.try_inverse().ok_or_else(|| fail("singular Jacobian"))?;
    let cbox = |i: usize, j: usize| ComplexBox::point(c[(i, j)].re, c[(i, j)].im);

    let zero = ComplexBox::point(0.0, 0.0);
    let cf: Vec<ComplexBox> = (0..n).map(|i| (0..n).fold(zero, |acc, j| acc + cbox(i, j) * fx[j])).collect();

    for round in 0..=8u32 {
        let scale = 2f64.powi(10 + round as i32);
        let radius: Vec<f64> = x.iter().map(|w| scale * ulp(w.re.abs().max(w.im.abs()))).collect();
        let dx: Vec<ComplexBox> = radius
            .iter()
            .map(|&r| ComplexBox::new(RealInterval::around(0.0, r), RealInterval::around(0.0, r)))
            .collect();
        let xbox: Vec<ComplexBox> = (0..n).map(|t| centre[t] + dx[t]).collect();
        if xbox.iter().any(|b| !b.im.is_strictly_positive()) {
            return Err(fail("inflated box leaves the upper half-plane"));
        }
        let mut jx = vec![vec![zero; n]; n];
        let mut ok = true;
        'outer: for i in 0..n {
            for t in 0..n {
                match log_derivative_box(&sys, rows[i], t, xbox[t]) {
                    Some(d) => jx[i][t] = d,
                    None => {
                        ok = false;
                        break 'outer;
                    }
                }
            }
        }
        if !ok {
            continue;
        }
        let mut inside = true;
        let mut kbox = Vec::with_capacity(n);
        for i in 0..n {
            let mut acc = centre[i] - cf[i];
            for j in 0..n {
                let mut m = if i == j { ComplexBox::ONE } else { zero };
                for k in 0..n {
                    m = m - cbox(i, k) * jx[k][j];
                }
                acc = acc + m * dx[j];
            }
            inside &= acc.interior_of(&xbox[i]);
            kbox.push(acc);
        }
        if !inside {
            continue;
        }
        let boxes: Vec<ComplexBox> =
            kbox.iter().zip(&xbox).map(|(k, b)| k.intersect(b).expect("K lies inside X")).collect();
        if boxes.iter().any(|b| !RealInterval::ZERO.strictly_less(&b.im)) {
            return Err(fail("certified box is not in the upper half-plane"));
        }
        check_longitudes(&sys, &boxes, &x)?;
        return Ok(ShapeBoxes { boxes, square_rows: rows, inflation_rounds: round, certified: true });
    }
    Err(fail("Krawczyk operator did not contract"))
}

/// The dropped edge equations follow from the kept ones when the matrix of
/// edge-end counts (cusps × dropped edges) is nonsingular.
fn check_dropped_edges(tri: &IdealTriangulation, sys: &GluingSystem, rows: &[usize]) -> Result<(), GeometryError> {
    let dropped: Vec<usize> = (0..sys.num_rows())
        .filter_map(|r| match sys.kinds[r] {
            RowKind::Edge { edge } if !rows.contains(&r) => Some(edge),
            _ => None,
        })
        .collect();
    if dropped.len() != tri.num_cusps() {
        return Err(GeometryError::ContractionFailure(format!(
            "{} edge equations dropped for {} cusps",
            dropped.len(),
            tri.num_cusps()
        )));
    }
    let ends: Vec<Vec<i64>> = (0..tri.num_cusps())
        .map(|c| {
            dropped
                .iter()
                .map(|&e| {
                    let m = tri.edges()[e].members[0];
                    (tri.cusp_of(m.tet, m.a) == c) as i64 + (tri.cusp_of(m.tet, m.b) == c) as i64
                })
                .collect()
        })
        .collect();
    if num_traits::Zero::is_zero(&IntegerMatrix::from_rows(&ends).determinant()) {
        return Err(GeometryError::ContractionFailure("dropped edge equations are not implied".into()));
    }
    Ok(())
}

fn check_longitudes(sys: &GluingSystem, boxes: &[ComplexBox], x: &[Complex64]) -> Result<(), GeometryError> {
    for r in 0..sys.num_rows() {
        if let RowKind::Longitude { cusp } = sys.kinds[r] {
            let k = 2 * (log_sum(sys, r, x).im / TWO_PI).round() as i64;
            let v = evaluate_row(sys, r, boxes)
                .ok_or_else(|| GeometryError::ContractionFailure("longitude evaluation failed".into()))?;
            let target = RealInterval::PI * RealInterval::from_int(k);
            if !(v.re.contains_zero() && v.im.intersect(&target).is_some()) {
                return Err(GeometryError::ContractionFailure(format!("longitude of cusp {cusp} is not complete")));
            }
        }
    }
    Ok(())
}
