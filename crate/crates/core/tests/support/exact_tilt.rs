//! Exact tilts for triangulations whose shapes are all `z = i`.
//!
//! Every dihedral angle is then π/2 or π/4, so sines, cosines and the ratios
//! of horotriangle sizes all lie in Q(√2), and cusp areas are rational
//! multiples of them. Tilts at equal cusp area are `Σ_c λ_c q_c` with
//! `q_c ∈ Q(√2)` and `λ_c = √(A_0 / A_c)`, whose sign is decided exactly by
//! squaring. Nothing here calls the certification code.

use std::cmp::Ordering;
use std::collections::VecDeque;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use tiltcert::geometry::{gluing_system, RowKind};
use tiltcert::triangulation::IdealTriangulation;

type Q = BigRational;

/// `a + b√2`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Q2 {
    a: Q,
    b: Q,
}

impl Q2 {
    fn new(a: Q, b: Q) -> Q2 {
        Q2 { a, b }
    }

    fn int(n: i64) -> Q2 {
        Q2::new(Q::from_integer(BigInt::from(n)), Q::zero())
    }

    /// `√2 / 2`
    fn half_root2() -> Q2 {
        Q2::new(Q::zero(), Q::new(BigInt::from(1), BigInt::from(2)))
    }

    fn half(&self) -> Q2 {
        let h = Q::new(BigInt::from(1), BigInt::from(2));
        Q2::new(&self.a * &h, &self.b * &h)
    }

    fn inv(&self) -> Q2 {
        let n = &self.a * &self.a - Q::from_integer(BigInt::from(2)) * &self.b * &self.b;
        Q2::new(&self.a / &n, -&self.b / &n)
    }

    pub fn sign(&self) -> Ordering {
        let (sa, sb) = (self.a.cmp(&Q::zero()), self.b.cmp(&Q::zero()));
        if sa == sb || sb == Ordering::Equal {
            return sa;
        }
        if sa == Ordering::Equal {
            return sb;
        }
        // Opposite signs: the larger of a² and 2b² wins.
        let a2 = &self.a * &self.a;
        let b2 = Q::from_integer(BigInt::from(2)) * &self.b * &self.b;
        if a2 > b2 {
            sa
        } else {
            sb
        }
    }

    #[allow(dead_code)] // unused by the acceptance suite
    pub fn to_f64(&self) -> f64 {
        self.a.to_f64().unwrap() + self.b.to_f64().unwrap() * std::f64::consts::SQRT_2
    }
}

impl Add for Q2 {
    type Output = Q2;
    fn add(self, o: Q2) -> Q2 {
        Q2::new(self.a + o.a, self.b + o.b)
    }
}

impl Sub for Q2 {
    type Output = Q2;
    fn sub(self, o: Q2) -> Q2 {
        self + -o
    }
}

impl Neg for Q2 {
    type Output = Q2;
    fn neg(self) -> Q2 {
        Q2::new(-self.a, -self.b)
    }
}

impl Mul for Q2 {
    type Output = Q2;
    fn mul(self, o: Q2) -> Q2 {
        let two = Q::from_integer(BigInt::from(2));
        Q2::new(&self.a * &o.a + two * &self.b * &o.b, &self.a * &o.b + &self.b * &o.a)
    }
}

/// Dihedral angle of edge `(a, b)` in units of π/4 when `z = i`: the edges
/// 01 and 23 carry `z` (π/2), the others `1/(1−z)` and `(z−1)/z` (π/4).
fn quarter_turns(a: usize, b: usize) -> i64 {
    let (a, b) = (a.min(b), a.max(b));
    if (a, b) == (0, 1) || (a, b) == (2, 3) {
        2
    } else {
        1
    }
}

fn sin(a: usize, b: usize) -> Q2 {
    if quarter_turns(a, b) == 2 {
        Q2::int(1)
    } else {
        Q2::half_root2()
    }
}

fn cos(a: usize, b: usize) -> Q2 {
    if quarter_turns(a, b) == 2 {
        Q2::int(0)
    } else {
        Q2::half_root2()
    }
}

/// Checks that `z = i` in every tetrahedron solves the gluing equations
/// exactly. At `z = i` the logarithms of `z, z', z''` are `iπ/2`,
/// `−ln2/2 + iπ/4` and `ln2/2 + iπ/4`, so a row with coefficients `(p, q, r)`
/// per tetrahedron sums to `(Σ r − q)·ln2/2 + iπ·Σ(2p + q + r)/4`.
pub fn check_all_shapes_i(tri: &IdealTriangulation) -> Result<(), String> {
    let sys = gluing_system(tri);
    for (r, row) in sys.matrix.iter().enumerate() {
        let (mut re, mut quarters) = (0i64, 0i64);
        for t in 0..tri.num_tets() {
            let (p, q, s) = (row[3 * t], row[3 * t + 1], row[3 * t + 2]);
            re += s - q;
            quarters += 2 * p + q + s;
        }
        let ok = re == 0
            && match sys.kinds[r] {
                RowKind::Edge { .. } => quarters == 4 * sys.targets[r],
                _ => quarters.rem_euclid(8) == 0,
            };
        if !ok {
            return Err(format!("row {r} ({:?}) fails at z = i", sys.kinds[r]));
        }
    }
    Ok(())
}

pub struct ExactTilts {
    /// Cusp areas for the seed cross-sections.
    pub areas: Vec<Q2>,
    /// Per face, the tilt as coefficients of the per-cusp scale factors.
    pub faces: Vec<Vec<Q2>>,
}

impl ExactTilts {
    /// Sign of a face tilt once every cusp is scaled to the area of cusp 0.
    pub fn sign_at_equal_area(&self, face: usize) -> Ordering {
        let q = &self.faces[face];
        match q.len() {
            1 => q[0].sign(),
            2 => {
                let (s0, s1) = (q[0].sign(), q[1].sign());
                if s0 == s1 || s1 == Ordering::Equal {
                    return s0;
                }
                if s0 == Ordering::Equal {
                    return s1;
                }
                // q0 + λq1 with λ² = A0/A1: compare q0²·A1 with q1²·A0.
                let lhs = q[0].clone() * q[0].clone() * self.areas[1].clone();
                let rhs = q[1].clone() * q[1].clone() * self.areas[0].clone();
                match (lhs - rhs).sign() {
                    Ordering::Greater => s0,
                    Ordering::Less => s1,
                    Ordering::Equal => Ordering::Equal,
                }
            }
            n => panic!("{n} cusps not supported"),
        }
    }

    /// Floating-point value at equal area, for comparison only.
    #[allow(dead_code)]
    pub fn value_at_equal_area(&self, face: usize) -> f64 {
        let a0 = self.areas[0].to_f64();
        self.faces[face].iter().zip(&self.areas).map(|(q, a)| q.to_f64() * (a0 / a.to_f64()).sqrt()).sum()
    }
}

/// Develops every cusp from a horotriangle of circumdiameter 1 and returns
/// the exact tilts. Requires all shapes to be `i`.
pub fn exact_tilts(tri: &IdealTriangulation) -> Result<ExactTilts, String> {
    check_all_shapes_i(tri)?;
    let n = tri.num_tets();
    // Circumdiameter of horotriangle (t, v); the side in face f has length
    // D·sin θ_vf by the law of sines.
    let mut diam: Vec<[Option<Q2>; 4]> = vec![Default::default(); n];
    for t in 0..n {
        for v in 0..4 {
            if diam[t][v].is_some() {
                continue;
            }
            diam[t][v] = Some(Q2::int(1));
            let mut queue = VecDeque::from([(t, v)]);
            while let Some((t, v)) = queue.pop_front() {
                let d = diam[t][v].clone().unwrap();
                for f in (0..4).filter(|&f| f != v) {
                    let (u, g) = (tri.neighbor(t, f), tri.gluing(t, f));
                    let (w, h) = (g.apply(v), g.apply(f));
                    let side = d.clone() * sin(v, f);
                    let other = side * sin(w, h).inv();
                    match &diam[u][w] {
                        Some(existing) if *existing != other => {
                            return Err(format!("cusp development inconsistent at ({u}, {w})"));
                        }
                        Some(_) => {}
                        None => {
                            diam[u][w] = Some(other);
                            queue.push_back((u, w));
                        }
                    }
                }
            }
        }
    }
    let d = |t: usize, v: usize| diam[t][v].clone().unwrap();

    let mut areas = vec![Q2::int(0); tri.num_cusps()];
    for t in 0..n {
        for v in 0..4 {
            // Area = (D²/2)·Π sin of the three corner angles.
            let mut a = (d(t, v) * d(t, v)).half();
            for k in (0..4).filter(|&k| k != v) {
                a = a * sin(v, k);
            }
            let c = tri.cusp_of(t, v);
            areas[c] = areas[c].clone() + a;
        }
    }

    // tilt(X, F_i) = R_i − Σ R_k cos θ_ik with R = D/2, split by cusp.
    let side = |t: usize, i: usize| -> Vec<Q2> {
        let mut q = vec![Q2::int(0); tri.num_cusps()];
        let c = tri.cusp_of(t, i);
        q[c] = q[c].clone() + d(t, i).half();
        for k in (0..4).filter(|&k| k != i) {
            let c = tri.cusp_of(t, k);
            q[c] = q[c].clone() - d(t, k).half() * cos(i, k);
        }
        q
    };
    let faces = tri
        .faces()
        .iter()
        .map(|f| side(f.tet, f.face).into_iter().zip(side(f.other_tet, f.other_face)).map(|(a, b)| a + b).collect())
        .collect();
    Ok(ExactTilts { areas, faces })
}

/// Faces whose tilt is exactly zero at equal cusp area.
pub fn zero_faces(tri: &IdealTriangulation) -> Result<Vec<usize>, String> {
    let e = exact_tilts(tri)?;
    Ok((0..tri.faces().len()).filter(|&f| e.sign_at_equal_area(f) == Ordering::Equal).collect())
}

