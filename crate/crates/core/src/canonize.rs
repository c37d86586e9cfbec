//! Floating-point search for a canonical triangulation.
//!
//! Starting from a geometric triangulation, faces with positive tilt are
//! removed by 2-3 moves, valence-three edges next to non-negative faces by
//! 3-2 moves, and when neither applies a short random walk of Pachner moves
//! shakes the triangulation loose. Every move must keep all tetrahedra
//! positively oriented. The result is only a candidate: the proof comes from
//! [`crate::canonical`].

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::canonical::tilt_report;
use crate::cusp::build_cross_section;
use crate::interval::{ComplexBox, RealInterval};
use crate::geometry::{solve_approx, solve_from, GeometryError, ShapeBoxes};
use crate::triangulation::{edge_index, pachner_2_3, pachner_3_2, IdealTriangulation, MoveKind, MoveRecord};

/// Float tilts within this distance of zero count as zero.
pub const TAU: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Caps {
    /// Total number of moves over the whole run.
    pub max_moves: usize,
    pub initial_walk: usize,
    pub max_walk: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps { max_moves: 10_000, initial_walk: 4, max_walk: 64 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    CandidateFound,
    IterationCapReached,
    SuspectedNonTetrahedral,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Step {
    PositiveFace,
    ValenceThree,
    RandomWalk,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TracedMove {
    pub step: Step,
    #[serde(rename = "move")]
    pub kind: MoveKind,
    /// Face tilts of the triangulation the move was applied to; empty for
    /// random-walk moves.
    pub tilts_before: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CanonizeTrace {
    pub seed: u64,
    pub caps: Caps,
    pub moves: Vec<TracedMove>,
    pub final_tilts: Vec<f64>,
    pub status: Termination,
}

impl CanonizeTrace {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("trace serializes")
    }

    /// Apply the recorded moves to `start` again.
    pub fn replay(&self, start: &IdealTriangulation) -> Result<IdealTriangulation, crate::triangulation::MoveError> {
        let mut t = start.clone();
        for m in &self.moves {
            t = match m.kind {
                MoveKind::TwoThree { face } => pachner_2_3(&t, face)?.0,
                MoveKind::ThreeTwo { edge } => pachner_3_2(&t, edge)?.0,
            };
        }
        Ok(t)
    }
}

#[derive(Clone, Debug)]
pub struct Canonized {
    pub triangulation: IdealTriangulation,
    pub shapes: Vec<Complex64>,
    pub trace: CanonizeTrace,
}

/// Face tilts in floating point with every cusp scaled to the area of cusp 0.
pub fn float_tilts(tri: &IdealTriangulation, shapes: &[Complex64]) -> Option<Vec<f64>> {
    // Point boxes would make the cusp developments disagree by rounding
    // error around non-tree edges, so give each shape a little room.
    let mut boxes = ShapeBoxes::uncertified(shapes);
    for (b, z) in boxes.boxes.iter_mut().zip(shapes) {
        let r = 1e-10 * z.norm().max(1.0);
        *b = ComplexBox::new(RealInterval::around(z.re, r), RealInterval::around(z.im, r));
    }
    let mut cross = build_cross_section(tri, &boxes).ok()?;
    let a0 = cross.area(0);
    for c in 1..cross.cusps.len() {
        let f = a0.div(cross.cusps[c].area).ok()?.sqrt().ok()?;
        cross.cusps[c] = cross.cusps[c].scaled(f);
    }
    Some(tilt_report(tri, &cross, &boxes).faces.iter().map(|f| f.tilt.mid()).collect())
}

/// Carry shapes across a move and polish them; `None` if a tetrahedron would
/// not be positively oriented or the equations stop converging.
fn follow(rec: &MoveRecord, next: &IdealTriangulation, shapes: &[Complex64]) -> Option<Vec<Complex64>> {
    let moved = rec.transport_shapes(shapes)?;
    if moved.iter().any(|z| !(z.im > TAU)) {
        return None;
    }
    solve_from(next, &moved).ok()
}

fn try_move(tri: &IdealTriangulation, shapes: &[Complex64], kind: MoveKind) -> Option<(IdealTriangulation, Vec<Complex64>)> {
    let (next, rec) = match kind {
        MoveKind::TwoThree { face } => pachner_2_3(tri, face).ok()?,
        MoveKind::ThreeTwo { edge } => pachner_3_2(tri, edge).ok()?,
    };
    let z = follow(&rec, &next, shapes)?;
    Some((next, z))
}

fn face_edges(tri: &IdealTriangulation, face: usize) -> [usize; 3] {
    let f = tri.faces()[face];
    let v: Vec<usize> = (0..4).filter(|&k| k != f.face).collect();
    [(v[0], v[1]), (v[0], v[2]), (v[1], v[2])].map(|(a, b)| tri.edge_of(f.tet, edge_index(a, b)))
}

fn random_move(rng: &mut ChaCha8Rng, tri: &IdealTriangulation) -> MoveKind {
    let threes: Vec<usize> = tri.edges().iter().enumerate().filter(|(_, e)| e.valence() == 3).map(|(i, _)| i).collect();
    if !threes.is_empty() && rng.gen_bool(0.5) {
        MoveKind::ThreeTwo { edge: threes[rng.gen_range(0..threes.len())] }
    } else {
        MoveKind::TwoThree { face: rng.gen_range(0..tri.faces().len()) }
    }
}

/// `n` admissible random moves; inadmissible picks are skipped, and the walk
/// gives up after `50 n` picks.
fn walk(
    rng: &mut ChaCha8Rng,
    mut tri: IdealTriangulation,
    mut shapes: Vec<Complex64>,
    n: usize,
    log: &mut Vec<TracedMove>,
) -> (IdealTriangulation, Vec<Complex64>) {
    let mut done = 0;
    let mut picks = 0;
    while done < n && picks < 50 * n {
        picks += 1;
        let kind = random_move(rng, &tri);
        if let Some((t, z)) = try_move(&tri, &shapes, kind) {
            tri = t;
            shapes = z;
            done += 1;
            log.push(TracedMove { step: Step::RandomWalk, kind, tilts_before: Vec::new() });
        }
    }
    (tri, shapes)
}

/// `n` random Pachner moves that keep the float shapes positively oriented.
/// Returns `tri` unchanged when it has no geometric solution.
pub fn retriangulate_random(tri: &IdealTriangulation, seed: u64, n: usize) -> IdealTriangulation {
    let Ok(z) = solve_approx(tri) else { return tri.clone() };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    walk(&mut rng, tri.clone(), z, n, &mut Vec::new()).0
}

pub fn canonize(tri: &IdealTriangulation, seed: u64, caps: Caps) -> Result<Canonized, GeometryError> {
    let mut shapes = solve_approx(tri)?;
    let mut tri = tri.clone();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut moves = Vec::new();
    let mut walk_len = caps.initial_walk.max(1);

    let status = loop {
        let tilts = match float_tilts(&tri, &shapes) {
            Some(t) => t,
            None => break Termination::IterationCapReached,
        };
        if tilts.iter().all(|&t| t < -TAU) {
            break Termination::CandidateFound;
        }
        if moves.len() >= caps.max_moves {
            break Termination::IterationCapReached;
        }

        let mut positive: Vec<usize> = (0..tilts.len()).filter(|&i| tilts[i] > TAU).collect();
        positive.sort_by(|&a, &b| tilts[b].total_cmp(&tilts[a]).then(a.cmp(&b)));
        let two_three = positive.into_iter().map(|face| (Step::PositiveFace, MoveKind::TwoThree { face }));

        let mut candidates: Vec<usize> = Vec::new();
        for (face, _) in tilts.iter().enumerate().filter(|(_, &t)| t >= -TAU) {
            for e in face_edges(&tri, face) {
                if tri.edges()[e].valence() == 3 && !candidates.contains(&e) {
                    candidates.push(e);
                }
            }
        }
        candidates.sort_unstable();
        let three_two = candidates.into_iter().map(|edge| (Step::ValenceThree, MoveKind::ThreeTwo { edge }));

        let applied = two_three.chain(three_two).find_map(|(step, kind)| try_move(&tri, &shapes, kind).map(|r| (step, kind, r)));
        if let Some((step, kind, (t, z))) = applied {
            moves.push(TracedMove { step, kind, tilts_before: tilts });
            tri = t;
            shapes = z;
            continue;
        }
        if tilts.iter().all(|&t| t <= TAU) {
            break Termination::SuspectedNonTetrahedral;
        }
        let n = walk_len.min(caps.max_moves - moves.len());
        let before = moves.len();
        (tri, shapes) = walk(&mut rng, tri, shapes, n, &mut moves);
        if moves.len() == before {
            // Nothing moves at all: no further progress is possible.
            break Termination::IterationCapReached;
        }
        walk_len = (walk_len * 2).min(caps.max_walk);
    };

    let final_tilts = float_tilts(&tri, &shapes).unwrap_or_default();
    Ok(Canonized { triangulation: tri, shapes, trace: CanonizeTrace { seed, caps, moves, final_tilts, status } })
}
