//! Homology of fillings is a topological invariant, so it must survive any
//! sequence of Pachner moves, geometric or not.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use tiltcert::algebra::{filled_homology, AbelianGroup, Slope};
use tiltcert::fixtures;
use tiltcert::triangulation::{intersection_number, pachner_2_3, pachner_3_2, IdealTriangulation};

/// One admissible move chosen uniformly among 2-3 faces and 3-2 edges.
fn random_move(tri: &IdealTriangulation, rng: &mut ChaCha8Rng) -> IdealTriangulation {
    let mut candidates: Vec<(bool, usize)> = (0..tri.faces().len()).map(|f| (true, f)).collect();
    candidates.extend(tri.edge_valences().iter().enumerate().filter(|(_, &v)| v == 3).map(|(e, _)| (false, e)));
    candidates.shuffle(rng);
    for (up, i) in candidates {
        let moved = if up { pachner_2_3(tri, i) } else { pachner_3_2(tri, i) };
        if let Ok((t, _)) = moved {
            return t;
        }
    }
    panic!("no admissible move");
}

fn slopes_for(tri: &IdealTriangulation) -> Vec<Vec<Option<Slope>>> {
    let s = |p, q| Some(Slope::new(p, q).unwrap());
    match tri.num_cusps() {
        1 => vec![vec![None], vec![s(1, 0)], vec![s(5, 1)], vec![s(-3, 7)], vec![s(0, 1)]],
        _ => vec![vec![None, None], vec![s(1, 0), None], vec![None, s(2, 3)], vec![s(4, 1), s(7, 2)]],
    }
}

fn invariants(tri: &IdealTriangulation) -> Vec<AbelianGroup> {
    slopes_for(tri).iter().map(|s| filled_homology(tri, s)).collect()
}

fn check_walks(start: IdealTriangulation, walks: u64, max_len: usize) {
    let want = invariants(&start);
    for seed in 0..walks {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut tri = start.clone();
        for step in 0..rng.gen_range(1..=max_len) {
            tri = random_move(&tri, &mut rng);
            assert_eq!(invariants(&tri), want, "seed {seed}, step {step}");
            for cc in tri.curves() {
                assert_eq!(intersection_number(&tri, &cc.meridian, &cc.longitude), 1, "seed {seed}, step {step}");
            }
        }
    }
}

#[test]
fn figure_eight_walks() {
    check_walks(fixtures::figure_eight(), 50, 8);
}

#[test]
fn two_cusped_walks() {
    check_walks(fixtures::whitehead(), 20, 6);
    check_walks(fixtures::two_cusp_canonical(), 20, 6);
}
