#[path = "support/exact_tilt.rs"]
mod exact_tilt;

use std::cmp::Ordering;

use tiltcert::canonical::{certify_multi_cusp, Verdict};
use tiltcert::canonize::float_tilts;
use tiltcert::fixtures;
use tiltcert::geometry::{certify_shapes, solve_approx};
use tiltcert::triangulation::IdealTriangulation;

fn certified(t: &IdealTriangulation) -> tiltcert::geometry::ShapeBoxes {
    certify_shapes(t, &solve_approx(t).unwrap()).unwrap()
}

#[test]
fn whitehead_has_exact_zero_tilts() {
    let t = fixtures::whitehead();
    let zeros = exact_tilt::zero_faces(&t).unwrap();
    assert_eq!(zeros, vec![0, 6]);
    let cert = certify_multi_cusp(&t, &certified(&t)).unwrap();
    assert!(matches!(cert.verdict, Verdict::Inconclusive { .. }));
    // Every exactly-zero face is indeterminate in the certificate, never
    // decided either way.
    for l in &cert.ledgers {
        for f in &zeros {
            assert!(l.report.faces[*f].tilt.contains_zero(), "face {f}");
        }
    }
}

#[test]
fn oracle_matches_floating_tilts() {
    for t in [fixtures::whitehead(), fixtures::two_cusp_canonical()] {
        let e = exact_tilt::exact_tilts(&t).unwrap();
        let float = float_tilts(&t, &solve_approx(&t).unwrap()).unwrap();
        // The oracle's seed scale differs from the library's by one factor.
        let (f, _) = float.iter().enumerate().max_by(|a, b| a.1.abs().total_cmp(&b.1.abs())).unwrap();
        let ratio = float[f] / e.value_at_equal_area(f);
        for (g, x) in float.iter().enumerate() {
            assert!((x - ratio * e.value_at_equal_area(g)).abs() < 1e-9, "face {g}");
            let sign = e.sign_at_equal_area(g);
            assert!(sign == Ordering::Equal || (sign == Ordering::Less) == (*x < 0.0), "face {g}");
        }
    }
}

#[test]
fn octahedral_canonical_fixture_is_strictly_negative() {
    let t = fixtures::two_cusp_canonical();
    let e = exact_tilt::exact_tilts(&t).unwrap();
    assert!((0..t.faces().len()).all(|f| e.sign_at_equal_area(f) == Ordering::Less));
}

#[test]
fn non_octahedral_shapes_are_rejected() {
    assert!(exact_tilt::check_all_shapes_i(&fixtures::figure_eight()).is_err());
}
