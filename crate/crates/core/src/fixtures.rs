//! Small triangulations used by tests, examples and the demo.

use crate::triangulation::IdealTriangulation;

/// The figure-eight knot complement as two regular ideal tetrahedra. The
/// longitude is the homological one.
pub const FIGURE_EIGHT: &str = "tets 2 cusps 1
tet 0: 1 0132 1 1230 1 2310 1 2103
tet 1: 0 0132 0 3201 0 3012 0 2103
meridian 0: 0:0:1=-1 0:0:2=1 0:1:0=1 0:1:2=-1 0:2:0=1 0:2:3=-1 0:3:0=-1 0:3:1=1 1:0:2=-1 1:0:3=1 1:1:0=-1 1:1:2=1 1:2:0=1 1:2:1=-1 1:3:0=-1 1:3:1=1
longitude 0: 0:0:1=-1 0:0:3=1 0:1:0=1 0:1:2=-1 0:2:0=1 0:2:3=-1 0:3:0=-1 0:3:1=1 1:0:2=-1 1:0:3=1 1:1:0=-1 1:1:2=1 1:2:0=1 1:2:3=-1 1:3:0=-1 1:3:1=1
";

/// The Whitehead link exterior: a regular ideal octahedron cut into four
/// tetrahedra around one of its axes. Every shape is `i`. Faces 0 and 6 lie
/// on flat quadrilaterals of the canonical cell structure and have tilt 0.
pub const WHITEHEAD: &str = "tets 4 cusps 2
tet 0: 1 1023 3 1023 1 2031 2 2103
tet 1: 2 1023 0 1023 3 0321 0 1302
tet 2: 3 1023 1 1023 3 2031 0 2103
tet 3: 0 1023 2 1023 1 0321 2 1302
meridian 0: 0:0:2=-1 0:0:3=1 0:2:0=1 0:2:1=-1 1:2:1=-1 1:2:3=1 2:2:0=1 2:2:3=-1 3:2:0=1 3:2:1=-1
longitude 0: 0:0:1=1 0:0:2=-1 0:2:0=1 0:2:3=-1 0:3:0=-1 0:3:2=1 1:1:0=1 1:1:3=-1 1:2:1=-1 1:2:3=1 1:3:1=1 1:3:2=-1 2:0:1=-1 2:0:3=1 3:1:0=-1 3:1:2=1
meridian 1: 0:1:0=1 0:1:2=-1 1:0:1=-1 1:0:3=1
longitude 1: 0:1:0=-1 0:1:3=1 1:0:1=1 1:0:2=-1 2:1:0=1 2:1:3=-1 3:0:1=-1 3:0:2=1
";

/// A second two-cusped octahedral manifold, glued so that the subdividing
/// axis joins the two vertices of the smaller cusp. Its four tetrahedra are
/// the canonical cells: every tilt is about `-0.586` at equal cusp areas.
pub const TWO_CUSP_CANONICAL: &str = "tets 4 cusps 2
tet 0: 1 1023 3 1023 1 0132 2 1023
tet 1: 2 1023 0 1023 3 1023 0 0132
tet 2: 3 1023 1 1023 3 0132 0 1023
tet 3: 0 1023 2 1023 1 1023 2 0132
meridian 0: 0:0:1=1 0:0:2=-1 1:0:2=-1 1:0:3=1 3:1:0=-1 3:1:2=1
longitude 0: 0:0:2=1 0:0:3=-1 0:1:0=-1 0:1:2=1 1:0:1=1 1:0:3=-1 1:1:2=1 1:1:3=-1 2:1:0=-1 2:1:3=1 3:0:1=1 3:0:2=-1
meridian 1: 0:2:0=-1 0:2:3=1 1:2:0=-1 1:2:1=1 2:2:1=1 2:2:3=-1
longitude 1: 0:2:0=1 0:2:1=-1 0:3:0=1 0:3:2=-1 1:2:1=-1 1:2:3=1 1:3:0=1 1:3:1=-1 2:3:1=-1 2:3:2=1 3:2:0=1 3:2:3=-1
";

pub fn figure_eight() -> IdealTriangulation {
    IdealTriangulation::from_text(FIGURE_EIGHT).expect("fixture parses")
}

pub fn whitehead() -> IdealTriangulation {
    IdealTriangulation::from_text(WHITEHEAD).expect("fixture parses")
}

/// The Whitehead fixture after a 2-3 move on face 0. The new edge cuts
/// through the octahedron's axis, so the complete structure has one flat
/// tetrahedron (tet 2, shape `-1`) and no positively oriented solution.
pub fn two_cusp_canonical() -> IdealTriangulation {
    IdealTriangulation::from_text(TWO_CUSP_CANONICAL).expect("fixture parses")
}

pub fn whitehead_flat() -> IdealTriangulation {
    crate::triangulation::pachner_2_3(&whitehead(), 0).expect("face 0 admits a 2-3 move").0
}
