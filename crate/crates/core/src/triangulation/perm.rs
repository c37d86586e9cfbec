use std::fmt;
use std::str::FromStr;

/// A permutation of `{0, 1, 2, 3}`, stored as the image of `0123`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Perm4([u8; 4]);

impl Perm4 {
    pub const IDENTITY: Perm4 = Perm4([0, 1, 2, 3]);

    /// Build from an image array; `None` unless it is a bijection.
    pub fn new(images: [u8; 4]) -> Option<Perm4> {
        let mut seen = [false; 4];
        for &i in &images {
            if i > 3 || seen[i as usize] {
                return None;
            }
            seen[i as usize] = true;
        }
        Some(Perm4(images))
    }

    #[inline]
    pub fn apply(self, i: usize) -> usize {
        self.0[i] as usize
    }

    pub fn images(self) -> [u8; 4] {
        self.0
    }

    pub fn inverse(self) -> Perm4 {
        let mut inv = [0u8; 4];
        for (i, &j) in self.0.iter().enumerate() {
            inv[j as usize] = i as u8;
        }
        Perm4(inv)
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(self, other: Perm4) -> Perm4 {
        Perm4([self.0[other.0[0] as usize], self.0[other.0[1] as usize], self.0[other.0[2] as usize], self.0[other.0[3] as usize]])
    }

    pub fn is_even(self) -> bool {
        let mut inversions = 0;
        for i in 0..4 {
            for j in i + 1..4 {
                if self.0[i] > self.0[j] {
                    inversions += 1;
                }
            }
        }
        inversions % 2 == 0
    }

    /// All 24 permutations in lexicographic order of their image strings.
    pub fn all() -> impl Iterator<Item = Perm4> {
        (0..256u32).filter_map(|code| {
            let images = [(code & 3) as u8, ((code >> 2) & 3) as u8, ((code >> 4) & 3) as u8, ((code >> 6) & 3) as u8];
            Perm4::new(images)
        })
        .collect::<std::collections::BTreeSet<_>>()
        .into_iter()
    }

    /// The transposition swapping `a` and `b`.
    pub fn transposition(a: usize, b: usize) -> Perm4 {
        let mut img = [0, 1, 2, 3];
        img.swap(a, b);
        Perm4(img)
    }
}

impl fmt::Display for Perm4 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}{}{}", self.0[0], self.0[1], self.0[2], self.0[3])
    }
}

impl FromStr for Perm4 {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let digits: Vec<u8> = s.bytes().map(|b| b.wrapping_sub(b'0')).collect();
        if digits.len() != 4 {
            return Err(format!("permutation `{s}` must have four digits"));
        }
        Perm4::new([digits[0], digits[1], digits[2], digits[3]]).ok_or_else(|| format!("`{s}` is not a permutation of 0123"))
    }
}

/// Vertex pairs of the six edges of a tetrahedron.
pub const EDGE_VERTICES: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

/// Index into [`EDGE_VERTICES`] of the edge joining `a` and `b`.
pub fn edge_index(a: usize, b: usize) -> usize {
    let (a, b) = if a < b { (a, b) } else { (b, a) };
    match (a, b) {
        (0, 1) => 0,
        (0, 2) => 1,
        (0, 3) => 2,
        (1, 2) => 3,
        (1, 3) => 4,
        (2, 3) => 5,
        _ => panic!("no edge between {a} and {b}"),
    }
}

/// Which of the three shape parameters `z, z', z''` sits on edge `(a, b)`.
/// Opposite edges carry the same parameter.
pub fn shape_slot(a: usize, b: usize) -> usize {
    match edge_index(a, b) {
        0 | 5 => 0,
        1 | 4 => 1,
        _ => 2,
    }
}

/// The three vertices other than `v`, in counterclockwise order as seen from
/// `v` looking into the tetrahedron: `(v, a, b, c)` is an even permutation.
pub fn ccw_corners(v: usize) -> [usize; 3] {
    match v {
        0 => [1, 2, 3],
        1 => [0, 3, 2],
        2 => [3, 0, 1],
        3 => [2, 1, 0],
        _ => panic!("vertex index out of range"),
    }
}

/// The two vertices of `{0,1,2,3}` other than `a` and `b`, ascending.
pub fn other_two(a: usize, b: usize) -> (usize, usize) {
    let mut rest = (0..4).filter(|&x| x != a && x != b);
    (rest.next().unwrap(), rest.next().unwrap())
}
