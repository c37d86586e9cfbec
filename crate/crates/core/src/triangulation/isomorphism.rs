//! Combinatorial isomorphisms between triangulations.
//!
//! A candidate is seeded by choosing the image of tetrahedron 0 together with
//! a vertex permutation, then propagated across the face-pairing graph; the
//! first inconsistency discards the seed. Connectedness makes the seed
//! determine the whole map, so `24 * |tets|` seeds enumerate everything.

use std::collections::VecDeque;

use serde::Serialize;

use super::{IdealTriangulation, Perm4};

/// Tetrahedron `t` of the source goes to `tet_map[t]` with vertices relabelled
/// by `vertex_maps[t]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CombinatorialIsomorphism {
    pub tet_map: Vec<usize>,
    pub vertex_maps: Vec<Perm4>,
}

impl CombinatorialIsomorphism {
    pub fn identity(num_tets: usize) -> Self {
        CombinatorialIsomorphism { tet_map: (0..num_tets).collect(), vertex_maps: vec![Perm4::IDENTITY; num_tets] }
    }

    pub fn is_identity(&self) -> bool {
        self.tet_map.iter().enumerate().all(|(i, &t)| i == t) && self.vertex_maps.iter().all(|&p| p == Perm4::IDENTITY)
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &CombinatorialIsomorphism) -> CombinatorialIsomorphism {
        let tet_map = other.tet_map.iter().map(|&t| self.tet_map[t]).collect();
        let vertex_maps = other.tet_map.iter().zip(&other.vertex_maps).map(|(&t, &p)| self.vertex_maps[t].compose(p)).collect();
        CombinatorialIsomorphism { tet_map, vertex_maps }
    }

    pub fn inverse(&self) -> CombinatorialIsomorphism {
        let n = self.tet_map.len();
        let mut tet_map = vec![0; n];
        let mut vertex_maps = vec![Perm4::IDENTITY; n];
        for t in 0..n {
            tet_map[self.tet_map[t]] = t;
            vertex_maps[self.tet_map[t]] = self.vertex_maps[t].inverse();
        }
        CombinatorialIsomorphism { tet_map, vertex_maps }
    }

    /// Whether every vertex permutation is even.
    pub fn preserves_orientation(&self) -> bool {
        self.vertex_maps.iter().all(|p| p.is_even())
    }

    /// Checks that the map commutes with every gluing.
    pub fn is_valid(&self, from: &IdealTriangulation, to: &IdealTriangulation) -> bool {
        if from.num_tets() != to.num_tets() || self.tet_map.len() != from.num_tets() {
            return false;
        }
        let mut hit = vec![false; to.num_tets()];
        for &t in &self.tet_map {
            if t >= to.num_tets() || hit[t] {
                return false;
            }
            hit[t] = true;
        }
        (0..from.num_tets()).all(|t| {
            let pi = self.vertex_maps[t];
            (0..4).all(|f| {
                let nb = from.neighbor(t, f);
                let sigma = from.gluing(t, f);
                let img = self.tet_map[t];
                let img_face = pi.apply(f);
                to.neighbor(img, img_face) == self.tet_map[nb]
                    && to.gluing(img, img_face).compose(pi) == self.vertex_maps[nb].compose(sigma)
            })
        })
    }

    /// Cusp permutation induced on `from`'s cusps.
    pub fn cusp_map(&self, from: &IdealTriangulation, to: &IdealTriangulation) -> Vec<usize> {
        let mut out = vec![usize::MAX; from.num_cusps()];
        for t in 0..from.num_tets() {
            for v in 0..4 {
                out[from.cusp_of(t, v)] = to.cusp_of(self.tet_map[t], self.vertex_maps[t].apply(v));
            }
        }
        out
    }
}

impl Serialize for CombinatorialIsomorphism {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut s = serializer.serialize_struct("CombinatorialIsomorphism", 2)?;
        s.serialize_field("tet_map", &self.tet_map)?;
        s.serialize_field("vertex_maps", &self.vertex_maps.iter().map(|p| p.to_string()).collect::<Vec<_>>())?;
        s.end()
    }
}

fn propagate(from: &IdealTriangulation, to: &IdealTriangulation, image: usize, perm: Perm4) -> Option<CombinatorialIsomorphism> {
    let n = from.num_tets();
    let mut tet_map = vec![usize::MAX; n];
    let mut vertex_maps = vec![Perm4::IDENTITY; n];
    let mut used = vec![false; n];
    tet_map[0] = image;
    vertex_maps[0] = perm;
    used[image] = true;
    let mut queue = VecDeque::from([0]);
    while let Some(t) = queue.pop_front() {
        let pi = vertex_maps[t];
        let img = tet_map[t];
        for f in 0..4 {
            let nb = from.neighbor(t, f);
            let sigma = from.gluing(t, f);
            let img_face = pi.apply(f);
            let img_nb = to.neighbor(img, img_face);
            // nb must map to img_nb with vertices relabelled so the square commutes.
            let nb_perm = to.gluing(img, img_face).compose(pi).compose(sigma.inverse());
            if tet_map[nb] == usize::MAX {
                if used[img_nb] {
                    return None;
                }
                tet_map[nb] = img_nb;
                vertex_maps[nb] = nb_perm;
                used[img_nb] = true;
                queue.push_back(nb);
            } else if tet_map[nb] != img_nb || vertex_maps[nb] != nb_perm {
                return None;
            }
        }
    }
    Some(CombinatorialIsomorphism { tet_map, vertex_maps })
}

/// All combinatorial isomorphisms `from → to`, sorted. Peripheral curves are
/// ignored.
pub fn enumerate_isomorphisms(from: &IdealTriangulation, to: &IdealTriangulation) -> Vec<CombinatorialIsomorphism> {
    if from.num_tets() != to.num_tets() || from.num_cusps() != to.num_cusps() {
        return Vec::new();
    }
    let mut out: Vec<_> = (0..to.num_tets())
        .flat_map(|image| Perm4::all().map(move |perm| (image, perm)))
        .filter_map(|(image, perm)| propagate(from, to, image, perm))
        .collect();
    out.sort();
    out.dedup();
    out
}

pub fn is_isomorphic(a: &IdealTriangulation, b: &IdealTriangulation) -> bool {
    if a.num_tets() != b.num_tets() || a.num_cusps() != b.num_cusps() || {
        let mut va = a.edge_valences();
        let mut vb = b.edge_valences();
        va.sort_unstable();
        vb.sort_unstable();
        va != vb
    } {
        return false;
    }
    (0..b.num_tets()).any(|image| Perm4::all().any(|perm| propagate(a, b, image, perm).is_some()))
}
