//! Cube complexes: face gluings, the derived edge and vertex classes, and the
//! boundary subcomplex.
//!
//! A complex is a finite set of unit cubes together with a partial pairing of
//! their faces. Each gluing record identifies face `fa` of cube `a` with face
//! `fb` of cube `b` through one of the eight symmetries of the square. The
//! pairing is an involution: a record and its reverse describe the same
//! identification, and both may appear in the input as long as they agree.

use crate::cube::{self, Sym};
use crate::util::DisjointSets;
use serde::{Deserialize, Serialize};

/// One face identification. `sym` maps corner positions of `(a, fa)` to
/// corner positions of `(b, fb)` in the sense of [`cube::face_corners`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Gluing {
    pub a: usize,
    pub fa: usize,
    pub b: usize,
    pub fb: usize,
    pub sym: Sym,
}

impl Gluing {
    /// The same identification read from the other side.
    pub fn reverse(&self) -> Gluing {
        Gluing { a: self.b, fa: self.fb, b: self.a, fb: self.fa, sym: self.sym.inverse() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum BuildError {
    #[error("cube index {cube} out of range (complex has {cubes} cubes)")]
    CubeOutOfRange { cube: usize, cubes: usize },
    #[error("face index {face} on cube {cube} out of range (faces are 0..6)")]
    FaceOutOfRange { cube: usize, face: usize },
    #[error("face {face} of cube {cube} appears in more than one gluing")]
    DuplicateGluing { cube: usize, face: usize },
    #[error("gluings of face {face} of cube {cube} disagree with the reverse record")]
    InconsistentInvolution { cube: usize, face: usize },
    #[error("a complex needs at least one cube")]
    Empty,
}

/// A finite cube complex with its face pairing resolved.
#[derive(Clone, Debug)]
pub struct CubeComplex {
    cubes: usize,
    gluings: Vec<Gluing>,
    partner: Vec<[Option<(usize, usize, Sym)>; 6]>,
}

impl CubeComplex {
    /// Resolves the face pairing. Records may appear in either orientation
    /// and may repeat, as long as they never contradict each other.
    pub fn build(cubes: usize, records: &[Gluing]) -> Result<Self, BuildError> {
        if cubes == 0 {
            return Err(BuildError::Empty);
        }
        let mut partner: Vec<[Option<(usize, usize, Sym)>; 6]> = vec![[None; 6]; cubes];
        for g in records {
            for (cube, face) in [(g.a, g.fa), (g.b, g.fb)] {
                if cube >= cubes {
                    return Err(BuildError::CubeOutOfRange { cube, cubes });
                }
                if face >= 6 {
                    return Err(BuildError::FaceOutOfRange { cube, face });
                }
            }
            if (g.a, g.fa) == (g.b, g.fb) {
                // A face cannot pair with itself: the record names it twice.
                return Err(BuildError::DuplicateGluing { cube: g.a, face: g.fa });
            }
            let sides = [((g.a, g.fa), (g.b, g.fb, g.sym)), ((g.b, g.fb), (g.a, g.fa, g.sym.inverse()))];
            for ((cube, face), tgt) in sides {
                let slot = &mut partner[cube][face];
                match *slot {
                    None => *slot = Some(tgt),
                    Some(old) if old == tgt => {}
                    Some(old) if (old.0, old.1) == (tgt.0, tgt.1) => {
                        return Err(BuildError::InconsistentInvolution { cube, face });
                    }
                    Some(_) => return Err(BuildError::DuplicateGluing { cube, face }),
                }
            }
        }
        // Canonical record list: one per identified pair, lexicographic.
        let mut gluings = Vec::new();
        for (a, row) in partner.iter().enumerate() {
            for (fa, &cell) in row.iter().enumerate() {
                if let Some((b, fb, sym)) = cell {
                    if (a, fa) <= (b, fb) {
                        gluings.push(Gluing { a, fa, b, fb, sym });
                    }
                }
            }
        }
        Ok(CubeComplex { cubes, gluings, partner })
    }

    pub fn cubes(&self) -> usize {
        self.cubes
    }

    /// Canonicalised gluing list: one record per face pair, sorted by
    /// `(a, fa)` with `(a, fa) <= (b, fb)`.
    pub fn gluings(&self) -> &[Gluing] {
        &self.gluings
    }

    /// The face glued to `(cube, face)`, with the symmetry oriented from
    /// `(cube, face)` to the partner.
    pub fn partner(&self, cube: usize, face: usize) -> Option<(usize, usize, Sym)> {
        self.partner[cube][face]
    }

    pub fn is_closed(&self) -> bool {
        self.partner.iter().all(|fs| fs.iter().all(Option::is_some))
    }

    /// Unglued `(cube, face)` pairs, sorted.
    pub fn boundary_faces(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for c in 0..self.cubes {
            for f in 0..6 {
                if self.partner[c][f].is_none() {
                    out.push((c, f));
                }
            }
        }
        out
    }

    pub fn edge_id(&self, cube: usize, edge: usize) -> usize {
        cube * 12 + edge
    }

    pub fn corner_id(&self, cube: usize, corner: usize) -> usize {
        cube * 8 + corner
    }

    /// Orbits of cube-edges under the face identifications.
    pub fn edge_classes(&self) -> EdgeClasses {
        let mut ds = DisjointSets::new(self.cubes * 12);
        for a in 0..self.cubes {
            for fa in 0..6 {
                if let Some((b, fb, sym)) = self.partner[a][fa] {
                    let ea = cube::face_edges(fa);
                    let eb = cube::face_edges(fb);
                    for i in 0..4 {
                        ds.union(self.edge_id(a, ea[i]), self.edge_id(b, eb[sym.apply_edge(i)]));
                    }
                }
            }
        }
        let mut class_of = vec![0usize; self.cubes * 12];
        let mut classes = Vec::new();
        for (idx, group) in ds.groups().into_iter().enumerate() {
            let members: Vec<(usize, usize)> = group.iter().map(|&id| (id / 12, id % 12)).collect();
            let boundary = members.iter().any(|&(c, e)| {
                cube::edge_faces(e).iter().any(|&f| self.partner[c][f].is_none())
            });
            for &id in &group {
                class_of[id] = idx;
            }
            classes.push(EdgeClass { members, boundary });
        }
        EdgeClasses { class_of, classes }
    }

    /// Orbits of cube-corners under the face identifications.
    pub fn vertex_classes(&self) -> VertexClasses {
        let mut ds = DisjointSets::new(self.cubes * 8);
        for a in 0..self.cubes {
            for fa in 0..6 {
                if let Some((b, fb, sym)) = self.partner[a][fa] {
                    let ca = cube::face_corners(fa);
                    let cb = cube::face_corners(fb);
                    for i in 0..4 {
                        ds.union(self.corner_id(a, ca[i]), self.corner_id(b, cb[sym.apply(i)]));
                    }
                }
            }
        }
        let mut class_of = vec![0usize; self.cubes * 8];
        let mut classes = Vec::new();
        for (idx, group) in ds.groups().into_iter().enumerate() {
            let members: Vec<(usize, usize)> = group.iter().map(|&id| (id / 8, id % 8)).collect();
            let boundary = members.iter().any(|&(c, v)| {
                cube::corner_faces(v).iter().any(|&f| self.partner[c][f].is_none())
            });
            for &id in &group {
                class_of[id] = idx;
            }
            classes.push(VertexClass { members, boundary });
        }
        VertexClasses { class_of, classes }
    }

    /// Connected components of the unglued-face surface, with the counts that
    /// give its Euler characteristic.
    pub fn boundary_components(
        &self,
        edges: &EdgeClasses,
        verts: &VertexClasses,
    ) -> Vec<BoundaryComponent> {
        let faces = self.boundary_faces();
        let face_idx: std::collections::HashMap<(usize, usize), usize> =
            faces.iter().copied().enumerate().map(|(i, cf)| (cf, i)).collect();
        let mut ds = DisjointSets::new(faces.len());
        // Free sides per boundary edge class; each class has exactly two,
        // which are the two boundary faces meeting along it.
        let mut free_sides: Vec<Vec<usize>> = vec![Vec::new(); edges.classes().len()];
        for &(c, f) in &faces {
            for &e in &cube::face_edges(f) {
                free_sides[edges.class_of(c, e)].push(face_idx[&(c, f)]);
            }
        }
        for (cls, sides) in free_sides.iter().enumerate() {
            debug_assert!(
                sides.is_empty() || sides.len() == 2,
                "boundary edge class {cls} has {} free sides",
                sides.len()
            );
            if let [a, b] = sides[..] {
                ds.union(a, b);
            }
        }
        let mut out = Vec::new();
        for group in ds.groups() {
            let comp_faces: Vec<(usize, usize)> = group.iter().map(|&i| faces[i]).collect();
            let mut edge_cls: Vec<usize> = Vec::new();
            let mut vert_cls: Vec<usize> = Vec::new();
            for &(c, f) in &comp_faces {
                for &e in &cube::face_edges(f) {
                    edge_cls.push(edges.class_of(c, e));
                }
                for &v in &cube::face_corners(f) {
                    vert_cls.push(verts.class_of(c, v));
                }
            }
            edge_cls.sort_unstable();
            edge_cls.dedup();
            vert_cls.sort_unstable();
            vert_cls.dedup();
            let euler =
                vert_cls.len() as i64 - edge_cls.len() as i64 + comp_faces.len() as i64;
            out.push(BoundaryComponent {
                faces: comp_faces,
                edge_classes: edge_cls,
                vertex_classes: vert_cls,
                euler,
            });
        }
        out
    }
}

/// An identified edge of the complex. The degree of an interior class is the
/// number of cube-edges around it, which equals `members.len()`.
#[derive(Clone, Debug)]
pub struct EdgeClass {
    /// `(cube, edge)` members, sorted.
    pub members: Vec<(usize, usize)>,
    /// True when some member lies on an unglued face.
    pub boundary: bool,
}

impl EdgeClass {
    pub fn degree(&self) -> usize {
        self.members.len()
    }
}

#[derive(Clone, Debug)]
pub struct EdgeClasses {
    class_of: Vec<usize>,
    classes: Vec<EdgeClass>,
}

impl EdgeClasses {
    pub fn class_of(&self, cube: usize, edge: usize) -> usize {
        self.class_of[cube * 12 + edge]
    }

    pub fn classes(&self) -> &[EdgeClass] {
        &self.classes
    }
}

/// An identified vertex of the complex.
#[derive(Clone, Debug)]
pub struct VertexClass {
    /// `(cube, corner)` members, sorted.
    pub members: Vec<(usize, usize)>,
    /// True when some member lies on an unglued face.
    pub boundary: bool,
}

#[derive(Clone, Debug)]
pub struct VertexClasses {
    class_of: Vec<usize>,
    classes: Vec<VertexClass>,
}

impl VertexClasses {
    pub fn class_of(&self, cube: usize, corner: usize) -> usize {
        self.class_of[cube * 8 + corner]
    }

    pub fn classes(&self) -> &[VertexClass] {
        &self.classes
    }
}

/// One connected component of the unglued-face surface.
#[derive(Clone, Debug)]
pub struct BoundaryComponent {
    pub faces: Vec<(usize, usize)>,
    pub edge_classes: Vec<usize>,
    pub vertex_classes: Vec<usize>,
    pub euler: i64,
}

/// Small complexes used across the test suite and as shipped examples.
pub mod fixtures {
    use super::*;

    pub fn glue(a: usize, fa: usize, b: usize, fb: usize, sym: &str) -> Gluing {
        Gluing { a, fa, b, fb, sym: sym.parse().unwrap() }
    }

    /// One cube, opposite faces identified by translation: the 3-torus.
    pub fn t3() -> CubeComplex {
        CubeComplex::build(
            1,
            &[glue(0, 0, 0, 3, "id"), glue(0, 1, 0, 4, "id"), glue(0, 2, 0, 5, "id")],
        )
        .unwrap()
    }

    /// Two cubes glued along a single face; everything else free.
    pub fn twocube() -> CubeComplex {
        CubeComplex::build(2, &[glue(0, 5, 1, 2, "id")]).unwrap()
    }

    /// Two cubes stacked into a circle along the third axis, the other two
    /// axes self-identified per cube: a 3-torus cut into two slabs.
    pub fn stack(n: usize) -> CubeComplex {
        let mut gs = Vec::new();
        for c in 0..n {
            gs.push(glue(c, 0, c, 3, "id"));
            gs.push(glue(c, 1, c, 4, "id"));
            gs.push(glue(c, 5, (c + 1) % n, 2, "id"));
        }
        CubeComplex::build(n, &gs).unwrap()
    }

    /// Three cubes glued in a cyclic book around one shared edge, which ends
    /// up interior with degree 3. All other faces are free.
    pub fn deg3ring() -> CubeComplex {
        CubeComplex::build(
            3,
            &[glue(0, 1, 1, 0, "id"), glue(1, 1, 2, 0, "id"), glue(2, 1, 0, 0, "id")],
        )
        .unwrap()
    }

    /// One cube with the given face pairings.
    pub fn one_cube(pairings: &[(usize, usize, &str)]) -> CubeComplex {
        let gs: Vec<Gluing> = pairings.iter().map(|&(fa, fb, s)| glue(0, fa, 0, fb, s)).collect();
        CubeComplex::build(1, &gs).unwrap()
    }

    /// Two disjoint copies of the one-cube 3-torus.
    pub fn two_t3() -> CubeComplex {
        let mut gs = Vec::new();
        for c in 0..2 {
            for a in 0..3 {
                gs.push(glue(c, a, c, a + 3, "id"));
            }
        }
        CubeComplex::build(2, &gs).unwrap()
    }

    /// Two cubes glued along all six corresponding faces: every edge class is
    /// interior with degree 2.
    pub fn doublecube() -> CubeComplex {
        let gs: Vec<Gluing> = (0..6).map(|f| glue(0, f, 1, f, "id")).collect();
        CubeComplex::build(2, &gs).unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;
    use std::collections::BTreeSet;

    /// Independent oracle: chase the wedge walk around one cube-edge germ by
    /// germ, instead of unioning all face identifications at once. Returns
    /// the cube-edges visited and whether the walk closed into a cycle.
    fn wedge_orbit(
        c: &CubeComplex,
        start_cube: usize,
        start_edge: usize,
    ) -> (BTreeSet<(usize, usize)>, bool) {
        let sides = cube::edge_faces(start_edge);
        let mut seen = BTreeSet::new();
        seen.insert((start_cube, start_edge));
        let mut closed = true;
        'dirs: for dir in 0..2 {
            let mut cur = (start_cube, start_edge, sides[dir]);
            loop {
                let (q, e, exit) = cur;
                let Some((q2, f2, s)) = c.partner(q, exit) else {
                    closed = false;
                    break;
                };
                let i = cube::face_edge_position(exit, e).unwrap();
                let e2 = cube::face_edges(f2)[s.apply_edge(i)];
                let ef = cube::edge_faces(e2);
                let exit2 = if ef[0] == f2 { ef[1] } else { ef[0] };
                if (q2, e2, exit2) == (start_cube, start_edge, sides[0]) {
                    break 'dirs;
                }
                seen.insert((q2, e2));
                cur = (q2, e2, exit2);
            }
        }
        (seen, closed)
    }

    fn check_against_oracle(c: &CubeComplex) {
        let ec = c.edge_classes();
        for cube in 0..c.cubes() {
            for edge in 0..12 {
                let (orbit, closed) = wedge_orbit(c, cube, edge);
                let cls = &ec.classes()[ec.class_of(cube, edge)];
                let members: BTreeSet<(usize, usize)> = cls.members.iter().copied().collect();
                assert_eq!(orbit, members, "orbit mismatch at ({cube}, {edge})");
                assert_eq!(closed, !cls.boundary, "boundary mismatch at ({cube}, {edge})");
            }
        }
    }

    #[test]
    fn t3_classes() {
        let c = t3();
        assert!(c.is_closed());
        let ec = c.edge_classes();
        assert_eq!(ec.classes().len(), 3);
        for cls in ec.classes() {
            assert_eq!(cls.degree(), 4);
            assert!(!cls.boundary);
        }
        let vc = c.vertex_classes();
        assert_eq!(vc.classes().len(), 1);
        assert_eq!(vc.classes()[0].members.len(), 8);
        assert!(!vc.classes()[0].boundary);
        check_against_oracle(&c);
    }

    #[test]
    fn unglued_cube_classes() {
        let c = CubeComplex::build(1, &[]).unwrap();
        assert!(!c.is_closed());
        assert_eq!(c.boundary_faces().len(), 6);
        let ec = c.edge_classes();
        assert_eq!(ec.classes().len(), 12);
        assert!(ec.classes().iter().all(|cl| cl.boundary && cl.degree() == 1));
        let vc = c.vertex_classes();
        assert_eq!(vc.classes().len(), 8);
        let bd = c.boundary_components(&ec, &vc);
        assert_eq!(bd.len(), 1);
        assert_eq!(bd[0].euler, 2);
        check_against_oracle(&c);
    }

    #[test]
    fn twocube_classes() {
        let c = twocube();
        let ec = c.edge_classes();
        assert_eq!(ec.classes().len(), 20);
        let merged: Vec<_> = ec.classes().iter().filter(|cl| cl.degree() == 2).collect();
        assert_eq!(merged.len(), 4);
        assert!(merged.iter().all(|cl| cl.boundary));
        let vc = c.vertex_classes();
        assert_eq!(vc.classes().len(), 12);
        let bd = c.boundary_components(&ec, &vc);
        assert_eq!(bd.len(), 1);
        assert_eq!(bd[0].faces.len(), 10);
        assert_eq!(bd[0].euler, 2);
        check_against_oracle(&c);
    }

    #[test]
    fn stack2_classes() {
        let c = stack(2);
        assert!(c.is_closed());
        let ec = c.edge_classes();
        assert_eq!(ec.classes().len(), 6);
        assert!(ec.classes().iter().all(|cl| cl.degree() == 4 && !cl.boundary));
        let vc = c.vertex_classes();
        assert_eq!(vc.classes().len(), 2);
        assert!(vc.classes().iter().all(|cl| cl.members.len() == 8));
        check_against_oracle(&c);
    }

    #[test]
    fn stack3_classes() {
        let c = stack(3);
        assert!(c.is_closed());
        let ec = c.edge_classes();
        assert_eq!(ec.classes().len(), 9);
        assert!(ec.classes().iter().all(|cl| cl.degree() == 4));
        check_against_oracle(&c);
    }

    #[test]
    fn deg3ring_has_degree_three_interior_edge() {
        let c = deg3ring();
        let ec = c.edge_classes();
        let interior: Vec<_> = ec.classes().iter().filter(|cl| !cl.boundary).collect();
        assert_eq!(interior.len(), 1);
        assert_eq!(interior[0].degree(), 3);
        let members: BTreeSet<_> = interior[0].members.iter().copied().collect();
        assert_eq!(members, BTreeSet::from([(0, 8), (1, 8), (2, 8)]));
        check_against_oracle(&c);
    }

    #[test]
    fn doublecube_classes() {
        let c = doublecube();
        assert!(c.is_closed());
        let ec = c.edge_classes();
        assert_eq!(ec.classes().len(), 12);
        assert!(ec.classes().iter().all(|cl| cl.degree() == 2 && !cl.boundary));
        check_against_oracle(&c);
    }

    #[test]
    fn degree_sum_closed() {
        for c in [t3(), stack(2), stack(3), doublecube()] {
            let total: usize = c.edge_classes().classes().iter().map(|cl| cl.degree()).sum();
            assert_eq!(total, 12 * c.cubes());
        }
    }

    #[test]
    fn reverse_records_same_complex() {
        let records =
            [glue(0, 0, 0, 3, "id"), glue(0, 1, 0, 4, "id"), glue(0, 2, 0, 5, "id")];
        let reversed: Vec<Gluing> = records.iter().map(Gluing::reverse).collect();
        let a = CubeComplex::build(1, &records).unwrap();
        let b = CubeComplex::build(1, &reversed).unwrap();
        assert_eq!(a.gluings(), b.gluings());
        // Duplicating records (both orientations at once) is also fine.
        let mut both = records.to_vec();
        both.extend(reversed);
        let c = CubeComplex::build(1, &both).unwrap();
        assert_eq!(a.gluings(), c.gluings());
    }

    #[test]
    fn relabelling_invariance() {
        // stack(3) with cubes renamed by the cycle 0 -> 1 -> 2 -> 0.
        let perm = [1, 2, 0];
        let mut gs = Vec::new();
        for c in 0..3 {
            gs.push(glue(perm[c], 0, perm[c], 3, "id"));
            gs.push(glue(perm[c], 1, perm[c], 4, "id"));
            gs.push(glue(perm[c], 5, perm[(c + 1) % 3], 2, "id"));
        }
        let a = stack(3);
        let b = CubeComplex::build(3, &gs).unwrap();
        let degs = |c: &CubeComplex| {
            let mut d: Vec<usize> =
                c.edge_classes().classes().iter().map(|cl| cl.degree()).collect();
            d.sort_unstable();
            d
        };
        assert_eq!(degs(&a), degs(&b));
        assert_eq!(a.vertex_classes().classes().len(), b.vertex_classes().classes().len());
    }

    #[test]
    fn build_errors() {
        assert_eq!(CubeComplex::build(0, &[]).err(), Some(BuildError::Empty));
        // Same face glued to two different targets.
        let e = CubeComplex::build(3, &[glue(0, 0, 1, 0, "id"), glue(0, 0, 2, 0, "id")]);
        assert_eq!(e.err(), Some(BuildError::DuplicateGluing { cube: 0, face: 0 }));
        // Record and reverse disagree on the symmetry.
        let e = CubeComplex::build(2, &[glue(0, 0, 1, 0, "r90"), glue(1, 0, 0, 0, "r90")]);
        assert_eq!(e.err(), Some(BuildError::InconsistentInvolution { cube: 1, face: 0 }));
        // A face glued to itself.
        let e = CubeComplex::build(1, &[glue(0, 2, 0, 2, "r180")]);
        assert_eq!(e.err(), Some(BuildError::DuplicateGluing { cube: 0, face: 2 }));
        let e = CubeComplex::build(1, &[glue(0, 0, 1, 3, "id")]);
        assert_eq!(e.err(), Some(BuildError::CubeOutOfRange { cube: 1, cubes: 1 }));
        let e = CubeComplex::build(1, &[glue(0, 6, 0, 3, "id")]);
        assert_eq!(e.err(), Some(BuildError::FaceOutOfRange { cube: 0, face: 6 }));
    }
}
