//! Vertex links: the triangulated surfaces seen at the vertices of a cube
//! complex.
//!
//! Each cube-corner incident to a vertex class contributes one triangle.
//! The triangle at corner `c` of cube `q` has its vertices on the three
//! edges through `c` (the germs, indexed by edge axis) and its sides on the
//! three faces through `c` (indexed by face axis); the side on the face of
//! axis `a` joins the two germs whose axes differ from `a`. Face gluings
//! pair triangle sides, and the identified complex is the link.

use crate::complex::{CubeComplex, VertexClasses};
use crate::cube;
use crate::emap::EMap;
use crate::util::DisjointSets;
use std::collections::HashMap;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum LinkError {
    #[error("vertex class {vertex} out of range ({classes} classes)")]
    VertexOutOfRange { vertex: usize, classes: usize },
    #[error("link of vertex class {vertex} has {free} free sides but the vertex is not on the boundary")]
    NotClosedLink { vertex: usize, free: usize },
}

/// How one triangle side is glued to another.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct SidePairing {
    t2: usize,
    af2: usize,
    /// Image axes in `t2` of the side's two germs, listed for the germ axes
    /// of this side in ascending order.
    germ_to: [usize; 2],
}

/// The two germ axes on the side of face-axis `af`, ascending.
const fn other_axes(af: usize) -> [usize; 2] {
    match af {
        0 => [1, 2],
        1 => [0, 2],
        _ => [0, 1],
    }
}

/// Side traversal in the positive boundary cycle g0 -> g1 -> g2 -> g0:
/// the side of face-axis `af` is walked from germ `DIRECTED[af].0` to germ
/// `DIRECTED[af].1`.
const DIRECTED: [(usize, usize); 3] = [(1, 2), (2, 0), (0, 1)];

#[derive(Clone, Debug)]
pub struct VertexLink {
    vertex: usize,
    boundary_vertex: bool,
    /// One `(cube, corner)` per triangle.
    triangles: Vec<(usize, usize)>,
    paired: Vec<[Option<SidePairing>; 3]>,
    /// Link vertex id per `(triangle, edge axis)`.
    germ_class: Vec<[usize; 3]>,
    germ_members: Vec<Vec<(usize, usize)>>,
    /// Link edge id per `(triangle, face axis)`.
    side_class: Vec<[usize; 3]>,
    side_members: Vec<Vec<(usize, usize)>>,
    free_sides: Vec<(usize, usize)>,
}

/// The link with its sphere embedding, when one exists.
#[derive(Clone, Debug)]
pub struct LinkMap {
    pub map: EMap,
    /// Dart `d` is the side `dart_side[d] = (triangle, face axis)`; edge
    /// `d / 2` of the map is the link edge of the same index.
    pub dart_side: Vec<(usize, usize)>,
    /// Orientation sign per triangle found by the propagation.
    pub orientation: Vec<i8>,
}

impl VertexLink {
    pub fn build(c: &CubeComplex, verts: &VertexClasses, vertex: usize) -> VertexLink {
        let class = &verts.classes()[vertex];
        let triangles = class.members.clone();
        let tri_idx: HashMap<(usize, usize), usize> =
            triangles.iter().copied().enumerate().map(|(i, qc)| (qc, i)).collect();
        let n = triangles.len();
        let mut paired: Vec<[Option<SidePairing>; 3]> = vec![[None; 3]; n];
        for (t, &(q, corner)) in triangles.iter().enumerate() {
            for (af, f) in cube::corner_faces(corner).into_iter().enumerate() {
                let Some((q2, f2, s)) = c.partner(q, f) else { continue };
                let i = cube::face_corner_position(f, corner).unwrap();
                let c2 = cube::face_corners(f2)[s.apply(i)];
                let t2 = tri_idx[&(q2, c2)];
                let af2 = cube::face_axis(f2);
                let mut germ_to = [0; 2];
                for (slot, &b) in other_axes(af).iter().enumerate() {
                    let e = cube::corner_edges(corner)[b];
                    let j = cube::face_edge_position(f, e).unwrap();
                    let e2 = cube::face_edges(f2)[s.apply_edge(j)];
                    debug_assert!(cube::edge_corners(e2).contains(&c2));
                    germ_to[slot] = cube::edge_axis(e2);
                }
                paired[t][af] = Some(SidePairing { t2, af2, germ_to });
            }
        }
        // The pairing is an involution because the reverse gluing carries the
        // inverse symmetry.
        #[cfg(debug_assertions)]
        for t in 0..n {
            for af in 0..3 {
                if let Some(p) = paired[t][af] {
                    let back = paired[p.t2][p.af2].unwrap();
                    debug_assert_eq!((back.t2, back.af2), (t, af));
                }
            }
        }

        let mut side_ds = DisjointSets::new(3 * n);
        let mut germ_ds = DisjointSets::new(3 * n);
        for (t, row) in paired.iter().enumerate() {
            for (af, &cell) in row.iter().enumerate() {
                if let Some(p) = cell {
                    side_ds.union(3 * t + af, 3 * p.t2 + p.af2);
                    for (slot, &b) in other_axes(af).iter().enumerate() {
                        germ_ds.union(3 * t + b, 3 * p.t2 + p.germ_to[slot]);
                    }
                }
            }
        }
        let mut side_class = vec![[0usize; 3]; n];
        let mut side_members = Vec::new();
        for (k, group) in side_ds.groups().into_iter().enumerate() {
            debug_assert!(group.len() <= 2);
            let members: Vec<(usize, usize)> = group.iter().map(|&id| (id / 3, id % 3)).collect();
            for &(t, af) in &members {
                side_class[t][af] = k;
            }
            side_members.push(members);
        }
        let mut germ_class = vec![[0usize; 3]; n];
        let mut germ_members = Vec::new();
        for (k, group) in germ_ds.groups().into_iter().enumerate() {
            let members: Vec<(usize, usize)> = group.iter().map(|&id| (id / 3, id % 3)).collect();
            for &(t, b) in &members {
                germ_class[t][b] = k;
            }
            germ_members.push(members);
        }
        let mut free_sides = Vec::new();
        for (t, row) in paired.iter().enumerate() {
            for (af, cell) in row.iter().enumerate() {
                if cell.is_none() {
                    free_sides.push((t, af));
                }
            }
        }
        VertexLink {
            vertex,
            boundary_vertex: class.boundary,
            triangles,
            paired,
            germ_class,
            germ_members,
            side_class,
            side_members,
            free_sides,
        }
    }

    pub fn vertex(&self) -> usize {
        self.vertex
    }

    pub fn triangles(&self) -> &[(usize, usize)] {
        &self.triangles
    }

    pub fn link_vertices(&self) -> usize {
        self.germ_members.len()
    }

    pub fn link_edges(&self) -> usize {
        self.side_members.len()
    }

    pub fn germ_class(&self, triangle: usize, edge_axis: usize) -> usize {
        self.germ_class[triangle][edge_axis]
    }

    pub fn germ_members(&self, class: usize) -> &[(usize, usize)] {
        &self.germ_members[class]
    }

    pub fn side_class(&self, triangle: usize, face_axis: usize) -> usize {
        self.side_class[triangle][face_axis]
    }

    pub fn free_sides(&self) -> &[(usize, usize)] {
        &self.free_sides
    }

    pub fn is_interior(&self) -> bool {
        self.free_sides.is_empty()
    }

    /// Endpoints of a link edge as germ classes, smaller first.
    pub fn link_edge_endpoints(&self, k: usize) -> (usize, usize) {
        let (t, af) = self.side_members[k][0];
        let [b0, b1] = other_axes(af);
        let (u, v) = (self.germ_class[t][b0], self.germ_class[t][b1]);
        (u.min(v), u.max(v))
    }

    pub fn euler(&self) -> i64 {
        self.germ_members.len() as i64 - self.side_members.len() as i64
            + self.triangles.len() as i64
    }

    pub fn connected(&self) -> bool {
        let n = self.triangles.len();
        if n == 0 {
            return true;
        }
        let mut ds = DisjointSets::new(n);
        for t in 0..n {
            for af in 0..3 {
                if let Some(p) = self.paired[t][af] {
                    ds.union(t, p.t2);
                }
            }
        }
        ds.groups().len() == 1
    }

    /// Closed, connected, Euler characteristic 2: the only closed surface
    /// with that characteristic is the sphere.
    pub fn is_sphere(&self) -> bool {
        self.is_interior() && self.connected() && self.euler() == 2
    }

    /// Per-triangle orientation signs making all side pairings reverse the
    /// induced boundary directions, or None when no assignment exists.
    pub fn orient(&self) -> Option<Vec<i8>> {
        let n = self.triangles.len();
        let mut or = vec![0i8; n];
        for start in 0..n {
            if or[start] != 0 {
                continue;
            }
            or[start] = 1;
            let mut queue = vec![start];
            while let Some(t) = queue.pop() {
                for (af, &cell) in self.paired[t].iter().enumerate() {
                    let Some(p) = cell else { continue };
                    let (fu, fv) = DIRECTED[af];
                    let (u, v) = if or[t] == 1 { (fu, fv) } else { (fv, fu) };
                    let image = |b: usize| {
                        let slot = other_axes(af).iter().position(|&x| x == b).unwrap();
                        p.germ_to[slot]
                    };
                    let (mu, mv) = (image(u), image(v));
                    let (pu, pv) = DIRECTED[p.af2];
                    let need = if (pu, pv) == (mv, mu) {
                        1
                    } else {
                        debug_assert_eq!((pu, pv), (mu, mv));
                        -1
                    };
                    if or[p.t2] == 0 {
                        or[p.t2] = need;
                        queue.push(p.t2);
                    } else if or[p.t2] != need {
                        return None;
                    }
                }
            }
        }
        Some(or)
    }

    /// The link as a combinatorial map on its sphere (or other oriented
    /// surface). None when the link has free sides or is not orientable.
    pub fn oriented_map(&self) -> Option<LinkMap> {
        if !self.is_interior() {
            return None;
        }
        let or = self.orient()?;
        let m = self.side_members.len();
        let mut dart_of: HashMap<(usize, usize), usize> = HashMap::new();
        let mut dart_side = vec![(0usize, 0usize); 2 * m];
        for (k, members) in self.side_members.iter().enumerate() {
            debug_assert_eq!(members.len(), 2);
            for (slot, &side) in members.iter().enumerate() {
                dart_of.insert(side, 2 * k + slot);
                dart_side[2 * k + slot] = side;
            }
        }
        let mut phi = vec![0usize; 2 * m];
        for (t, &sign) in or.iter().enumerate() {
            // Face-axis order of the sides along the boundary cycle.
            let order = if sign == 1 { [2, 0, 1] } else { [1, 0, 2] };
            for i in 0..3 {
                let d = dart_of[&(t, order[i])];
                phi[d] = dart_of[&(t, order[(i + 1) % 3])];
            }
        }
        let sigma: Vec<usize> = (0..2 * m).map(|d| phi[d ^ 1]).collect();
        let map = EMap::new(sigma).expect("phi is a permutation, so sigma is too");
        debug_assert_eq!(map.faces().len(), self.triangles.len());
        debug_assert_eq!(map.vertices().len(), self.germ_members.len());
        Some(LinkMap { map, dart_side, orientation: or })
    }

    /// Enumerates 3-cycles on distinct link vertices through distinct link
    /// edges, and finds those not bounding a triangle of the link.
    pub fn three_cycle_check(&self) -> ThreeCycleReport {
        let m = self.side_members.len();
        let ends: Vec<(usize, usize)> = (0..m).map(|k| self.link_edge_endpoints(k)).collect();
        let mut bounding: Vec<[usize; 3]> = self
            .side_class
            .iter()
            .map(|s| {
                let mut tri = *s;
                tri.sort_unstable();
                tri
            })
            .collect();
        bounding.sort_unstable();
        bounding.dedup();
        let mut cycles = 0;
        let mut non_bounding = Vec::new();
        for k1 in 0..m {
            for k2 in k1 + 1..m {
                for k3 in k2 + 1..m {
                    let mut verts = [ends[k1].0, ends[k1].1, ends[k2].0, ends[k2].1, ends[k3].0, ends[k3].1];
                    verts.sort_unstable();
                    // A genuine triangle touches exactly 3 vertices twice each
                    // and uses no loop edge.
                    let triangle = verts[0] == verts[1]
                        && verts[2] == verts[3]
                        && verts[4] == verts[5]
                        && verts[1] != verts[2]
                        && verts[3] != verts[4]
                        && ends[k1].0 != ends[k1].1
                        && ends[k2].0 != ends[k2].1
                        && ends[k3].0 != ends[k3].1;
                    if !triangle {
                        continue;
                    }
                    cycles += 1;
                    let key = [k1, k2, k3];
                    if bounding.binary_search(&key).is_err() {
                        non_bounding.push(key);
                    }
                }
            }
        }
        ThreeCycleReport { cycles, non_bounding }
    }

    /// Loop edges and distinct parallel edge pairs of the link 1-skeleton.
    pub fn simplicity_check(&self) -> SimplicityReport {
        let m = self.side_members.len();
        let mut loops = Vec::new();
        let mut by_ends: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
        for k in 0..m {
            let (u, v) = self.link_edge_endpoints(k);
            if u == v {
                loops.push(k);
            } else {
                by_ends.entry((u, v)).or_default().push(k);
            }
        }
        let mut parallel: Vec<(usize, usize)> = Vec::new();
        for (_, ks) in by_ends {
            if ks.len() > 1 {
                for w in ks.windows(2) {
                    parallel.push((w[0], w[1]));
                }
            }
        }
        parallel.sort_unstable();
        SimplicityReport { loops, parallel }
    }
}

#[derive(Clone, Debug)]
pub struct ThreeCycleReport {
    pub cycles: usize,
    pub non_bounding: Vec<[usize; 3]>,
}

#[derive(Clone, Debug)]
pub struct SimplicityReport {
    pub loops: Vec<usize>,
    pub parallel: Vec<(usize, usize)>,
}

/// Builds the link of a vertex class, checking the class is in range and
/// that a vertex away from the boundary really closes up.
pub fn vertex_link(
    c: &CubeComplex,
    verts: &VertexClasses,
    vertex: usize,
) -> Result<VertexLink, LinkError> {
    if vertex >= verts.classes().len() {
        return Err(LinkError::VertexOutOfRange { vertex, classes: verts.classes().len() });
    }
    let link = VertexLink::build(c, verts, vertex);
    if !link.boundary_vertex && !link.is_interior() {
        return Err(LinkError::NotClosedLink { vertex, free: link.free_sides.len() });
    }
    Ok(link)
}
