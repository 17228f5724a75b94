//! Reduction engine for arc-and-loop diagrams in a disk.
//!
//! A [`DiskGraph`] records a graph properly embedded in a disk: arcs end at
//! slots on the boundary circle, interior vertices are either transverse
//! crossings of two strands or T-junctions where a higher-labelled strand
//! ends on a lower-labelled one, and bare circles are tracked as a count.
//! The engine repeatedly locates a small complementary face and removes it.
//! An empty final graph certifies that the whole configuration can be
//! simplified away; a nonempty graph admitting no move is reported as stuck,
//! with the trace showing the obstruction.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::emap::EMap;
use crate::util::DisjointSets;

/// Which vertex discipline and complexity measure the engine runs under.
///
/// `Crossings` admits only degree-4 transverse crossings and measures
/// progress by vertex count then edge count. `Tees` admits only degree-3
/// T-junctions and measures progress by per-label vertex counts, highest
/// label first.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Crossings,
    Tees,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VertexKind {
    /// Transverse crossing of two strands. Ports 0 and 2 continue one
    /// strand, ports 1 and 3 the other.
    Degree4,
    /// T-junction. Port 0 carries the distinguished higher-label edge that
    /// ends here; ports 1 and 2 continue the lower strand through.
    Tee,
}

/// One endpoint of an edge: a boundary slot or a port of an interior vertex.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum End {
    Slot(usize),
    Port { vertex: usize, port: usize },
}

#[derive(Clone, Debug)]
struct Vertex {
    kind: VertexKind,
    label: u32,
    /// Counterclockwise rotation: ports\[p\] = (edge, end index at this
    /// vertex). Length 4 for crossings, 3 for tees.
    ports: Vec<(usize, usize)>,
}

#[derive(Clone, Debug)]
struct EdgeRec {
    ends: [End; 2],
    label: u32,
}

/// Interior vertex description for [`DiskGraph::from_parts`].
#[derive(Clone, Debug)]
pub struct VertexSpec {
    pub kind: VertexKind,
    pub label: u32,
    /// Counterclockwise rotation of (edge, end) references.
    pub ports: Vec<(usize, usize)>,
}

/// Edge description for [`DiskGraph::from_parts`].
#[derive(Clone, Debug)]
pub struct EdgeSpec {
    pub ends: [End; 2],
    pub label: u32,
}

/// The rewrite move kinds, in descending selection priority.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MoveKind {
    /// Remove one bare circle.
    IsolatedLoop,
    /// A face bounded by one edge and one boundary arc: delete the edge.
    Boundary2Gon,
    /// A face bounded by two edges meeting at a crossing plus one boundary
    /// arc: uncross the corner, merging each pair of opposite segments.
    Boundary3Gon,
    /// A face bounded by two edges between the same pair of crossings:
    /// pull the two strands apart, deleting both crossings.
    Internal2Gon,
    /// A face bounded by three edges: slide the side opposite the chosen
    /// corner across that corner. Vertex and edge counts are preserved.
    Internal3GonInvert,
    /// Recurse into a component nested inside another component's face.
    /// Never produced here: every vertex-bearing component must touch the
    /// boundary and bare circles are tracked by count, so no nested
    /// component can carry structure.
    InnerComponentDescent,
}

impl MoveKind {
    pub fn name(self) -> &'static str {
        match self {
            MoveKind::IsolatedLoop => "isolated-loop",
            MoveKind::Boundary2Gon => "boundary-2gon",
            MoveKind::Boundary3Gon => "boundary-3gon",
            MoveKind::Internal2Gon => "internal-2gon",
            MoveKind::Internal3GonInvert => "internal-3gon-invert",
            MoveKind::InnerComponentDescent => "inner-component-descent",
        }
    }
}

/// A move at a concrete site: a face index from the current census, or the
/// component index 0 for `IsolatedLoop`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RewriteMove {
    pub kind: MoveKind,
    pub site: usize,
}

/// One side of a complementary face.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FaceSide {
    Edge(usize),
    Boundary,
}

/// A corner of a complementary face.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Corner {
    Vertex(usize),
    Slot(usize),
}

/// A complementary face. `corners[i]` joins `sides[i]` to the cyclically
/// next side.
#[derive(Clone, Debug)]
pub struct Face {
    pub sides: Vec<FaceSide>,
    pub corners: Vec<Corner>,
}

impl Face {
    pub fn degree(&self) -> usize {
        self.sides.len()
    }

    pub fn touches_boundary(&self) -> bool {
        self.sides.iter().any(|s| matches!(s, FaceSide::Boundary))
    }

    pub fn edge_sides(&self) -> usize {
        self.sides.iter().filter(|s| matches!(s, FaceSide::Edge(_))).count()
    }
}

/// State after one applied move.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Step {
    pub kind: MoveKind,
    pub site: usize,
    pub vertices: u64,
    pub edges: u64,
    pub faces: u64,
    pub measure: Vec<u64>,
}

/// Final graph summary carried by a trace.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct GraphSummary {
    pub vertices: u64,
    pub edges: u64,
    pub floating: u64,
    pub face_degrees: Vec<usize>,
}

/// The full move sequence of a reduction run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Trace {
    pub steps: Vec<Step>,
    pub residue: GraphSummary,
}

#[derive(Debug, Error)]
pub enum RewriteError {
    #[error("face {face} is a 1-gon, which no valid crossing diagram contains")]
    ForbiddenOneGon { face: usize },
    #[error("move does not apply at the requested site: {0}")]
    InvalidSite(String),
    #[error("no move applies to the remaining nonempty diagram")]
    Stuck { trace: Box<Trace> },
    #[error("malformed diagram: {0}")]
    BadGraph(String),
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Owner {
    Vertex(usize),
    Slot(usize),
}

#[derive(Clone, Debug)]
pub struct DiskGraph {
    mode: Mode,
    slots: Vec<bool>,
    vertices: Vec<Option<Vertex>>,
    edges: Vec<Option<EdgeRec>>,
    floating: usize,
}

/// One strand walked end to end: `edges[k]` joins `vertices[k - 1]` to
/// `vertices[k]`, with the strand tips (or the wrap of a closed strand)
/// beyond the ends of the vertex list.
struct StrandPath {
    rep: usize,
    edges: Vec<usize>,
    vertices: Vec<usize>,
    closed: bool,
}

/// A lens: two crossings of the same strand pair, consecutive along both
/// strands. `curve` holds the edges of the two bounding arcs;
/// `arc_vertices` the crossings sitting on the open arcs.
struct LensData {
    curve: BTreeSet<usize>,
    arc_vertices: Vec<usize>,
}

impl DiskGraph {
    pub fn empty(mode: Mode) -> DiskGraph {
        DiskGraph { mode, slots: Vec::new(), vertices: Vec::new(), edges: Vec::new(), floating: 0 }
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn add_floating(&mut self, circles: usize) {
        self.floating += circles;
    }

    pub fn floating(&self) -> usize {
        self.floating
    }

    pub fn live_vertices(&self) -> usize {
        self.vertices.iter().flatten().count()
    }

    pub fn live_edges(&self) -> usize {
        self.edges.iter().flatten().count()
    }

    pub fn live_slots(&self) -> usize {
        self.slots.iter().filter(|s| **s).count()
    }

    pub fn is_empty(&self) -> bool {
        self.live_edges() == 0 && self.live_vertices() == 0 && self.floating == 0
    }

    /// Builds a diagram from explicit parts and validates it: reference
    /// consistency, mode discipline, attachment of every component to the
    /// boundary, and a planarity check through the face census.
    pub fn from_parts(
        mode: Mode,
        slot_count: usize,
        vertices: Vec<VertexSpec>,
        edges: Vec<EdgeSpec>,
    ) -> Result<DiskGraph, RewriteError> {
        let bad = |m: String| RewriteError::BadGraph(m);
        for (i, v) in vertices.iter().enumerate() {
            let arity = match v.kind {
                VertexKind::Degree4 => 4,
                VertexKind::Tee => 3,
            };
            if v.ports.len() != arity {
                return Err(bad(format!("vertex {i} has {} ports, wants {arity}", v.ports.len())));
            }
            match (mode, v.kind) {
                (Mode::Crossings, VertexKind::Degree4) | (Mode::Tees, VertexKind::Tee) => {}
                _ => return Err(bad(format!("vertex {i} kind does not match the mode"))),
            }
        }
        let mut slot_seen = vec![0usize; slot_count];
        for (ei, e) in edges.iter().enumerate() {
            for end in &e.ends {
                match *end {
                    End::Slot(s) => {
                        if s >= slot_count {
                            return Err(bad(format!("edge {ei} references slot {s}")));
                        }
                        slot_seen[s] += 1;
                    }
                    End::Port { vertex, port } => {
                        let v = vertices
                            .get(vertex)
                            .ok_or_else(|| bad(format!("edge {ei} references vertex {vertex}")))?;
                        if port >= v.ports.len() {
                            return Err(bad(format!("edge {ei} references port {port}")));
                        }
                    }
                }
            }
        }
        if let Some(s) = slot_seen.iter().position(|&c| c != 1) {
            return Err(bad(format!("slot {s} is used {} times, wants exactly 1", slot_seen[s])));
        }
        // Cross-validate rotations against edge endpoints.
        for (vi, v) in vertices.iter().enumerate() {
            for (p, &(e, end)) in v.ports.iter().enumerate() {
                let rec = edges
                    .get(e)
                    .ok_or_else(|| bad(format!("vertex {vi} port {p} references edge {e}")))?;
                if end > 1 || rec.ends[end] != (End::Port { vertex: vi, port: p }) {
                    return Err(bad(format!("vertex {vi} port {p} disagrees with edge {e}")));
                }
            }
        }
        // T-junction labels: the distinguished edge carries a higher label
        // than the strand it ends on.
        for (vi, v) in vertices.iter().enumerate() {
            if v.kind == VertexKind::Tee {
                let leg = edges[v.ports[0].0].label;
                for &(e, _) in &v.ports[1..] {
                    if leg <= edges[e].label {
                        return Err(bad(format!("vertex {vi} leg label {leg} is not the highest")));
                    }
                }
            }
        }
        // Every component must reach the boundary circle.
        if !edges.is_empty() {
            let mut ds = DisjointSets::new(edges.len());
            for v in &vertices {
                for w in v.ports.windows(2) {
                    ds.union(w[0].0, w[1].0);
                }
            }
            let mut anchored = vec![false; edges.len()];
            for (ei, e) in edges.iter().enumerate() {
                if e.ends.iter().any(|end| matches!(end, End::Slot(_))) {
                    anchored[ei] = true;
                }
            }
            for group in ds.groups() {
                if !group.iter().any(|&e| anchored[e]) {
                    return Err(bad(format!(
                        "edges {group:?} form a component detached from the boundary"
                    )));
                }
            }
        }
        let g = DiskGraph {
            mode,
            slots: vec![true; slot_count],
            vertices: vertices
                .into_iter()
                .map(|v| Some(Vertex { kind: v.kind, label: v.label, ports: v.ports }))
                .collect(),
            edges: edges.into_iter().map(|e| Some(EdgeRec { ends: e.ends, label: e.label })).collect(),
            floating: 0,
        };
        g.check_euler()?;
        Ok(g)
    }

    /// The live graph as rebuildable parts: boundary slot count plus vertex
    /// and edge descriptions, the inverse of [`DiskGraph::from_parts`]. Dead
    /// slots keep their indices; vertex and edge ids are compacted in
    /// increasing order. Floating circles have no parts form.
    pub fn parts(&self) -> Result<(usize, Vec<VertexSpec>, Vec<EdgeSpec>), RewriteError> {
        if self.floating > 0 {
            return Err(RewriteError::BadGraph(
                "floating circles have no parts form".into(),
            ));
        }
        let renumber = |live: Vec<usize>| -> BTreeMap<usize, usize> {
            live.into_iter().enumerate().map(|(new, old)| (old, new)).collect()
        };
        let vmap = renumber(
            (0..self.vertices.len()).filter(|&i| self.vertices[i].is_some()).collect(),
        );
        let emap = renumber(
            (0..self.edges.len()).filter(|&i| self.edges[i].is_some()).collect(),
        );
        let vertices = self
            .vertices
            .iter()
            .flatten()
            .map(|v| VertexSpec {
                kind: v.kind,
                label: v.label,
                ports: v.ports.iter().map(|&(e, end)| (emap[&e], end)).collect(),
            })
            .collect();
        let edges = self
            .edges
            .iter()
            .flatten()
            .map(|e| EdgeSpec {
                ends: e.ends.map(|end| match end {
                    End::Slot(s) => End::Slot(s),
                    End::Port { vertex, port } => End::Port { vertex: vmap[&vertex], port },
                }),
                label: e.label,
            })
            .collect();
        Ok((self.slots.len(), vertices, edges))
    }

    /// Builds a crossing diagram from straight chords of a convex polygon.
    /// Chord endpoints index marked points `0..points` in circular order;
    /// endpoints must be pairwise distinct, so chords cross at most once.
    /// The positions realizing the points are picked deterministically so
    /// that no three chords pass through one point.
    pub fn from_chords(points: usize, chords: &[(usize, usize)]) -> Result<DiskGraph, RewriteError> {
        let bad = |m: String| RewriteError::BadGraph(m);
        let mut used = BTreeSet::new();
        for &(a, b) in chords {
            if a >= points || b >= points || a == b {
                return Err(bad(format!("chord ({a}, {b}) is out of range")));
            }
            if !used.insert(a) || !used.insert(b) {
                return Err(bad(format!("chord ({a}, {b}) reuses an endpoint")));
            }
        }
        for salt in 0..32u64 {
            if let Some(g) = Self::from_chords_realized(&used, chords, salt)? {
                return Ok(g);
            }
        }
        Err(bad("every tried realization put three chords through one point".to_string()))
    }

    /// One realization attempt; `Ok(None)` reports a triple meeting point.
    fn from_chords_realized(
        used: &BTreeSet<usize>,
        chords: &[(usize, usize)],
        salt: u64,
    ) -> Result<Option<DiskGraph>, RewriteError> {
        // Marked points on a convex curve with exact integer predicates.
        // Salt zero is the plain parabola; later salts jitter the spacing
        // to dodge accidental triple meetings.
        let x_of = |i: usize| -> i128 {
            let jitter = if salt == 0 {
                0
            } else {
                (salt
                    .wrapping_mul(0x9E37_79B9_7F4A_7C15)
                    .wrapping_add((i as u64).wrapping_mul(0xBF58_476D_1CE4_E5B9))
                    >> 58) as i128
            };
            64 * i as i128 + jitter
        };
        let pt = move |i: usize| -> (i128, i128) {
            let x = x_of(i);
            (x, x * x)
        };
        let cross2 = |a: (i128, i128), b: (i128, i128)| a.0 * b.1 - a.1 * b.0;
        let sub = |a: (i128, i128), b: (i128, i128)| (a.0 - b.0, a.1 - b.1);
        let slot_of: BTreeMap<usize, usize> =
            used.iter().enumerate().map(|(rank, &p)| (p, rank)).collect();
        let interleaved = |c1: (usize, usize), c2: (usize, usize)| {
            let (a, b) = (c1.0.min(c1.1), c1.0.max(c1.1));
            let inside = |x: usize| a < x && x < b;
            inside(c2.0) != inside(c2.1)
        };
        // Intersection parameter of chord (u, v) with chord (c, d), as an
        // exact fraction along u -> v.
        let param = |u: usize, v: usize, c: usize, d: usize| -> (i128, i128) {
            let (pu, pv, pc, pd) = (pt(u), pt(v), pt(c), pt(d));
            let den = cross2(sub(pv, pu), sub(pd, pc));
            let num = cross2(sub(pc, pu), sub(pd, pc));
            if den < 0 {
                (-num, -den)
            } else {
                (num, den)
            }
        };
        // One crossing vertex per interleaved pair.
        let mut vid_of: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        for i in 0..chords.len() {
            for j in i + 1..chords.len() {
                if interleaved(chords[i], chords[j]) {
                    let id = vid_of.len();
                    vid_of.insert((i, j), id);
                }
            }
        }
        // Rotation at each crossing: sort the four outgoing rays by angle.
        let angle_less = |a: (i128, i128), b: (i128, i128)| -> bool {
            let half = |d: (i128, i128)| usize::from(d.1 < 0 || (d.1 == 0 && d.0 < 0));
            (half(a), 0i128) < (half(b), cross2(b, a))
        };
        let mut vspecs = Vec::new();
        // port_at[(chord pair, toward-endpoint flag of the chord)] -> port.
        let mut port_at: BTreeMap<(usize, usize, usize, usize), usize> = BTreeMap::new();
        for (&(i, j), &vid) in &vid_of {
            debug_assert_eq!(vid, vspecs.len());
            let (u, v) = chords[i];
            let (c, d) = chords[j];
            // Tag rays by (chord, endpoint the ray points toward).
            let mut rays = [
                (sub(pt(u), pt(v)), i, u),
                (sub(pt(v), pt(u)), i, v),
                (sub(pt(c), pt(d)), j, c),
                (sub(pt(d), pt(c)), j, d),
            ];
            rays.sort_by(|a, b| {
                if angle_less(a.0, b.0) {
                    std::cmp::Ordering::Less
                } else {
                    std::cmp::Ordering::Greater
                }
            });
            for (port, &(_, ch, toward)) in rays.iter().enumerate() {
                port_at.insert((i, j, ch, toward), port);
            }
            // Transverse straight lines alternate around the crossing.
            debug_assert_ne!(rays[0].1, rays[1].1);
            vspecs.push(VertexSpec { kind: VertexKind::Degree4, label: 0, ports: vec![(0, 0); 4] });
        }
        // Edges: split each chord at its crossings, ordered along the chord.
        let mut especs: Vec<EdgeSpec> = Vec::new();
        for (i, &(u, v)) in chords.iter().enumerate() {
            let mut cuts: Vec<(i128, i128, usize)> = Vec::new();
            for (j, &other) in chords.iter().enumerate() {
                if j != i && interleaved(chords[i], other) {
                    let (n, d) = param(u, v, other.0, other.1);
                    cuts.push((n, d, j));
                }
            }
            cuts.sort_by(|a, b| (a.0 * b.1).cmp(&(b.0 * a.1)));
            for w in cuts.windows(2) {
                if w[0].0 * w[1].1 == w[1].0 * w[0].1 {
                    return Ok(None);
                }
            }
            // Endpoint u, the crossings in order, then endpoint v; each
            // consecutive pair bounds one edge.
            let mut stops: Vec<End> = vec![End::Slot(slot_of[&u])];
            for &(_, _, j) in &cuts {
                let key = (i.min(j), i.max(j));
                let vid = vid_of[&key];
                // The segment arriving from the u side enters by the port
                // whose ray points back toward u.
                let port = port_at[&(key.0, key.1, i, u)];
                stops.push(End::Port { vertex: vid, port });
            }
            stops.push(End::Slot(slot_of[&v]));
            for k in 0..stops.len() - 1 {
                let e0 = stops[k];
                // Leaving a crossing toward v uses the opposite port.
                let e0 = match e0 {
                    End::Port { vertex, port } if k > 0 => End::Port { vertex, port: (port + 2) % 4 },
                    other => other,
                };
                especs.push(EdgeSpec { ends: [e0, stops[k + 1]], label: 0 });
            }
        }
        // Fill the rotations now that edge ids exist.
        for (ei, e) in especs.iter().enumerate() {
            for (end, r) in e.ends.iter().enumerate() {
                if let End::Port { vertex, port } = *r {
                    vspecs[vertex].ports[port] = (ei, end);
                }
            }
        }
        DiskGraph::from_parts(Mode::Crossings, used.len(), vspecs, especs).map(Some)
    }

    /// Fixture: a square of four T-junctions whose legs run to the boundary.
    /// Every complementary face has degree 4, so no move applies.
    pub fn tee_square() -> DiskGraph {
        let mut vspecs = Vec::new();
        let mut especs = Vec::new();
        // Edges 0..4: square sides, side i from vertex i to vertex i + 1.
        // Edges 4..8: legs, leg i from vertex i to slot i.
        for i in 0..4usize {
            especs.push(EdgeSpec {
                ends: [
                    End::Port { vertex: i, port: 2 },
                    End::Port { vertex: (i + 1) % 4, port: 1 },
                ],
                label: 1,
            });
        }
        for i in 0..4usize {
            especs.push(EdgeSpec { ends: [End::Port { vertex: i, port: 0 }, End::Slot(i)], label: 2 });
        }
        for i in 0..4usize {
            vspecs.push(VertexSpec {
                kind: VertexKind::Tee,
                label: 2,
                ports: vec![(4 + i, 0), ((i + 3) % 4, 1), (i, 0)],
            });
        }
        DiskGraph::from_parts(Mode::Tees, 4, vspecs, especs).expect("fixture is valid")
    }

    fn vertex(&self, v: usize) -> Result<&Vertex, RewriteError> {
        self.vertices
            .get(v)
            .and_then(|x| x.as_ref())
            .ok_or_else(|| RewriteError::BadGraph(format!("vertex {v} is gone")))
    }

    fn edge(&self, e: usize) -> Result<&EdgeRec, RewriteError> {
        self.edges
            .get(e)
            .and_then(|x| x.as_ref())
            .ok_or_else(|| RewriteError::BadGraph(format!("edge {e} is gone")))
    }

    fn set_end_ref(&mut self, at: End, edge: usize, end: usize) {
        if let End::Port { vertex, port } = at {
            if let Some(v) = self.vertices[vertex].as_mut() {
                v.ports[port] = (edge, end);
            }
        }
    }

    /// Builds the combinatorial map of graph plus boundary circle and reads
    /// off the complementary faces in a fixed deterministic order. The face
    /// on the outer side of the circle is dropped.
    pub fn census(&self) -> Result<Vec<Face>, RewriteError> {
        let bad = |m: String| RewriteError::BadGraph(m);
        let edge_ids: Vec<usize> =
            (0..self.edges.len()).filter(|&e| self.edges[e].is_some()).collect();
        let dense: BTreeMap<usize, usize> =
            edge_ids.iter().enumerate().map(|(k, &e)| (e, k)).collect();
        let live_slots: Vec<usize> = (0..self.slots.len()).filter(|&s| self.slots[s]).collect();
        let e_count = edge_ids.len();
        let m_count = live_slots.len();
        if e_count + m_count == 0 {
            if self.live_vertices() != 0 {
                return Err(bad("vertices without edges".to_string()));
            }
            return Ok(Vec::new());
        }
        // Slot -> its unique edge end.
        let mut slot_end: Vec<Option<(usize, usize)>> = vec![None; self.slots.len()];
        for &e in &edge_ids {
            let rec = self.edge(e)?;
            for (endidx, end) in rec.ends.iter().enumerate() {
                if let End::Slot(s) = *end {
                    if !self.slots[s] || slot_end[s].replace((e, endidx)).is_some() {
                        return Err(bad(format!("slot {s} is not singly used")));
                    }
                }
            }
        }
        let total_edges = e_count + m_count;
        let mut owners = vec![Owner::Slot(usize::MAX); 2 * total_edges];
        let mut rotations: Vec<Vec<usize>> = Vec::new();
        let dart = |e_dense: usize, end: usize| 2 * e_dense + end;
        for (vi, v) in self.vertices.iter().enumerate() {
            let Some(v) = v else { continue };
            let mut rot = Vec::with_capacity(v.ports.len());
            for &(e, end) in &v.ports {
                let d = dart(
                    *dense.get(&e).ok_or_else(|| bad(format!("port references edge {e}")))?,
                    end,
                );
                owners[d] = Owner::Vertex(vi);
                rot.push(d);
            }
            rotations.push(rot);
        }
        for (k, &s) in live_slots.iter().enumerate() {
            let (e, end) =
                slot_end[s].ok_or_else(|| bad(format!("slot {s} has no incident edge")))?;
            let ed = dart(dense[&e], end);
            let arc_out = dart(e_count + k, 0);
            let arc_in = dart(e_count + (k + m_count - 1) % m_count, 1);
            owners[ed] = Owner::Slot(s);
            owners[arc_out] = Owner::Slot(s);
            owners[arc_in] = Owner::Slot(s);
            rotations.push(vec![ed, arc_out, arc_in]);
        }
        let map = EMap::from_vertex_rotations(total_edges, &rotations)
            .map_err(|e| bad(format!("rotation system rejected: {e}")))?;
        let face_orbits = map.faces();
        // With the rotation convention above, the face through the second
        // dart of arc 0 walks the outer side of the whole circle.
        let outer = if m_count > 0 {
            Some(face_orbits.orbit_of(2 * e_count + 1))
        } else {
            None
        };
        let mut faces = Vec::new();
        for (oi, orbit) in face_orbits.orbits().iter().enumerate() {
            if Some(oi) == outer {
                continue;
            }
            let mut sides = Vec::with_capacity(orbit.len());
            let mut corners = Vec::with_capacity(orbit.len());
            for (k, &d) in orbit.iter().enumerate() {
                let e = d / 2;
                sides.push(if e < e_count {
                    FaceSide::Edge(edge_ids[e])
                } else {
                    FaceSide::Boundary
                });
                let next = orbit[(k + 1) % orbit.len()];
                corners.push(match owners[next] {
                    Owner::Vertex(v) => Corner::Vertex(v),
                    Owner::Slot(s) => Corner::Slot(s),
                });
            }
            faces.push(Face { sides, corners });
        }
        Ok(faces)
    }

    /// Summed Euler data: interior vertices, edges plus bare circles, and
    /// complementary faces plus bare circle interiors.
    pub fn euler_summands(&self) -> Result<(u64, u64, u64), RewriteError> {
        let v = self.live_vertices() as u64;
        let e = self.live_edges() as u64 + self.floating as u64;
        let inner = if self.live_edges() + self.live_slots() == 0 {
            1
        } else {
            self.census()?.len() as u64
        };
        Ok((v, e, inner + self.floating as u64))
    }

    fn check_euler(&self) -> Result<(), RewriteError> {
        let (v, e, f) = self.euler_summands()?;
        if v as i64 - e as i64 + f as i64 != 1 {
            return Err(RewriteError::BadGraph(format!(
                "disk Euler count failed: {v} - {e} + {f} != 1"
            )));
        }
        Ok(())
    }

    /// Strand decomposition: the partition of edges into maximal curves
    /// through crossings and T-junction crossbars, plus the crossing pair
    /// multiplicities.
    fn strands(&self) -> Strands {
        let n = self.edges.len();
        let mut ds = DisjointSets::new(n.max(1));
        for v in self.vertices.iter().flatten() {
            match v.kind {
                VertexKind::Degree4 => {
                    ds.union(v.ports[0].0, v.ports[2].0);
                    ds.union(v.ports[1].0, v.ports[3].0);
                }
                VertexKind::Tee => {
                    ds.union(v.ports[1].0, v.ports[2].0);
                }
            }
        }
        let mut pair_count: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        for v in self.vertices.iter().flatten() {
            if v.kind == VertexKind::Degree4 {
                let a = ds.find(v.ports[0].0);
                let b = ds.find(v.ports[1].0);
                *pair_count.entry((a.min(b), a.max(b))).or_default() += 1;
            }
        }
        Strands { ds, pair_count }
    }

    /// Walks every strand from tip to tip (or around, when closed).
    fn strand_paths(&self) -> Result<Vec<StrandPath>, RewriteError> {
        let mut st = self.strands();
        let mut by_rep: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for e in 0..self.edges.len() {
            if self.edges[e].is_some() {
                by_rep.entry(st.strand(e)).or_default().push(e);
            }
        }
        let mut out = Vec::new();
        for (&rep, edges_of) in &by_rep {
            let mut endpoints: Vec<(usize, usize)> = Vec::new();
            for &e in edges_of {
                for (end, r) in self.edge(e)?.ends.iter().enumerate() {
                    let is_tip = match *r {
                        End::Slot(_) => true,
                        End::Port { vertex, port } => {
                            self.vertex(vertex)?.kind == VertexKind::Tee && port == 0
                        }
                    };
                    if is_tip {
                        endpoints.push((e, end));
                    }
                }
            }
            endpoints.sort_unstable();
            let (closed, start) = match endpoints.first() {
                Some(&s) => (false, s),
                None => (true, (edges_of[0], 0)),
            };
            let mut edges_seq = vec![start.0];
            let mut vertices_seq = Vec::new();
            let mut cur = (start.0, 1 - start.1);
            for _ in 0..=2 * edges_of.len() {
                let stop = match self.edge(cur.0)?.ends[cur.1] {
                    End::Slot(_) => true,
                    End::Port { vertex, port } => {
                        let v = self.vertex(vertex)?;
                        match (v.kind, port) {
                            (VertexKind::Tee, 0) => true,
                            _ => {
                                let cont = match v.kind {
                                    VertexKind::Degree4 => (port + 2) % 4,
                                    VertexKind::Tee => 3 - port,
                                };
                                vertices_seq.push(vertex);
                                let (ne, nend) = v.ports[cont];
                                if closed && ne == start.0 {
                                    true
                                } else {
                                    edges_seq.push(ne);
                                    cur = (ne, 1 - nend);
                                    false
                                }
                            }
                        }
                    }
                };
                if stop {
                    out.push(StrandPath { rep, edges: edges_seq, vertices: vertices_seq, closed });
                    break;
                }
                if edges_seq.len() > edges_of.len() {
                    return Err(RewriteError::BadGraph(format!(
                        "strand walk from edge {} does not close",
                        start.0
                    )));
                }
            }
        }
        Ok(out)
    }

    /// Enumerates the lenses of every twice-or-more crossing strand pair.
    fn lenses(&self) -> Result<Vec<LensData>, RewriteError> {
        let paths = self.strand_paths()?;
        let mut st = self.strands();
        let path_index: BTreeMap<usize, usize> =
            paths.iter().enumerate().map(|(i, p)| (p.rep, i)).collect();
        let pair_at = |st: &mut Strands, v: &Vertex| -> (usize, usize) {
            let a = st.strand(v.ports[0].0);
            let b = st.strand(v.ports[1].0);
            (a.min(b), a.max(b))
        };
        // Positions of one pair's crossings along one strand, in walk order.
        let positions = |st: &mut Strands, p: &StrandPath, partner: usize| -> Vec<usize> {
            let mut pos = Vec::new();
            for (k, &w) in p.vertices.iter().enumerate() {
                let v = self.vertices[w].as_ref().expect("walked vertex is live");
                if v.kind == VertexKind::Degree4
                    && pair_at(st, v) == (p.rep.min(partner), p.rep.max(partner))
                {
                    pos.push(k);
                }
            }
            pos
        };
        // The arc between consecutive crossing positions; `from > to` wraps
        // around a closed strand.
        let arc = |p: &StrandPath, from: usize, to: usize| -> (Vec<usize>, Vec<usize>) {
            if from < to {
                (p.edges[from + 1..=to].to_vec(), p.vertices[from + 1..to].to_vec())
            } else {
                let mut es = p.edges[from + 1..].to_vec();
                es.extend_from_slice(&p.edges[..=to]);
                let mut vs = p.vertices[from + 1..].to_vec();
                vs.extend_from_slice(&p.vertices[..to]);
                (es, vs)
            }
        };
        let mut out = Vec::new();
        for p in &paths {
            let mut partners: BTreeSet<usize> = BTreeSet::new();
            for &w in &p.vertices {
                let v = self.vertex(w)?;
                if v.kind != VertexKind::Degree4 {
                    continue;
                }
                let (a, b) = pair_at(&mut st, v);
                if a != b {
                    partners.insert(if a == p.rep { b } else { a });
                }
            }
            for &partner in &partners {
                if p.rep >= partner {
                    continue;
                }
                let ppos = positions(&mut st, p, partner);
                if ppos.len() < 2 {
                    continue;
                }
                let q = &paths[path_index[&partner]];
                let qpos = positions(&mut st, q, p.rep);
                let adjacency = |pos: &[usize], closed: bool| -> Vec<(usize, usize)> {
                    let mut pairs: Vec<(usize, usize)> =
                        pos.windows(2).map(|w| (w[0], w[1])).collect();
                    if closed && pos.len() >= 2 {
                        pairs.push((*pos.last().expect("nonempty"), pos[0]));
                    }
                    pairs
                };
                for (pf, pt) in adjacency(&ppos, p.closed) {
                    let (x, y) = (p.vertices[pf], p.vertices[pt]);
                    // Consecutive along the partner as well?
                    let qia = qpos.iter().position(|&k| q.vertices[k] == x);
                    let qib = qpos.iter().position(|&k| q.vertices[k] == y);
                    let (Some(qia), Some(qib)) = (qia, qib) else { continue };
                    let gap = qia.abs_diff(qib);
                    let wraps = q.closed && gap == qpos.len() - 1 && qpos.len() > 2;
                    if gap != 1 && !wraps {
                        continue;
                    }
                    let (pe, pv) = arc(p, pf, pt);
                    let (qf, qt) = if wraps {
                        (qpos[qia.max(qib)], qpos[qia.min(qib)])
                    } else {
                        (qpos[qia.min(qib)], qpos[qia.max(qib)])
                    };
                    let (qe, qv) = arc(q, qf, qt);
                    let mut curve: BTreeSet<usize> = pe.into_iter().collect();
                    curve.extend(qe);
                    let mut arc_vertices = pv;
                    arc_vertices.extend(qv);
                    out.push(LensData { curve, arc_vertices });
                }
            }
        }
        Ok(out)
    }

    /// Counts the vertices every one of whose incident faces is cut off
    /// from the boundary circle by the given curve edges.
    fn strictly_inside_count(&self, faces: &[Face], curve: &BTreeSet<usize>) -> usize {
        let mut by_edge: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (fi, f) in faces.iter().enumerate() {
            for s in &f.sides {
                if let FaceSide::Edge(e) = s {
                    by_edge.entry(*e).or_default().push(fi);
                }
            }
        }
        let mut outside = vec![false; faces.len()];
        let mut stack: Vec<usize> = Vec::new();
        for (fi, f) in faces.iter().enumerate() {
            if f.touches_boundary() {
                outside[fi] = true;
                stack.push(fi);
            }
        }
        while let Some(fi) = stack.pop() {
            for s in &faces[fi].sides {
                let FaceSide::Edge(e) = s else { continue };
                if curve.contains(e) {
                    continue;
                }
                for &nf in &by_edge[e] {
                    if !outside[nf] {
                        outside[nf] = true;
                        stack.push(nf);
                    }
                }
            }
        }
        let mut touched_outside: BTreeSet<usize> = BTreeSet::new();
        let mut all: BTreeSet<usize> = BTreeSet::new();
        for (fi, f) in faces.iter().enumerate() {
            for c in &f.corners {
                if let Corner::Vertex(w) = c {
                    all.insert(*w);
                    if outside[fi] {
                        touched_outside.insert(*w);
                    }
                }
            }
        }
        all.difference(&touched_outside).count()
    }

    /// Total lens containment: over every lens, the crossings on its arcs
    /// plus the vertices strictly inside it. Zero exactly when no strand
    /// pair meets more than once.
    pub fn lens_containment(&self) -> Result<u64, RewriteError> {
        let lenses = self.lenses()?;
        if lenses.is_empty() {
            return Ok(0);
        }
        let faces = self.census()?;
        let mut total = 0u64;
        for l in &lenses {
            total += l.arc_vertices.len() as u64
                + self.strictly_inside_count(&faces, &l.curve) as u64;
        }
        Ok(total)
    }

    /// The decreasing progress measure, compared lexicographically.
    /// Crossing diagrams report vertex count, edge-plus-circle count, then
    /// lens containment (inversions tie on the first two and win on the
    /// third). T-junction diagrams report (label, vertex count) pairs from
    /// the highest label down, then the same tail.
    pub fn measure(&self) -> Result<Vec<u64>, RewriteError> {
        let tail = self.live_edges() as u64 + self.floating as u64;
        let containment = self.lens_containment()?;
        match self.mode {
            Mode::Crossings => Ok(vec![self.live_vertices() as u64, tail, containment]),
            Mode::Tees => {
                let mut counts: BTreeMap<u32, u64> = BTreeMap::new();
                for v in self.vertices.iter().flatten() {
                    *counts.entry(v.label).or_default() += 1;
                }
                let mut out = Vec::with_capacity(2 * counts.len() + 2);
                for (label, count) in counts.into_iter().rev() {
                    out.push(label as u64);
                    out.push(count);
                }
                out.push(tail);
                out.push(containment);
                Ok(out)
            }
        }
    }

    /// Removes `dead_vertices` and `dead_edges`, reconnecting the surviving
    /// edge ends through each dead vertex along the given port pairing.
    /// Chains of merged edges become single edges; a chain that closes up
    /// becomes a bare circle.
    fn dissolve(
        &mut self,
        dead_vertices: &BTreeMap<usize, Vec<usize>>,
        dead_edges: &BTreeSet<usize>,
    ) -> Result<(), RewriteError> {
        let chase = |g: &DiskGraph, mut at: (usize, usize)| -> Result<(usize, usize), RewriteError> {
            loop {
                let pairing = &dead_vertices[&at.0];
                let (pe, pend) = g.vertex(at.0)?.ports[pairing[at.1]];
                if !dead_edges.contains(&pe) {
                    return Ok((pe, pend));
                }
                match g.edge(pe)?.ends[1 - pend] {
                    End::Port { vertex, port } if dead_vertices.contains_key(&vertex) => {
                        at = (vertex, port);
                    }
                    other => {
                        return Err(RewriteError::BadGraph(format!(
                            "dead edge {pe} ends at surviving {other:?}"
                        )));
                    }
                }
            }
        };
        // Pair up the surviving ends that sat on dead vertices.
        let mut partner: BTreeMap<(usize, usize), (usize, usize)> = BTreeMap::new();
        for e in 0..self.edges.len() {
            if self.edges[e].is_none() || dead_edges.contains(&e) {
                continue;
            }
            for end in 0..2 {
                if partner.contains_key(&(e, end)) {
                    continue;
                }
                let End::Port { vertex, port } = self.edge(e)?.ends[end] else { continue };
                if !dead_vertices.contains_key(&vertex) {
                    continue;
                }
                let other = chase(self, (vertex, port))?;
                partner.insert((e, end), other);
                partner.insert(other, (e, end));
            }
        }
        // Merge chains. Darts are (edge, end); `partner` links the two
        // darts a dead vertex run connects, so stepping through an edge and
        // across a link is `next`. A chain with partner-free darts at both
        // tips becomes one edge; a chain that closes up becomes a circle.
        let next = |d: (usize, usize)| -> Option<(usize, usize)> {
            partner.get(&d).map(|&(pe, pend)| (pe, 1 - pend))
        };
        let mut consumed: BTreeSet<usize> = BTreeSet::new();
        let chain_edges: BTreeSet<usize> = partner.keys().map(|&(e, _)| e).collect();
        for &start in &chain_edges {
            if consumed.contains(&start) {
                continue;
            }
            let mut d = (start, 0);
            let closed = loop {
                match next(d) {
                    Some(nd) if nd == (start, 0) => break true,
                    Some(nd) => d = nd,
                    None => break false,
                }
            };
            if closed {
                let mut cur = (start, 0);
                loop {
                    consumed.insert(cur.0);
                    cur = next(cur).expect("closed chain keeps linking");
                    if cur == (start, 0) {
                        break;
                    }
                }
                self.floating += 1;
                continue;
            }
            // d is a partner-free tip: its edge end attaches to surviving
            // structure. Collect edges walking toward the other tip; cur is
            // the dart each edge was entered through.
            let label = self.edge(d.0)?.label;
            let first_attach = self.edge(d.0)?.ends[d.1];
            let mut cur = d;
            let last_attach = loop {
                consumed.insert(cur.0);
                match partner.get(&(cur.0, 1 - cur.1)) {
                    Some(&entry) => cur = entry,
                    None => break self.edge(cur.0)?.ends[1 - cur.1],
                }
            };
            let id = self.edges.len();
            self.edges.push(Some(EdgeRec { ends: [first_attach, last_attach], label }));
            self.set_end_ref(first_attach, id, 0);
            self.set_end_ref(last_attach, id, 1);
        }
        for e in consumed.iter().chain(dead_edges.iter()) {
            self.edges[*e] = None;
        }
        for &v in dead_vertices.keys() {
            self.vertices[v] = None;
        }
        Ok(())
    }

    fn remove_slot_edge(&mut self, e: usize) -> Result<(), RewriteError> {
        let rec = self.edge(e)?.clone();
        for end in rec.ends {
            match end {
                End::Slot(s) => self.slots[s] = false,
                End::Port { .. } => {
                    return Err(RewriteError::InvalidSite(format!(
                        "edge {e} does not run between two boundary slots"
                    )));
                }
            }
        }
        self.edges[e] = None;
        Ok(())
    }
}

struct Strands {
    ds: DisjointSets,
    pair_count: BTreeMap<(usize, usize), usize>,
}

impl Strands {
    fn strand(&mut self, edge: usize) -> usize {
        self.ds.find(edge)
    }

    fn crossings(&mut self, e1: usize, e2: usize) -> (bool, usize) {
        let a = self.strand(e1);
        let b = self.strand(e2);
        let count = self.pair_count.get(&(a.min(b), a.max(b))).copied().unwrap_or(0);
        (a != b, count)
    }
}

/// Decomposes a degree-2 face into its edge and boundary sides.
fn split_2gon(face: &Face) -> Option<(usize, bool)> {
    if face.degree() != 2 {
        return None;
    }
    match (face.sides[0], face.sides[1]) {
        (FaceSide::Edge(e), FaceSide::Boundary) | (FaceSide::Boundary, FaceSide::Edge(e)) => {
            Some((e, true))
        }
        (FaceSide::Edge(e), FaceSide::Edge(_)) => Some((e, false)),
        _ => None,
    }
}

/// A boundary 3-gon's interior corner: the vertex joining its two edge
/// sides, with those edges in corner order.
fn boundary_3gon_corner(face: &Face) -> Option<(usize, usize, usize)> {
    if face.degree() != 3 || face.edge_sides() != 2 {
        return None;
    }
    for i in 0..3 {
        let j = (i + 1) % 3;
        if let (FaceSide::Edge(e1), FaceSide::Edge(e2)) = (face.sides[i], face.sides[j]) {
            if let Corner::Vertex(w) = face.corners[i] {
                return Some((w, e1, e2));
            }
        }
    }
    None
}

/// Finds the highest-priority applicable move, scanning faces in census
/// order so traces are reproducible. Returns `Ok(None)` when no move
/// applies, which for diagrams satisfying the intended hypotheses means the
/// diagram is empty.
pub fn find_reducible_site(g: &DiskGraph) -> Result<Option<RewriteMove>, RewriteError> {
    let faces = g.census()?;
    if g.mode() == Mode::Crossings {
        if let Some(i) = faces.iter().position(|f| f.degree() == 1) {
            return Err(RewriteError::ForbiddenOneGon { face: i });
        }
    }
    if g.floating() > 0 {
        return Ok(Some(RewriteMove { kind: MoveKind::IsolatedLoop, site: 0 }));
    }
    for (i, f) in faces.iter().enumerate() {
        if matches!(split_2gon(f), Some((_, true))) {
            return Ok(Some(RewriteMove { kind: MoveKind::Boundary2Gon, site: i }));
        }
    }
    let mut strands = g.strands();
    for (i, f) in faces.iter().enumerate() {
        if let Some((w, e1, e2)) = boundary_3gon_corner(f) {
            if g.vertex(w)?.kind != VertexKind::Degree4 {
                continue;
            }
            // Uncrossing is sound only for two distinct strands meeting
            // exactly once; otherwise it would create a self-crossing.
            let (distinct, count) = strands.crossings(e1, e2);
            if distinct && count == 1 {
                return Ok(Some(RewriteMove { kind: MoveKind::Boundary3Gon, site: i }));
            }
        }
    }
    for (i, f) in faces.iter().enumerate() {
        if matches!(split_2gon(f), Some((_, false))) {
            let (Corner::Vertex(u), Corner::Vertex(v)) = (f.corners[0], f.corners[1]) else {
                continue;
            };
            if u != v
                && g.vertex(u)?.kind == VertexKind::Degree4
                && g.vertex(v)?.kind == VertexKind::Degree4
            {
                return Ok(Some(RewriteMove { kind: MoveKind::Internal2Gon, site: i }));
            }
        }
    }
    // Inversions keep vertex and edge counts, so they are throttled: one is
    // chosen only when it strictly shrinks the lens containment, which the
    // smaller moves above cannot address when a third strand runs between a
    // doubled crossing pair.
    if g.mode() == Mode::Crossings {
        let base = g.lens_containment()?;
        if base > 0 {
            for (i, f) in faces.iter().enumerate() {
                if f.degree() != 3 || f.edge_sides() != 3 {
                    continue;
                }
                let mv = RewriteMove { kind: MoveKind::Internal3GonInvert, site: i };
                let mut probe = g.clone();
                if apply_move(&mut probe, &mv).is_err() {
                    continue;
                }
                if probe.lens_containment()? < base {
                    return Ok(Some(mv));
                }
            }
        }
    }
    Ok(None)
}

fn port_of(g: &DiskGraph, edge: usize, vertex: usize) -> Result<(usize, usize), RewriteError> {
    for (end, r) in g.edge(edge)?.ends.iter().enumerate() {
        if let End::Port { vertex: v, port } = *r {
            if v == vertex {
                return Ok((port, end));
            }
        }
    }
    Err(RewriteError::InvalidSite(format!("edge {edge} does not end at vertex {vertex}")))
}

/// Applies `mv` to `g`. The site indexes the current face census (component
/// index for `IsolatedLoop`). Shape and soundness of the site are
/// revalidated here, so arbitrary moves can be attempted safely.
pub fn apply_move(g: &mut DiskGraph, mv: &RewriteMove) -> Result<(), RewriteError> {
    let invalid = |m: String| RewriteError::InvalidSite(m);
    match mv.kind {
        MoveKind::IsolatedLoop => {
            if g.floating() == 0 {
                return Err(invalid("no bare circles remain".to_string()));
            }
            if mv.site != 0 {
                return Err(invalid(format!("bare circle component {} does not exist", mv.site)));
            }
            g.floating -= 1;
            Ok(())
        }
        MoveKind::InnerComponentDescent => Err(invalid(
            "no nested components arise: vertex-bearing components touch the boundary".to_string(),
        )),
        _ => {
            let faces = g.census()?;
            let face = faces
                .get(mv.site)
                .ok_or_else(|| invalid(format!("face {} does not exist", mv.site)))?;
            match mv.kind {
                MoveKind::Boundary2Gon => {
                    let Some((e, true)) = split_2gon(face) else {
                        return Err(invalid(format!(
                            "face {} is not an edge-and-boundary 2-gon",
                            mv.site
                        )));
                    };
                    g.remove_slot_edge(e)
                }
                MoveKind::Boundary3Gon => {
                    let Some((w, e1, e2)) = boundary_3gon_corner(face) else {
                        return Err(invalid(format!("face {} is not a boundary 3-gon", mv.site)));
                    };
                    if g.vertex(w)?.kind != VertexKind::Degree4 {
                        return Err(invalid(format!("corner vertex {w} is not a crossing")));
                    }
                    let (distinct, count) = g.strands().crossings(e1, e2);
                    if !distinct || count != 1 {
                        return Err(invalid(format!(
                            "corner strands at vertex {w} do not cross exactly once"
                        )));
                    }
                    let (p1, _) = port_of(g, e1, w)?;
                    let (p2, _) = port_of(g, e2, w)?;
                    if (p1 + 1) % 4 != p2 && (p2 + 1) % 4 != p1 {
                        return Err(invalid(format!("edges {e1} and {e2} are opposite at {w}")));
                    }
                    let mut pairing = vec![0; 4];
                    pairing[p1] = p2;
                    pairing[p2] = p1;
                    pairing[(p1 + 2) % 4] = (p2 + 2) % 4;
                    pairing[(p2 + 2) % 4] = (p1 + 2) % 4;
                    let dead_vertices = BTreeMap::from([(w, pairing)]);
                    g.dissolve(&dead_vertices, &BTreeSet::new())
                }
                MoveKind::Internal2Gon => {
                    let Some((e1, false)) = split_2gon(face) else {
                        return Err(invalid(format!("face {} is not an internal 2-gon", mv.site)));
                    };
                    let FaceSide::Edge(e2) = face.sides[1] else { unreachable!() };
                    let (Corner::Vertex(u), Corner::Vertex(v)) =
                        (face.corners[0], face.corners[1])
                    else {
                        return Err(invalid("2-gon corners are not interior".to_string()));
                    };
                    if u == v {
                        return Err(invalid(format!("2-gon corners coincide at vertex {u}")));
                    }
                    for x in [u, v] {
                        if g.vertex(x)?.kind != VertexKind::Degree4 {
                            return Err(invalid(format!("corner vertex {x} is not a crossing")));
                        }
                    }
                    let through = vec![2, 3, 0, 1];
                    let dead_vertices = BTreeMap::from([(u, through.clone()), (v, through)]);
                    let dead_edges = BTreeSet::from([e1, e2]);
                    g.dissolve(&dead_vertices, &dead_edges)
                }
                MoveKind::Internal3GonInvert => apply_invert(g, mv.site, face),
                MoveKind::IsolatedLoop | MoveKind::InnerComponentDescent => unreachable!(),
            }
        }
    }
}

/// Slides the side opposite the lowest-numbered corner of an internal 3-gon
/// across that corner. Vertex and edge counts are unchanged; the two other
/// corners are replaced by fresh crossings on the far side.
fn apply_invert(g: &mut DiskGraph, site: usize, face: &Face) -> Result<(), RewriteError> {
    let invalid = |m: String| RewriteError::InvalidSite(m);
    if face.degree() != 3 || face.edge_sides() != 3 {
        return Err(invalid(format!("face {site} is not an internal 3-gon")));
    }
    let mut corners = [0usize; 3];
    for (k, c) in face.corners.iter().enumerate() {
        match c {
            Corner::Vertex(v) => corners[k] = *v,
            Corner::Slot(_) => return Err(invalid("3-gon corner lies on the boundary".to_string())),
        }
    }
    let cw = (0..3)
        .min_by_key(|&k| corners[k])
        .expect("three corners");
    let w = corners[cw];
    let u2 = corners[(cw + 1) % 3];
    let u1 = corners[(cw + 2) % 3];
    let (FaceSide::Edge(e1), FaceSide::Edge(e2), FaceSide::Edge(se)) = (
        face.sides[cw],
        face.sides[(cw + 1) % 3],
        face.sides[(cw + 2) % 3],
    ) else {
        unreachable!()
    };
    if w == u1 || w == u2 || u1 == u2 {
        return Err(invalid("3-gon corners are not three distinct crossings".to_string()));
    }
    for x in [w, u1, u2] {
        if g.vertex(x)?.kind != VertexKind::Degree4 {
            return Err(invalid(format!("corner vertex {x} is not a crossing")));
        }
    }
    // Ports of the triangle sides at their corners.
    let (pw1, _) = port_of(g, e1, w)?;
    let (pw2, _) = port_of(g, e2, w)?;
    let (pe1, _) = port_of(g, e1, u1)?;
    let (pse1, _) = port_of(g, se, u1)?;
    let (pe2, _) = port_of(g, e2, u2)?;
    let (pse2, _) = port_of(g, se, u2)?;
    // Continuations beyond the triangle.
    let fa = g.vertex(w)?.ports[(pw1 + 2) % 4];
    let fb = g.vertex(w)?.ports[(pw2 + 2) % 4];
    let ab = g.vertex(u1)?.ports[(pe1 + 2) % 4];
    let bb = g.vertex(u2)?.ports[(pe2 + 2) % 4];
    let t1 = g.vertex(u1)?.ports[(pse1 + 2) % 4];
    let t2 = g.vertex(u2)?.ports[(pse2 + 2) % 4];
    let involved = [e1, e2, se, fa.0, fb.0, ab.0, bb.0, t1.0, t2.0];
    let uniq: BTreeSet<usize> = involved.iter().copied().collect();
    if uniq.len() != involved.len() {
        return Err(invalid("triangle neighborhood edges are not distinct".to_string()));
    }
    // The rotation offset from e1 to e2 at the kept corner sets the local
    // handedness; the rotations at the fresh crossings mirror it.
    let r = (pw2 + 4 - pw1) % 4;
    if r != 1 && r != 3 {
        return Err(invalid(format!("sides of face {site} run straight through corner {w}")));
    }
    let far = |g: &DiskGraph, at: (usize, usize)| -> Result<End, RewriteError> {
        Ok(g.edge(at.0)?.ends[1 - at.1])
    };
    let (fa_far, fb_far) = (far(g, fa)?, far(g, fb)?);
    let (ab_far, bb_far) = (far(g, ab)?, far(g, bb)?);
    let (label_a, label_b) = (g.edge(e1)?.label, g.edge(e2)?.label);
    let (label_fa, label_fb, label_t) =
        (g.edge(fa.0)?.label, g.edge(fb.0)?.label, g.edge(se)?.label);
    let vp = g.vertices.len();
    g.vertices.push(Some(Vertex {
        kind: VertexKind::Degree4,
        label: g.vertex(u1)?.label,
        ports: vec![(0, 0); 4],
    }));
    let vq = g.vertices.len();
    g.vertices.push(Some(Vertex {
        kind: VertexKind::Degree4,
        label: g.vertex(u2)?.label,
        ports: vec![(0, 0); 4],
    }));
    let base = g.edges.len();
    let (na, nb) = (base, base + 1);
    let (nfa1, nfa2, nfb1, nfb2) = (base + 2, base + 3, base + 4, base + 5);
    let ne = base + 6;
    let new_edges = [
        EdgeRec { ends: [End::Port { vertex: w, port: pw1 }, ab_far], label: label_a },
        EdgeRec { ends: [End::Port { vertex: w, port: pw2 }, bb_far], label: label_b },
        EdgeRec {
            ends: [
                End::Port { vertex: w, port: (pw1 + 2) % 4 },
                End::Port { vertex: vp, port: 0 },
            ],
            label: label_fa,
        },
        EdgeRec { ends: [End::Port { vertex: vp, port: 2 }, fa_far], label: label_fa },
        EdgeRec {
            ends: [
                End::Port { vertex: w, port: (pw2 + 2) % 4 },
                End::Port { vertex: vq, port: 0 },
            ],
            label: label_fb,
        },
        EdgeRec { ends: [End::Port { vertex: vq, port: 2 }, fb_far], label: label_fb },
        EdgeRec {
            ends: [
                End::Port { vertex: vp, port: (4 - r) % 4 },
                End::Port { vertex: vq, port: r },
            ],
            label: label_t,
        },
    ];
    for e in new_edges {
        g.edges.push(Some(e));
    }
    // Reattach the outer thirds of the slid strand: walking it from the t1
    // side now meets the other strand's fresh crossing first.
    if let Some(rec) = g.edges[t1.0].as_mut() {
        rec.ends[t1.1] = End::Port { vertex: vq, port: (r + 2) % 4 };
    }
    if let Some(rec) = g.edges[t2.0].as_mut() {
        rec.ends[t2.1] = End::Port { vertex: vp, port: (6 - r) % 4 };
    }
    // Rotations at the fresh crossings.
    {
        let mut ports_p = vec![(0usize, 0usize); 4];
        ports_p[0] = (nfa1, 1);
        ports_p[(4 - r) % 4] = (ne, 0);
        ports_p[2] = (nfa2, 0);
        ports_p[(6 - r) % 4] = (t2.0, t2.1);
        g.vertices[vp].as_mut().expect("fresh").ports = ports_p;
        let mut ports_q = vec![(0usize, 0usize); 4];
        ports_q[0] = (nfb1, 1);
        ports_q[r] = (ne, 1);
        ports_q[2] = (nfb2, 0);
        ports_q[(r + 2) % 4] = (t1.0, t1.1);
        g.vertices[vq].as_mut().expect("fresh").ports = ports_q;
    }
    // Rotations at w and the surviving far attachments.
    {
        let wv = g.vertices[w].as_mut().expect("corner");
        wv.ports[pw1] = (na, 0);
        wv.ports[pw2] = (nb, 0);
        wv.ports[(pw1 + 2) % 4] = (nfa1, 0);
        wv.ports[(pw2 + 2) % 4] = (nfb1, 0);
    }
    g.set_end_ref(ab_far, na, 1);
    g.set_end_ref(bb_far, nb, 1);
    g.set_end_ref(fa_far, nfa2, 1);
    g.set_end_ref(fb_far, nfb2, 1);
    for e in [e1, e2, se, fa.0, fb.0, ab.0, bb.0] {
        g.edges[e] = None;
    }
    g.vertices[u1] = None;
    g.vertices[u2] = None;
    Ok(())
}

/// Runs the engine to a fixed point. `Ok` means the diagram emptied; a
/// nonempty diagram with no applicable move returns [`RewriteError::Stuck`]
/// carrying the trace and the residual face degrees.
pub fn reduce(mut g: DiskGraph) -> Result<Trace, RewriteError> {
    let mut steps = Vec::new();
    loop {
        match find_reducible_site(&g)? {
            Some(mv) => {
                apply_move(&mut g, &mv)?;
                let (v, e, f) = g.euler_summands()?;
                if v as i64 - e as i64 + f as i64 != 1 {
                    return Err(RewriteError::BadGraph(format!(
                        "move {} broke the disk Euler count",
                        mv.kind.name()
                    )));
                }
                steps.push(Step {
                    kind: mv.kind,
                    site: mv.site,
                    vertices: v,
                    edges: e,
                    faces: f,
                    measure: g.measure()?,
                });
            }
            None => {
                let residue = GraphSummary {
                    vertices: g.live_vertices() as u64,
                    edges: g.live_edges() as u64,
                    floating: g.floating() as u64,
                    face_degrees: g.census()?.iter().map(|f| f.degree()).collect(),
                };
                let trace = Trace { steps, residue };
                if g.is_empty() {
                    return Ok(trace);
                }
                return Err(RewriteError::Stuck { trace: Box::new(trace) });
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kinds(trace: &Trace) -> Vec<MoveKind> {
        trace.steps.iter().map(|s| s.kind).collect()
    }

    fn assert_strictly_decreasing(trace: &Trace, start: &DiskGraph) {
        let mut prev = start.measure().unwrap();
        for step in &trace.steps {
            assert!(step.measure < prev, "measure stalled: {prev:?} -> {:?}", step.measure);
            prev = step.measure.clone();
        }
    }

    fn assert_euler_throughout(trace: &Trace) {
        for step in &trace.steps {
            assert_eq!(step.vertices as i64 - step.edges as i64 + step.faces as i64, 1);
        }
    }

    #[test]
    fn single_arc_is_a_boundary_2gon() {
        let g = DiskGraph::from_chords(2, &[(0, 1)]).unwrap();
        let faces = g.census().unwrap();
        assert_eq!(faces.len(), 2);
        assert!(faces.iter().all(|f| f.degree() == 2 && f.touches_boundary()));
        let mv = find_reducible_site(&g).unwrap().unwrap();
        assert_eq!(mv.kind, MoveKind::Boundary2Gon);
        let trace = reduce(g).unwrap();
        assert_eq!(kinds(&trace), vec![MoveKind::Boundary2Gon]);
        assert_eq!(trace.residue, GraphSummary::default());
    }

    #[test]
    fn empty_diagram_has_no_site() {
        let g = DiskGraph::empty(Mode::Crossings);
        assert!(find_reducible_site(&g).unwrap().is_none());
        let trace = reduce(g).unwrap();
        assert!(trace.steps.is_empty());
    }

    #[test]
    fn crossing_arcs_walk_through() {
        let g = DiskGraph::from_chords(4, &[(0, 2), (1, 3)]).unwrap();
        let faces = g.census().unwrap();
        assert_eq!(faces.len(), 4);
        assert!(faces.iter().all(|f| f.degree() == 3 && f.touches_boundary()));
        let mv = find_reducible_site(&g).unwrap().unwrap();
        assert_eq!(mv.kind, MoveKind::Boundary3Gon);
        let mut h = DiskGraph::from_chords(4, &[(0, 2), (1, 3)]).unwrap();
        apply_move(&mut h, &mv).unwrap();
        assert_eq!((h.live_vertices(), h.live_edges()), (0, 2));
        let trace = reduce(g).unwrap();
        assert_eq!(
            kinds(&trace),
            vec![MoveKind::Boundary3Gon, MoveKind::Boundary2Gon, MoveKind::Boundary2Gon]
        );
        assert_euler_throughout(&trace);
    }

    #[test]
    fn triangle_arrangement_census() {
        let g = DiskGraph::from_chords(6, &[(0, 3), (1, 4), (2, 5)]).unwrap();
        let faces = g.census().unwrap();
        assert_eq!(faces.len(), 7);
        let internal_3gons =
            faces.iter().filter(|f| f.degree() == 3 && !f.touches_boundary()).count();
        let boundary_3gons =
            faces.iter().filter(|f| f.degree() == 3 && f.touches_boundary()).count();
        let quads = faces.iter().filter(|f| f.degree() == 4).count();
        assert_eq!((internal_3gons, boundary_3gons, quads), (1, 3, 3));
    }

    #[test]
    fn triangle_reduction_passes_through_an_internal_2gon() {
        let g = DiskGraph::from_chords(6, &[(0, 3), (1, 4), (2, 5)]).unwrap();
        let h = DiskGraph::from_chords(6, &[(0, 8), (1, 4), (2, 5)]);
        assert!(h.is_err());
        let start = DiskGraph::from_chords(6, &[(0, 3), (1, 4), (2, 5)]).unwrap();
        let trace = reduce(g).unwrap();
        assert_eq!(trace.steps.first().map(|s| s.kind), Some(MoveKind::Boundary3Gon));
        assert!(kinds(&trace).contains(&MoveKind::Internal2Gon));
        assert_euler_throughout(&trace);
        assert_strictly_decreasing(&trace, &start);
    }

    #[test]
    fn inverting_the_central_triangle_preserves_counts() {
        let mut g = DiskGraph::from_chords(6, &[(0, 3), (1, 4), (2, 5)]).unwrap();
        let faces = g.census().unwrap();
        let site = faces
            .iter()
            .position(|f| f.degree() == 3 && !f.touches_boundary())
            .expect("central 3-gon");
        let census_before: Vec<(usize, bool)> =
            faces.iter().map(|f| (f.degree(), f.touches_boundary())).collect();
        apply_move(&mut g, &RewriteMove { kind: MoveKind::Internal3GonInvert, site }).unwrap();
        assert_eq!((g.live_vertices(), g.live_edges()), (3, 9));
        g.euler_summands().unwrap();
        let faces_after = g.census().unwrap();
        let mut census_after: Vec<(usize, bool)> =
            faces_after.iter().map(|f| (f.degree(), f.touches_boundary())).collect();
        let mut census_before_sorted = census_before;
        census_before_sorted.sort_unstable();
        census_after.sort_unstable();
        assert_eq!(census_before_sorted, census_after);
        // The slid strand still reduces away afterwards.
        let trace = reduce(g).unwrap();
        assert_euler_throughout(&trace);
    }

    fn matchings(points: Vec<usize>) -> Vec<Vec<(usize, usize)>> {
        if points.is_empty() {
            return vec![Vec::new()];
        }
        let first = points[0];
        let mut out = Vec::new();
        for k in 1..points.len() {
            let partner = points[k];
            let rest: Vec<usize> =
                points[1..].iter().copied().filter(|&p| p != partner).collect();
            for mut m in matchings(rest) {
                m.insert(0, (first, partner));
                out.push(m);
            }
        }
        out
    }

    #[test]
    fn all_small_chord_arrangements_reduce() {
        let mut instances = 0;
        for k in 1..=4usize {
            for m in matchings((0..2 * k).collect()) {
                let start = DiskGraph::from_chords(2 * k, &m).unwrap();
                let trace = reduce(DiskGraph::from_chords(2 * k, &m).unwrap())
                    .unwrap_or_else(|e| panic!("arrangement {m:?} failed: {e}"));
                assert_euler_throughout(&trace);
                assert_strictly_decreasing(&trace, &start);
                assert_eq!(trace.residue, GraphSummary::default());
                instances += 1;
            }
        }
        assert_eq!(instances, 1 + 3 + 15 + 105);
    }

    #[test]
    fn success_is_stable_under_rotation_and_reflection() {
        for k in [3usize, 4] {
            for m in matchings((0..2 * k).collect()) {
                let rot: Vec<(usize, usize)> =
                    m.iter().map(|&(a, b)| ((a + 1) % (2 * k), (b + 1) % (2 * k))).collect();
                let refl: Vec<(usize, usize)> =
                    m.iter().map(|&(a, b)| (2 * k - 1 - a, 2 * k - 1 - b)).collect();
                for variant in [rot, refl] {
                    let g = DiskGraph::from_chords(2 * k, &variant).unwrap();
                    assert!(reduce(g).is_ok(), "variant {variant:?} got stuck");
                }
            }
        }
    }

    #[test]
    fn bare_circles_pop_first() {
        let mut g = DiskGraph::from_chords(2, &[(0, 1)]).unwrap();
        g.add_floating(2);
        let (v, e, f) = g.euler_summands().unwrap();
        assert_eq!((v, e, f), (0, 3, 4));
        let trace = reduce(g).unwrap();
        assert_eq!(
            kinds(&trace),
            vec![MoveKind::IsolatedLoop, MoveKind::IsolatedLoop, MoveKind::Boundary2Gon]
        );
    }

    #[test]
    fn tee_square_is_stuck() {
        let g = DiskGraph::tee_square();
        let faces = g.census().unwrap();
        assert_eq!(faces.len(), 5);
        assert!(faces.iter().all(|f| f.degree() >= 4));
        match reduce(g) {
            Err(RewriteError::Stuck { trace }) => {
                assert!(trace.steps.is_empty());
                assert_eq!(trace.residue.vertices, 4);
                assert_eq!(trace.residue.edges, 8);
                assert_eq!(trace.residue.face_degrees, vec![4, 4, 4, 4, 4]);
            }
            other => panic!("wanted a stuck report, got {other:?}"),
        }
    }

    #[test]
    fn one_gon_input_is_rejected() {
        // An arc from slot 0 that crosses itself once before reaching
        // slot 1: the curl bounds a 1-gon.
        let vspecs = vec![VertexSpec {
            kind: VertexKind::Degree4,
            label: 0,
            ports: vec![(0, 1), (1, 0), (1, 1), (2, 0)],
        }];
        let especs = vec![
            EdgeSpec { ends: [End::Slot(0), End::Port { vertex: 0, port: 0 }], label: 0 },
            EdgeSpec {
                ends: [End::Port { vertex: 0, port: 1 }, End::Port { vertex: 0, port: 2 }],
                label: 0,
            },
            EdgeSpec { ends: [End::Port { vertex: 0, port: 3 }, End::Slot(1)], label: 0 },
        ];
        let g = DiskGraph::from_parts(Mode::Crossings, 2, vspecs, especs).unwrap();
        match find_reducible_site(&g) {
            Err(RewriteError::ForbiddenOneGon { .. }) => {}
            other => panic!("wanted the 1-gon rejection, got {other:?}"),
        }
    }

    #[test]
    fn blocked_double_crossings_invert_their_way_out() {
        // Uncrossing the first corner merges two arcs into one strand that
        // meets another strand twice, with a third strand running between
        // the two meetings. Only an inversion can clear that blockage.
        let m = [(0usize, 4usize), (1, 6), (2, 5), (3, 7)];
        let start = DiskGraph::from_chords(8, &m).unwrap();
        let trace = reduce(DiskGraph::from_chords(8, &m).unwrap()).unwrap();
        assert!(kinds(&trace).contains(&MoveKind::Internal3GonInvert));
        assert!(kinds(&trace).contains(&MoveKind::Internal2Gon));
        assert_euler_throughout(&trace);
        assert_strictly_decreasing(&trace, &start);
    }

    #[test]
    fn traces_are_deterministic() {
        let m = [(0usize, 4usize), (1, 5), (2, 6), (3, 7)];
        let t1 = reduce(DiskGraph::from_chords(8, &m).unwrap()).unwrap();
        let t2 = reduce(DiskGraph::from_chords(8, &m).unwrap()).unwrap();
        assert_eq!(t1, t2);
    }

    #[test]
    fn descent_sites_are_never_produced() {
        let mut g = DiskGraph::from_chords(2, &[(0, 1)]).unwrap();
        let err = apply_move(&mut g, &RewriteMove { kind: MoveKind::InnerComponentDescent, site: 0 });
        assert!(matches!(err, Err(RewriteError::InvalidSite(_))));
    }

    mod random_arrangements {
        use super::*;
        use proptest::prelude::*;

        fn matching_from_keys(keys: [u8; 12]) -> Vec<(usize, usize)> {
            let mut idx: Vec<usize> = (0..12).collect();
            idx.sort_by_key(|&i| (keys[i], i));
            idx.chunks(2).map(|c| (c[0], c[1])).collect()
        }

        proptest! {
            #[test]
            fn random_chord_arrangements_reduce(keys in any::<[u8; 12]>()) {
                let m = matching_from_keys(keys);
                let start = DiskGraph::from_chords(12, &m).unwrap();
                let trace = reduce(DiskGraph::from_chords(12, &m).unwrap()).unwrap();
                prop_assert!(trace.residue == GraphSummary::default());
                let mut prev = start.measure().unwrap();
                for step in &trace.steps {
                    prop_assert_eq!(
                        step.vertices as i64 - step.edges as i64 + step.faces as i64, 1);
                    prop_assert!(step.measure < prev);
                    prev = step.measure.clone();
                }
            }
        }
    }
}
