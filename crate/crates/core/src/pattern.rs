//! Curve patterns on closed surfaces and the small-disk candidate machinery.
//!
//! A pattern is a graph embedded in a closed surface. The embedding is a
//! rotation system ([`EMap`]); on carriers of positive genus the boundary
//! walks are additionally grouped into faces, so that an annulus face owns
//! its two walks. Edges carry a piece id (which curve of the pattern they
//! belong to) and an optional label; faces carry an optional label; degree-2
//! vertices can be flagged as markers, meaning they subdivide a curve
//! without being genuine switch points.
//!
//! The candidate machinery enumerates embedded loops meeting the pattern in
//! at most three transverse points. A loop is encoded by its crossing darts:
//! crossing dart `c_i` is the dart of the i-th crossed edge whose left face
//! is entered after the crossing, so consecutive crossings are joined by a
//! chord inside `left(c_i)`, and validity means `left(c_i) ==
//! left(theta(c_{i+1}))` cyclically. Chords cut faces into parts; flooding
//! parts and pattern together across everything except the chords decides
//! whether the loop separates, what lies on each side, and the Euler
//! characteristic of each side. Removable configurations are recognised
//! structurally: a bigon hugging one edge, a two-crossing loop cutting off a
//! bare arc, and a three-crossing loop cutting off a single Y (one real
//! vertex with three stubs).

use crate::emap::EMap;
use crate::util::DisjointSets;
use std::collections::{BTreeSet, HashMap};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum PatternError {
    #[error("bad face grouping: {0}")]
    BadFaces(String),
    #[error("bad candidate word: {0}")]
    BadWord(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FaceKind {
    Disk,
    Annulus,
}

/// One face of the pattern complement: a disk owns one boundary walk, an
/// annulus owns two.
#[derive(Clone, Debug)]
pub struct FaceGroup {
    pub kind: FaceKind,
    /// Walk ids are phi-orbit indices of the map.
    pub walks: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct Pattern {
    map: EMap,
    faces: Vec<FaceGroup>,
    /// Face id per walk (phi-orbit index).
    walk_face: Vec<usize>,
    /// Walks as dart cycles, indexed by phi-orbit.
    walks: Vec<Vec<usize>>,
    /// Vertex id per dart (sigma-orbit index).
    vertex_of: Vec<usize>,
    n_vertices: usize,
    marker: Vec<bool>,
    piece: Vec<usize>,
    edge_label: Vec<Option<u32>>,
    face_label: Vec<Option<u32>>,
}

impl Pattern {
    /// Builds a pattern whose complementary faces are all disks; each
    /// connected component of the map must then be a sphere.
    pub fn on_sphere(map: EMap) -> Result<Pattern, PatternError> {
        for (_, chi) in map.component_euler() {
            if chi != 2 {
                return Err(PatternError::BadFaces(format!(
                    "component has Euler characteristic {chi}, so its walks do not bound disks"
                )));
            }
        }
        let walks = map.faces().orbits().to_vec();
        let faces = (0..walks.len())
            .map(|w| FaceGroup { kind: FaceKind::Disk, walks: vec![w] })
            .collect();
        Self::assemble(map, faces, walks)
    }

    /// Builds a pattern with an explicit face grouping, e.g. on a torus.
    pub fn on_surface(map: EMap, faces: Vec<FaceGroup>) -> Result<Pattern, PatternError> {
        let walks = map.faces().orbits().to_vec();
        let mut seen = vec![false; walks.len()];
        for fg in &faces {
            let expect = match fg.kind {
                FaceKind::Disk => 1,
                FaceKind::Annulus => 2,
            };
            if fg.walks.len() != expect {
                return Err(PatternError::BadFaces(format!(
                    "{:?} face with {} walks",
                    fg.kind,
                    fg.walks.len()
                )));
            }
            for &w in &fg.walks {
                if w >= walks.len() {
                    return Err(PatternError::BadFaces(format!("walk {w} out of range")));
                }
                if seen[w] {
                    return Err(PatternError::BadFaces(format!("walk {w} grouped twice")));
                }
                seen[w] = true;
            }
        }
        if let Some(w) = seen.iter().position(|&s| !s) {
            return Err(PatternError::BadFaces(format!("walk {w} not grouped into a face")));
        }
        Self::assemble(map, faces, walks)
    }

    fn assemble(
        map: EMap,
        faces: Vec<FaceGroup>,
        walks: Vec<Vec<usize>>,
    ) -> Result<Pattern, PatternError> {
        let mut walk_face = vec![0usize; walks.len()];
        for (f, fg) in faces.iter().enumerate() {
            for &w in &fg.walks {
                walk_face[w] = f;
            }
        }
        let verts = map.vertices();
        let vertex_of: Vec<usize> = (0..map.darts()).map(|d| verts.orbit_of(d)).collect();
        let n_vertices = verts.len();
        let edges = map.edges();
        let n_faces = faces.len();
        Ok(Pattern {
            map,
            faces,
            walk_face,
            walks,
            vertex_of,
            n_vertices,
            marker: vec![false; n_vertices],
            piece: (0..edges).collect(),
            edge_label: vec![None; edges],
            face_label: vec![None; n_faces],
        })
    }

    pub fn map(&self) -> &EMap {
        &self.map
    }

    pub fn faces(&self) -> &[FaceGroup] {
        &self.faces
    }

    pub fn walk(&self, walk: usize) -> &[usize] {
        &self.walks[walk]
    }

    pub fn face_of_walk(&self, walk: usize) -> usize {
        self.walk_face[walk]
    }

    /// Face on the left of a dart.
    pub fn left_face(&self, dart: usize) -> usize {
        self.walk_face[self.walk_of(dart)]
    }

    fn walk_of(&self, dart: usize) -> usize {
        self.map.faces().orbit_of(dart)
    }

    pub fn vertex_of(&self, dart: usize) -> usize {
        self.vertex_of[dart]
    }

    pub fn vertices(&self) -> usize {
        self.n_vertices
    }

    pub fn set_marker(&mut self, vertex: usize, on: bool) {
        self.marker[vertex] = on;
    }

    pub fn is_marker(&self, vertex: usize) -> bool {
        self.marker[vertex]
    }

    pub fn set_piece(&mut self, edge: usize, piece: usize) {
        self.piece[edge] = piece;
    }

    pub fn piece(&self, edge: usize) -> usize {
        self.piece[edge]
    }

    pub fn set_edge_label(&mut self, edge: usize, label: Option<u32>) {
        self.edge_label[edge] = label;
    }

    pub fn edge_label(&self, edge: usize) -> Option<u32> {
        self.edge_label[edge]
    }

    pub fn set_face_label(&mut self, face: usize, label: Option<u32>) {
        self.face_label[face] = label;
    }

    pub fn face_label(&self, face: usize) -> Option<u32> {
        self.face_label[face]
    }

    /// Euler characteristic of the carrier surface (summed over components).
    pub fn carrier_euler(&self) -> i64 {
        let v = self.n_vertices as i64;
        let e = self.map.edges() as i64;
        let f: i64 = self
            .faces
            .iter()
            .map(|fg| match fg.kind {
                FaceKind::Disk => 1i64,
                FaceKind::Annulus => 0,
            })
            .sum();
        v - e + f
    }

    /// Degree of a face: the number of dart occurrences on its walks.
    pub fn face_degree(&self, face: usize) -> usize {
        self.faces[face].walks.iter().map(|&w| self.walks[w].len()).sum()
    }

    /// Corners of a face: visits of its walks at non-marker vertices where
    /// the incoming and outgoing edges belong to different pieces.
    pub fn face_corners(&self, face: usize) -> usize {
        let mut corners = 0;
        for &w in &self.faces[face].walks {
            let walk = &self.walks[w];
            for (i, &d) in walk.iter().enumerate() {
                let next = walk[(i + 1) % walk.len()];
                // The walk passes through the head vertex of d, which is
                // the tail vertex of the next dart.
                let v = self.vertex_of[next];
                if self.marker[v] {
                    continue;
                }
                if self.piece[self.map.edge_of(d)] != self.piece[self.map.edge_of(next)] {
                    corners += 1;
                }
            }
        }
        corners
    }

    /// Census of faces by kind and corner count, sorted.
    pub fn census(&self) -> Vec<CensusEntry> {
        let mut counts: HashMap<(FaceKind, usize), usize> = HashMap::new();
        for f in 0..self.faces.len() {
            let kind = self.faces[f].kind;
            let corners = match kind {
                FaceKind::Disk => self.face_corners(f),
                FaceKind::Annulus => 0,
            };
            *counts.entry((kind, corners)).or_default() += 1;
        }
        let mut out: Vec<CensusEntry> = counts
            .into_iter()
            .map(|((kind, corners), count)| CensusEntry { kind, corners, count })
            .collect();
        out.sort_by_key(|e| (e.kind, e.corners));
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CensusEntry {
    pub kind: FaceKind,
    pub corners: usize,
    pub count: usize,
}

// ---------------------------------------------------------------------------
// Candidate loops.

/// How a chord with both endpoints on one walk of an annulus face is drawn:
/// the disk it cuts off contains either the forward boundary arc (from the
/// chord's start point to its end point in walk direction) or the backward
/// arc.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Way {
    Direct,
    Backward,
}

impl Way {
    fn flipped(self) -> Way {
        match self {
            Way::Direct => Way::Backward,
            Way::Backward => Way::Direct,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Word {
    /// A loop inside one face, bounding a disk of bare face interior.
    FaceInterior { face: usize },
    /// The core circle of an annulus face.
    AnnulusCore { face: usize },
    /// A bigon crossing one edge twice and hugging the segment in between.
    EdgeBigon { edge: usize },
    /// A loop crossing `darts.len()` distinct edges; `ways[i]` picks the
    /// drawing of the chord after crossing i.
    Crossings { darts: Vec<usize>, ways: Vec<Way> },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Origin {
    Enumerated,
    Meridian,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Disposition {
    /// Removable: hugs an edge, cuts off a bare arc or a single Y, or
    /// bounds bare face interior.
    Trivial,
    /// Bounds a disk side (or is declared to bound one) that is not a
    /// removable configuration.
    Essential,
    /// Bounds no disk on the carrier; ignored unless declared a meridian.
    NotADisk,
    /// Chord layout the side machinery does not handle; callers must
    /// degrade to a partial verdict rather than pass.
    Unsupported,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SideInfo {
    pub euler: i64,
    pub vertices: usize,
    pub real_vertices: usize,
    pub full_edges: usize,
    pub parts: usize,
    pub is_disk: bool,
    pub single_arc: bool,
    pub single_y: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ChordInfo {
    pub face: usize,
    /// True when both chord endpoints lie on the same boundary walk; the
    /// chord can then be pushed into that walk.
    pub parallel: bool,
}

#[derive(Clone, Debug)]
pub struct Candidate {
    pub word: Word,
    pub origin: Origin,
    pub disposition: Disposition,
    /// Left and right side of the directed loop, when it separates.
    pub sides: Option<[SideInfo; 2]>,
    pub chords: Vec<ChordInfo>,
}

impl Candidate {
    pub fn crossings(&self) -> usize {
        match &self.word {
            Word::FaceInterior { .. } | Word::AnnulusCore { .. } => 0,
            Word::EdgeBigon { .. } => 2,
            Word::Crossings { darts, .. } => darts.len(),
        }
    }
}

/// Internal: one chord of a candidate.
#[derive(Clone, Copy, Debug)]
struct Chord {
    face: usize,
    /// Crossing index whose dart occurrence carries the start point.
    start_crossing: usize,
    /// Crossing index whose theta-dart occurrence carries the end point.
    end_crossing: usize,
    way: Way,
}

/// Internal: items along a face walk, split at crossing points.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Item {
    /// Whole occurrence of an uncrossed edge (dart given).
    Edge(usize),
    /// Tail half of crossed edge i (the half at the tail vertex of c_i).
    TailGerm(usize),
    /// Head half of crossed edge i.
    HeadGerm(usize),
    /// Chord endpoint: (chord index, true = start point).
    Endpoint(usize, bool),
    /// Passing through a vertex between edges.
    Vertex(usize),
}

impl Pattern {
    /// All candidate loops with at most `max_crossings` crossings (at most
    /// 3), deduplicated up to rotation and reversal.
    pub fn enumerate_candidates(&self, max_crossings: usize) -> Vec<Candidate> {
        assert!(max_crossings <= 3);
        let mut out = Vec::new();
        for face in 0..self.faces.len() {
            out.push(self.face_interior_candidate(face));
            if self.faces[face].kind == FaceKind::Annulus {
                out.push(self.classify_core(face));
            }
        }
        if max_crossings >= 2 {
            for e in 0..self.map.edges() {
                out.push(Candidate {
                    word: Word::EdgeBigon { edge: e },
                    origin: Origin::Enumerated,
                    disposition: Disposition::Trivial,
                    sides: None,
                    chords: vec![
                        ChordInfo { face: self.left_face(2 * e), parallel: true },
                        ChordInfo { face: self.left_face(2 * e + 1), parallel: true },
                    ],
                });
            }
        }
        let mut seen: BTreeSet<Vec<(usize, Way)>> = BTreeSet::new();
        let darts = self.map.darts();
        if max_crossings >= 1 {
            for c in 0..darts {
                if self.left_face(c) == self.left_face(self.map.theta(c)) {
                    self.emit_word(&[c], &mut seen, &mut out, Origin::Enumerated);
                }
            }
        }
        if max_crossings >= 2 {
            for c1 in 0..darts {
                for c2 in 0..darts {
                    if self.map.edge_of(c1) == self.map.edge_of(c2) {
                        continue;
                    }
                    if self.corridor_ok(c1, c2) && self.corridor_ok(c2, c1) {
                        self.emit_word(&[c1, c2], &mut seen, &mut out, Origin::Enumerated);
                    }
                }
            }
        }
        if max_crossings >= 3 {
            for c1 in 0..darts {
                for c2 in 0..darts {
                    if self.map.edge_of(c1) == self.map.edge_of(c2) || !self.corridor_ok(c1, c2) {
                        continue;
                    }
                    for c3 in 0..darts {
                        if self.map.edge_of(c3) == self.map.edge_of(c1)
                            || self.map.edge_of(c3) == self.map.edge_of(c2)
                        {
                            continue;
                        }
                        if self.corridor_ok(c2, c3) && self.corridor_ok(c3, c1) {
                            self.emit_word(&[c1, c2, c3], &mut seen, &mut out, Origin::Enumerated);
                        }
                    }
                }
            }
        }
        out
    }

    /// A user-declared compression word: the loop is asserted to bound a
    /// disk off the carrier, so a loop the side machinery cannot prove
    /// removable counts as essential.
    pub fn meridian_candidate(&self, darts: &[usize]) -> Result<Vec<Candidate>, PatternError> {
        if darts.is_empty() {
            return Err(PatternError::BadWord("empty meridian word".into()));
        }
        for d in darts {
            if *d >= self.map.darts() {
                return Err(PatternError::BadWord(format!("dart {d} out of range")));
            }
        }
        let mut edges: Vec<usize> = darts.iter().map(|&d| self.map.edge_of(d)).collect();
        edges.sort_unstable();
        edges.dedup();
        if edges.len() != darts.len() {
            return Err(PatternError::BadWord(
                "meridian words with repeated edges are not supported".into(),
            ));
        }
        for i in 0..darts.len() {
            let next = darts[(i + 1) % darts.len()];
            if !self.corridor_ok(darts[i], next) {
                return Err(PatternError::BadWord(format!(
                    "crossing {} does not border the corridor face entered at crossing {i}",
                    (i + 1) % darts.len()
                )));
            }
        }
        let mut cands = self.realizations(darts, Origin::Meridian);
        if cands.is_empty() {
            return Err(PatternError::BadWord(
                "no embedded drawing: the chords of the word cross each other".into(),
            ));
        }
        for c in &mut cands {
            // Declared to bound a disk: not removable means essential.
            if c.disposition == Disposition::NotADisk {
                c.disposition = Disposition::Essential;
            }
        }
        Ok(cands)
    }

    fn corridor_ok(&self, c: usize, next: usize) -> bool {
        self.left_face(c) == self.left_face(self.map.theta(next))
    }

    fn emit_word(
        &self,
        darts: &[usize],
        seen: &mut BTreeSet<Vec<(usize, Way)>>,
        out: &mut Vec<Candidate>,
        origin: Origin,
    ) {
        for cand in self.realizations(darts, origin) {
            let key = match &cand.word {
                Word::Crossings { darts, ways } => self.canonical_key(darts, ways),
                _ => unreachable!("realizations emits crossing words"),
            };
            if seen.insert(key) {
                out.push(cand);
            }
        }
    }

    /// Expands way choices and classifies each embeddable drawing.
    fn realizations(&self, darts: &[usize], origin: Origin) -> Vec<Candidate> {
        let k = darts.len();
        // Chords with a way choice: both endpoints on one walk of an
        // annulus face.
        let mut way_slots = Vec::new();
        for i in 0..k {
            if self.chord_has_way_choice(darts, i) {
                way_slots.push(i);
            }
        }
        let mut out = Vec::new();
        for mask in 0..(1u32 << way_slots.len()) {
            let mut ways = vec![Way::Direct; k];
            for (bit, &slot) in way_slots.iter().enumerate() {
                if mask & (1 << bit) != 0 {
                    ways[slot] = Way::Backward;
                }
            }
            if let Some(c) = self.classify_crossings(darts.to_vec(), ways, origin) {
                out.push(c);
            }
        }
        out
    }

    fn chord_has_way_choice(&self, darts: &[usize], i: usize) -> bool {
        let k = darts.len();
        let face = self.left_face(darts[i]);
        if self.faces[face].kind != FaceKind::Annulus {
            return false;
        }
        let start_walk = self.walk_of(darts[i]);
        let end_walk = self.walk_of(self.map.theta(darts[(i + 1) % k]));
        start_walk == end_walk
    }

    /// Canonical form of a crossing word up to rotation and reversal.
    fn canonical_key(&self, darts: &[usize], ways: &[Way]) -> Vec<(usize, Way)> {
        let k = darts.len();
        let mut best: Option<Vec<(usize, Way)>> = None;
        let mut consider = |cand: Vec<(usize, Way)>| {
            if best.is_none() || cand < *best.as_ref().unwrap() {
                best = Some(cand);
            }
        };
        for rot in 0..k {
            consider((0..k).map(|i| (darts[(rot + i) % k], ways[(rot + i) % k])).collect());
        }
        // Reversal: the backwards loop crosses edge 0 then edge k-1 down to
        // edge 1, entering the opposite flanks; chord j of the reversed
        // word is chord k-1-j of the original with its disk arc described
        // from the other endpoint, which flips way choices.
        let rev_darts: Vec<usize> = (0..k).map(|j| self.map.theta(darts[(k - j) % k])).collect();
        let rev_ways: Vec<Way> = (0..k)
            .map(|j| {
                let orig = k - 1 - j;
                if self.chord_has_way_choice(darts, orig) {
                    ways[orig].flipped()
                } else {
                    ways[orig]
                }
            })
            .collect();
        for rot in 0..k {
            consider((0..k).map(|i| (rev_darts[(rot + i) % k], rev_ways[(rot + i) % k])).collect());
        }
        best.unwrap()
    }

    fn face_interior_candidate(&self, face: usize) -> Candidate {
        let inside = SideInfo {
            euler: 1,
            vertices: 0,
            real_vertices: 0,
            full_edges: 0,
            parts: 1,
            is_disk: true,
            single_arc: false,
            single_y: false,
        };
        let euler = self.carrier_euler() - 1;
        let outside = SideInfo {
            euler,
            vertices: self.n_vertices,
            real_vertices: (0..self.n_vertices).filter(|&v| !self.marker[v]).count(),
            full_edges: self.map.edges(),
            parts: self.faces.len(),
            is_disk: euler == 1,
            single_arc: false,
            single_y: false,
        };
        Candidate {
            word: Word::FaceInterior { face },
            origin: Origin::Enumerated,
            disposition: Disposition::Trivial,
            sides: Some([inside, outside]),
            chords: Vec::new(),
        }
    }

    fn classify_core(&self, face: usize) -> Candidate {
        // The core splits its annulus into two annular shores; flood the
        // rest of the pattern from them. Part id f stands for the whole
        // face f; the two shores get fresh ids.
        let fg = &self.faces[face];
        let n_parts = self.faces.len() + 2;
        let shore = [self.faces.len(), self.faces.len() + 1];
        let mut uf = FloodState::new(self, n_parts);
        for f in 0..self.faces.len() {
            if f == face {
                continue;
            }
            for &w in &self.faces[f].walks {
                for &d in &self.walks[w] {
                    uf.join_part_vertex(f, self.vertex_of[d]);
                }
            }
        }
        for (i, &w) in fg.walks.iter().enumerate() {
            for &d in &self.walks[w] {
                uf.join_part_vertex(shore[i], self.vertex_of[d]);
            }
        }
        for e in 0..self.map.edges() {
            uf.join_vertices(self.vertex_of[2 * e], self.vertex_of[2 * e + 1]);
        }
        let l = uf.find_part(shore[0]);
        let r = uf.find_part(shore[1]);
        if l == r {
            return Candidate {
                word: Word::AnnulusCore { face },
                origin: Origin::Enumerated,
                disposition: Disposition::NotADisk,
                sides: None,
                chords: Vec::new(),
            };
        }
        let mut part_chi: Vec<i64> = (0..self.faces.len())
            .map(|f| match self.faces[f].kind {
                FaceKind::Disk => 1,
                FaceKind::Annulus => 0,
            })
            .collect();
        part_chi.push(0);
        part_chi.push(0);
        part_chi[face] = i64::MIN; // the cut face itself is not a part
        let sides = uf.tally(self, l, r, &part_chi, &[], 0);
        let disposition = if sides[0].is_disk || sides[1].is_disk {
            Disposition::Essential
        } else {
            Disposition::NotADisk
        };
        Candidate {
            word: Word::AnnulusCore { face },
            origin: Origin::Enumerated,
            disposition,
            sides: Some(sides),
            chords: Vec::new(),
        }
    }

    /// Classifies one drawing; None when the chords cannot be drawn
    /// disjointly, so the word has no embedded realization with these ways.
    fn classify_crossings(
        &self,
        darts: Vec<usize>,
        ways: Vec<Way>,
        origin: Origin,
    ) -> Option<Candidate> {
        let k = darts.len();
        let mut chords = Vec::with_capacity(k);
        for i in 0..k {
            chords.push(Chord {
                face: self.left_face(darts[i]),
                start_crossing: i,
                end_crossing: (i + 1) % k,
                way: ways[i],
            });
        }
        let chord_infos: Vec<ChordInfo> = (0..k)
            .map(|i| ChordInfo {
                face: chords[i].face,
                parallel: self.walk_of(darts[i])
                    == self.walk_of(self.map.theta(darts[(i + 1) % k])),
            })
            .collect();
        let word = Word::Crossings { darts: darts.clone(), ways };

        match self.flood_sides(&darts, &chords) {
            Err(FloodProblem::NotEmbeddable) => None,
            Err(FloodProblem::Unsupported) => Some(Candidate {
                word,
                origin,
                disposition: Disposition::Unsupported,
                sides: None,
                chords: chord_infos,
            }),
            Ok(None) => Some(Candidate {
                word,
                origin,
                disposition: Disposition::NotADisk,
                sides: None,
                chords: chord_infos,
            }),
            Ok(Some(sides)) => {
                let has_disk = sides[0].is_disk || sides[1].is_disk;
                let disposition = if !has_disk {
                    Disposition::NotADisk
                } else {
                    let removable = match k {
                        1 => false,
                        2 => sides.iter().any(|s| s.single_arc),
                        _ => sides.iter().any(|s| s.single_y),
                    };
                    if removable {
                        Disposition::Trivial
                    } else {
                        Disposition::Essential
                    }
                };
                Some(Candidate {
                    word,
                    origin,
                    disposition,
                    sides: Some(sides),
                    chords: chord_infos,
                })
            }
        }
    }

    /// Splits faces along the chords, floods, and reports the two sides of
    /// the loop (Ok(None) when the loop does not separate the carrier).
    fn flood_sides(
        &self,
        darts: &[usize],
        chords: &[Chord],
    ) -> Result<Option<[SideInfo; 2]>, FloodProblem> {
        let k = darts.len();
        let mut crossing_of: HashMap<usize, usize> = HashMap::new();
        for (i, &d) in darts.iter().enumerate() {
            crossing_of.insert(self.map.edge_of(d), i);
        }
        let mut face_chords: HashMap<usize, Vec<usize>> = HashMap::new();
        for (ci, ch) in chords.iter().enumerate() {
            face_chords.entry(ch.face).or_default().push(ci);
        }

        let mut parts = PartTable::new();
        let mut chord_left = vec![usize::MAX; k];
        let mut chord_right = vec![usize::MAX; k];

        for face in 0..self.faces.len() {
            let empty = Vec::new();
            let cs = face_chords.get(&face).unwrap_or(&empty);
            match self.faces[face].kind {
                FaceKind::Disk => self.split_disk_face(
                    face,
                    cs,
                    chords,
                    darts,
                    &crossing_of,
                    &mut parts,
                    &mut chord_left,
                    &mut chord_right,
                )?,
                FaceKind::Annulus => self.split_annulus_face(
                    face,
                    cs,
                    chords,
                    darts,
                    &crossing_of,
                    &mut parts,
                    &mut chord_left,
                    &mut chord_right,
                )?,
            }
        }

        let mut uf = FloodState::new(self, parts.count);
        for &(part, item) in &parts.adjacency {
            match item {
                Item::Vertex(v) => uf.join_part_vertex(part, v),
                Item::Edge(d) => {
                    let e = self.map.edge_of(d);
                    uf.join_part_vertex(part, self.vertex_of[2 * e]);
                    uf.join_part_vertex(part, self.vertex_of[2 * e + 1]);
                }
                Item::TailGerm(i) => uf.join_part_vertex(part, self.vertex_of[darts[i]]),
                Item::HeadGerm(i) => {
                    uf.join_part_vertex(part, self.vertex_of[self.map.theta(darts[i])])
                }
                Item::Endpoint(..) => {}
            }
        }
        for e in 0..self.map.edges() {
            if !crossing_of.contains_key(&e) {
                uf.join_vertices(self.vertex_of[2 * e], self.vertex_of[2 * e + 1]);
            }
        }

        // The collar along the loop connects all left flanks, and all right
        // flanks, regardless of pattern content.
        for i in 1..k {
            uf.join_parts(chord_left[0], chord_left[i]);
            uf.join_parts(chord_right[0], chord_right[i]);
        }
        let l = uf.find_part(chord_left[0]);
        let r = uf.find_part(chord_right[0]);
        if l == r {
            return Ok(None);
        }
        let crossed: Vec<usize> = crossing_of.keys().copied().collect();
        Ok(Some(uf.tally(self, l, r, &parts.chi, &crossed, k)))
    }

    #[allow(clippy::too_many_arguments)]
    fn split_disk_face(
        &self,
        face: usize,
        chord_ids: &[usize],
        chords: &[Chord],
        darts: &[usize],
        crossing_of: &HashMap<usize, usize>,
        parts: &mut PartTable,
        chord_left: &mut [usize],
        chord_right: &mut [usize],
    ) -> Result<(), FloodProblem> {
        let walk = &self.walks[self.faces[face].walks[0]];
        let items = self.walk_items(walk, darts, crossing_of, chords, chord_ids);
        let n = items.len();
        // Scaled positions: item i sits at 2i; probes between items use odd
        // coordinates, so no probe ever collides with an endpoint.
        let mut endpoints: Vec<(usize, usize, bool)> = Vec::new();
        for (pos, item) in items.iter().enumerate() {
            if let Item::Endpoint(ci, is_start) = *item {
                endpoints.push((2 * pos, ci, is_start));
            }
        }
        if endpoints.is_empty() {
            let part = parts.fresh(1);
            for item in &items {
                parts.adjacency.push((part, *item));
            }
            return Ok(());
        }
        let mut span: HashMap<usize, (usize, usize)> = HashMap::new();
        for &(pos, ci, _) in &endpoints {
            let entry = span.entry(ci).or_insert((usize::MAX, usize::MAX));
            if entry.0 == usize::MAX {
                entry.0 = pos;
            } else {
                entry.1 = pos;
            }
        }
        let spans: Vec<(usize, usize)> =
            span.values().map(|&(a, b)| (a.min(b), a.max(b))).collect();
        // Chords of an embedded loop cannot interleave around a disk.
        for i in 0..spans.len() {
            for j in i + 1..spans.len() {
                let (a1, b1) = spans[i];
                let (a2, b2) = spans[j];
                let inside1 = |x: usize| x > a1 && x < b1;
                if inside1(a2) != inside1(b2) {
                    return Err(FloodProblem::NotEmbeddable);
                }
            }
        }
        // Two probe positions lie in the same part exactly when no chord
        // span separates them.
        let separated = |x: usize, y: usize| -> bool {
            spans.iter().any(|&(a, b)| (x > a && x < b) != (y > a && y < b))
        };
        let n2 = 2 * n;
        let probes: Vec<usize> = endpoints.iter().map(|&(p, _, _)| (p + 1) % n2).collect();
        let mut part_of_probe: Vec<usize> = vec![usize::MAX; probes.len()];
        for i in 0..probes.len() {
            if part_of_probe[i] != usize::MAX {
                continue;
            }
            let part = parts.fresh(1);
            part_of_probe[i] = part;
            for j in i + 1..probes.len() {
                if part_of_probe[j] == usize::MAX && !separated(probes[i], probes[j]) {
                    part_of_probe[j] = part;
                }
            }
        }
        // Part of the interval containing scaled position x: shared with
        // the probe after the nearest endpoint at nonzero distance before x.
        let part_at = |x: usize| -> usize {
            let mut best = 0usize;
            let mut best_dist = usize::MAX;
            for (i, &(p, _, _)) in endpoints.iter().enumerate() {
                let dist = (x + n2 - p) % n2;
                if dist != 0 && dist < best_dist {
                    best_dist = dist;
                    best = i;
                }
            }
            part_of_probe[best]
        };
        for (pos, item) in items.iter().enumerate() {
            if matches!(item, Item::Endpoint(..)) {
                continue;
            }
            parts.adjacency.push((part_at(2 * pos), *item));
        }
        // Flanks: at a start point (on dart c_i) the walk runs tail germ,
        // endpoint, head germ, and the tail side is the loop's left; at an
        // end point (on theta of the next crossing dart) the walk runs head
        // germ, endpoint, tail germ, and the tail side is still the left.
        for &(pos, ci, is_start) in &endpoints {
            let before = part_at((pos + n2 - 1) % n2);
            let after = part_at((pos + 1) % n2);
            if is_start {
                chord_left[ci] = before;
                chord_right[ci] = after;
            } else {
                chord_left[ci] = after;
                chord_right[ci] = before;
            }
        }
        Ok(())
    }

    #[allow(clippy::too_many_arguments)]
    fn split_annulus_face(
        &self,
        face: usize,
        chord_ids: &[usize],
        chords: &[Chord],
        darts: &[usize],
        crossing_of: &HashMap<usize, usize>,
        parts: &mut PartTable,
        chord_left: &mut [usize],
        chord_right: &mut [usize],
    ) -> Result<(), FloodProblem> {
        let fg = &self.faces[face];
        match chord_ids.len() {
            0 => {
                let part = parts.fresh(0);
                for &w in &fg.walks {
                    for item in
                        self.walk_items(&self.walks[w], darts, crossing_of, chords, chord_ids)
                    {
                        parts.adjacency.push((part, item));
                    }
                }
                Ok(())
            }
            1 => {
                let ci = chord_ids[0];
                let ch = chords[ci];
                let start_dart = darts[ch.start_crossing];
                let end_dart = self.map.theta(darts[ch.end_crossing]);
                if self.walk_of(start_dart) == self.walk_of(end_dart) {
                    self.split_annulus_same_walk(
                        face,
                        ci,
                        ch,
                        darts,
                        crossing_of,
                        chords,
                        chord_ids,
                        parts,
                        chord_left,
                        chord_right,
                    );
                    Ok(())
                } else {
                    // A spanning chord opens the annulus into one disk; the
                    // loop meets the core circle once there, so the part
                    // wraps around and touches both flanks.
                    let part = parts.fresh(1);
                    for &w in &fg.walks {
                        for item in
                            self.walk_items(&self.walks[w], darts, crossing_of, chords, chord_ids)
                        {
                            if !matches!(item, Item::Endpoint(..)) {
                                parts.adjacency.push((part, item));
                            }
                        }
                    }
                    chord_left[ci] = part;
                    chord_right[ci] = part;
                    Ok(())
                }
            }
            _ => Err(FloodProblem::Unsupported),
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn split_annulus_same_walk(
        &self,
        face: usize,
        ci: usize,
        ch: Chord,
        darts: &[usize],
        crossing_of: &HashMap<usize, usize>,
        chords: &[Chord],
        chord_ids: &[usize],
        parts: &mut PartTable,
        chord_left: &mut [usize],
        chord_right: &mut [usize],
    ) {
        let fg = &self.faces[face];
        let start_dart = darts[ch.start_crossing];
        let cut_walk =
            if self.walk_of(start_dart) == fg.walks[0] { fg.walks[0] } else { fg.walks[1] };
        let other_walk = if cut_walk == fg.walks[0] { fg.walks[1] } else { fg.walks[0] };
        let items = self.walk_items(&self.walks[cut_walk], darts, crossing_of, chords, chord_ids);
        let other_items =
            self.walk_items(&self.walks[other_walk], darts, crossing_of, chords, chord_ids);
        let n2 = 2 * items.len();
        let mut pos_start = usize::MAX;
        let mut pos_end = usize::MAX;
        for (pos, item) in items.iter().enumerate() {
            if let Item::Endpoint(c, is_start) = *item {
                if c == ci {
                    if is_start {
                        pos_start = 2 * pos;
                    } else {
                        pos_end = 2 * pos;
                    }
                }
            }
        }
        debug_assert!(pos_start != usize::MAX && pos_end != usize::MAX);
        let disk_part = parts.fresh(1);
        let hole_part = parts.fresh(0);
        let rel_end = (pos_end + n2 - pos_start) % n2;
        let forward = |x: usize| -> bool {
            let rel = (x + n2 - pos_start) % n2;
            rel > 0 && rel < rel_end
        };
        // The disk cut off by the chord holds the forward arc exactly when
        // the way is Direct; the hole part keeps the annulus topology and
        // the whole other walk.
        let part_at =
            |x: usize| if forward(x) == (ch.way == Way::Direct) { disk_part } else { hole_part };
        for (pos, item) in items.iter().enumerate() {
            if matches!(item, Item::Endpoint(..)) {
                continue;
            }
            parts.adjacency.push((part_at(2 * pos), *item));
        }
        for item in &other_items {
            parts.adjacency.push((hole_part, *item));
        }
        // The item just before the start point lies on the loop's left.
        let before_part = part_at((pos_start + n2 - 1) % n2);
        let other = if before_part == disk_part { hole_part } else { disk_part };
        chord_left[ci] = before_part;
        chord_right[ci] = other;
    }

    /// Expands a walk into items, splitting crossed edges at their crossing
    /// point and inserting chord endpoints.
    fn walk_items(
        &self,
        walk: &[usize],
        darts: &[usize],
        crossing_of: &HashMap<usize, usize>,
        chords: &[Chord],
        chord_ids: &[usize],
    ) -> Vec<Item> {
        let mut items = Vec::new();
        for &d in walk {
            let e = self.map.edge_of(d);
            if let Some(&i) = crossing_of.get(&e) {
                let is_crossing_dart = darts[i] == d;
                let mut endpoint = None;
                for &ci in chord_ids {
                    let ch = chords[ci];
                    if is_crossing_dart && ch.start_crossing == i {
                        endpoint = Some((ci, true));
                    }
                    if !is_crossing_dart && ch.end_crossing == i {
                        endpoint = Some((ci, false));
                    }
                }
                if is_crossing_dart {
                    items.push(Item::TailGerm(i));
                    if let Some((ci, s)) = endpoint {
                        items.push(Item::Endpoint(ci, s));
                    }
                    items.push(Item::HeadGerm(i));
                } else {
                    items.push(Item::HeadGerm(i));
                    if let Some((ci, s)) = endpoint {
                        items.push(Item::Endpoint(ci, s));
                    }
                    items.push(Item::TailGerm(i));
                }
            } else {
                items.push(Item::Edge(d));
            }
            let next = self.map.phi(d);
            items.push(Item::Vertex(self.vertex_of[next]));
        }
        items
    }
}

#[derive(Debug)]
enum FloodProblem {
    NotEmbeddable,
    Unsupported,
}

/// Parts created while splitting faces.
struct PartTable {
    count: usize,
    /// Euler characteristic per part (1 disk, 0 annulus).
    chi: Vec<i64>,
    adjacency: Vec<(usize, Item)>,
}

impl PartTable {
    fn new() -> PartTable {
        PartTable { count: 0, chi: Vec::new(), adjacency: Vec::new() }
    }

    fn fresh(&mut self, chi: i64) -> usize {
        let id = self.count;
        self.count += 1;
        self.chi.push(chi);
        id
    }
}

/// Union-find across parts and pattern vertices, plus side tallying.
struct FloodState {
    uf: DisjointSets,
    n_parts: usize,
    n_vertices: usize,
}

impl FloodState {
    fn new(p: &Pattern, n_parts: usize) -> FloodState {
        FloodState {
            uf: DisjointSets::new(n_parts + p.vertices()),
            n_parts,
            n_vertices: p.vertices(),
        }
    }

    fn join_part_vertex(&mut self, part: usize, vertex: usize) {
        self.uf.union(part, self.n_parts + vertex);
    }

    fn join_vertices(&mut self, v1: usize, v2: usize) {
        self.uf.union(self.n_parts + v1, self.n_parts + v2);
    }

    fn join_parts(&mut self, p1: usize, p2: usize) {
        self.uf.union(p1, p2);
    }

    fn find_part(&mut self, part: usize) -> usize {
        self.uf.find(part)
    }

    /// Tallies side contents between roots l and r. `part_chi[p]` is the
    /// Euler value of part p (i64::MIN marks a placeholder that is no
    /// part); `crossed` lists edges split by the loop; k is the crossing
    /// count, each crossing contributing two germs glued across the loop
    /// (per side: one vertex-free arc, Euler -1 after halving).
    fn tally(
        &mut self,
        p: &Pattern,
        l: usize,
        r: usize,
        part_chi: &[i64],
        crossed: &[usize],
        k: usize,
    ) -> [SideInfo; 2] {
        let mut chi = [-(k as i64); 2];
        let mut verts = [0usize; 2];
        let mut real = [0usize; 2];
        let mut edges = [0usize; 2];
        let mut nparts = [0usize; 2];
        let side_of = |uf: &mut DisjointSets, node: usize| -> Option<usize> {
            let root = uf.find(node);
            if root == l {
                Some(0)
            } else if root == r {
                Some(1)
            } else {
                None
            }
        };
        for (part, &pc) in part_chi.iter().enumerate() {
            if pc == i64::MIN {
                continue;
            }
            if let Some(side) = side_of(&mut self.uf, part) {
                nparts[side] += 1;
                chi[side] += pc;
            }
        }
        for v in 0..self.n_vertices {
            if let Some(side) = side_of(&mut self.uf, self.n_parts + v) {
                verts[side] += 1;
                if !p.marker[v] {
                    real[side] += 1;
                }
                chi[side] += 1;
            }
        }
        for e in 0..p.map.edges() {
            if crossed.contains(&e) {
                continue;
            }
            if let Some(side) = side_of(&mut self.uf, self.n_parts + p.vertex_of[2 * e]) {
                edges[side] += 1;
                chi[side] -= 1;
            }
        }
        let build = |i: usize| {
            let euler = chi[i];
            let is_disk = euler == 1;
            let forest_like = verts[i] as i64 - edges[i] as i64 == 1;
            SideInfo {
                euler,
                vertices: verts[i],
                real_vertices: real[i],
                full_edges: edges[i],
                parts: nparts[i],
                is_disk,
                single_arc: is_disk && real[i] == 0 && forest_like,
                single_y: is_disk && real[i] == 1 && forest_like,
            }
        };
        [build(0), build(1)]
    }
}
