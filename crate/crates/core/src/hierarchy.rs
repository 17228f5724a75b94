//! Verification of combinatorial hierarchy descriptions.
//!
//! A hierarchy is an ordered list of surfaces, each with boundary on its
//! predecessors, together with the pattern graphs the accumulated
//! boundaries trace on the boundary components of the successively cut
//! open manifold. Three conditions make the list a certified hierarchy:
//! the ordering of boundary assignments, the absence of nontrivial disks
//! meeting the pattern in at most three points, and boundary-parallelism
//! of every small loop's single visit to the newest surface.
//!
//! The ambient manifold is never represented; the spec carries exactly
//! the data the conditions quantify over, so the caller supplies stage
//! graphs and the tool certifies them.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use crate::model::{enumerate_small_disks, ComplementaryRegion, MeridianCross, ModelError};
use crate::pattern::{Disposition, FaceGroup, FaceKind, Pattern, Word};
use crate::report::{sha256_hex, Report, Verdict};
use crate::surgery::{pattern_meet_count, SurgerySpec, TorusPattern};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum HierarchyError {
    #[error("the spec carries no stage graphs")]
    MissingStageGraph,
    #[error("bad hierarchy data: {0}")]
    BadSpec(String),
}

/// One surface of the hierarchy. Surfaces are 1-indexed in references;
/// `boundary_on[k] = j` assigns the k-th boundary curve to surface j,
/// with 0 standing for the boundary of the ambient manifold.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SurfaceSpec {
    pub name: String,
    pub genus: usize,
    pub boundary_curves: usize,
    pub boundary_on: Vec<usize>,
}

/// A boundary component of a cut-open stage: the pattern graph the
/// accumulated surface boundaries trace on it. Edge labels name source
/// surfaces, pieces group edges into trace curves.
#[derive(Clone, Debug)]
pub struct StageComponent {
    pub name: String,
    pub genus: usize,
    pub pattern: Pattern,
    /// Meridian policy as for complementary regions: None on a positive
    /// genus carrier means its disks cannot be enumerated.
    pub meridians: Option<Vec<Vec<MeridianCross>>>,
    /// Slope-coordinate description for filling checks, present on
    /// square-tiled torus components.
    pub torus_pattern: Option<TorusPattern>,
}

#[derive(Clone, Debug)]
pub struct Stage {
    /// The stage graph describes the manifold cut along surfaces 1..=after.
    pub after: usize,
    pub components: Vec<StageComponent>,
}

#[derive(Clone, Debug)]
pub struct HierarchySpec {
    pub surfaces: Vec<SurfaceSpec>,
    pub stages: Vec<Stage>,
}

impl HierarchySpec {
    pub fn final_stage(&self) -> Option<&Stage> {
        self.stages.iter().max_by_key(|s| s.after)
    }

    /// Slope patterns of the final stage's components, for filling checks.
    pub fn boundary_patterns(&self) -> impl Iterator<Item = (String, &TorusPattern)> {
        self.final_stage()
            .into_iter()
            .flat_map(|s| s.components.iter())
            .filter_map(|c| c.torus_pattern.as_ref().map(|t| (c.name.clone(), t)))
    }

    pub fn digest(&self) -> String {
        let mut text = String::new();
        for s in &self.surfaces {
            let _ = writeln!(
                text,
                "surface {} genus {} boundary {} on {:?}",
                s.name, s.genus, s.boundary_curves, s.boundary_on
            );
        }
        for st in &self.stages {
            for c in &st.components {
                let _ = writeln!(
                    text,
                    "stage {} component {} genus {} edges {} labels {:?} census {:?} meridians {:?} slopes {}",
                    st.after,
                    c.name,
                    c.genus,
                    c.pattern.map().edges(),
                    (0..c.pattern.map().edges()).map(|e| c.pattern.edge_label(e)).collect::<Vec<_>>(),
                    c.pattern.census(),
                    c.meridians.as_ref().map(|ws| ws.len()),
                    c.torus_pattern.is_some(),
                );
            }
        }
        sha256_hex(text.as_bytes())
    }
}

fn region_of(c: &StageComponent) -> ComplementaryRegion {
    ComplementaryRegion {
        genus: c.genus,
        boundary_graph: c.pattern.clone(),
        meridians: c.meridians.clone(),
    }
}

fn push_condition1(h: &HierarchySpec, report: &mut Report) {
    let mut bad = Vec::new();
    for (idx, s) in h.surfaces.iter().enumerate() {
        let i = idx + 1;
        if s.boundary_on.len() != s.boundary_curves {
            bad.push(format!(
                "{}: {} boundary curves but {} assignments",
                s.name,
                s.boundary_curves,
                s.boundary_on.len()
            ));
            continue;
        }
        for (k, &j) in s.boundary_on.iter().enumerate() {
            if j >= i {
                bad.push(format!("{} boundary curve {k} assigned to surface {j}", s.name));
            }
        }
    }
    if bad.is_empty() {
        report.push(
            "boundary-ordering",
            Verdict::Pass,
            "every boundary curve lies on a strictly earlier surface or the ambient boundary",
            Vec::new(),
        );
    } else {
        report.push(
            "boundary-ordering",
            Verdict::Fail,
            format!("{} boundary assignments break the ordering", bad.len()),
            bad,
        );
    }
}

/// Condition on the ordering of boundary assignments.
pub fn check_condition1(h: &HierarchySpec) -> Report {
    let mut report = Report::new(h.digest());
    push_condition1(h, &mut report);
    report
}

fn push_condition2(h: &HierarchySpec, report: &mut Report) {
    let mut small_regions = Vec::new();
    let mut essential = Vec::new();
    let mut unsupported = Vec::new();
    let mut unsearchable = Vec::new();
    let mut candidates = 0usize;
    for stage in &h.stages {
        for c in &stage.components {
            let at = format!("stage {} {}", stage.after, c.name);
            for (f, fg) in c.pattern.faces().iter().enumerate() {
                if fg.kind == FaceKind::Disk {
                    let corners = c.pattern.face_corners(f);
                    if (1..=3).contains(&corners) {
                        small_regions.push(format!("{at}: {corners}-gon region"));
                    }
                }
            }
            match enumerate_small_disks(&region_of(c), 0) {
                Err(ModelError::GenusWithoutMeridians { .. }) => {
                    unsearchable.push(format!("{at}: genus {} without meridians", c.genus));
                }
                Err(e) => unsearchable.push(format!("{at}: {e}")),
                Ok(disks) => {
                    candidates += disks.len();
                    for d in disks {
                        match d.candidate.disposition {
                            Disposition::Essential => {
                                essential.push(format!("{at}: {:?}", d.candidate.word));
                            }
                            Disposition::Unsupported => {
                                unsupported.push(format!("{at}: {:?}", d.candidate.word));
                            }
                            Disposition::Trivial | Disposition::NotADisk => {}
                        }
                    }
                }
            }
        }
    }
    if small_regions.is_empty() {
        report.push(
            "small-regions",
            Verdict::Pass,
            "no monogon, bigon, or triangle regions between the pattern curves",
            Vec::new(),
        );
    } else {
        report.push(
            "small-regions",
            Verdict::Fail,
            format!("{} small regions cut off between the pattern curves", small_regions.len()),
            small_regions,
        );
    }
    if !essential.is_empty() {
        report.push(
            "small-cuts",
            Verdict::Fail,
            format!("{} loops meeting the pattern in at most three points are not removable", essential.len()),
            essential,
        );
    } else if !unsupported.is_empty() || !unsearchable.is_empty() {
        let mut locations = unsupported;
        locations.extend(unsearchable);
        report.push(
            "small-cuts",
            Verdict::Partial,
            "some stage components cannot be searched exhaustively",
            locations,
        );
    } else {
        report.push(
            "small-cuts",
            Verdict::Pass,
            format!("{candidates} candidates, all removable"),
            Vec::new(),
        );
    }
}

/// Condition on disks meeting the pattern in at most three points.
pub fn check_condition2(h: &HierarchySpec) -> Result<Report, HierarchyError> {
    if h.stages.is_empty() {
        return Err(HierarchyError::MissingStageGraph);
    }
    let mut report = Report::new(h.digest());
    push_condition2(h, &mut report);
    Ok(report)
}

/// True when the single visit of a candidate loop to the label-`top`
/// material can be pushed to the boundary of that material: some disk
/// region touches a visited edge and carries no label-`top` edges beyond
/// the visited curves themselves.
fn visit_is_boundary_parallel(p: &Pattern, run_edges: &[usize], top: u32) -> bool {
    let run_pieces: BTreeSet<usize> = run_edges.iter().map(|&e| p.piece(e)).collect();
    for fg in p.faces() {
        if fg.kind != FaceKind::Disk {
            continue;
        }
        let boundary: BTreeSet<usize> = fg
            .walks
            .iter()
            .flat_map(|&w| p.walk(w).iter().map(|&d| p.map().edge_of(d)))
            .collect();
        if !run_edges.iter().any(|e| boundary.contains(e)) {
            continue;
        }
        let clean = boundary.iter().all(|&e| {
            p.edge_label(e) != Some(top) || run_pieces.contains(&p.piece(e))
        });
        if clean {
            return true;
        }
    }
    false
}

fn push_condition3(h: &HierarchySpec, report: &mut Report) {
    let mut bad = Vec::new();
    let mut unsearchable = Vec::new();
    let mut inspected = 0usize;
    for stage in &h.stages {
        for c in &stage.components {
            let at = format!("stage {} {}", stage.after, c.name);
            let top = (0..c.pattern.map().edges())
                .filter_map(|e| c.pattern.edge_label(e))
                .max();
            let Some(top) = top else { continue };
            let disks = match enumerate_small_disks(&region_of(c), 0) {
                Err(e) => {
                    unsearchable.push(format!("{at}: {e}"));
                    continue;
                }
                Ok(d) => d,
            };
            for d in disks {
                let darts = match &d.candidate.word {
                    Word::Crossings { darts, .. } => darts.clone(),
                    _ => continue,
                };
                let hits: Vec<bool> = darts
                    .iter()
                    .map(|&x| c.pattern.edge_label(c.pattern.map().edge_of(x)) == Some(top))
                    .collect();
                let total = hits.iter().filter(|&&b| b).count();
                if total == 0 {
                    continue;
                }
                // Cyclic maximal runs of visits to the top surface.
                let runs = if total == hits.len() {
                    1
                } else {
                    (0..hits.len())
                        .filter(|&i| hits[i] && !hits[(i + hits.len() - 1) % hits.len()])
                        .count()
                };
                if runs != 1 {
                    continue;
                }
                inspected += 1;
                let run_edges: Vec<usize> = darts
                    .iter()
                    .zip(&hits)
                    .filter(|&(_, &h)| h)
                    .map(|(&x, _)| c.pattern.map().edge_of(x))
                    .collect();
                if !visit_is_boundary_parallel(&c.pattern, &run_edges, top) {
                    bad.push(format!(
                        "{at}: loop visiting surface label {top} once is not parallel to its boundary"
                    ));
                }
            }
        }
    }
    if !bad.is_empty() {
        report.push(
            "top-surface-arcs",
            Verdict::Fail,
            format!("{} single visits to the newest surface are not boundary-parallel", bad.len()),
            bad,
        );
    } else if !unsearchable.is_empty() {
        report.push(
            "top-surface-arcs",
            Verdict::Partial,
            "some stage components cannot be searched exhaustively",
            unsearchable,
        );
    } else {
        report.push(
            "top-surface-arcs",
            Verdict::Pass,
            format!("{inspected} single visits to the newest surface, all boundary-parallel"),
            Vec::new(),
        );
    }
}

/// Condition on single visits to the newest surface.
pub fn check_condition3(h: &HierarchySpec) -> Result<Report, HierarchyError> {
    if h.stages.is_empty() {
        return Err(HierarchyError::MissingStageGraph);
    }
    let mut report = Report::new(h.digest());
    push_condition3(h, &mut report);
    Ok(report)
}

fn push_carriers(h: &HierarchySpec, report: &mut Report) {
    let mut bad = Vec::new();
    for stage in &h.stages {
        for c in &stage.components {
            if c.pattern.map().edges() > 0
                && c.pattern.carrier_euler() != 2 - 2 * c.genus as i64
            {
                bad.push(format!(
                    "stage {} {}: Euler number {} on a genus {} carrier",
                    stage.after,
                    c.name,
                    c.pattern.carrier_euler(),
                    c.genus
                ));
            }
        }
    }
    if bad.is_empty() {
        report.push(
            "stage-carriers",
            Verdict::Pass,
            "stage graphs are Euler-consistent with their carrier surfaces",
            Vec::new(),
        );
    } else {
        report.push("stage-carriers", Verdict::Fail, format!("{} inconsistent stage graphs", bad.len()), bad);
    }
}

fn push_completeness(h: &HierarchySpec, report: &mut Report) {
    let mut others = Vec::new();
    for stage in &h.stages {
        for c in &stage.components {
            for (f, fg) in c.pattern.faces().iter().enumerate() {
                if fg.kind == FaceKind::Annulus && fg.walks.len() != 2 {
                    others.push(format!("stage {} {} face {f}", stage.after, c.name));
                }
            }
        }
    }
    // Completeness of the complementary decomposition is reported, not
    // required: cells and collars certify it, anything else is noted.
    let detail = if others.is_empty() {
        "complementary regions are cells and collars".to_string()
    } else {
        format!("{} regions are neither cells nor collars", others.len())
    };
    report.push("region-completeness", Verdict::Pass, detail, others);
}

/// The conjunction of the three hierarchy conditions, with stage
/// consistency and a completeness note.
pub fn verify_hierarchy(h: &HierarchySpec) -> Result<Report, HierarchyError> {
    if h.stages.is_empty() {
        return Err(HierarchyError::MissingStageGraph);
    }
    let mut report = Report::new(h.digest());
    push_condition1(h, &mut report);
    push_carriers(h, &mut report);
    push_condition2(h, &mut report);
    push_condition3(h, &mut report);
    push_completeness(h, &mut report);
    if report.overall() == Verdict::Pass {
        report.certificate = Some(
            "the surface sequence forms a hierarchy: each surface is incompressible and boundary-incompressible in its cut-open stage".into(),
        );
    }
    Ok(report)
}

/// Appends one disk surface per fill and a new final stage in which each
/// filled component's meridian system is the glued solid torus's meridian,
/// written as a crossing word when the slope meets the pattern and left
/// unsearchable when it misses it entirely.
pub fn extend_with_fills(h: &HierarchySpec, fills: &[SurgerySpec]) -> HierarchySpec {
    let mut out = h.clone();
    let Some(last) = h.final_stage() else { return out };
    let mut stage = last.clone();
    for fill in fills {
        out.surfaces.push(SurfaceSpec {
            name: format!("S{}", out.surfaces.len() + 1),
            genus: 0,
            boundary_curves: 1,
            boundary_on: vec![0],
        });
        for c in stage.components.iter_mut() {
            if c.name != fill.component {
                continue;
            }
            let Some(tp) = &c.torus_pattern else { continue };
            if pattern_meet_count(tp, fill.slope) == 0 {
                // The meridian misses the pattern; no crossing word can
                // carry it, so the component becomes unsearchable.
                c.meridians = None;
            } else {
                let word = wall_meridian_word(fill.slope.1.unsigned_abs());
                let words = c.meridians.get_or_insert_with(Vec::new);
                words.push(word);
            }
        }
    }
    stage.after = out.surfaces.len();
    out.stages.push(stage);
    out
}

/// Crossing word of a slope traversing the two horizontal walls |q|
/// times: south arc into the wall's 4-gon, north arc out into the next
/// annulus, per wall. Face ids follow the fixture pattern's layout.
fn wall_meridian_word(q: u64) -> Vec<MeridianCross> {
    let mut word = Vec::new();
    for _ in 0..q {
        word.push(MeridianCross { edge: 5, into: 1 });
        word.push(MeridianCross { edge: 4, into: 4 });
        word.push(MeridianCross { edge: 11, into: 3 });
        word.push(MeridianCross { edge: 10, into: 5 });
    }
    word
}

pub mod fixtures {
    use super::*;
    use crate::emap::EMap;

    /// Pattern graph of one wall: a contractible bead with four junction
    /// vertices and two horizontal arcs wrapping the torus. Two walls per
    /// torus. Vertices per wall: NE, NW, SW, SE; edges: top, left,
    /// bottom, right around the bead, then the north and south arcs.
    fn wall_torus_pattern_graph() -> Pattern {
        let mut rotations = Vec::new();
        for w in 0..2usize {
            let b = 12 * w;
            rotations.push(vec![b + 9, b, b + 7]); // NE
            rotations.push(vec![b + 1, b + 8, b + 2]); // NW
            rotations.push(vec![b + 3, b + 10, b + 4]); // SW
            rotations.push(vec![b + 6, b + 5, b + 11]); // SE
        }
        let map = EMap::from_vertex_rotations(12, &rotations).unwrap();
        let orbit_of = |d: usize| {
            map.faces()
                .orbits()
                .iter()
                .position(|o| o.contains(&d))
                .unwrap()
        };
        // Walk representatives per wall: dart 1 starts the bead circle,
        // 2 the 4-gon, 0 the north circle, 4 the south circle.
        let mut groups = Vec::new();
        for w in 0..2 {
            let b = 12 * w;
            groups.push(FaceGroup { kind: FaceKind::Disk, walks: vec![orbit_of(b + 1)] });
            groups.push(FaceGroup { kind: FaceKind::Disk, walks: vec![orbit_of(b + 2)] });
        }
        groups.push(FaceGroup {
            kind: FaceKind::Annulus,
            walks: vec![orbit_of(0), orbit_of(12 + 4)],
        });
        groups.push(FaceGroup {
            kind: FaceKind::Annulus,
            walks: vec![orbit_of(12), orbit_of(4)],
        });
        let mut p = Pattern::on_surface(map, groups).unwrap();
        for w in 0..2usize {
            for e in 0..4 {
                p.set_piece(6 * w + e, 3 * w); // bead circle
            }
            p.set_piece(6 * w + 4, 3 * w + 1); // north arc
            p.set_piece(6 * w + 5, 3 * w + 2); // south arc
            let (bead, arcs) = if w == 0 { (4, 2) } else { (5, 3) };
            for e in 0..4 {
                p.set_edge_label(6 * w + e, Some(bead));
            }
            p.set_edge_label(6 * w + 4, Some(arcs));
            p.set_edge_label(6 * w + 5, Some(arcs));
        }
        p
    }

    fn wall_component(name: &str) -> StageComponent {
        StageComponent {
            name: name.to_string(),
            genus: 1,
            pattern: wall_torus_pattern_graph(),
            // The rear side of these tori is certified to carry no
            // compressing disks, an empty but complete meridian system.
            meridians: Some(Vec::new()),
            torus_pattern: Some(crate::surgery::fixtures::borromean_wall_pattern()),
        }
    }

    /// The three-ring chain hierarchy: a peripheral torus, two tubed
    /// disks, two meridian disks, and the final stage patterns on three
    /// tori, each two walls with the six-region census.
    pub fn borromean() -> HierarchySpec {
        let surfaces = vec![
            SurfaceSpec { name: "S1".into(), genus: 1, boundary_curves: 0, boundary_on: vec![] },
            SurfaceSpec { name: "S2".into(), genus: 1, boundary_curves: 1, boundary_on: vec![1] },
            SurfaceSpec { name: "S3".into(), genus: 1, boundary_curves: 1, boundary_on: vec![2] },
            SurfaceSpec { name: "S4".into(), genus: 0, boundary_curves: 1, boundary_on: vec![2] },
            SurfaceSpec { name: "S5".into(), genus: 0, boundary_curves: 1, boundary_on: vec![3] },
        ];
        let stage = Stage {
            after: 5,
            components: vec![wall_component("T1"), wall_component("T2"), wall_component("T3")],
        };
        HierarchySpec { surfaces, stages: vec![stage] }
    }

    /// Mutation: the second surface's boundary assigned to a later one.
    pub fn borromean_bad_ordering() -> HierarchySpec {
        let mut h = borromean();
        h.surfaces[1].boundary_on = vec![3];
        h
    }

    /// Mutation: a sphere component whose pattern cuts off triangles.
    pub fn borromean_with_triangles() -> HierarchySpec {
        let mut h = borromean();
        let rotations = vec![
            vec![0, 2, 4],
            vec![6, 1, 11],
            vec![8, 3, 7],
            vec![10, 5, 9],
        ];
        let map = EMap::from_vertex_rotations(6, &rotations).unwrap();
        let mut p = Pattern::on_sphere(map).unwrap();
        for (e, label) in [(0, 1), (1, 2), (2, 3), (3, 1), (4, 2), (5, 3)] {
            p.set_edge_label(e, Some(label));
        }
        h.stages[0].components.push(StageComponent {
            name: "B1".into(),
            genus: 0,
            pattern: p,
            meridians: None,
            torus_pattern: None,
        });
        h
    }

    /// Mutation: a torus component holding two parallel essential
    /// circles; the loop crossing both visits the newest surface once,
    /// away from its boundary.
    pub fn borromean_with_crossing_circles() -> HierarchySpec {
        let mut h = borromean();
        let map = EMap::from_vertex_rotations(2, &[vec![0, 1], vec![2, 3]]).unwrap();
        let orbit_of = |d: usize| {
            map.faces()
                .orbits()
                .iter()
                .position(|o| o.contains(&d))
                .unwrap()
        };
        let groups = vec![
            FaceGroup { kind: FaceKind::Annulus, walks: vec![orbit_of(0), orbit_of(3)] },
            FaceGroup { kind: FaceKind::Annulus, walks: vec![orbit_of(1), orbit_of(2)] },
        ];
        let mut p = Pattern::on_surface(map, groups).unwrap();
        p.set_marker(0, true);
        p.set_marker(1, true);
        p.set_edge_label(0, Some(1));
        p.set_edge_label(1, Some(5));
        h.stages[0].components.push(StageComponent {
            name: "X1".into(),
            genus: 1,
            pattern: p,
            meridians: Some(Vec::new()),
            torus_pattern: None,
        });
        h
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pattern::CensusEntry;
    use crate::surgery::{check_surgery, SurgeryBase};

    #[test]
    fn fixture_census_is_two_of_each() {
        let h = fixtures::borromean();
        for c in &h.stages[0].components {
            assert_eq!(
                c.pattern.census(),
                vec![
                    CensusEntry { kind: FaceKind::Disk, corners: 0, count: 2 },
                    CensusEntry { kind: FaceKind::Disk, corners: 4, count: 2 },
                    CensusEntry { kind: FaceKind::Annulus, corners: 0, count: 2 },
                ]
            );
            assert_eq!(c.pattern.carrier_euler(), 0);
            assert_eq!(c.pattern.vertices(), 8);
            assert_eq!(c.pattern.map().edges(), 12);
        }
    }

    #[test]
    fn fixture_passes_all_conditions() {
        let h = fixtures::borromean();
        assert_eq!(check_condition1(&h).overall(), Verdict::Pass);
        assert_eq!(check_condition2(&h).unwrap().overall(), Verdict::Pass);
        assert_eq!(check_condition3(&h).unwrap().overall(), Verdict::Pass);
        let report = verify_hierarchy(&h).unwrap();
        assert_eq!(report.overall(), Verdict::Pass, "{}", report.to_json());
        assert!(report.certificate.is_some());
    }

    #[test]
    fn single_closed_surface_passes_structurally() {
        let h = HierarchySpec {
            surfaces: vec![SurfaceSpec {
                name: "S1".into(),
                genus: 2,
                boundary_curves: 0,
                boundary_on: vec![],
            }],
            stages: vec![Stage { after: 1, components: vec![] }],
        };
        assert_eq!(verify_hierarchy(&h).unwrap().overall(), Verdict::Pass);
    }

    #[test]
    fn missing_stage_graphs_is_an_error() {
        let mut h = fixtures::borromean();
        h.stages.clear();
        assert_eq!(check_condition2(&h).unwrap_err(), HierarchyError::MissingStageGraph);
        assert_eq!(check_condition3(&h).unwrap_err(), HierarchyError::MissingStageGraph);
        assert_eq!(verify_hierarchy(&h).unwrap_err(), HierarchyError::MissingStageGraph);
    }

    #[test]
    fn bad_ordering_fails_condition_one_only() {
        let h = fixtures::borromean_bad_ordering();
        let report = verify_hierarchy(&h).unwrap();
        assert_eq!(report.overall(), Verdict::Fail);
        assert_eq!(report.check("boundary-ordering").unwrap().verdict, Verdict::Fail);
        assert_eq!(report.check("small-regions").unwrap().verdict, Verdict::Pass);
        assert_eq!(report.check("small-cuts").unwrap().verdict, Verdict::Pass);
        assert_eq!(report.check("top-surface-arcs").unwrap().verdict, Verdict::Pass);
    }

    #[test]
    fn triangle_regions_fail_condition_two_only() {
        let h = fixtures::borromean_with_triangles();
        let report = verify_hierarchy(&h).unwrap();
        assert_eq!(report.overall(), Verdict::Fail);
        assert_eq!(report.check("boundary-ordering").unwrap().verdict, Verdict::Pass);
        let regions = report.check("small-regions").unwrap();
        assert_eq!(regions.verdict, Verdict::Fail);
        assert!(regions.locations.iter().all(|l| l.contains("3-gon")));
        assert_eq!(report.check("top-surface-arcs").unwrap().verdict, Verdict::Pass);
    }

    #[test]
    fn crossing_circles_fail_condition_three_only() {
        let h = fixtures::borromean_with_crossing_circles();
        let report = verify_hierarchy(&h).unwrap();
        assert_eq!(report.overall(), Verdict::Fail);
        assert_eq!(report.check("boundary-ordering").unwrap().verdict, Verdict::Pass);
        assert_eq!(report.check("small-regions").unwrap().verdict, Verdict::Pass);
        assert_eq!(report.check("small-cuts").unwrap().verdict, Verdict::Pass);
        assert_eq!(report.check("top-surface-arcs").unwrap().verdict, Verdict::Fail);
    }

    #[test]
    fn relabelling_components_and_reversing_pieces_change_nothing() {
        let mut h = fixtures::borromean();
        for (i, c) in h.stages[0].components.iter_mut().enumerate() {
            c.name = format!("K{i}");
        }
        // Swap the two arc pieces of each wall: reversing curve
        // orientations permutes piece names only.
        for c in h.stages[0].components.iter_mut() {
            for w in 0..2 {
                c.pattern.set_piece(6 * w + 4, 3 * w + 2);
                c.pattern.set_piece(6 * w + 5, 3 * w + 1);
            }
        }
        let report = verify_hierarchy(&h).unwrap();
        assert_eq!(report.overall(), Verdict::Pass);
    }

    #[test]
    fn census_is_euler_consistent_on_each_torus() {
        let h = fixtures::borromean();
        for c in &h.stages[0].components {
            let graph_euler = c.pattern.vertices() as i64 - c.pattern.map().edges() as i64;
            let regions: i64 = c
                .pattern
                .faces()
                .iter()
                .map(|fg| match fg.kind {
                    FaceKind::Disk => 1,
                    FaceKind::Annulus => 0,
                })
                .sum();
            assert_eq!(graph_euler + regions, 0);
        }
    }

    fn delete_surface(h: &HierarchySpec, victim: usize) -> HierarchySpec {
        let mut out = h.clone();
        out.surfaces.remove(victim - 1);
        for s in out.surfaces.iter_mut() {
            for j in s.boundary_on.iter_mut() {
                if *j > victim {
                    *j -= 1;
                }
            }
        }
        out
    }

    #[test]
    fn deleting_any_surface_never_crashes() {
        let h = fixtures::borromean();
        for victim in 1..=5 {
            let mutated = delete_surface(&h, victim);
            let report = verify_hierarchy(&mutated).unwrap();
            if report.overall() != Verdict::Pass {
                for check in &report.checks {
                    if check.verdict != Verdict::Pass {
                        assert!(
                            ["boundary-ordering", "small-regions", "small-cuts"]
                                .contains(&check.id.as_str()),
                            "deleting S{victim} failed {}",
                            check.id
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn surgery_pass_extends_the_hierarchy() {
        let h = fixtures::borromean();
        let slope_pairs = [((1, 1), (1, 2)), ((0, 1), (2, 1)), ((1, 3), (5, 2)), ((1, -1), (3, 1))];
        for (a, b) in slope_pairs {
            let fills = vec![
                SurgerySpec::solid_torus("T2", a),
                SurgerySpec::solid_torus("T3", b),
            ];
            let surgery = check_surgery(&SurgeryBase::Hierarchy(&h), &fills).unwrap();
            assert_eq!(surgery.overall(), Verdict::Pass);
            let extended = extend_with_fills(&h, &fills);
            assert_eq!(extended.surfaces.len(), 7);
            let report = verify_hierarchy(&extended).unwrap();
            assert_eq!(report.overall(), Verdict::Pass, "{}", report.to_json());
        }
    }

    #[test]
    fn trivial_fill_leaves_the_extension_uncertified() {
        let h = fixtures::borromean();
        let fills = vec![SurgerySpec::solid_torus("T2", (1, 0))];
        let surgery = check_surgery(&SurgeryBase::Hierarchy(&h), &fills).unwrap();
        assert_eq!(surgery.overall(), Verdict::Fail);
        let extended = extend_with_fills(&h, &fills);
        let report = verify_hierarchy(&extended).unwrap();
        assert_ne!(report.overall(), Verdict::Pass);
    }
}
