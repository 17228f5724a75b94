//! On-disk notations for every input the command line tool reads: cube
//! complexes (`.cubes`), surface models (`.surf`), hierarchy specifications
//! (`.hier`), and disk diagrams (`.dg`).
//!
//! All four are TOML documents whose first key is a `format` tag, so a file
//! identifies its own kind regardless of extension. Parsers are strict:
//! unknown keys are errors. `docs/formats.md` spells out the grammars.

use serde::{Deserialize, Serialize};

use crate::complex::{CubeComplex, Gluing};
use crate::emap::EMap;
use crate::hierarchy::{HierarchySpec, Stage, StageComponent, SurfaceSpec};
use crate::model::{
    ComplementaryRegion, MeridianCross, ModelCurve, ModelFace, ModelTriple, SurfaceModel,
};
use crate::pattern::{FaceGroup, FaceKind, Pattern};
use crate::report::sha256_hex;
use crate::rewrite::{DiskGraph, EdgeSpec, End, Mode, VertexKind, VertexSpec};
use crate::surgery::{PatternArc, RegionCount, RegionKind, Slope, TorusPattern};

pub const CUBES_TAG: &str = "cubes";
pub const SURFACE_TAG: &str = "surface-model";
pub const HIERARCHY_TAG: &str = "hierarchy";
pub const DISK_GRAPH_TAG: &str = "disk-graph";

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("not a TOML document: {0}")]
    Syntax(#[from] toml::de::Error),
    #[error("format tag is {found:?}, expected {expected:?}")]
    WrongFormat { expected: &'static str, found: String },
    #[error("unknown dihedral symmetry {0:?}; square symmetries are id, r90, r180, r270, m0, m1, m2, m3")]
    BadDihedral(String),
    #[error("{0}")]
    Invalid(String),
}

fn invalid(e: impl std::fmt::Display) -> FormatError {
    FormatError::Invalid(e.to_string())
}

/// Reads the `format` tag of a document without parsing the rest.
pub fn format_tag(text: &str) -> Result<String, FormatError> {
    #[derive(Deserialize)]
    struct Tagged {
        format: String,
    }
    let t: Tagged = toml::from_str(text)?;
    Ok(t.format)
}

fn check_tag(found: &str, expected: &'static str) -> Result<(), FormatError> {
    if found == expected {
        Ok(())
    } else {
        Err(FormatError::WrongFormat { expected, found: found.to_owned() })
    }
}

// ---------------------------------------------------------------- .cubes

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CubesDoc {
    format: String,
    cubes: usize,
    #[serde(default, rename = "gluing", skip_serializing_if = "Vec::is_empty")]
    gluings: Vec<GluingDoc>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GluingDoc {
    a: usize,
    fa: usize,
    b: usize,
    fb: usize,
    sym: String,
}

pub fn parse_cubes(text: &str) -> Result<CubeComplex, FormatError> {
    check_tag(&format_tag(text)?, CUBES_TAG)?;
    let doc: CubesDoc = toml::from_str(text)?;
    let mut gluings = Vec::with_capacity(doc.gluings.len());
    for g in &doc.gluings {
        let sym = g.sym.parse().map_err(|_| FormatError::BadDihedral(g.sym.clone()))?;
        gluings.push(Gluing { a: g.a, fa: g.fa, b: g.b, fb: g.fb, sym });
    }
    CubeComplex::build(doc.cubes, &gluings).map_err(invalid)
}

pub fn show_cubes(c: &CubeComplex) -> String {
    let doc = CubesDoc {
        format: CUBES_TAG.to_owned(),
        cubes: c.cubes(),
        gluings: c
            .gluings()
            .iter()
            .map(|g| GluingDoc {
                a: g.a,
                fa: g.fa,
                b: g.b,
                fb: g.fb,
                sym: g.sym.name().to_owned(),
            })
            .collect(),
    };
    toml::to_string(&doc).expect("cube complex serializes")
}

// ------------------------------------------------- embedded pattern graphs

/// An embedded graph with its pattern decorations, shared by surface-model
/// regions and hierarchy stage components. Darts `2e` and `2e + 1` are the
/// two ends of edge `e`; each rotation lists the darts around one vertex.
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PatternDoc {
    rotations: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    markers: Vec<usize>,
    /// Explicit complement faces; empty means every walk bounds a disk.
    #[serde(default, rename = "face_group", skip_serializing_if = "Vec::is_empty")]
    face_groups: Vec<FaceGroupDoc>,
    /// Per-edge source labels, 0 for unlabeled; empty means all unlabeled.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    edge_labels: Vec<u32>,
    /// Per-edge curve grouping; empty means each edge is its own piece.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pieces: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FaceGroupDoc {
    kind: String,
    walks: Vec<usize>,
}

fn pattern_from_doc(doc: &PatternDoc) -> Result<Pattern, FormatError> {
    let darts: usize = doc.rotations.iter().map(|r| r.len()).sum();
    if !darts.is_multiple_of(2) {
        return Err(FormatError::Invalid(format!("rotations list {darts} darts, an odd number")));
    }
    let map = EMap::from_vertex_rotations(darts / 2, &doc.rotations).map_err(invalid)?;
    let mut p = if doc.face_groups.is_empty() {
        Pattern::on_sphere(map).map_err(invalid)?
    } else {
        let mut groups = Vec::with_capacity(doc.face_groups.len());
        for fg in &doc.face_groups {
            let kind = match fg.kind.as_str() {
                "disk" => FaceKind::Disk,
                "annulus" => FaceKind::Annulus,
                other => {
                    return Err(FormatError::Invalid(format!(
                        "face group kind {other:?}, expected disk or annulus"
                    )))
                }
            };
            groups.push(FaceGroup { kind, walks: fg.walks.clone() });
        }
        Pattern::on_surface(map, groups).map_err(invalid)?
    };
    for &v in &doc.markers {
        if v >= p.vertices() {
            return Err(FormatError::Invalid(format!(
                "marker names vertex {v} of {}",
                p.vertices()
            )));
        }
        p.set_marker(v, true);
    }
    let edges = p.map().edges();
    if !doc.edge_labels.is_empty() {
        if doc.edge_labels.len() != edges {
            return Err(FormatError::Invalid(format!(
                "{} edge labels for {edges} edges",
                doc.edge_labels.len()
            )));
        }
        for (e, &label) in doc.edge_labels.iter().enumerate() {
            if label != 0 {
                p.set_edge_label(e, Some(label));
            }
        }
    }
    if !doc.pieces.is_empty() {
        if doc.pieces.len() != edges {
            return Err(FormatError::Invalid(format!(
                "{} piece entries for {edges} edges",
                doc.pieces.len()
            )));
        }
        for (e, &piece) in doc.pieces.iter().enumerate() {
            p.set_piece(e, piece);
        }
    }
    Ok(p)
}

fn pattern_to_doc(p: &Pattern) -> PatternDoc {
    let edges = p.map().edges();
    let edge_labels: Vec<u32> = (0..edges).map(|e| p.edge_label(e).unwrap_or(0)).collect();
    let pieces: Vec<usize> = (0..edges).map(|e| p.piece(e)).collect();
    PatternDoc {
        rotations: p.map().vertices().orbits().to_vec(),
        markers: (0..p.vertices()).filter(|&v| p.is_marker(v)).collect(),
        face_groups: p
            .faces()
            .iter()
            .map(|fg| FaceGroupDoc {
                kind: match fg.kind {
                    FaceKind::Disk => "disk".to_owned(),
                    FaceKind::Annulus => "annulus".to_owned(),
                },
                walks: fg.walks.clone(),
            })
            .collect(),
        edge_labels: if edge_labels.iter().all(|&l| l == 0) { Vec::new() } else { edge_labels },
        pieces: if pieces.iter().copied().eq(0..edges) { Vec::new() } else { pieces },
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CrossDoc {
    edge: usize,
    into: usize,
}

fn meridians_from_doc(doc: &Option<Vec<Vec<CrossDoc>>>) -> Option<Vec<Vec<MeridianCross>>> {
    doc.as_ref().map(|words| {
        words
            .iter()
            .map(|w| w.iter().map(|c| MeridianCross { edge: c.edge, into: c.into }).collect())
            .collect()
    })
}

fn meridians_to_doc(m: &Option<Vec<Vec<MeridianCross>>>) -> Option<Vec<Vec<CrossDoc>>> {
    m.as_ref().map(|words| {
        words
            .iter()
            .map(|w| w.iter().map(|c| CrossDoc { edge: c.edge, into: c.into }).collect())
            .collect()
    })
}

// ----------------------------------------------------------------- .surf

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SurfaceDoc {
    format: String,
    /// Face degrees, one entry per polygon.
    faces: Vec<usize>,
    #[serde(default, rename = "curve", skip_serializing_if = "Vec::is_empty")]
    curves: Vec<CurveDoc>,
    #[serde(default, rename = "triple", skip_serializing_if = "Vec::is_empty")]
    triples: Vec<TripleDoc>,
    #[serde(default, rename = "region", skip_serializing_if = "Vec::is_empty")]
    regions: Vec<RegionDoc>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CurveDoc {
    closed: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    face_sides: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TripleDoc {
    curves: [usize; 3],
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RegionDoc {
    genus: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    meridians: Option<Vec<Vec<CrossDoc>>>,
    graph: PatternDoc,
}

pub fn parse_surface(text: &str) -> Result<SurfaceModel, FormatError> {
    check_tag(&format_tag(text)?, SURFACE_TAG)?;
    let doc: SurfaceDoc = toml::from_str(text)?;
    let faces = doc.faces.iter().map(|&degree| ModelFace { degree }).collect();
    let curves = doc
        .curves
        .iter()
        .map(|c| ModelCurve { closed: c.closed, face_sides: c.face_sides.clone() })
        .collect();
    let triples = doc.triples.iter().map(|t| ModelTriple { curves: t.curves }).collect();
    let mut regions = Vec::with_capacity(doc.regions.len());
    for r in &doc.regions {
        regions.push(ComplementaryRegion {
            genus: r.genus,
            boundary_graph: pattern_from_doc(&r.graph)?,
            meridians: meridians_from_doc(&r.meridians),
        });
    }
    SurfaceModel::new(faces, curves, triples, regions, sha256_hex(text.as_bytes()))
        .map_err(invalid)
}

pub fn show_surface(m: &SurfaceModel) -> String {
    let doc = SurfaceDoc {
        format: SURFACE_TAG.to_owned(),
        faces: m.faces.iter().map(|f| f.degree).collect(),
        curves: m
            .double_curves
            .iter()
            .map(|c| CurveDoc { closed: c.closed, face_sides: c.face_sides.clone() })
            .collect(),
        triples: m.triple_points.iter().map(|t| TripleDoc { curves: t.curves }).collect(),
        regions: m
            .regions
            .iter()
            .map(|r| RegionDoc {
                genus: r.genus,
                meridians: meridians_to_doc(&r.meridians),
                graph: pattern_to_doc(&r.boundary_graph),
            })
            .collect(),
    };
    toml::to_string(&doc).expect("surface model serializes")
}

// ----------------------------------------------------------------- .hier

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct HierDoc {
    format: String,
    #[serde(default, rename = "surface", skip_serializing_if = "Vec::is_empty")]
    surfaces: Vec<SurfaceSpecDoc>,
    #[serde(default, rename = "stage", skip_serializing_if = "Vec::is_empty")]
    stages: Vec<StageDoc>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SurfaceSpecDoc {
    name: String,
    genus: usize,
    boundary_curves: usize,
    /// Target surface per boundary curve, 1-indexed; 0 is the ambient
    /// manifold's own boundary.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    boundary_on: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StageDoc {
    after: usize,
    #[serde(default, rename = "component", skip_serializing_if = "Vec::is_empty")]
    components: Vec<ComponentDoc>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ComponentDoc {
    name: String,
    genus: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    meridians: Option<Vec<Vec<CrossDoc>>>,
    graph: PatternDoc,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    torus: Option<TorusDoc>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TorusDoc {
    basis: [[i64; 2]; 2],
    #[serde(default, rename = "loop", skip_serializing_if = "Vec::is_empty")]
    loops: Vec<LoopDoc>,
    #[serde(default)]
    contractible_loops: usize,
    #[serde(default, rename = "arc", skip_serializing_if = "Vec::is_empty")]
    arcs: Vec<ArcDoc>,
    #[serde(default, rename = "region", skip_serializing_if = "Vec::is_empty")]
    regions: Vec<RegionCountDoc>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LoopDoc {
    slope: [i64; 2],
    count: usize,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ArcDoc {
    from: usize,
    to: usize,
    class: [i64; 2],
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RegionCountDoc {
    /// `"N-gon"`, `"annulus"`, or `"other"`.
    kind: String,
    count: usize,
}

fn slope_of(a: [i64; 2]) -> Slope {
    (a[0], a[1])
}

fn region_kind_from_str(s: &str) -> Result<RegionKind, FormatError> {
    match s {
        "annulus" => Ok(RegionKind::Annulus),
        "other" => Ok(RegionKind::Other),
        _ => match s.strip_suffix("-gon").and_then(|n| n.parse().ok()) {
            Some(corners) => Ok(RegionKind::Disk { corners }),
            None => Err(FormatError::Invalid(format!(
                "region kind {s:?}, expected N-gon, annulus, or other"
            ))),
        },
    }
}

fn torus_from_doc(doc: &TorusDoc) -> Result<TorusPattern, FormatError> {
    let mut regions = Vec::with_capacity(doc.regions.len());
    for r in &doc.regions {
        regions.push(RegionCount { kind: region_kind_from_str(&r.kind)?, count: r.count });
    }
    let t = TorusPattern {
        basis: (slope_of(doc.basis[0]), slope_of(doc.basis[1])),
        loops: doc.loops.iter().map(|l| (slope_of(l.slope), l.count)).collect(),
        contractible_loops: doc.contractible_loops,
        arcs: doc
            .arcs
            .iter()
            .map(|a| PatternArc { from: a.from, to: a.to, class: slope_of(a.class) })
            .collect(),
        regions,
    };
    t.validate().map_err(invalid)?;
    Ok(t)
}

fn torus_to_doc(t: &TorusPattern) -> TorusDoc {
    TorusDoc {
        basis: [[t.basis.0 .0, t.basis.0 .1], [t.basis.1 .0, t.basis.1 .1]],
        loops: t.loops.iter().map(|&(s, count)| LoopDoc { slope: [s.0, s.1], count }).collect(),
        contractible_loops: t.contractible_loops,
        arcs: t
            .arcs
            .iter()
            .map(|a| ArcDoc { from: a.from, to: a.to, class: [a.class.0, a.class.1] })
            .collect(),
        regions: t
            .regions
            .iter()
            .map(|r| RegionCountDoc { kind: r.kind.to_string(), count: r.count })
            .collect(),
    }
}

pub fn parse_hierarchy(text: &str) -> Result<HierarchySpec, FormatError> {
    check_tag(&format_tag(text)?, HIERARCHY_TAG)?;
    let doc: HierDoc = toml::from_str(text)?;
    let surfaces = doc
        .surfaces
        .iter()
        .map(|s| SurfaceSpec {
            name: s.name.clone(),
            genus: s.genus,
            boundary_curves: s.boundary_curves,
            boundary_on: s.boundary_on.clone(),
        })
        .collect();
    let mut stages = Vec::with_capacity(doc.stages.len());
    for st in &doc.stages {
        let mut components = Vec::with_capacity(st.components.len());
        for c in &st.components {
            components.push(StageComponent {
                name: c.name.clone(),
                genus: c.genus,
                pattern: pattern_from_doc(&c.graph)?,
                meridians: meridians_from_doc(&c.meridians),
                torus_pattern: c.torus.as_ref().map(torus_from_doc).transpose()?,
            });
        }
        stages.push(Stage { after: st.after, components });
    }
    Ok(HierarchySpec { surfaces, stages })
}

pub fn show_hierarchy(h: &HierarchySpec) -> String {
    let doc = HierDoc {
        format: HIERARCHY_TAG.to_owned(),
        surfaces: h
            .surfaces
            .iter()
            .map(|s| SurfaceSpecDoc {
                name: s.name.clone(),
                genus: s.genus,
                boundary_curves: s.boundary_curves,
                boundary_on: s.boundary_on.clone(),
            })
            .collect(),
        stages: h
            .stages
            .iter()
            .map(|st| StageDoc {
                after: st.after,
                components: st
                    .components
                    .iter()
                    .map(|c| ComponentDoc {
                        name: c.name.clone(),
                        genus: c.genus,
                        meridians: meridians_to_doc(&c.meridians),
                        graph: pattern_to_doc(&c.pattern),
                        torus: c.torus_pattern.as_ref().map(torus_to_doc),
                    })
                    .collect(),
            })
            .collect(),
    };
    toml::to_string(&doc).expect("hierarchy spec serializes")
}

// ------------------------------------------------------------------- .dg

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DgDoc {
    format: String,
    /// Number of marked points on the disk boundary, in circular order.
    slots: usize,
    #[serde(default, rename = "vertex", skip_serializing_if = "Vec::is_empty")]
    vertices: Vec<DgVertexDoc>,
    #[serde(default, rename = "edge", skip_serializing_if = "Vec::is_empty")]
    edges: Vec<DgEdgeDoc>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DgVertexDoc {
    /// `"crossing"` (four ports) or `"tee"` (three ports).
    kind: String,
    /// 0 means unlabeled; tee diagrams need real labels.
    #[serde(default, skip_serializing_if = "is_zero")]
    label: u32,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DgEdgeDoc {
    #[serde(default, skip_serializing_if = "is_zero")]
    label: u32,
    /// Endpoint references: `"s<k>"` is boundary slot k, `"v<i>.<p>"` is
    /// port p of vertex i.
    ends: [String; 2],
}

#[allow(clippy::trivially_copy_pass_by_ref)]
fn is_zero(label: &u32) -> bool {
    *label == 0
}

fn parse_end(s: &str) -> Result<End, FormatError> {
    let bad = || {
        FormatError::Invalid(format!("edge end {s:?}, expected s<slot> or v<vertex>.<port>"))
    };
    if let Some(k) = s.strip_prefix('s') {
        return Ok(End::Slot(k.parse().map_err(|_| bad())?));
    }
    let rest = s.strip_prefix('v').ok_or_else(bad)?;
    let (vertex, port) = rest.split_once('.').ok_or_else(bad)?;
    Ok(End::Port {
        vertex: vertex.parse().map_err(|_| bad())?,
        port: port.parse().map_err(|_| bad())?,
    })
}

fn show_end(end: End) -> String {
    match end {
        End::Slot(slot) => format!("s{slot}"),
        End::Port { vertex, port } => format!("v{vertex}.{port}"),
    }
}

pub fn parse_disk_graph(text: &str, mode: Mode) -> Result<DiskGraph, FormatError> {
    check_tag(&format_tag(text)?, DISK_GRAPH_TAG)?;
    let doc: DgDoc = toml::from_str(text)?;
    let mut ports: Vec<Vec<Option<(usize, usize)>>> = Vec::with_capacity(doc.vertices.len());
    let mut kinds = Vec::with_capacity(doc.vertices.len());
    for v in &doc.vertices {
        let kind = match v.kind.as_str() {
            "crossing" => VertexKind::Degree4,
            "tee" => VertexKind::Tee,
            other => {
                return Err(FormatError::Invalid(format!(
                    "vertex kind {other:?}, expected crossing or tee"
                )))
            }
        };
        kinds.push(kind);
        ports.push(vec![None; if kind == VertexKind::Degree4 { 4 } else { 3 }]);
    }
    let mut edges = Vec::with_capacity(doc.edges.len());
    for (ei, e) in doc.edges.iter().enumerate() {
        let mut ends = [End::Slot(0); 2];
        for (end_idx, end) in e.ends.iter().enumerate() {
            let end = parse_end(end)?;
            if let End::Port { vertex, port } = end {
                let arity = ports.get(vertex).map(Vec::len).ok_or_else(|| {
                    FormatError::Invalid(format!(
                        "edge {ei} names vertex {vertex} of {}",
                        ports.len()
                    ))
                })?;
                if port >= arity {
                    return Err(FormatError::Invalid(format!(
                        "edge {ei} names port {port} of {arity} on vertex {vertex}"
                    )));
                }
                if ports[vertex][port].replace((ei, end_idx)).is_some() {
                    return Err(FormatError::Invalid(format!(
                        "vertex {vertex} port {port} is referenced twice"
                    )));
                }
            }
            ends[end_idx] = end;
        }
        edges.push(EdgeSpec { ends, label: e.label });
    }
    let mut vspecs = Vec::with_capacity(kinds.len());
    for (vi, (kind, vports)) in kinds.into_iter().zip(ports).enumerate() {
        let mut filled = Vec::with_capacity(vports.len());
        for (p, slot) in vports.into_iter().enumerate() {
            filled.push(slot.ok_or_else(|| {
                FormatError::Invalid(format!("vertex {vi} port {p} has no edge"))
            })?);
        }
        vspecs.push(VertexSpec { kind, label: doc.vertices[vi].label, ports: filled });
    }
    DiskGraph::from_parts(mode, doc.slots, vspecs, edges).map_err(invalid)
}

pub fn show_disk_graph(g: &DiskGraph) -> String {
    let (slots, vertices, edges) = g.parts().expect("graph has a parts form");
    let doc = DgDoc {
        format: DISK_GRAPH_TAG.to_owned(),
        slots,
        vertices: vertices
            .iter()
            .map(|v| DgVertexDoc {
                kind: match v.kind {
                    VertexKind::Degree4 => "crossing".to_owned(),
                    VertexKind::Tee => "tee".to_owned(),
                },
                label: v.label,
            })
            .collect(),
        edges: edges
            .iter()
            .map(|e| DgEdgeDoc { label: e.label, ends: e.ends.map(show_end) })
            .collect(),
    };
    toml::to_string(&doc).expect("disk graph serializes")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::fixtures as cx;
    use crate::hierarchy::{fixtures as hx, verify_hierarchy};
    use crate::model::check_almost_cubed;
    use crate::report::Verdict;
    use crate::rewrite::reduce;
    use crate::validate::validate_npc;

    #[test]
    fn cubes_round_trip() {
        for c in [cx::t3(), cx::twocube(), cx::stack(3), cx::deg3ring(), cx::doublecube()] {
            let text = show_cubes(&c);
            assert_eq!(format_tag(&text).unwrap(), CUBES_TAG);
            let back = parse_cubes(&text).unwrap();
            assert_eq!(back.cubes(), c.cubes());
            assert_eq!(back.gluings(), c.gluings());
        }
    }

    #[test]
    fn unknown_symmetry_names_are_rejected() {
        let text = show_cubes(&cx::t3()).replace("\"id\"", "\"r45\"");
        assert!(matches!(parse_cubes(&text), Err(FormatError::BadDihedral(s)) if s == "r45"));
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let mut text = show_cubes(&cx::t3());
        text.push_str("\nextra = 1\n");
        assert!(matches!(parse_cubes(&text), Err(FormatError::Syntax(_))));
    }

    #[test]
    fn wrong_tag_is_rejected() {
        let text = show_cubes(&cx::t3());
        assert!(matches!(
            parse_surface(&text),
            Err(FormatError::WrongFormat { expected: SURFACE_TAG, .. })
        ));
    }

    #[test]
    fn surface_round_trip_preserves_the_almost_cubed_verdict() {
        let c = cx::t3();
        let val = validate_npc(&c);
        let m = SurfaceModel::from_complex(&c, &val).unwrap();
        let text = show_surface(&m);
        let back = parse_surface(&text).unwrap();
        assert_eq!(back.faces.len(), m.faces.len());
        assert_eq!(back.double_curves.len(), m.double_curves.len());
        assert_eq!(back.triple_points.len(), m.triple_points.len());
        assert_eq!(back.regions.len(), m.regions.len());
        let before = check_almost_cubed(&m);
        let after = check_almost_cubed(&back);
        assert_eq!(before.overall(), Verdict::Pass);
        assert_eq!(after.overall(), Verdict::Pass);
        assert_eq!(
            before.checks.iter().map(|k| (&k.id, k.verdict)).collect::<Vec<_>>(),
            after.checks.iter().map(|k| (&k.id, k.verdict)).collect::<Vec<_>>(),
        );
    }

    #[test]
    fn hierarchy_round_trip_preserves_the_digest() {
        let h = hx::borromean();
        let text = show_hierarchy(&h);
        let back = parse_hierarchy(&text).unwrap();
        assert_eq!(back.digest(), h.digest());
        assert_eq!(verify_hierarchy(&back).unwrap().overall(), Verdict::Pass);
    }

    #[test]
    fn mutated_hierarchies_round_trip_to_failing_specs() {
        for h in [hx::borromean_bad_ordering(), hx::borromean_with_triangles()] {
            let back = parse_hierarchy(&show_hierarchy(&h)).unwrap();
            assert_eq!(back.digest(), h.digest());
            assert_eq!(verify_hierarchy(&back).unwrap().overall(), Verdict::Fail);
        }
    }

    #[test]
    fn disk_graph_round_trip_reduces_identically() {
        let g = DiskGraph::from_chords(8, &[(0, 4), (1, 5), (2, 6), (3, 7)]).unwrap();
        let text = show_disk_graph(&g);
        let back = parse_disk_graph(&text, Mode::Crossings).unwrap();
        let left = reduce(g).unwrap();
        let right = reduce(back).unwrap();
        assert_eq!(left.steps.len(), right.steps.len());
        for (a, b) in left.steps.iter().zip(&right.steps) {
            assert_eq!(a.kind, b.kind);
            assert_eq!(a.site, b.site);
        }
    }

    #[test]
    fn tee_graphs_demand_the_matching_mode() {
        let text = show_disk_graph(&DiskGraph::tee_square());
        assert!(parse_disk_graph(&text, Mode::Tees).is_ok());
        assert!(matches!(parse_disk_graph(&text, Mode::Crossings), Err(FormatError::Invalid(_))));
    }

    #[test]
    fn half_wired_vertices_are_rejected() {
        let text = "format = \"disk-graph\"\nslots = 2\n\n[[vertex]]\nkind = \"crossing\"\n\n[[edge]]\nends = [\"s0\", \"v0.0\"]\n\n[[edge]]\nends = [\"s1\", \"v0.1\"]\n";
        let err = parse_disk_graph(text, Mode::Crossings).unwrap_err();
        assert!(matches!(err, FormatError::Invalid(m) if m.contains("port 2 has no edge")));
    }
}
