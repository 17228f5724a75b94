//! The curvature checks for a cube complex.
//!
//! Four conditions make up the main verdict. (i) Every interior edge class
//! has degree at least 4. (ii) Every interior vertex link is a triangulated
//! sphere. (iii) In every link, each 3-cycle on distinct link vertices
//! bounds a triangle coming from one cube-corner. (iv) No link 1-skeleton
//! has a loop edge or a pair of distinct parallel edges.
//!
//! Boundary behaviour is reported separately and does not gate the main
//! verdict: boundary edge classes are exempt from (i), boundary vertex
//! links are surfaces with boundary (still subject to (iii) and (iv)), and
//! the unglued faces must close up into surfaces of Euler characteristic 0.

use crate::complex::{BoundaryComponent, CubeComplex, EdgeClasses, VertexClasses};
use crate::link::VertexLink;
use crate::report::{sha256_hex, Report, Verdict};

/// Everything computed while validating: reusable by later stages.
#[derive(Debug)]
pub struct NpcValidation {
    pub edge_classes: EdgeClasses,
    pub vertex_classes: VertexClasses,
    /// One link per vertex class, aligned with `vertex_classes`.
    pub links: Vec<VertexLink>,
    pub boundary: Vec<BoundaryComponent>,
    pub report: Report,
    /// Conjunction of conditions (i) to (iv); boundary closure is reported
    /// but not folded in.
    pub npc: bool,
}

/// A digest of the complex itself, used when no input file is in play.
pub fn complex_digest(c: &CubeComplex) -> String {
    let canonical = serde_json::to_string(&(c.cubes(), c.gluings())).expect("gluings serialize");
    sha256_hex(canonical.as_bytes())
}

pub fn validate_npc(c: &CubeComplex) -> NpcValidation {
    let edge_classes = c.edge_classes();
    let vertex_classes = c.vertex_classes();
    let links: Vec<VertexLink> = (0..vertex_classes.classes().len())
        .map(|v| VertexLink::build(c, &vertex_classes, v))
        .collect();
    let boundary = c.boundary_components(&edge_classes, &vertex_classes);
    let mut report = Report::new(complex_digest(c));

    // (i) interior edge degrees.
    let mut interior_edges = 0usize;
    let mut exempt_edges = 0usize;
    let mut bad = Vec::new();
    for (k, cls) in edge_classes.classes().iter().enumerate() {
        if cls.boundary {
            exempt_edges += 1;
        } else {
            interior_edges += 1;
            if cls.degree() < 4 {
                bad.push(format!("edge-class {k} has degree {}", cls.degree()));
            }
        }
    }
    report.push(
        "edge-degrees",
        if bad.is_empty() { Verdict::Pass } else { Verdict::Fail },
        format!(
            "{interior_edges} interior edge classes checked, {} below degree 4; {exempt_edges} boundary classes exempt",
            bad.len()
        ),
        bad,
    );

    // (ii) interior links are spheres.
    let mut interior_vertices = 0usize;
    let mut exempt_vertices = 0usize;
    let mut bad = Vec::new();
    for (v, cls) in vertex_classes.classes().iter().enumerate() {
        if cls.boundary {
            exempt_vertices += 1;
            continue;
        }
        interior_vertices += 1;
        let link = &links[v];
        if !link.is_interior() {
            bad.push(format!("vertex {v}: link has free sides off the boundary"));
        } else if !link.connected() {
            bad.push(format!("vertex {v}: link is disconnected"));
        } else if link.euler() != 2 {
            bad.push(format!("vertex {v}: link has Euler characteristic {}", link.euler()));
        }
    }
    report.push(
        "vertex-links-sphere",
        if bad.is_empty() { Verdict::Pass } else { Verdict::Fail },
        format!(
            "{interior_vertices} interior vertex links checked, {} not spheres; {exempt_vertices} boundary links checked as surfaces with boundary",
            bad.len()
        ),
        bad,
    );

    // (iii) every 3-cycle of link edges bounds a corner triangle.
    let mut cycles = 0usize;
    let mut bad = Vec::new();
    for (v, link) in links.iter().enumerate() {
        let tc = link.three_cycle_check();
        cycles += tc.cycles;
        for [a, b, c] in tc.non_bounding {
            bad.push(format!("vertex {v}: 3-cycle on link edges {a}, {b}, {c} bounds no triangle"));
        }
    }
    report.push(
        "link-three-cycles",
        if bad.is_empty() { Verdict::Pass } else { Verdict::Fail },
        format!("{cycles} link 3-cycles enumerated, {} without a bounding triangle", bad.len()),
        bad,
    );

    // (iv) link skeletons are simple.
    let mut bad = Vec::new();
    for (v, link) in links.iter().enumerate() {
        let simp = link.simplicity_check();
        for k in simp.loops {
            bad.push(format!("vertex {v}: link edge {k} is a loop"));
        }
        for (a, b) in simp.parallel {
            bad.push(format!("vertex {v}: link edges {a} and {b} are parallel"));
        }
    }
    report.push(
        "link-simple",
        if bad.is_empty() { Verdict::Pass } else { Verdict::Fail },
        format!("{} loop or parallel link edges found", bad.len()),
        bad,
    );

    let npc = report.overall() == Verdict::Pass;

    // Boundary closure, reported on top without gating the verdict above.
    if boundary.is_empty() {
        report.push("boundary-surfaces", Verdict::Pass, "complex is closed", Vec::new());
    } else {
        let bad: Vec<String> = boundary
            .iter()
            .enumerate()
            .filter(|(_, b)| b.euler != 0)
            .map(|(i, b)| format!("boundary component {i} has Euler characteristic {}", b.euler))
            .collect();
        report.push(
            "boundary-surfaces",
            if bad.is_empty() { Verdict::Pass } else { Verdict::Fail },
            format!(
                "{} boundary components; tori and Klein bottles have Euler characteristic 0",
                boundary.len()
            ),
            bad,
        );
    }

    NpcValidation { edge_classes, vertex_classes, links, boundary, report, npc }
}
