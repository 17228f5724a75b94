//! Immersed closed surface models and the almost-cubed checks.
//!
//! A [`SurfaceModel`] abstracts an immersed closed surface in an irreducible
//! 3-manifold: polygonal faces cut out by the double curves, triple points
//! where three sheets cross, and the complementary regions, each described
//! by the graph the curves and triple points trace on its boundary surface.
//! The checks decide the combinatorial hypotheses for such a surface to
//! certify the ambient manifold: every face has at least four sides, no
//! loop crosses the double curves exactly once, and every small disk
//! candidate in a complementary region is removable.
//!
//! Regions of positive genus cannot be searched exhaustively; callers must
//! supply the meridian system of the handlebody, and the verdict degrades
//! to partial when one is missing.

use crate::canonical::{region_graph, CanonicalError, CanonicalSurface};
use crate::complex::CubeComplex;
use crate::cube;
use crate::pattern::{Candidate, Disposition, Origin, Pattern, PatternError, Word};
use crate::report::{Report, Verdict};
use crate::validate::{complex_digest, NpcValidation};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ModelError {
    #[error("region {region} has genus {genus} and no meridian system; its disks cannot be enumerated")]
    GenusWithoutMeridians { region: usize, genus: usize },
    #[error("inconsistent incidence data: {0}")]
    BadIncidence(String),
    #[error(transparent)]
    Surface(#[from] CanonicalError),
    #[error(transparent)]
    Word(#[from] PatternError),
}

/// A face of the surface: a polygon whose sides run along double curves
/// and whose corners are triple points.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ModelFace {
    pub degree: usize,
}

/// A double curve with the face sides it carries, one entry per polygon
/// side lying on the curve.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModelCurve {
    pub closed: bool,
    pub face_sides: Vec<usize>,
}

/// A triple point and the three double-curve germs through it.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ModelTriple {
    pub curves: [usize; 3],
}

/// One crossing of a meridian word: the edge crossed and the face entered.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MeridianCross {
    pub edge: usize,
    pub into: usize,
}

/// The closure of a component of the surface complement: a handlebody
/// whose boundary carries the trace of the surface.
#[derive(Clone, Debug)]
pub struct ComplementaryRegion {
    pub genus: usize,
    pub boundary_graph: Pattern,
    /// Meridian system of the handlebody, as crossing words on the
    /// boundary graph. Required when genus > 0.
    pub meridians: Option<Vec<Vec<MeridianCross>>>,
}

#[derive(Clone, Debug)]
pub struct SurfaceModel {
    pub faces: Vec<ModelFace>,
    pub double_curves: Vec<ModelCurve>,
    pub triple_points: Vec<ModelTriple>,
    pub regions: Vec<ComplementaryRegion>,
    digest: String,
}

/// An embedded loop on a region boundary meeting the graph in at most
/// three points, together with its classification.
#[derive(Clone, Debug)]
pub struct DiskCandidate {
    pub region: usize,
    pub candidate: Candidate,
}

impl DiskCandidate {
    pub fn crossing_count(&self) -> usize {
        self.candidate.crossings()
    }
}

/// Resolves a crossing word to pattern darts: each crossing picks the dart
/// of its edge whose left face is the one entered.
fn resolve_word(p: &Pattern, word: &[MeridianCross]) -> Result<Vec<usize>, ModelError> {
    let mut darts = Vec::with_capacity(word.len());
    for c in word {
        if c.edge >= p.map().edges() {
            return Err(PatternError::BadWord(format!("edge {} out of range", c.edge)).into());
        }
        let d = [2 * c.edge, 2 * c.edge + 1]
            .into_iter()
            .find(|&d| p.left_face(d) == c.into)
            .ok_or_else(|| {
                PatternError::BadWord(format!(
                    "edge {} does not border face {}",
                    c.edge, c.into
                ))
            })?;
        darts.push(d);
    }
    Ok(darts)
}

impl SurfaceModel {
    pub fn new(
        faces: Vec<ModelFace>,
        double_curves: Vec<ModelCurve>,
        triple_points: Vec<ModelTriple>,
        regions: Vec<ComplementaryRegion>,
        digest: impl Into<String>,
    ) -> Result<SurfaceModel, ModelError> {
        let m = SurfaceModel {
            faces,
            double_curves,
            triple_points,
            regions,
            digest: digest.into(),
        };
        m.validate()?;
        Ok(m)
    }

    fn validate(&self) -> Result<(), ModelError> {
        let nf = self.faces.len();
        let nc = self.double_curves.len();
        for (i, t) in self.triple_points.iter().enumerate() {
            for &k in &t.curves {
                if k >= nc {
                    return Err(ModelError::BadIncidence(format!(
                        "triple point {i} names curve {k} of {nc}"
                    )));
                }
            }
        }
        let mut sides = vec![0usize; nf];
        for (k, curve) in self.double_curves.iter().enumerate() {
            for &f in &curve.face_sides {
                if f >= nf {
                    return Err(ModelError::BadIncidence(format!(
                        "curve {k} names face {f} of {nf}"
                    )));
                }
                sides[f] += 1;
            }
        }
        for (f, face) in self.faces.iter().enumerate() {
            if sides[f] != face.degree {
                return Err(ModelError::BadIncidence(format!(
                    "face {f} has degree {} but {} curve sides",
                    face.degree, sides[f]
                )));
            }
        }
        for (i, r) in self.regions.iter().enumerate() {
            let p = &r.boundary_graph;
            // An empty graph carries no cell structure to read the surface
            // off of; the genus stands on its own.
            if p.map().edges() > 0 && p.carrier_euler() != 2 - 2 * r.genus as i64 {
                return Err(ModelError::BadIncidence(format!(
                    "region {i} boundary graph has Euler number {} on a genus {} surface",
                    p.carrier_euler(),
                    r.genus
                )));
            }
            for (v, orbit) in p.map().vertices().orbits().iter().enumerate() {
                let ok = if p.is_marker(v) { orbit.len() == 2 } else { orbit.len() == 3 };
                if !ok {
                    return Err(ModelError::BadIncidence(format!(
                        "region {i} vertex {v} has degree {}; triple points have degree 3",
                        orbit.len()
                    )));
                }
            }
            if let Some(words) = &r.meridians {
                for w in words {
                    let darts = resolve_word(p, w)?;
                    // Words longer than the search bound stay well-formed but
                    // unclassified; shorter ones must classify cleanly.
                    if darts.len() <= 3 {
                        p.meridian_candidate(&darts)?;
                    }
                }
            }
        }
        Ok(())
    }

    /// Builds the model of the mid-square surface of a validated closed
    /// complex. Complexes with boundary are rejected when the first
    /// boundary vertex yields no closed region.
    pub fn from_complex(c: &CubeComplex, val: &NpcValidation) -> Result<SurfaceModel, ModelError> {
        let surf = CanonicalSurface::build(c, val)?;
        let n = c.cubes();

        let verts = c.vertex_classes();
        let mut regions = Vec::new();
        for v in 0..verts.classes().len() {
            let g = region_graph(c, v)?;
            regions.push(ComplementaryRegion {
                genus: 0,
                boundary_graph: g.pattern,
                meridians: None,
            });
        }

        let faces: Vec<ModelFace> =
            surf.faces().iter().map(|f| ModelFace { degree: f.degree() }).collect();
        let mut face_of_quarter = vec![usize::MAX; 12 * n];
        for (i, f) in surf.faces().iter().enumerate() {
            for &q in &f.quarters {
                face_of_quarter[q] = i;
            }
        }

        // A double arc along axis d is flanked by the quarters of the two
        // squares it lies in; two touches make one polygon side.
        let mut curve_of_arc = vec![usize::MAX; 3 * n];
        for (k, curve) in surf.double_curves().iter().enumerate() {
            for &a in &curve.arcs {
                curve_of_arc[a] = k;
            }
        }
        let double_curves: Vec<ModelCurve> = surf
            .double_curves()
            .iter()
            .map(|curve| {
                let mut touches = vec![0usize; faces.len()];
                for &arc in &curve.arcs {
                    let cube_id = arc / 3;
                    let d = arc % 3;
                    let (u, v) = cube::free_axes(d);
                    for sq_axis in [u, v] {
                        for q in 0..4 {
                            touches[face_of_quarter[12 * cube_id + 4 * sq_axis + q]] += 1;
                        }
                    }
                }
                let mut face_sides = Vec::new();
                for (f, &t) in touches.iter().enumerate() {
                    debug_assert_eq!(t % 2, 0);
                    face_sides.extend(std::iter::repeat_n(f, t / 2));
                }
                ModelCurve { closed: curve.closed, face_sides }
            })
            .collect();

        let triple_points: Vec<ModelTriple> = (0..n)
            .map(|c| ModelTriple {
                curves: [curve_of_arc[3 * c], curve_of_arc[3 * c + 1], curve_of_arc[3 * c + 2]],
            })
            .collect();

        SurfaceModel::new(faces, double_curves, triple_points, regions, complex_digest(c))
    }

    pub fn digest(&self) -> &str {
        &self.digest
    }
}

/// All embedded loops on the region's boundary meeting the graph in at
/// most three points, one per isotopy class, plus any supplied meridian
/// words of at most three crossings.
pub fn enumerate_small_disks(
    r: &ComplementaryRegion,
    region: usize,
) -> Result<Vec<DiskCandidate>, ModelError> {
    if r.genus > 0 && r.meridians.is_none() {
        return Err(ModelError::GenusWithoutMeridians { region, genus: r.genus });
    }
    if r.boundary_graph.map().edges() == 0 {
        // A bare boundary surface carries exactly one loop class. No
        // pattern face exists to name, so face 0 stands for the whole
        // surface.
        return Ok(vec![DiskCandidate {
            region,
            candidate: Candidate {
                word: Word::FaceInterior { face: 0 },
                origin: Origin::Enumerated,
                disposition: Disposition::Trivial,
                sides: None,
                chords: Vec::new(),
            },
        }]);
    }
    let mut out: Vec<DiskCandidate> = r
        .boundary_graph
        .enumerate_candidates(3)
        .into_iter()
        .map(|candidate| DiskCandidate { region, candidate })
        .collect();
    if let Some(words) = &r.meridians {
        for w in words {
            let darts = resolve_word(&r.boundary_graph, w)?;
            if darts.len() > 3 {
                continue;
            }
            out.extend(
                r.boundary_graph
                    .meridian_candidate(&darts)?
                    .into_iter()
                    .map(|candidate| DiskCandidate { region, candidate }),
            );
        }
    }
    Ok(out)
}

/// Classification of a disk candidate: loops crossing nothing are trivial
/// iff they bound bare surface, two-point loops iff they cut off a single
/// arc, three-point loops iff they cut off a single Y. The work happens at
/// enumeration time; this is the stable name for reading it off.
pub fn classify_triviality(_m: &SurfaceModel, d: &DiskCandidate) -> Disposition {
    d.candidate.disposition
}

fn push_face_degrees(m: &SurfaceModel, report: &mut Report) {
    if m.double_curves.is_empty() {
        report.push(
            "face-degrees",
            Verdict::Pass,
            "embedded surface with no double curves; face conditions are vacuous",
            Vec::new(),
        );
        return;
    }
    let bad: Vec<usize> =
        (0..m.faces.len()).filter(|&f| m.faces[f].degree < 4).collect();
    if bad.is_empty() {
        report.push(
            "face-degrees",
            Verdict::Pass,
            format!("all {} faces have at least four sides", m.faces.len()),
            Vec::new(),
        );
    } else {
        let locations: Vec<String> =
            bad.iter().map(|&f| format!("face {f} degree {}", m.faces[f].degree)).collect();
        report.push(
            "face-degrees",
            Verdict::Fail,
            format!("{} faces have fewer than four sides", bad.len()),
            locations,
        );
    }
}

pub fn check_face_degrees(m: &SurfaceModel) -> Report {
    let mut report = Report::new(m.digest.clone());
    push_face_degrees(m, &mut report);
    report
}

#[derive(Default)]
struct Bucket {
    total: usize,
    essential: Vec<String>,
    unsupported: Vec<String>,
    not_disks: usize,
}

/// The conjunction of the almost-cubed hypotheses: face degrees, no
/// one-point loops, all two- and three-point disk candidates removable.
/// Regions whose disks cannot be enumerated degrade the verdict to
/// partial.
pub fn check_almost_cubed(m: &SurfaceModel) -> Report {
    let mut report = Report::new(m.digest.clone());
    push_face_degrees(m, &mut report);

    let mut buckets: [Bucket; 4] = Default::default();
    let mut uncertified = Vec::new();
    for (i, r) in m.regions.iter().enumerate() {
        match enumerate_small_disks(r, i) {
            Err(ModelError::GenusWithoutMeridians { .. }) => {
                uncertified.push(format!("region {i} genus {}", r.genus));
            }
            Err(e) => {
                // Unreachable for validated models; degrade rather than hide.
                uncertified.push(format!("region {i}: {e}"));
            }
            Ok(cands) => {
                for d in cands {
                    let bucket = &mut buckets[d.crossing_count()];
                    bucket.total += 1;
                    match d.candidate.disposition {
                        Disposition::Trivial => {}
                        Disposition::Essential => {
                            bucket.essential.push(format!("region {i} {:?}", d.candidate.word));
                        }
                        Disposition::Unsupported => {
                            bucket.unsupported.push(format!("region {i} {:?}", d.candidate.word));
                        }
                        Disposition::NotADisk => {
                            debug_assert_eq!(d.candidate.origin, Origin::Enumerated);
                            bucket.not_disks += 1;
                        }
                    }
                }
            }
        }
    }

    let names = ["zero-point-disks", "one-point-disks", "two-point-disks", "three-point-disks"];
    for (k, name) in names.iter().enumerate() {
        let b = &buckets[k];
        if !b.essential.is_empty() {
            let detail = if k == 1 {
                format!(
                    "{} loops cross the double curves exactly once; none are permitted",
                    b.essential.len()
                )
            } else {
                format!(
                    "{} of {} candidates are not removable",
                    b.essential.len(),
                    b.total
                )
            };
            report.push(*name, Verdict::Fail, detail, b.essential.clone());
        } else if !b.unsupported.is_empty() {
            report.push(
                *name,
                Verdict::Partial,
                format!("{} candidates have unsupported chord layouts", b.unsupported.len()),
                b.unsupported.clone(),
            );
        } else {
            let mut detail = format!("{} candidates, all removable", b.total);
            if b.not_disks > 0 {
                detail.push_str(&format!(
                    "; {} loops bound no disk on their region boundary and are not disk candidates (complete meridian systems assumed)",
                    b.not_disks
                ));
            }
            report.push(*name, Verdict::Pass, detail, Vec::new());
        }
    }

    if uncertified.is_empty() {
        report.push(
            "region-meridians",
            Verdict::Pass,
            format!("all {} regions fully searchable", m.regions.len()),
            Vec::new(),
        );
    } else {
        report.push(
            "region-meridians",
            Verdict::Partial,
            format!(
                "{} of {} regions cannot be searched exhaustively",
                uncertified.len(),
                m.regions.len()
            ),
            uncertified,
        );
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::fixtures;
    use crate::emap::EMap;
    use crate::pattern::FaceKind;
    use crate::validate::validate_npc;

    fn t3_model() -> SurfaceModel {
        let c = fixtures::t3();
        let val = validate_npc(&c);
        SurfaceModel::from_complex(&c, &val).unwrap()
    }

    #[test]
    fn t3_model_structure() {
        let m = t3_model();
        assert_eq!(m.faces.len(), 3);
        assert!(m.faces.iter().all(|f| f.degree == 4));
        assert_eq!(m.double_curves.len(), 3);
        for curve in &m.double_curves {
            assert!(curve.closed);
            assert_eq!(curve.face_sides.len(), 4);
            // Each curve carries two sides of each of the other two faces.
            let mut faces = curve.face_sides.clone();
            faces.dedup();
            assert_eq!(faces.len(), 2);
        }
        assert_eq!(m.triple_points.len(), 1);
        let mut curves = m.triple_points[0].curves;
        curves.sort_unstable();
        assert_eq!(curves, [0, 1, 2]);
        assert_eq!(m.regions.len(), 1);
        assert_eq!(m.regions[0].genus, 0);
        assert_eq!(m.regions[0].boundary_graph.faces().len(), 6);
    }

    #[test]
    fn curved_fixtures_are_almost_cubed() {
        for c in [
            fixtures::t3(),
            fixtures::stack(2),
            fixtures::stack(3),
            fixtures::one_cube(&[(0, 1, "r270"), (2, 3, "r180"), (4, 5, "r270")]),
        ] {
            let val = validate_npc(&c);
            assert!(val.npc);
            let m = SurfaceModel::from_complex(&c, &val).unwrap();
            let report = check_almost_cubed(&m);
            assert_eq!(report.overall(), Verdict::Pass, "{}", report.to_json());
        }
    }

    #[test]
    fn injected_low_degree_face_fails() {
        let mut m = t3_model();
        assert_eq!(check_almost_cubed(&m).overall(), Verdict::Pass);
        m.faces.push(ModelFace { degree: 3 });
        let report = check_almost_cubed(&m);
        assert_eq!(report.overall(), Verdict::Fail);
        let check = report.check("face-degrees").unwrap();
        assert_eq!(check.verdict, Verdict::Fail);
        assert!(check.locations.iter().any(|l| l.contains("face 3")));
        let single = check_face_degrees(&m);
        assert_eq!(single.check("face-degrees").unwrap().verdict, Verdict::Fail);
    }

    #[test]
    fn conversion_requires_closed_complex() {
        let c = fixtures::twocube();
        let val = validate_npc(&c);
        assert!(val.npc);
        let err = SurfaceModel::from_complex(&c, &val).unwrap_err();
        assert!(matches!(
            err,
            ModelError::Surface(CanonicalError::NotClosedLink { .. })
        ));
    }

    #[test]
    fn embedded_surface_is_vacuously_fine() {
        // A sphere region with nothing on its boundary.
        let p = Pattern::on_sphere(EMap::new(Vec::new()).unwrap()).unwrap();
        let m = SurfaceModel::new(
            Vec::new(),
            Vec::new(),
            Vec::new(),
            vec![ComplementaryRegion { genus: 0, boundary_graph: p, meridians: None }],
            "test",
        )
        .unwrap();
        let disks = enumerate_small_disks(&m.regions[0], 0).unwrap();
        assert_eq!(disks.len(), 1);
        assert_eq!(disks[0].crossing_count(), 0);
        assert_eq!(classify_triviality(&m, &disks[0]), Disposition::Trivial);
        let report = check_almost_cubed(&m);
        assert_eq!(report.overall(), Verdict::Pass);
        assert!(report
            .check("face-degrees")
            .unwrap()
            .detail
            .contains("embedded"));
    }

    #[test]
    fn genus_without_meridians_degrades_to_partial() {
        let p = Pattern::on_surface(EMap::new(Vec::new()).unwrap(), Vec::new()).unwrap();
        let m = SurfaceModel::new(
            Vec::new(),
            Vec::new(),
            Vec::new(),
            vec![ComplementaryRegion { genus: 1, boundary_graph: p, meridians: None }],
            "test",
        )
        .unwrap();
        assert!(matches!(
            enumerate_small_disks(&m.regions[0], 0),
            Err(ModelError::GenusWithoutMeridians { region: 0, genus: 1 })
        ));
        let report = check_almost_cubed(&m);
        assert_eq!(report.overall(), Verdict::Partial);
        assert_eq!(report.check("region-meridians").unwrap().verdict, Verdict::Partial);
    }

    /// Dumbbell with a doubled bar: two loop vertices tied to the ends of
    /// two parallel edges. The parallel pair admits a two-point loop whose
    /// sides both hold a leg and a loop, the constructed essential case.
    fn doubled_bar_region() -> ComplementaryRegion {
        // Edges: 0 loop at w, 1 bar w-u, 2 and 3 parallel u-v, 4 bar v-x,
        // 5 loop at x. Rotations chosen to embed in the sphere.
        let map = EMap::from_vertex_rotations(
            6,
            &[
                vec![0, 1, 2],    // w: loop out, loop in, bar
                vec![3, 4, 6],    // u: bar, upper strand, lower strand
                vec![5, 8, 7],    // v: upper strand, bar, lower strand
                vec![9, 10, 11],  // x: bar, loop out, loop in
            ],
        )
        .unwrap();
        let p = Pattern::on_sphere(map).unwrap();
        assert_eq!(p.carrier_euler(), 2);
        ComplementaryRegion { genus: 0, boundary_graph: p, meridians: None }
    }

    #[test]
    fn parallel_edges_give_an_essential_two_point_loop() {
        let r = doubled_bar_region();
        let disks = enumerate_small_disks(&r, 0).unwrap();
        let two_point: Vec<&DiskCandidate> = disks
            .iter()
            .filter(|d| {
                matches!(&d.candidate.word, Word::Crossings { darts, .. } if darts.len() == 2)
            })
            .collect();
        assert!(!two_point.is_empty());
        let crossing_pair = two_point.iter().any(|d| {
            let Word::Crossings { darts, .. } = &d.candidate.word else { unreachable!() };
            let mut edges: Vec<usize> =
                darts.iter().map(|&x| r.boundary_graph.map().edge_of(x)).collect();
            edges.sort_unstable();
            edges == vec![2, 3] && d.candidate.disposition == Disposition::Essential
        });
        assert!(crossing_pair, "the loop through both parallel edges is essential");

        let m = SurfaceModel::new(
            Vec::new(),
            Vec::new(),
            Vec::new(),
            vec![r],
            "test",
        );
        // Loop vertices have degree 3 only with their bar; the two loop
        // edges meet their vertex twice.
        let m = m.unwrap();
        let report = check_almost_cubed(&m);
        assert_eq!(report.check("two-point-disks").unwrap().verdict, Verdict::Fail);
        // Loop edges bound one-point candidates as well.
        assert_eq!(report.check("one-point-disks").unwrap().verdict, Verdict::Fail);
        assert_eq!(report.overall(), Verdict::Fail);
    }

    #[test]
    fn classification_ignores_rotation_and_reversal() {
        let m = t3_model();
        let p = &m.regions[0].boundary_graph;
        let three: Vec<usize> = {
            let cands = p.enumerate_candidates(3);
            let c = cands
                .iter()
                .find(|c| matches!(&c.word, Word::Crossings { darts, .. } if darts.len() == 3))
                .unwrap();
            let Word::Crossings { darts, .. } = &c.word else { unreachable!() };
            darts.clone()
        };
        let base: Vec<Disposition> =
            p.meridian_candidate(&three).unwrap().iter().map(|c| c.disposition).collect();
        let rotated = vec![three[1], three[2], three[0]];
        let rot: Vec<Disposition> =
            p.meridian_candidate(&rotated).unwrap().iter().map(|c| c.disposition).collect();
        let reversed: Vec<usize> = three.iter().rev().map(|&d| p.map().theta(d)).collect();
        let rev: Vec<Disposition> =
            p.meridian_candidate(&reversed).unwrap().iter().map(|c| c.disposition).collect();
        assert_eq!(base, rot);
        assert_eq!(base, rev);
    }

    #[test]
    fn meridian_words_over_the_bound_are_excluded() {
        // Two circles on a torus, subdivided by markers; a four-crossing
        // word is well-formed but too long to classify.
        let map = EMap::from_vertex_rotations(
            4,
            &[vec![0, 3], vec![2, 1], vec![4, 7], vec![6, 5]],
        )
        .unwrap();
        let faces = vec![
            crate::pattern::FaceGroup { kind: FaceKind::Annulus, walks: vec![0, 3] },
            crate::pattern::FaceGroup { kind: FaceKind::Annulus, walks: vec![1, 2] },
        ];
        let mut p = Pattern::on_surface(map, faces).unwrap();
        for v in 0..p.vertices() {
            p.set_marker(v, true);
        }
        let f0 = p.left_face(0);
        let f1 = p.left_face(1);
        let long_word: Vec<MeridianCross> = vec![
            MeridianCross { edge: 0, into: f0 },
            MeridianCross { edge: 2, into: f0 },
            MeridianCross { edge: 1, into: f1 },
            MeridianCross { edge: 3, into: f1 },
        ];
        let r = ComplementaryRegion {
            genus: 1,
            boundary_graph: p,
            meridians: Some(vec![long_word]),
        };
        let disks = enumerate_small_disks(&r, 0).unwrap();
        assert!(disks.iter().all(|d| d.candidate.origin == Origin::Enumerated));
    }
}
