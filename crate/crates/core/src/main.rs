//! Command line front end: parses the input notations, runs the requested
//! checker, and emits a deterministic report. Exit codes: 0 PASS, 1 FAIL,
//! 2 PARTIAL, 3 malformed input or usage error.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write as _};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use cubecomb::canonical::{check_region_conditions, region_graph, CanonicalSurface};
use cubecomb::formats;
use cubecomb::hierarchy::{self, extend_with_fills, verify_hierarchy, HierarchySpec};
use cubecomb::model::{check_almost_cubed, SurfaceModel};
use cubecomb::report::{sha256_hex, Report, Verdict};
use cubecomb::rewrite::{reduce, Mode, RewriteError, Trace};
use cubecomb::surgery::{
    check_surgery, scan_slopes, SurgeryBase, SurgerySpec, TorusPattern, MEET_THRESHOLD,
};
use cubecomb::validate::validate_npc;

#[derive(Parser)]
#[command(name = "cubecomb", version, about = "Checks cubed 3-manifold structures")]
struct Cli {
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Text)]
    format: OutputFormat,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the curvature conditions of a cube complex.
    Validate {
        /// A .cubes file.
        file: PathBuf,
    },
    /// Build the mid-square surface and report its census and regions.
    Surface {
        /// A .cubes file.
        file: PathBuf,
    },
    /// Check the face-degree and small-disk conditions of a surface model.
    #[command(name = "almost-cubed")]
    AlmostCubed {
        /// A .cubes file (converted automatically) or a .surf file.
        file: PathBuf,
    },
    /// Count meridian crossings on boundary patterns for Dehn fillings.
    Surgery {
        /// A .hier or .surf file naming the unfilled base.
        file: Option<PathBuf>,
        /// Use a built-in base instead of a file.
        #[arg(long, value_parser = ["borromean"])]
        fixture: Option<String>,
        /// Glue a solid torus: component=p/q. Repeatable.
        #[arg(long = "fill", value_parser = parse_fill)]
        fills: Vec<SurgerySpec>,
        /// Sweep all primitive slopes with |p|,|q| <= N per component.
        #[arg(long, value_name = "N")]
        scan: Option<i64>,
    },
    /// Verify the disk conditions of a hierarchy specification.
    Hierarchy {
        /// A .hier file.
        file: Option<PathBuf>,
        /// Use a built-in specification instead of a file.
        #[arg(long, value_parser = ["borromean"])]
        fixture: Option<String>,
        /// Extend the hierarchy by a filling before verifying: component=p/q.
        #[arg(long = "fill", value_parser = parse_fill)]
        fills: Vec<SurgerySpec>,
    },
    /// Run the reduction engine on a disk diagram and print the trace.
    Reduce {
        /// A .dg file.
        file: PathBuf,
        /// Vertex typing and complexity measure.
        #[arg(long, value_enum, default_value_t = ModeArg::Theorem1)]
        mode: ModeArg,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    /// One line per check.
    Text,
    /// The full report as JSON.
    Structured,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    /// Crossing diagrams of arcs and loops.
    Theorem1,
    /// Diagrams with T-junctions, measured per label.
    Theorem3,
}

fn parse_fill(s: &str) -> Result<SurgerySpec, String> {
    let usage = "expected component=p/q, e.g. T1=1/2";
    let (component, slope) = s.split_once('=').ok_or(usage)?;
    let (p, q) = slope.split_once('/').ok_or(usage)?;
    let p: i64 = p.trim().parse().map_err(|e| format!("bad slope numerator: {e}"))?;
    let q: i64 = q.trim().parse().map_err(|e| format!("bad slope denominator: {e}"))?;
    Ok(SurgerySpec::solid_torus(component.trim(), (p, q)))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => 3,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(report) => {
            let text = match cli.format {
                OutputFormat::Text => render_text(&report),
                OutputFormat::Structured => {
                    let mut json = report.to_json();
                    json.push('\n');
                    json
                }
            };
            // A closed pipe (e.g. `| head`) is not a tool failure; keep the verdict's code.
            let _ = io::stdout().write_all(text.as_bytes());
            ExitCode::from(report.overall().exit_code())
        }
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}

fn render_text(r: &Report) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "tool: cubecomb {}", r.tool_version);
    let _ = writeln!(out, "input: sha256:{}", r.input_digest);
    for c in &r.checks {
        let _ = writeln!(out, "check {}: {} ({})", c.id, c.verdict, c.detail);
        for loc in &c.locations {
            let _ = writeln!(out, "  at {loc}");
        }
    }
    if let Some(cert) = &r.certificate {
        let _ = writeln!(out, "certificate: {cert}");
    }
    let _ = writeln!(out, "overall: {}", r.overall());
    out
}

fn read_input(path: &Path) -> Result<String, String> {
    fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))
}

fn run(command: Command) -> Result<Report, String> {
    match command {
        Command::Validate { file } => cmd_validate(&file),
        Command::Surface { file } => cmd_surface(&file),
        Command::AlmostCubed { file } => cmd_almost_cubed(&file),
        Command::Surgery { file, fixture, fills, scan } => {
            cmd_surgery(file.as_deref(), fixture.as_deref(), &fills, scan)
        }
        Command::Hierarchy { file, fixture, fills } => {
            cmd_hierarchy(file.as_deref(), fixture.as_deref(), &fills)
        }
        Command::Reduce { file, mode } => cmd_reduce(
            &file,
            match mode {
                ModeArg::Theorem1 => Mode::Crossings,
                ModeArg::Theorem3 => Mode::Tees,
            },
        ),
    }
}

fn cmd_validate(file: &Path) -> Result<Report, String> {
    let text = read_input(file)?;
    let c = formats::parse_cubes(&text).map_err(|e| e.to_string())?;
    let mut report = validate_npc(&c).report;
    report.input_digest = sha256_hex(text.as_bytes());
    if report.overall() == Verdict::Pass {
        report.certificate = Some(
            "edge degrees, link spheres, link 3-cycles, and link simplicity all hold".into(),
        );
    }
    Ok(report)
}

fn cmd_surface(file: &Path) -> Result<Report, String> {
    let text = read_input(file)?;
    let c = formats::parse_cubes(&text).map_err(|e| e.to_string())?;
    let val = validate_npc(&c);
    let mut report = Report::new(sha256_hex(text.as_bytes()));
    report.push(
        "validated",
        if val.npc { Verdict::Pass } else { Verdict::Fail },
        if val.npc {
            "curvature conditions hold".to_string()
        } else {
            "curvature conditions fail; run validate for details".to_string()
        },
        Vec::new(),
    );
    if !val.npc {
        return Ok(report);
    }
    let s = match CanonicalSurface::build(&c, &val) {
        Ok(s) => s,
        Err(e) => {
            report.push("surface-built", Verdict::Fail, e.to_string(), Vec::new());
            return Ok(report);
        }
    };
    report.push(
        "components",
        Verdict::Pass,
        format!("{} surface components", s.components().len()),
        s.components()
            .iter()
            .enumerate()
            .map(|(i, comp)| {
                format!(
                    "component {i}: euler {}, {}, {} squares, {} boundary circles",
                    comp.euler,
                    if comp.orientable { "orientable" } else { "nonorientable" },
                    comp.squares.len(),
                    comp.boundary_circles,
                )
            })
            .collect(),
    );
    let closed = s.double_curves().iter().filter(|d| d.closed).count();
    report.push(
        "double-curves",
        Verdict::Pass,
        format!(
            "{} double curves ({} closed, {} arcs)",
            s.double_curves().len(),
            closed,
            s.double_curves().len() - closed,
        ),
        s.double_curves()
            .iter()
            .enumerate()
            .map(|(i, d)| {
                format!(
                    "curve {i}: {} through {} double arcs",
                    if d.closed { "closed" } else { "open" },
                    d.arcs.len(),
                )
            })
            .collect(),
    );
    report.push(
        "triple-points",
        Verdict::Pass,
        format!("{} triple points", s.triple_points()),
        Vec::new(),
    );
    for v in 0..val.vertex_classes.classes().len() {
        match region_graph(&c, v) {
            Ok(g) => {
                for check in check_region_conditions(&g).checks {
                    report.push(
                        format!("region-v{v}/{}", check.id),
                        check.verdict,
                        check.detail,
                        check.locations,
                    );
                }
            }
            Err(e) => {
                report.push(format!("region-v{v}"), Verdict::Fail, e.to_string(), Vec::new());
            }
        }
    }
    if report.overall() == Verdict::Pass {
        report.certificate =
            Some("the mid-square surface census and all region conditions are verified".into());
    }
    Ok(report)
}

fn cmd_almost_cubed(file: &Path) -> Result<Report, String> {
    let text = read_input(file)?;
    let digest = sha256_hex(text.as_bytes());
    let tag = formats::format_tag(&text).map_err(|e| e.to_string())?;
    let mut report = Report::new(digest);
    match tag.as_str() {
        formats::CUBES_TAG => {
            let c = formats::parse_cubes(&text).map_err(|e| e.to_string())?;
            let val = validate_npc(&c);
            report.push(
                "validated",
                if val.npc { Verdict::Pass } else { Verdict::Fail },
                if val.npc {
                    "curvature conditions hold".to_string()
                } else {
                    "curvature conditions fail; run validate for details".to_string()
                },
                Vec::new(),
            );
            if !val.npc {
                return Ok(report);
            }
            match SurfaceModel::from_complex(&c, &val) {
                Ok(m) => report.checks.extend(check_almost_cubed(&m).checks),
                Err(e) => {
                    report.push("model-built", Verdict::Fail, e.to_string(), Vec::new());
                }
            }
        }
        formats::SURFACE_TAG => {
            let m = formats::parse_surface(&text).map_err(|e| e.to_string())?;
            report.checks.extend(check_almost_cubed(&m).checks);
        }
        other => {
            return Err(format!(
                "almost-cubed reads {:?} or {:?} files, found {other:?}",
                formats::CUBES_TAG,
                formats::SURFACE_TAG,
            ))
        }
    }
    if report.overall() == Verdict::Pass {
        report.certificate = Some(
            "all faces have at least four sides and every small disk candidate is removable"
                .into(),
        );
    }
    Ok(report)
}

enum LoadedBase {
    Hier(HierarchySpec),
    Surf(SurfaceModel),
}

/// Loads a surgery or hierarchy base from a file or the named fixture.
/// Returns the base and the digest of the bytes or fixture consumed.
fn load_base(
    file: Option<&Path>,
    fixture: Option<&str>,
    hierarchy_only: bool,
) -> Result<(LoadedBase, String), String> {
    match (file, fixture) {
        (Some(_), Some(_)) => Err("pass a file or --fixture, not both".into()),
        (None, None) => Err("pass a file or --fixture".into()),
        (None, Some(_)) => {
            // The parser admits only the one fixture name.
            let h = hierarchy::fixtures::borromean();
            let digest = h.digest();
            Ok((LoadedBase::Hier(h), digest))
        }
        (Some(path), None) => {
            let text = read_input(path)?;
            let digest = sha256_hex(text.as_bytes());
            let tag = formats::format_tag(&text).map_err(|e| e.to_string())?;
            match tag.as_str() {
                formats::HIERARCHY_TAG => {
                    let h = formats::parse_hierarchy(&text).map_err(|e| e.to_string())?;
                    Ok((LoadedBase::Hier(h), digest))
                }
                formats::SURFACE_TAG if !hierarchy_only => {
                    let m = formats::parse_surface(&text).map_err(|e| e.to_string())?;
                    Ok((LoadedBase::Surf(m), digest))
                }
                other => Err(format!("{}: unusable format {other:?} here", path.display())),
            }
        }
    }
}

fn cmd_surgery(
    file: Option<&Path>,
    fixture: Option<&str>,
    fills: &[SurgerySpec],
    scan: Option<i64>,
) -> Result<Report, String> {
    let (loaded, digest) = load_base(file, fixture, false)?;
    let base = match &loaded {
        LoadedBase::Hier(h) => SurgeryBase::Hierarchy(h),
        LoadedBase::Surf(m) => SurgeryBase::Surface(m),
    };
    let mut report = check_surgery(&base, fills).map_err(|e| e.to_string())?;
    report.input_digest = digest;

    let patterns: BTreeMap<String, &TorusPattern> = match &loaded {
        LoadedBase::Hier(h) => h.boundary_patterns().collect(),
        LoadedBase::Surf(_) => BTreeMap::new(),
    };
    for (name, tp) in &patterns {
        let census = if tp.regions.is_empty() {
            "no region census supplied".to_string()
        } else {
            let parts: Vec<String> =
                tp.regions.iter().map(|r| format!("{} x {}", r.count, r.kind)).collect();
            format!("complement census: {}", parts.join(", "))
        };
        report.push(format!("pattern-{name}"), Verdict::Pass, census, Vec::new());
        if let Some(n) = scan {
            let counts = scan_slopes(tp, n);
            let low: Vec<String> = counts
                .iter()
                .filter(|&&(_, c)| c < MEET_THRESHOLD)
                .map(|&((p, q), c)| format!("slope {p}/{q} count {c}"))
                .collect();
            let detail = if low.is_empty() {
                format!(
                    "all {} primitive slopes with |p|,|q| <= {n} meet the pattern at least {MEET_THRESHOLD} times",
                    counts.len(),
                )
            } else {
                format!(
                    "{} primitive slopes with |p|,|q| <= {n}; all but {} meet the pattern at least {MEET_THRESHOLD} times",
                    counts.len(),
                    low.len(),
                )
            };
            report.push(format!("scan-{name}"), Verdict::Pass, detail, low);
        }
    }
    if scan.is_some() && patterns.is_empty() {
        report.push(
            "scan",
            Verdict::Pass,
            "the base carries no boundary patterns to scan",
            Vec::new(),
        );
    }
    Ok(report)
}

fn cmd_hierarchy(
    file: Option<&Path>,
    fixture: Option<&str>,
    fills: &[SurgerySpec],
) -> Result<Report, String> {
    let (loaded, digest) = load_base(file, fixture, true)?;
    let LoadedBase::Hier(mut h) = loaded else { unreachable!("hierarchy_only") };
    if !fills.is_empty() {
        for fill in fills {
            fill.validate().map_err(|e| e.to_string())?;
        }
        h = extend_with_fills(&h, fills);
    }
    let mut report = verify_hierarchy(&h).map_err(|e| e.to_string())?;
    report.input_digest = digest;
    Ok(report)
}

fn push_trace(report: &mut Report, trace: &Trace, verdict: Verdict, detail: String) {
    // Locations are sorted on push; zero-padded step numbers keep the sort
    // in trace order.
    let width = trace.steps.len().to_string().len();
    let steps: Vec<String> = trace
        .steps
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let measure: Vec<String> = s.measure.iter().map(u64::to_string).collect();
            format!(
                "step {:0width$}: {} at {}; v {} e {} f {}; measure [{}]",
                i + 1,
                s.kind.name(),
                s.site,
                s.vertices,
                s.edges,
                s.faces,
                measure.join(","),
            )
        })
        .collect();
    report.push("moves", verdict, detail, steps);
}

fn cmd_reduce(file: &Path, mode: Mode) -> Result<Report, String> {
    let text = read_input(file)?;
    let g = formats::parse_disk_graph(&text, mode).map_err(|e| e.to_string())?;
    let mut report = Report::new(sha256_hex(text.as_bytes()));
    report.push(
        "input",
        Verdict::Pass,
        format!(
            "{} vertices, {} edges, {} boundary points",
            g.live_vertices(),
            g.live_edges(),
            g.live_slots(),
        ),
        Vec::new(),
    );
    match reduce(g) {
        Ok(trace) => {
            let n = trace.steps.len();
            push_trace(
                &mut report,
                &trace,
                Verdict::Pass,
                format!("{n} moves to the empty diagram"),
            );
            report.push(
                "euler-invariant",
                Verdict::Pass,
                "v - e + f = 1 held after every move",
                Vec::new(),
            );
            report.push(
                "measure",
                Verdict::Pass,
                "the complexity measure decreased at every move",
                Vec::new(),
            );
            report.certificate =
                Some(format!("the diagram reduced to the empty diagram in {n} moves"));
        }
        Err(RewriteError::Stuck { trace }) => {
            let degrees: Vec<String> =
                trace.residue.face_degrees.iter().map(usize::to_string).collect();
            push_trace(
                &mut report,
                &trace,
                Verdict::Fail,
                format!("no removable face after {} moves", trace.steps.len()),
            );
            report.push(
                "residue",
                Verdict::Fail,
                format!(
                    "{} vertices and {} edges remain; interior face degrees [{}]",
                    trace.residue.vertices,
                    trace.residue.edges,
                    degrees.join(","),
                ),
                Vec::new(),
            );
        }
        Err(e) => return Err(e.to_string()),
    }
    Ok(report)
}
