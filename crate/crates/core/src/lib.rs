//! Combinatorics of cube complexes built from unit cubes with glued faces,
//! together with the checks used to certify them as non-positively curved,
//! the canonical immersed surface dual to the cubing, surgery descriptions on
//! boundary tori, surface hierarchies, and a rewriting engine for curve
//! patterns in a disk.
//!
//! The crate is organised bottom-up:
//!
//! * [`cube`] fixes the numbering of corners, faces, and edges of a single
//!   cube and the eight symmetries of a square face.
//! * [`complex`] assembles cubes and face gluings into a [`complex::CubeComplex`]
//!   and derives edge classes and the boundary subcomplex.
//! * [`link`] builds vertex links and checks the local curvature conditions.
//! * [`validate`] bundles the link and edge checks into one report.
//! * [`emap`] is a small combinatorial-map (rotation system) library used by
//!   everything that walks faces of a graph embedded in a surface.
//! * [`pattern`] holds curve patterns on surfaces: crossing sequences,
//!   candidate compressions, and the sidedness bookkeeping they share.
//! * [`canonical`] constructs the canonical surface of a cube complex and
//!   checks the filling conditions on its complementary regions.
//! * [`model`] is the standalone description of an immersed surface with
//!   double curves and triple points, and the almost-cubed checks.
//! * [`surgery`] handles slopes on boundary tori and intersection counts of
//!   surgered curves with boundary patterns.
//! * [`hierarchy`] verifies ordered systems of surfaces cutting a manifold
//!   down to balls.
//! * [`rewrite`] reduces curve patterns in a disk by local moves with a
//!   terminating measure.
//! * [`report`] and [`formats`] are shared output and input plumbing.

pub mod canonical;
pub mod complex;
pub mod cube;
pub mod emap;
pub mod formats;
pub mod hierarchy;
pub mod link;
pub mod model;
pub mod pattern;
pub mod report;
pub mod rewrite;
pub mod surgery;
mod util;
pub mod validate;
