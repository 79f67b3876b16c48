//! Geometry of the image cone `K = ∩ K_k` in `R^n x C^n`.

pub mod feasibility;
pub mod point;
pub mod sample;
pub mod svg;
pub mod walls;

pub use feasibility::{is_bounded_polyhedron, solve_vertex_flat, vflat_feasible, ExactPoint, FlatSolution};
pub use point::{classify_point, coordinates, MomentImagePoint, Point, Stratum};
pub use sample::{combinatorial_interior_sample, connectedness_report, interior_center, ConnectednessReport, WallContact};
pub use svg::{cone_slice_svg, render_slice_svg};
pub use walls::{wall_residual, wstratum_probe, wstratum_witnesses_n1, ProbeBudget, ProbeOutcome};
