//! Regions of `C^n`, the exhaustion `rho = sum (log|z_j|)^2`, and sampling/lattice
//! certification primitives.

pub mod convexity;
pub mod exhaustion;
pub mod grid;
pub mod region;
pub mod scalar;

pub use convexity::{check_segment, segment_convexity, ConvexityVerdict};
pub use exhaustion::{
    boundary_point, complex_gradient, contraction, contraction_residual, gaussian, hessian_block,
    hessian_fd, hessian_fd_residual, levi_form, levi_lower_bound, omega_ball, origin_ball,
    real_hessian, rho, sample_tube, sample_tube_boundary, tube, unit_direction, up_radius,
    HessianBlock, RealHessian,
};
pub use grid::{grid_components, label_components, lattice_membership, GridLabeling, GridSummary, Lattice, DEFAULT_NODE_BUDGET};
pub use region::{BBox, Constraint, Region};
pub use scalar::{CoordMap, ScalarExpr};
