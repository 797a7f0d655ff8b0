//! Holomorphic expressions, matrices of them, and monomial logarithms.

pub mod expr;
pub mod matrix;
pub mod monlog;

pub use expr::{arg_near, holomorphy_residual, holomorphy_residual_fn, HExpr};
pub use matrix::{invert, max_abs_diff, MatExpr, DET_FLOOR};
pub use monlog::{mon_log, MonLog, MonLogTerm, MONLOG_CHECKS};
