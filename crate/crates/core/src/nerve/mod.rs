//! Covers, component-resolved nerves, integer cochains and Čech cohomology.

pub mod cochain;
pub mod cohomology;
pub mod cover;
#[allow(clippy::module_inception)]
pub mod nerve;
pub mod snf;

pub use cochain::{coboundary, coboundary_matrix, IntCochain, Ring};
pub use cohomology::{
    cohomology, is_coboundary, verify_obstruction, CoboundaryVerdict, CohomologyResult,
    Gf2Matrix, Obstruction,
};
pub use cover::{Cover, CoverSet, SetTag, Split};
pub use nerve::{build_nerve, CellKey, NerveComponent, NerveSimplex, NerveSummary, ResolvedNerve, Resolution};
pub use snf::{smith_divisors, smith_normal_form, IntMatrix, SmithForm};
