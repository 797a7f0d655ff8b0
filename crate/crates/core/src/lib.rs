//! Holomorphic line bundles on domains in `C^n` presented by Čech transition data:
//! component-resolved nerves, exact integer cohomology, gluing, exponential-sequence maps,
//! and the tube/ball counterexamples to extending line bundles across compact sets.

pub mod error;
pub mod bundle;
pub mod geometry;
pub mod holo;
pub mod nerve;
pub mod point;
pub mod scenarios;

pub use error::{Error, Result};
pub use point::CPoint;
