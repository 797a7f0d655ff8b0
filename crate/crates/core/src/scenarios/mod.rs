//! End-to-end certificate pipelines for the two counterexamples, and their building blocks.

pub mod config;
pub mod connectivity;
pub mod constructions;
pub mod dim2;
pub mod dimn;
pub mod extras;
pub mod report;

pub use config::{DebugHooks, ScenarioConfig};
pub use connectivity::{
    connectivity_scan, control_region, plan_connectivity, scan_region, thickened_boundary, ConnectivityPlan,
    ConnectivityResult, ScanMode, ScanOutcome,
};
pub use constructions::*;
pub use dim2::{generator_cocycle, run_dim2};
pub use dimn::{run_dimn, sample_ball};
pub use extras::*;
pub use report::{emit_report, CertificateReport, Check, CheckBuilder, ReportFormat, Status, SCHEMA_VERSION};
