//! Transition-function presentations of holomorphic vector bundles.

pub mod chern;
pub mod data;
pub mod ops;

pub use chern::{
    chern_cocycle, exp_sequence_push, flat_class_test, sign_cocycle, tensor, ChernCocycle, EdgeLog,
    FlatVerdict, Scale,
};
pub use data::{
    sample_component, transition_holomorphy, validate_cocycle, BundleData, CocycleReport,
    Location, TransitionKey,
};
pub use ops::{glue, pullback, restrict, restrict_to_sets, shift_real_parts, BundleIso, Chart, GlueOptions, GlueReport};
