#![allow(clippy::needless_range_loop, clippy::type_complexity)]

pub mod builtins;
pub mod classify;
pub mod envelope;
pub mod exact;
pub mod lie;
pub mod normal_j;
pub mod reps;
pub mod sampling;
pub mod siegel;
pub mod suite;
pub mod vfields;
