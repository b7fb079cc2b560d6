//! Attention-driven tiled 360° video streaming toolkit.
//!
//! The crate models the full prefetch pipeline of a field-of-view-adaptive
//! streaming client: head/gaze traces over the unit sphere, attention
//! prediction with a small ε-SVR, an equirectangular tile grid with a
//! three-level vision hierarchy (attention / sub-attention / periphery),
//! bitrate-quality and per-clip QoE models, a greedy per-class bitrate
//! scheduler with an exhaustive reference, and a clip-granular playout
//! simulator over a time-varying bandwidth profile.

pub mod catalog;
pub mod cli;
pub mod error;
pub mod geometry;
pub mod prediction;
pub mod qoe;
pub mod scheduler;
pub mod simulator;
pub mod svr;
pub mod trace;

pub use error::{Error, Result};
