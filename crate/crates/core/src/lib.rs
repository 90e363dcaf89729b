//! Simulator for anycast content delivery with publisher placement, request
//! mapping, unicast/multicast link dimensioning and Monte Carlo sweeps.
//!
//! The pipeline for one trial is:
//! topology -> populations and demand -> placement -> cache plan ->
//! publisher/subscriber relations -> link loads.

pub mod capacity;
pub mod catalogue;
pub mod catchment;
pub mod error;
pub mod harness;
pub mod mapping;
pub mod placement;
pub mod topology;

pub use error::{Error, Result};
pub use placement::Algorithm;
pub use topology::{NetworkGraph, NodeIx};
