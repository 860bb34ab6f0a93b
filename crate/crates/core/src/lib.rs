//! Dependency discovery (FDs, UCCs, ODs, DCs) over a simulated cluster.
//!
//! Relations are dictionary-encoded ([`model::Relation`]). Discovery
//! algorithms are written against a handful of primitives
//! ([`primitives`]) and executed stage by stage on a metered in-process
//! runtime ([`cluster`]), so the bytes moved and work done by each plan
//! can be compared.

pub mod error;
pub mod fixtures;
pub mod model;
pub mod primitives;
pub mod cluster;
pub mod datagen;
pub mod lattice;
pub mod oracle;
pub mod plans;

pub use error::{Error, Result};
