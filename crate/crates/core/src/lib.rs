//! Cone structures, causal lattices and null distances on semi-Riemannian
//! spacetimes of arbitrary index ν.
//!
//! A [`SpacetimeStructure`] bundles a metric field of signature (n−ν, ν), a
//! time frame of ν timelike vector fields and a domain predicate. Everything
//! else runs against it:
//!
//! - [`cone`] classifies tangent vectors against the cone the frame induces,
//! - [`flatspace`] is the closed-form oracle for ℝ^(n−ν,ν),
//! - [`lattice`] discretizes a coordinate box into a causal graph,
//! - [`nulldist`] computes null lengths and shortest-path null distances,
//! - [`verify`] bundles named, seeded verification suites.

pub mod bilinear;
pub mod cone;
mod error;
pub mod flatspace;
pub mod lattice;
pub mod nulldist;
pub mod spacetime;
pub mod verify;

pub use bilinear::{SymForm, Vector};
pub use cone::ConeClass;
pub use error::{Error, Result};
pub use spacetime::{BoxRegion, MetricField, SpacetimeStructure, TimeFrame};
