//! Verification toolkit for four-dimensional gradient shrinking Ricci solitons.
//!
//! * [`chart`], [`tensor`]: chart metrics and pointwise curvature
//! * [`forms`]: Hodge star and the curvature operator on 2-forms
//! * [`quadrature`], [`invariants`]: Euler characteristic, signature and the
//!   other curvature integrals
//! * [`soliton`]: the soliton equation, its identities, and the integral
//!   sufficient conditions for the Hitchin–Thorpe inequality
//! * [`zoo`]: closed-form reference metrics
//! * [`topology`]: integer invariants and obstruction rules

pub mod chart;
pub mod error;
pub mod forms;
pub mod invariants;
pub mod quadrature;
pub mod soliton;
pub mod tensor;
pub mod topology;
pub mod trig;
pub mod zoo;

pub use chart::{ChartAtlas, ChartPoint, DerivativePath, MetricChart, MetricModel};
pub use error::GeometryError;
pub use invariants::{invariant_report, InvariantReport};
pub use quadrature::{Estimate, QuadratureSpec};
pub use soliton::{SolitonCandidate, SufficientReport};
pub use tensor::{curvature_bundle, levi_civita, CurvatureBundle, PotentialField};
