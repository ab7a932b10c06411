//! Spatiotemporal prism complexes for contact-sequence temporal networks and
//! the original and augmented Forman–Ricci curvatures computed on them.
//!
//! Pipeline: [`contact_stream`] parses and bins contacts, [`prism`] builds the
//! weighted prism complex, [`curvature`] evaluates per-edge curvatures,
//! [`verify`] runs the identity suite and [`stats`] aggregates results.

pub mod clique;
pub mod complex;
pub mod contact_stream;
pub mod curvature;
pub mod error;
pub mod generators;
pub mod prism;
pub mod stats;
pub mod verify;

pub use complex::{Simplex, SimplexId, SpacetimeVertex, WeightedComplex};
pub use contact_stream::{parse_contacts, ContactEvent, ContactSequence, NodeId};
pub use curvature::CurvatureRecord;
pub use error::{Error, Result};
pub use prism::{build_kst, BuildOptions, EdgeClass, PrismComplex, WeightConfig, WeightFn};
pub use stats::StatsSummary;
pub use verify::VerificationReport;

/// Absolute tolerance for comparisons between weighted curvature values.
pub const WEIGHTED_TOL: f64 = 1e-9;
/// Absolute tolerance for algebraically exact identities.
pub const EXACT_TOL: f64 = 1e-12;
