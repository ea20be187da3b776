//! Weighted shifts on directed trees with exact rational weights.
//!
//! The crate builds lazily evaluated weight families on the canonical
//! rooted and rootless trees in which every vertex has countably many
//! children, and checks domain, consistency and hyponormality criteria
//! exactly. Infinite sums are either evaluated in closed form or certified
//! divergent by a monotone partial-sum transcript.

pub mod certificate;
pub mod construct;
pub mod custom;
pub mod diagnose;
pub mod exact;
pub mod probe;
pub mod shift;
pub mod tree;

pub use certificate::{Certificate, CertificateKind, Guarantee, TranscriptError, TranscriptLine};
pub use construct::{ConstructError, ConstructionSpec, Mode, RuleFamily};
pub use custom::{ChildSchedule, CustomFamily};
pub use diagnose::{replay, Admissibility, DiagnoseError};
pub use exact::{Exact, Extended};
pub use probe::ProbeWindow;
pub use shift::{ComplexQ, FiniteVector, WeightFamily};
pub use tree::{CanonicalTree, DeclaredTree, Degree, TreeModel, VertexAddr};
