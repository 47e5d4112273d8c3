//! Exact-arithmetic workbench for the joints and multijoints problems.
pub mod algebra;
pub mod configs;
pub mod error;
pub mod geometry;
pub mod incidence;
pub mod io;
pub mod joints;
pub mod linalg;
pub mod numeric;
pub mod partition;
pub mod peeling;
pub mod probability;
pub mod rng;
pub mod surfaces;
pub mod vanishing;

pub use algebra::{Field, FieldKind, Monomial, MultiPoly, Scalar, UniPoly};
pub use error::{Error, Result};
pub use geometry::{Arrangement, Direction, Line, Point};
pub use incidence::IncidenceReport;
pub use joints::{BucketKey, Exponent, JointRecord, MultijointRecord};
pub use numeric::Decimal;
pub use partition::{CellId, PartitionPolynomial, PartitionResult};
pub use peeling::{PeelStep, PeelingCertificate, Verdict};
pub use probability::TailQuery;
pub use surfaces::{HessianMatrix, SecondForm, Surface};
pub use vanishing::VanishingResult;
