//! Exact free-boson Fock space, zeta-regularized quadratic operators and
//! coefficientwise verification of vertex-operator identities.

pub mod fock;
pub mod generating;
pub mod regularized;
pub mod report;
pub mod scalar;
pub mod series;
pub mod suite;
pub mod voa;

pub use fock::{FockVector, Partition};
pub use report::{CheckReport, Status};
pub use scalar::Scalar;
pub use series::{Series, SeriesError, VarWindow};
