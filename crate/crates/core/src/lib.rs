//! Eigenpairs of complex square matrices found by globally minimizing the
//! residual functional `f(v, λ) = ‖T v − λ v‖ / ‖v‖`, without determinants or
//! characteristic polynomials, plus numerical checks of the operator
//! identities behind the construction.

pub mod error;
pub mod extension;
pub mod identities;
pub mod io;
pub mod linalg;
pub mod minimizer;
pub mod oracle;
pub mod pattern;
pub mod random;

pub use error::{Error, Result, SingularInfo};
pub use extension::{decay_term, extend_pair, inverse_norm_bound_check, ExtensionOutcome, ExtensionResult};
pub use identities::IdentityReport;
pub use linalg::{ComplexMatrix, ComplexVector, Lu, NormKind, OperatorBound};
pub use minimizer::{minimize, CandidatePair, Certificate, MinimizeConfig, SearchDomain};
pub use num_complex::Complex64;
pub use oracle::{reference_spectrum, SpectrumEstimate};
