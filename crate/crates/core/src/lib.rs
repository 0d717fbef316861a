pub mod catalog;
pub mod commring;
pub mod expr;
pub mod freealg;
pub mod linalg;
pub mod matrep;
pub mod report;
pub mod scalars;
pub mod spaces;
pub mod tideal;

pub use freealg::{FreePoly, FreeVar, MultiDegree, ParityAssignment, VarKind, Word};
pub use scalars::{FieldSpec, Scalar, ScalarError};
