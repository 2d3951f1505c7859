//! Sensitivity-preprocessing functions.
//!
//! Given a function `f` on databases and a sensitivity bound `Δ_i` for each
//! individual, [`preprocess`] builds `g` with `|g(D) − g(D − x_i)| ≤ Δ_i` for
//! every `D` and `i`, equal to `f` wherever `f` already respects the bounds
//! locally. `g` can then be released with personalized differential privacy
//! through [`mechanisms`].
//!
//! The general recursion visits every subset of the database and is
//! exponential; [`stats`] has quadratic-time versions for mean, trimmed mean,
//! median, minimum, maximum and variance. [`geo2d`] handles outputs in the
//! plane under ℓ1 bounds, and [`verify`] holds independent reference
//! implementations and property checkers.
//!
//! ```
//! use spf_core::{preprocess, Database, Record, SensitivityBounds, TableOracle};
//!
//! let f = TableOracle::new(0.0).set(["a"], 3.0).set(["b"], -3.0).set(["a", "b"], 0.0);
//! let db = Database::new(vec![Record::new("a", 0.0), Record::new("b", 1.0)]).unwrap();
//! let out = preprocess(&f, &SensitivityBounds::uniform(1.0).unwrap(), &db).unwrap();
//! assert_eq!(out.value, 0.0);
//! ```

pub mod audit;
pub mod database;
pub mod error;
pub mod geo2d;
pub mod mechanisms;
pub mod memo;
pub mod oracle;
pub mod preprocess;
pub mod stats;
pub mod verify;

pub use audit::{error_bound, error_bound_with, sensitivity_audit, AuditReport, PermutationBound};
pub use database::{CanonicalValue, Database, IndividualId, Record, SensitivityBounds};
pub use error::{Error, Result};
pub use geo2d::{intersect_balls, preprocess_2d, project_to_box, L1Ball, Point2, RotatedBox};
pub use memo::{MemoTable, Subset};
pub use oracle::{FnOracle, FunctionOracle, OracleError, OutputSpace, TableOracle};
pub use preprocess::{
    feasible_interval, preprocess, preprocess_with, FeasibleInterval, PreprocessOptions, Preprocessed,
};

#[cfg(doctest)]
#[doc = include_str!("../../../README.md")]
struct ReadmeDoctests;
