//! Workbench for Mealy automata and the semigroups they generate.
//!
//! The crate implements the machine algebra (dual, inverse, product,
//! powers, word actions), Nerode minimization with exact action
//! signatures, depth-bounded level-transitivity certification, semigroup
//! growth, and executable checks of the structural results relating
//! level-transitivity of the dual action to exponential growth. A small
//! census module enumerates and classifies all invertible-reversible
//! machines of a given shape.
//!
//! ```
//! use mealy_core::{analysis, builtins, minimize, power};
//!
//! let m = builtins::builtin("fig1").unwrap();
//! assert!(m.is_invertible() && m.is_reversible());
//!
//! // two of the four states induce the same action
//! let (quotient, _) = minimize::minimize(&m);
//! assert_eq!(quotient.n_states(), 2);
//!
//! // the dual action is transitive on every checked level, and the
//! // minimized powers double, so the generated semigroup grows fast
//! let cert = analysis::exponential_growth_certificate(
//!     &m, 6, power::DEFAULT_SIZE_LIMIT, power::DEFAULT_ORBIT_BUDGET,
//! ).unwrap();
//! assert_eq!(cert.verdict.to_string(), "EXPONENTIAL-CERTIFIED");
//! assert_eq!(cert.sizes, vec![2, 4, 8, 16, 32, 64]);
//! ```

pub mod analysis;
pub mod builtins;
pub mod census;
pub mod dot;
pub mod error;
pub mod format;
pub mod machine;
pub mod minimize;
pub mod power;
pub mod wire;

pub use error::{Error, ParseError, Result};
pub use machine::{LetterWord, MealyMachine, StateWord};
pub use minimize::{ActionSignature, StatePartition};
