//! Exact analysis of context-specific independences in small discrete
//! distributions, and the log-linear factorizations they license.

pub mod cli;
pub mod domain;
pub mod error;
pub mod factorizer;
pub mod format;
pub mod graph;
pub mod independence;
pub mod loglinear;
pub mod table;
pub mod testkit;

pub use domain::{approx_eq, Assignment, Context, DomainSchema, VarSet, Variable, MAX_STATES};
pub use error::{Error, Result};
pub use table::JointTable;
