//! Bipartite process matrices under independent wire covariance.
//!
//! The crate builds the canonical two-party processes, certifies their
//! validity, projects operators onto the wire-covariant sector with a closed
//! form twirl (checked against a Haar Monte-Carlo oracle), decomposes
//! covariant processes into definite-order vertices, splits linear score
//! functionals into a covariant benchmark and a symmetry-breaking remainder,
//! and evaluates causal games through the generalized Born rule.

pub mod ensembles;
pub mod error;
pub mod game;
pub mod linalg;
pub mod process;
pub mod sector;
pub mod tolerance;
pub mod twirl;
pub mod witness;

pub use error::{Error, Result};
pub use linalg::{Operator, RandomSource, SubsystemLayout, C64};
pub use process::{CausalOrder, ProcessMatrix, ValidityReport};
pub use sector::{CovariantCoefficients, SeparableDecomposition};
pub use twirl::WireAssignment;
pub use witness::{ScoreReport, Witness, WitnessSplit};
