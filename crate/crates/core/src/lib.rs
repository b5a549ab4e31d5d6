//! Exact finite-precision computations around Witt vectors of the divided-power
//! Rees algebra, Fontaine-Laffaille modules, Mazur modules and syntomic cohomology
//! in small weights.

pub mod acceptance;
pub mod arith;
pub mod error;
pub mod fl;
pub mod format;
pub mod gradmod;
pub mod laurent;
pub mod mazsyn;
pub mod report;
pub mod ring;
pub mod sen;
pub mod suites;
pub mod witt;

pub use error::{Error, Result};
