//! Linear algebra over Z_q/p^N and graded modules.

mod agraded;
mod graded;
mod matrix;
mod module;
pub mod restrict;
mod snf;

pub use agraded::{tor1_check, AGradedModule, APieces, BaseChangeReport, Relation, Ring, TorCheck};
pub use graded::{Fiber, GradedModule, WeightWindow};
pub use matrix::Mat;
pub(crate) use module::check_well_defined;
pub use module::{two_term_homology, Cokernel, FPModule, ModuleMap, Quotient};
pub use snf::{kernel_basis, smith_normal_form, solve, Snf};
