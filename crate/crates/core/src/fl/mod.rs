//! Fontaine-Laffaille modules: validation, kernels and cokernels, Hom and Ext^1, twists and lifts.

mod homext;
mod lift;
mod module;
mod morphism;
mod random;

pub use homext::{fl_hom_ext1, fp_coords, fp_rank, from_fp_coords, HomExt};
pub use lift::torsionfree_lift;
pub use module::{tate_twist, unit_mod_p, Certification, FLModule};
pub use morphism::FLMorphism;
pub use random::{random_gl, random_morphism, random_mod_p};
