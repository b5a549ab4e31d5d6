//! p-typical Witt vectors, truncated big Witt vectors and identity verifiers.

mod bigwitt;
mod poly;
mod vec;
mod verify;

pub use bigwitt::{bigwitt_pth_root, BigWitt};
pub use poly::{default_max_length, IntPoly, WittCtx};
pub use vec::WittVec;
pub use verify::{divided_teichmuller, sharp_lift, test_panel, verify_di_matrix, verify_psi_maz};
