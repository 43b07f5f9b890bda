//! Exact linear algebra over GF(p) and the homology engine for projective spaces.

mod engine;
mod linalg;
mod modp;
mod quotient;
mod sparse;

pub use engine::{to_sparse, HomologyEngine, HomologyResult, InducedKind, ProfileEntry, SparseVector};
pub use linalg::{kernel_basis, rank_mod_p, rank_with, Echelon, RankMethod};
pub use modp::ModP;
pub use quotient::QuotientSpace;
pub use sparse::SparseMatModP;
