//! Incidence homology of finite projective spaces.
//!
//! The permutation modules `M_k` spanned by the `k`-subspaces of GF(q)^n
//! carry a boundary `∂` (sum of hyperplanes) which is nilpotent over a field
//! GF(p) with `p ∤ q`: `∂^m = 0` for the quantum characteristic `m = m(p,q)`.
//! The homology `H_{k,i} = ker ∂^i / im ∂^{m-i}` at level `k` is what this
//! crate computes, both by exact linear algebra and from closed formulas.

pub mod cache;
pub mod error;
pub mod homology;
pub mod lattice;
pub mod poset;
pub mod qcomb;
pub mod qfield;
pub mod verifier;

pub use cache::{MatrixCache, MatrixKey};
pub use error::{Error, Result};
pub use homology::{HomologyEngine, HomologyResult, InducedKind, SparseMatModP};
pub use lattice::{GroupElement, ProjectiveSpace, Subspace};
pub use poset::{PosetHomology, RankedPoset};
pub use qcomb::{IndexPair, TInterval};
pub use qfield::FieldTable;
pub use verifier::{Grid, IrreducibleDimTable, Theorem, VerificationReport, Verifier};
