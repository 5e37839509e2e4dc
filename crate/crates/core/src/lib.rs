//! Covering Grassmannian codes over small finite fields.
//!
//! An α-(n,k,δ)_q covering code is a set of k-dimensional subspaces of F_q^n
//! in which every α codewords together span at least k+δ dimensions. This
//! crate builds such codes, checks them exhaustively, searches for optimal
//! ones at small sizes, and evaluates closed-form upper and lower bounds on
//! the maximum code size.

pub mod bounds;
pub mod code;
pub mod constructions;
pub mod gf;
pub mod hypergraph;
pub mod matrix;
mod poly;
pub mod subspace;

pub use code::{CodeSpec, CoveringCode, PackingSpec, Verdict, Violation};
pub use gf::{Field, FieldElement};
pub use matrix::MatrixGF;
pub use subspace::{gaussian_binomial, Subspace};
