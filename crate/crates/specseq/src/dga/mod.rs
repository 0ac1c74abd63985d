//! Differential graded coalgebras and algebras over GF(2).
//!
//! Coalgebras are finite models of closed simply-connected manifolds: one
//! basis element in degree 0, none in degree 1. Algebras come in two
//! representations behind one interface: free tensor algebras (the cobar
//! construction produces these) and finite product-table algebras; tensor
//! products of algebras keep the representation kind of their factors.
//!
//! Every algebra carries a hard degree cap. Products that would leave the
//! represented window are an explicit error, never a silent truncation.

mod algebra;
mod coalgebra;
mod cobar;
mod morphism;

pub use algebra::{AlgElement, AlgKind, DGAlgebra, ElemId, FreeGen, GenEntry, TableSpec, tensor_algebras};
pub use coalgebra::DGCoalgebra;
pub use cobar::cobar;
pub use morphism::DgaMorphism;

/// Names usable for generators and basis elements: `[A-Za-z0-9_]+`.
pub fn valid_gen_name(name: &str) -> bool {
    coalgebra::valid_name(name)
}

/// Homology dimensions of `alg` in degrees `0..=window`.
///
/// Degree `q` needs the rank of the boundary out of degree `q+1`, so the
/// window must stay strictly below the algebra's degree cap.
pub fn homology_dims(alg: &std::sync::Arc<DGAlgebra>, window: usize) -> crate::Result<Vec<usize>> {
    algebra::homology_dims(alg, window)
}
