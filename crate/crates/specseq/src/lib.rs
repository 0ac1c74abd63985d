//! GF(2) computational core for extended Morse-type complexes and their
//! spectral sequences.
//!
//! The crate builds chain complexes of the form `R_* (x) Z/2<generators>`,
//! where `R` is a chain model of the based loop space of a closed manifold
//! (the cobar construction on a finite simply-connected coalgebra, or a
//! tensor product of such models). A system of coefficients `A = (a_xy)` with
//! entries in `R` determines the boundary; the Maurer-Cartan identity
//! `dA = A * A` is exactly the condition that the boundary squares to zero.
//!
//! The index filtration by the integer weight `mu` of each generator yields a
//! spectral sequence computed page by page with exact GF(2) subspace
//! arithmetic, together with:
//!
//! * a twisted-tensor-product model of the path fibration whose pages give
//!   the Serre spectral sequence used as a comparison oracle,
//! * comparison morphisms between systems (`dB = A B + B A'`) with induced
//!   page maps and retract detection,
//! * reporting of downstream consequences: moduli-existence witnesses for
//!   nonzero differentials, a fundamental-group-image rank bound, and a
//!   coefficient-coverage check.
//!
//! All coefficients live in GF(2); every computation is exact.

pub mod builtin;
pub mod comparison;
pub mod complex;
pub mod consequences;
pub mod dga;
pub mod error;
pub mod gf2;
pub mod json;
pub mod pages;
pub mod serre;
pub mod system;

pub use error::{Error, Result};
