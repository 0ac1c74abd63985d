//! Cobar construction: from a coalgebra to the free algebra modeling
//! chains on its based loop space.
//!
//! Each reduced basis element `x` of degree `d >= 2` contributes one
//! generator `s{x}` of degree `d - 1`. The generator's differential has one
//! single-letter word per term of the coalgebra differential and one
//! two-letter word per term of the reduced coproduct; the Leibniz extension
//! squares to zero because the coalgebra is coassociative and its
//! differential is a coderivation (both checked at coalgebra construction).

use std::collections::HashMap;
use std::sync::Arc;

use crate::error::Result;

use super::algebra::{DGAlgebra, FreeGen};
use super::coalgebra::DGCoalgebra;

/// Free differential algebra on the desuspended reduced basis of `c`,
/// materialized up to `cap`.
pub fn cobar(c: &DGCoalgebra, cap: usize) -> Result<Arc<DGAlgebra>> {
    let reduced: Vec<u32> = c.reduced().collect();
    let gen_of: HashMap<u32, usize> = reduced
        .iter()
        .enumerate()
        .map(|(gi, &ci)| (ci, gi))
        .collect();

    let mut gens = Vec::with_capacity(reduced.len());
    for &ci in &reduced {
        let mut diff = Vec::new();
        for &t in c.differential(ci) {
            diff.push(vec![gen_of[&t]]);
        }
        for &(a, b) in c.reduced_coproduct(ci) {
            diff.push(vec![gen_of[&a], gen_of[&b]]);
        }
        gens.push(FreeGen {
            name: format!("s{}", c.name(ci)),
            degree: c.degree(ci) - 1,
            diff,
        });
    }
    DGAlgebra::free(gens, cap)
}
