//! Fibration-style oracle: the twisted tensor model of the based path
//! space over a simply connected coalgebra.
//!
//! For a coalgebra C (counit in degree 0, nothing in degree 1) the complex
//! is C (x) W with W the loop algebra of C, differential
//!
//!   d(c (x) w) = dc (x) w + c (x) dw + e (x) s(c) w
//!                + sum c' (x) s(c'') w,
//!
//! where e is the counit, s(-) the loop-algebra generator of a reduced
//! element, and the sum runs over the reduced coproduct of c: the twisting
//! term is the full coproduct capped with the universal cochain c -> s(c),
//! whose counit-side component survives as e (x) s(c) w. This is the
//! algebraic
//! shadow of the path fibration: the total complex is acyclic (paths
//! contract), while filtering by the degree of the c factor produces the
//! spectral sequence whose E2 is (homology of C) x (homology of W). Its
//! pages are the independent oracle that extended-complex pages are
//! compared against.
//!
//! Page numbers here come from the dimension engine; the test suite pins
//! them against the explicit-basis engine on every shipped coalgebra.

use std::collections::HashMap;

use crate::complex::{FilteredComplex, Label};
use crate::dga::{cobar, DGCoalgebra, ElemId};
use crate::error::{Error, Result};
use crate::pages::{compute_pages_dims, PageSet};

/// Builds the twisted tensor complex of `c` up to total degree `cap`,
/// filtered by the degree of the coalgebra factor. Fails with
/// `PathModelBroken` when the assembled differential does not square to
/// zero, which only corrupted inputs can cause.
pub fn build_path_model(c: &DGCoalgebra, cap: usize) -> Result<FilteredComplex> {
    build_path_model_inner(c, cap, None)
}

/// Construction body, with a corruption hook: when `drop_twist_of` names a
/// basis element, the twisting terms of that element are left out, so the
/// square-zero guard trips. Tests use it; the public entry point never
/// drops anything.
pub(crate) fn build_path_model_inner(
    c: &DGCoalgebra,
    cap: usize,
    drop_twist_of: Option<&str>,
) -> Result<FilteredComplex> {
    let ring = cobar(c, cap)?;
    // Label order must match the complex's: sorted by (weight, name).
    let mut order: Vec<u32> = (0..c.len() as u32).collect();
    order.sort_by_key(|&i| (c.degree(i), c.name(i).to_string()));
    let label_of: HashMap<u32, usize> = order
        .iter()
        .enumerate()
        .map(|(li, &ci)| (ci, li))
        .collect();
    let labels: Vec<Label> = order
        .iter()
        .map(|&ci| Label {
            name: c.name(ci).to_string(),
            weight: c.degree(ci) as i64,
        })
        .collect();
    // Loop generators of the reduced elements that fit under the cap;
    // twisting terms only ever reference these (the second coproduct
    // factor loses at least one degree to the first).
    let mut sgen: HashMap<u32, ElemId> = HashMap::new();
    for ci in c.reduced() {
        let d = c.degree(ci);
        if d >= 1 && d - 1 <= cap {
            let g = ring.generator(&format!("s{}", c.name(ci)))?;
            let id = g.term_ids().next().expect("generator is a single word");
            sgen.insert(ci, id);
        }
    }
    let ring_for_columns = ring.clone();
    let fc = FilteredComplex::build(
        ring.clone(),
        labels,
        cap as i64,
        move |w, li| {
            let ci = order[li];
            let mut out: Vec<(ElemId, usize)> = Vec::new();
            for &t in ring_for_columns.boundary_ids(w) {
                out.push((t, li));
            }
            for &t in c.differential(ci) {
                out.push((w, label_of[&t]));
            }
            if ci != c.counit() && drop_twist_of != Some(c.name(ci)) {
                // Counit-side component of the capped coproduct.
                let s_self = *sgen
                    .get(&ci)
                    .expect("twisting generator fits under the cap");
                for t in ring_for_columns.multiply_ids(s_self, w)? {
                    out.push((t, label_of[&c.counit()]));
                }
                for &(c1, c2) in c.reduced_coproduct(ci) {
                    let s2 = *sgen
                        .get(&c2)
                        .expect("twisting generator fits under the cap");
                    for t in ring_for_columns.multiply_ids(s2, w)? {
                        out.push((t, label_of[&c1]));
                    }
                }
            }
            Ok(out)
        },
        false,
    )?;
    if !fc.is_square_zero() {
        return Err(Error::PathModelBroken);
    }
    Ok(fc)
}

/// Pages of the path-model filtration: the oracle spectral sequence.
pub fn serre_pages(c: &DGCoalgebra, cap: usize, r_max: i64) -> Result<PageSet> {
    let fc = build_path_model(c, cap)?;
    compute_pages_dims(&fc, r_max)
}
