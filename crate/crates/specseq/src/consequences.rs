//! Structural consequences extracted from a computed page tower.
//!
//! Three read-offs are supported. A certified nonzero differential on
//! page r forces, at chain level, generator pairs whose index gap is
//! exactly r and whose connection entry is nonzero; these pairs are the
//! witnesses of a claim. The base row of the second page bounds from
//! below how many generators any system with these pages must carry.
//! Finally, the subalgebra generated by the cycle entries can be tested
//! to cover the ring's homology degree by degree, which certifies that
//! the connection data sees every class the coefficients provide.

use crate::complex::assemble;
use crate::dga::DGAlgebra;
use crate::error::{Error, Result};
use crate::gf2::F2Matrix;
use crate::pages::{compute_pages, PageSet};
use crate::system::GeneratorSystem;
use std::sync::Arc;

/// Existence claim read off one page: some generator pair at index gap
/// `r` must be connected, because a certified differential on page r is
/// nonzero.
#[derive(Clone, Debug)]
pub struct ModuliClaim {
    /// Page number, equal to the index gap of the forced pairs.
    pub r: i64,
    /// Pairs (x, y) with mu(x) - mu(y) = r and a nonzero connection
    /// entry from x to y; these are the pairs that can carry the claim.
    pub witnesses: Vec<(String, String)>,
    /// Certified cells (p, q, rank) whose differential is nonzero.
    pub evidence: Vec<(i64, i64, usize)>,
}

/// One claim per page number that carries a certified nonzero
/// differential, ordered by r.
pub fn moduli_claims(sys: &GeneratorSystem, ps: &PageSet) -> Vec<ModuliClaim> {
    let gens = sys.generators();
    let mut claims = Vec::new();
    for page in &ps.pages {
        let evidence: Vec<(i64, i64, usize)> = page
            .cells
            .iter()
            .filter(|(_, cell)| cell.certified && cell.d_rank > 0)
            .map(|(&(p, q), cell)| (p, q, cell.d_rank))
            .collect();
        if evidence.is_empty() {
            continue;
        }
        let witnesses: Vec<(String, String)> = sys
            .entries()
            .filter(|&((x, y), _)| gens[x].mu - gens[y].mu == page.r)
            .map(|((x, y), _)| (gens[x].name.clone(), gens[y].name.clone()))
            .collect();
        claims.push(ModuliClaim {
            r: page.r,
            witnesses,
            evidence,
        });
    }
    claims
}

/// Sum of the certified base-row dimensions on the second page, minus
/// one: a lower bound on the rank of the evaluation map the base row
/// controls, with one dimension subtracted for the unit.
pub fn rank_lower_bound(ps: &PageSet) -> usize {
    let Some(page) = ps.page(2) else { return 0 };
    let total: usize = page
        .cells
        .iter()
        .filter(|&(&(_, q), cell)| q == 0 && cell.certified)
        .map(|(_, cell)| cell.dim)
        .sum();
    total.saturating_sub(1)
}

fn boundary_matrix(alg: &Arc<DGAlgebra>, degree: usize) -> F2Matrix {
    let cols = alg.basis_ids(degree);
    let rows = if degree == 0 { 0 } else { alg.dim(degree - 1) };
    let mut m = F2Matrix::zeros(rows, cols.len());
    for (j, &id) in cols.iter().enumerate() {
        for &t in alg.boundary_ids(id) {
            m.set(alg.pos_of(t), j, true);
        }
    }
    m
}

/// True when the subalgebra generated by the cycle entries of the system
/// surjects onto the ring's homology in every degree `0..=window`.
pub fn entries_generate_ring_homology(
    sys: &GeneratorSystem,
    window: usize,
) -> Result<bool> {
    let ring = sys.ring();
    if window + 1 > ring.degree_cap() {
        return Err(Error::HomologyWindow {
            requested: window,
            cap: ring.degree_cap(),
        });
    }
    let cycle_entries: Vec<_> = sys
        .entries()
        .map(|(_, e)| e.clone())
        .filter(|e| e.is_cycle() && !e.is_zero())
        .collect();
    // Graded pieces of the generated subalgebra, as coordinate subspaces
    // of the ring's degree bases. Every word in the entries factors as
    // (shorter word) . (entry), so a right-multiplication closure spans.
    let mut graded: Vec<crate::gf2::F2Subspace> = Vec::with_capacity(window + 1);
    for d in 0..=window {
        let mut vectors = Vec::new();
        if d == 0 {
            let mut v = crate::gf2::F2Vec::zeros(ring.dim(0));
            for t in ring.unit().term_ids() {
                v.set(ring.pos_of(t), true);
            }
            vectors.push(v);
        }
        for e in &cycle_entries {
            let t = e.degree();
            if t == 0 || t > d {
                continue;
            }
            let lower = &graded[d - t];
            for gvec in lower.basis_rows() {
                let ids: Vec<_> = gvec
                    .ones()
                    .map(|i| ring.basis_ids(d - t)[i])
                    .collect();
                let g = ring.elem_from_ids(d - t, &ids);
                let prod = g.multiply(e)?;
                let mut v = crate::gf2::F2Vec::zeros(ring.dim(d));
                for id in prod.term_ids() {
                    v.set(ring.pos_of(id), true);
                }
                vectors.push(v);
            }
        }
        graded.push(crate::gf2::F2Subspace::from_spanning(ring.dim(d), &vectors));
    }
    for d in 0..=window {
        let cycles = boundary_matrix(ring, d).kernel();
        let boundaries = boundary_matrix(ring, d + 1).image();
        let seen = graded[d].intersect(&cycles).sum(&boundaries);
        if seen.dim() != cycles.dim() {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Debug)]
pub struct ConsequenceReport {
    pub claims: Vec<ModuliClaim>,
    pub rank_bound: usize,
    pub homology_covered: bool,
    pub coverage_window: usize,
}

/// All three read-offs from one assembly of the system.
pub fn consequences(
    sys: &GeneratorSystem,
    cap: i64,
    r_max: i64,
    window: usize,
) -> Result<ConsequenceReport> {
    let fc = assemble(sys, cap)?;
    let ps = compute_pages(&fc, r_max)?;
    Ok(ConsequenceReport {
        claims: moduli_claims(sys, &ps),
        rank_bound: rank_lower_bound(&ps),
        homology_covered: entries_generate_ring_homology(sys, window)?,
        coverage_window: window,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtin::{point_system, product_system, sphere_height};
    use crate::dga::{cobar, DGCoalgebra};
    use crate::system::Generator;

    #[test]
    fn sphere_claims_sit_on_one_page_with_the_connecting_pair() {
        let sys = sphere_height(3);
        let report = consequences(&sys, 10, 4, 6).unwrap();
        assert_eq!(report.claims.len(), 1);
        let claim = &report.claims[0];
        assert_eq!(claim.r, 3);
        assert_eq!(claim.witnesses, vec![("T".to_string(), "B".to_string())]);
        assert!(!claim.evidence.is_empty());
        assert!(claim.evidence.iter().all(|&(_, _, rank)| rank == 1));
        assert_eq!(report.rank_bound, 1);
        assert!(report.homology_covered);
    }

    #[test]
    fn product_system_bound_counts_all_but_one_generator() {
        let s2 = sphere_height(2);
        let sys = product_system(&s2, &s2).unwrap();
        let report = consequences(&sys, 8, 3, 5).unwrap();
        assert_eq!(report.rank_bound, 3);
        assert!(report.homology_covered);
    }

    #[test]
    fn zero_connections_over_a_nontrivial_ring_cover_nothing() {
        let ring = cobar(&DGCoalgebra::sphere(2), 8).unwrap();
        let sys =
            GeneratorSystem::new(vec![Generator::new("only", 0)], ring, vec![]).unwrap();
        assert!(!entries_generate_ring_homology(&sys, 4).unwrap());
        let report = consequences(&sys, 6, 3, 4).unwrap();
        assert!(report.claims.is_empty());
        assert_eq!(report.rank_bound, 0);
    }

    #[test]
    fn zero_connections_over_the_trivial_ring_are_complete() {
        let sys = point_system();
        assert!(entries_generate_ring_homology(&sys, 4).unwrap());
    }

    #[test]
    fn coverage_window_must_fit_under_the_cap() {
        let sys = sphere_height(2);
        let window = sys.ring().degree_cap();
        assert!(matches!(
            entries_generate_ring_homology(&sys, window),
            Err(Error::HomologyWindow { .. })
        ));
    }
}
