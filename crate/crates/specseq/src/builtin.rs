//! Built-in example systems and coalgebras.
//!
//! The sphere tower has two generators, bottom and top, over the loop
//! algebra of the sphere, with the unique degree-(n-1) letter on the
//! connecting arrow; everything about it is forced, which is what makes it
//! a usable fixture. Product towers pair two systems over the tensor ring
//! with entries distributed by the Leibniz rule and no cross terms. The
//! product-coalgebra variant realizes the same four-generator tower over
//! cobar of the product coalgebra, where the matrix identity forces an
//! extra s(ab) entry on the long arrow because the two letters no longer
//! commute. Broken variants exist to be rejected, each by exactly one
//! check.

use std::sync::Arc;

use crate::dga::{
    cobar, tensor_algebras, AlgElement, DGAlgebra, DGCoalgebra, DgaMorphism,
};
use crate::error::Result;
use crate::system::{Generator, GeneratorSystem};

/// Degree cap used by the sphere and product builtins; matches the CLI's
/// default page window.
pub const BUILTIN_CAP: usize = 12;

/// Cap for builtins over the product-coalgebra ring, whose basis grows
/// quickly enough that the full default window is wasteful.
pub const VARIANT_CAP: usize = 8;

/// The product coalgebra of two 2-spheres: basis e, a, b, ab with the
/// reduced coproduct of ab splitting both ways.
pub fn s2xs2_coalgebra() -> DGCoalgebra {
    let mut coproduct = std::collections::BTreeMap::new();
    coproduct.insert(
        "ab".to_string(),
        vec![
            ("a".to_string(), "b".to_string()),
            ("b".to_string(), "a".to_string()),
        ],
    );
    DGCoalgebra::new(
        &[
            ("e".into(), 0),
            ("a".into(), 2),
            ("b".into(), 2),
            ("ab".into(), 4),
        ],
        &coproduct,
        &std::collections::BTreeMap::new(),
    )
    .expect("the product coalgebra is valid")
}

/// Coalgebras shipped with the library, by CLI-addressable name.
pub fn shipped_coalgebras() -> Vec<(String, DGCoalgebra)> {
    let mut out: Vec<(String, DGCoalgebra)> = (2..=5)
        .map(|n| (format!("sphere{n}"), DGCoalgebra::sphere(n)))
        .collect();
    out.push(("s2xs2".to_string(), s2xs2_coalgebra()));
    out
}

/// Two-generator tower over the loop algebra of S^n: bottom B at index 0
/// with action 0, top T at index n with action n, connecting entry the
/// unique degree-(n-1) letter.
pub fn sphere_height(n: usize) -> GeneratorSystem {
    assert!(n >= 2, "sphere towers need simple connectivity (n >= 2)");
    let ring = cobar(&DGCoalgebra::sphere(n), BUILTIN_CAP)
        .expect("sphere coalgebras are valid");
    let letter = ring
        .generator(&format!("sc{n}"))
        .expect("the sphere letter exists under the builtin cap");
    GeneratorSystem::new(
        vec![
            Generator::with_action("B", 0, 0.0),
            Generator::with_action("T", n as i64, n as f64),
        ],
        ring,
        vec![(("T".into(), "B".into()), letter)],
    )
    .expect("the sphere tower is structurally sound")
}

/// System with a single generator over a ring with no letters at all.
pub fn point_system() -> GeneratorSystem {
    let ring = DGAlgebra::free(vec![], BUILTIN_CAP).expect("empty ring is valid");
    GeneratorSystem::new(vec![Generator::with_action("pt", 0, 0.0)], ring, vec![])
        .expect("the point system is structurally sound")
}

/// Embeds an element of one tensor factor into the tensor ring by
/// prefixing its letters with the factor tag.
fn embed_factor(
    ring: &Arc<DGAlgebra>,
    elem: &AlgElement,
    factor: usize,
) -> Result<AlgElement> {
    let mut out = ring.zero(elem.degree());
    for word in elem.to_words() {
        let letters: Vec<String> = word
            .iter()
            .map(|l| format!("f{factor}_{l}"))
            .collect();
        out = out.add(&ring.parse_word(&letters)?)?;
    }
    Ok(out)
}

/// Product of two systems over the tensor ring: generators are pairs
/// named "x_u" with additive index (and additive action when both sides
/// carry labels), entries distributed by the Leibniz rule with no cross
/// terms.
pub fn product_system(a: &GeneratorSystem, b: &GeneratorSystem) -> Result<GeneratorSystem> {
    let ring = tensor_algebras(a.ring(), b.ring())?;
    let mut gens = Vec::new();
    for x in a.generators() {
        for u in b.generators() {
            let name = format!("{}_{}", x.name, u.name);
            let mu = x.mu + u.mu;
            gens.push(match (x.action, u.action) {
                (Some(s), Some(t)) => Generator::with_action(&name, mu, s + t),
                _ => Generator::new(&name, mu),
            });
        }
    }
    let mut entries = Vec::new();
    for ((x, y), e) in a.entries() {
        let lifted = embed_factor(&ring, e, 0)?;
        for u in b.generators() {
            entries.push((
                (
                    format!("{}_{}", a.generators()[x].name, u.name),
                    format!("{}_{}", a.generators()[y].name, u.name),
                ),
                lifted.clone(),
            ));
        }
    }
    for ((u, v), e) in b.entries() {
        let lifted = embed_factor(&ring, e, 1)?;
        for x in a.generators() {
            entries.push((
                (
                    format!("{}_{}", x.name, b.generators()[u].name),
                    format!("{}_{}", x.name, b.generators()[v].name),
                ),
                lifted.clone(),
            ));
        }
    }
    GeneratorSystem::new(gens, ring, entries)
}

/// The four-generator tower over cobar of the product coalgebra. The
/// short arrows carry the two letters sa and sb; the matrix identity
/// d(entry) = sum of composites forces s(ab) on the long arrow, since
/// d s(ab) = sa.sb + sb.sa.
pub fn s2xs2_cobar_variant() -> GeneratorSystem {
    let ring = cobar(&s2xs2_coalgebra(), VARIANT_CAP)
        .expect("the product coalgebra is valid");
    let sa = ring.generator("sa").expect("sa exists");
    let sb = ring.generator("sb").expect("sb exists");
    let sab = ring.generator("sab").expect("sab exists");
    GeneratorSystem::new(
        vec![
            Generator::with_action("B_B", 0, 0.0),
            Generator::with_action("B_T", 2, 2.0),
            Generator::with_action("T_B", 2, 2.1),
            Generator::with_action("T_T", 4, 4.0),
        ],
        ring,
        vec![
            (("T_B".into(), "B_B".into()), sa.clone()),
            (("T_T".into(), "B_T".into()), sa),
            (("B_T".into(), "B_B".into()), sb.clone()),
            (("T_T".into(), "T_B".into()), sb),
            (("T_T".into(), "B_B".into()), sab),
        ],
    )
    .expect("the variant tower is structurally sound")
}

/// Ring collapse cobar(S2 x S2) -> cobar(S4) killing the two short
/// letters and sending s(ab) to the sphere letter; returns the morphism
/// and the pushed system.
pub fn collapse_to_s4(sys: &GeneratorSystem) -> Result<(DgaMorphism, GeneratorSystem)> {
    let cap = sys.ring().degree_cap();
    let target = cobar(&DGCoalgebra::sphere(4), cap)?;
    let phi = DgaMorphism::new(
        sys.ring(),
        &target,
        vec![
            ("sa".to_string(), target.zero(1)),
            ("sb".to_string(), target.zero(1)),
            ("sab".to_string(), target.generator("sc4")?),
        ],
    )?;
    let pushed = sys.change_coefficients(&phi)?;
    Ok((phi, pushed))
}

/// Systems shipped with the library, by CLI-addressable name.
pub fn shipped_systems() -> Vec<(String, GeneratorSystem)> {
    let mut out: Vec<(String, GeneratorSystem)> = (2..=5)
        .map(|n| (format!("sphere{n}"), sphere_height(n)))
        .collect();
    let s2 = sphere_height(2);
    out.push((
        "s2xs2_product".to_string(),
        product_system(&s2, &s2).expect("same-kind rings tensor"),
    ));
    out.push(("s2xs2_cobar".to_string(), s2xs2_cobar_variant()));
    out.push(("point".to_string(), point_system()));
    out
}

/// How a deliberately broken variant is expected to fail.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BrokenKind {
    /// Rejected by the structural (index/degree) check.
    Structural,
    /// Rejected by the action-ordering diagnostic.
    ActionOrder,
    /// Passes both, but the matrix identity fails with a residual.
    MaurerCartan,
}

/// Deliberately broken systems paired with the check that must reject
/// them; earlier checks must pass.
pub fn broken_variants() -> Vec<(GeneratorSystem, BrokenKind)> {
    let mut out = Vec::new();

    // Entry of the wrong degree: the unit on an index-2 arrow.
    let ring = cobar(&DGCoalgebra::sphere(2), 8).expect("valid");
    let unit = ring.unit();
    out.push((
        GeneratorSystem::new(
            vec![Generator::new("B", 0), Generator::new("T", 2)],
            ring.clone(),
            vec![(("T".into(), "B".into()), unit.clone())],
        )
        .expect("bookkeeping passes"),
        BrokenKind::Structural,
    ));

    // Entry pointing up the index order.
    out.push((
        GeneratorSystem::new(
            vec![Generator::new("B", 0), Generator::new("T", 2)],
            ring.clone(),
            vec![(("B".into(), "T".into()), unit)],
        )
        .expect("bookkeeping passes"),
        BrokenKind::Structural,
    ));

    // Correct degrees but action labels out of order.
    let letter = ring.generator("sc2").expect("sc2 exists");
    out.push((
        GeneratorSystem::new(
            vec![
                Generator::with_action("B", 0, 3.0),
                Generator::with_action("T", 2, 3.0),
            ],
            ring,
            vec![(("T".into(), "B".into()), letter)],
        )
        .expect("bookkeeping passes"),
        BrokenKind::ActionOrder,
    ));

    // Structurally clean tower whose long entry is missing: the matrix
    // identity fails with residual sa.sb + sb.sa.
    let variant = s2xs2_cobar_variant();
    let broken_mc = variant
        .with_entry("T_T", "B_B", None)
        .expect("entry removal is bookkeeping");
    out.push((broken_mc, BrokenKind::MaurerCartan));

    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::assemble;
    use crate::error::Error;
    use crate::pages::{compare_up_to_translation, compute_pages};

    #[test]
    fn sphere_towers_validate() {
        for n in 2..=5 {
            let sys = sphere_height(n);
            let report = sys.validate_mc().expect("structure ok");
            assert!(report.passed(), "n={n}");
        }
    }

    #[test]
    #[should_panic(expected = "simple connectivity")]
    fn sphere_height_rejects_low_dimension() {
        let _ = sphere_height(1);
    }

    #[test]
    fn product_of_spheres_validates() {
        let s2 = sphere_height(2);
        let prod = product_system(&s2, &s2).unwrap();
        assert_eq!(prod.generators().len(), 4);
        let mus: Vec<i64> = prod.generators().iter().map(|g| g.mu).collect();
        assert_eq!(mus, vec![0, 2, 2, 4]);
        assert!(prod.validate_mc().unwrap().passed());
    }

    #[test]
    fn product_with_point_is_identity_on_pages() {
        let s2 = sphere_height(2);
        let prod = product_system(&s2, &point_system()).unwrap();
        assert!(prod.validate_mc().unwrap().passed());
        let a = compute_pages(&assemble(&prod, 8).unwrap(), 3).unwrap();
        let b = compute_pages(&assemble(&s2, 8).unwrap(), 3).unwrap();
        assert_eq!(compare_up_to_translation(&a, &b, 1), Some(0));
    }

    #[test]
    fn cobar_variant_validates_and_needs_its_long_entry() {
        let sys = s2xs2_cobar_variant();
        assert!(sys.validate_mc().unwrap().passed());
        let broken = sys.with_entry("T_T", "B_B", None).unwrap();
        let report = broken.validate_mc().unwrap();
        assert!(!report.passed());
        assert_eq!(report.failures.len(), 1);
        let f = &report.failures[0];
        assert_eq!((f.x.as_str(), f.z.as_str()), ("T_T", "B_B"));
        let words = f.residual().to_words();
        assert_eq!(
            words,
            vec![
                vec!["sa".to_string(), "sb".to_string()],
                vec!["sb".to_string(), "sa".to_string()]
            ]
        );
    }

    #[test]
    fn variant_pages_match_product_pages() {
        let s2 = sphere_height(2);
        let tensor = product_system(&s2, &s2).unwrap();
        let variant = s2xs2_cobar_variant();
        let a = compute_pages(&assemble(&variant, 7).unwrap(), 5).unwrap();
        let b = compute_pages(&assemble(&tensor, 7).unwrap(), 5).unwrap();
        assert_eq!(compare_up_to_translation(&a, &b, 2), Some(0));
    }

    #[test]
    fn collapse_pushes_to_a_valid_single_entry_system() {
        let variant = s2xs2_cobar_variant();
        let (_phi, pushed) = collapse_to_s4(&variant).unwrap();
        assert!(pushed.validate_mc().unwrap().passed());
        let entries: Vec<((String, String), AlgElement)> = pushed.entries_named();
        assert_eq!(entries.len(), 1);
        let ((x, y), e) = &entries[0];
        assert_eq!((x.as_str(), y.as_str()), ("T_T", "B_B"));
        assert_eq!(e.degree(), 3);
        assert_eq!(e.to_words(), vec![vec!["sc4".to_string()]]);
    }

    #[test]
    fn collapsed_pages_show_one_long_differential() {
        let variant = s2xs2_cobar_variant();
        let (_, pushed) = collapse_to_s4(&variant).unwrap();
        let ps = compute_pages(&assemble(&pushed, 8).unwrap(), 5).unwrap();
        // Certified differentials vanish except d^4 out of column 4.
        for page in &ps.pages {
            for (&(p, q), cell) in &page.cells {
                if !cell.certified {
                    continue;
                }
                if page.r == 4 && p == 4 && cell.dim > 0 {
                    assert_eq!(cell.d_rank, 1, "r=4 p=4 q={q}");
                } else {
                    assert_eq!(cell.d_rank, 0, "r={} p={p} q={q}", page.r);
                }
            }
        }
    }

    #[test]
    fn broken_variants_fail_exactly_their_check() {
        for (sys, kind) in broken_variants() {
            match kind {
                BrokenKind::Structural => {
                    assert!(matches!(sys.validate_mc(), Err(Error::Structural(_))));
                }
                BrokenKind::ActionOrder => {
                    assert!(sys.structural_check().is_ok(), "structure must pass first");
                    assert!(matches!(
                        sys.validate_mc(),
                        Err(Error::ActionOrder { .. })
                    ));
                }
                BrokenKind::MaurerCartan => {
                    assert!(sys.structural_check().is_ok());
                    assert!(sys.action_check().is_ok());
                    assert!(!sys.validate_mc().unwrap().passed());
                }
            }
        }
    }

    #[test]
    fn shipped_lists_are_consistent() {
        assert_eq!(shipped_coalgebras().len(), 5);
        let systems = shipped_systems();
        assert_eq!(systems.len(), 7);
        for (name, sys) in &systems {
            assert!(
                sys.validate_mc().unwrap().passed(),
                "shipped system {name} must validate"
            );
        }
    }
}
