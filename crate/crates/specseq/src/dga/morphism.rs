//! Degree-0 multiplicative chain maps between algebras.
//!
//! A morphism is given by one image per source generator and applied to a
//! basis element by mapping its generator letters and multiplying in the
//! target. Construction checks that images preserve degree and commute with
//! the differentials on every generator. When the source has relations
//! (tensor or table representation) the letterwise extension is only well
//! defined if the images satisfy them, so those are checked too:
//! cross-factor commutation for tensor sources, the full product table for
//! table sources.

use std::collections::HashMap;
use std::sync::Arc;

use crate::error::{Error, Result};

use super::algebra::{AlgElement, AlgKind, DGAlgebra, ElemId};

#[derive(Clone)]
pub struct DgaMorphism {
    source: Arc<DGAlgebra>,
    target: Arc<DGAlgebra>,
    images: HashMap<String, AlgElement>,
}

impl DgaMorphism {
    /// Morphism sending each source generator to the given target element.
    /// Zero images are allowed (the generator is killed); otherwise the
    /// image must be homogeneous of the generator's degree.
    pub fn new(
        source: &Arc<DGAlgebra>,
        target: &Arc<DGAlgebra>,
        images: Vec<(String, AlgElement)>,
    ) -> Result<DgaMorphism> {
        let mut map = HashMap::new();
        for (name, img) in images {
            if !Arc::ptr_eq(img.parent(), target) {
                return Err(Error::ParentMismatch);
            }
            if map.insert(name.clone(), img).is_some() {
                return Err(Error::Morphism(format!("duplicate image for `{name}`")));
            }
        }
        for name in map.keys() {
            if !source.generators().iter().any(|g| &g.name == name) {
                return Err(Error::Morphism(format!(
                    "image given for `{name}`, which is not a source generator"
                )));
            }
        }
        for g in source.generators() {
            // Generators above the source cap never occur in any
            // materialized word, so they need no image.
            if g.elem.is_none() {
                continue;
            }
            let img = map.get(&g.name).ok_or_else(|| {
                Error::Morphism(format!("no image for generator `{}`", g.name))
            })?;
            if !img.is_zero() && img.degree() != g.degree {
                return Err(Error::Morphism(format!(
                    "image of `{}` has degree {}, expected {}",
                    g.name,
                    img.degree(),
                    g.degree
                )));
            }
        }

        let f = DgaMorphism {
            source: source.clone(),
            target: target.clone(),
            images: map,
        };
        f.check_chain_map()?;
        f.check_well_defined()?;
        Ok(f)
    }

    pub fn identity(alg: &Arc<DGAlgebra>) -> DgaMorphism {
        let images = alg
            .generators()
            .iter()
            .filter_map(|g| g.elem.map(|id| (g.name.clone(), alg.basis_elem(id))))
            .collect();
        DgaMorphism::new(alg, alg, images).expect("identity is a morphism")
    }

    pub fn source(&self) -> &Arc<DGAlgebra> {
        &self.source
    }

    pub fn target(&self) -> &Arc<DGAlgebra> {
        &self.target
    }

    pub fn image_of(&self, name: &str) -> Option<&AlgElement> {
        self.images.get(name)
    }

    /// Applies the morphism to an element of the source.
    pub fn apply(&self, x: &AlgElement) -> Result<AlgElement> {
        if !Arc::ptr_eq(x.parent(), &self.source) {
            return Err(Error::ParentMismatch);
        }
        let mut acc = self.target.zero(x.degree());
        for id in x.term_ids() {
            acc = acc.add(&self.apply_basis(id)?)?;
        }
        Ok(acc)
    }

    fn apply_basis(&self, id: ElemId) -> Result<AlgElement> {
        let mut acc = self.target.unit();
        for letter in self.source.letters_of(id) {
            let img = self.images.get(&letter).ok_or_else(|| {
                Error::Morphism(format!("no image for generator `{letter}`"))
            })?;
            acc = acc.multiply(img)?;
        }
        // A killed letter leaves a zero of the wrong nominal degree.
        if acc.is_zero() {
            return Ok(self.target.zero(self.source.degree_of(id)));
        }
        Ok(acc)
    }

    /// f(dg) = d(f(g)) on every generator.
    fn check_chain_map(&self) -> Result<()> {
        for g in self.source.generators() {
            let Some(id) = g.elem else { continue };
            let dg = self
                .source
                .elem_from_ids(g.degree - 1, self.source.boundary_ids(id));
            let lhs = self.apply(&dg)?;
            let rhs = self.images[&g.name].boundary();
            if lhs != rhs {
                return Err(Error::Morphism(format!(
                    "images do not commute with the differential on `{}`: f(d{}) = {}, d(f {}) = {}",
                    g.name, g.name, lhs, g.name, rhs
                )));
            }
        }
        Ok(())
    }

    /// Relation checks for non-free sources.
    fn check_well_defined(&self) -> Result<()> {
        match self.source.kind() {
            AlgKind::Free => {
                // Free sources may still be tensor products of free
                // algebras, which carry cross-factor commutation relations.
                self.check_cross_commutation()
            }
            AlgKind::Table => self.check_table_products(),
        }
    }

    fn check_cross_commutation(&self) -> Result<()> {
        let gens = self.source.generators();
        for (i, gi) in gens.iter().enumerate() {
            let Some(ei) = gi.elem else { continue };
            for gj in gens.iter().skip(i + 1) {
                let Some(ej) = gj.elem else { continue };
                if gi.degree + gj.degree > self.source.degree_cap()
                    || gi.degree + gj.degree > self.target.degree_cap()
                {
                    continue;
                }
                let a = self.source.basis_elem(ei);
                let b = self.source.basis_elem(ej);
                // Only a relation when the letters commute in the source.
                if a.multiply(&b)? != b.multiply(&a)? {
                    continue;
                }
                let fa = &self.images[&gi.name];
                let fb = &self.images[&gj.name];
                if fa.multiply(fb)? != fb.multiply(fa)? {
                    return Err(Error::Morphism(format!(
                        "`{}` and `{}` commute in the source but their images do not",
                        gi.name, gj.name
                    )));
                }
            }
        }
        Ok(())
    }

    fn check_table_products(&self) -> Result<()> {
        let gens = self.source.generators();
        for gi in gens {
            let Some(ei) = gi.elem else { continue };
            for gj in gens {
                let Some(ej) = gj.elem else { continue };
                if gi.degree + gj.degree > self.source.degree_cap()
                    || gi.degree + gj.degree > self.target.degree_cap()
                {
                    continue;
                }
                let prod = self
                    .source
                    .basis_elem(ei)
                    .multiply(&self.source.basis_elem(ej))?;
                let lhs = self.apply(&prod)?;
                let rhs = self.images[&gi.name].multiply(&self.images[&gj.name])?;
                if lhs != rhs {
                    return Err(Error::Morphism(format!(
                        "images violate the product relation on ({}, {})",
                        gi.name, gj.name
                    )));
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dga::cobar::cobar;
    use crate::dga::coalgebra::DGCoalgebra;
    use std::collections::BTreeMap;

    fn product_coalgebra() -> DGCoalgebra {
        let mut coproduct = BTreeMap::new();
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
            &BTreeMap::new(),
        )
        .unwrap()
    }

    #[test]
    fn identity_applies_as_identity() {
        let alg = cobar(&product_coalgebra(), 5).unwrap();
        let f = DgaMorphism::identity(&alg);
        let sa = alg.generator("sa").unwrap();
        let sab = alg.generator("sab").unwrap();
        let x = sa.multiply(&sab).unwrap();
        assert_eq!(f.apply(&x).unwrap(), x);
    }

    #[test]
    fn collapse_onto_sphere_four() {
        // sa, sb -> 0 and sab -> the degree-3 letter is a chain map: both
        // sides of the differential condition on sab vanish.
        let src = cobar(&product_coalgebra(), 5).unwrap();
        let tgt = cobar(&DGCoalgebra::sphere(4), 5).unwrap();
        let f = DgaMorphism::new(
            &src,
            &tgt,
            vec![
                ("sa".into(), tgt.zero(1)),
                ("sb".into(), tgt.zero(1)),
                ("sab".into(), tgt.generator("sc4").unwrap()),
            ],
        )
        .unwrap();
        let sab = src.generator("sab").unwrap();
        assert_eq!(f.apply(&sab).unwrap(), tgt.generator("sc4").unwrap());
        let sa = src.generator("sa").unwrap();
        assert!(f.apply(&sa).unwrap().is_zero());
        let mixed = sab.multiply(&sa).unwrap();
        assert!(f.apply(&mixed).unwrap().is_zero());
    }

    #[test]
    fn non_chain_map_is_rejected() {
        // Sending sab to zero while keeping sa, sb alive breaks
        // f(d(sab)) = d(f(sab)): the left side is sa.sb + sb.sa.
        let src = cobar(&product_coalgebra(), 5).unwrap();
        let f = DgaMorphism::new(
            &src,
            &src,
            vec![
                ("sa".into(), src.generator("sa").unwrap()),
                ("sb".into(), src.generator("sb").unwrap()),
                ("sab".into(), src.zero(3)),
            ],
        );
        assert!(matches!(f, Err(Error::Morphism(_))));
    }

    #[test]
    fn degree_shift_is_rejected() {
        let src = cobar(&DGCoalgebra::sphere(2), 6).unwrap();
        let sx = src.generator("sc2").unwrap();
        let wrong = sx.multiply(&sx).unwrap();
        let f = DgaMorphism::new(&src, &src, vec![("sc2".into(), wrong)]);
        assert!(matches!(f, Err(Error::Morphism(_))));
    }

    #[test]
    fn missing_image_is_rejected() {
        let src = cobar(&product_coalgebra(), 5).unwrap();
        let f = DgaMorphism::new(
            &src,
            &src,
            vec![("sa".into(), src.generator("sa").unwrap())],
        );
        assert!(matches!(f, Err(Error::Morphism(_))));
    }

    #[test]
    fn morphism_to_trivial_ring_kills_positive_degrees() {
        let src = cobar(&DGCoalgebra::sphere(2), 6).unwrap();
        let triv = crate::dga::algebra::DGAlgebra::free(vec![], 6).unwrap();
        let f = DgaMorphism::new(&src, &triv, vec![("sc2".into(), triv.zero(1))]).unwrap();
        let sx = src.generator("sc2").unwrap();
        assert!(f.apply(&sx).unwrap().is_zero());
        assert_eq!(f.apply(&src.unit()).unwrap(), triv.unit());
    }

    #[test]
    fn tensor_source_requires_commuting_images() {
        // In A (x) A the two letters commute; mapping them to the two
        // noncommuting words sa, sb of a free algebra is not well defined.
        let a = cobar(&DGCoalgebra::sphere(2), 6).unwrap();
        let t = crate::dga::algebra::tensor_algebras(&a, &a).unwrap();
        let tgt = cobar(&product_coalgebra(), 6).unwrap();
        let bad = DgaMorphism::new(
            &t,
            &tgt,
            vec![
                ("f0_sc2".into(), tgt.generator("sa").unwrap()),
                ("f1_sc2".into(), tgt.generator("sb").unwrap()),
            ],
        );
        assert!(matches!(bad, Err(Error::Morphism(_))));
        // Mapping both to the same letter is fine.
        let ok = DgaMorphism::new(
            &t,
            &tgt,
            vec![
                ("f0_sc2".into(), tgt.generator("sa").unwrap()),
                ("f1_sc2".into(), tgt.generator("sa").unwrap()),
            ],
        );
        assert!(ok.is_ok());
    }
}
