//! Generator systems: a finite set of graded generators together with a
//! coefficient matrix over a differential algebra.
//!
//! A system consists of generators x with integer index mu(x) and entries
//! a_xy of ring degree mu(x) - mu(y) - 1 attached to strictly descending
//! index pairs. The induced differential on ring (x) span(generators),
//!
//! d(w (x) x) = (dw) (x) x + sum_y (w . a_xy) (x) y,
//!
//! squares to zero exactly when the matrix identity dA = A . A holds
//! entrywise; `validate_mc` checks that identity and reports every failing
//! pair with both sides. Structural problems (wrong entry degree, index
//! ascent) and action-ordering violations are errors, not report rows: they
//! mean the input is malformed rather than mathematically invalid.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::dga::{AlgElement, DGAlgebra, DgaMorphism};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct Generator {
    pub name: String,
    pub mu: i64,
    /// Optional ordering label; when both endpoints of a nonzero entry
    /// carry one, the source's must be strictly larger.
    pub action: Option<f64>,
}

impl Generator {
    pub fn new(name: &str, mu: i64) -> Self {
        Generator {
            name: name.into(),
            mu,
            action: None,
        }
    }

    pub fn with_action(name: &str, mu: i64, action: f64) -> Self {
        Generator {
            name: name.into(),
            mu,
            action: Some(action),
        }
    }
}

/// One failing pair of the matrix identity, with both sides kept so the
/// residual can be printed.
#[derive(Clone, Debug)]
pub struct McFailure {
    pub x: String,
    pub z: String,
    /// d(a_xz)
    pub boundary_side: AlgElement,
    /// sum_y a_xy . a_yz
    pub composite_side: AlgElement,
}

impl McFailure {
    /// boundary side + composite side; nonzero by construction.
    pub fn residual(&self) -> AlgElement {
        self.boundary_side
            .add(&self.composite_side)
            .expect("both sides live in the same ring degree")
    }
}

#[derive(Clone, Debug, Default)]
pub struct McReport {
    pub failures: Vec<McFailure>,
}

impl McReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

#[derive(Clone)]
pub struct GeneratorSystem {
    generators: Vec<Generator>,
    ring: Arc<DGAlgebra>,
    /// (source index, target index) -> nonzero entry.
    entries: BTreeMap<(usize, usize), AlgElement>,
}

impl GeneratorSystem {
    /// Builds a system; zero entries are dropped. Only bookkeeping is
    /// checked here (name uniqueness, known names, ring ownership);
    /// mathematical validity is the job of `validate_mc`, so deliberately
    /// broken systems can be constructed and diagnosed.
    pub fn new(
        generators: Vec<Generator>,
        ring: Arc<DGAlgebra>,
        entries: Vec<((String, String), AlgElement)>,
    ) -> Result<GeneratorSystem> {
        if generators.is_empty() {
            return Err(Error::Structural(
                "a system needs at least one generator".into(),
            ));
        }
        let mut index = BTreeMap::new();
        for (i, g) in generators.iter().enumerate() {
            if !crate::dga::valid_gen_name(&g.name) {
                return Err(Error::Structural(format!(
                    "generator name `{}` is not of the form [A-Za-z0-9_]+",
                    g.name
                )));
            }
            if index.insert(g.name.clone(), i).is_some() {
                return Err(Error::Structural(format!(
                    "duplicate generator name `{}`",
                    g.name
                )));
            }
        }
        let mut map = BTreeMap::new();
        for ((x, y), e) in entries {
            let &ix = index
                .get(&x)
                .ok_or_else(|| Error::UnknownName(x.clone()))?;
            let &iy = index
                .get(&y)
                .ok_or_else(|| Error::UnknownName(y.clone()))?;
            if !Arc::ptr_eq(e.parent(), &ring) {
                return Err(Error::ParentMismatch);
            }
            if e.is_zero() {
                continue;
            }
            if map.insert((ix, iy), e).is_some() {
                return Err(Error::Structural(format!(
                    "duplicate entry for ({x}, {y})"
                )));
            }
        }
        Ok(GeneratorSystem {
            generators,
            ring,
            entries: map,
        })
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    pub fn ring(&self) -> &Arc<DGAlgebra> {
        &self.ring
    }

    pub fn index_of(&self, name: &str) -> Result<usize> {
        self.generators
            .iter()
            .position(|g| g.name == name)
            .ok_or_else(|| Error::UnknownName(name.to_string()))
    }

    pub fn entry(&self, x: usize, y: usize) -> Option<&AlgElement> {
        self.entries.get(&(x, y))
    }

    pub fn entries(&self) -> impl Iterator<Item = ((usize, usize), &AlgElement)> {
        self.entries.iter().map(|(&k, v)| (k, v))
    }

    pub fn mu_min(&self) -> i64 {
        self.generators.iter().map(|g| g.mu).min().unwrap()
    }

    pub fn mu_max(&self) -> i64 {
        self.generators.iter().map(|g| g.mu).max().unwrap()
    }

    /// Difference between the largest and smallest index.
    pub fn width(&self) -> i64 {
        self.mu_max() - self.mu_min()
    }

    /// Entry degrees and strict index descent.
    pub fn structural_check(&self) -> Result<()> {
        for (&(ix, iy), e) in &self.entries {
            let (gx, gy) = (&self.generators[ix], &self.generators[iy]);
            if gx.mu <= gy.mu {
                return Err(Error::Structural(format!(
                    "entry from `{}` (mu {}) to `{}` (mu {}) violates strict index descent",
                    gx.name, gx.mu, gy.name, gy.mu
                )));
            }
            let want = gx.mu - gy.mu - 1;
            if e.degree() as i64 != want {
                return Err(Error::Structural(format!(
                    "entry ({}, {}) has ring degree {}, expected {}",
                    gx.name,
                    gy.name,
                    e.degree(),
                    want
                )));
            }
        }
        Ok(())
    }

    /// Ordering diagnostic: every nonzero entry must descend strictly in
    /// action when both endpoints are labeled.
    pub fn action_check(&self) -> Result<()> {
        for (&(ix, iy), _) in &self.entries {
            let (gx, gy) = (&self.generators[ix], &self.generators[iy]);
            if let (Some(ax), Some(ay)) = (gx.action, gy.action) {
                if ax <= ay {
                    return Err(Error::ActionOrder {
                        x: gx.name.clone(),
                        y: gy.name.clone(),
                        ax,
                        ay,
                    });
                }
            }
        }
        Ok(())
    }

    /// Checks the matrix identity dA = A . A. Structural and ordering
    /// problems error out first; the returned report lists every pair (x, z)
    /// where the identity fails, with both sides.
    pub fn validate_mc(&self) -> Result<McReport> {
        self.structural_check()?;
        self.action_check()?;
        let mut failures = Vec::new();
        let n = self.generators.len();
        for ix in 0..n {
            for iz in 0..n {
                let (gx, gz) = (&self.generators[ix], &self.generators[iz]);
                if gx.mu <= gz.mu {
                    continue;
                }
                let residual_degree = (gx.mu - gz.mu - 2).max(0) as usize;
                let boundary_side = match self.entries.get(&(ix, iz)) {
                    Some(e) => e.boundary(),
                    None => self.ring.zero(residual_degree),
                };
                let mut composite_side = self.ring.zero(residual_degree);
                for iy in 0..n {
                    let gy = &self.generators[iy];
                    if gy.mu >= gx.mu || gy.mu <= gz.mu {
                        continue;
                    }
                    if let (Some(a), Some(b)) =
                        (self.entries.get(&(ix, iy)), self.entries.get(&(iy, iz)))
                    {
                        composite_side = composite_side.add(&a.multiply(b)?)?;
                    }
                }
                if boundary_side.add(&composite_side)?.is_zero() {
                    continue;
                }
                failures.push(McFailure {
                    x: gx.name.clone(),
                    z: gz.name.clone(),
                    boundary_side,
                    composite_side,
                });
            }
        }
        Ok(McReport { failures })
    }

    /// Shifts every index by `k`; entries are untouched, so validity is
    /// preserved verbatim.
    pub fn translate(&self, k: i64) -> GeneratorSystem {
        let mut out = self.clone();
        for g in &mut out.generators {
            g.mu += k;
        }
        out
    }

    /// Pushes every entry through a ring morphism and re-validates the
    /// matrix identity over the new ring.
    pub fn change_coefficients(&self, f: &DgaMorphism) -> Result<GeneratorSystem> {
        if !Arc::ptr_eq(f.source(), &self.ring) {
            return Err(Error::ParentMismatch);
        }
        let mut entries = BTreeMap::new();
        for (&k, e) in &self.entries {
            let img = f.apply(e)?;
            if !img.is_zero() {
                entries.insert(k, img);
            }
        }
        let out = GeneratorSystem {
            generators: self.generators.clone(),
            ring: f.target().clone(),
            entries,
        };
        let report = out.validate_mc()?;
        if !report.passed() {
            return Err(Error::MaurerCartan(format!(
                "change of coefficients broke the matrix identity on {} pair(s), first ({}, {})",
                report.failures.len(),
                report.failures[0].x,
                report.failures[0].z
            )));
        }
        Ok(out)
    }

    /// Copy with the (x, y) entry replaced (`None` removes it). No
    /// validation; meant for constructing corrupted variants in tests and
    /// diagnostics.
    pub fn with_entry(
        &self,
        x: &str,
        y: &str,
        entry: Option<AlgElement>,
    ) -> Result<GeneratorSystem> {
        let (ix, iy) = (self.index_of(x)?, self.index_of(y)?);
        let mut out = self.clone();
        match entry {
            Some(e) if !e.is_zero() => {
                if !Arc::ptr_eq(e.parent(), &self.ring) {
                    return Err(Error::ParentMismatch);
                }
                out.entries.insert((ix, iy), e);
            }
            _ => {
                out.entries.remove(&(ix, iy));
            }
        }
        Ok(out)
    }

    /// Entries keyed by generator names, for serialization.
    pub fn entries_named(&self) -> Vec<((String, String), AlgElement)> {
        self.entries
            .iter()
            .map(|(&(ix, iy), e)| {
                (
                    (
                        self.generators[ix].name.clone(),
                        self.generators[iy].name.clone(),
                    ),
                    e.clone(),
                )
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dga::{cobar, DGCoalgebra};
    use std::collections::BTreeMap as Map;

    fn sphere_ring(n: usize, cap: usize) -> Arc<DGAlgebra> {
        cobar(&DGCoalgebra::sphere(n), cap).unwrap()
    }

    fn product_ring(cap: usize) -> Arc<DGAlgebra> {
        let mut coproduct = Map::new();
        coproduct.insert(
            "ab".to_string(),
            vec![
                ("a".to_string(), "b".to_string()),
                ("b".to_string(), "a".to_string()),
            ],
        );
        let c = DGCoalgebra::new(
            &[
                ("e".into(), 0),
                ("a".into(), 2),
                ("b".into(), 2),
                ("ab".into(), 4),
            ],
            &coproduct,
            &Map::new(),
        )
        .unwrap();
        cobar(&c, cap).unwrap()
    }

    fn sphere_system(n: usize) -> GeneratorSystem {
        let ring = sphere_ring(n, 8);
        let gen = ring.generators()[0].name.clone();
        let word = ring.generator(&gen).unwrap();
        GeneratorSystem::new(
            vec![Generator::new("B", 0), Generator::new("T", n as i64)],
            ring,
            vec![(("T".into(), "B".into()), word)],
        )
        .unwrap()
    }

    /// Four generators over the product ring; the (top, bot) entry is the
    /// degree-3 letter whose boundary cancels the two composite paths.
    fn product_tower(include_long_entry: bool) -> GeneratorSystem {
        let ring = product_ring(8);
        let sa = ring.generator("sa").unwrap();
        let sb = ring.generator("sb").unwrap();
        let sab = ring.generator("sab").unwrap();
        let mut entries = vec![
            (("top".to_string(), "mid_a".to_string()), sa.clone()),
            (("mid_a".to_string(), "bot".to_string()), sb.clone()),
            (("top".to_string(), "mid_b".to_string()), sb),
            (("mid_b".to_string(), "bot".to_string()), sa),
        ];
        if include_long_entry {
            entries.push((("top".to_string(), "bot".to_string()), sab));
        }
        GeneratorSystem::new(
            vec![
                Generator::new("bot", 0),
                Generator::new("mid_a", 2),
                Generator::new("mid_b", 2),
                Generator::new("top", 4),
            ],
            ring,
            entries,
        )
        .unwrap()
    }

    #[test]
    fn sphere_system_is_valid() {
        let report = sphere_system(2).validate_mc().unwrap();
        assert!(report.passed());
    }

    #[test]
    fn missing_long_entry_fails_with_the_commutator_residual() {
        let sys = product_tower(false);
        let report = sys.validate_mc().unwrap();
        assert_eq!(report.failures.len(), 1);
        let f = &report.failures[0];
        assert_eq!((f.x.as_str(), f.z.as_str()), ("top", "bot"));
        assert!(f.boundary_side.is_zero());
        let ring = sys.ring();
        let sa = ring.generator("sa").unwrap();
        let sb = ring.generator("sb").unwrap();
        let commutator = sa
            .multiply(&sb)
            .unwrap()
            .add(&sb.multiply(&sa).unwrap())
            .unwrap();
        assert_eq!(f.residual(), commutator);
    }

    #[test]
    fn long_entry_restores_validity() {
        let report = product_tower(true).validate_mc().unwrap();
        assert!(report.passed(), "{:?}", report.failures);
    }

    #[test]
    fn wrong_degree_entry_is_structural_not_mc() {
        let ring = sphere_ring(2, 8);
        let sx = ring.generator("sc2").unwrap();
        let sq = sx.multiply(&sx).unwrap();
        let sys = GeneratorSystem::new(
            vec![Generator::new("B", 0), Generator::new("T", 2)],
            ring,
            vec![(("T".into(), "B".into()), sq)],
        )
        .unwrap();
        assert!(matches!(sys.validate_mc(), Err(Error::Structural(_))));
    }

    #[test]
    fn index_ascent_is_structural() {
        let ring = sphere_ring(2, 8);
        let sx = ring.generator("sc2").unwrap();
        let sys = GeneratorSystem::new(
            vec![Generator::new("B", 2), Generator::new("T", 0)],
            ring,
            vec![(("T".into(), "B".into()), sx)],
        )
        .unwrap();
        assert!(matches!(sys.validate_mc(), Err(Error::Structural(_))));
    }

    #[test]
    fn action_order_violation_is_flagged() {
        let ring = sphere_ring(2, 8);
        let gen = ring.generators()[0].name.clone();
        let word = ring.generator(&gen).unwrap();
        let sys = GeneratorSystem::new(
            vec![
                Generator::with_action("B", 0, 5.0),
                Generator::with_action("T", 2, 0.0),
            ],
            ring,
            vec![(("T".into(), "B".into()), word)],
        )
        .unwrap();
        assert!(matches!(sys.validate_mc(), Err(Error::ActionOrder { .. })));
    }

    #[test]
    fn translate_shifts_indices_and_preserves_validity() {
        let sys = sphere_system(3);
        let t = sys.translate(7);
        assert_eq!(t.generators()[0].mu, 7);
        assert_eq!(t.generators()[1].mu, 10);
        assert!(t.validate_mc().unwrap().passed());
        let back = t.translate(-7);
        assert_eq!(back.generators(), sys.generators());
        assert_eq!(back.entries_named().len(), sys.entries_named().len());
    }

    #[test]
    fn change_coefficients_along_identity_is_identity() {
        let sys = product_tower(true);
        let f = DgaMorphism::identity(sys.ring());
        let out = sys.change_coefficients(&f).unwrap();
        assert_eq!(out.entries_named().len(), sys.entries_named().len());
        for (((x, y), e), ((x2, y2), e2)) in
            sys.entries_named().iter().zip(out.entries_named().iter())
        {
            assert_eq!((x, y), (x2, y2));
            assert_eq!(e, e2);
        }
    }

    #[test]
    fn collapse_kills_short_entries_and_stays_valid() {
        // Sending the two degree-1 letters to zero and the degree-3 letter
        // to the sphere letter leaves a single length-4 arrow.
        let sys = product_tower(true);
        let tgt = sphere_ring(4, 8);
        let f = DgaMorphism::new(
            sys.ring(),
            &tgt,
            vec![
                ("sa".into(), tgt.zero(1)),
                ("sb".into(), tgt.zero(1)),
                ("sab".into(), tgt.generator("sc4").unwrap()),
            ],
        )
        .unwrap();
        let out = sys.change_coefficients(&f).unwrap();
        let named = out.entries_named();
        assert_eq!(named.len(), 1);
        assert_eq!(named[0].0, ("top".to_string(), "bot".to_string()));
        assert_eq!(named[0].1.degree(), 3);
        assert!(out.validate_mc().unwrap().passed());
    }

    #[test]
    fn morphism_to_trivial_ring_empties_the_matrix() {
        let sys = sphere_system(2);
        let triv = DGAlgebra::free(vec![], 8).unwrap();
        let f = DgaMorphism::new(sys.ring(), &triv, vec![("sc2".into(), triv.zero(1))]).unwrap();
        let out = sys.change_coefficients(&f).unwrap();
        assert_eq!(out.entries_named().len(), 0);
        assert!(out.validate_mc().unwrap().passed());
    }

    #[test]
    fn with_entry_toggles_validity() {
        let valid = product_tower(true);
        let broken = valid.with_entry("top", "bot", None).unwrap();
        assert!(!broken.validate_mc().unwrap().passed());
        let ring = valid.ring().clone();
        let repaired = broken
            .with_entry("top", "bot", Some(ring.generator("sab").unwrap()))
            .unwrap();
        assert!(repaired.validate_mc().unwrap().passed());
    }
}
