//! Finite differential graded coalgebras over GF(2).
//!
//! The stored coproduct is the *reduced* one: the primitive terms
//! `c (x) 1 + 1 (x) c` are implicit. With no degree-1 basis elements, every
//! reduced coproduct term has both factors in degree >= 2.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::error::{Error, Result};

/// Validates `[A-Za-z0-9_]+`.
pub(crate) fn valid_name(name: &str) -> bool {
    !name.is_empty()
        && name
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Finite GF(2) coalgebra with differential and reduced coproduct.
///
/// Invariants established at construction:
/// * exactly one degree-0 basis element (the counit), no degree-1 elements;
/// * the reduced coproduct is coassociative and degree-additive;
/// * the differential has degree -1, squares to zero, and is a coderivation
///   for the reduced coproduct.
#[derive(Clone, Debug)]
pub struct DGCoalgebra {
    names: Vec<String>,
    degrees: Vec<usize>,
    counit: u32,
    /// Reduced coproduct per element, as a sorted mod-2 set of index pairs.
    coproduct: Vec<Vec<(u32, u32)>>,
    /// Differential per element, as a sorted mod-2 set of indices.
    differential: Vec<Vec<u32>>,
    by_name: HashMap<String, u32>,
}

fn canon_pairs(pairs: Vec<(u32, u32)>) -> Vec<(u32, u32)> {
    let mut set = BTreeSet::new();
    for p in pairs {
        if !set.insert(p) {
            set.remove(&p);
        }
    }
    set.into_iter().collect()
}

fn canon_ids(ids: Vec<u32>) -> Vec<u32> {
    let mut set = BTreeSet::new();
    for i in ids {
        if !set.insert(i) {
            set.remove(&i);
        }
    }
    set.into_iter().collect()
}

impl DGCoalgebra {
    /// Builds and fully validates a coalgebra.
    ///
    /// `coproduct` and `differential` map basis names to GF(2) sums (missing
    /// entries mean zero); repeated terms cancel mod 2.
    pub fn new(
        basis: &[(String, usize)],
        coproduct: &BTreeMap<String, Vec<(String, String)>>,
        differential: &BTreeMap<String, Vec<String>>,
    ) -> Result<Self> {
        let mut by_name = HashMap::new();
        let mut names = Vec::new();
        let mut degrees = Vec::new();
        for (name, degree) in basis {
            if !valid_name(name) {
                return Err(Error::InvalidCoalgebra(format!(
                    "basis name `{name}` is not of the form [A-Za-z0-9_]+"
                )));
            }
            if by_name.insert(name.clone(), names.len() as u32).is_some() {
                return Err(Error::InvalidCoalgebra(format!("duplicate basis name `{name}`")));
            }
            names.push(name.clone());
            degrees.push(*degree);
        }
        let zeros: Vec<u32> = (0..names.len() as u32)
            .filter(|&i| degrees[i as usize] == 0)
            .collect();
        if zeros.len() != 1 {
            return Err(Error::InvalidCoalgebra(format!(
                "expected exactly one degree-0 basis element, found {}",
                zeros.len()
            )));
        }
        let counit = zeros[0];
        if let Some(i) = (0..names.len()).find(|&i| degrees[i] == 1) {
            return Err(Error::InvalidCoalgebra(format!(
                "degree-1 basis element `{}` not allowed (simply-connected model)",
                names[i]
            )));
        }

        let resolve = |name: &str| -> Result<u32> {
            by_name
                .get(name)
                .copied()
                .ok_or_else(|| Error::UnknownName(name.to_string()))
        };

        let mut coproduct_v = vec![Vec::new(); names.len()];
        for (name, pairs) in coproduct {
            let c = resolve(name)?;
            if c == counit {
                return Err(Error::InvalidCoalgebra(
                    "reduced coproduct must vanish on the counit".into(),
                ));
            }
            let mut resolved = Vec::new();
            for (a, b) in pairs {
                let (ia, ib) = (resolve(a)?, resolve(b)?);
                let (da, db) = (degrees[ia as usize], degrees[ib as usize]);
                if ia == counit || ib == counit {
                    return Err(Error::InvalidCoalgebra(format!(
                        "reduced coproduct of `{name}` has a counit factor"
                    )));
                }
                if da + db != degrees[c as usize] {
                    return Err(Error::InvalidCoalgebra(format!(
                        "coproduct term ({a}, {b}) of `{name}` breaks degree additivity: \
                         {da} + {db} != {}",
                        degrees[c as usize]
                    )));
                }
                resolved.push((ia, ib));
            }
            coproduct_v[c as usize] = canon_pairs(resolved);
        }

        let mut differential_v = vec![Vec::new(); names.len()];
        for (name, targets) in differential {
            let c = resolve(name)?;
            let mut resolved = Vec::new();
            for t in targets {
                let it = resolve(t)?;
                if degrees[it as usize] + 1 != degrees[c as usize] {
                    return Err(Error::InvalidCoalgebra(format!(
                        "differential term `{t}` of `{name}` is not of degree {} - 1",
                        degrees[c as usize]
                    )));
                }
                resolved.push(it);
            }
            differential_v[c as usize] = canon_ids(resolved);
        }

        let out = DGCoalgebra {
            names,
            degrees,
            counit,
            coproduct: coproduct_v,
            differential: differential_v,
            by_name,
        };
        out.check_square_zero()?;
        out.check_coassociativity()?;
        out.check_coderivation()?;
        Ok(out)
    }

    fn check_square_zero(&self) -> Result<()> {
        for c in 0..self.len() {
            let mut acc = BTreeSet::new();
            for &t in &self.differential[c] {
                for &u in &self.differential[t as usize] {
                    if !acc.insert(u) {
                        acc.remove(&u);
                    }
                }
            }
            if !acc.is_empty() {
                return Err(Error::InvalidCoalgebra(format!(
                    "differential does not square to zero on `{}`",
                    self.names[c]
                )));
            }
        }
        Ok(())
    }

    /// (reduced (x) 1) o reduced = (1 (x) reduced) o reduced, per element,
    /// as mod-2 multisets of index triples.
    fn check_coassociativity(&self) -> Result<()> {
        for c in 0..self.len() {
            let mut left = BTreeSet::new();
            let mut right = BTreeSet::new();
            for &(a, b) in &self.coproduct[c] {
                for &(a1, a2) in &self.coproduct[a as usize] {
                    let t = (a1, a2, b);
                    if !left.insert(t) {
                        left.remove(&t);
                    }
                }
                for &(b1, b2) in &self.coproduct[b as usize] {
                    let t = (a, b1, b2);
                    if !right.insert(t) {
                        right.remove(&t);
                    }
                }
            }
            if left != right {
                return Err(Error::InvalidCoalgebra(format!(
                    "reduced coproduct not coassociative on `{}`",
                    self.names[c]
                )));
            }
        }
        Ok(())
    }

    /// reduced o d = (d (x) 1 + 1 (x) d) o reduced, per element.
    fn check_coderivation(&self) -> Result<()> {
        for c in 0..self.len() {
            let mut lhs = BTreeSet::new();
            for &t in &self.differential[c] {
                for &p in &self.coproduct[t as usize] {
                    if !lhs.insert(p) {
                        lhs.remove(&p);
                    }
                }
            }
            let mut rhs = BTreeSet::new();
            for &(a, b) in &self.coproduct[c] {
                for &da in &self.differential[a as usize] {
                    let p = (da, b);
                    if !rhs.insert(p) {
                        rhs.remove(&p);
                    }
                }
                for &db in &self.differential[b as usize] {
                    let p = (a, db);
                    if !rhs.insert(p) {
                        rhs.remove(&p);
                    }
                }
            }
            if lhs != rhs {
                return Err(Error::InvalidCoalgebra(format!(
                    "differential is not a coderivation on `{}`",
                    self.names[c]
                )));
            }
        }
        Ok(())
    }

    /// Test-only escape hatch: skips the structural checks so that broken
    /// inputs can be pushed through downstream error paths.
    #[doc(hidden)]
    pub fn new_unchecked(
        basis: &[(String, usize)],
        coproduct: &BTreeMap<String, Vec<(String, String)>>,
        differential: &BTreeMap<String, Vec<String>>,
    ) -> Self {
        let mut by_name = HashMap::new();
        let mut names = Vec::new();
        let mut degrees = Vec::new();
        for (name, degree) in basis {
            by_name.insert(name.clone(), names.len() as u32);
            names.push(name.clone());
            degrees.push(*degree);
        }
        let counit = (0..names.len() as u32)
            .find(|&i| degrees[i as usize] == 0)
            .unwrap_or(0);
        let mut coproduct_v = vec![Vec::new(); names.len()];
        for (name, pairs) in coproduct {
            let c = by_name[name];
            coproduct_v[c as usize] = canon_pairs(
                pairs
                    .iter()
                    .map(|(a, b)| (by_name[a], by_name[b]))
                    .collect(),
            );
        }
        let mut differential_v = vec![Vec::new(); names.len()];
        for (name, targets) in differential {
            let c = by_name[name];
            differential_v[c as usize] = canon_ids(targets.iter().map(|t| by_name[t]).collect());
        }
        DGCoalgebra {
            names,
            degrees,
            counit,
            coproduct: coproduct_v,
            differential: differential_v,
            by_name,
        }
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn name(&self, i: u32) -> &str {
        &self.names[i as usize]
    }

    pub fn degree(&self, i: u32) -> usize {
        self.degrees[i as usize]
    }

    pub fn counit(&self) -> u32 {
        self.counit
    }

    pub fn index_of(&self, name: &str) -> Option<u32> {
        self.by_name.get(name).copied()
    }

    /// Indices of the positive-degree basis elements, in basis order.
    pub fn reduced(&self) -> impl Iterator<Item = u32> + '_ {
        (0..self.len() as u32).filter(|&i| i != self.counit)
    }

    pub fn reduced_coproduct(&self, i: u32) -> &[(u32, u32)] {
        &self.coproduct[i as usize]
    }

    pub fn differential(&self, i: u32) -> &[u32] {
        &self.differential[i as usize]
    }

    pub fn max_degree(&self) -> usize {
        self.degrees.iter().copied().max().unwrap_or(0)
    }

    /// Homology dimensions of the coalgebra itself (its differential), per
    /// degree `0..=max_degree`. Used for base-column dimensions.
    pub fn homology_dims(&self) -> Vec<usize> {
        use crate::gf2::F2Matrix;
        let top = self.max_degree();
        let per_degree: Vec<Vec<u32>> = (0..=top)
            .map(|q| {
                (0..self.len() as u32)
                    .filter(|&i| self.degrees[i as usize] == q)
                    .collect()
            })
            .collect();
        let boundary = |q: usize| -> F2Matrix {
            let cols = &per_degree[q];
            let rows = if q == 0 { &[][..] } else { &per_degree[q - 1][..] };
            let mut m = F2Matrix::zeros(rows.len(), cols.len());
            for (j, &c) in cols.iter().enumerate() {
                for &t in &self.differential[c as usize] {
                    let i = rows.iter().position(|&r| r == t).expect("degree -1 target");
                    m.set(i, j, true);
                }
            }
            m
        };
        (0..=top)
            .map(|q| {
                let ker = boundary(q).kernel().dim();
                let img = if q < top { boundary(q + 1).rank() } else { 0 };
                ker - img
            })
            .collect()
    }
}

impl DGCoalgebra {
    /// Coalgebra of a sphere `S^n`, `n >= 2`: counit plus one class in
    /// degree `n`, zero differential, zero reduced coproduct.
    pub fn sphere(n: usize) -> DGCoalgebra {
        assert!(n >= 2, "sphere dimension must be >= 2");
        DGCoalgebra::new(
            &[("e".into(), 0), (format!("c{n}"), n)],
            &BTreeMap::new(),
            &BTreeMap::new(),
        )
        .expect("sphere coalgebra is valid")
    }
}
