//! Graded GF(2) algebras with differential, truncated at a degree cap.
//!
//! Three representations sit behind one interface:
//!
//! * `Free` -- tensor algebra on named generators; basis words are
//!   generator-index sequences, stored per degree in lexicographic order.
//! * `Tensor` -- tensor product of algebras; basis elements are tuples of
//!   factor basis elements, products are componentwise.
//! * `Table` -- finite basis with an explicit product table; associativity
//!   and the Leibniz rule are checked at construction.
//!
//! All basis data up to the cap is materialized at construction, so basis
//! element ids are stable and per-degree coordinates are just positions in
//! the degree's id list. Multiplication past the cap is an explicit error:
//! nothing is ever silently truncated.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::gf2::F2Matrix;

use super::coalgebra::valid_name;

pub type ElemId = u32;

/// Representation kind; tensor products inherit the kind of their factors.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum AlgKind {
    Free,
    Table,
}

impl fmt::Display for AlgKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AlgKind::Free => write!(f, "free"),
            AlgKind::Table => write!(f, "table"),
        }
    }
}

/// Generator of a free algebra, with its differential given as a GF(2) sum
/// of words (generator-index sequences) of total degree `degree - 1`.
#[derive(Clone, Debug)]
pub struct FreeGen {
    pub name: String,
    pub degree: usize,
    pub diff: Vec<Vec<usize>>,
}

impl FreeGen {
    pub fn cycle(name: &str, degree: usize) -> Self {
        FreeGen {
            name: name.into(),
            degree,
            diff: Vec::new(),
        }
    }
}

/// Input data for a product-table algebra. The basis must contain exactly
/// one degree-0 element; it acts as the unit and unit products are implicit.
/// Product entries are for pairs of non-unit elements; missing pairs (within
/// the cap) multiply to zero.
#[derive(Clone, Debug)]
pub struct TableSpec {
    pub basis: Vec<(String, usize)>,
    pub products: Vec<(String, String, Vec<String>)>,
    pub differential: Vec<(String, Vec<String>)>,
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
enum ElemKey {
    /// Free word: generator indices in order.
    Word(Vec<u16>),
    /// Tensor tuple: one flat id per factor.
    Tuple(Vec<ElemId>),
    /// Table basis element (its own index).
    Atom(u32),
}

enum Repr {
    Free {
        gens: Vec<FreeGen>,
        /// Generator diffs resolved to id sums (per generator).
        gen_diff_ids: Vec<Vec<ElemId>>,
    },
    Tensor {
        factors: Vec<Arc<DGAlgebra>>,
    },
    Table {
        atom_names: Vec<String>,
        products: HashMap<(u32, u32), Vec<ElemId>>,
    },
}

/// Named multiplicative generator exposed for word parsing and morphisms.
#[derive(Clone, Debug)]
pub struct GenEntry {
    pub name: String,
    pub degree: usize,
    /// Basis element realizing the generator; `None` when its degree
    /// exceeds the cap (the generator still names a letter for errors).
    pub elem: Option<ElemId>,
}

pub struct DGAlgebra {
    repr: Repr,
    kind: AlgKind,
    cap: usize,
    degrees: Vec<usize>,
    keys: Vec<ElemKey>,
    by_degree: Vec<Vec<ElemId>>,
    pos_in_degree: Vec<u32>,
    lookup: HashMap<ElemKey, ElemId>,
    diff: Vec<Vec<ElemId>>,
    gens: Vec<GenEntry>,
    gen_index: HashMap<String, usize>,
}

fn xor_id(acc: &mut BTreeSet<ElemId>, id: ElemId) {
    if !acc.insert(id) {
        acc.remove(&id);
    }
}

fn canon(ids: impl IntoIterator<Item = ElemId>) -> Vec<ElemId> {
    let mut set = BTreeSet::new();
    for i in ids {
        xor_id(&mut set, i);
    }
    set.into_iter().collect()
}

impl DGAlgebra {
    // ----------------------------------------------------------------
    // construction

    /// Free (tensor) algebra on `gens`, materialized up to `cap`.
    pub fn free(gens: Vec<FreeGen>, cap: usize) -> Result<Arc<DGAlgebra>> {
        let mut seen = HashMap::new();
        for (i, g) in gens.iter().enumerate() {
            if !valid_name(&g.name) {
                return Err(Error::InvalidAlgebra(format!(
                    "generator name `{}` is not of the form [A-Za-z0-9_]+",
                    g.name
                )));
            }
            if seen.insert(g.name.clone(), i).is_some() {
                return Err(Error::InvalidAlgebra(format!(
                    "duplicate generator name `{}`",
                    g.name
                )));
            }
            if g.degree == 0 {
                return Err(Error::InvalidAlgebra(format!(
                    "generator `{}` has degree 0; generators must have degree >= 1",
                    g.name
                )));
            }
        }
        if gens.len() > u16::MAX as usize {
            return Err(Error::InvalidAlgebra("too many generators".into()));
        }

        // Enumerate words per degree; within a degree the order is
        // lexicographic in generator indices (first letter ascending, then
        // the tail's canonical order).
        let mut keys: Vec<ElemKey> = vec![ElemKey::Word(Vec::new())];
        let mut degrees: Vec<usize> = vec![0];
        let mut by_degree: Vec<Vec<ElemId>> = vec![vec![0]];
        let mut lookup: HashMap<ElemKey, ElemId> = HashMap::new();
        lookup.insert(ElemKey::Word(Vec::new()), 0);
        for q in 1..=cap {
            let mut ids_q = Vec::new();
            for (gi, g) in gens.iter().enumerate() {
                if g.degree > q {
                    continue;
                }
                let rest_degree = q - g.degree;
                // Clone to release the borrow on by_degree.
                let rests: Vec<ElemId> = by_degree[rest_degree].clone();
                for rest_id in rests {
                    let ElemKey::Word(rest) = &keys[rest_id as usize] else {
                        unreachable!()
                    };
                    let mut word = Vec::with_capacity(rest.len() + 1);
                    word.push(gi as u16);
                    word.extend_from_slice(rest);
                    let id = keys.len() as ElemId;
                    keys.push(ElemKey::Word(word.clone()));
                    degrees.push(q);
                    lookup.insert(ElemKey::Word(word), id);
                    ids_q.push(id);
                }
            }
            by_degree.push(ids_q);
        }

        // Resolve generator differentials.
        let mut gen_diff_ids = Vec::with_capacity(gens.len());
        for g in &gens {
            let mut ids = Vec::new();
            for word in &g.diff {
                let mut total = 0usize;
                let mut key = Vec::with_capacity(word.len());
                for &gi in word {
                    if gi >= gens.len() {
                        return Err(Error::InvalidAlgebra(format!(
                            "differential of `{}` references generator index {gi} out of range",
                            g.name
                        )));
                    }
                    total += gens[gi].degree;
                    key.push(gi as u16);
                }
                if total + 1 != g.degree {
                    return Err(Error::InvalidAlgebra(format!(
                        "differential word of `{}` has degree {total}, expected {}",
                        g.name,
                        g.degree - 1
                    )));
                }
                if g.degree <= cap {
                    ids.push(lookup[&ElemKey::Word(key)]);
                }
            }
            gen_diff_ids.push(canon(ids));
        }

        let mut alg = DGAlgebra {
            kind: AlgKind::Free,
            cap,
            pos_in_degree: positions(&by_degree, keys.len()),
            gens: gens
                .iter()
                .map(|g| GenEntry {
                    name: g.name.clone(),
                    degree: g.degree,
                    elem: lookup.get(&ElemKey::Word(vec![
                        seen[&g.name] as u16,
                    ])).copied(),
                })
                .collect(),
            gen_index: seen,
            repr: Repr::Free { gens, gen_diff_ids },
            degrees,
            keys,
            by_degree,
            lookup,
            diff: Vec::new(),
        };
        alg.diff = alg.compute_free_diffs();
        alg.check_square_zero()?;
        Ok(Arc::new(alg))
    }

    /// Word differentials by the Leibniz rule, degree by degree.
    fn compute_free_diffs(&self) -> Vec<Vec<ElemId>> {
        let Repr::Free { gen_diff_ids, .. } = &self.repr else {
            unreachable!()
        };
        let mut diff: Vec<Vec<ElemId>> = vec![Vec::new(); self.keys.len()];
        for q in 1..=self.cap {
            for &id in &self.by_degree[q] {
                let ElemKey::Word(word) = &self.keys[id as usize] else {
                    unreachable!()
                };
                let head = word[0] as usize;
                let tail = &word[1..];
                let mut acc = BTreeSet::new();
                // d(head) * tail
                for &d in &gen_diff_ids[head] {
                    let ElemKey::Word(dw) = &self.keys[d as usize] else {
                        unreachable!()
                    };
                    let mut w = dw.clone();
                    w.extend_from_slice(tail);
                    xor_id(&mut acc, self.lookup[&ElemKey::Word(w)]);
                }
                // head * d(tail)
                if !tail.is_empty() {
                    let tail_id = self.lookup[&ElemKey::Word(tail.to_vec())];
                    for &d in &diff[tail_id as usize] {
                        let ElemKey::Word(dw) = &self.keys[d as usize] else {
                            unreachable!()
                        };
                        let mut w = Vec::with_capacity(dw.len() + 1);
                        w.push(head as u16);
                        w.extend_from_slice(dw);
                        xor_id(&mut acc, self.lookup[&ElemKey::Word(w)]);
                    }
                }
                diff[id as usize] = acc.into_iter().collect();
            }
        }
        diff
    }

    /// Product-table algebra. Checks unit uniqueness, degree additivity,
    /// associativity, the Leibniz rule, and that the differential squares
    /// to zero, all within the cap.
    pub fn table(spec: TableSpec, cap: usize) -> Result<Arc<DGAlgebra>> {
        let mut unit = None;
        for (name, d) in &spec.basis {
            if !valid_name(name) {
                return Err(Error::InvalidAlgebra(format!(
                    "basis name `{name}` is not of the form [A-Za-z0-9_]+"
                )));
            }
            if *d == 0 {
                if unit.is_some() {
                    return Err(Error::InvalidAlgebra(
                        "table algebra needs exactly one degree-0 element".into(),
                    ));
                }
                unit = Some(name.clone());
            }
            if *d > cap {
                return Err(Error::InvalidAlgebra(format!(
                    "basis element `{name}` of degree {d} exceeds cap {cap}"
                )));
            }
        }
        let Some(_) = unit else {
            return Err(Error::InvalidAlgebra(
                "table algebra needs exactly one degree-0 element".into(),
            ));
        };

        // Ids: bucket by degree, keeping input order inside each degree.
        let mut order: Vec<usize> = (0..spec.basis.len()).collect();
        order.sort_by_key(|&i| (spec.basis[i].1, i));
        let mut atom_names = Vec::new();
        let mut degrees = Vec::new();
        let mut by_degree: Vec<Vec<ElemId>> = vec![Vec::new(); cap + 1];
        let mut lookup = HashMap::new();
        let mut name_to_id = HashMap::new();
        for (new_id, &i) in order.iter().enumerate() {
            let (name, d) = &spec.basis[i];
            if name_to_id.insert(name.clone(), new_id as ElemId).is_some() {
                return Err(Error::InvalidAlgebra(format!("duplicate basis name `{name}`")));
            }
            atom_names.push(name.clone());
            degrees.push(*d);
            by_degree[*d].push(new_id as ElemId);
            lookup.insert(ElemKey::Atom(new_id as u32), new_id as ElemId);
        }

        let resolve = |n: &str| -> Result<ElemId> {
            name_to_id
                .get(n)
                .copied()
                .ok_or_else(|| Error::UnknownName(n.to_string()))
        };

        let mut products = HashMap::new();
        for (x, y, terms) in &spec.products {
            let (ix, iy) = (resolve(x)?, resolve(y)?);
            if degrees[ix as usize] == 0 || degrees[iy as usize] == 0 {
                return Err(Error::InvalidAlgebra(
                    "product table must not list unit products".into(),
                ));
            }
            let want = degrees[ix as usize] + degrees[iy as usize];
            let mut ids = Vec::new();
            for t in terms {
                let it = resolve(t)?;
                if degrees[it as usize] != want {
                    return Err(Error::InvalidAlgebra(format!(
                        "product {x} * {y} lists `{t}` of degree {}, expected {want}",
                        degrees[it as usize]
                    )));
                }
                ids.push(it);
            }
            if want <= cap && products.insert((ix, iy), canon(ids)).is_some() {
                return Err(Error::InvalidAlgebra(format!(
                    "duplicate product entry for ({x}, {y})"
                )));
            }
        }

        let mut diff = vec![Vec::new(); atom_names.len()];
        for (x, terms) in &spec.differential {
            let ix = resolve(x)?;
            let want = degrees[ix as usize].checked_sub(1).ok_or_else(|| {
                Error::InvalidAlgebra("differential of the unit must be zero".into())
            })?;
            let mut ids = Vec::new();
            for t in terms {
                let it = resolve(t)?;
                if degrees[it as usize] != want {
                    return Err(Error::InvalidAlgebra(format!(
                        "differential of `{x}` lists `{t}` of degree {}, expected {want}",
                        degrees[it as usize]
                    )));
                }
                ids.push(it);
            }
            diff[ix as usize] = canon(ids);
        }

        let gens: Vec<GenEntry> = (0..atom_names.len())
            .filter(|&i| degrees[i] > 0)
            .map(|i| GenEntry {
                name: atom_names[i].clone(),
                degree: degrees[i],
                elem: Some(i as ElemId),
            })
            .collect();
        let gen_index = gens
            .iter()
            .enumerate()
            .map(|(i, g)| (g.name.clone(), i))
            .collect();

        let alg = DGAlgebra {
            kind: AlgKind::Table,
            cap,
            pos_in_degree: positions(&by_degree, atom_names.len()),
            repr: Repr::Table {
                atom_names,
                products,
            },
            degrees,
            keys: (0..spec.basis.len()).map(|i| ElemKey::Atom(i as u32)).collect(),
            by_degree,
            lookup,
            diff,
            gens,
            gen_index,
        };
        alg.check_square_zero()?;
        alg.check_table_associativity()?;
        alg.check_table_leibniz()?;
        Ok(Arc::new(alg))
    }

    fn check_table_associativity(&self) -> Result<()> {
        let n = self.keys.len() as ElemId;
        for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    let total = self.degrees[x as usize]
                        + self.degrees[y as usize]
                        + self.degrees[z as usize];
                    if total > self.cap {
                        continue;
                    }
                    let xy = self.multiply_ids(x, y)?;
                    let yz = self.multiply_ids(y, z)?;
                    let mut left = BTreeSet::new();
                    for &t in &xy {
                        for &u in &self.multiply_ids(t, z)? {
                            xor_id(&mut left, u);
                        }
                    }
                    let mut right = BTreeSet::new();
                    for &t in &yz {
                        for &u in &self.multiply_ids(x, t)? {
                            xor_id(&mut right, u);
                        }
                    }
                    if left != right {
                        return Err(Error::InvalidAlgebra(format!(
                            "product table not associative on ({}, {}, {})",
                            self.name_of(x),
                            self.name_of(y),
                            self.name_of(z)
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    fn check_table_leibniz(&self) -> Result<()> {
        let n = self.keys.len() as ElemId;
        for x in 0..n {
            for y in 0..n {
                if self.degrees[x as usize] + self.degrees[y as usize] > self.cap {
                    continue;
                }
                let mut lhs = BTreeSet::new();
                for &t in &self.multiply_ids(x, y)? {
                    for &u in &self.diff[t as usize] {
                        xor_id(&mut lhs, u);
                    }
                }
                let mut rhs = BTreeSet::new();
                for &dx in &self.diff[x as usize].clone() {
                    for &u in &self.multiply_ids(dx, y)? {
                        xor_id(&mut rhs, u);
                    }
                }
                for &dy in &self.diff[y as usize].clone() {
                    for &u in &self.multiply_ids(x, dy)? {
                        xor_id(&mut rhs, u);
                    }
                }
                if lhs != rhs {
                    return Err(Error::InvalidAlgebra(format!(
                        "differential is not a derivation on ({}, {})",
                        self.name_of(x),
                        self.name_of(y)
                    )));
                }
            }
        }
        Ok(())
    }

    fn check_square_zero(&self) -> Result<()> {
        for id in 0..self.keys.len() {
            let mut acc = BTreeSet::new();
            for &t in &self.diff[id] {
                for &u in &self.diff[t as usize] {
                    xor_id(&mut acc, u);
                }
            }
            if !acc.is_empty() {
                return Err(Error::InvalidAlgebra(format!(
                    "differential does not square to zero on `{}`",
                    self.name_of(id as ElemId)
                )));
            }
        }
        Ok(())
    }

    // ----------------------------------------------------------------
    // accessors

    pub fn kind(&self) -> AlgKind {
        self.kind
    }

    pub fn degree_cap(&self) -> usize {
        self.cap
    }

    pub fn num_elems(&self) -> usize {
        self.keys.len()
    }

    /// True when the basis is the unit alone.
    pub fn is_trivial(&self) -> bool {
        self.keys.len() == 1
    }

    pub fn dim(&self, degree: usize) -> usize {
        self.by_degree.get(degree).map_or(0, |v| v.len())
    }

    pub fn basis_ids(&self, degree: usize) -> &[ElemId] {
        self.by_degree.get(degree).map_or(&[], |v| v.as_slice())
    }

    pub fn degree_of(&self, id: ElemId) -> usize {
        self.degrees[id as usize]
    }

    /// Position of `id` within its degree's basis list.
    pub fn pos_of(&self, id: ElemId) -> usize {
        self.pos_in_degree[id as usize] as usize
    }

    pub fn boundary_ids(&self, id: ElemId) -> &[ElemId] {
        &self.diff[id as usize]
    }

    pub fn generators(&self) -> &[GenEntry] {
        &self.gens
    }

    /// The generator's single-letter element.
    pub fn generator(self: &Arc<Self>, name: &str) -> Result<AlgElement> {
        let &gi = self
            .gen_index
            .get(name)
            .ok_or_else(|| Error::UnknownName(name.to_string()))?;
        let entry = &self.gens[gi];
        let id = entry.elem.ok_or(Error::CapOverflow {
            degree: entry.degree,
            cap: self.cap,
        })?;
        Ok(AlgElement {
            parent: self.clone(),
            degree: entry.degree,
            terms: BTreeSet::from([id]),
        })
    }

    pub fn unit(self: &Arc<Self>) -> AlgElement {
        AlgElement {
            parent: self.clone(),
            degree: 0,
            terms: BTreeSet::from([self.by_degree[0][0]]),
        }
    }

    pub fn zero(self: &Arc<Self>, degree: usize) -> AlgElement {
        AlgElement {
            parent: self.clone(),
            degree,
            terms: BTreeSet::new(),
        }
    }

    pub fn basis_elem(self: &Arc<Self>, id: ElemId) -> AlgElement {
        AlgElement {
            parent: self.clone(),
            degree: self.degrees[id as usize],
            terms: BTreeSet::from([id]),
        }
    }

    pub fn elem_from_ids(self: &Arc<Self>, degree: usize, ids: &[ElemId]) -> AlgElement {
        let mut terms = BTreeSet::new();
        for &id in ids {
            assert_eq!(self.degrees[id as usize], degree, "mixed degrees in element");
            xor_id(&mut terms, id);
        }
        AlgElement {
            parent: self.clone(),
            degree,
            terms,
        }
    }

    /// Parses a word (list of generator names) into its basis element.
    pub fn parse_word(self: &Arc<Self>, letters: &[String]) -> Result<AlgElement> {
        let mut acc = self.unit();
        for l in letters {
            let g = self.generator(l)?;
            acc = acc.multiply(&g)?;
        }
        Ok(acc)
    }

    /// Decomposes a basis element into generator letters (empty for the
    /// unit). Tensor factors are prefixed `f0_`, `f1_`, ...
    pub fn letters_of(&self, id: ElemId) -> Vec<String> {
        match (&self.repr, &self.keys[id as usize]) {
            (Repr::Free { gens, .. }, ElemKey::Word(w)) => {
                w.iter().map(|&gi| gens[gi as usize].name.clone()).collect()
            }
            (Repr::Tensor { factors }, ElemKey::Tuple(t)) => {
                let mut out = Vec::new();
                for (j, (&fid, factor)) in t.iter().zip(factors).enumerate() {
                    for l in factor.letters_of(fid) {
                        out.push(format!("f{j}_{l}"));
                    }
                }
                out
            }
            (Repr::Table { atom_names, .. }, ElemKey::Atom(a)) => {
                if self.degrees[id as usize] == 0 {
                    Vec::new()
                } else {
                    vec![atom_names[*a as usize].clone()]
                }
            }
            _ => unreachable!("key/representation mismatch"),
        }
    }

    /// Display name of a basis element: letters joined by `.`, unit = `1`.
    pub fn name_of(&self, id: ElemId) -> String {
        let letters = self.letters_of(id);
        if letters.is_empty() {
            "1".to_string()
        } else {
            letters.join(".")
        }
    }

    // ----------------------------------------------------------------
    // products

    /// Product of two basis elements as a mod-2 id set.
    pub(crate) fn multiply_ids(&self, a: ElemId, b: ElemId) -> Result<Vec<ElemId>> {
        let total = self.degrees[a as usize] + self.degrees[b as usize];
        if total > self.cap {
            return Err(Error::CapOverflow {
                degree: total,
                cap: self.cap,
            });
        }
        match &self.repr {
            Repr::Free { .. } => {
                let (ElemKey::Word(wa), ElemKey::Word(wb)) =
                    (&self.keys[a as usize], &self.keys[b as usize])
                else {
                    unreachable!()
                };
                let mut w = Vec::with_capacity(wa.len() + wb.len());
                w.extend_from_slice(wa);
                w.extend_from_slice(wb);
                Ok(vec![self.lookup[&ElemKey::Word(w)]])
            }
            Repr::Tensor { factors } => {
                let (ElemKey::Tuple(ta), ElemKey::Tuple(tb)) =
                    (&self.keys[a as usize], &self.keys[b as usize])
                else {
                    unreachable!()
                };
                // Componentwise products, then all combinations.
                let mut component_sums = Vec::with_capacity(factors.len());
                for ((&xa, &xb), f) in ta.iter().zip(tb).zip(factors) {
                    component_sums.push(f.multiply_ids(xa, xb)?);
                }
                let mut acc = BTreeSet::new();
                let mut cur = Vec::with_capacity(factors.len());
                // Cartesian product over component term sets.
                fn walk(
                    sums: &[Vec<ElemId>],
                    cur: &mut Vec<ElemId>,
                    lookup: &HashMap<ElemKey, ElemId>,
                    acc: &mut BTreeSet<ElemId>,
                ) {
                    if cur.len() == sums.len() {
                        let id = lookup[&ElemKey::Tuple(cur.clone())];
                        if !acc.insert(id) {
                            acc.remove(&id);
                        }
                        return;
                    }
                    for &t in &sums[cur.len()] {
                        cur.push(t);
                        walk(sums, cur, lookup, acc);
                        cur.pop();
                    }
                }
                walk(&component_sums, &mut cur, &self.lookup, &mut acc);
                Ok(acc.into_iter().collect())
            }
            Repr::Table { products, .. } => {
                if self.degrees[a as usize] == 0 {
                    return Ok(vec![b]);
                }
                if self.degrees[b as usize] == 0 {
                    return Ok(vec![a]);
                }
                Ok(products.get(&(a, b)).cloned().unwrap_or_default())
            }
        }
    }
}

fn positions(by_degree: &[Vec<ElemId>], total: usize) -> Vec<u32> {
    let mut pos = vec![0u32; total];
    for ids in by_degree {
        for (p, &id) in ids.iter().enumerate() {
            pos[id as usize] = p as u32;
        }
    }
    pos
}

/// Tensor product of two algebras. Both factors must share a representation
/// kind; the result's cap is the smaller factor cap, and its basis elements
/// are pairs ordered lexicographically by factor ids within each degree.
pub fn tensor_algebras(a: &Arc<DGAlgebra>, b: &Arc<DGAlgebra>) -> Result<Arc<DGAlgebra>> {
    if a.kind() != b.kind() {
        return Err(Error::MixedAlgebraKinds(
            a.kind().to_string(),
            b.kind().to_string(),
        ));
    }
    let factors = vec![a.clone(), b.clone()];
    let cap = a.degree_cap().min(b.degree_cap());

    let mut keys = Vec::new();
    let mut degrees = Vec::new();
    let mut by_degree: Vec<Vec<ElemId>> = vec![Vec::new(); cap + 1];
    let mut lookup = HashMap::new();
    for ia in 0..a.num_elems() as ElemId {
        let da = a.degree_of(ia);
        if da > cap {
            continue;
        }
        for ib in 0..b.num_elems() as ElemId {
            let db = b.degree_of(ib);
            if da + db > cap {
                continue;
            }
            let id = keys.len() as ElemId;
            let key = ElemKey::Tuple(vec![ia, ib]);
            keys.push(key.clone());
            degrees.push(da + db);
            lookup.insert(key, id);
            by_degree[da + db].push(id);
        }
    }
    // Re-bucket in lexicographic id order within each degree: iteration
    // above already emits (ia, ib) lexicographically, but flat ids must be
    // re-sorted per degree for deterministic coordinates.
    for ids in &mut by_degree {
        ids.sort_by_key(|&id| match &keys[id as usize] {
            ElemKey::Tuple(t) => t.clone(),
            _ => unreachable!(),
        });
    }

    // Leibniz differential over the factors.
    let mut diff = Vec::with_capacity(keys.len());
    for key in &keys {
        let ElemKey::Tuple(t) = key else { unreachable!() };
        let (ia, ib) = (t[0], t[1]);
        let mut acc = BTreeSet::new();
        for &da in a.boundary_ids(ia) {
            xor_id(&mut acc, lookup[&ElemKey::Tuple(vec![da, ib])]);
        }
        for &db in b.boundary_ids(ib) {
            xor_id(&mut acc, lookup[&ElemKey::Tuple(vec![ia, db])]);
        }
        diff.push(acc.into_iter().collect());
    }

    // Generators: factor generators with positional prefixes.
    let mut gens = Vec::new();
    let mut gen_index = HashMap::new();
    for (j, f) in factors.iter().enumerate() {
        let unit_other: Vec<ElemId> = factors.iter().map(|g| g.basis_ids(0)[0]).collect();
        for g in f.generators() {
            let name = format!("f{j}_{}", g.name);
            let elem = g.elem.and_then(|eid| {
                let mut t = unit_other.clone();
                t[j] = eid;
                lookup.get(&ElemKey::Tuple(t)).copied()
            });
            gen_index.insert(name.clone(), gens.len());
            gens.push(GenEntry {
                name,
                degree: g.degree,
                elem,
            });
        }
    }

    let kind = a.kind();
    let alg = DGAlgebra {
        kind,
        cap,
        pos_in_degree: positions(&by_degree, keys.len()),
        repr: Repr::Tensor { factors },
        degrees,
        keys,
        by_degree,
        lookup,
        diff,
        gens,
        gen_index,
    };
    alg.check_square_zero()?;
    Ok(Arc::new(alg))
}

/// Homology dimensions in degrees `0..=window`; see the module docs.
pub fn homology_dims(alg: &Arc<DGAlgebra>, window: usize) -> Result<Vec<usize>> {
    if window + 1 > alg.degree_cap() {
        return Err(Error::HomologyWindow {
            requested: window,
            cap: alg.degree_cap(),
        });
    }
    let boundary = |q: usize| -> F2Matrix {
        let cols = alg.basis_ids(q);
        let rows = if q == 0 { 0 } else { alg.dim(q - 1) };
        let mut m = F2Matrix::zeros(rows, cols.len());
        for (j, &id) in cols.iter().enumerate() {
            for &t in alg.boundary_ids(id) {
                m.set(alg.pos_of(t), j, true);
            }
        }
        m
    };
    Ok((0..=window)
        .map(|q| boundary(q).kernel().dim() - boundary(q + 1).rank())
        .collect())
}

/// Homogeneous GF(2) element of a [`DGAlgebra`]: a mod-2 set of basis
/// elements of one degree, tied to its parent algebra.
#[derive(Clone)]
pub struct AlgElement {
    parent: Arc<DGAlgebra>,
    degree: usize,
    terms: BTreeSet<ElemId>,
}

impl AlgElement {
    pub fn parent(&self) -> &Arc<DGAlgebra> {
        &self.parent
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn term_ids(&self) -> impl Iterator<Item = ElemId> + '_ {
        self.terms.iter().copied()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &AlgElement) -> Result<AlgElement> {
        if !Arc::ptr_eq(&self.parent, &other.parent) {
            return Err(Error::ParentMismatch);
        }
        if self.degree != other.degree && !self.is_zero() && !other.is_zero() {
            return Err(Error::DegreeMismatch {
                expected: self.degree as i64,
                got: other.degree as i64,
            });
        }
        let degree = if self.is_zero() { other.degree } else { self.degree };
        let mut terms = self.terms.clone();
        for &t in &other.terms {
            xor_id(&mut terms, t);
        }
        Ok(AlgElement {
            parent: self.parent.clone(),
            degree,
            terms,
        })
    }

    /// GF(2) product. Errors on parent mismatch and on cap overflow; the
    /// overflow is never silently truncated.
    pub fn multiply(&self, other: &AlgElement) -> Result<AlgElement> {
        if !Arc::ptr_eq(&self.parent, &other.parent) {
            return Err(Error::ParentMismatch);
        }
        let degree = self.degree + other.degree;
        if degree > self.parent.degree_cap() && !self.is_zero() && !other.is_zero() {
            return Err(Error::CapOverflow {
                degree,
                cap: self.parent.degree_cap(),
            });
        }
        let mut terms = BTreeSet::new();
        for &a in &self.terms {
            for &b in &other.terms {
                for t in self.parent.multiply_ids(a, b)? {
                    xor_id(&mut terms, t);
                }
            }
        }
        Ok(AlgElement {
            parent: self.parent.clone(),
            degree,
            terms,
        })
    }

    /// Boundary; the zero element in degree 0.
    pub fn boundary(&self) -> AlgElement {
        let degree = self.degree.saturating_sub(1);
        let mut terms = BTreeSet::new();
        for &t in &self.terms {
            for &u in self.parent.boundary_ids(t) {
                xor_id(&mut terms, u);
            }
        }
        if self.degree == 0 {
            terms.clear();
        }
        AlgElement {
            parent: self.parent.clone(),
            degree,
            terms,
        }
    }

    pub fn is_cycle(&self) -> bool {
        self.boundary().is_zero()
    }

    /// Export form: one word per term, each word a list of generator names.
    pub fn to_words(&self) -> Vec<Vec<String>> {
        self.terms
            .iter()
            .map(|&t| self.parent.letters_of(t))
            .collect()
    }
}

impl PartialEq for AlgElement {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.parent, &other.parent)
            && self.terms == other.terms
            && (self.degree == other.degree || self.terms.is_empty())
    }
}

impl Eq for AlgElement {}

impl fmt::Display for AlgElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let names: Vec<String> = self.terms.iter().map(|&t| self.parent.name_of(t)).collect();
        write!(f, "{}", names.join(" + "))
    }
}

impl fmt::Debug for AlgElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "AlgElement(deg {}, {})", self.degree, self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Free algebra on u (degree 1, cycle), v (degree 2, dv = u),
    /// w (degree 3, dw = u.u). d^2 = 0 throughout.
    fn mixed_alg(cap: usize) -> Arc<DGAlgebra> {
        DGAlgebra::free(
            vec![
                FreeGen::cycle("u", 1),
                FreeGen {
                    name: "v".into(),
                    degree: 2,
                    diff: vec![vec![0]],
                },
                FreeGen {
                    name: "w".into(),
                    degree: 3,
                    diff: vec![vec![0, 0]],
                },
            ],
            cap,
        )
        .expect("valid free algebra")
    }

    #[test]
    fn word_enumeration_is_lexicographic() {
        let alg = DGAlgebra::free(
            vec![FreeGen::cycle("a", 1), FreeGen::cycle("b", 1)],
            3,
        )
        .unwrap();
        let names: Vec<String> = alg.basis_ids(2).iter().map(|&i| alg.name_of(i)).collect();
        assert_eq!(names, vec!["a.a", "a.b", "b.a", "b.b"]);
        assert_eq!(alg.dim(3), 8);
        assert_eq!(alg.dim(0), 1);
    }

    #[test]
    fn mixed_degree_word_order() {
        // Generators a (1) and c (2): degree-3 words in lexicographic
        // index order are a.a.a, a.c, c.a.
        let alg = DGAlgebra::free(
            vec![FreeGen::cycle("a", 1), FreeGen::cycle("c", 2)],
            3,
        )
        .unwrap();
        let names: Vec<String> = alg.basis_ids(3).iter().map(|&i| alg.name_of(i)).collect();
        assert_eq!(names, vec!["a.a.a", "a.c", "c.a"]);
    }

    #[test]
    fn multiply_concatenates_words() {
        let alg = mixed_alg(6);
        let u = alg.generator("u").unwrap();
        let v = alg.generator("v").unwrap();
        let uv = u.multiply(&v).unwrap();
        assert_eq!(uv.degree(), 3);
        assert_eq!(format!("{uv}"), "u.v");
        let vu = v.multiply(&u).unwrap();
        assert_ne!(uv, vu);
    }

    #[test]
    fn cap_overflow_is_an_error() {
        let alg = mixed_alg(3);
        let v = alg.generator("v").unwrap();
        let err = v.multiply(&v).unwrap_err();
        assert!(matches!(err, Error::CapOverflow { degree: 4, cap: 3 }));
    }

    #[test]
    fn parent_mismatch_is_an_error() {
        let a1 = mixed_alg(4);
        let a2 = mixed_alg(4);
        let x = a1.generator("u").unwrap();
        let y = a2.generator("u").unwrap();
        assert!(matches!(x.multiply(&y), Err(Error::ParentMismatch)));
    }

    #[test]
    fn boundary_satisfies_leibniz_on_words() {
        let alg = mixed_alg(6);
        let v = alg.generator("v").unwrap();
        let w = alg.generator("w").unwrap();
        let lhs = v.multiply(&w).unwrap().boundary();
        let rhs = v
            .boundary()
            .multiply(&w)
            .unwrap()
            .add(&v.multiply(&w.boundary()).unwrap())
            .unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn square_zero_everywhere() {
        let alg = mixed_alg(6);
        for q in 0..=6 {
            for &id in alg.basis_ids(q) {
                let e = alg.basis_elem(id);
                assert!(e.boundary().boundary().is_zero(), "d2 != 0 on {}", alg.name_of(id));
            }
        }
    }

    #[test]
    fn free_homology_with_differential() {
        // dv = u cancels u against v, but w survives: uv and w both bound
        // uu, so [uv + w] is a degree-3 class and homology is polynomial
        // on it. Frozen by hand: degree-3 cycles {uuu, uv+vu, uv+w},
        // degree-3 boundaries {uuu, uv+vu} (images of uuv, vv, uw).
        let alg = mixed_alg(6);
        let dims = homology_dims(&alg, 4).unwrap();
        assert_eq!(dims, vec![1, 0, 0, 1, 0]);
    }

    #[test]
    fn homology_window_error() {
        let alg = mixed_alg(4);
        assert!(matches!(
            homology_dims(&alg, 4),
            Err(Error::HomologyWindow { .. })
        ));
        assert!(homology_dims(&alg, 3).is_ok());
    }

    #[test]
    fn polynomial_homology_of_one_generator() {
        // Free on one degree-1 cycle: every degree has exactly one word.
        let alg = DGAlgebra::free(vec![FreeGen::cycle("s", 1)], 7).unwrap();
        assert_eq!(homology_dims(&alg, 6).unwrap(), vec![1; 7]);
    }

    #[test]
    fn tensor_kunneth_convolution() {
        // A = free on degree-1 cycle (dims 1,1,1,...),
        // B = free on degree-2 cycle (dims 1,0,1,0,...).
        // H(A (x) B)_q = floor(q/2) + 1.
        let a = DGAlgebra::free(vec![FreeGen::cycle("s", 1)], 8).unwrap();
        let b = DGAlgebra::free(vec![FreeGen::cycle("t", 2)], 8).unwrap();
        let t = tensor_algebras(&a, &b).unwrap();
        let dims = homology_dims(&t, 7).unwrap();
        assert_eq!(dims, vec![1, 1, 2, 2, 3, 3, 4, 4]);
    }

    #[test]
    fn tensor_kunneth_with_differential() {
        // H(mixed_alg) = [1,0,0,1,0,0] (polynomial on [uv + w]); Kunneth
        // over a field convolves it with the degree-2 polynomial factor:
        // [1,0,1,0,1,0] * [1,0,0,1,0,0] = [1,0,1,1,1,1].
        let a = DGAlgebra::free(vec![FreeGen::cycle("s", 2)], 6).unwrap();
        let m = mixed_alg(6);
        let t = tensor_algebras(&a, &m).unwrap();
        assert_eq!(homology_dims(&t, 5).unwrap(), vec![1, 0, 1, 1, 1, 1]);
    }

    #[test]
    fn tensor_with_trivial_factor_keeps_structure() {
        let a = DGAlgebra::free(vec![FreeGen::cycle("s", 1)], 5).unwrap();
        let triv = DGAlgebra::free(vec![], 5).unwrap();
        let t = tensor_algebras(&a, &triv).unwrap();
        for q in 0..=5 {
            assert_eq!(t.dim(q), a.dim(q), "degree {q}");
        }
        assert_eq!(homology_dims(&t, 4).unwrap(), homology_dims(&a, 4).unwrap());
        // Product structure carries over through the f0_ prefix.
        let s = t.generator("f0_s").unwrap();
        let ss = s.multiply(&s).unwrap();
        assert_eq!(ss.num_terms(), 1);
    }

    #[test]
    fn tensor_product_is_componentwise() {
        let a = DGAlgebra::free(vec![FreeGen::cycle("x", 1)], 6).unwrap();
        let b = DGAlgebra::free(vec![FreeGen::cycle("y", 1)], 6).unwrap();
        let t = tensor_algebras(&a, &b).unwrap();
        let gx = t.generator("f0_x").unwrap();
        let gy = t.generator("f1_y").unwrap();
        // (x (x) 1)(1 (x) y) = (1 (x) y)(x (x) 1) = x (x) y.
        assert_eq!(gx.multiply(&gy).unwrap(), gy.multiply(&gx).unwrap());
    }

    #[test]
    fn mixed_kinds_refuse_to_tensor() {
        let a = DGAlgebra::free(vec![FreeGen::cycle("x", 1)], 6).unwrap();
        let t = DGAlgebra::table(
            TableSpec {
                basis: vec![("one".into(), 0), ("x2".into(), 2)],
                products: vec![],
                differential: vec![],
            },
            6,
        )
        .unwrap();
        assert!(matches!(
            tensor_algebras(&a, &t),
            Err(Error::MixedAlgebraKinds(_, _))
        ));
    }

    #[test]
    fn table_checks_associativity() {
        // x*x = y, x*y = 0 but y*x = z breaks (xx)x = x(xx).
        let bad = DGAlgebra::table(
            TableSpec {
                basis: vec![
                    ("one".into(), 0),
                    ("x".into(), 2),
                    ("y".into(), 4),
                    ("z".into(), 6),
                ],
                products: vec![
                    ("x".into(), "x".into(), vec!["y".into()]),
                    ("y".into(), "x".into(), vec!["z".into()]),
                ],
                differential: vec![],
            },
            6,
        );
        assert!(matches!(bad, Err(Error::InvalidAlgebra(_))));
    }

    #[test]
    fn table_truncated_polynomial_ring() {
        // Z/2[x]/(x^3) with |x| = 2, cap 6.
        let alg = DGAlgebra::table(
            TableSpec {
                basis: vec![("one".into(), 0), ("x".into(), 2), ("x2".into(), 4)],
                products: vec![
                    ("x".into(), "x".into(), vec!["x2".into()]),
                    ("x".into(), "x2".into(), vec![]),
                    ("x2".into(), "x".into(), vec![]),
                    ("x2".into(), "x2".into(), vec![]),
                ],
                differential: vec![],
            },
            6,
        )
        .unwrap();
        let x = alg.generator("x").unwrap();
        let x2 = x.multiply(&x).unwrap();
        assert_eq!(format!("{x2}"), "x2");
        assert!(x2.multiply(&x).unwrap().is_zero());
        assert_eq!(homology_dims(&alg, 5).unwrap(), vec![1, 0, 1, 0, 1, 0]);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn arb_elem(alg: Arc<DGAlgebra>, degree: usize) -> impl Strategy<Value = AlgElement> {
            let ids: Vec<ElemId> = alg.basis_ids(degree).to_vec();
            proptest::collection::vec(proptest::bool::ANY, ids.len()).prop_map(move |mask| {
                let chosen: Vec<ElemId> = ids
                    .iter()
                    .zip(&mask)
                    .filter(|(_, &m)| m)
                    .map(|(&i, _)| i)
                    .collect();
                alg.elem_from_ids(degree, &chosen)
            })
        }

        proptest! {
            #[test]
            fn leibniz_on_random_pairs(
                (x, y) in (1usize..=3, 1usize..=3).prop_flat_map(|(dx, dy)| {
                    let alg = mixed_alg(8);
                    (arb_elem(alg.clone(), dx), arb_elem(alg, dy))
                })
            ) {
                let lhs = x.multiply(&y).unwrap().boundary();
                let rhs = x.boundary().multiply(&y).unwrap()
                    .add(&x.multiply(&y.boundary()).unwrap()).unwrap();
                prop_assert_eq!(lhs, rhs);
            }

            #[test]
            fn boundary_squares_to_zero_on_random_elements(
                x in (1usize..=4).prop_flat_map(|d| arb_elem(mixed_alg(8), d))
            ) {
                prop_assert!(x.boundary().boundary().is_zero());
            }
        }
    }
}
