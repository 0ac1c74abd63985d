//! JSON import and export for coalgebras, systems, comparisons, and
//! computed pages.
//!
//! All schemas use maps that may be omitted to mean zero, names matching
//! [A-Za-z0-9_]+, and GF(2) sums of ring elements written as lists of
//! letter lists (the empty letter list is the unit):
//!
//! coalgebra   {"basis":[{"name","degree"}],
//!              "coproduct":{x: [[a, b], ...]},
//!              "differential":{x: [y, ...]}}
//! ring        {"type":"cobar","coalgebra":<coalgebra>,"cap":N}
//!             {"type":"tensor","factors":[<ring>, ...]}
//! system      {"ring":<ring>,
//!              "generators":[{"name","mu","action"?}],
//!              "A":{"x|y": [[letter, ...], ...]}}
//! comparison  {"source":<system>,"target":<system>,"shift"?,
//!              "ring_map"?:{gen: [[letter, ...], ...]},
//!              "B":{"x|y": [[letter, ...], ...]}}
//! pages       {"filt_min","filt_max","n_min","n_max",
//!              "pages":[{"r","cells":[{"p","q","dim","d_rank","certified"}]}]}
//!
//! Schema violations name the offending field by path; malformed JSON
//! text surfaces the parser's line and column.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde_json::{json, Map, Value};

use crate::comparison::ComparisonData;
use crate::dga::{cobar, tensor_algebras, AlgElement, DGAlgebra, DGCoalgebra, DgaMorphism};
use crate::error::{Error, Result};
use crate::pages::{Cell, Page, PageSet};
use crate::system::{Generator, GeneratorSystem};

fn schema(field: &str, message: impl Into<String>) -> Error {
    Error::Schema {
        field: field.to_string(),
        message: message.into(),
    }
}

fn as_obj<'a>(v: &'a Value, path: &str) -> Result<&'a Map<String, Value>> {
    v.as_object().ok_or_else(|| schema(path, "expected an object"))
}

fn as_array<'a>(v: &'a Value, path: &str) -> Result<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| schema(path, "expected an array"))
}

fn as_str<'a>(v: &'a Value, path: &str) -> Result<&'a str> {
    v.as_str().ok_or_else(|| schema(path, "expected a string"))
}

fn as_usize(v: &Value, path: &str) -> Result<usize> {
    v.as_u64()
        .map(|n| n as usize)
        .ok_or_else(|| schema(path, "expected a nonnegative integer"))
}

fn as_i64(v: &Value, path: &str) -> Result<i64> {
    v.as_i64().ok_or_else(|| schema(path, "expected an integer"))
}

fn as_bool(v: &Value, path: &str) -> Result<bool> {
    v.as_bool().ok_or_else(|| schema(path, "expected a boolean"))
}

fn get<'a>(o: &'a Map<String, Value>, key: &str, path: &str) -> Result<&'a Value> {
    o.get(key)
        .ok_or_else(|| schema(&field_path(path, key), "missing required field"))
}

fn field_path(path: &str, key: &str) -> String {
    if path == "$" {
        key.to_string()
    } else {
        format!("{path}.{key}")
    }
}

/// Parses JSON text; syntax errors carry the parser's line and column.
pub fn value_from_str(text: &str) -> Result<Value> {
    Ok(serde_json::from_str(text)?)
}

/// Deterministic pretty form used for every export (object keys sorted).
pub fn to_pretty_string(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("values serialize");
    s.push('\n');
    s
}

// --------------------------------------------------------------------
// coalgebras

pub fn coalgebra_to_value(c: &DGCoalgebra) -> Value {
    let basis: Vec<Value> = (0..c.len() as u32)
        .map(|i| json!({"name": c.name(i), "degree": c.degree(i)}))
        .collect();
    let mut coproduct = Map::new();
    let mut differential = Map::new();
    for i in 0..c.len() as u32 {
        let pairs = c.reduced_coproduct(i);
        if !pairs.is_empty() {
            let v: Vec<Value> = pairs
                .iter()
                .map(|&(a, b)| json!([c.name(a), c.name(b)]))
                .collect();
            coproduct.insert(c.name(i).to_string(), Value::Array(v));
        }
        let diff = c.differential(i);
        if !diff.is_empty() {
            let v: Vec<Value> = diff.iter().map(|&t| json!(c.name(t))).collect();
            differential.insert(c.name(i).to_string(), Value::Array(v));
        }
    }
    let mut out = Map::new();
    out.insert("basis".into(), Value::Array(basis));
    if !coproduct.is_empty() {
        out.insert("coproduct".into(), Value::Object(coproduct));
    }
    if !differential.is_empty() {
        out.insert("differential".into(), Value::Object(differential));
    }
    Value::Object(out)
}

fn coalgebra_from_value_at(v: &Value, path: &str) -> Result<DGCoalgebra> {
    let o = as_obj(v, path)?;
    let basis_path = field_path(path, "basis");
    let basis_v = as_array(get(o, "basis", path)?, &basis_path)?;
    let mut basis = Vec::new();
    for (i, bv) in basis_v.iter().enumerate() {
        let p = format!("{basis_path}[{i}]");
        let bo = as_obj(bv, &p)?;
        let name = as_str(get(bo, "name", &p)?, &format!("{p}.name"))?;
        let degree = as_usize(get(bo, "degree", &p)?, &format!("{p}.degree"))?;
        basis.push((name.to_string(), degree));
    }
    let mut coproduct: BTreeMap<String, Vec<(String, String)>> = BTreeMap::new();
    if let Some(cv) = o.get("coproduct") {
        let cpath = field_path(path, "coproduct");
        for (name, pairs_v) in as_obj(cv, &cpath)? {
            let p = format!("{cpath}.{name}");
            let mut pairs = Vec::new();
            for (i, pv) in as_array(pairs_v, &p)?.iter().enumerate() {
                let pp = format!("{p}[{i}]");
                let pair = as_array(pv, &pp)?;
                if pair.len() != 2 {
                    return Err(schema(&pp, "expected a two-element pair"));
                }
                pairs.push((
                    as_str(&pair[0], &pp)?.to_string(),
                    as_str(&pair[1], &pp)?.to_string(),
                ));
            }
            coproduct.insert(name.clone(), pairs);
        }
    }
    let mut differential: BTreeMap<String, Vec<String>> = BTreeMap::new();
    if let Some(dv) = o.get("differential") {
        let dpath = field_path(path, "differential");
        for (name, terms_v) in as_obj(dv, &dpath)? {
            let p = format!("{dpath}.{name}");
            let mut terms = Vec::new();
            for (i, tv) in as_array(terms_v, &p)?.iter().enumerate() {
                terms.push(as_str(tv, &format!("{p}[{i}]"))?.to_string());
            }
            differential.insert(name.clone(), terms);
        }
    }
    DGCoalgebra::new(&basis, &coproduct, &differential)
}

pub fn coalgebra_from_value(v: &Value) -> Result<DGCoalgebra> {
    coalgebra_from_value_at(v, "$")
}

// --------------------------------------------------------------------
// rings

/// Construction recipe for a ring; this is what ring JSON denotes, and
/// what exports need alongside a system (a built ring does not remember
/// where it came from).
#[derive(Clone)]
pub enum RingRecipe {
    Cobar { coalgebra: DGCoalgebra, cap: usize },
    Tensor { factors: Vec<RingRecipe> },
}

impl RingRecipe {
    pub fn build(&self) -> Result<Arc<DGAlgebra>> {
        match self {
            RingRecipe::Cobar { coalgebra, cap } => cobar(coalgebra, *cap),
            RingRecipe::Tensor { factors } => {
                let built: Vec<Arc<DGAlgebra>> =
                    factors.iter().map(|f| f.build()).collect::<Result<_>>()?;
                let mut acc = built[0].clone();
                for f in &built[1..] {
                    acc = tensor_algebras(&acc, f)?;
                }
                Ok(acc)
            }
        }
    }

    pub fn to_value(&self) -> Value {
        match self {
            RingRecipe::Cobar { coalgebra, cap } => json!({
                "type": "cobar",
                "coalgebra": coalgebra_to_value(coalgebra),
                "cap": cap,
            }),
            RingRecipe::Tensor { factors } => json!({
                "type": "tensor",
                "factors": factors.iter().map(|f| f.to_value()).collect::<Vec<_>>(),
            }),
        }
    }
}

fn ring_from_value_at(v: &Value, path: &str) -> Result<RingRecipe> {
    let o = as_obj(v, path)?;
    let tpath = field_path(path, "type");
    match as_str(get(o, "type", path)?, &tpath)? {
        "cobar" => {
            let coalgebra = coalgebra_from_value_at(
                get(o, "coalgebra", path)?,
                &field_path(path, "coalgebra"),
            )?;
            let cap = as_usize(get(o, "cap", path)?, &field_path(path, "cap"))?;
            Ok(RingRecipe::Cobar { coalgebra, cap })
        }
        "tensor" => {
            let fpath = field_path(path, "factors");
            let factors_v = as_array(get(o, "factors", path)?, &fpath)?;
            if factors_v.is_empty() {
                return Err(schema(&fpath, "a tensor ring needs at least one factor"));
            }
            let factors = factors_v
                .iter()
                .enumerate()
                .map(|(i, fv)| ring_from_value_at(fv, &format!("{fpath}[{i}]")))
                .collect::<Result<Vec<_>>>()?;
            Ok(RingRecipe::Tensor { factors })
        }
        other => Err(schema(
            &tpath,
            format!("unknown ring type `{other}`; expected \"cobar\" or \"tensor\""),
        )),
    }
}

pub fn ring_from_value(v: &Value) -> Result<RingRecipe> {
    ring_from_value_at(v, "$")
}

// --------------------------------------------------------------------
// ring-element word lists

fn words_to_value(e: &AlgElement) -> Value {
    let words: Vec<Value> = e
        .to_words()
        .into_iter()
        .map(|w| Value::Array(w.into_iter().map(Value::String).collect()))
        .collect();
    Value::Array(words)
}

fn words_from_value_at(
    ring: &Arc<DGAlgebra>,
    v: &Value,
    path: &str,
) -> Result<Option<AlgElement>> {
    let words = as_array(v, path)?;
    let mut acc: Option<AlgElement> = None;
    for (i, wv) in words.iter().enumerate() {
        let p = format!("{path}[{i}]");
        let letters = as_array(wv, &p)?
            .iter()
            .enumerate()
            .map(|(j, lv)| Ok(as_str(lv, &format!("{p}[{j}]"))?.to_string()))
            .collect::<Result<Vec<String>>>()?;
        let word = ring.parse_word(&letters)?;
        acc = Some(match acc {
            None => word,
            Some(prev) => prev.add(&word)?,
        });
    }
    Ok(acc.filter(|e| !e.is_zero()))
}

fn entry_key_split(key: &str, path: &str) -> Result<(String, String)> {
    let mut parts = key.split('|');
    match (parts.next(), parts.next(), parts.next()) {
        (Some(x), Some(y), None) if !x.is_empty() && !y.is_empty() => {
            Ok((x.to_string(), y.to_string()))
        }
        _ => Err(schema(path, "entry keys have the form \"x|y\"")),
    }
}

fn entry_map_from_value(
    ring: &Arc<DGAlgebra>,
    v: &Value,
    path: &str,
) -> Result<Vec<((String, String), AlgElement)>> {
    let mut entries = Vec::new();
    for (key, words_v) in as_obj(v, path)? {
        let p = format!("{path}.{key}");
        let (x, y) = entry_key_split(key, &p)?;
        if let Some(e) = words_from_value_at(ring, words_v, &p)? {
            entries.push(((x, y), e));
        }
    }
    Ok(entries)
}

// --------------------------------------------------------------------
// systems

/// Export needs the ring's recipe alongside the system, since a built
/// ring does not carry its construction.
pub fn system_to_value(sys: &GeneratorSystem, ring: &RingRecipe) -> Value {
    let generators: Vec<Value> = sys
        .generators()
        .iter()
        .map(|g| {
            let mut o = Map::new();
            o.insert("name".into(), json!(g.name));
            o.insert("mu".into(), json!(g.mu));
            if let Some(a) = g.action {
                o.insert("action".into(), json!(a));
            }
            Value::Object(o)
        })
        .collect();
    let mut a = Map::new();
    for ((x, y), e) in sys.entries_named() {
        a.insert(format!("{x}|{y}"), words_to_value(&e));
    }
    let mut out = Map::new();
    out.insert("ring".into(), ring.to_value());
    out.insert("generators".into(), Value::Array(generators));
    if !a.is_empty() {
        out.insert("A".into(), Value::Object(a));
    }
    Value::Object(out)
}

fn system_from_value_at(v: &Value, path: &str) -> Result<GeneratorSystem> {
    let o = as_obj(v, path)?;
    let ring = ring_from_value_at(get(o, "ring", path)?, &field_path(path, "ring"))?
        .build()?;
    let gpath = field_path(path, "generators");
    let gens_v = as_array(get(o, "generators", path)?, &gpath)?;
    let mut gens = Vec::new();
    for (i, gv) in gens_v.iter().enumerate() {
        let p = format!("{gpath}[{i}]");
        let go = as_obj(gv, &p)?;
        let name = as_str(get(go, "name", &p)?, &format!("{p}.name"))?;
        let mu = as_i64(get(go, "mu", &p)?, &format!("{p}.mu"))?;
        let action = match go.get("action") {
            None => None,
            Some(av) => Some(
                av.as_f64()
                    .ok_or_else(|| schema(&format!("{p}.action"), "expected a number"))?,
            ),
        };
        gens.push(Generator {
            name: name.to_string(),
            mu,
            action,
        });
    }
    let entries = match o.get("A") {
        None => Vec::new(),
        Some(av) => entry_map_from_value(&ring, av, &field_path(path, "A"))?,
    };
    GeneratorSystem::new(gens, ring, entries)
}

pub fn system_from_value(v: &Value) -> Result<GeneratorSystem> {
    system_from_value_at(v, "$")
}

// --------------------------------------------------------------------
// comparisons

pub fn comparison_from_value(v: &Value) -> Result<ComparisonData> {
    let o = as_obj(v, "$")?;
    let source = system_from_value_at(get(o, "source", "$")?, "source")?;
    let target = system_from_value_at(get(o, "target", "$")?, "target")?;
    let shift = match o.get("shift") {
        None => 0,
        Some(sv) => as_i64(sv, "shift")?,
    };
    let ring_map = match o.get("ring_map") {
        None => None,
        Some(mv) => {
            let mo = as_obj(mv, "ring_map")?;
            let mut images = Vec::new();
            for (gen, words_v) in mo {
                let p = format!("ring_map.{gen}");
                let img = words_from_value_at(target.ring(), words_v, &p)?;
                let img = match img {
                    Some(e) => e,
                    None => {
                        // A zero image still needs its degree, which comes
                        // from the source generator.
                        let d = source
                            .ring()
                            .generator(gen)
                            .map(|e| e.degree())
                            .map_err(|_| schema(&p, "unknown source ring generator"))?;
                        target.ring().zero(d)
                    }
                };
                images.push((gen.clone(), img));
            }
            Some(DgaMorphism::new(source.ring(), target.ring(), images)?)
        }
    };
    let b = entry_map_from_value(target.ring(), get(o, "B", "$")?, "B")?;
    ComparisonData::new(source, target, ring_map, shift, b)
}

// --------------------------------------------------------------------
// pages

pub fn pages_to_value(ps: &PageSet) -> Value {
    let pages: Vec<Value> = ps
        .pages
        .iter()
        .map(|page| {
            let cells: Vec<Value> = page
                .cells
                .iter()
                .map(|(&(p, q), cell)| {
                    json!({
                        "p": p,
                        "q": q,
                        "dim": cell.dim,
                        "d_rank": cell.d_rank,
                        "certified": cell.certified,
                    })
                })
                .collect();
            json!({"r": page.r, "cells": cells})
        })
        .collect();
    json!({
        "filt_min": ps.filt_min,
        "filt_max": ps.filt_max,
        "n_min": ps.n_min,
        "n_max": ps.n_max,
        "pages": pages,
    })
}

pub fn pages_from_value(v: &Value) -> Result<PageSet> {
    let o = as_obj(v, "$")?;
    let mut pages = Vec::new();
    let pages_v = as_array(get(o, "pages", "$")?, "pages")?;
    for (i, pv) in pages_v.iter().enumerate() {
        let p = format!("pages[{i}]");
        let po = as_obj(pv, &p)?;
        let r = as_i64(get(po, "r", &p)?, &format!("{p}.r"))?;
        let mut cells = BTreeMap::new();
        let cpath = format!("{p}.cells");
        for (j, cv) in as_array(get(po, "cells", &p)?, &cpath)?.iter().enumerate() {
            let cp = format!("{cpath}[{j}]");
            let co = as_obj(cv, &cp)?;
            let key = (
                as_i64(get(co, "p", &cp)?, &format!("{cp}.p"))?,
                as_i64(get(co, "q", &cp)?, &format!("{cp}.q"))?,
            );
            let cell = Cell {
                dim: as_usize(get(co, "dim", &cp)?, &format!("{cp}.dim"))?,
                d_rank: as_usize(get(co, "d_rank", &cp)?, &format!("{cp}.d_rank"))?,
                certified: as_bool(get(co, "certified", &cp)?, &format!("{cp}.certified"))?,
            };
            if cells.insert(key, cell).is_some() {
                return Err(schema(&cp, "duplicate cell position"));
            }
        }
        pages.push(Page { r, cells });
    }
    Ok(PageSet {
        pages,
        filt_min: as_i64(get(o, "filt_min", "$")?, "filt_min")?,
        filt_max: as_i64(get(o, "filt_max", "$")?, "filt_max")?,
        n_min: as_i64(get(o, "n_min", "$")?, "n_min")?,
        n_max: as_i64(get(o, "n_max", "$")?, "n_max")?,
    })
}

// --------------------------------------------------------------------
// recipes for the shipped examples

/// The shipped systems together with the ring recipes that re-create
/// their rings; names match the builtin listing.
pub fn shipped_system_recipes() -> Vec<(String, GeneratorSystem, RingRecipe)> {
    use crate::builtin::{
        s2xs2_coalgebra, shipped_systems, BUILTIN_CAP, VARIANT_CAP,
    };
    let recipe_of = |name: &str| -> RingRecipe {
        match name {
            "sphere2" | "sphere3" | "sphere4" | "sphere5" => RingRecipe::Cobar {
                coalgebra: DGCoalgebra::sphere(
                    name.trim_start_matches("sphere").parse().expect("digit"),
                ),
                cap: BUILTIN_CAP,
            },
            "s2xs2_product" => RingRecipe::Tensor {
                factors: vec![
                    RingRecipe::Cobar {
                        coalgebra: DGCoalgebra::sphere(2),
                        cap: BUILTIN_CAP,
                    },
                    RingRecipe::Cobar {
                        coalgebra: DGCoalgebra::sphere(2),
                        cap: BUILTIN_CAP,
                    },
                ],
            },
            "s2xs2_cobar" => RingRecipe::Cobar {
                coalgebra: s2xs2_coalgebra(),
                cap: VARIANT_CAP,
            },
            "point" => RingRecipe::Cobar {
                coalgebra: DGCoalgebra::new(
                    &[("e".to_string(), 0)],
                    &BTreeMap::new(),
                    &BTreeMap::new(),
                )
                .expect("the point coalgebra is valid"),
                cap: BUILTIN_CAP,
            },
            other => unreachable!("no recipe for builtin `{other}`"),
        }
    };
    shipped_systems()
        .into_iter()
        .map(|(name, sys)| {
            let recipe = recipe_of(&name);
            (name, sys, recipe)
        })
        .collect()
}
