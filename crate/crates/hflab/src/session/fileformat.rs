//! Line-oriented file formats: category presentations and well-powering
//! declarations. Both use the term grammar for objects and indices, `#`
//! comments, and byte-offset parse errors.
//!
//! Category file:
//! ```text
//! category
//! objects: 0 1
//! hom 0 0: i0
//! hom 0 1: a
//! hom 1 1: i1
//! id 0 = i0
//! id 1 = i1
//! comp i0 i0 = i0
//! comp a i0 = a
//! comp i1 a = a
//! comp i1 i1 = i1
//! ```
//! Morphism names are globally unique idents; each is assigned the numeral
//! of its declaration position as its underlying term. `comp g f = h`
//! declares g after f.
//!
//! Well-powering file, resolved against a loaded category:
//! ```text
//! at 1:
//! index {} object 0 via e
//! index {{}} object 1 via i1
//! order {} <= {}
//! order {} <= {{}}
//! order {{}} <= {{}}
//! ```
//! `via` takes a morphism name from the category file, or a raw graph term
//! for function-graph categories; names win when both parse. The declared
//! order must list every holding pair, reflexive ones included.

use std::collections::{BTreeMap, BTreeSet};

use crate::budget::Budget;
use crate::cat::{FinCat, Mor};
use crate::error::Error;
use crate::set::SetTerm;
use crate::subobj::{WellPowering, WpEntry};
use crate::term::{Bindings, Cursor};

/// A category read from a presentation file, keeping the name table so
/// later files and reports can refer to morphisms by name.
#[derive(Debug)]
pub struct LoadedCat {
    pub cat: FinCat,
    pub mor_names: BTreeMap<String, Mor>,
    pub path: String,
}

fn err_at(base: usize, cur: &Cursor<'_>, msg: impl Into<String>) -> Error {
    Error::Parse { at: base + cur.pos(), msg: msg.into() }
}

/// Non-comment lines with their byte offsets.
fn meaningful_lines(text: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut offset = 0;
    for line in text.split_inclusive('\n') {
        let stripped = line.trim_end_matches(['\n', '\r']);
        let trimmed = stripped.trim();
        if !trimmed.is_empty() && !trimmed.starts_with('#') {
            out.push((offset, stripped));
        }
        offset += line.len();
    }
    out
}

pub fn parse_catfile(
    text: &str,
    path: &str,
    bindings: &Bindings,
    budget: &Budget,
) -> Result<LoadedCat, Error> {
    let lines = meaningful_lines(text);
    let Some(&(first_at, first)) = lines.first() else {
        return Err(Error::Parse { at: 0, msg: "empty category file".to_string() });
    };
    if first.trim() != "category" {
        return Err(Error::Parse {
            at: first_at,
            msg: "category file must start with a 'category' line".to_string(),
        });
    }

    let mut objects: Vec<SetTerm> = Vec::new();
    let mut mor_names: BTreeMap<String, Mor> = BTreeMap::new();
    let mut declared: Vec<(String, Mor)> = Vec::new();
    let mut id_lines: Vec<(usize, SetTerm, String)> = Vec::new();
    let mut comp_lines: Vec<(usize, String, String, String)> = Vec::new();

    for &(base, line) in &lines[1..] {
        let mut cur = Cursor::new(line);
        let Some(word) = cur.lex_word() else { continue };
        match word {
            "objects:" => {
                while !cur.at_end() {
                    objects.push(cur.parse_term(bindings, budget)?);
                }
            }
            "hom" => {
                let a = cur.parse_term(bindings, budget)?;
                let b = cur.parse_term(bindings, budget)?;
                cur.expect(':').map_err(|_| err_at(base, &cur, "hom line needs ':'"))?;
                while let Some(name) = cur.lex_ident() {
                    let term = SetTerm::numeral(declared.len());
                    let m = Mor { dom: a, cod: b, term };
                    if mor_names.insert(name.to_string(), m).is_some() {
                        return Err(err_at(
                            base,
                            &cur,
                            format!("morphism name '{}' declared twice", name),
                        ));
                    }
                    declared.push((name.to_string(), m));
                }
                if !cur.at_end() {
                    return Err(err_at(base, &cur, "expected morphism names"));
                }
            }
            "id" => {
                let a = cur.parse_term(bindings, budget)?;
                cur.expect('=')?;
                let name = cur
                    .lex_ident()
                    .ok_or_else(|| err_at(base, &cur, "id line needs a morphism name"))?;
                id_lines.push((base, a, name.to_string()));
                if !cur.at_end() {
                    return Err(err_at(base, &cur, "trailing input on id line"));
                }
            }
            "comp" => {
                let g = cur
                    .lex_ident()
                    .ok_or_else(|| err_at(base, &cur, "comp line needs morphism names"))?
                    .to_string();
                let f = cur
                    .lex_ident()
                    .ok_or_else(|| err_at(base, &cur, "comp line needs morphism names"))?
                    .to_string();
                cur.expect('=')?;
                let h = cur
                    .lex_ident()
                    .ok_or_else(|| err_at(base, &cur, "comp line needs a result name"))?
                    .to_string();
                comp_lines.push((base, g, f, h));
                if !cur.at_end() {
                    return Err(err_at(base, &cur, "trailing input on comp line"));
                }
            }
            other => {
                return Err(Error::Parse {
                    at: base,
                    msg: format!("unknown category file line '{}'", other),
                });
            }
        }
    }

    objects.sort();
    objects.dedup();
    let mut homs: BTreeMap<(SetTerm, SetTerm), BTreeSet<SetTerm>> = BTreeMap::new();
    for &a in &objects {
        for &b in &objects {
            homs.insert((a, b), BTreeSet::new());
        }
    }
    for (name, m) in &declared {
        let Some(set) = homs.get_mut(&(m.dom, m.cod)) else {
            return Err(Error::Parse {
                at: 0,
                msg: format!("morphism '{}' uses an undeclared object", name),
            });
        };
        set.insert(m.term);
    }

    let lookup = |at: usize, name: &str| {
        mor_names.get(name).copied().ok_or_else(|| Error::Parse {
            at,
            msg: format!("unknown morphism name '{}'", name),
        })
    };
    let mut ids = BTreeMap::new();
    for (at, a, name) in id_lines {
        let m = lookup(at, &name)?;
        if ids.insert(a, m.term).is_some() {
            return Err(Error::Parse { at, msg: format!("identity of {} declared twice", a) });
        }
    }
    let mut comp = BTreeMap::new();
    for (at, g, f, h) in comp_lines {
        let (g, f, h) = (lookup(at, &g)?, lookup(at, &f)?, lookup(at, &h)?);
        if comp.insert((g, f), h.term).is_some() {
            return Err(Error::Parse {
                at,
                msg: format!("composite of ({}, {}) declared twice", g, f),
            });
        }
    }

    Ok(LoadedCat {
        cat: FinCat { objects, homs, comp, ids },
        mor_names,
        path: path.to_string(),
    })
}

pub fn parse_wpfile(
    text: &str,
    loaded: &LoadedCat,
    bindings: &Bindings,
    budget: &Budget,
) -> Result<WellPowering, Error> {
    let mut families: BTreeMap<SetTerm, Vec<WpEntry>> = BTreeMap::new();
    let mut order: BTreeMap<SetTerm, BTreeSet<(SetTerm, SetTerm)>> = BTreeMap::new();
    let mut current: Option<SetTerm> = None;

    for (base, line) in meaningful_lines(text) {
        let mut cur = Cursor::new(line);
        let Some(word) = cur.lex_word() else { continue };
        match word {
            "at" => {
                let c = cur.parse_term(bindings, budget)?;
                cur.expect(':').map_err(|_| err_at(base, &cur, "at line needs ':'"))?;
                if !cur.at_end() {
                    return Err(err_at(base, &cur, "trailing input on at line"));
                }
                families.entry(c).or_default();
                order.entry(c).or_default();
                current = Some(c);
            }
            "index" => {
                let c = current
                    .ok_or_else(|| err_at(base, &cur, "index line before any 'at' section"))?;
                let index = cur.parse_term(bindings, budget)?;
                let kw = cur.lex_word();
                if kw != Some("object") {
                    return Err(err_at(base, &cur, "index line needs 'object <term>'"));
                }
                let object = cur.parse_term(bindings, budget)?;
                let kw = cur.lex_word();
                if kw != Some("via") {
                    return Err(err_at(base, &cur, "index line needs 'via <morphism>'"));
                }
                let mark = cur.pos();
                let mor = match cur.lex_ident().and_then(|n| loaded.mor_names.get(n)) {
                    Some(&m) => {
                        if m.dom != object || m.cod != c {
                            return Err(err_at(
                                base,
                                &cur,
                                format!(
                                    "morphism is {} -> {}, row declares {} -> {}",
                                    m.dom, m.cod, object, c
                                ),
                            ));
                        }
                        m
                    }
                    None => {
                        cur.rewind(mark);
                        let term = cur.parse_term(bindings, budget)?;
                        Mor { dom: object, cod: c, term }
                    }
                };
                if !cur.at_end() {
                    return Err(err_at(base, &cur, "trailing input on index line"));
                }
                families.get_mut(&c).expect("section opened").push(WpEntry {
                    index,
                    object,
                    mor,
                });
            }
            "order" => {
                let c = current
                    .ok_or_else(|| err_at(base, &cur, "order line before any 'at' section"))?;
                let lo = cur.parse_term(bindings, budget)?;
                if cur.lex_word() != Some("<=") {
                    return Err(err_at(base, &cur, "order line needs '<='"));
                }
                let hi = cur.parse_term(bindings, budget)?;
                if !cur.at_end() {
                    return Err(err_at(base, &cur, "trailing input on order line"));
                }
                order.get_mut(&c).expect("section opened").insert((lo, hi));
            }
            other => {
                return Err(Error::Parse {
                    at: base,
                    msg: format!("unknown well-powering line '{}'", other),
                });
            }
        }
    }
    Ok(WellPowering { families, order })
}
