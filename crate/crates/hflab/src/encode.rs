//! Ordered pairs, tuples, quotients, and class constructions.
//!
//! Three pairings live here. Kuratowski pairs {{a},{a,b}} are the workhorse
//! and the basis for function graphs, which encode indexed tuples. Leveled
//! pairs push a pairing through k membership layers. Star pairs are the
//! unique fixpoint of (A,B)* = {(0,x)* | x in A} union {(1,y)* | y in B};
//! they commute with the membership structure, which is what makes the
//! rank-minimal quotient representatives below work.

use std::collections::{BTreeMap, HashMap};
use std::collections::btree_map::Entry;
use std::sync::{Mutex, OnceLock};

use serde::Serialize;

use crate::budget::Budget;
use crate::error::Error;
use crate::set::{canon, SetTerm};

/// Finite indexed family: index term to value term, deterministic order.
pub type Family = BTreeMap<SetTerm, SetTerm>;

// ---- Kuratowski pairs and function graphs ---- //

/// {{a},{a,b}}; collapses to {{a}} when a = b.
pub fn kpair(a: SetTerm, b: SetTerm) -> SetTerm {
    canon(vec![SetTerm::singleton(a), SetTerm::doubleton(a, b)])
}

/// Inverse of `kpair` where one exists. Decoding is unambiguous: a pair term
/// has either a lone singleton child or a singleton plus a doubleton sharing
/// its element.
pub fn kunpair(z: SetTerm) -> Option<(SetTerm, SetTerm)> {
    match z.children() {
        [c] if c.card() == 1 => {
            let a = c.children()[0];
            Some((a, a))
        }
        [c1, c2] => {
            let (s, d) = match (c1.card(), c2.card()) {
                (1, 2) => (c1, c2),
                (2, 1) => (c2, c1),
                _ => return None,
            };
            let a = s.children()[0];
            let [u, v] = d.children() else { return None };
            if *u == a {
                Some((a, *v))
            } else if *v == a {
                Some((a, *u))
            } else {
                None
            }
        }
        _ => None,
    }
}

/// Graph of a finite map: the set of Kuratowski pairs (index, value).
pub fn function_graph(map: &Family) -> SetTerm {
    canon(map.iter().map(|(&k, &v)| kpair(k, v)).collect())
}

/// Reads a term back as a finite map. Requires every element to decode as a
/// pair and first components to be pairwise distinct.
pub fn as_function_graph(z: SetTerm) -> Option<Family> {
    let mut map = Family::new();
    for &el in z.children() {
        let (k, v) = kunpair(el)?;
        match map.entry(k) {
            Entry::Vacant(slot) => {
                slot.insert(v);
            }
            Entry::Occupied(_) => return None,
        }
    }
    Some(map)
}

/// Domain of a graph term, as a set.
pub fn graph_dom(map: &Family) -> SetTerm {
    canon(map.keys().copied().collect())
}

/// Image of a graph term, as a set.
pub fn graph_image(map: &Family) -> SetTerm {
    canon(map.values().copied().collect())
}

// ---- Leveled pairs and tuples ---- //

/// Level-k pair: level 0 is Kuratowski; level k+1 tags the elements,
/// (A,B)^{k+1} = {(0,x)^k | x in A} union {(1,y)^k | y in B}.
pub fn pair_level(k: u32, a: SetTerm, b: SetTerm) -> SetTerm {
    if k == 0 {
        return kpair(a, b);
    }
    let zero = SetTerm::numeral(0);
    let one = SetTerm::numeral(1);
    let mut children = Vec::with_capacity(a.card() + b.card());
    for &x in a.children() {
        children.push(pair_level(k - 1, zero, x));
    }
    for &y in b.children() {
        children.push(pair_level(k - 1, one, y));
    }
    canon(children)
}

/// Level-k tuple of a family: level 0 is the plain function graph; level
/// k+1 is {(i,x)^k | i an index, x in the value at i}.
pub fn tuple_level(k: u32, fam: &Family) -> SetTerm {
    if k == 0 {
        return function_graph(fam);
    }
    let mut children = Vec::new();
    for (&i, &a_i) in fam {
        for &x in a_i.children() {
            children.push(pair_level(k - 1, i, x));
        }
    }
    canon(children)
}

// ---- Star pairs ---- //

static STAR_MEMO: OnceLock<Mutex<HashMap<(SetTerm, SetTerm), SetTerm>>> = OnceLock::new();

fn star_memo() -> &'static Mutex<HashMap<(SetTerm, SetTerm), SetTerm>> {
    STAR_MEMO.get_or_init(|| Mutex::new(HashMap::new()))
}

/// The unique pairing satisfying (A,B)* = {(0,x)* | x in A} union
/// {(1,y)* | y in B}. Recursive calls descend in component rank, so the
/// memoized recursion terminates.
pub fn star_pair(a: SetTerm, b: SetTerm) -> SetTerm {
    if let Some(&hit) = star_memo().lock().expect("star memo poisoned").get(&(a, b)) {
        return hit;
    }
    let zero = SetTerm::numeral(0);
    let one = SetTerm::numeral(1);
    let mut children = Vec::with_capacity(a.card() + b.card());
    for &x in a.children() {
        children.push(star_pair(zero, x));
    }
    for &y in b.children() {
        children.push(star_pair(one, y));
    }
    let result = canon(children);
    star_memo().lock().expect("star memo poisoned").insert((a, b), result);
    result
}

/// Recognizes star-pair images and inverts them. Elements of (1,y)* always
/// contain the empty set ((0,{}))* = {} is a member) and elements of (0,x)*
/// never do, so the two element kinds cannot be confused.
pub fn star_unpair(z: SetTerm) -> Option<(SetTerm, SetTerm)> {
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for &el in z.children() {
        if el.contains(SetTerm::empty()) {
            ys.push(decode_star_tag1(el)?);
        } else {
            xs.push(decode_star_tag0(el)?);
        }
    }
    let a = canon(xs);
    let b = canon(ys);
    (star_pair(a, b) == z).then_some((a, b))
}

/// y such that (1,y)* = v, if any.
fn decode_star_tag1(v: SetTerm) -> Option<SetTerm> {
    if !v.contains(SetTerm::empty()) {
        return None;
    }
    let mut elems = Vec::new();
    for &w in v.children() {
        if w.is_empty() {
            continue;
        }
        elems.push(decode_star_tag1(w)?);
    }
    let y = canon(elems);
    (star_pair(SetTerm::numeral(1), y) == v).then_some(y)
}

/// x such that (0,x)* = u, if any.
fn decode_star_tag0(u: SetTerm) -> Option<SetTerm> {
    let mut elems = Vec::new();
    for &w in u.children() {
        elems.push(decode_star_tag1(w)?);
    }
    let x = canon(elems);
    (star_pair(SetTerm::numeral(0), x) == u).then_some(x)
}

// ---- Canonical element choice ---- //

/// How a canonical datum is chosen from a nonempty set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ThetaMode {
    /// The set of elements of least rank (a nonempty subset).
    Scott,
    /// The Ackermann-least element (a member).
    Choice,
}

impl std::fmt::Display for ThetaMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ThetaMode::Scott => f.write_str("scott"),
            ThetaMode::Choice => f.write_str("choice"),
        }
    }
}

/// Canonical datum of a nonempty set. Scott mode returns the least-rank
/// layer (theta X is a subset of X); choice mode returns the code-least
/// element (theta X is a member of X). Disjoint nonempty sets always get
/// distinct values, which is the separation property quotients rely on.
pub fn theta(x: SetTerm, mode: ThetaMode) -> Result<SetTerm, Error> {
    if x.is_empty() {
        return Err(Error::EmptyTheta);
    }
    match mode {
        ThetaMode::Scott => {
            let least = x.children().iter().map(|c| c.rank()).min().expect("nonempty");
            Ok(canon(
                x.children().iter().copied().filter(|c| c.rank() == least).collect(),
            ))
        }
        ThetaMode::Choice => Ok(x.children()[0]),
    }
}

// ---- Equivalence relations and starred quotients ---- //

/// A validated equivalence relation on a finite carrier.
#[derive(Debug, Clone)]
pub struct EquivRelation {
    carrier: SetTerm,
    pairs: std::collections::BTreeSet<(SetTerm, SetTerm)>,
}

impl EquivRelation {
    /// Validates reflexivity, symmetry, and transitivity over the carrier.
    pub fn new(
        carrier: SetTerm,
        pairs: impl IntoIterator<Item = (SetTerm, SetTerm)>,
    ) -> Result<Self, Error> {
        let pairs: std::collections::BTreeSet<(SetTerm, SetTerm)> = pairs.into_iter().collect();
        for &(x, y) in &pairs {
            if !carrier.contains(x) || !carrier.contains(y) {
                return Err(Error::NotEquivalence(format!(
                    "pair ({}, {}) leaves the carrier",
                    x, y
                )));
            }
        }
        for &x in carrier.children() {
            if !pairs.contains(&(x, x)) {
                return Err(Error::NotEquivalence(format!("not reflexive at {}", x)));
            }
        }
        for &(x, y) in &pairs {
            if !pairs.contains(&(y, x)) {
                return Err(Error::NotEquivalence(format!(
                    "not symmetric at ({}, {})",
                    x, y
                )));
            }
        }
        for &(x, y) in &pairs {
            for &z in carrier.children() {
                if pairs.contains(&(y, z)) && !pairs.contains(&(x, z)) {
                    return Err(Error::NotEquivalence(format!(
                        "not transitive at ({}, {}, {})",
                        x, y, z
                    )));
                }
            }
        }
        Ok(EquivRelation { carrier, pairs })
    }

    /// Reads a relation from a term whose elements are Kuratowski pairs.
    pub fn from_term(carrier: SetTerm, rel: SetTerm) -> Result<Self, Error> {
        let mut pairs = Vec::with_capacity(rel.card());
        for &el in rel.children() {
            let (x, y) = kunpair(el).ok_or(Error::BadShape {
                expected: "a set of Kuratowski pairs",
                term: el.to_string(),
            })?;
            pairs.push((x, y));
        }
        EquivRelation::new(carrier, pairs)
    }

    /// The diagonal relation.
    pub fn identity(carrier: SetTerm) -> Self {
        let pairs = carrier.children().iter().map(|&x| (x, x)).collect();
        EquivRelation { carrier, pairs }
    }

    pub fn carrier(&self) -> SetTerm {
        self.carrier
    }

    pub fn related(&self, x: SetTerm, y: SetTerm) -> bool {
        self.pairs.contains(&(x, y))
    }

    /// {y in carrier | (x, y) in R}.
    pub fn block(&self, x: SetTerm) -> SetTerm {
        canon(
            self.carrier
                .children()
                .iter()
                .copied()
                .filter(|&y| self.related(x, y))
                .collect(),
        )
    }

    /// The relation as a set of Kuratowski pairs.
    pub fn as_term(&self) -> SetTerm {
        canon(self.pairs.iter().map(|&(x, y)| kpair(x, y)).collect())
    }
}

/// Starred quotient: the set of canonical data of the blocks,
/// {theta {y in A | (x,y) in R} | x in A}. Because theta separates disjoint
/// nonempty sets, the result has exactly one element per block.
pub fn quotient_star(a: SetTerm, r: &EquivRelation, mode: ThetaMode) -> Result<SetTerm, Error> {
    if r.carrier() != a {
        return Err(Error::NotEquivalence(format!(
            "relation carrier {} is not the quotient carrier {}",
            r.carrier(),
            a
        )));
    }
    let mut reps = Vec::with_capacity(a.card());
    for &x in a.children() {
        reps.push(theta(r.block(x), mode)?);
    }
    Ok(canon(reps))
}

// ---- Class constructions ---- //

/// Tagged disjoint union {(0,b)} union {(1,c)}.
pub fn class_sum(b: SetTerm, c: SetTerm) -> SetTerm {
    let zero = SetTerm::numeral(0);
    let one = SetTerm::numeral(1);
    let mut children = Vec::with_capacity(b.card() + c.card());
    for &x in b.children() {
        children.push(kpair(zero, x));
    }
    for &y in c.children() {
        children.push(kpair(one, y));
    }
    canon(children)
}

/// Binary product {(b,c)} as Kuratowski pairs.
pub fn class_prod(b: SetTerm, c: SetTerm) -> SetTerm {
    let mut children = Vec::with_capacity(b.card() * c.card());
    for &x in b.children() {
        for &y in c.children() {
            children.push(kpair(x, y));
        }
    }
    canon(children)
}

/// Dependent sum {(b, x) | b in B, x in the value at b}. The family must
/// cover every element of `b_set`.
pub fn class_sigma(b_set: SetTerm, fam: &Family) -> Result<SetTerm, Error> {
    let mut children = Vec::new();
    for &b in b_set.children() {
        let c_b = fam.get(&b).ok_or_else(|| Error::MissingIndex(b.to_string()))?;
        for &x in c_b.children() {
            children.push(kpair(b, x));
        }
    }
    Ok(canon(children))
}

/// Dependent product: all choice tuples, encoded as function graphs with
/// domain `i_set`. The empty product is {empty graph}. Refuses products
/// larger than the budget's cardinality cap.
pub fn class_pi(i_set: SetTerm, fam: &Family, budget: &Budget) -> Result<SetTerm, Error> {
    let indices = i_set.children();
    let mut sizes: u128 = 1;
    for &i in indices {
        let b_i = fam.get(&i).ok_or_else(|| Error::MissingIndex(i.to_string()))?;
        sizes = sizes.saturating_mul(b_i.card() as u128);
    }
    if sizes > budget.max_product as u128 {
        return Err(Error::Budget {
            what: "dependent product cardinality".into(),
            limit: budget.max_product,
            actual: u64::try_from(sizes).ok(),
        });
    }
    if sizes == 0 {
        // An empty factor admits no choice functions.
        return Ok(SetTerm::empty());
    }
    let values: Vec<&'static [SetTerm]> = indices
        .iter()
        .map(|i| fam.get(i).expect("coverage checked").children())
        .collect();
    let mut graphs = Vec::with_capacity(sizes as usize);
    let mut counters = vec![0usize; indices.len()];
    'outer: loop {
        let choice: Family = indices
            .iter()
            .enumerate()
            .map(|(pos, &i)| (i, values[pos][counters[pos]]))
            .collect();
        graphs.push(function_graph(&choice));
        for pos in 0..counters.len() {
            counters[pos] += 1;
            if counters[pos] < values[pos].len() {
                continue 'outer;
            }
            counters[pos] = 0;
        }
        break;
    }
    Ok(canon(graphs))
}
