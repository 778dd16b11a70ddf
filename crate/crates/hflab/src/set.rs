//! Canonical hereditarily finite set terms.
//!
//! Every term is interned: structurally equal terms share one node, so
//! equality is a pointer check and memo tables can key on node ids. Children
//! are stored strictly increasing under the Ackermann order, which makes the
//! stored form itself the canonical form.
//!
//! The Ackermann code N(x) = sum over y in x of 2^N(y) is a bijection between
//! the hereditarily finite sets and the naturals. Codes grow as towers, so the
//! order is compared structurally (largest differing element decides) and
//! codes are only materialized by the budget-guarded codec.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::{Mutex, OnceLock};

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::budget::Budget;
use crate::error::Error;

struct Node {
    /// Strictly increasing in the Ackermann order.
    children: Box<[SetTerm]>,
    rank: u32,
    id: u64,
}

/// An interned hereditarily finite set. Copyable handle; all structure lives
/// in the session-global intern store.
#[derive(Clone, Copy)]
pub struct SetTerm(&'static Node);

struct Interner {
    nodes: HashMap<Box<[SetTerm]>, SetTerm>,
    next_id: u64,
}

static INTERNER: OnceLock<Mutex<Interner>> = OnceLock::new();

fn interner() -> &'static Mutex<Interner> {
    INTERNER.get_or_init(|| {
        Mutex::new(Interner {
            nodes: HashMap::new(),
            next_id: 0,
        })
    })
}

/// Interns an already-canonical child list. Callers must pass children
/// strictly increasing in the Ackermann order.
fn intern_sorted(children: Vec<SetTerm>) -> SetTerm {
    let mut guard = interner().lock().expect("intern store poisoned");
    if let Some(&t) = guard.nodes.get(children.as_slice()) {
        return t;
    }
    let rank = children.iter().map(|c| c.rank() + 1).max().unwrap_or(0);
    let id = guard.next_id;
    guard.next_id += 1;
    let children: Box<[SetTerm]> = children.into_boxed_slice();
    let key = children.clone();
    let node: &'static Node = Box::leak(Box::new(Node { children, rank, id }));
    let term = SetTerm(node);
    guard.nodes.insert(key, term);
    term
}

/// Builds the set with the given elements: sorts, deduplicates, interns.
pub fn canon(mut children: Vec<SetTerm>) -> SetTerm {
    children.sort();
    children.dedup();
    intern_sorted(children)
}

impl SetTerm {
    /// The empty set.
    pub fn empty() -> SetTerm {
        canon(Vec::new())
    }

    /// {a}
    pub fn singleton(a: SetTerm) -> SetTerm {
        intern_sorted(vec![a])
    }

    /// {a, b} (collapses to {a} when a = b).
    pub fn doubleton(a: SetTerm, b: SetTerm) -> SetTerm {
        canon(vec![a, b])
    }

    /// Elements, strictly increasing in the Ackermann order.
    pub fn children(&self) -> &'static [SetTerm] {
        &self.0.children
    }

    /// Number of elements.
    pub fn card(&self) -> usize {
        self.0.children.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.children.is_empty()
    }

    /// Von Neumann rank: 0 for the empty set, else 1 + max child rank.
    pub fn rank(&self) -> u32 {
        self.0.rank
    }

    pub(crate) fn id(&self) -> u64 {
        self.0.id
    }

    /// Membership, by binary search in the canonical order.
    pub fn contains(&self, x: SetTerm) -> bool {
        self.0.children.binary_search(&x).is_ok()
    }

    pub fn is_subset_of(&self, other: SetTerm) -> bool {
        self.children().iter().all(|&c| other.contains(c))
    }

    /// Union of the two sets as a new term.
    pub fn union(self, other: SetTerm) -> SetTerm {
        let mut all: Vec<SetTerm> = self.children().to_vec();
        all.extend_from_slice(other.children());
        canon(all)
    }

    /// Union of all elements (the set-theoretic big union).
    pub fn union_all(self) -> SetTerm {
        let mut all = Vec::new();
        for c in self.children() {
            all.extend_from_slice(c.children());
        }
        canon(all)
    }

    /// Von Neumann numeral: 0 = {}, n+1 = n union {n}.
    pub fn numeral(n: usize) -> SetTerm {
        let mut elems: Vec<SetTerm> = Vec::with_capacity(n);
        for _ in 0..n {
            // Numeral codes increase with the numeral, so the list stays sorted.
            elems.push(intern_sorted(elems.clone()));
        }
        intern_sorted(elems)
    }

    /// If this term is a von Neumann numeral, its value.
    pub fn as_numeral(&self) -> Option<usize> {
        let n = self.card();
        (*self == SetTerm::numeral(n)).then_some(n)
    }
}

// ---- Ackermann order ---- //

/// Strict Ackermann order without materializing codes. N(x) < N(y) holds
/// exactly when the largest element of the symmetric difference lies in y,
/// i.e. descending child lists compare lexicographically.
pub fn ack_less(a: SetTerm, b: SetTerm) -> bool {
    ack_cmp(a, b) == Ordering::Less
}

fn ack_cmp(a: SetTerm, b: SetTerm) -> Ordering {
    if std::ptr::eq(a.0, b.0) {
        return Ordering::Equal;
    }
    for (x, y) in a.children().iter().rev().zip(b.children().iter().rev()) {
        if !std::ptr::eq(x.0, y.0) {
            return ack_cmp(*x, *y);
        }
    }
    // One descending list is a prefix of the other; the longer set carries
    // extra smaller elements, hence a larger code.
    a.card().cmp(&b.card())
}

impl PartialEq for SetTerm {
    fn eq(&self, other: &Self) -> bool {
        std::ptr::eq(self.0, other.0)
    }
}

impl Eq for SetTerm {}

impl PartialOrd for SetTerm {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(ack_cmp(*self, *other))
    }
}

impl Ord for SetTerm {
    fn cmp(&self, other: &Self) -> Ordering {
        ack_cmp(*self, *other)
    }
}

impl Hash for SetTerm {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.0.id.hash(state);
    }
}

// ---- Codec ---- //

/// Ackermann code of a term. Refuses terms whose code would exceed the
/// budget's bit bound (codes grow as towers in the rank).
pub fn ack_encode(x: SetTerm, budget: &Budget) -> Result<BigUint, Error> {
    let mut memo: HashMap<SetTerm, BigUint> = HashMap::new();
    encode_rec(x, budget, &mut memo)
}

fn encode_rec(
    x: SetTerm,
    budget: &Budget,
    memo: &mut HashMap<SetTerm, BigUint>,
) -> Result<BigUint, Error> {
    if let Some(c) = memo.get(&x) {
        return Ok(c.clone());
    }
    let mut code = BigUint::zero();
    for &child in x.children() {
        let c = encode_rec(child, budget, memo)?;
        if c.bits() > 64 || u64::try_from(&c).unwrap_or(u64::MAX) >= budget.max_code_bits {
            return Err(Error::Budget {
                what: "ackermann code bits".into(),
                limit: budget.max_code_bits,
                actual: None,
            });
        }
        code |= BigUint::one() << u64::try_from(&c).expect("checked above");
    }
    memo.insert(x, code.clone());
    Ok(code)
}

/// Term with the given Ackermann code. Refuses magnitudes beyond the
/// budget's bit bound.
pub fn ack_decode(n: &BigUint, budget: &Budget) -> Result<SetTerm, Error> {
    if n.bits() > budget.max_code_bits {
        return Err(Error::Budget {
            what: "ackermann decode magnitude bits".into(),
            limit: budget.max_code_bits,
            actual: Some(n.bits()),
        });
    }
    let mut memo: HashMap<u64, SetTerm> = HashMap::new();
    let mut children = Vec::new();
    for pos in 0..n.bits() {
        if n.bit(pos) {
            children.push(decode_pos(pos, &mut memo));
        }
    }
    // Bit positions ascend, and the code order extends the numeric order of
    // positions, so the list is already sorted.
    Ok(intern_sorted(children))
}

fn decode_pos(pos: u64, memo: &mut HashMap<u64, SetTerm>) -> SetTerm {
    if let Some(&t) = memo.get(&pos) {
        return t;
    }
    let mut children = Vec::new();
    for p in 0..64 {
        if pos >> p & 1 == 1 {
            children.push(decode_pos(p, memo));
        }
    }
    let t = intern_sorted(children);
    memo.insert(pos, t);
    t
}

// ---- Stages and powerset ---- //

/// Powerset as a term. Refuses inputs with more than the configured number
/// of children (2^k blowup guard).
pub fn powerset(x: SetTerm, budget: &Budget) -> Result<SetTerm, Error> {
    let k = x.card();
    if k > budget.max_powerset_input {
        return Err(Error::Budget {
            what: "powerset input children".into(),
            limit: budget.max_powerset_input as u64,
            actual: Some(k as u64),
        });
    }
    let elems = x.children();
    let mut subsets = Vec::with_capacity(1 << k);
    for mask in 0u32..(1 << k) {
        let picked: Vec<SetTerm> = (0..k)
            .filter(|i| mask >> i & 1 == 1)
            .map(|i| elems[i])
            .collect();
        subsets.push(intern_sorted(picked));
    }
    Ok(canon(subsets))
}

/// Cumulative stage V_n: V_0 = {}, V_{n+1} = powerset(V_n). The term
/// enumerating every set of rank < n.
pub fn v_stage(n: u32, budget: &Budget) -> Result<SetTerm, Error> {
    let mut v = SetTerm::empty();
    for _ in 0..n {
        v = powerset(v, budget)?;
    }
    Ok(v)
}

// ---- Rendering ---- //

impl fmt::Display for SetTerm {
    /// Raw brace syntax, children in canonical order. Reparses to the same
    /// term, which is what the round-trip law relies on.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, c) in self.children().iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{}", c)?;
        }
        f.write_str("}")
    }
}

impl fmt::Debug for SetTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl serde::Serialize for SetTerm {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}
