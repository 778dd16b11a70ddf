//! Finite categories as explicit tables: an object list, hom-sets of
//! morphism terms, a composition table, and identities. Morphism terms are
//! untagged (the same term may appear in several hom-sets); a morphism
//! handle carries its domain and codomain alongside the term.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::OnceLock;

use crate::budget::Budget;
use crate::encode::{as_function_graph, kpair, kunpair, tuple_level, Family};
use crate::error::Error;
use crate::hierarchy::is_k_class;
use crate::set::{canon, powerset, SetTerm};
use crate::universe::{is_class, is_small, UniverseSpec};

/// A morphism of a `FinCat`: the bare term plus the hom-set it is read in.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Mor {
    pub dom: SetTerm,
    pub cod: SetTerm,
    pub term: SetTerm,
}

impl fmt::Display for Mor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {} -> {}", self.term, self.dom, self.cod)
    }
}

/// Finite category presentation. `comp` is keyed `(g, f)` for the composite
/// g∘f and must be defined on exactly the composable pairs; all laws are
/// checked by `validate_category`, not by construction. Constructors in this
/// module list `objects` in ascending term order.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FinCat {
    pub objects: Vec<SetTerm>,
    pub homs: BTreeMap<(SetTerm, SetTerm), BTreeSet<SetTerm>>,
    pub comp: BTreeMap<(Mor, Mor), SetTerm>,
    pub ids: BTreeMap<SetTerm, SetTerm>,
}

fn empty_homset() -> &'static BTreeSet<SetTerm> {
    static EMPTY: OnceLock<BTreeSet<SetTerm>> = OnceLock::new();
    EMPTY.get_or_init(BTreeSet::new)
}

impl FinCat {
    /// Hom-set between two objects; absent keys read as empty.
    pub fn hom(&self, a: SetTerm, b: SetTerm) -> &BTreeSet<SetTerm> {
        self.homs.get(&(a, b)).unwrap_or_else(|| empty_homset())
    }

    /// Every morphism, in (dom, cod, term) order.
    pub fn mors(&self) -> Vec<Mor> {
        let mut out = Vec::new();
        for ((a, b), hs) in &self.homs {
            for &t in hs {
                out.push(Mor { dom: *a, cod: *b, term: t });
            }
        }
        out
    }

    pub fn mors_into(&self, c: SetTerm) -> Vec<Mor> {
        self.mors().into_iter().filter(|m| m.cod == c).collect()
    }

    pub fn mors_from(&self, c: SetTerm) -> Vec<Mor> {
        self.mors().into_iter().filter(|m| m.dom == c).collect()
    }

    pub fn id_mor(&self, a: SetTerm) -> Option<Mor> {
        let t = *self.ids.get(&a)?;
        Some(Mor { dom: a, cod: a, term: t })
    }

    /// Composite g∘f from the table; None when the pair is not composable
    /// or the table has no entry.
    pub fn compose(&self, g: Mor, f: Mor) -> Option<Mor> {
        if f.cod != g.dom {
            return None;
        }
        let t = *self.comp.get(&(g, f))?;
        Some(Mor { dom: f.dom, cod: g.cod, term: t })
    }

    /// Opposite category: hom and composition tables transposed, same terms.
    pub fn op(&self) -> FinCat {
        let homs = self
            .homs
            .iter()
            .map(|((a, b), hs)| ((*b, *a), hs.clone()))
            .collect();
        let flip = |m: &Mor| Mor { dom: m.cod, cod: m.dom, term: m.term };
        let comp = self
            .comp
            .iter()
            .map(|((g, f), h)| ((flip(f), flip(g)), *h))
            .collect();
        FinCat {
            objects: self.objects.clone(),
            homs,
            comp,
            ids: self.ids.clone(),
        }
    }

    /// Monomorphism test by left cancellation over all parallel pairs.
    pub fn is_monic(&self, m: Mor) -> bool {
        for &x in &self.objects {
            let fs: Vec<Mor> = self
                .hom(x, m.dom)
                .iter()
                .map(|&t| Mor { dom: x, cod: m.dom, term: t })
                .collect();
            for (i, &f1) in fs.iter().enumerate() {
                for &f2 in &fs[i + 1..] {
                    let c1 = self.compose(m, f1);
                    let c2 = self.compose(m, f2);
                    if c1.is_some() && c1 == c2 {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Epimorphism test by right cancellation, mirror of `is_monic`.
    pub fn is_epic(&self, m: Mor) -> bool {
        for &x in &self.objects {
            let gs: Vec<Mor> = self
                .hom(m.cod, x)
                .iter()
                .map(|&t| Mor { dom: m.cod, cod: x, term: t })
                .collect();
            for (i, &g1) in gs.iter().enumerate() {
                for &g2 in &gs[i + 1..] {
                    let c1 = self.compose(g1, m);
                    let c2 = self.compose(g2, m);
                    if c1.is_some() && c1 == c2 {
                        return false;
                    }
                }
            }
        }
        true
    }
}

// ---- Plain graph operations ---- //

/// Value of a function graph at a point.
pub fn apply_graph(g: SetTerm, x: SetTerm) -> Option<SetTerm> {
    for &el in g.children() {
        let (k, v) = kunpair(el)?;
        if k == x {
            return Some(v);
        }
    }
    None
}

/// Relational composite g∘f of two function graphs. Requires the image of f
/// to lie inside the domain of g.
pub fn compose_graphs(g: SetTerm, f: SetTerm) -> Option<SetTerm> {
    let f_map = as_function_graph(f)?;
    let g_map = as_function_graph(g)?;
    let mut out = Vec::with_capacity(f_map.len());
    for (x, fx) in f_map {
        let gfx = *g_map.get(&fx)?;
        out.push(kpair(x, gfx));
    }
    Some(canon(out))
}

/// Identity graph on the elements of a set.
pub fn identity_graph(a: SetTerm) -> SetTerm {
    canon(a.children().iter().map(|&x| kpair(x, x)).collect())
}

pub fn graph_is_injective(g: SetTerm) -> bool {
    match as_function_graph(g) {
        Some(map) => {
            let values: BTreeSet<SetTerm> = map.values().copied().collect();
            values.len() == map.len()
        }
        None => false,
    }
}

pub fn graph_is_surjective_onto(g: SetTerm, b: SetTerm) -> bool {
    match as_function_graph(g) {
        Some(map) => canon(map.values().copied().collect()) == b,
        None => false,
    }
}

/// All function graphs from `a` to `b`, in ascending term order. The count
/// is |b|^|a|, guarded by `budget.max_enum`.
pub fn graphs_between(a: SetTerm, b: SetTerm, budget: &Budget) -> Result<Vec<SetTerm>, Error> {
    let xs = a.children();
    let ys = b.children();
    if xs.is_empty() {
        return Ok(vec![SetTerm::empty()]);
    }
    if ys.is_empty() {
        return Ok(Vec::new());
    }
    let count = (ys.len() as u64).checked_pow(xs.len() as u32);
    match count {
        Some(c) if c <= budget.max_enum => {}
        _ => {
            return Err(Error::Budget {
                what: format!("enumeration of graphs {} -> {}", a, b),
                limit: budget.max_enum,
                actual: count,
            })
        }
    }
    let mut out = Vec::with_capacity(count.unwrap_or(0) as usize);
    let mut counters = vec![0usize; xs.len()];
    loop {
        let graph = canon(
            xs.iter()
                .zip(&counters)
                .map(|(&x, &i)| kpair(x, ys[i]))
                .collect(),
        );
        out.push(graph);
        let mut pos = 0;
        loop {
            if pos == counters.len() {
                out.sort();
                return Ok(out);
            }
            counters[pos] += 1;
            if counters[pos] < ys.len() {
                break;
            }
            counters[pos] = 0;
            pos += 1;
        }
    }
}

// ---- Constructors ---- //

fn sorted_distinct(mut objects: Vec<SetTerm>) -> Vec<SetTerm> {
    objects.sort();
    objects.dedup();
    objects
}

/// Discrete category: identities only.
pub fn discrete(objects: Vec<SetTerm>) -> FinCat {
    let objects = sorted_distinct(objects);
    let mut homs = BTreeMap::new();
    let mut comp = BTreeMap::new();
    let mut ids = BTreeMap::new();
    for &a in &objects {
        let id = identity_graph(a);
        for &b in &objects {
            let hs = if a == b {
                BTreeSet::from([id])
            } else {
                BTreeSet::new()
            };
            homs.insert((a, b), hs);
        }
        let m = Mor { dom: a, cod: a, term: id };
        comp.insert((m, m), id);
        ids.insert(a, id);
    }
    FinCat { objects, homs, comp, ids }
}

/// Linear order on n objects, realized on the von Neumann numerals 0..n with
/// the morphism a -> b (a <= b) presented by the Kuratowski pair (a, b).
pub fn chain_poset(n: u32) -> FinCat {
    let obs: Vec<SetTerm> = (0..n as usize).map(SetTerm::numeral).collect();
    let arrow = |a: usize, b: usize| kpair(obs[a], obs[b]);
    let mor = |a: usize, b: usize| Mor { dom: obs[a], cod: obs[b], term: arrow(a, b) };
    let mut homs = BTreeMap::new();
    let mut comp = BTreeMap::new();
    let mut ids = BTreeMap::new();
    for a in 0..n as usize {
        ids.insert(obs[a], arrow(a, a));
        for b in 0..n as usize {
            let hs = if a <= b {
                BTreeSet::from([arrow(a, b)])
            } else {
                BTreeSet::new()
            };
            homs.insert((obs[a], obs[b]), hs);
        }
    }
    for a in 0..n as usize {
        for b in a..n as usize {
            for c in b..n as usize {
                comp.insert((mor(b, c), mor(a, b)), arrow(a, c));
            }
        }
    }
    FinCat { objects: obs, homs, comp, ids }
}

/// Two objects, one arrow between them.
pub fn walking_arrow() -> FinCat {
    chain_poset(2)
}

/// Full category of function graphs on the given object sets.
pub fn finset_on(objects: Vec<SetTerm>, budget: &Budget) -> Result<FinCat, Error> {
    let objects = sorted_distinct(objects);
    let mut homs: BTreeMap<(SetTerm, SetTerm), BTreeSet<SetTerm>> = BTreeMap::new();
    let mut ids = BTreeMap::new();
    for &a in &objects {
        ids.insert(a, identity_graph(a));
        for &b in &objects {
            let graphs = graphs_between(a, b, budget)?;
            homs.insert((a, b), graphs.into_iter().collect());
        }
    }
    let mut comp = BTreeMap::new();
    for &a in &objects {
        for &b in &objects {
            for &c in &objects {
                for &ft in &homs[&(a, b)] {
                    for &gt in &homs[&(b, c)] {
                        let h = compose_graphs(gt, ft).expect("graphs compose within finset_on");
                        let g = Mor { dom: b, cod: c, term: gt };
                        let f = Mor { dom: a, cod: b, term: ft };
                        comp.insert((g, f), h);
                    }
                }
            }
        }
    }
    Ok(FinCat { objects, homs, comp, ids })
}

/// Full finite skeleton of the category of small sets: objects are the von
/// Neumann numerals 0..=m, morphisms all function graphs.
pub fn finset_full(m: u32, budget: &Budget) -> Result<FinCat, Error> {
    finset_on((0..=m as usize).map(SetTerm::numeral).collect(), budget)
}

/// Full function-graph category on all subsets of the numeral m. Ambient
/// home for subset inclusions, whose domains are not themselves numerals.
pub fn finset_powerset(m: u32, budget: &Budget) -> Result<FinCat, Error> {
    let subsets = powerset(SetTerm::numeral(m as usize), budget)?;
    finset_on(subsets.children().to_vec(), budget)
}

// ---- Validation ---- //

/// Checks every category law exhaustively and reports the first violation:
/// object distinctness, hom keys over declared objects, identities present
/// and well-typed, composition defined on exactly the composable pairs and
/// landing in the right hom-set, identity laws, associativity.
pub fn validate_category(c: &FinCat) -> Result<(), String> {
    let mut seen = BTreeSet::new();
    for &o in &c.objects {
        if !seen.insert(o) {
            return Err(format!("duplicate object {}", o));
        }
    }
    for (a, b) in c.homs.keys() {
        if !seen.contains(a) || !seen.contains(b) {
            return Err(format!("hom({}, {}) declared between non-objects", a, b));
        }
    }
    for (a, t) in &c.ids {
        if !seen.contains(a) {
            return Err(format!("identity declared on non-object {}", a));
        }
        if !c.hom(*a, *a).contains(t) {
            return Err(format!("identity of {} is not in hom({}, {})", a, a, a));
        }
    }
    for &o in &c.objects {
        if !c.ids.contains_key(&o) {
            return Err(format!("missing identity on {}", o));
        }
    }
    let mors = c.mors();
    for ((g, f), h) in &c.comp {
        if !c.hom(f.dom, f.cod).contains(&f.term) || !c.hom(g.dom, g.cod).contains(&g.term) {
            return Err(format!("composition entry ({}, {}) over unknown morphisms", g, f));
        }
        if f.cod != g.dom {
            return Err(format!("composition entry ({}, {}) for a non-composable pair", g, f));
        }
        if !c.hom(f.dom, g.cod).contains(h) {
            return Err(format!(
                "composite {} of ({}, {}) is not in hom({}, {})",
                h, g, f, f.dom, g.cod
            ));
        }
    }
    for &f in &mors {
        for &g in &mors {
            if f.cod == g.dom && !c.comp.contains_key(&(g, f)) {
                return Err(format!("missing composite for ({}, {})", g, f));
            }
        }
    }
    for &f in &mors {
        let id_dom = c.id_mor(f.dom).expect("identities checked above");
        let id_cod = c.id_mor(f.cod).expect("identities checked above");
        if c.comp[&(f, id_dom)] != f.term {
            return Err(format!("right identity law fails at {}", f));
        }
        if c.comp[&(id_cod, f)] != f.term {
            return Err(format!("left identity law fails at {}", f));
        }
    }
    let mut by_dom: BTreeMap<SetTerm, Vec<Mor>> = BTreeMap::new();
    for &m in &mors {
        by_dom.entry(m.dom).or_default().push(m);
    }
    let none = Vec::new();
    for &e in &mors {
        for &f in by_dom.get(&e.cod).unwrap_or(&none) {
            let fe = c.compose(f, e).expect("totality checked above");
            for &g in by_dom.get(&f.cod).unwrap_or(&none) {
                let gf = c.compose(g, f).expect("totality checked above");
                let left = c.comp[&(g, fe)];
                let right = c.comp[&(gf, e)];
                if left != right {
                    return Err(format!(
                        "associativity fails at ({}, {}, {}): {} vs {}",
                        e, f, g, right, left
                    ));
                }
            }
        }
    }
    Ok(())
}

// ---- Size classification ---- //

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum SizeFlag {
    Holds,
    Fails { role: String, term: SetTerm },
}

impl SizeFlag {
    pub fn holds(&self) -> bool {
        matches!(self, SizeFlag::Holds)
    }
}

impl fmt::Display for SizeFlag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SizeFlag::Holds => write!(f, "yes"),
            SizeFlag::Fails { role, term } => write!(f, "no ({} {})", role, term),
        }
    }
}

/// Size verdict for a finite category under one universe: the object
/// collection and every hom-set judged as single terms. Small needs both
/// small; light needs the object collection to be a class and hom-sets
/// small; moderate needs classes on both sides, which coincides with
/// 1-moderate; k-moderate asks for k-classes on both sides, with 0-moderate
/// read as small.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SizeVerdict {
    pub universe: UniverseSpec,
    pub kmax: u32,
    pub small: SizeFlag,
    pub light: SizeFlag,
    pub moderate: SizeFlag,
    pub least_moderate_k: Option<u32>,
    pub kmax_witness: Option<(String, SetTerm)>,
}

impl fmt::Display for SizeVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "size verdict under {}", self.universe)?;
        writeln!(f, "  small: {}", self.small)?;
        writeln!(f, "  light: {}", self.light)?;
        writeln!(f, "  moderate: {}", self.moderate)?;
        match self.least_moderate_k {
            Some(k) => write!(f, "  least k-moderate: k = {}", k),
            None => {
                write!(f, "  not k-moderate for any k <= {}", self.kmax)?;
                if let Some((role, term)) = &self.kmax_witness {
                    write!(f, " ({} {})", role, term)?;
                }
                Ok(())
            }
        }
    }
}

fn component_terms(c: &FinCat) -> Vec<(String, SetTerm)> {
    let mut out = vec![("object collection".to_string(), canon(c.objects.clone()))];
    for ((a, b), hs) in &c.homs {
        out.push((format!("hom({}, {})", a, b), canon(hs.iter().copied().collect())));
    }
    out
}

fn first_failing(
    parts: &[(String, SetTerm)],
    mut pred: impl FnMut(SetTerm) -> bool,
) -> SizeFlag {
    for (role, term) in parts {
        if !pred(*term) {
            return SizeFlag::Fails { role: role.clone(), term: *term };
        }
    }
    SizeFlag::Holds
}

/// Classifies a valid category under `u`, searching k-moderation up to
/// `kmax`. The verdict chain small => light => moderate => k-moderate for
/// every k >= 1 holds by construction of the hierarchy predicates.
pub fn classify_category(c: &FinCat, u: UniverseSpec, kmax: u32) -> SizeVerdict {
    let parts = component_terms(c);
    let (ob_role, ob_term) = (&parts[0].0, parts[0].1);
    let small = first_failing(&parts, |t| is_small(t, u));
    let light = if !is_class(ob_term, u) {
        SizeFlag::Fails { role: ob_role.clone(), term: ob_term }
    } else {
        first_failing(&parts[1..], |t| is_small(t, u))
    };
    let moderate = first_failing(&parts, |t| is_class(t, u));
    let k_flag = |k: u32| -> SizeFlag {
        if k == 0 {
            first_failing(&parts, |t| is_small(t, u))
        } else {
            first_failing(&parts, |t| is_k_class(t, k, u))
        }
    };
    let mut least_moderate_k = None;
    for k in 0..=kmax {
        if k_flag(k).holds() {
            least_moderate_k = Some(k);
            break;
        }
    }
    let kmax_witness = match (&least_moderate_k, k_flag(kmax)) {
        (None, SizeFlag::Fails { role, term }) => Some((role, term)),
        _ => None,
    };
    SizeVerdict {
        universe: u,
        kmax,
        small,
        light,
        moderate,
        least_moderate_k,
        kmax_witness,
    }
}

// ---- Encoding ---- //

/// A morphism handle as a single term: ((dom, cod), term).
pub fn enc_mor(m: Mor) -> SetTerm {
    kpair(kpair(m.dom, m.cod), m.term)
}

pub fn dec_mor(t: SetTerm) -> Option<Mor> {
    let (dc, term) = kunpair(t)?;
    let (dom, cod) = kunpair(dc)?;
    Some(Mor { dom, cod, term })
}

/// Packages the four tables as one term: the level-1 tuple of the object
/// collection, the hom table, the composition table, and the identity
/// table, each table a set of Kuratowski-pair entries. Injective on valid
/// presentations; `decode_category` inverts it exactly.
pub fn encode_category(c: &FinCat) -> SetTerm {
    let ob = canon(c.objects.clone());
    let homs = canon(
        c.homs
            .iter()
            .map(|((a, b), hs)| kpair(kpair(*a, *b), canon(hs.iter().copied().collect())))
            .collect(),
    );
    let comp = canon(
        c.comp
            .iter()
            .map(|((g, f), h)| kpair(kpair(enc_mor(*g), enc_mor(*f)), *h))
            .collect(),
    );
    let ids = canon(c.ids.iter().map(|(&a, &t)| kpair(a, t)).collect());
    let mut fam = Family::new();
    for (i, part) in [ob, homs, comp, ids].into_iter().enumerate() {
        fam.insert(SetTerm::numeral(i), part);
    }
    tuple_level(1, &fam)
}

fn bad_shape(term: SetTerm) -> Error {
    Error::BadShape { expected: "encoded category", term: term.to_string() }
}

pub fn decode_category(t: SetTerm) -> Result<FinCat, Error> {
    let mut parts: [Vec<SetTerm>; 4] = Default::default();
    for &el in t.children() {
        let (tag, x) = kunpair(el).ok_or_else(|| bad_shape(t))?;
        let i = tag.as_numeral().ok_or_else(|| bad_shape(t))?;
        if i > 3 {
            return Err(bad_shape(t));
        }
        parts[i].push(x);
    }
    let objects = {
        let mut v = parts[0].clone();
        v.sort();
        v
    };
    let mut homs = BTreeMap::new();
    for &entry in &parts[1] {
        let (key, hs) = kunpair(entry).ok_or_else(|| bad_shape(t))?;
        let (a, b) = kunpair(key).ok_or_else(|| bad_shape(t))?;
        homs.insert((a, b), hs.children().iter().copied().collect());
    }
    let mut comp = BTreeMap::new();
    for &entry in &parts[2] {
        let (key, h) = kunpair(entry).ok_or_else(|| bad_shape(t))?;
        let (eg, ef) = kunpair(key).ok_or_else(|| bad_shape(t))?;
        let g = dec_mor(eg).ok_or_else(|| bad_shape(t))?;
        let f = dec_mor(ef).ok_or_else(|| bad_shape(t))?;
        comp.insert((g, f), h);
    }
    let mut ids = BTreeMap::new();
    for &entry in &parts[3] {
        let (a, id) = kunpair(entry).ok_or_else(|| bad_shape(t))?;
        ids.insert(a, id);
    }
    Ok(FinCat { objects, homs, comp, ids })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b() -> Budget {
        Budget::default()
    }

    fn nm(n: usize) -> SetTerm {
        SetTerm::numeral(n)
    }

    #[test]
    fn walking_arrow_shape() {
        let c = walking_arrow();
        assert_eq!(validate_category(&c), Ok(()));
        assert_eq!(c.hom(nm(0), nm(0)).len(), 1);
        assert_eq!(c.hom(nm(0), nm(1)).len(), 1);
        assert_eq!(c.hom(nm(1), nm(0)).len(), 0);
        assert_eq!(c.hom(nm(1), nm(1)).len(), 1);
        let f = Mor { dom: nm(0), cod: nm(1), term: kpair(nm(0), nm(1)) };
        let id0 = c.id_mor(nm(0)).unwrap();
        assert_eq!(c.compose(f, id0), Some(f));
    }

    #[test]
    fn chain_poset_composites() {
        let c = chain_poset(3);
        assert_eq!(validate_category(&c), Ok(()));
        assert_eq!(c.mors().len(), 6);
        let f01 = Mor { dom: nm(0), cod: nm(1), term: kpair(nm(0), nm(1)) };
        let f12 = Mor { dom: nm(1), cod: nm(2), term: kpair(nm(1), nm(2)) };
        let f02 = c.compose(f12, f01).unwrap();
        assert_eq!(f02.term, kpair(nm(0), nm(2)));
    }

    #[test]
    fn finset_full_1_hom_table() {
        let c = finset_full(1, &b()).unwrap();
        assert_eq!(validate_category(&c), Ok(()));
        let empty_graph = SetTerm::empty();
        assert_eq!(c.hom(nm(0), nm(0)).iter().copied().collect::<Vec<_>>(), vec![empty_graph]);
        assert_eq!(c.hom(nm(1), nm(0)).len(), 0);
        assert_eq!(c.hom(nm(0), nm(1)).iter().copied().collect::<Vec<_>>(), vec![empty_graph]);
        let id1 = identity_graph(nm(1));
        assert_eq!(c.hom(nm(1), nm(1)).iter().copied().collect::<Vec<_>>(), vec![id1]);
    }

    #[test]
    fn finset_full_counts_and_validation() {
        for m in 0..=3 {
            let c = finset_full(m, &b()).unwrap();
            assert_eq!(validate_category(&c), Ok(()), "m = {}", m);
        }
        let c = finset_full(2, &b()).unwrap();
        assert_eq!(c.hom(nm(2), nm(2)).len(), 4);
        assert_eq!(c.hom(nm(2), nm(1)).len(), 1);
        assert_eq!(c.hom(nm(1), nm(2)).len(), 2);
    }

    #[test]
    fn finset_powerset_validates() {
        let c = finset_powerset(2, &b()).unwrap();
        assert_eq!(c.objects.len(), 4);
        assert_eq!(validate_category(&c), Ok(()));
    }

    #[test]
    fn monic_iff_injective_in_finset() {
        let c = finset_full(2, &b()).unwrap();
        let op = c.op();
        assert_eq!(validate_category(&op), Ok(()));
        for m in c.mors() {
            assert_eq!(c.is_monic(m), graph_is_injective(m.term), "{}", m);
            let m_op = Mor { dom: m.cod, cod: m.dom, term: m.term };
            assert_eq!(c.is_monic(m), op.is_epic(m_op), "{}", m);
            assert_eq!(c.is_epic(m), graph_is_surjective_onto(m.term, m.cod), "{}", m);
        }
        assert_eq!(op.op(), c);
    }

    #[test]
    fn validate_reports_planted_violations() {
        let base = finset_full(2, &b()).unwrap();
        let c0 = canon(vec![kpair(nm(0), nm(0)), kpair(nm(1), nm(0))]);
        let c1 = canon(vec![kpair(nm(0), nm(1)), kpair(nm(1), nm(1))]);
        let id2 = identity_graph(nm(2));
        let m = |t: SetTerm| Mor { dom: nm(2), cod: nm(2), term: t };

        let mut assoc = base.clone();
        assoc.comp.insert((m(c1), m(c0)), id2);
        let err = validate_category(&assoc).unwrap_err();
        assert!(err.contains("associativity"), "{}", err);

        let mut noid = base.clone();
        noid.ids.remove(&nm(1));
        let err = validate_category(&noid).unwrap_err();
        assert!(err.contains("missing identity"), "{}", err);

        let mut stray = base.clone();
        let f01 = Mor { dom: nm(0), cod: nm(1), term: SetTerm::empty() };
        stray.comp.insert((f01, f01), SetTerm::empty());
        let err = validate_category(&stray).unwrap_err();
        assert!(err.contains("non-composable"), "{}", err);

        let mut unital = base.clone();
        let id2m = base.id_mor(nm(2)).unwrap();
        unital.comp.insert((m(c0), id2m), c1);
        let err = validate_category(&unital).unwrap_err();
        assert!(err.contains("right identity"), "{}", err);

        let mut dup = base.clone();
        dup.objects.push(nm(1));
        let err = validate_category(&dup).unwrap_err();
        assert!(err.contains("duplicate object"), "{}", err);

        let mut gap = base.clone();
        gap.comp.remove(&(m(c0), m(c0)));
        let err = validate_category(&gap).unwrap_err();
        assert!(err.contains("missing composite"), "{}", err);
    }

    #[test]
    fn encode_round_trips_and_separates() {
        let cats = vec![
            discrete(vec![SetTerm::empty()]),
            walking_arrow(),
            chain_poset(3),
            finset_full(2, &b()).unwrap(),
        ];
        let mut codes = BTreeSet::new();
        for c in &cats {
            let code = encode_category(c);
            assert_eq!(&decode_category(code).unwrap(), c);
            assert!(codes.insert(code), "encoding collision");
        }
        let empty = FinCat {
            objects: vec![],
            homs: BTreeMap::new(),
            comp: BTreeMap::new(),
            ids: BTreeMap::new(),
        };
        assert_eq!(encode_category(&empty), SetTerm::empty());
        assert_eq!(decode_category(SetTerm::empty()).unwrap(), empty);
        assert!(decode_category(nm(3)).is_err());
    }

    #[test]
    fn classify_finset_full_2_under_hf() {
        let c = finset_full(2, &b()).unwrap();
        let v = classify_category(&c, UniverseSpec::HF, 3);
        assert!(v.small.holds() && v.light.holds() && v.moderate.holds());
        assert_eq!(v.least_moderate_k, Some(0));
    }

    #[test]
    fn classify_finset_full_1_under_v1() {
        let c = finset_full(1, &b()).unwrap();
        let v = classify_category(&c, UniverseSpec::Vn(1), 3);
        match &v.small {
            SizeFlag::Fails { role, term } => {
                assert_eq!(role, "object collection");
                assert_eq!(*term, nm(2));
            }
            SizeFlag::Holds => panic!("ob collection {{0,1}} is not V1-small"),
        }
        assert!(!v.light.holds());
        assert!(!v.moderate.holds());
        assert_eq!(v.least_moderate_k, Some(2));
    }

    #[test]
    fn classify_discrete_on_empty_object() {
        let c = discrete(vec![SetTerm::empty()]);
        for u in [UniverseSpec::HF, UniverseSpec::Vn(2), UniverseSpec::Vn(5)] {
            let v = classify_category(&c, u, 2);
            assert!(v.small.holds(), "under {}", u);
            assert_eq!(v.least_moderate_k, Some(0));
        }
    }

    #[test]
    fn classify_consistency_chain() {
        let cats = vec![
            discrete(vec![SetTerm::empty(), nm(1)]),
            walking_arrow(),
            finset_full(2, &b()).unwrap(),
        ];
        for c in &cats {
            for u in [UniverseSpec::HF, UniverseSpec::Vn(1), UniverseSpec::Vn(3), UniverseSpec::Vn(6)] {
                let v = classify_category(c, u, 4);
                if v.small.holds() {
                    assert!(v.light.holds());
                    assert_eq!(v.least_moderate_k, Some(0));
                }
                if v.light.holds() {
                    assert!(v.moderate.holds());
                }
                if v.moderate.holds() {
                    assert!(v.least_moderate_k.map_or(false, |k| k <= 1));
                }
                if let Some(k0) = v.least_moderate_k {
                    let again = classify_category(c, u, 4);
                    assert_eq!(again.least_moderate_k, Some(k0));
                }
            }
        }
    }

    #[test]
    fn classify_finset_full_2_under_v3() {
        let c = finset_full(2, &b()).unwrap();
        let v = classify_category(&c, UniverseSpec::Vn(3), 4);
        assert!(!v.small.holds());
        assert!(!v.light.holds());
        assert_eq!(v.least_moderate_k, Some(2));
    }

    #[test]
    fn graphs_between_respects_budget() {
        let tight = Budget { max_enum: 3, ..Budget::default() };
        assert!(graphs_between(nm(2), nm(2), &tight).is_err());
        let graphs = graphs_between(nm(2), nm(2), &b()).unwrap();
        assert_eq!(graphs.len(), 4);
        assert!(graphs.windows(2).all(|w| w[0] < w[1]));
    }
}
