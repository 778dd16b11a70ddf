//! Mono-like subcategories, the preorder of member morphisms into an
//! object, starred subobject quotients, well-powerings and their duals with
//! full validation, recovery of the member predicate from a well-powering,
//! and the subobject-classifier check on finite set skeletons.

use std::collections::{BTreeMap, BTreeSet};

use crate::budget::Budget;
use crate::cat::{
    apply_graph, finset_full, finset_on, graph_is_injective, graph_is_surjective_onto,
    identity_graph, FinCat, Mor,
};
use crate::encode::{kpair, theta, EquivRelation, ThetaMode};
use crate::error::Error;
use crate::set::{canon, SetTerm};
use crate::universe::{is_small, UniverseSpec};

/// A wide subcategory presented by its member set. Pairs with a parent
/// `FinCat`, which every operation takes alongside it.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct MonoLikeSubcat {
    pub members: BTreeSet<Mor>,
}

/// Members are the morphisms whose graphs are injective.
pub fn injective_subcat(cat: &FinCat) -> MonoLikeSubcat {
    MonoLikeSubcat {
        members: cat.mors().into_iter().filter(|m| graph_is_injective(m.term)).collect(),
    }
}

/// Members are the morphisms whose graphs cover their codomain.
pub fn surjective_subcat(cat: &FinCat) -> MonoLikeSubcat {
    MonoLikeSubcat {
        members: cat
            .mors()
            .into_iter()
            .filter(|m| graph_is_surjective_onto(m.term, m.cod))
            .collect(),
    }
}

fn flip_mor(m: Mor) -> Mor {
    Mor { dom: m.cod, cod: m.dom, term: m.term }
}

fn flip_members(m: &MonoLikeSubcat) -> MonoLikeSubcat {
    MonoLikeSubcat { members: m.members.iter().map(|&x| flip_mor(x)).collect() }
}

/// Mono-like laws, checked exhaustively: wideness, every member monic by
/// left cancellation, closure under composition, and closure under right
/// factors of members.
pub fn validate_mono_like(cat: &FinCat, m: &MonoLikeSubcat) -> Result<(), String> {
    for &x in &m.members {
        if !cat.hom(x.dom, x.cod).contains(&x.term) {
            return Err(format!("member {} is not a morphism of the parent", x));
        }
    }
    for &o in &cat.objects {
        let id = cat.id_mor(o).expect("valid parent category");
        if !m.members.contains(&id) {
            return Err(format!("not wide: identity on {} is missing", o));
        }
    }
    for &x in &m.members {
        if !cat.is_monic(x) {
            return Err(format!("member {} is not monic", x));
        }
    }
    for &f in &m.members {
        for &g in &m.members {
            if f.cod == g.dom {
                let gf = cat.compose(g, f).expect("valid parent category");
                if !m.members.contains(&gf) {
                    return Err(format!("not closed under composition at ({}, {})", g, f));
                }
            }
        }
    }
    for f in cat.mors() {
        for g in cat.mors() {
            if f.cod != g.dom {
                continue;
            }
            let gf = cat.compose(g, f).expect("valid parent category");
            if m.members.contains(&gf) && !m.members.contains(&f) {
                return Err(format!(
                    "right factor {} of member {} is missing",
                    f, gf
                ));
            }
        }
    }
    Ok(())
}

/// Epi-like laws: the mirror of `validate_mono_like` under arrow reversal.
pub fn validate_epi_like(cat: &FinCat, e: &MonoLikeSubcat) -> Result<(), String> {
    validate_mono_like(&cat.op(), &flip_members(e))
}

// ---- The preorder of member morphisms into an object ---- //

/// All h with g∘h = f, the candidates mediating (dom f, f) into (dom g, g).
fn mediating(cat: &FinCat, f: Mor, g: Mor) -> Vec<Mor> {
    let mut out = Vec::new();
    for &ht in cat.hom(f.dom, g.dom) {
        let h = Mor { dom: f.dom, cod: g.dom, term: ht };
        if cat.compose(g, h).map(|c| c.term) == Some(f.term) {
            out.push(h);
        }
    }
    out
}

/// (dom f, f) is below (dom g, g) when some h factors f through g.
pub fn pair_leq(cat: &FinCat, f: Mor, g: Mor) -> bool {
    !mediating(cat, f, g).is_empty()
}

/// The pairs (x, f: x -> c) with f a member, preordered by factorization.
/// The pair at index i is `pairs[i]`, with its domain in `pairs[i].dom`.
#[derive(Clone, Debug)]
pub struct MOverC {
    pub c: SetTerm,
    pub pairs: Vec<Mor>,
    pub leq: BTreeSet<(usize, usize)>,
    pub blocks: Vec<Vec<usize>>,
}

impl MOverC {
    pub fn leq_idx(&self, i: usize, j: usize) -> bool {
        self.leq.contains(&(i, j))
    }

    pub fn block_of(&self, i: usize) -> usize {
        self.blocks
            .iter()
            .position(|b| b.contains(&i))
            .expect("blocks partition the pairs")
    }
}

/// Enumerates M/c and its preorder. Mediating morphisms are required to be
/// unique and members; a violation reports the offending pair and indicates
/// an invalid subcategory input.
pub fn m_over_c(cat: &FinCat, m: &MonoLikeSubcat, c: SetTerm) -> Result<MOverC, String> {
    let pairs: Vec<Mor> = m.members.iter().copied().filter(|x| x.cod == c).collect();
    let mut leq = BTreeSet::new();
    for (i, &f) in pairs.iter().enumerate() {
        for (j, &g) in pairs.iter().enumerate() {
            let hs = mediating(cat, f, g);
            match hs.len() {
                0 => {}
                1 => {
                    if !m.members.contains(&hs[0]) {
                        return Err(format!(
                            "mediating morphism {} for ({} <= {}) is not a member",
                            hs[0], f, g
                        ));
                    }
                    leq.insert((i, j));
                }
                _ => {
                    return Err(format!(
                        "mediating morphism for ({} <= {}) is not unique",
                        f, g
                    ));
                }
            }
        }
    }
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    let mut assigned = vec![false; pairs.len()];
    for i in 0..pairs.len() {
        if assigned[i] {
            continue;
        }
        let mut block = Vec::new();
        for j in i..pairs.len() {
            if !assigned[j] && leq.contains(&(i, j)) && leq.contains(&(j, i)) {
                assigned[j] = true;
                block.push(j);
            }
        }
        blocks.push(block);
    }
    Ok(MOverC { c, pairs, leq, blocks })
}

// ---- Starred subobjects ---- //

/// The starred subobject poset at c: pairs encoded as (domain, morphism
/// term), quotiented by mutual factorization with theta representatives,
/// carrying the induced partial order and the full block behind each
/// representative.
#[derive(Clone, Debug)]
pub struct SubsStar {
    pub c: SetTerm,
    pub term: SetTerm,
    pub order: BTreeSet<(SetTerm, SetTerm)>,
    pub blocks: BTreeMap<SetTerm, SetTerm>,
}

fn enc_pair(f: Mor) -> SetTerm {
    kpair(f.dom, f.term)
}

pub fn subs_star(
    cat: &FinCat,
    m: &MonoLikeSubcat,
    c: SetTerm,
    mode: ThetaMode,
) -> Result<SubsStar, Error> {
    let mo = m_over_c(cat, m, c).map_err(Error::Presentation)?;
    let encs: Vec<SetTerm> = mo.pairs.iter().map(|&f| enc_pair(f)).collect();
    let mut reps = Vec::with_capacity(mo.blocks.len());
    let mut blocks = BTreeMap::new();
    for block in &mo.blocks {
        let block_term = canon(block.iter().map(|&i| encs[i]).collect());
        let rep = theta(block_term, mode)?;
        reps.push(rep);
        blocks.insert(rep, block_term);
    }
    let mut order = BTreeSet::new();
    for (bi, block_i) in mo.blocks.iter().enumerate() {
        for (bj, block_j) in mo.blocks.iter().enumerate() {
            if mo.leq_idx(block_i[0], block_j[0]) {
                order.insert((reps[bi], reps[bj]));
                if bi != bj && mo.leq_idx(block_j[0], block_i[0]) {
                    return Err(Error::Presentation(format!(
                        "subobject order at {} is not antisymmetric",
                        c
                    )));
                }
            }
        }
    }
    Ok(SubsStar { c, term: canon(reps), order, blocks })
}

// ---- Well-powerings ---- //

/// One family row: the index term, the chosen domain object, and the
/// member morphism. Orientation is into c for well-powerings and out of c
/// for co-well-powerings.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct WpEntry {
    pub index: SetTerm,
    pub object: SetTerm,
    pub mor: Mor,
}

/// Per-object indexed families of unique representatives, with a declared
/// order on each family's indices (reflexive pairs included).
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct WellPowering {
    pub families: BTreeMap<SetTerm, Vec<WpEntry>>,
    pub order: BTreeMap<SetTerm, BTreeSet<(SetTerm, SetTerm)>>,
}

fn flip_well_powering(w: &WellPowering) -> WellPowering {
    let families = w
        .families
        .iter()
        .map(|(c, rows)| {
            let rows = rows
                .iter()
                .map(|r| WpEntry {
                    index: r.index,
                    object: r.object,
                    mor: flip_mor(r.mor),
                })
                .collect();
            (*c, rows)
        })
        .collect();
    WellPowering { families, order: w.order.clone() }
}

/// Smallness of each family's index set under the universe the validation
/// was asked about; separate from the representative laws.
#[derive(Clone, Debug)]
pub struct WpValidation {
    pub universe: UniverseSpec,
    pub index_smallness: BTreeMap<SetTerm, (SetTerm, bool)>,
}

impl WpValidation {
    pub fn all_small(&self) -> bool {
        self.index_smallness.values().all(|&(_, small)| small)
    }
}

/// Representative laws for a well-powering: a family at every object whose
/// rows are member pairs, every pair of M/c matched by exactly one index up
/// to mutual factorization, and the declared index order agreeing with the
/// factorization preorder. Index-set smallness under `u` is reported, not
/// enforced.
pub fn validate_well_powering(
    cat: &FinCat,
    m: &MonoLikeSubcat,
    w: &WellPowering,
    u: UniverseSpec,
) -> Result<WpValidation, String> {
    for c in w.families.keys() {
        if !cat.objects.contains(c) {
            return Err(format!("family declared at non-object {}", c));
        }
    }
    let mut index_smallness = BTreeMap::new();
    for &c in &cat.objects {
        let Some(rows) = w.families.get(&c) else {
            return Err(format!("no family at object {}", c));
        };
        let mut seen = BTreeSet::new();
        for r in rows {
            if !seen.insert(r.index) {
                return Err(format!("index {} listed twice at {}", r.index, c));
            }
            if r.mor.dom != r.object || r.mor.cod != c {
                return Err(format!("row {} at {} is not a morphism {} -> {}", r.mor, c, r.object, c));
            }
            if !cat.hom(r.object, c).contains(&r.mor.term) {
                return Err(format!("row morphism {} at {} is unknown", r.mor, c));
            }
            if !m.members.contains(&r.mor) {
                return Err(format!("row morphism {} at {} is not a member", r.mor, c));
            }
        }
        let mo = m_over_c(cat, m, c)?;
        for (i, &f) in mo.pairs.iter().enumerate() {
            let matches: Vec<&WpEntry> = rows
                .iter()
                .filter(|r| pair_leq(cat, f, r.mor) && pair_leq(cat, r.mor, f))
                .collect();
            match matches.len() {
                1 => {}
                0 => {
                    return Err(format!(
                        "existence fails at {}: pair {} (index {} of M/c) has no index",
                        c, f, i
                    ));
                }
                _ => {
                    return Err(format!(
                        "uniqueness fails at {}: pair {} matches indices {} and {}",
                        c, f, matches[0].index, matches[1].index
                    ));
                }
            }
        }
        let declared = w.order.get(&c).cloned().unwrap_or_default();
        for r1 in rows {
            for r2 in rows {
                let computed = pair_leq(cat, r1.mor, r2.mor);
                let stated = declared.contains(&(r1.index, r2.index));
                if computed != stated {
                    return Err(format!(
                        "order at {} disagrees on ({}, {}): computed {}, declared {}",
                        c, r1.index, r2.index, computed, stated
                    ));
                }
            }
        }
        let index_set = canon(rows.iter().map(|r| r.index).collect());
        index_smallness.insert(c, (index_set, is_small(index_set, u)));
    }
    Ok(WpValidation { universe: u, index_smallness })
}

/// Dual validation under arrow reversal on the same data.
pub fn validate_co_well_powering(
    cat: &FinCat,
    e: &MonoLikeSubcat,
    w: &WellPowering,
    u: UniverseSpec,
) -> Result<WpValidation, String> {
    validate_well_powering(&cat.op(), &flip_members(e), &flip_well_powering(w), u)
}

// ---- Canonical constructions on finite set skeletons ---- //

/// Subsets ordered by inclusion, with inclusion maps, over the full
/// function-graph category on all subsets of the numeral m. Every object's
/// family indexes its own subsets.
pub fn canonical_wp_finset(
    m: u32,
    budget: &Budget,
) -> Result<(FinCat, MonoLikeSubcat, WellPowering), Error> {
    let cat = crate::cat::finset_powerset(m, budget)?;
    let subcat = injective_subcat(&cat);
    let mut families = BTreeMap::new();
    let mut order = BTreeMap::new();
    for &c in &cat.objects {
        let subsets = crate::set::powerset(c, budget)?;
        let mut rows = Vec::new();
        let mut ord = BTreeSet::new();
        for &u_sub in subsets.children() {
            rows.push(WpEntry {
                index: u_sub,
                object: u_sub,
                mor: Mor { dom: u_sub, cod: c, term: identity_graph(u_sub) },
            });
            for &v_sub in subsets.children() {
                if u_sub.is_subset_of(v_sub) {
                    ord.insert((u_sub, v_sub));
                }
            }
        }
        families.insert(c, rows);
        order.insert(c, ord);
    }
    Ok((cat, subcat, WellPowering { families, order }))
}

/// Every partition of the elements, in a deterministic order, as validated
/// equivalence relations.
pub fn all_equiv_relations(carrier: SetTerm) -> Vec<EquivRelation> {
    let elems = carrier.children();
    let n = elems.len();
    let mut out = Vec::new();
    let mut labels = vec![0usize; n];
    fn rec(
        pos: usize,
        max_used: usize,
        labels: &mut Vec<usize>,
        elems: &[SetTerm],
        carrier: SetTerm,
        out: &mut Vec<EquivRelation>,
    ) {
        let n = elems.len();
        if pos == n {
            let mut pairs = Vec::new();
            for i in 0..n {
                for j in 0..n {
                    if labels[i] == labels[j] {
                        pairs.push((elems[i], elems[j]));
                    }
                }
            }
            out.push(
                EquivRelation::new(carrier, pairs).expect("partition induces an equivalence"),
            );
            return;
        }
        for label in 0..=max_used {
            labels[pos] = label;
            let next_max = if label == max_used { max_used + 1 } else { max_used };
            rec(pos + 1, next_max, labels, elems, carrier, out);
        }
    }
    if n == 0 {
        out.push(EquivRelation::identity(carrier));
        return out;
    }
    rec(0, 0, &mut labels, elems, carrier, &mut out);
    out
}

/// Quotient object of a relation: the set of its blocks.
pub fn quotient_object(r: &EquivRelation) -> SetTerm {
    canon(r.carrier().children().iter().map(|&x| r.block(x)).collect())
}

/// Projection graph x -> [x].
pub fn projection_graph(r: &EquivRelation) -> SetTerm {
    canon(
        r.carrier()
            .children()
            .iter()
            .map(|&x| kpair(x, r.block(x)))
            .collect(),
    )
}

/// Quotients indexed by equivalence relations, with reverse relation
/// inclusion as the index order, over a function-graph category whose
/// objects are the numerals 0..=m together with all their genuine quotient
/// partition sets. Families at the numerals use the partition quotients
/// and block projections; families at partition objects use numeral
/// representatives through block-position maps, which keeps the object set
/// finite while covering every object.
pub fn canonical_cowp_finset(
    m: u32,
    budget: &Budget,
) -> Result<(FinCat, MonoLikeSubcat, WellPowering), Error> {
    let numerals: Vec<SetTerm> = (0..=m as usize).map(SetTerm::numeral).collect();
    let mut objects: BTreeSet<SetTerm> = numerals.iter().copied().collect();
    for &c in &numerals {
        for r in all_equiv_relations(c) {
            objects.insert(quotient_object(&r));
        }
    }
    let cat = finset_on(objects.iter().copied().collect(), budget)?;
    let subcat = surjective_subcat(&cat);
    let mut families = BTreeMap::new();
    let mut order = BTreeMap::new();
    for &c in &cat.objects {
        let rels = all_equiv_relations(c);
        let mut rows = Vec::new();
        for r in &rels {
            let (object, graph) = if numerals.contains(&c) {
                (quotient_object(r), projection_graph(r))
            } else {
                let blocks = quotient_object(r);
                let position = |b: SetTerm| {
                    SetTerm::numeral(
                        blocks.children().iter().position(|&x| x == b).expect("own block"),
                    )
                };
                let graph = canon(
                    c.children()
                        .iter()
                        .map(|&x| kpair(x, position(r.block(x))))
                        .collect(),
                );
                (SetTerm::numeral(blocks.card()), graph)
            };
            rows.push(WpEntry {
                index: r.as_term(),
                object,
                mor: Mor { dom: c, cod: object, term: graph },
            });
        }
        let mut ord = BTreeSet::new();
        for r in &rels {
            for s in &rels {
                if s.as_term().is_subset_of(r.as_term()) {
                    ord.insert((r.as_term(), s.as_term()));
                }
            }
        }
        families.insert(c, rows);
        order.insert(c, ord);
    }
    Ok((cat, subcat, WellPowering { families, order }))
}

// ---- Uniqueness and recovery ---- //

fn inverses(cat: &FinCat, g: Mor) -> Vec<Mor> {
    let id_dom = cat.id_mor(g.dom).expect("valid category");
    let id_cod = cat.id_mor(g.cod).expect("valid category");
    let mut out = Vec::new();
    for &ht in cat.hom(g.cod, g.dom) {
        let h = Mor { dom: g.cod, cod: g.dom, term: ht };
        if cat.compose(h, g) == Some(id_dom) && cat.compose(g, h) == Some(id_cod) {
            out.push(h);
        }
    }
    out
}

fn is_iso(cat: &FinCat, g: Mor) -> bool {
    !inverses(cat, g).is_empty()
}

/// The matching between two validated well-powerings: per object, each
/// index of the first paired with the unique index of the second whose pair
/// is mutually factorizable, along with the unique mediating isomorphism.
#[derive(Clone, Debug)]
pub struct WpIso {
    pub per_object: BTreeMap<SetTerm, Vec<(SetTerm, SetTerm, Mor)>>,
}

pub fn wp_uniqueness_iso(
    cat: &FinCat,
    w1: &WellPowering,
    w2: &WellPowering,
) -> Result<WpIso, String> {
    let mut per_object = BTreeMap::new();
    for (&c, rows1) in &w1.families {
        let Some(rows2) = w2.families.get(&c) else {
            return Err(format!("second well-powering has no family at {}", c));
        };
        if rows1.len() != rows2.len() {
            return Err(format!(
                "families at {} have different sizes: {} vs {}",
                c,
                rows1.len(),
                rows2.len()
            ));
        }
        let mut matched = Vec::new();
        let mut used = BTreeSet::new();
        for r1 in rows1 {
            let partners: Vec<&WpEntry> = rows2
                .iter()
                .filter(|r2| pair_leq(cat, r1.mor, r2.mor) && pair_leq(cat, r2.mor, r1.mor))
                .collect();
            match partners.len() {
                1 => {
                    let r2 = partners[0];
                    if !used.insert(r2.index) {
                        return Err(format!(
                            "index {} at {} matched twice",
                            r2.index, c
                        ));
                    }
                    let hs = mediating(cat, r1.mor, r2.mor);
                    if hs.len() != 1 {
                        return Err(format!(
                            "mediating map between {} and {} is not unique",
                            r1.mor, r2.mor
                        ));
                    }
                    let h = hs[0];
                    if !is_iso(cat, h) {
                        return Err(format!(
                            "mediating map {} between matched pairs is not an isomorphism",
                            h
                        ));
                    }
                    matched.push((r1.index, r2.index, h));
                }
                0 => {
                    return Err(format!(
                        "index {} at {} has no partner",
                        r1.index, c
                    ));
                }
                _ => {
                    return Err(format!(
                        "index {} at {} has several partners",
                        r1.index, c
                    ));
                }
            }
        }
        per_object.insert(c, matched);
    }
    Ok(WpIso { per_object })
}

/// The member predicate a validated well-powering determines: a morphism
/// belongs iff it factors as a family row composed with an isomorphism,
/// and the factorization (index, iso) is then unique.
pub fn recover_m(
    cat: &FinCat,
    w: &WellPowering,
) -> Result<BTreeMap<Mor, Option<(SetTerm, Mor)>>, String> {
    let mut out = BTreeMap::new();
    for f in cat.mors() {
        let rows = w.families.get(&f.cod).cloned().unwrap_or_default();
        let mut found: Vec<(SetTerm, Mor)> = Vec::new();
        for r in &rows {
            for &gt in cat.hom(f.dom, r.object) {
                let g = Mor { dom: f.dom, cod: r.object, term: gt };
                if !is_iso(cat, g) {
                    continue;
                }
                if cat.compose(r.mor, g).map(|x| x.term) == Some(f.term) {
                    found.push((r.index, g));
                }
            }
        }
        match found.len() {
            0 => {
                out.insert(f, None);
            }
            1 => {
                out.insert(f, Some(found[0]));
            }
            _ => {
                return Err(format!(
                    "factorization of {} through the family is not unique",
                    f
                ));
            }
        }
    }
    Ok(out)
}

// ---- Subobject classifier ---- //

/// Outcome of the classifier check in the full finite set skeleton on
/// 0..=m: the starred subobject poset of the numeral 1 as the candidate
/// truth-value object, its top representative as the true point, and one
/// classification result per mono.
#[derive(Clone, Debug)]
pub struct ClassifierReport {
    pub m: u32,
    pub mode: ThetaMode,
    pub omega: SetTerm,
    pub true_elem: SetTerm,
    pub monos_checked: usize,
    pub stable_next: bool,
    pub failures: Vec<String>,
}

impl ClassifierReport {
    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }
}

/// The starred subobject poset of the numeral 1 in finset_full(m).
pub fn omega_star(m: u32, mode: ThetaMode, budget: &Budget) -> Result<SubsStar, Error> {
    let cat = finset_full(m, budget)?;
    let subcat = injective_subcat(&cat);
    subs_star(&cat, &subcat, SetTerm::numeral(1), mode)
}

fn top_rep(s: &SubsStar) -> Option<SetTerm> {
    s.term
        .children()
        .iter()
        .copied()
        .find(|&r| s.term.children().iter().all(|&o| s.order.contains(&(o, r))))
}

/// Checks that omega = Sub*(1) has exactly two elements whose top is the
/// identity block's representative, and that every monomorphism u: U -> c
/// has exactly one characteristic graph chi: c -> omega making U the
/// pullback of the true point: chi∘u is constantly true, and every p into c
/// that lands on true factors through u uniquely. Candidate graphs and
/// factorization searches are exhaustive. Also reports whether omega is
/// unchanged at m + 1.
pub fn classifier_check(
    m: u32,
    mode: ThetaMode,
    budget: &Budget,
) -> Result<ClassifierReport, Error> {
    let cat = finset_full(m, budget)?;
    let one = SetTerm::numeral(1);
    let subcat = injective_subcat(&cat);
    let star = subs_star(&cat, &subcat, one, mode)?;
    let omega = star.term;
    let mut failures = Vec::new();
    if omega.card() != 2 {
        failures.push(format!("omega has {} elements, expected 2", omega.card()));
    }
    let Some(true_elem) = top_rep(&star) else {
        return Err(Error::Presentation(
            "subobject poset of 1 has no top element".to_string(),
        ));
    };
    let id_enc = enc_pair(cat.id_mor(one).expect("valid category"));
    match star.blocks.iter().find(|(_, block)| block.contains(id_enc)) {
        Some((&rep, _)) if rep == true_elem => {}
        Some((&rep, _)) => failures.push(format!(
            "identity block representative {} is not the top {}",
            rep, true_elem
        )),
        None => failures.push("identity pair belongs to no block".to_string()),
    }

    let monos: Vec<Mor> = cat.mors().into_iter().filter(|&x| cat.is_monic(x)).collect();
    for &u in &monos {
        let c = u.cod;
        let chis = crate::cat::graphs_between(c, omega, budget)?;
        let mut valid = Vec::new();
        'chi: for &chi in &chis {
            for &y in u.dom.children() {
                let uy = apply_graph(u.term, y).expect("total graph");
                if apply_graph(chi, uy) != Some(true_elem) {
                    continue 'chi;
                }
            }
            for &d in &cat.objects {
                for &pt in cat.hom(d, c) {
                    let lands_on_true = d
                        .children()
                        .iter()
                        .all(|&x| {
                            let px = apply_graph(pt, x).expect("total graph");
                            apply_graph(chi, px) == Some(true_elem)
                        });
                    if !lands_on_true {
                        continue;
                    }
                    let mut lifts = 0;
                    for &ht in cat.hom(d, u.dom) {
                        let h = Mor { dom: d, cod: u.dom, term: ht };
                        if cat.compose(u, h).map(|x| x.term) == Some(pt) {
                            lifts += 1;
                        }
                    }
                    if lifts != 1 {
                        continue 'chi;
                    }
                }
            }
            valid.push(chi);
        }
        if valid.len() != 1 {
            failures.push(format!(
                "mono {} has {} classifying graphs, expected 1",
                u,
                valid.len()
            ));
        }
    }

    let stable_next = omega_star(m + 1, mode, budget)?.term == omega;
    if !stable_next {
        failures.push(format!("omega changes between m = {} and m = {}", m, m + 1));
    }
    Ok(ClassifierReport {
        m,
        mode,
        omega,
        true_elem,
        monos_checked: monos.len(),
        stable_next,
        failures,
    })
}
