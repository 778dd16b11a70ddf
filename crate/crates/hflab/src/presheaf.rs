//! Presheaves on a finite category, natural transformations, and a
//! brute-force Yoneda apparatus: the representable at an object, the
//! comparison map beta sending an element of Fc to a transformation out of
//! the representable, exhaustive enumeration of natural families, and a
//! report that checks beta's bijectivity plus both naturality directions
//! extensionally.

use std::collections::BTreeMap;
use std::fmt;

use crate::budget::Budget;
use crate::cat::{apply_graph, graphs_between, identity_graph, FinCat, Mor};
use crate::encode::{class_prod, class_sum, function_graph, kpair, Family};
use crate::error::Error;
use crate::hierarchy::{is_k_class, is_k_entity};
use crate::set::{canon, SetTerm};
use crate::universe::UniverseSpec;

/// Contravariant set-valued functor, tabulated: `on_obj` gives the value
/// set at each object, `on_mor` gives for f: a -> b the graph of
/// F(f): F(b) -> F(a). Equality is extensional on both tables.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Presheaf {
    pub on_obj: BTreeMap<SetTerm, SetTerm>,
    pub on_mor: BTreeMap<Mor, SetTerm>,
}

impl Presheaf {
    pub fn at(&self, c: SetTerm) -> SetTerm {
        self.on_obj.get(&c).copied().unwrap_or_else(SetTerm::empty)
    }

    /// Graph of the restriction map along f, F(f): F(cod f) -> F(dom f).
    pub fn restrict(&self, f: Mor) -> Option<SetTerm> {
        self.on_mor.get(&f).copied()
    }
}

/// Family of component graphs alpha_c: F(c) -> G(c), keyed by object.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub struct NatTrans {
    pub components: BTreeMap<SetTerm, SetTerm>,
}

impl NatTrans {
    pub fn component(&self, c: SetTerm) -> Option<SetTerm> {
        self.components.get(&c).copied()
    }

    /// One term for the whole family: the function graph object -> graph.
    pub fn encode(&self) -> SetTerm {
        function_graph(&self.components)
    }
}

impl fmt::Display for NatTrans {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.encode())
    }
}

// ---- Constructors ---- //

/// Presheaf constant at the value set v; every restriction is the identity.
pub fn constant_presheaf(cat: &FinCat, v: SetTerm) -> Presheaf {
    let on_obj = cat.objects.iter().map(|&c| (c, v)).collect();
    let idg = identity_graph(v);
    let on_mor = cat.mors().into_iter().map(|m| (m, idg)).collect();
    Presheaf { on_obj, on_mor }
}

/// Representable presheaf Yc: at d the hom-set into c, with restriction
/// along f: d -> e given by precomposition g -> g∘f.
pub fn yoneda_object(cat: &FinCat, c: SetTerm) -> Presheaf {
    let mut on_obj = BTreeMap::new();
    for &d in &cat.objects {
        on_obj.insert(d, canon(cat.hom(d, c).iter().copied().collect()));
    }
    let mut on_mor = BTreeMap::new();
    for f in cat.mors() {
        let mut fam = Family::new();
        for &gt in cat.hom(f.cod, c) {
            let g = Mor { dom: f.cod, cod: c, term: gt };
            let gf = cat.compose(g, f).expect("precomposition within a valid category");
            fam.insert(gt, gf.term);
        }
        on_mor.insert(f, function_graph(&fam));
    }
    Presheaf { on_obj, on_mor }
}

/// Pointwise tagged sum F + G.
pub fn sum_presheaf(cat: &FinCat, f: &Presheaf, g: &Presheaf) -> Presheaf {
    let zero = SetTerm::numeral(0);
    let one = SetTerm::numeral(1);
    let mut on_obj = BTreeMap::new();
    for &c in &cat.objects {
        on_obj.insert(c, class_sum(f.at(c), g.at(c)));
    }
    let mut on_mor = BTreeMap::new();
    for m in cat.mors() {
        let fm = f.restrict(m).expect("summands defined on all morphisms");
        let gm = g.restrict(m).expect("summands defined on all morphisms");
        let mut fam = Family::new();
        for &x in f.at(m.cod).children() {
            let fx = apply_graph(fm, x).expect("total restriction");
            fam.insert(kpair(zero, x), kpair(zero, fx));
        }
        for &y in g.at(m.cod).children() {
            let gy = apply_graph(gm, y).expect("total restriction");
            fam.insert(kpair(one, y), kpair(one, gy));
        }
        on_mor.insert(m, function_graph(&fam));
    }
    Presheaf { on_obj, on_mor }
}

/// Pointwise product F x G on Kuratowski pairs.
pub fn product_presheaf(cat: &FinCat, f: &Presheaf, g: &Presheaf) -> Presheaf {
    let mut on_obj = BTreeMap::new();
    for &c in &cat.objects {
        on_obj.insert(c, class_prod(f.at(c), g.at(c)));
    }
    let mut on_mor = BTreeMap::new();
    for m in cat.mors() {
        let fm = f.restrict(m).expect("factors defined on all morphisms");
        let gm = g.restrict(m).expect("factors defined on all morphisms");
        let mut fam = Family::new();
        for &x in f.at(m.cod).children() {
            for &y in g.at(m.cod).children() {
                let fx = apply_graph(fm, x).expect("total restriction");
                let gy = apply_graph(gm, y).expect("total restriction");
                fam.insert(kpair(x, y), kpair(fx, gy));
            }
        }
        on_mor.insert(m, function_graph(&fam));
    }
    Presheaf { on_obj, on_mor }
}

/// Left summand inclusion F -> F + G, x -> (0, x).
pub fn sum_inl(cat: &FinCat, f: &Presheaf) -> NatTrans {
    let zero = SetTerm::numeral(0);
    let mut components = BTreeMap::new();
    for &c in &cat.objects {
        let mut fam = Family::new();
        for &x in f.at(c).children() {
            fam.insert(x, kpair(zero, x));
        }
        components.insert(c, function_graph(&fam));
    }
    NatTrans { components }
}

/// Identity transformation on F.
pub fn identity_nat_trans(cat: &FinCat, f: &Presheaf) -> NatTrans {
    let components = cat
        .objects
        .iter()
        .map(|&c| (c, identity_graph(f.at(c))))
        .collect();
    NatTrans { components }
}

// ---- Validation ---- //

fn graph_dom_image(term: SetTerm) -> Option<(SetTerm, SetTerm)> {
    let map = crate::encode::as_function_graph(term)?;
    Some((
        canon(map.keys().copied().collect()),
        canon(map.values().copied().collect()),
    ))
}

/// Checks functor laws exhaustively: value tables on exactly the objects,
/// restriction graphs total from F(cod) into F(dom), identities preserved,
/// and contravariant composition F(g∘f) = F(f)∘F(g).
pub fn validate_presheaf(cat: &FinCat, f: &Presheaf) -> Result<(), String> {
    for &c in f.on_obj.keys() {
        if !cat.objects.contains(&c) {
            return Err(format!("value table mentions non-object {}", c));
        }
    }
    for &c in &cat.objects {
        if !f.on_obj.contains_key(&c) {
            return Err(format!("no value set at object {}", c));
        }
    }
    let mors = cat.mors();
    for m in f.on_mor.keys() {
        if !cat.hom(m.dom, m.cod).contains(&m.term) {
            return Err(format!("restriction table mentions unknown morphism {}", m));
        }
    }
    for &m in &mors {
        let Some(graph) = f.restrict(m) else {
            return Err(format!("no restriction along {}", m));
        };
        let Some((dom, image)) = graph_dom_image(graph) else {
            return Err(format!("restriction along {} is not a function graph", m));
        };
        if dom != f.at(m.cod) {
            return Err(format!("restriction along {} is not total on {}", m, f.at(m.cod)));
        }
        if !image.is_subset_of(f.at(m.dom)) {
            return Err(format!("restriction along {} escapes {}", m, f.at(m.dom)));
        }
    }
    for &c in &cat.objects {
        let id = cat.id_mor(c).expect("valid category");
        if f.restrict(id) != Some(identity_graph(f.at(c))) {
            return Err(format!("identity at {} is not preserved", c));
        }
    }
    for &fm in &mors {
        for &gm in &mors {
            if fm.cod != gm.dom {
                continue;
            }
            let gf = cat.compose(gm, fm).expect("valid category");
            let lhs = f.restrict(gf).expect("checked above");
            let ff = f.restrict(fm).expect("checked above");
            let fg = f.restrict(gm).expect("checked above");
            let rhs = crate::cat::compose_graphs(ff, fg).expect("graphs compose");
            if lhs != rhs {
                return Err(format!(
                    "composition law fails at ({}, {}): {} vs {}",
                    gm, fm, lhs, rhs
                ));
            }
        }
    }
    Ok(())
}

fn naturality_violation(
    cat: &FinCat,
    f: &Presheaf,
    g: &Presheaf,
    components: &BTreeMap<SetTerm, SetTerm>,
) -> Option<String> {
    for m in cat.mors() {
        let alpha_cod = components[&m.cod];
        let alpha_dom = components[&m.dom];
        let fm = f.restrict(m).expect("validated presheaf");
        let gm = g.restrict(m).expect("validated presheaf");
        for &x in f.at(m.cod).children() {
            let via_g = apply_graph(alpha_cod, x).and_then(|y| apply_graph(gm, y));
            let via_f = apply_graph(fm, x).and_then(|y| apply_graph(alpha_dom, y));
            if via_g != via_f || via_g.is_none() {
                return Some(format!("naturality square at {} fails on {}", m, x));
            }
        }
    }
    None
}

/// Checks component totality and every naturality square.
pub fn validate_nat_trans(
    cat: &FinCat,
    f: &Presheaf,
    g: &Presheaf,
    t: &NatTrans,
) -> Result<(), String> {
    for &c in &cat.objects {
        let Some(graph) = t.component(c) else {
            return Err(format!("no component at {}", c));
        };
        let Some((dom, image)) = graph_dom_image(graph) else {
            return Err(format!("component at {} is not a function graph", c));
        };
        if dom != f.at(c) {
            return Err(format!("component at {} is not total on {}", c, f.at(c)));
        }
        if !image.is_subset_of(g.at(c)) {
            return Err(format!("component at {} escapes {}", c, g.at(c)));
        }
    }
    for &c in t.components.keys() {
        if !cat.objects.contains(&c) {
            return Err(format!("component on non-object {}", c));
        }
    }
    match naturality_violation(cat, f, g, &t.components) {
        Some(msg) => Err(msg),
        None => Ok(()),
    }
}

// ---- Yoneda machinery ---- //

/// beta_{c,F}(x): the transformation Yc -> F with component at d sending
/// g: d -> c to F(g)(x). Errors when x is not an element of F(c).
pub fn yoneda_beta(
    cat: &FinCat,
    c: SetTerm,
    f: &Presheaf,
    x: SetTerm,
) -> Result<NatTrans, Error> {
    if !f.at(c).contains(x) {
        return Err(Error::Presentation(format!(
            "{} is not an element of the value set {} at {}",
            x,
            f.at(c),
            c
        )));
    }
    let mut components = BTreeMap::new();
    for &d in &cat.objects {
        let mut fam = Family::new();
        for &gt in cat.hom(d, c) {
            let g = Mor { dom: d, cod: c, term: gt };
            let graph = f.restrict(g).expect("presheaf defined on all morphisms");
            let fx = apply_graph(graph, x).expect("total restriction");
            fam.insert(gt, fx);
        }
        components.insert(d, function_graph(&fam));
    }
    Ok(NatTrans { components })
}

/// Every natural transformation F -> G, by exhausting component choices and
/// keeping the families whose squares all commute. The raw search space is
/// the product over objects of |G(c)|^|F(c)|, guarded by budget.max_enum.
pub fn nat_trans_enumerate(
    cat: &FinCat,
    f: &Presheaf,
    g: &Presheaf,
    budget: &Budget,
) -> Result<Vec<NatTrans>, Error> {
    let mut per_object: Vec<(SetTerm, Vec<SetTerm>)> = Vec::new();
    let mut space: u128 = 1;
    for &c in &cat.objects {
        let graphs = graphs_between(f.at(c), g.at(c), budget)?;
        space = space.saturating_mul(graphs.len() as u128);
        per_object.push((c, graphs));
    }
    if space > budget.max_enum as u128 {
        return Err(Error::Budget {
            what: "natural transformation search space".to_string(),
            limit: budget.max_enum,
            actual: u64::try_from(space).ok(),
        });
    }
    if space == 0 {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    let mut counters = vec![0usize; per_object.len()];
    loop {
        let components: BTreeMap<SetTerm, SetTerm> = per_object
            .iter()
            .zip(&counters)
            .map(|((c, graphs), &i)| (*c, graphs[i]))
            .collect();
        if naturality_violation(cat, f, g, &components).is_none() {
            out.push(NatTrans { components });
        }
        let mut pos = 0;
        loop {
            if pos == counters.len() {
                out.sort();
                return Ok(out);
            }
            counters[pos] += 1;
            if counters[pos] < per_object[pos].1.len() {
                break;
            }
            counters[pos] = 0;
            pos += 1;
        }
    }
}

/// One Yoneda probe: an object c and a presheaf F, optionally with a
/// validated transformation alpha: F -> G for the F-naturality square.
pub struct YonedaProbe {
    pub c: SetTerm,
    pub f: Presheaf,
    pub alpha: Option<(Presheaf, NatTrans)>,
}

#[derive(Clone, Debug)]
pub struct YonedaProbeReport {
    pub c: SetTerm,
    pub f_card: usize,
    pub nat_count: usize,
    pub bijective: bool,
    pub c_naturality_ok: bool,
    pub f_naturality_ok: Option<bool>,
    pub entities_ok: bool,
    pub homset_class_ok: bool,
    pub failures: Vec<String>,
}

impl YonedaProbeReport {
    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }
}

#[derive(Clone, Debug)]
pub struct YonedaReport {
    pub universe: UniverseSpec,
    pub probes: Vec<YonedaProbeReport>,
}

impl YonedaReport {
    pub fn all_ok(&self) -> bool {
        self.probes.iter().all(|p| p.ok())
    }
}

impl fmt::Display for YonedaReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "yoneda report: {} probes under {}",
            self.probes.len(),
            self.universe
        )?;
        for p in &self.probes {
            writeln!(
                f,
                "  c = {}: |Fc| = {} |Nat(Yc,F)| = {} bijective = {} c-natural = {} f-natural = {} entities = {} homset-2-class = {}",
                p.c,
                p.f_card,
                p.nat_count,
                p.bijective,
                p.c_naturality_ok,
                p.f_naturality_ok.map_or("n/a".to_string(), |b| b.to_string()),
                p.entities_ok,
                p.homset_class_ok
            )?;
            for msg in &p.failures {
                writeln!(f, "    fail: {}", msg)?;
            }
        }
        write!(
            f,
            "verdict: {}",
            if self.all_ok() { "all probes pass" } else { "failures present" }
        )
    }
}

/// Naturality of beta in the object argument along h: a -> b, unpacked
/// pointwise: beta_a(F(h)(x)) must agree with precomposing beta_b(x) by h,
/// i.e. F(h∘g)(x) = F(g)(F(h)(x)) for every g into a and x in F(b).
fn beta_square_holds(cat: &FinCat, f: &Presheaf, h: Mor, failures: &mut Vec<String>) -> bool {
    let mut ok = true;
    for &x in f.at(h.cod).children() {
        let fh = f.restrict(h).expect("validated presheaf");
        let xh = apply_graph(fh, x).expect("total restriction");
        for &d in &cat.objects {
            for &gt in cat.hom(d, h.dom) {
                let g = Mor { dom: d, cod: h.dom, term: gt };
                let hg = cat.compose(h, g).expect("valid category");
                let lhs = apply_graph(f.restrict(hg).expect("presheaf"), x);
                let rhs = apply_graph(f.restrict(g).expect("presheaf"), xh);
                if lhs != rhs || lhs.is_none() {
                    ok = false;
                    failures.push(format!(
                        "beta square along {} fails at g = {}, x = {}",
                        h, gt, x
                    ));
                }
            }
        }
    }
    ok
}

/// Vertical composite beta then alpha, componentwise.
fn post_compose(alpha: &NatTrans, beta: &NatTrans) -> Option<NatTrans> {
    let mut components = BTreeMap::new();
    for (&c, &bg) in &beta.components {
        let ag = alpha.component(c)?;
        components.insert(c, crate::cat::compose_graphs(ag, bg)?);
    }
    Some(NatTrans { components })
}

/// Runs every probe: validates F (and alpha when given), enumerates
/// Nat(Yc, F), checks that beta is a bijection onto the enumeration, checks
/// beta's naturality in c over all morphisms into and out of c and in F
/// along the supplied alpha, and finally checks the size side: each
/// enumerated transformation's encoding must be a 1-entity and the set of
/// all of them a 2-class under `vn`.
pub fn yoneda_check(
    cat: &FinCat,
    probes: &[YonedaProbe],
    vn: UniverseSpec,
    budget: &Budget,
) -> Result<YonedaReport, Error> {
    let mut reports = Vec::new();
    for probe in probes {
        let c = probe.c;
        let f = &probe.f;
        let mut failures = Vec::new();
        if let Err(msg) = validate_presheaf(cat, f) {
            failures.push(format!("presheaf invalid: {}", msg));
            reports.push(YonedaProbeReport {
                c,
                f_card: 0,
                nat_count: 0,
                bijective: false,
                c_naturality_ok: false,
                f_naturality_ok: None,
                entities_ok: false,
                homset_class_ok: false,
                failures,
            });
            continue;
        }
        let yc = yoneda_object(cat, c);
        let enumerated = nat_trans_enumerate(cat, &yc, f, budget)?;
        let f_card = f.at(c).card();
        let nat_count = enumerated.len();

        let mut images = Vec::new();
        for &x in f.at(c).children() {
            images.push(yoneda_beta(cat, c, f, x)?);
        }
        let mut distinct = images.clone();
        distinct.sort();
        distinct.dedup();
        let injective = distinct.len() == images.len();
        let surjective = distinct == enumerated;
        let bijective = injective && surjective && f_card == nat_count;
        if !bijective {
            failures.push(format!(
                "beta is not a bijection at c = {}: |Fc| = {}, |Nat| = {}, injective = {}, onto = {}",
                c, f_card, nat_count, injective, surjective
            ));
        }

        let mut c_naturality_ok = true;
        for h in cat.mors_into(c).into_iter().chain(cat.mors_from(c)) {
            if !beta_square_holds(cat, f, h, &mut failures) {
                c_naturality_ok = false;
            }
        }

        let f_naturality_ok = match &probe.alpha {
            None => None,
            Some((g, alpha)) => {
                let mut ok = true;
                if let Err(msg) = validate_presheaf(cat, g) {
                    ok = false;
                    failures.push(format!("alpha target invalid: {}", msg));
                } else if let Err(msg) = validate_nat_trans(cat, f, g, alpha) {
                    ok = false;
                    failures.push(format!("alpha invalid: {}", msg));
                } else {
                    for &x in f.at(c).children() {
                        let ax = apply_graph(
                            alpha.component(c).expect("validated"),
                            x,
                        )
                        .expect("total component");
                        let lhs = yoneda_beta(cat, c, g, ax)?;
                        let rhs = post_compose(alpha, &yoneda_beta(cat, c, f, x)?)
                            .expect("components compose");
                        if lhs != rhs {
                            ok = false;
                            failures.push(format!(
                                "F-naturality square fails at x = {}",
                                x
                            ));
                        }
                    }
                }
                Some(ok)
            }
        };

        let mut entities_ok = true;
        let mut enc_terms = Vec::new();
        for t in &enumerated {
            let enc = t.encode();
            enc_terms.push(enc);
            if !is_k_entity(enc, 1, vn) {
                entities_ok = false;
                failures.push(format!("encoding {} is not a 1-entity under {}", enc, vn));
            }
        }
        let homset_term = canon(enc_terms);
        let homset_class_ok = is_k_class(homset_term, 2, vn);
        if !homset_class_ok {
            failures.push(format!(
                "homset term {} is not a 2-class under {}",
                homset_term, vn
            ));
        }

        reports.push(YonedaProbeReport {
            c,
            f_card,
            nat_count,
            bijective,
            c_naturality_ok,
            f_naturality_ok,
            entities_ok,
            homset_class_ok,
            failures,
        });
    }
    Ok(YonedaReport { universe: vn, probes: reports })
}

/// Standard probe battery: all representables, three constant presheaves,
/// and sums and products of representables, padded to ten presheaves, each
/// probed at every object. Representable probes at the first object carry
/// the left-inclusion alpha into the sum with the last representable.
pub fn probe_battery(cat: &FinCat, budget: &Budget) -> Result<Vec<YonedaProbe>, Error> {
    let _ = budget;
    let first = *cat.objects.first().expect("nonempty category");
    let last = *cat.objects.last().expect("nonempty category");
    let y_first = yoneda_object(cat, first);
    let y_last = yoneda_object(cat, last);
    let mut presheaves: Vec<Presheaf> = Vec::new();
    for &c in &cat.objects {
        presheaves.push(yoneda_object(cat, c));
    }
    for n in 0..3 {
        presheaves.push(constant_presheaf(cat, SetTerm::numeral(n)));
    }
    let pads = [
        sum_presheaf(cat, &y_first, &y_last),
        product_presheaf(cat, &y_first, &y_last),
        sum_presheaf(cat, &y_last, &y_last),
        product_presheaf(cat, &y_last, &y_last),
        sum_presheaf(cat, &constant_presheaf(cat, SetTerm::numeral(1)), &y_first),
    ];
    for p in pads {
        if presheaves.len() >= 10 {
            break;
        }
        presheaves.push(p);
    }
    let mut probes = Vec::new();
    for f in &presheaves {
        for &c in &cat.objects {
            let alpha = if *f == y_first && c == first {
                let g = sum_presheaf(cat, &y_first, &y_last);
                let inl = sum_inl(cat, &y_first);
                Some((g, inl))
            } else {
                None
            };
            probes.push(YonedaProbe { c, f: f.clone(), alpha });
        }
    }
    Ok(probes)
}
