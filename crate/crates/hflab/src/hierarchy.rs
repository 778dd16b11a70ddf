//! The k-class / k-entity hierarchy.
//!
//! psi_member decides membership in the least collection containing the
//! universe's small sets and a parameter collection A, closed under
//! Kuratowski pairing and under tupling indexed by members of A. A k-class
//! is a set of (k-1)-entities (a 0-class is a small set); a k-entity for
//! k >= 1 is a member of the psi collection over the k-classes. Under HF
//! everything is small and every predicate here is constantly true; the
//! bounded stages Vn make the hierarchy strict.
//!
//! Decidability note: psi membership on a bare term is judged disjunctively.
//! A term counts as a pair (or a tuple graph) whenever it decodes as one,
//! whatever else it may also encode. Recursion descends in rank on every
//! clause, so the memoized predicates terminate.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::Serialize;

use crate::budget::Budget;
use crate::encode::{
    as_function_graph, class_pi, class_prod, class_sigma, class_sum, graph_dom, kunpair, Family,
};
use crate::error::Error;
use crate::set::{canon, SetTerm};
use crate::universe::{is_small, UniverseSpec};

/// The parameter collection A in a psi membership query.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClassSpec {
    /// Membership is element-hood in the given term.
    Explicit(SetTerm),
    /// Membership is "is a k-class over the ambient universe", without
    /// materializing that collection.
    KClasses(u32),
}

impl ClassSpec {
    fn admits(&self, x: SetTerm, u: UniverseSpec) -> bool {
        match *self {
            ClassSpec::Explicit(a) => a.contains(x),
            ClassSpec::KClasses(k) => is_k_class(x, k, u),
        }
    }
}

#[derive(PartialEq, Eq, Hash, Clone, Copy)]
enum MemoSpec {
    Explicit(u64),
    KClasses(u32),
}

type PsiKey = (u64, MemoSpec, UniverseSpec);

static PSI_MEMO: OnceLock<Mutex<HashMap<PsiKey, bool>>> = OnceLock::new();

fn psi_memo() -> &'static Mutex<HashMap<PsiKey, bool>> {
    PSI_MEMO.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Membership in the least prefixpoint of
/// X -> smalls union A union X x X union (tuples over A-indices valued in X).
pub fn psi_member(x: SetTerm, a: &ClassSpec, u: UniverseSpec) -> bool {
    let key = (
        x.id(),
        match *a {
            ClassSpec::Explicit(t) => MemoSpec::Explicit(t.id()),
            ClassSpec::KClasses(k) => MemoSpec::KClasses(k),
        },
        u,
    );
    if let Some(&hit) = psi_memo().lock().expect("psi memo poisoned").get(&key) {
        return hit;
    }
    let result = psi_member_raw(x, a, u);
    psi_memo().lock().expect("psi memo poisoned").insert(key, result);
    result
}

fn psi_member_raw(x: SetTerm, a: &ClassSpec, u: UniverseSpec) -> bool {
    if is_small(x, u) || a.admits(x, u) {
        return true;
    }
    if let Some((p, q)) = kunpair(x) {
        if psi_member(p, a, u) && psi_member(q, a, u) {
            return true;
        }
    }
    if let Some(graph) = as_function_graph(x) {
        if a.admits(graph_dom(&graph), u) && graph.values().all(|&v| psi_member(v, a, u)) {
            return true;
        }
    }
    false
}

/// A 0-class is a small set; a (k+1)-class is a set of k-entities.
pub fn is_k_class(x: SetTerm, k: u32, u: UniverseSpec) -> bool {
    if k == 0 {
        return is_small(x, u);
    }
    x.children().iter().all(|&c| is_k_entity(c, k - 1, u))
}

/// A 0-entity is a small set; a k-entity for k >= 1 is a psi member over
/// the k-classes. Every k-class is a k-entity (it is admitted directly).
pub fn is_k_entity(x: SetTerm, k: u32, u: UniverseSpec) -> bool {
    if k == 0 {
        return is_small(x, u);
    }
    psi_member(x, &ClassSpec::KClasses(k), u)
}

/// Least k <= kmax for which the predicate holds, if any. The predicates
/// are monotone in k, so this is a frontier, not a cutoff artifact.
pub fn least_k(x: SetTerm, u: UniverseSpec, kmax: u32, entity: bool) -> Option<u32> {
    (0..=kmax).find(|&k| {
        if entity {
            is_k_entity(x, k, u)
        } else {
            is_k_class(x, k, u)
        }
    })
}

// ---- Closure checking ---- //

/// Deterministic sampling bounds for closure checks.
#[derive(Debug, Clone, Serialize)]
pub struct SampleBounds {
    pub seed: u64,
    pub samples: usize,
    /// Rank cap for raw small-term generation under HF.
    pub max_rank: u32,
    /// Width cap for generated sets and families.
    pub max_width: usize,
}

impl Default for SampleBounds {
    fn default() -> Self {
        SampleBounds {
            seed: 0x5e7,
            samples: 100,
            max_rank: 3,
            max_width: 3,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ClosureFailure {
    pub construction: &'static str,
    pub inputs: Vec<SetTerm>,
    pub output: SetTerm,
}

/// Outcome of sampling the class-closure laws at one level.
#[derive(Debug, Clone, Serialize)]
pub struct ClosureReport {
    pub k: u32,
    pub universe: UniverseSpec,
    pub samples: usize,
    pub checked: usize,
    pub failures: Vec<ClosureFailure>,
}

impl ClosureReport {
    pub fn all_pass(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Samples k-class inputs and verifies that sums, products, dependent sums,
/// and dependent products of k-classes are again k-classes, judging with
/// is_k_class. Under a genuine universe (HF) this holds at every k. Under
/// Vn it holds for k >= 2, where the constructed elements are pairs and
/// tuples of (k-1)-entities and the psi collection is closed under exactly
/// those; at k = 0 and k = 1 the elements would have to be small, and Vn is
/// not pairing-closed, so both levels genuinely fail with witnesses.
pub fn closure_check(
    k: u32,
    u: UniverseSpec,
    bounds: &SampleBounds,
    budget: &Budget,
) -> Result<ClosureReport, Error> {
    let mut rng = StdRng::seed_from_u64(bounds.seed);
    let mut failures = Vec::new();
    let mut checked = 0;
    for _ in 0..bounds.samples {
        let b = sample_k_class(&mut rng, k, u, bounds);
        let c = sample_k_class(&mut rng, k, u, bounds);

        let sum = class_sum(b, c);
        checked += 1;
        if !is_k_class(sum, k, u) {
            failures.push(ClosureFailure {
                construction: "sum",
                inputs: vec![b, c],
                output: sum,
            });
        }

        let prod = class_prod(b, c);
        checked += 1;
        if !is_k_class(prod, k, u) {
            failures.push(ClosureFailure {
                construction: "product",
                inputs: vec![b, c],
                output: prod,
            });
        }

        let mut fam = Family::new();
        for &bb in b.children() {
            fam.insert(bb, sample_k_class(&mut rng, k, u, bounds));
        }
        let sigma = class_sigma(b, &fam)?;
        checked += 1;
        if !is_k_class(sigma, k, u) {
            failures.push(ClosureFailure {
                construction: "dependent sum",
                inputs: vec![b],
                output: sigma,
            });
        }

        // Index by a (k-1)-class, reading k-1 as 0 at level 0.
        let i_set = sample_k_class(&mut rng, k.saturating_sub(1), u, bounds);
        let mut pi_fam = Family::new();
        for &i in i_set.children() {
            pi_fam.insert(i, sample_k_class(&mut rng, k, u, bounds));
        }
        let pi = class_pi(i_set, &pi_fam, budget)?;
        checked += 1;
        if !is_k_class(pi, k, u) {
            failures.push(ClosureFailure {
                construction: "dependent product",
                inputs: vec![i_set],
                output: pi,
            });
        }
    }
    Ok(ClosureReport {
        k,
        universe: u,
        samples: bounds.samples,
        checked,
        failures,
    })
}

/// Random k-class: a set of sampled (k-1)-entities (for k = 0, a small set).
pub fn sample_k_class(
    rng: &mut StdRng,
    k: u32,
    u: UniverseSpec,
    bounds: &SampleBounds,
) -> SetTerm {
    if k == 0 {
        return sample_small(rng, u, bounds, bounds.max_rank);
    }
    let width = rng.gen_range(0..=bounds.max_width);
    canon((0..width).map(|_| sample_k_entity(rng, k - 1, u, bounds, 2)).collect())
}

/// Random k-entity, built by the psi clauses themselves: a small set, a
/// k-class, a pair of k-entities, or a tuple over a k-class index set.
pub fn sample_k_entity(
    rng: &mut StdRng,
    k: u32,
    u: UniverseSpec,
    bounds: &SampleBounds,
    depth: u32,
) -> SetTerm {
    if k == 0 {
        return sample_small(rng, u, bounds, bounds.max_rank);
    }
    match if depth == 0 { rng.gen_range(0..2) } else { rng.gen_range(0..4) } {
        0 => sample_small(rng, u, bounds, bounds.max_rank),
        1 => sample_k_class(rng, k, u, bounds),
        2 => crate::encode::kpair(
            sample_k_entity(rng, k, u, bounds, depth - 1),
            sample_k_entity(rng, k, u, bounds, depth - 1),
        ),
        _ => {
            let dom = sample_k_class(rng, k, u, bounds);
            let fam: Family = dom
                .children()
                .iter()
                .map(|&i| (i, sample_k_entity(rng, k, u, bounds, depth - 1)))
                .collect();
            crate::encode::function_graph(&fam)
        }
    }
}

/// Random small set under the universe: bounded rank and width.
fn sample_small(rng: &mut StdRng, u: UniverseSpec, bounds: &SampleBounds, rank_cap: u32) -> SetTerm {
    let cap = match u {
        UniverseSpec::HF => rank_cap,
        UniverseSpec::Vn(n) => n.saturating_sub(1).min(rank_cap),
    };
    sample_term_of_rank_at_most(rng, cap, bounds.max_width)
}

fn sample_term_of_rank_at_most(rng: &mut StdRng, rank_cap: u32, max_width: usize) -> SetTerm {
    if rank_cap == 0 {
        return SetTerm::empty();
    }
    let width = rng.gen_range(0..=max_width);
    canon(
        (0..width)
            .map(|_| sample_term_of_rank_at_most(rng, rank_cap - 1, max_width))
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encode::{function_graph, kpair};

    const V2: UniverseSpec = UniverseSpec::Vn(2);

    fn c_term() -> SetTerm {
        SetTerm::numeral(2)
    }

    #[test]
    fn psi_frozen_examples() {
        let a = ClassSpec::Explicit(SetTerm::singleton(c_term()));
        assert!(psi_member(kpair(c_term(), c_term()), &a, V2));
        assert!(!psi_member(SetTerm::singleton(c_term()), &a, V2));
    }

    #[test]
    fn psi_tuple_clause() {
        // Tuple over index set c = {0, 1} with small values is admitted when
        // c itself is in A.
        let a = ClassSpec::Explicit(SetTerm::singleton(c_term()));
        let fam: Family = c_term()
            .children()
            .iter()
            .map(|&i| (i, SetTerm::empty()))
            .collect();
        let graph = function_graph(&fam);
        assert!(psi_member(graph, &a, V2));
        // Same graph, but A no longer contains the domain.
        let other = ClassSpec::Explicit(SetTerm::empty());
        assert!(!psi_member(graph, &other, V2));
    }

    #[test]
    fn k_class_frozen_examples() {
        assert!(is_k_class(c_term(), 1, V2));
        assert!(!is_k_class(c_term(), 0, V2));
        assert!(is_k_class(SetTerm::singleton(c_term()), 2, V2));
        assert!(!is_k_class(SetTerm::singleton(c_term()), 1, V2));
    }

    #[test]
    fn hf_degenerates() {
        let x = SetTerm::numeral(5);
        for k in 0..4 {
            assert!(is_k_class(x, k, UniverseSpec::HF));
            assert!(is_k_entity(x, k, UniverseSpec::HF));
        }
        assert!(psi_member(x, &ClassSpec::Explicit(SetTerm::empty()), UniverseSpec::HF));
    }

    #[test]
    fn monotone_in_k_small_pool() {
        let b = Budget::default();
        for i in 0u32..256 {
            let x = crate::set::ack_decode(&i.into(), &b).unwrap();
            for k in 0..3 {
                assert!(!is_k_class(x, k, V2) || is_k_class(x, k + 1, V2));
                assert!(!is_k_entity(x, k, V2) || is_k_entity(x, k + 1, V2));
                assert!(!is_k_class(x, k, V2) || is_k_entity(x, k, V2));
            }
        }
    }

    #[test]
    fn least_k_frontier() {
        assert_eq!(least_k(SetTerm::numeral(1), V2, 3, false), Some(0));
        assert_eq!(least_k(c_term(), V2, 3, false), Some(1));
        assert_eq!(least_k(SetTerm::singleton(c_term()), V2, 3, false), Some(2));
        // {{{2}}} needs three class layers.
        let deep = SetTerm::singleton(SetTerm::singleton(c_term()));
        assert_eq!(least_k(deep, V2, 3, false), Some(3));
        assert_eq!(least_k(deep, V2, 2, false), None);
    }

    #[test]
    fn closure_holds_at_k2_under_v2() {
        let bounds = SampleBounds { samples: 40, ..SampleBounds::default() };
        let budget = Budget::default();
        for k in 2..4 {
            let report = closure_check(k, V2, &bounds, &budget).unwrap();
            assert!(report.all_pass(), "k = {}, failures: {:?}", k, report.failures);
        }
    }

    #[test]
    fn closure_holds_under_hf() {
        let bounds = SampleBounds { samples: 25, ..SampleBounds::default() };
        for k in 0..3 {
            let report = closure_check(k, UniverseSpec::HF, &bounds, &Budget::default()).unwrap();
            assert!(report.all_pass());
        }
    }

    #[test]
    fn closure_fails_at_low_k_under_vn() {
        // Vn is not pairing-closed. At k = 0, {0} + {0} contains a pair of
        // rank 3, so the sum is not V3-small. At k = 1 the same pair must be
        // a 0-entity (small) for the sum to be a 1-class, and is not; it is
        // only a 1-entity, making the sum a 2-class. These witnesses document
        // that Vn is not a universe, not a defect in the constructions.
        let se = SetTerm::singleton(SetTerm::empty());
        let sum = class_sum(se, se);
        assert!(!is_k_class(sum, 0, UniverseSpec::Vn(3)));
        assert_eq!(sum.rank(), 4);

        let one_class = SetTerm::singleton(se);
        let sum1 = class_sum(one_class, one_class);
        assert!(is_k_class(one_class, 1, V2));
        assert!(!is_k_class(sum1, 1, V2));
        assert!(is_k_class(sum1, 2, V2));

        let bounds = SampleBounds { samples: 60, ..SampleBounds::default() };
        let r0 = closure_check(0, UniverseSpec::Vn(3), &bounds, &Budget::default()).unwrap();
        assert!(!r0.all_pass());
        let r1 = closure_check(1, V2, &bounds, &Budget::default()).unwrap();
        assert!(!r1.all_pass());
    }
}
