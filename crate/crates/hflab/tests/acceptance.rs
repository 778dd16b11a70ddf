//! Shipping gate. Each test covers one release criterion end to end and
//! prints a single [PASS]/[FAIL] line (run with `--nocapture` to see them
//! all); on failure it panics with the collected evidence. Oracles here are
//! recomputed from first principles, not by calling the code under test.

use hflab::cat::{chain_poset, graph_is_injective, walking_arrow};
use hflab::encode::{quotient_star, star_pair, star_unpair, theta, EquivRelation, ThetaMode};
use hflab::hierarchy::{closure_check, is_k_class, is_k_entity, SampleBounds};
use hflab::multirel::{multirel_compose, multirel_id, Matrix, MultirelHomDesc};
use hflab::presheaf::{probe_battery, yoneda_check};
use hflab::session::{run_command, Format, Session, Status};
use hflab::set::{ack_decode, ack_encode, ack_less, canon, v_stage};
use hflab::subobj::{
    canonical_cowp_finset, canonical_wp_finset, classifier_check, omega_star, recover_m,
    validate_co_well_powering, validate_well_powering, wp_uniqueness_iso, WellPowering, WpEntry,
};
use hflab::term::{parse_term_str, Bindings};
use hflab::universe::{check_universe_axioms, is_small, Clause, Verdict};
use hflab::{Budget, SetTerm, UniverseSpec};
use num_bigint::BigUint;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use std::collections::{BTreeSet, HashMap};
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

fn b() -> Budget {
    Budget::default()
}

/// Collects at most a screenful of failures; the verdict line stays single.
fn check(errs: &mut Vec<String>, ok: bool, msg: impl FnOnce() -> String) {
    if !ok && errs.len() < 12 {
        errs.push(msg());
    }
}

fn verdict(name: &str, errs: Vec<String>) {
    if errs.is_empty() {
        println!("[PASS] {}", name);
    } else {
        println!("[FAIL] {}", name);
        panic!("{}:\n  {}", name, errs.join("\n  "));
    }
}

fn decode(code: u32) -> SetTerm {
    ack_decode(&BigUint::from(code), &b()).expect("u16 codes decode within default budget")
}

/// All 65536 terms of rank <= 4, by ascending code.
fn rank4_terms() -> Vec<SetTerm> {
    (0u32..=65535).map(decode).collect()
}

#[test]
fn ackermann_codec_is_an_order_isomorphism_below_rank_five() {
    let started = Instant::now();
    let mut errs = Vec::new();

    let mut terms = Vec::with_capacity(65536);
    for code in 0u32..=65535 {
        let t = decode(code);
        check(&mut errs, t.rank() <= 4, || format!("code {} decodes to rank {}", code, t.rank()));
        let back = ack_encode(t, &b()).unwrap();
        check(&mut errs, back == BigUint::from(code), || {
            format!("code {} round-trips to {}", code, back)
        });
        terms.push(t);
    }

    // Independent enumeration of the same domain: rank <= 4 terms are
    // exactly the subsets of V4, generated here by bitmask, never by codec.
    // Hitting every decoded term exactly once proves decoding is onto the
    // rank <= 4 terms; the round trips above then cover both directions.
    let v4 = v_stage(4, &b()).unwrap();
    let stock = v4.children();
    check(&mut errs, stock.len() == 16, || format!("V4 has {} elements", stock.len()));
    let decoded_code: HashMap<SetTerm, usize> =
        terms.iter().enumerate().map(|(i, &t)| (t, i)).collect();
    let mut hit = vec![false; terms.len()];
    let mut hits = 0usize;
    for mask in 0u32..=65535 {
        let kids: Vec<SetTerm> = stock
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, &c)| c)
            .collect();
        let t = canon(kids);
        match decoded_code.get(&t) {
            Some(&code) if !hit[code] => {
                hit[code] = true;
                hits += 1;
            }
            Some(_) => check(&mut errs, false, || {
                format!("subset {} enumerated twice", t)
            }),
            None => check(&mut errs, false, || {
                format!("subset {} of V4 is missed by the decoder", t)
            }),
        }
    }
    check(&mut errs, hits == terms.len(), || {
        format!("enumeration covered {} of {} decoded terms", hits, terms.len())
    });

    let mut rng = StdRng::seed_from_u64(0xacc0);
    for _ in 0..10_000 {
        let (i, j) = (rng.gen::<u16>(), rng.gen::<u16>());
        check(&mut errs, ack_less(terms[i as usize], terms[j as usize]) == (i < j), || {
            format!("order of codes {} and {} disagrees with ack_less", i, j)
        });
    }

    let elapsed = started.elapsed();
    check(&mut errs, elapsed < Duration::from_secs(5), || {
        format!("codec sweep took {:?}, budget is 5s", elapsed)
    });
    verdict("ackermann codec: order-isomorphic round trip on all rank <= 4 terms", errs);
}

#[test]
fn star_pairing_obeys_the_tagged_union_law() {
    let started = Instant::now();
    let mut errs = Vec::new();

    // Every term of rank <= 3 (there are only 16), topped up with seeded
    // rank <= 4 terms to a pool of 50 distinct entries.
    let mut pool: Vec<SetTerm> = (0u32..16).map(decode).collect();
    let mut members: BTreeSet<SetTerm> = pool.iter().copied().collect();
    let mut rng = StdRng::seed_from_u64(0x57a7);
    while pool.len() < 50 {
        let t = decode(rng.gen::<u16>() as u32);
        if members.insert(t) {
            pool.push(t);
        }
    }

    let zero = SetTerm::numeral(0);
    let one = SetTerm::numeral(1);
    let mut seen: HashMap<SetTerm, (SetTerm, SetTerm)> = HashMap::new();
    for &a in &pool {
        for &c in &pool {
            let lhs = star_pair(a, c);
            let rhs = canon(
                a.children()
                    .iter()
                    .map(|&x| star_pair(zero, x))
                    .chain(c.children().iter().map(|&y| star_pair(one, y)))
                    .collect(),
            );
            check(&mut errs, lhs == rhs, || {
                format!("tagged-union law fails for ({}, {})", a, c)
            });
            check(&mut errs, star_unpair(lhs) == Some((a, c)), || {
                format!("unpairing fails for ({}, {})", a, c)
            });
            if let Some(prev) = seen.insert(lhs, (a, c)) {
                check(&mut errs, prev == (a, c), || {
                    format!("pairs ({}, {}) and ({}, {}) collide", prev.0, prev.1, a, c)
                });
            }
        }
    }
    check(&mut errs, seen.len() == 50 * 50, || {
        format!("expected 2500 distinct pair terms, got {}", seen.len())
    });

    let elapsed = started.elapsed();
    check(&mut errs, elapsed < Duration::from_secs(5), || {
        format!("pairing sweep took {:?}, budget is 5s", elapsed)
    });
    verdict("star pairing: comprehension law, injectivity, and inverse on a 50-term pool", errs);
}

#[test]
fn universe_axiom_audit_matches_rank_arithmetic() {
    let mut errs = Vec::new();

    let hf = check_universe_axioms(UniverseSpec::HF, &b());
    for (clause, v) in &hf.clauses {
        check(&mut errs, matches!(v, Verdict::Pass { .. }), || {
            format!("HF clause {} is not a pass", clause)
        });
    }

    let v2 = check_universe_axioms(UniverseSpec::Vn(2), &b());
    match v2.verdict(Clause::Powerset) {
        Verdict::Fail { witness, .. } => {
            let expected = vec![SetTerm::singleton(SetTerm::empty())];
            check(&mut errs, *witness == expected, || {
                format!(
                    "V2 powerset witness is {:?}, expected the singleton of the empty set",
                    witness.iter().map(|w| w.to_string()).collect::<Vec<_>>()
                )
            });
        }
        other => check(&mut errs, false, || {
            format!("V2 powerset clause is {:?}, expected a failure", other)
        }),
    }

    for n in 0..=8 {
        let report = check_universe_axioms(UniverseSpec::Vn(n), &b());
        check(
            &mut errs,
            matches!(report.verdict(Clause::Transitivity), Verdict::Pass { .. }),
            || format!("V{} transitivity is not a pass", n),
        );
    }
    verdict("universe axioms: HF all-pass, V2 powerset witness {{}}, Vn transitivity", errs);
}

// ---- Independent membership oracle ---- //
//
// The fixpoint below re-derives the psi collection from its defining
// clauses, with its own Kuratowski and graph decoders, over the full
// rank <= 4 domain. Components of a term always carry strictly smaller
// codes, so one ascending pass computes the least fixpoint; a second pass
// verifies stability.

fn oracle_unpair(z: SetTerm) -> Option<(SetTerm, SetTerm)> {
    match z.children() {
        [w] if w.card() == 1 => {
            let a = w.children()[0];
            Some((a, a))
        }
        [u, v] => {
            let (s, d) = match (u.card(), v.card()) {
                (1, 2) => (u, v),
                (2, 1) => (v, u),
                _ => return None,
            };
            let a = s.children()[0];
            let (p, q) = (d.children()[0], d.children()[1]);
            if a == p {
                Some((a, q))
            } else if a == q {
                Some((a, p))
            } else {
                None
            }
        }
        _ => None,
    }
}

fn oracle_graph(z: SetTerm) -> Option<Vec<(SetTerm, SetTerm)>> {
    let mut out = Vec::with_capacity(z.card());
    let mut firsts = BTreeSet::new();
    for &el in z.children() {
        let (x, y) = oracle_unpair(el)?;
        if !firsts.insert(x) {
            return None;
        }
        out.push((x, y));
    }
    Some(out)
}

#[test]
fn entity_judgments_match_independent_fixpoint() {
    let mut errs = Vec::new();
    let u = UniverseSpec::Vn(2);
    let terms = rank4_terms();
    let code_of: HashMap<SetTerm, usize> =
        terms.iter().enumerate().map(|(i, &t)| (t, i)).collect();

    let small: Vec<bool> = terms.iter().map(|t| t.rank() < 2).collect();
    let mut entity: Vec<Vec<bool>> = vec![small.clone()];
    for level in 1..=2usize {
        let prev = entity[level - 1].clone();
        let pass = |snapshot: &[bool]| -> Vec<bool> {
            let mut e = vec![false; terms.len()];
            for (i, &x) in terms.iter().enumerate() {
                let is_class = x.children().iter().all(|c| prev[code_of[c]]);
                let by_pair = oracle_unpair(x)
                    .map_or(false, |(p, q)| {
                        let (pi, qi) = (code_of[&p], code_of[&q]);
                        (snapshot[pi] || e[pi]) && (snapshot[qi] || e[qi])
                    });
                let by_graph = oracle_graph(x).map_or(false, |g| {
                    let dom_is_class = g.iter().all(|(k, _)| prev[code_of[k]]);
                    dom_is_class
                        && g.iter().all(|(_, v)| {
                            let vi = code_of[v];
                            snapshot[vi] || e[vi]
                        })
                });
                e[i] = small[i] || is_class || by_pair || by_graph;
            }
            e
        };
        // Ascending-code pass computes the least fixpoint outright
        // (components sit at smaller codes); the second pass confirms it.
        let first = pass(&vec![false; terms.len()]);
        let second = pass(&first);
        check(&mut errs, first == second, || {
            format!("level-{} collection not a fixpoint after one pass", level)
        });
        entity.push(first);
    }

    for k in 0..=2usize {
        let mut mismatches = 0usize;
        for (i, &t) in terms.iter().enumerate() {
            let lib = is_k_entity(t, k as u32, u);
            if lib != entity[k][i] {
                mismatches += 1;
                check(&mut errs, false, || {
                    format!("entity level {} disagrees at {} (library {})", k, t, lib)
                });
            }
            let class_oracle = if k == 0 {
                small[i]
            } else {
                t.children().iter().all(|c| entity[k - 1][code_of[c]])
            };
            check(&mut errs, is_k_class(t, k as u32, u) == class_oracle, || {
                format!("class level {} disagrees at {}", k, t)
            });
        }
        check(&mut errs, mismatches == 0, || {
            format!("{} entity mismatches at level {}", mismatches, k)
        });
    }

    for &t in &terms {
        for k in 0..=2u32 {
            if is_k_class(t, k, u) {
                check(&mut errs, is_k_class(t, k + 1, u), || {
                    format!("{}-class {} is not a {}-class", k, t, k + 1)
                });
                check(&mut errs, is_k_entity(t, k, u), || {
                    format!("{}-class {} is not a {}-entity", k, t, k)
                });
            }
        }
    }

    // Closure laws: sums, products, dependent sums, dependent products of
    // k-classes are k-classes. Genuine at every level under HF; under Vn
    // the elements themselves must clear the pair clause, which starts
    // holding at k = 2.
    for (k, universe) in [(0, UniverseSpec::HF), (1, UniverseSpec::HF), (2, u)] {
        let report = closure_check(k, universe, &SampleBounds::default(), &b()).unwrap();
        check(&mut errs, report.samples == 100, || {
            format!("closure sweep at k = {} ran {} samples", k, report.samples)
        });
        check(&mut errs, report.all_pass(), || {
            format!(
                "closure fails at k = {} under {}: {} counterexamples",
                k,
                universe,
                report.failures.len()
            )
        });
    }

    verdict("membership hierarchy: library agrees with bottom-up fixpoint on 65536 terms", errs);
}

#[test]
fn yoneda_correspondence_is_bijective_and_stays_small() {
    let started = Instant::now();
    let mut errs = Vec::new();
    let u = UniverseSpec::Vn(6);

    for (name, cat) in [("walking arrow", walking_arrow()), ("3-chain", chain_poset(3))] {
        let probes = probe_battery(&cat, &b()).unwrap();
        check(&mut errs, probes.len() == 10 * cat.objects.len(), || {
            format!("{}: battery has {} probes", name, probes.len())
        });
        let report = yoneda_check(&cat, &probes, u, &b()).unwrap();
        check(&mut errs, report.all_ok(), || format!("{}: report not all-ok", name));
        let mut f_nat_seen = false;
        for p in &report.probes {
            check(&mut errs, p.f_card == p.nat_count && p.bijective, || {
                format!(
                    "{}: at {} |Fc| = {} but |Nat(Yc,F)| = {}",
                    name, p.c, p.f_card, p.nat_count
                )
            });
            check(&mut errs, p.c_naturality_ok, || {
                format!("{}: c-naturality fails at {}", name, p.c)
            });
            check(&mut errs, p.f_naturality_ok.unwrap_or(true), || {
                format!("{}: F-naturality fails at {}", name, p.c)
            });
            f_nat_seen |= p.f_naturality_ok == Some(true);
            check(&mut errs, p.entities_ok, || {
                format!("{}: a transformation encoding is not a 1-entity at {}", name, p.c)
            });
            check(&mut errs, p.homset_class_ok, || {
                format!("{}: a homset term is not a 2-class at {}", name, p.c)
            });
        }
        check(&mut errs, f_nat_seen, || {
            format!("{}: no probe exercised the F-naturality square", name)
        });
    }

    let elapsed = started.elapsed();
    check(&mut errs, elapsed < Duration::from_secs(30), || {
        format!("yoneda sweep took {:?}, budget is 30s", elapsed)
    });
    verdict("yoneda: bijective correspondence, commuting squares, small encodings", errs);
}

fn subset_of(a: SetTerm, c: SetTerm) -> bool {
    a.children().iter().all(|&e| c.contains(e))
}

#[test]
fn finite_set_powerings_validate_with_subset_order() {
    let mut errs = Vec::new();

    let (cat, monos, wp) = canonical_wp_finset(3, &b()).unwrap();
    match validate_well_powering(&cat, &monos, &wp, UniverseSpec::HF) {
        Ok(v) => check(&mut errs, v.all_small(), || {
            "canonical well-powering has a non-small index set under HF".to_string()
        }),
        Err(msg) => check(&mut errs, false, || format!("well-powering rejected: {}", msg)),
    }
    for (c, rows) in &wp.families {
        let declared = wp.order.get(c).cloned().unwrap_or_default();
        let mut expected = BTreeSet::new();
        for r1 in rows {
            for r2 in rows {
                if subset_of(r1.index, r2.index) {
                    expected.insert((r1.index, r2.index));
                }
            }
        }
        check(&mut errs, declared == expected, || {
            format!("index order at {} is not the subset relation", c)
        });
    }

    let (cocat, epis, cowp) = canonical_cowp_finset(3, &b()).unwrap();
    if let Err(msg) = validate_co_well_powering(&cocat, &epis, &cowp, UniverseSpec::HF) {
        check(&mut errs, false, || format!("co-well-powering rejected: {}", msg));
    }
    for (n, bell) in [(1usize, 1usize), (2, 2), (3, 5)] {
        let family = cowp.families.get(&SetTerm::numeral(n));
        let got = family.map_or(0, |f| f.len());
        check(&mut errs, got == bell, || {
            format!("family at numeral {} has {} rows, expected Bell number {}", n, got, bell)
        });
    }

    let recovered = recover_m(&cat, &wp).unwrap();
    check(&mut errs, recovered.len() == cat.mors().len(), || {
        "member recovery skipped some morphisms".to_string()
    });
    for (mor, hit) in &recovered {
        check(&mut errs, hit.is_some() == graph_is_injective(mor.term), || {
            format!(
                "recovery marks {} as {}, injectivity says otherwise",
                mor,
                if hit.is_some() { "member" } else { "non-member" }
            )
        });
    }

    let renamed = WellPowering {
        families: wp
            .families
            .iter()
            .map(|(&c, rows)| {
                let rows = rows
                    .iter()
                    .map(|r| WpEntry {
                        index: SetTerm::singleton(r.index),
                        object: r.object,
                        mor: r.mor,
                    })
                    .collect();
                (c, rows)
            })
            .collect(),
        order: wp
            .order
            .iter()
            .map(|(&c, pairs)| {
                let pairs = pairs
                    .iter()
                    .map(|&(i, j)| (SetTerm::singleton(i), SetTerm::singleton(j)))
                    .collect();
                (c, pairs)
            })
            .collect(),
    };
    match wp_uniqueness_iso(&cat, &wp, &renamed) {
        Ok(iso) => {
            check(&mut errs, iso.per_object.len() == wp.families.len(), || {
                "uniqueness matching misses an object".to_string()
            });
            for (c, matches) in &iso.per_object {
                let family_len = wp.families.get(c).map_or(0, |f| f.len());
                check(&mut errs, matches.len() == family_len, || {
                    format!("matching at {} covers {} of {} indices", c, matches.len(), family_len)
                });
                for &(i1, i2, _) in matches {
                    check(&mut errs, i2 == SetTerm::singleton(i1), || {
                        format!("index {} at {} matched to {}", i1, c, i2)
                    });
                }
            }
        }
        Err(msg) => check(&mut errs, false, || format!("uniqueness matching failed: {}", msg)),
    }

    verdict("powerings: canonical families validate, subset order, Bell counts, recovery", errs);
}

#[test]
fn subobject_classifier_is_two_valued_and_stable() {
    let mut errs = Vec::new();

    let report = classifier_check(3, ThetaMode::Scott, &b()).unwrap();
    check(&mut errs, report.omega.card() == 2, || {
        format!("omega has {} elements", report.omega.card())
    });
    check(&mut errs, report.monos_checked > 0, || "no monos were checked".to_string());
    check(&mut errs, report.ok(), || {
        format!("classifier check failed: {}", report.failures.join("; "))
    });
    check(&mut errs, report.stable_next, || {
        "omega changes when the ambient category grows".to_string()
    });

    let omega2 = omega_star(2, ThetaMode::Scott, &b()).unwrap().term;
    let omega3 = omega_star(3, ThetaMode::Scott, &b()).unwrap().term;
    check(&mut errs, omega2 == omega3, || {
        format!("omega at m = 2 is {} but at m = 3 is {}", omega2, omega3)
    });

    verdict("classifier: omega is two-valued with unique verified chi, stable in m", errs);
}

fn random_matrix(rng: &mut StdRng, rows: usize, cols: usize) -> Matrix {
    let data = (0..rows * cols).map(|_| rng.gen_range(0..=5)).collect();
    Matrix::new(rows, cols, data).unwrap()
}

#[test]
fn multirelation_composition_is_a_category_with_proper_homsets() {
    let mut errs = Vec::new();

    let mut rng = StdRng::seed_from_u64(0x3a7);
    for round in 0..200 {
        let (m, n, p, q) = (
            rng.gen_range(0..=3),
            rng.gen_range(0..=3),
            rng.gen_range(0..=3),
            rng.gen_range(0..=3),
        );
        let a = random_matrix(&mut rng, m, n);
        let bb = random_matrix(&mut rng, n, p);
        let c = random_matrix(&mut rng, p, q);
        let left = multirel_compose(&multirel_compose(&a, &bb).unwrap(), &c).unwrap();
        let right = multirel_compose(&a, &multirel_compose(&bb, &c).unwrap()).unwrap();
        check(&mut errs, left == right, || {
            format!("associativity fails on round {} with dims {}x{}x{}x{}", round, m, n, p, q)
        });
        check(&mut errs, multirel_compose(&multirel_id(m), &a).unwrap() == a, || {
            format!("left unit fails on round {}", round)
        });
        check(&mut errs, multirel_compose(&a, &multirel_id(n)).unwrap() == a, || {
            format!("right unit fails on round {}", round)
        });
    }

    let desc = MultirelHomDesc { rows: 2, cols: 3 };
    check(&mut errs, desc.is_class(UniverseSpec::HF), || {
        "homset descriptor is not a class under HF".to_string()
    });
    check(&mut errs, !desc.is_small(UniverseSpec::HF), || {
        "homset descriptor is wrongly small under HF".to_string()
    });
    for n in 0..=8 {
        let u = UniverseSpec::Vn(n);
        check(&mut errs, !desc.is_small(u), || {
            format!("homset descriptor is wrongly small under V{}", n)
        });
        match desc.witness_not_small(u) {
            Some(w) => {
                let t = w.to_set_term(&b()).unwrap();
                check(&mut errs, !is_small(t, u), || {
                    format!("claimed witness under V{} is small after all", n)
                });
            }
            None => check(&mut errs, false, || format!("no escape witness under V{}", n)),
        }
    }

    verdict("multirelations: associativity and units on 200 triples, proper homset", errs);
}

#[test]
fn quotients_choose_one_representative_per_block() {
    let mut errs = Vec::new();
    let mut rng = StdRng::seed_from_u64(0x0520);

    for round in 0..100 {
        let n: usize = rng.gen_range(0..=5);
        let labels: Vec<usize> = (0..n).map(|_| rng.gen_range(0..5)).collect();
        let carrier = SetTerm::numeral(n);
        let elems = carrier.children();
        let mut pairs = Vec::new();
        for (i, &x) in elems.iter().enumerate() {
            for (j, &y) in elems.iter().enumerate() {
                if labels[i] == labels[j] {
                    pairs.push((x, y));
                }
            }
        }
        let rel = EquivRelation::new(carrier, pairs).unwrap();
        let mut blocks: Vec<SetTerm> = Vec::new();
        for lab in 0..5 {
            let members: Vec<SetTerm> = (0..n).filter(|&i| labels[i] == lab).map(|i| elems[i]).collect();
            if !members.is_empty() {
                blocks.push(canon(members));
            }
        }
        for mode in [ThetaMode::Scott, ThetaMode::Choice] {
            let q = quotient_star(carrier, &rel, mode).unwrap();
            check(&mut errs, q.card() == blocks.len(), || {
                format!("round {}: {} blocks but {} representatives", round, blocks.len(), q.card())
            });
            for &block in &blocks {
                let hits = q
                    .children()
                    .iter()
                    .filter(|&&rep| match mode {
                        ThetaMode::Choice => block.contains(rep),
                        ThetaMode::Scott => rep.card() > 0 && subset_of(rep, block),
                    })
                    .count();
                check(&mut errs, hits == 1, || {
                    format!("round {}: block {} has {} representatives", round, block, hits)
                });
            }
        }
    }

    for round in 0..100 {
        let lo: Vec<SetTerm> =
            (0..rng.gen_range(1..=4)).map(|_| decode(rng.gen_range(0..30000))).collect();
        let hi: Vec<SetTerm> =
            (0..rng.gen_range(1..=4)).map(|_| decode(rng.gen_range(30000..60000))).collect();
        let a = canon(lo);
        let c = canon(hi);
        for mode in [ThetaMode::Scott, ThetaMode::Choice] {
            let ta = theta(a, mode).unwrap();
            let tc = theta(c, mode).unwrap();
            check(&mut errs, ta != tc, || {
                format!("round {}: disjoint sets share the canonical datum {}", round, ta)
            });
        }
    }

    verdict("quotients: one representative per block, theta separates disjoint sets", errs);
}

// ---- Golden CLI transcript ---- //

/// Printed set terms consist solely of braces and commas. Harvests every
/// maximal balanced such span from a line of tool output.
fn harvest_terms(line: &str) -> Vec<String> {
    let bytes = line.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        if bytes[i] == b'{' {
            if let Some(end) = balanced_end(bytes, i) {
                out.push(line[i..end].to_string());
                i = end;
                continue;
            }
        }
        i += 1;
    }
    out
}

fn balanced_end(bytes: &[u8], start: usize) -> Option<usize> {
    let mut depth = 0usize;
    for (j, &byte) in bytes.iter().enumerate().skip(start) {
        match byte {
            b'{' => depth += 1,
            b'}' => {
                depth -= 1;
                if depth == 0 {
                    return Some(j + 1);
                }
            }
            b',' => {}
            _ => return None,
        }
    }
    None
}

fn roundtrip_json_terms(v: &serde_json::Value, errs: &mut Vec<String>, count: &mut usize) {
    match v {
        serde_json::Value::String(s) => {
            if s.starts_with('{') && s.bytes().all(|c| matches!(c, b'{' | b'}' | b',')) {
                match parse_term_str(s, &Bindings::new(), &b()) {
                    Ok(t) => {
                        check(errs, t.to_string() == *s, || {
                            format!("document term {} reprints as {}", s, t)
                        });
                        *count += 1;
                    }
                    Err(e) => check(errs, false, || format!("document term {} fails to parse: {}", s, e)),
                }
            }
        }
        serde_json::Value::Array(items) => {
            for item in items {
                roundtrip_json_terms(item, errs, count);
            }
        }
        serde_json::Value::Object(map) => {
            for item in map.values() {
                roundtrip_json_terms(item, errs, count);
            }
        }
        _ => {}
    }
}

#[test]
fn golden_script_reproduces_and_round_trips() {
    let mut errs = Vec::new();
    let data = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data");
    let bin = env!("CARGO_BIN_EXE_hflab");

    let run = || {
        Command::new(bin)
            .arg("run")
            .arg(data.join("golden.cmds"))
            .output()
            .expect("golden script runs")
    };
    let first = run();
    let second = run();

    // The script deliberately exercises two verification failures, so the
    // worst status across its 30 commands is 1.
    check(&mut errs, first.status.code() == Some(1), || {
        format!("exit status {:?}, expected 1", first.status.code())
    });
    let frozen = std::fs::read(data.join("golden.out")).expect("frozen transcript present");
    check(&mut errs, first.stdout == frozen, || {
        "transcript deviates from the frozen golden output".to_string()
    });
    check(&mut errs, first.stdout == second.stdout, || {
        "two runs of the same script disagree".to_string()
    });

    let text = String::from_utf8(first.stdout).expect("transcript is utf-8");
    let mut harvested = 0usize;
    for line in text.lines().filter(|l| !l.starts_with("> ")) {
        for tok in harvest_terms(line) {
            match parse_term_str(&tok, &Bindings::new(), &b()) {
                Ok(t) => {
                    check(&mut errs, t.to_string() == tok, || {
                        format!("printed term {} reprints as {}", tok, t)
                    });
                    harvested += 1;
                }
                Err(e) => check(&mut errs, false, || format!("printed term {} fails to parse: {}", tok, e)),
            }
        }
    }
    check(&mut errs, harvested > 100, || {
        format!("only {} terms harvested from the transcript", harvested)
    });

    // Document mode: every term-valued field in the JSON output parses back
    // to the exact same string.
    let mut session = Session::new(data.clone());
    session.format = Format::Doc;
    let mut doc_terms = 0usize;
    for cmd in [
        "pow 3",
        "pair 2 3",
        "unack 4242",
        "theta {1,2,3}",
        "quot 3 {(0,0),(1,1),(2,2),(1,2),(2,1)}",
        "axioms --universe V2",
    ] {
        let outcome = run_command(cmd, &mut session);
        check(&mut errs, outcome.status == Status::Ok, || {
            format!("doc-mode `{}` did not succeed", cmd)
        });
        for line in outcome.text.lines() {
            match serde_json::from_str::<serde_json::Value>(line) {
                Ok(v) => roundtrip_json_terms(&v, &mut errs, &mut doc_terms),
                Err(e) => check(&mut errs, false, || {
                    format!("doc-mode `{}` emitted invalid JSON: {}", cmd, e)
                }),
            }
        }
    }
    check(&mut errs, doc_terms > 10, || {
        format!("only {} terms round-tripped from document output", doc_terms)
    });

    verdict("cli: golden transcript byte-identical, all printed terms round-trip", errs);
}
