//! Toy universes over the hereditarily finite sets.
//!
//! `HF` is the full (unbounded) universe; `Vn(n)` is the cumulative stage of
//! all sets of rank < n. HF satisfies every universe axiom; no Vn does, and
//! the checker produces the explicit escaping witnesses. Smallness and
//! class-hood relative to a universe are the primitive size notions
//! everything downstream builds on.

use serde::Serialize;
use std::fmt;

use crate::budget::Budget;
use crate::set::SetTerm;

/// Which universe membership is judged against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum UniverseSpec {
    /// All hereditarily finite sets. Every term is small.
    HF,
    /// Sets of rank < n.
    Vn(u32),
}

impl fmt::Display for UniverseSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            UniverseSpec::HF => f.write_str("HF"),
            UniverseSpec::Vn(n) => write!(f, "V{}", n),
        }
    }
}

/// Membership in the universe: x is small when x is an element of it.
pub fn is_small(x: SetTerm, u: UniverseSpec) -> bool {
    match u {
        UniverseSpec::HF => true,
        UniverseSpec::Vn(n) => x.rank() < n,
    }
}

/// Subset of the universe: x is a class when every element is small.
/// Classes may themselves fail to be small (that is the whole point).
pub fn is_class(x: SetTerm, u: UniverseSpec) -> bool {
    x.children().iter().all(|&c| is_small(c, u))
}

// ---- Axiom checking ---- //

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Clause {
    Transitivity,
    EmptySet,
    Pairing,
    Union,
    Powerset,
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Clause::Transitivity => "transitivity",
            Clause::EmptySet => "empty-set",
            Clause::Pairing => "pairing",
            Clause::Union => "union",
            Clause::Powerset => "powerset",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Serialize)]
pub enum Verdict {
    /// Holds, by the stated rank argument.
    Pass { note: String },
    /// Fails; the witness terms escape the universe as described.
    Fail { witness: Vec<SetTerm>, note: String },
    /// Vacuous: the universe has no elements to quantify over.
    NotApplicable { note: String },
}

impl Verdict {
    pub fn is_fail(&self) -> bool {
        matches!(self, Verdict::Fail { .. })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct AxiomReport {
    pub universe: UniverseSpec,
    pub clauses: Vec<(Clause, Verdict)>,
}

impl AxiomReport {
    pub fn all_pass(&self) -> bool {
        self.clauses.iter().all(|(_, v)| !v.is_fail())
    }

    pub fn verdict(&self, clause: Clause) -> &Verdict {
        &self.clauses.iter().find(|(c, _)| *c == clause).expect("all clauses present").1
    }
}

impl fmt::Display for AxiomReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "universe {}", self.universe)?;
        for (clause, verdict) in &self.clauses {
            match verdict {
                Verdict::Pass { note } => writeln!(f, "  {}: pass ({})", clause, note)?,
                Verdict::Fail { witness, note } => {
                    let ws: Vec<String> = witness.iter().map(|w| w.to_string()).collect();
                    writeln!(f, "  {}: FAIL witness {} ({})", clause, ws.join(" "), note)?
                }
                Verdict::NotApplicable { note } => {
                    writeln!(f, "  {}: not applicable ({})", clause, note)?
                }
            }
        }
        Ok(())
    }
}

/// Least term of the given rank: iterated singleton of the empty set.
/// First witness an ascending-code search would find, used directly.
fn min_rank_term(k: u32) -> SetTerm {
    let mut t = SetTerm::empty();
    for _ in 0..k {
        t = SetTerm::singleton(t);
    }
    t
}

/// Checks the five universe closure clauses. HF passes all of them by rank
/// arithmetic; Vn(n) is transitive and union-closed but escapes through
/// pairing and powerset at rank n-1, and V0 does not even contain the empty
/// set. Witnesses are the code-least escaping instances.
pub fn check_universe_axioms(u: UniverseSpec, _budget: &Budget) -> AxiomReport {
    let clauses = match u {
        UniverseSpec::HF => vec![
            (
                Clause::Transitivity,
                Verdict::Pass { note: "elements of finite-rank sets have finite rank".into() },
            ),
            (
                Clause::EmptySet,
                Verdict::Pass { note: "rank 0 is finite".into() },
            ),
            (
                Clause::Pairing,
                Verdict::Pass { note: "rank {x,y} = max rank + 1, still finite".into() },
            ),
            (
                Clause::Union,
                Verdict::Pass { note: "union of an HF family of HF sets is HF".into() },
            ),
            (
                Clause::Powerset,
                Verdict::Pass { note: "rank P(A) = rank A + 1, still finite".into() },
            ),
        ],
        UniverseSpec::Vn(n) => {
            let mut out = Vec::new();
            out.push((
                Clause::Transitivity,
                Verdict::Pass {
                    note: format!("rank of an element is below the set's rank, so below {}", n),
                },
            ));
            out.push((
                Clause::EmptySet,
                if n >= 1 {
                    Verdict::Pass { note: format!("rank 0 < {}", n) }
                } else {
                    Verdict::Fail {
                        witness: vec![SetTerm::empty()],
                        note: "V0 is empty".into(),
                    }
                },
            ));
            if n == 0 {
                out.push((
                    Clause::Pairing,
                    Verdict::NotApplicable { note: "no elements to pair".into() },
                ));
                out.push((
                    Clause::Union,
                    Verdict::NotApplicable { note: "no families to unite".into() },
                ));
                out.push((
                    Clause::Powerset,
                    Verdict::NotApplicable { note: "no elements to take powersets of".into() },
                ));
            } else {
                let x = min_rank_term(n - 1);
                let pair = SetTerm::doubleton(x, SetTerm::empty());
                out.push((
                    Clause::Pairing,
                    Verdict::Fail {
                        witness: vec![x, SetTerm::empty(), pair],
                        note: format!("the pair has rank {}, not below {}", pair.rank(), n),
                    },
                ));
                out.push((
                    Clause::Union,
                    Verdict::Pass {
                        note: format!(
                            "a union's elements are members of members, so its rank stays below {}",
                            n
                        ),
                    },
                ));
                let a = min_rank_term(n - 1);
                out.push((
                    Clause::Powerset,
                    Verdict::Fail {
                        witness: vec![a],
                        note: format!("P(A) has rank {}, not below {}", a.rank() + 1, n),
                    },
                ));
            }
            out
        }
    };
    AxiomReport { universe: u, clauses }
}
