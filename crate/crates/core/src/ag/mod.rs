//! Assume-guarantee priority synthesis for behavioral safety. The system is
//! split into two sides; an assumption automaton learned by L* mediates
//! between them, and local priorities for both sides are resolved jointly.

pub mod lstar;

use std::collections::BTreeSet;

use rustc_hash::FxHashSet;
use thiserror::Error;

pub use lstar::{distinguishing_word, lstar, DfaTeacher, LStarError, Learner, Teacher};

use crate::encode::{Encoded, Ordering};
use crate::explicit::{self, ReachGraph};
use crate::game::{self, Cube, Objective};
use crate::model::{AlphabetSplit, InteractionId, ModelError, PrioritySet, System};
use crate::monitor::{product_with_monitors, stutter_component, Dfa, MonitorError, RiskRule};
use crate::resolve::{self, CandidateFilter, Cnf};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AgError {
    #[error(
        "priority {low} < {high} ranks the shared interaction `{high}` higher; \
         shared interactions may not be the higher element, otherwise a side can \
         block a word the whole system performs and the decomposition is unsound"
    )]
    SharedHigher { low: String, high: String },
    #[error("invalid split: {0}")]
    Split(&'static str),
    #[error(transparent)]
    Monitor(#[from] MonitorError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    LStar(#[from] LStarError),
}

/// The two side systems `S1+` and `S2+` of a split, without legality
/// checks. Each keeps its own components plus a stutter component over the
/// other side's private labels, and the closed priorities whose higher
/// element it can observe.
pub fn decompose(s: &System, first: &BTreeSet<usize>) -> Result<(System, System), ModelError> {
    let split = s.split_unchecked(first);
    let side =
        |mine: bool, own: &BTreeSet<InteractionId>, other: &BTreeSet<InteractionId>, d: &str| {
            let mut comps: Vec<_> = s
                .components()
                .iter()
                .enumerate()
                .filter(|(i, _)| first.contains(i) == mine)
                .map(|(_, c)| c.clone())
                .collect();
            let mut name = d.to_string();
            while comps.iter().any(|c| c.name == name) {
                name.push('\'');
            }
            comps.push(stutter_component(&name, other));
            let visible: BTreeSet<InteractionId> = own.union(&split.shared).copied().collect();
            let p: PrioritySet = s
                .priority_closure()
                .iter()
                .filter(|(_, h)| visible.contains(h))
                .collect();
            System::new(comps, s.interactions().to_vec(), p, Vec::new())
        };
    Ok((
        side(true, &split.first_only, &split.second_only, "d1")?,
        side(false, &split.second_only, &split.first_only, "d2")?,
    ))
}

/// A split system with its risk automaton.
#[derive(Clone, Debug)]
pub struct AgProblem {
    pub system: System,
    pub first: BTreeSet<usize>,
    pub risk: Dfa,
    pub split: AlphabetSplit,
    pub s1: System,
    pub s2: System,
}

impl AgProblem {
    /// Validates the split and priorities. The second side may be empty.
    pub fn new(system: System, first: BTreeSet<usize>, risk: Dfa) -> Result<AgProblem, AgError> {
        if first.is_empty() {
            return Err(AgError::Split("first side is empty"));
        }
        if first.iter().any(|&c| c >= system.components().len()) {
            return Err(AgError::Split("component index out of range"));
        }
        if let Some(a) = risk
            .alphabet
            .iter()
            .find(|a| system.interaction_index(a).is_none())
        {
            return Err(MonitorError::LetterNotInSystem(a.clone()).into());
        }
        let split = system.split_unchecked(&first);
        if let Some((l, h)) = system
            .priorities()
            .iter()
            .find(|(_, h)| split.shared.contains(h))
        {
            return Err(AgError::SharedHigher {
                low: system.interaction_name(l).to_string(),
                high: system.interaction_name(h).to_string(),
            });
        }
        let (s1, s2) = decompose(&system, &first)?;
        Ok(AgProblem {
            system,
            first,
            risk,
            split,
            s1,
            s2,
        })
    }

    /// Letters of the assumption automaton: all interactions, by index.
    pub fn alphabet(&self) -> Vec<String> {
        self.system.interactions().to_vec()
    }

    fn first_filter(&self) -> CandidateFilter {
        CandidateFilter {
            low: Some(
                self.split
                    .first_only
                    .union(&self.split.shared)
                    .copied()
                    .collect(),
            ),
            high: Some(self.split.first_only.clone()),
        }
    }

    fn second_filter(&self) -> CandidateFilter {
        CandidateFilter {
            low: Some(
                self.split
                    .second_only
                    .union(&self.split.shared)
                    .copied()
                    .collect(),
            ),
            high: Some(self.split.second_only.clone()),
        }
    }

    /// `S1+ × R × A`, risky where both monitors accept.
    pub fn first_product(&self, a: &Dfa) -> Result<System, AgError> {
        Ok(product_with_monitors(
            &self.s1,
            &[self.risk.clone(), a.clone()],
            RiskRule::Replace,
        )?)
    }

    /// `S2+ × Ā`, risky where the assumption rejects.
    pub fn second_product(&self, a: &Dfa) -> Result<System, AgError> {
        Ok(product_with_monitors(
            &self.s2,
            &[a.complement()],
            RiskRule::Replace,
        )?)
    }
}

/// Membership in a system's language, by explicit graph walk when the
/// reachable set fits the budget and by symbolic image steps otherwise.
pub enum Oracle {
    Explicit(ReachGraph),
    Symbolic(Box<Encoded>),
}

impl Oracle {
    pub fn new(s: &System, budget: usize) -> Oracle {
        match explicit::reach(s, budget) {
            Ok(g) => Oracle::Explicit(g),
            Err(_) => Oracle::symbolic(s),
        }
    }

    pub fn symbolic(s: &System) -> Oracle {
        Oracle::Symbolic(Box::new(Encoded::new(s, Ordering::Decl)))
    }

    pub fn member(&mut self, w: &[InteractionId]) -> bool {
        match self {
            Oracle::Explicit(g) => {
                let mut cur: FxHashSet<u32> = FxHashSet::default();
                cur.insert(0);
                for &sigma in w {
                    cur = cur
                        .iter()
                        .flat_map(|&i| g.edges[i as usize].iter())
                        .filter(|&&(l, _)| l == sigma)
                        .map(|&(_, t)| t)
                        .collect();
                    if cur.is_empty() {
                        return false;
                    }
                }
                true
            }
            Oracle::Symbolic(e) => {
                let mut set = e.p_ini;
                for &sigma in w {
                    set = e.post(set, e.t0);
                    let x = e.executed(sigma);
                    let step = e.manager.and(e.t1, x);
                    set = e.post(set, step);
                    if set.is_false() {
                        return false;
                    }
                }
                true
            }
        }
    }
}

/// A word reaching a risk configuration, found by symbolic reachability.
pub fn risk_word(s: &System) -> Option<Vec<InteractionId>> {
    let mut e = Encoded::new(s, Ordering::Decl);
    game::violation_word(&mut e, Objective::Risk)
}

/// Which rule condition a counterexample violates.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Condition {
    /// A risk word of the first side that the assumption admits.
    First,
    /// A word of the second side outside the assumption.
    Second,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Check {
    BothHold,
    Counterexample {
        word: Vec<InteractionId>,
        condition: Condition,
    },
    /// A risk word of the first side that the second side also performs.
    Fail {
        word: Vec<InteractionId>,
    },
}

/// Tests the first condition, then the second, under the existing
/// priorities.
pub fn equivalence_check(p: &AgProblem, a: &Dfa, oracle: &mut Oracle) -> Result<Check, AgError> {
    if let Some(word) = risk_word(&p.first_product(a)?) {
        return Ok(if oracle.member(&word) {
            Check::Fail { word }
        } else {
            Check::Counterexample {
                word,
                condition: Condition::First,
            }
        });
    }
    if let Some(word) = risk_word(&p.second_product(a)?) {
        return Ok(Check::Counterexample {
            word,
            condition: Condition::Second,
        });
    }
    Ok(Check::BothHold)
}

/// Local clause set of one side's product, or `None` when its initial
/// configuration is already lost.
fn side_clauses(product: &System, filter: &CandidateFilter) -> Option<(Cnf, Vec<Cube>)> {
    let loc = resolve::localize(product, Objective::Risk, Ordering::Decl, filter).ok()?;
    let mut f = Cnf::new();
    f.add_cubes(&loc.cubes, filter);
    f.add_existing(product.priorities());
    Some((f, loc.cubes))
}

/// Priorities of one successful joint resolution, by side.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Resolution {
    pub first: PrioritySet,
    pub second: PrioritySet,
}

/// Solves the conjunction of both sides' clause sets under `a`.
pub fn resolve_jointly(p: &AgProblem, a: &Dfa) -> Result<Option<Resolution>, AgError> {
    let Some((f1, c1)) = side_clauses(&p.first_product(a)?, &p.first_filter()) else {
        return Ok(None);
    };
    let Some((f2, _)) = side_clauses(&p.second_product(a)?, &p.second_filter()) else {
        return Ok(None);
    };
    let mut f = Cnf::new();
    f.absorb(&f1, 0);
    f.absorb(&f2, c1.len());
    f.add_existing(p.system.priorities());
    f.close();
    let Some(model) = f.solve() else {
        return Ok(None);
    };
    let all = f.extract(&model, p.system.priorities());
    let pick =
        |side: &BTreeSet<InteractionId>| all.iter().filter(|(_, h)| side.contains(h)).collect();
    Ok(Some(Resolution {
        first: pick(&p.split.first_only),
        second: pick(&p.split.second_only),
    }))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AgOutcome {
    /// Both conditions hold without new priorities.
    ProvedSafe,
    Success(Resolution),
    /// A risk word of the first side is also a word of the second; another
    /// split may succeed.
    Fail {
        counterexample: Vec<InteractionId>,
    },
}

/// One conjecture of the learning loop.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AgRound {
    pub states: usize,
    pub check: Check,
    pub resolved: bool,
}

#[derive(Clone, Debug)]
pub struct AgReport {
    pub outcome: AgOutcome,
    pub rounds: Vec<AgRound>,
    pub assumption: Dfa,
}

impl AgReport {
    pub fn conjecture_sizes(&self) -> Vec<usize> {
        self.rounds.iter().map(|r| r.states).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AgOptions {
    pub max_conjectures: usize,
    pub budget: usize,
}

impl Default for AgOptions {
    fn default() -> Self {
        AgOptions {
            max_conjectures: 50,
            budget: explicit::DEFAULT_BUDGET,
        }
    }
}

/// The learning loop: conjecture, check, resolve, refine.
pub fn ag_synthesize(p: &AgProblem, opts: AgOptions) -> Result<AgReport, AgError> {
    let mut oracle = Oracle::new(&p.s2, opts.budget);
    let mut learner = Learner::new(p.alphabet(), opts.max_conjectures);
    let mut rounds = Vec::new();
    loop {
        let a = learner.conjecture(&mut |w| oracle.member(w))?;
        let check = equivalence_check(p, &a, &mut oracle)?;
        if check == Check::BothHold {
            rounds.push(AgRound {
                states: a.len(),
                check,
                resolved: false,
            });
            return Ok(AgReport {
                outcome: AgOutcome::ProvedSafe,
                rounds,
                assumption: a,
            });
        }
        let resolution = resolve_jointly(p, &a)?;
        rounds.push(AgRound {
            states: a.len(),
            check: check.clone(),
            resolved: resolution.is_some(),
        });
        if let Some(r) = resolution {
            return Ok(AgReport {
                outcome: AgOutcome::Success(r),
                rounds,
                assumption: a,
            });
        }
        match check {
            Check::Fail { word } => match risk_word(&p.second_product(&a)?) {
                Some(second) => learner.refine(&mut |w| oracle.member(w), &a, &second)?,
                None => {
                    return Ok(AgReport {
                        outcome: AgOutcome::Fail {
                            counterexample: word,
                        },
                        rounds,
                        assumption: a,
                    })
                }
            },
            Check::Counterexample { word, .. } => {
                learner.refine(&mut |w| oracle.member(w), &a, &word)?
            }
            Check::BothHold => unreachable!(),
        }
    }
}
