//! Priority synthesis: fault localization, clause construction, SAT
//! resolution and repushing.

pub mod cnf;
pub mod dpll;

use std::time::Instant;

use serde::Serialize;

pub use cnf::{CandidateFilter, ClauseKind, Cnf, PriorityVar};

use crate::encode::{Encoded, Ordering};
use crate::game::{self, Control, Cube, GameError, Objective};
use crate::model::{PrioritySet, System};

/// Synthesis parameters.
#[derive(Clone, Debug)]
pub struct SynthOptions {
    pub objective: Objective,
    pub ordering: Ordering,
    pub repush_depth: usize,
    pub filter: CandidateFilter,
}

impl SynthOptions {
    pub fn new(objective: impl Into<Objective>) -> SynthOptions {
        SynthOptions {
            objective: objective.into(),
            ordering: Ordering::Decl,
            repush_depth: 0,
            filter: CandidateFilter::default(),
        }
    }

    pub fn ordering(mut self, o: Ordering) -> Self {
        self.ordering = o;
        self
    }

    pub fn repush_depth(mut self, d: usize) -> Self {
        self.repush_depth = d;
        self
    }

    pub fn filter(mut self, f: CandidateFilter) -> Self {
        self.filter = f;
        self
    }
}

/// Figures for one localization-and-resolution round.
#[derive(Clone, Debug, Default, Serialize)]
pub struct RoundStats {
    pub variables: usize,
    pub attractor_iterations: usize,
    pub attractor_nodes: usize,
    pub reachable_nodes: usize,
    pub cubes: usize,
    pub sat_variables: usize,
    pub sat_clauses: usize,
    pub millis: u128,
}

/// Fault cubes of a system together with the round statistics.
#[derive(Clone, Debug)]
pub struct Localized {
    pub cubes: Vec<Cube>,
    pub stats: RoundStats,
}

/// Runs the safety game and groups the fault edges into cubes.
pub fn localize(
    s: &System,
    objective: Objective,
    ordering: Ordering,
    filter: &CandidateFilter,
) -> Result<Localized, GameError> {
    let mut e = Encoded::new(s, ordering);
    localize_encoded(&mut e, objective, filter)
}

/// As [`localize`]; escapes only count through interactions the filter
/// admits as the higher side, and moves it cannot suppress are forced.
pub fn localize_encoded(
    e: &mut Encoded,
    objective: Objective,
    filter: &CandidateFilter,
) -> Result<Localized, GameError> {
    let bad = game::objective_states(e, objective);
    let control = Control {
        high: filter.high.clone(),
        low: filter.low.clone(),
    };
    let attr = game::attractor_controlled(e, bad, &control);
    let mut stats = RoundStats {
        variables: e.var_count(),
        attractor_iterations: attr.iterations(),
        attractor_nodes: e.manager.node_count(attr.set),
        ..RoundStats::default()
    };
    if !e.manager.and(e.p_ini, attr.set).is_false() {
        return Err(GameError::InitialInAttractor);
    }
    let reach = game::reachable(e);
    stats.reachable_nodes = e.manager.node_count(reach.set);
    let fs = game::fault_transitions(e, &attr, &reach)?;
    let cubes = game::candidate_cubes(e, &fs);
    stats.cubes = cubes.len();
    Ok(Localized { cubes, stats })
}

/// Why synthesis gave up.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Failure {
    /// The initial configuration is already losing.
    InitialInAttractor,
    /// The clauses are unsatisfiable and no repush remains; `conflict`
    /// lists the cubes of a minimal conflicting subset.
    Unsat { conflict: Vec<Cube> },
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::InitialInAttractor => write!(
                f,
                "unsynthesizable from initial state: the initial configuration lies in the risk attractor"
            ),
            Failure::Unsat { conflict } => {
                write!(f, "unsat: {} conflicting fault cube(s)", conflict.len())
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    /// `priorities` are the pairs to add to the system's own; `repushed`
    /// is the subset committed by repushing.
    Success {
        priorities: PrioritySet,
        repushed: PrioritySet,
    },
    Failure(Failure),
}

impl Outcome {
    pub fn is_success(&self) -> bool {
        matches!(self, Outcome::Success { .. })
    }

    pub fn priorities(&self) -> Option<&PrioritySet> {
        match self {
            Outcome::Success { priorities, .. } => Some(priorities),
            Outcome::Failure(_) => None,
        }
    }
}

/// Result of [`synthesize`]: the outcome, per-round figures and the last
/// round's cubes and clauses.
#[derive(Clone, Debug)]
pub struct Synthesis {
    pub outcome: Outcome,
    pub rounds: Vec<RoundStats>,
    pub cubes: Vec<Cube>,
    pub cnf: Option<Cnf>,
}

/// Builds the closed clause set for `cubes` on system `s`.
pub fn build_cnf(cubes: &[Cube], existing: &PrioritySet, filter: &CandidateFilter) -> Cnf {
    let mut f = Cnf::new();
    f.add_cubes(cubes, filter);
    f.add_existing(existing);
    f.close();
    f
}

/// Picks the repush priority: the lowest conflicting cube's first
/// candidate that keeps the priorities acyclic.
fn repush_choice(
    s: &System,
    cnf: &Cnf,
    cubes: &[Cube],
    core: &[usize],
    filter: &CandidateFilter,
) -> Option<PriorityVar> {
    let mut core_cubes: Vec<usize> = core
        .iter()
        .filter_map(|k| cnf.cube_of.get(k).copied())
        .collect();
    core_cubes.sort_unstable();
    core_cubes.dedup();
    for ci in core_cubes {
        for p in filter.candidates(&cubes[ci]) {
            let mut trial = s.priorities().clone();
            trial.insert(p.low, p.high);
            if trial.closure_and_validate().is_ok() {
                return Some(p);
            }
        }
    }
    None
}

/// Computes priorities under which `s` avoids the objective's bad states.
pub fn synthesize(s: &System, opts: &SynthOptions) -> Synthesis {
    let mut current = s.clone();
    let mut repushed = PrioritySet::new();
    let mut rounds = Vec::new();
    let mut depth = opts.repush_depth;
    loop {
        let start = Instant::now();
        let loc = match localize(&current, opts.objective, opts.ordering, &opts.filter) {
            Ok(l) => l,
            Err(_) => {
                return Synthesis {
                    outcome: Outcome::Failure(Failure::InitialInAttractor),
                    rounds,
                    cubes: Vec::new(),
                    cnf: None,
                }
            }
        };
        let mut stats = loc.stats;
        let cnf = build_cnf(&loc.cubes, current.priorities(), &opts.filter);
        stats.sat_variables = cnf.vars.len();
        stats.sat_clauses = cnf.clauses.len();
        let model = cnf.solve();
        stats.millis = start.elapsed().as_millis();
        rounds.push(stats);
        if let Some(m) = model {
            let mut priorities = cnf.extract(&m, current.priorities());
            priorities = priorities.union(&repushed);
            return Synthesis {
                outcome: Outcome::Success {
                    priorities,
                    repushed,
                },
                rounds,
                cubes: loc.cubes,
                cnf: Some(cnf),
            };
        }
        let core = cnf.candidate_core().unwrap_or_default();
        let choice = if depth > 0 {
            repush_choice(&current, &cnf, &loc.cubes, &core, &opts.filter)
        } else {
            None
        };
        let Some(p) = choice else {
            let mut conflict: Vec<Cube> = core
                .iter()
                .filter_map(|k| cnf.cube_of.get(k).map(|&c| loc.cubes[c].clone()))
                .collect();
            conflict.sort();
            conflict.dedup();
            return Synthesis {
                outcome: Outcome::Failure(Failure::Unsat { conflict }),
                rounds,
                cubes: loc.cubes,
                cnf: Some(cnf),
            };
        };
        depth -= 1;
        repushed.insert(p.low, p.high);
        let mut next = current.priorities().clone();
        next.insert(p.low, p.high);
        current = current
            .with_priorities(next)
            .expect("repush choice keeps the priorities acyclic");
    }
}
