//! Explicit-state semantics: enabledness with priorities, successor
//! computation, breadth-first reachability, verdicts and word membership.

use std::fmt::Write;

use rustc_hash::{FxHashMap, FxHashSet};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{Configuration, InteractionId, LocalState, System};

pub const DEFAULT_BUDGET: usize = 2_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExplicitError {
    #[error("state budget of {0} configurations exceeded")]
    Budget(usize),
    #[error("interaction `{0}` is not enabled")]
    NotEnabled(String),
}

/// Which reachable configurations count as violations.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Deadlock,
    Risk,
    Both,
}

impl Mode {
    pub fn deadlock(self) -> bool {
        matches!(self, Mode::Deadlock | Mode::Both)
    }

    pub fn risk(self) -> bool {
        matches!(self, Mode::Risk | Mode::Both)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Reason {
    Deadlock,
    Risk,
}

/// Path from the initial configuration; each step is the executed
/// interaction and the configuration it leads to.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Trace {
    pub initial: Configuration,
    pub steps: Vec<(InteractionId, Configuration)>,
}

impl Trace {
    pub fn word(&self) -> Vec<InteractionId> {
        self.steps.iter().map(|&(s, _)| s).collect()
    }

    pub fn last(&self) -> &Configuration {
        self.steps.last().map(|(_, c)| c).unwrap_or(&self.initial)
    }

    /// One line per step: `<interaction>  ->  comp@loc[vals] ...`.
    pub fn render(&self, s: &System) -> String {
        let mut out = format!("init  ->  {}\n", s.format_configuration(&self.initial));
        for (sigma, c) in &self.steps {
            let _ = writeln!(
                out,
                "{}  ->  {}",
                s.interaction_name(*sigma),
                s.format_configuration(c)
            );
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Safe,
    Unsafe { trace: Trace, reason: Reason },
}

impl Verdict {
    pub fn is_safe(&self) -> bool {
        matches!(self, Verdict::Safe)
    }
}

/// Interactions that pass joint participation in `c`, ignoring priorities.
/// For the ♯ interaction of an abstract system one capable component
/// suffices.
pub fn raised(s: &System, c: &Configuration) -> Vec<bool> {
    let n = s.interactions().len();
    let mut count = vec![0usize; n];
    let mut seen = vec![usize::MAX; n];
    for (ci, local) in c.locals.iter().enumerate() {
        for t in s.outgoing(ci, local.location as usize) {
            if seen[t.label] != ci && t.guard.eval(local.valuation) {
                seen[t.label] = ci;
                count[t.label] += 1;
            }
        }
    }
    (0..n)
        .map(|sigma| {
            if Some(sigma) == s.sharp() {
                count[sigma] > 0
            } else {
                count[sigma] == s.participants(sigma).len()
            }
        })
        .collect()
}

/// Enabled interactions: raised, and no raised interaction above them in the
/// priority closure.
pub fn enabled(s: &System, c: &Configuration) -> Vec<InteractionId> {
    let r = raised(s, c);
    enabled_from_raised(s, &r)
}

pub(crate) fn enabled_from_raised(s: &System, r: &[bool]) -> Vec<InteractionId> {
    (0..r.len())
        .filter(|&sigma| r[sigma] && !s.higher_than(sigma).iter().any(|&h| r[h]))
        .collect()
}

/// Successor configurations of `c` under `sigma`, sorted and deduplicated.
pub fn successors(
    s: &System,
    c: &Configuration,
    sigma: InteractionId,
) -> Result<Vec<Configuration>, ExplicitError> {
    if !enabled(s, c).contains(&sigma) {
        return Err(ExplicitError::NotEnabled(s.interaction_name(sigma).into()));
    }
    Ok(successors_unchecked(s, c, sigma))
}

/// Successors assuming `sigma` is enabled.
pub(crate) fn successors_unchecked(
    s: &System,
    c: &Configuration,
    sigma: InteractionId,
) -> Vec<Configuration> {
    let sharp = Some(sigma) == s.sharp();
    // Per participant: possible next local states; `None` = stutter.
    let options: Vec<(usize, Vec<Option<LocalState>>)> = s
        .participants(sigma)
        .iter()
        .map(|&ci| {
            let local = c.locals[ci];
            let mut opts: Vec<Option<LocalState>> = s
                .outgoing(ci, local.location as usize)
                .filter(|t| t.label == sigma && t.guard.eval(local.valuation))
                .map(|t| {
                    Some(LocalState {
                        location: t.destination as u32,
                        valuation: t.apply(local.valuation),
                    })
                })
                .collect();
            if sharp {
                opts.push(None);
            }
            (ci, opts)
        })
        .collect();
    let mut out = Vec::new();
    let mut idx = vec![0usize; options.len()];
    if options.iter().any(|(_, o)| o.is_empty()) {
        return out;
    }
    loop {
        let mut next = c.clone();
        let mut moved = false;
        for (k, (ci, opts)) in options.iter().enumerate() {
            if let Some(l) = opts[idx[k]] {
                next.locals[*ci] = l;
                moved = true;
            }
        }
        if moved {
            out.push(next);
        }
        let mut k = 0;
        loop {
            if k == idx.len() {
                out.sort();
                out.dedup();
                return out;
            }
            idx[k] += 1;
            if idx[k] < options[k].1.len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}

/// All `(interaction, successor)` pairs of `c`.
pub fn step(s: &System, c: &Configuration) -> Vec<(InteractionId, Configuration)> {
    enabled(s, c)
        .into_iter()
        .flat_map(|sigma| {
            successors_unchecked(s, c, sigma)
                .into_iter()
                .map(move |n| (sigma, n))
        })
        .collect()
}

/// Reachable configurations in breadth-first discovery order.
#[derive(Clone, Debug)]
pub struct ReachGraph {
    pub states: Vec<Configuration>,
    pub index: FxHashMap<Configuration, u32>,
    /// Outgoing `(interaction, target)` edges per state.
    pub edges: Vec<Vec<(InteractionId, u32)>>,
    /// BFS tree parent, `None` for the initial state (index 0).
    pub parents: Vec<Option<(u32, InteractionId)>>,
}

impl ReachGraph {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn contains(&self, c: &Configuration) -> bool {
        self.index.contains_key(c)
    }

    /// Shortest path from the initial configuration to state `target`.
    pub fn trace_to(&self, target: u32) -> Trace {
        let mut steps = Vec::new();
        let mut cur = target;
        while let Some((p, sigma)) = self.parents[cur as usize] {
            steps.push((sigma, self.states[cur as usize].clone()));
            cur = p;
        }
        steps.reverse();
        Trace {
            initial: self.states[0].clone(),
            steps,
        }
    }
}

pub fn reach(s: &System, budget: usize) -> Result<ReachGraph, ExplicitError> {
    let init = s.initial_configuration();
    let mut g = ReachGraph {
        states: vec![init.clone()],
        index: FxHashMap::default(),
        edges: Vec::new(),
        parents: vec![None],
    };
    g.index.insert(init, 0);
    if budget == 0 {
        return Err(ExplicitError::Budget(budget));
    }
    let mut i = 0;
    while i < g.states.len() {
        let c = g.states[i].clone();
        let mut out = Vec::new();
        for (sigma, next) in step(s, &c) {
            let id = match g.index.get(&next) {
                Some(&id) => id,
                None => {
                    if g.states.len() >= budget {
                        return Err(ExplicitError::Budget(budget));
                    }
                    let id = g.states.len() as u32;
                    g.index.insert(next.clone(), id);
                    g.states.push(next);
                    g.parents.push(Some((i as u32, sigma)));
                    id
                }
            };
            out.push((sigma, id));
        }
        g.edges.push(out);
        i += 1;
    }
    Ok(g)
}

pub fn is_risk(s: &System, c: &Configuration) -> bool {
    s.risk_states().iter().any(|r| r.matches(c))
}

pub fn is_deadlocked(s: &System, c: &Configuration) -> bool {
    enabled(s, c).is_empty()
}

/// Classifies a configuration against `mode`; risk is reported before
/// deadlock.
pub fn violation(s: &System, c: &Configuration, mode: Mode) -> Option<Reason> {
    if mode.risk() && is_risk(s, c) {
        Some(Reason::Risk)
    } else if mode.deadlock() && is_deadlocked(s, c) {
        Some(Reason::Deadlock)
    } else {
        None
    }
}

/// Safe, or a shortest trace to a violating configuration.
pub fn verdict(s: &System, mode: Mode, budget: usize) -> Result<Verdict, ExplicitError> {
    let g = reach(s, budget)?;
    Ok(verdict_in(s, &g, mode))
}

pub fn verdict_in(s: &System, g: &ReachGraph, mode: Mode) -> Verdict {
    for (i, c) in g.states.iter().enumerate() {
        if let Some(reason) = violation(s, c, mode) {
            return Verdict::Unsafe {
                trace: g.trace_to(i as u32),
                reason,
            };
        }
    }
    Verdict::Safe
}

/// Whether some execution from the initial configuration is labelled `w`.
pub fn member(s: &System, w: &[InteractionId]) -> bool {
    let mut current: FxHashSet<Configuration> = FxHashSet::default();
    current.insert(s.initial_configuration());
    for &sigma in w {
        let mut next = FxHashSet::default();
        for c in &current {
            if enabled(s, c).contains(&sigma) {
                next.extend(successors_unchecked(s, c, sigma));
            }
        }
        if next.is_empty() {
            return false;
        }
        current = next;
    }
    true
}

/// Whether the ♯ interaction of an abstract system is enabled in `c`.
pub fn sharp_enabled(s: &System, c: &Configuration) -> bool {
    s.sharp().is_some_and(|h| enabled(s, c).contains(&h))
}

/// ♯-successors of `c`; empty when ♯ is not enabled.
pub fn sharp_successors(s: &System, c: &Configuration) -> Vec<Configuration> {
    match s.sharp() {
        Some(h) if sharp_enabled(s, c) => successors_unchecked(s, c, h),
        _ => Vec::new(),
    }
}

/// No interaction other than ♯ is enabled.
pub fn sharp_deadlocked(s: &System, c: &Configuration) -> bool {
    enabled(s, c).iter().all(|&sigma| Some(sigma) == s.sharp())
}

/// Per interaction, whether it can fire again from every reachable
/// configuration. In a finite graph this holds exactly when every bottom
/// strongly connected component has an edge labelled with it, so some
/// infinite run fires all recurrent interactions infinitely often.
pub fn recurrent(s: &System, g: &ReachGraph) -> Vec<bool> {
    let mut preds: Vec<Vec<u32>> = vec![Vec::new(); g.len()];
    for (k, out) in g.edges.iter().enumerate() {
        for &(_, t) in out {
            preds[t as usize].push(k as u32);
        }
    }
    (0..s.interactions().len())
        .map(|sigma| {
            let mut seen = vec![false; g.len()];
            let mut stack: Vec<u32> = (0..g.len() as u32)
                .filter(|&k| g.edges[k as usize].iter().any(|&(i, _)| i == sigma))
                .collect();
            for &k in &stack {
                seen[k as usize] = true;
            }
            while let Some(k) = stack.pop() {
                for &p in &preds[k as usize] {
                    if !seen[p as usize] {
                        seen[p as usize] = true;
                        stack.push(p);
                    }
                }
            }
            seen.iter().all(|&b| b)
        })
        .collect()
}
