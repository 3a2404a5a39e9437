//! Clause families over priority variables `low ≺ high`.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use rustc_hash::FxHashMap;
use serde::Serialize;

use crate::game::Cube;
use crate::model::{InteractionId, PrioritySet, System};

/// Origin of a clause.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ClauseKind {
    Candidate,
    Existing,
    /// Irreflexivity units and pairwise antisymmetry.
    Irreflexive,
    Transitive,
}

/// The proposition `low ≺ high`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct PriorityVar {
    pub low: InteractionId,
    pub high: InteractionId,
}

/// Restricts which pairs may appear in candidate clauses. `None` admits
/// every interaction on that side.
#[derive(Clone, Debug, Default)]
pub struct CandidateFilter {
    pub low: Option<BTreeSet<InteractionId>>,
    pub high: Option<BTreeSet<InteractionId>>,
}

impl CandidateFilter {
    pub fn allows(&self, low: InteractionId, high: InteractionId) -> bool {
        self.low.as_ref().is_none_or(|s| s.contains(&low))
            && self.high.as_ref().is_none_or(|s| s.contains(&high))
    }

    /// Candidate pairs for `cube` that survive the filter, in order of the
    /// higher interaction.
    pub fn candidates(&self, cube: &Cube) -> Vec<PriorityVar> {
        cube.enabled
            .iter()
            .filter(|&&h| h != cube.risk && self.allows(cube.risk, h))
            .map(|&h| PriorityVar {
                low: cube.risk,
                high: h,
            })
            .collect()
    }
}

/// CNF over priority variables. Variable `k` (1-based in clauses) is
/// `vars[k - 1]`.
#[derive(Clone, Debug, Default)]
pub struct Cnf {
    pub vars: Vec<PriorityVar>,
    index: FxHashMap<PriorityVar, usize>,
    pub clauses: Vec<Vec<i32>>,
    pub kinds: Vec<ClauseKind>,
    /// Source cube of each candidate clause, keyed by clause index.
    pub cube_of: FxHashMap<usize, usize>,
    closed: bool,
}

impl Cnf {
    pub fn new() -> Cnf {
        Cnf::default()
    }

    /// 1-based variable for `p`, allocated on first use.
    pub fn var(&mut self, p: PriorityVar) -> i32 {
        if let Some(&k) = self.index.get(&p) {
            return (k + 1) as i32;
        }
        self.index.insert(p, self.vars.len());
        self.vars.push(p);
        self.vars.len() as i32
    }

    pub fn lookup(&self, p: PriorityVar) -> Option<i32> {
        self.index.get(&p).map(|&k| (k + 1) as i32)
    }

    fn push(&mut self, clause: Vec<i32>, kind: ClauseKind) -> usize {
        self.clauses.push(clause);
        self.kinds.push(kind);
        self.clauses.len() - 1
    }

    /// One clause per cube over its surviving candidates. An empty clause
    /// is still added so that the instance is unsatisfiable.
    pub fn add_cubes(&mut self, cubes: &[Cube], filter: &CandidateFilter) {
        for (ci, cube) in cubes.iter().enumerate() {
            let clause: Vec<i32> = filter
                .candidates(cube)
                .into_iter()
                .map(|p| self.var(p))
                .collect();
            let k = self.push(clause, ClauseKind::Candidate);
            self.cube_of.insert(k, ci);
        }
    }

    pub fn add_existing(&mut self, existing: &PrioritySet) {
        for (low, high) in existing.iter() {
            let v = self.var(PriorityVar { low, high });
            self.push(vec![v], ClauseKind::Existing);
        }
    }

    /// Interactions mentioned by candidate and existing clauses.
    pub fn used(&self) -> BTreeSet<InteractionId> {
        let mut out = BTreeSet::new();
        for (c, k) in self.clauses.iter().zip(&self.kinds) {
            if matches!(k, ClauseKind::Candidate | ClauseKind::Existing) {
                for &l in c {
                    let p = self.vars[l.unsigned_abs() as usize - 1];
                    out.insert(p.low);
                    out.insert(p.high);
                }
            }
        }
        out
    }

    /// Adds irreflexivity, antisymmetry and transitivity over the used
    /// interactions. Idempotent.
    pub fn close(&mut self) {
        if self.closed {
            return;
        }
        self.closed = true;
        let used: Vec<InteractionId> = self.used().into_iter().collect();
        for &a in &used {
            let v = self.var(PriorityVar { low: a, high: a });
            self.push(vec![-v], ClauseKind::Irreflexive);
        }
        for (i, &a) in used.iter().enumerate() {
            for &b in &used[i + 1..] {
                let ab = self.var(PriorityVar { low: a, high: b });
                let ba = self.var(PriorityVar { low: b, high: a });
                self.push(vec![-ab, -ba], ClauseKind::Irreflexive);
            }
        }
        for &a in &used {
            for &b in &used {
                if a == b {
                    continue;
                }
                let ab = self.var(PriorityVar { low: a, high: b });
                for &c in &used {
                    if c == a || c == b {
                        continue;
                    }
                    let bc = self.var(PriorityVar { low: b, high: c });
                    let ac = self.var(PriorityVar { low: a, high: c });
                    self.push(vec![-ab, -bc, ac], ClauseKind::Transitive);
                }
            }
        }
    }

    /// Appends the candidate and existing clauses of `other`, mapping its
    /// variables into this instance. Cube indices are offset by
    /// `cube_offset`.
    pub fn absorb(&mut self, other: &Cnf, cube_offset: usize) {
        for (k, (c, kind)) in other.clauses.iter().zip(&other.kinds).enumerate() {
            if !matches!(kind, ClauseKind::Candidate | ClauseKind::Existing) {
                continue;
            }
            let mapped: Vec<i32> = c
                .iter()
                .map(|&l| {
                    let v = self.var(other.vars[l.unsigned_abs() as usize - 1]);
                    if l > 0 {
                        v
                    } else {
                        -v
                    }
                })
                .collect();
            let i = self.push(mapped, *kind);
            if let Some(&cube) = other.cube_of.get(&k) {
                self.cube_of.insert(i, cube + cube_offset);
            }
        }
    }

    /// Variables occurring in candidate clauses, in order of first use.
    pub fn candidate_vars(&self) -> Vec<usize> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for (c, k) in self.clauses.iter().zip(&self.kinds) {
            if *k == ClauseKind::Candidate {
                for &l in c {
                    let v = l.unsigned_abs() as usize;
                    if seen.insert(v) {
                        out.push(v);
                    }
                }
            }
        }
        out
    }

    pub fn count(&self, kind: ClauseKind) -> usize {
        self.kinds.iter().filter(|&&k| k == kind).count()
    }

    /// Whether the assignment making exactly the transitive closure of
    /// `pairs` true satisfies every clause.
    pub fn satisfied_by(&self, pairs: &PrioritySet) -> bool {
        let mut closed: BTreeSet<(InteractionId, InteractionId)> = pairs.iter().collect();
        loop {
            let extra: Vec<_> = closed
                .iter()
                .flat_map(|&(a, b)| {
                    closed
                        .range((b, 0)..=(b, usize::MAX))
                        .map(move |&(_, c)| (a, c))
                })
                .filter(|p| !closed.contains(p))
                .collect();
            if extra.is_empty() {
                break;
            }
            closed.extend(extra);
        }
        let mut a = vec![false; self.vars.len() + 1];
        for (k, p) in self.vars.iter().enumerate() {
            a[k + 1] = closed.contains(&(p.low, p.high));
        }
        super::dpll::satisfies(&a, &self.clauses)
    }

    pub fn solve(&self) -> Option<Vec<bool>> {
        super::dpll::solve(self.vars.len(), &self.clauses, &self.candidate_vars())
    }

    /// Positively assigned candidate variables that are not already
    /// existing priorities.
    pub fn extract(&self, model: &[bool], existing: &PrioritySet) -> PrioritySet {
        self.candidate_vars()
            .into_iter()
            .filter(|&v| model[v])
            .map(|v| self.vars[v - 1])
            .filter(|p| !existing.contains(p.low, p.high))
            .map(|p| (p.low, p.high))
            .collect()
    }

    /// Candidate clause indices of a minimal unsatisfiable subset, keeping
    /// all other families fixed. `None` if the instance is satisfiable.
    pub fn candidate_core(&self) -> Option<Vec<usize>> {
        let n = self.vars.len();
        let order = self.candidate_vars();
        let fixed: Vec<Vec<i32>> = self
            .clauses
            .iter()
            .zip(&self.kinds)
            .filter(|(_, k)| **k != ClauseKind::Candidate)
            .map(|(c, _)| c.clone())
            .collect();
        let mut core: Vec<usize> = (0..self.clauses.len())
            .filter(|&i| self.kinds[i] == ClauseKind::Candidate)
            .collect();
        let unsat = |keep: &[usize]| {
            let mut cls = fixed.clone();
            cls.extend(keep.iter().map(|&i| self.clauses[i].clone()));
            super::dpll::solve(n, &cls, &order).is_none()
        };
        if !unsat(&core) {
            return None;
        }
        let mut i = core.len();
        while i > 0 {
            i -= 1;
            let mut trial = core.clone();
            trial.remove(i);
            if unsat(&trial) {
                core = trial;
            }
        }
        Some(core)
    }

    /// DIMACS text with one comment per variable naming its pair.
    pub fn to_dimacs(&self, s: &System) -> String {
        let mut out = String::new();
        for (k, p) in self.vars.iter().enumerate() {
            let _ = writeln!(
                out,
                "c {} {}<{}",
                k + 1,
                s.interaction_name(p.low),
                s.interaction_name(p.high)
            );
        }
        let _ = writeln!(out, "p cnf {} {}", self.vars.len(), self.clauses.len());
        for c in &self.clauses {
            for l in c {
                let _ = write!(out, "{l} ");
            }
            out.push_str("0\n");
        }
        out
    }
}
