//! Safety game on the two-stage encoding: risk attractor, fault edges,
//! reachability restriction, candidate cubes and witness traces.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bdd::{Bdd, Var};
use crate::encode::Encoded;
use crate::explicit::Mode;
use crate::model::InteractionId;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GameError {
    #[error(
        "unsynthesizable from initial state: the initial configuration lies in the risk attractor"
    )]
    InitialInAttractor,
    #[error("target is unreachable")]
    Unreachable,
}

/// Least fixpoint of the risk attractor, with one snapshot per round.
#[derive(Clone, Debug)]
pub struct Attractor {
    pub set: Bdd,
    /// `frontiers[i]` is the attractor after round `i`; increasing.
    pub frontiers: Vec<Bdd>,
}

impl Attractor {
    pub fn iterations(&self) -> usize {
        self.frontiers.len()
    }
}

/// Forward reachable states, split into breadth-first rings.
#[derive(Clone, Debug)]
pub struct Reachable {
    pub set: Bdd,
    /// `rings[0]` is the initial predicate; `rings[k]` holds the states first
    /// reached after `k` half-steps, which are all of stage `k mod 2`.
    pub rings: Vec<Bdd>,
}

/// Stage-1 edges from reachable states outside the attractor into it.
#[derive(Clone, Copy, Debug)]
pub struct FaultSet {
    pub t_f: Bdd,
}

/// A group of fault edges sharing the raised interactions at the source
/// and the interaction that enters the attractor.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Cube {
    pub risk: InteractionId,
    /// Raised interactions at the source, `risk` included.
    pub enabled: BTreeSet<InteractionId>,
}

/// What the synthesized priorities must avoid.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Objective {
    Deadlock,
    Risk,
    Both,
    /// Every interaction other than ♯ disabled; ♯ does not rescue a state.
    SharpDeadlock,
}

impl From<Mode> for Objective {
    fn from(m: Mode) -> Objective {
        match m {
            Mode::Deadlock => Objective::Deadlock,
            Mode::Risk => Objective::Risk,
            Mode::Both => Objective::Both,
        }
    }
}

/// Violating stage-1 states for `mode`.
pub fn bad_states(e: &mut Encoded, mode: Mode) -> Bdd {
    objective_states(e, mode.into())
}

pub fn objective_states(e: &mut Encoded, obj: Objective) -> Bdd {
    match obj {
        Objective::Deadlock => e.p_dead,
        Objective::Risk => e.p_risk,
        Objective::Both => e.manager.or(e.p_dead, e.p_risk),
        Objective::SharpDeadlock => {
            let mut lits = vec![(e.vars.stg.0, false)];
            lits.extend(e.vars.interaction_vars().map(|(_, u, _)| (u, false)));
            e.manager.cube(&lits)
        }
    }
}

/// Which stage-1 moves priorities can favour (`high`) or suppress (`low`);
/// `None` admits every interaction.
#[derive(Clone, Debug, Default)]
pub struct Control {
    pub high: Option<BTreeSet<InteractionId>>,
    pub low: Option<BTreeSet<InteractionId>>,
}

/// Stage-1 edge relations restricted to the executed interaction.
struct Moves {
    escape: Bdd,
    unblockable: Bdd,
}

fn executed_in(e: &mut Encoded, set: impl Fn(InteractionId) -> bool) -> Bdd {
    let mut r = e.manager.fls();
    for sigma in 0..e.system.interactions().len() {
        if set(sigma) {
            let x = e.executed(sigma);
            r = e.manager.or(r, x);
        }
    }
    e.manager.and(e.t1, r)
}

fn moves(e: &mut Encoded, control: &Control) -> Moves {
    let escape = match &control.high {
        None => e.t1,
        Some(h) => executed_in(e, |s| h.contains(&s)),
    };
    let unblockable = match &control.low {
        None => e.manager.fls(),
        Some(l) => executed_in(e, |s| !l.contains(&s)),
    };
    Moves {
        escape,
        unblockable,
    }
}

/// Stage-1 states that cannot be kept out of `attr`: every admissible
/// escape is missing, or some move into `attr` cannot be suppressed.
fn stage1_step(e: &mut Encoded, attr: Bdd, m: &Moves) -> Bdd {
    let point = e.pre(attr, e.t1);
    let outside = e.manager.not(attr);
    let escape = e.pre(outside, m.escape);
    let lost = e.manager.diff(point, escape);
    if m.unblockable.is_false() {
        return lost;
    }
    let forced = e.pre(attr, m.unblockable);
    e.manager.or(lost, forced)
}

/// Attractor of `bad`, alternating the stage-0 and stage-1 additions.
pub fn attractor(e: &mut Encoded, bad: Bdd) -> Attractor {
    attractor_controlled(e, bad, &Control::default())
}

/// Attractor where escapes count only through interactions priorities
/// may favour under `control`.
pub fn attractor_controlled(e: &mut Encoded, bad: Bdd, control: &Control) -> Attractor {
    let m = moves(e, control);
    let mut attr = bad;
    let mut frontiers = Vec::new();
    loop {
        let before = attr;
        let p0 = e.pre(attr, e.t0);
        attr = e.manager.or(attr, p0);
        let p1 = stage1_step(e, attr, &m);
        attr = e.manager.or(attr, p1);
        frontiers.push(attr);
        if attr == before {
            return Attractor {
                set: attr,
                frontiers,
            };
        }
    }
}

/// Attractor with both additions computed from the same snapshot each
/// round; same fixpoint as [`attractor`].
pub fn attractor_naive(e: &mut Encoded, bad: Bdd) -> Bdd {
    let m = moves(e, &Control::default());
    let mut attr = bad;
    loop {
        let p0 = e.pre(attr, e.t0);
        let p1 = stage1_step(e, attr, &m);
        let both = e.manager.or(p0, p1);
        let next = e.manager.or(attr, both);
        if next == attr {
            return attr;
        }
        attr = next;
    }
}

pub fn reachable(e: &mut Encoded) -> Reachable {
    let mut set = e.p_ini;
    let mut rings = vec![e.p_ini];
    let mut frontier = e.p_ini;
    loop {
        let a = e.post(frontier, e.t0);
        let b = e.post(frontier, e.t1);
        let img = e.manager.or(a, b);
        let new = e.manager.diff(img, set);
        if new.is_false() {
            return Reachable { set, rings };
        }
        set = e.manager.or(set, new);
        rings.push(new);
        frontier = new;
    }
}

/// Stage-1 edges leaving the attractor's complement into it, restricted to
/// reachable sources.
pub fn fault_transitions(
    e: &mut Encoded,
    attr: &Attractor,
    reach: &Reachable,
) -> Result<FaultSet, GameError> {
    if !e.manager.and(e.p_ini, attr.set).is_false() {
        return Err(GameError::InitialInAttractor);
    }
    let attr_next = e.prime(attr.set);
    let point = e.manager.and(e.t1, attr_next);
    let has_move = e.exists_primed(e.t1);
    let outside = e.manager.diff(has_move, attr.set);
    let t_f = e.manager.and(point, outside);
    let t_f = e.manager.and(t_f, reach.set);
    Ok(FaultSet { t_f })
}

/// Groups fault edges by raised set and executed interaction. A raised
/// variable left unconstrained on a diagram path is read as not raised,
/// which only strengthens the resulting clause; an unconstrained executed
/// variable yields one cube per interaction it may stand for.
pub fn candidate_cubes(e: &mut Encoded, fs: &FaultSet) -> Vec<Cube> {
    let ivars: Vec<(InteractionId, Var, Var)> = e.vars.interaction_vars().collect();
    let keep: Vec<Var> = ivars.iter().flat_map(|&(_, u, p)| [u, p]).collect();
    let sharp = e.system.sharp();
    let mut out = BTreeSet::new();
    let parts = match sharp {
        None => vec![(fs.t_f, false)],
        Some(_) => {
            let with = e.manager.and(fs.t_f, e.sharp_raised);
            let without = e.manager.diff(fs.t_f, e.sharp_raised);
            vec![(with, true), (without, false)]
        }
    };
    for (part, sharp_up) in parts {
        let proj = e.project(part, &keep);
        collect_cubes(e, proj, &ivars, sharp, sharp_up, &mut out);
    }
    out.into_iter().collect()
}

fn collect_cubes(
    e: &Encoded,
    proj: Bdd,
    ivars: &[(InteractionId, Var, Var)],
    sharp: Option<InteractionId>,
    sharp_up: bool,
    out: &mut BTreeSet<Cube>,
) {
    for path in e.manager.cubes(proj) {
        let is_true = |v: Var| path.iter().any(|&(w, b)| w == v && b);
        let is_free = |v: Var| !path.iter().any(|&(w, _)| w == v);
        let mut enabled: BTreeSet<InteractionId> = ivars
            .iter()
            .filter(|&&(_, u, _)| is_true(u))
            .map(|&(i, _, _)| i)
            .collect();
        if sharp_up {
            enabled.extend(sharp);
        }
        let risks: Vec<InteractionId> = match ivars.iter().find(|&&(_, _, p)| is_true(p)) {
            Some(&(i, _, _)) => vec![i],
            None => ivars
                .iter()
                .filter(|&&(_, _, p)| is_free(p))
                .map(|&(i, _, _)| i)
                .chain(sharp)
                .collect(),
        };
        for risk in risks {
            let mut enabled = enabled.clone();
            enabled.insert(risk);
            out.insert(Cube { risk, enabled });
        }
    }
}

/// Full assignment of one state in `set` over the unprimed variables.
fn pick_state(e: &mut Encoded, set: Bdd) -> Bdd {
    let care: Vec<Var> = unprimed_vars(e);
    let lits = e.manager.pick_cube(set, &care).expect("nonempty set");
    let lits: Vec<(Var, bool)> = lits.into_iter().filter(|(v, _)| care.contains(v)).collect();
    e.manager.cube(&lits)
}

fn unprimed_vars(e: &Encoded) -> Vec<Var> {
    let vm = &e.vars;
    let mut out = vec![vm.stg.0];
    out.extend(vm.interaction_vars().map(|(_, u, _)| u));
    for c in 0..vm.locations.len() {
        out.extend(vm.locations[c].iter().map(|p| p.0));
        out.extend(vm.data[c].iter().map(|p| p.0));
    }
    out
}

/// A word labelling a shortest path from the initial states to `target`.
pub fn extract_trace(
    e: &mut Encoded,
    reach: &Reachable,
    target: Bdd,
) -> Result<Vec<InteractionId>, GameError> {
    let k = reach
        .rings
        .iter()
        .position(|&r| !e.manager.and(r, target).is_false())
        .ok_or(GameError::Unreachable)?;
    let hit = e.manager.and(reach.rings[k], target);
    let mut state = pick_state(e, hit);
    let mut word = Vec::new();
    for i in (0..k).rev() {
        let rel = if i % 2 == 0 { e.t0 } else { e.t1 };
        if i % 2 == 1 {
            word.push(executed_label(e, state));
        }
        let preds = e.pre(state, rel);
        let preds = e.manager.and(preds, reach.rings[i]);
        state = pick_state(e, preds);
    }
    word.reverse();
    Ok(word)
}

/// Symbolic verdict: a shortest word reaching a state of `obj`, or `None`
/// when none is reachable.
pub fn violation_word(e: &mut Encoded, obj: Objective) -> Option<Vec<InteractionId>> {
    let bad = objective_states(e, obj);
    let reach = reachable(e);
    extract_trace(e, &reach, bad).ok()
}

/// Interaction recorded in a stage-0 state reached by a stage-1 step.
fn executed_label(e: &mut Encoded, state: Bdd) -> InteractionId {
    let ivars: Vec<(InteractionId, Var, Var)> = e.vars.interaction_vars().collect();
    for (i, u, _) in ivars {
        let x = e.manager.var(u);
        if e.manager.leq(state, x) {
            return i;
        }
    }
    e.system
        .sharp()
        .expect("stage-1 step without executed interaction")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encode::Ordering;
    use crate::model::parse_system;

    fn line() -> Encoded {
        // l0 -a-> l1 -b-> l2 (dead end); l0 -c-> l0.
        let s = parse_system(
            "system { component c { locations l0 l1 l2;
               on a from l0 to l1; on b from l1 to l2; on c from l0 to l0; } }",
        )
        .unwrap();
        Encoded::new(&s, Ordering::Decl)
    }

    #[test]
    fn empty_seed_gives_empty_attractor() {
        let mut e = line();
        let f = e.manager.fls();
        assert!(attractor(&mut e, f).set.is_false());
    }

    #[test]
    fn full_seed_is_a_fixpoint() {
        let mut e = line();
        let t = e.manager.tru();
        assert!(attractor(&mut e, t).set.is_true());
    }

    #[test]
    fn deadlock_attractor_and_fault_edge() {
        let mut e = line();
        let bad = bad_states(&mut e, Mode::Deadlock);
        let attr = attractor(&mut e, bad);
        assert_eq!(attractor_naive(&mut e, bad), attr.set);
        let reach = reachable(&mut e);
        let fs = fault_transitions(&mut e, &attr, &reach).unwrap();
        let cubes = candidate_cubes(&mut e, &fs);
        let a = e.system.interaction_index("a").unwrap();
        let c = e.system.interaction_index("c").unwrap();
        assert_eq!(
            cubes,
            vec![Cube {
                risk: a,
                enabled: [a, c].into_iter().collect()
            }]
        );
    }

    #[test]
    fn traces_to_initial_and_deadlock() {
        let mut e = line();
        let reach = reachable(&mut e);
        let (ini, dead) = (e.p_ini, e.p_dead);
        assert_eq!(extract_trace(&mut e, &reach, ini).unwrap(), vec![]);
        let w = extract_trace(&mut e, &reach, dead).unwrap();
        let names: Vec<&str> = w.iter().map(|&i| e.system.interaction_name(i)).collect();
        assert_eq!(names, vec!["a", "b"]);
        let risk = e.p_risk;
        assert_eq!(
            extract_trace(&mut e, &reach, risk).unwrap_err(),
            GameError::Unreachable
        );
    }
}
