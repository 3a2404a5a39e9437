//! The symbolic engine against the explicit one on seeded random systems:
//! reachable configurations, raised and enabled sets, successors, verdicts,
//! attractors and fault cubes are computed both ways and compared.

use std::collections::BTreeSet;

use prisyn_core::abstraction::abstract_system;
use prisyn_core::bdd::{Bdd, Var};
use prisyn_core::encode::{Encoded, Ordering};
use prisyn_core::explicit::{self, Mode, ReachGraph};
use prisyn_core::fixtures::{random_system, RandomParams};
use prisyn_core::game::{self, Control, Cube, Objective};
use prisyn_core::model::{Configuration, InteractionId, System};

const SEEDS: u64 = 300;

fn config_vars(e: &Encoded) -> Vec<Var> {
    let mut out = Vec::new();
    for c in 0..e.vars.locations.len() {
        out.extend(e.vars.locations[c].iter().map(|p| p.0));
        out.extend(e.vars.data[c].iter().map(|p| p.0));
    }
    out
}

/// Number of distinct configurations in `f`.
fn config_count(e: &mut Encoded, f: Bdd) -> f64 {
    let keep = config_vars(e);
    let p = e.project(f, &keep);
    let free = e.var_count() - keep.len();
    e.manager.sat_count(p) / 2f64.powi(free as i32)
}

/// The stage-1 state the encoding reaches from configuration `c`.
fn stage1_of(e: &mut Encoded, c: &Configuration) -> Bdd {
    let conf = e.configuration(c, false);
    let s0 = e.stage(true);
    let start = e.manager.and(conf, s0);
    e.post(start, e.t0)
}

fn bad(s: &System, c: &Configuration, obj: Objective) -> bool {
    match obj {
        Objective::Deadlock => explicit::is_deadlocked(s, c),
        Objective::Risk => explicit::is_risk(s, c),
        Objective::Both => explicit::is_deadlocked(s, c) || explicit::is_risk(s, c),
        Objective::SharpDeadlock => explicit::sharp_deadlocked(s, c),
    }
}

/// Attractor over the explicit reachability graph, with the same
/// escape and forcing rules as the symbolic game.
fn explicit_attractor(s: &System, g: &ReachGraph, obj: Objective, control: &Control) -> Vec<bool> {
    let mut attr: Vec<bool> = g.states.iter().map(|c| bad(s, c, obj)).collect();
    let high = |i: InteractionId| control.high.as_ref().is_none_or(|h| h.contains(&i));
    let unblockable = |i: InteractionId| control.low.as_ref().is_some_and(|l| !l.contains(&i));
    loop {
        let mut changed = false;
        for k in 0..g.len() {
            if attr[k] {
                continue;
            }
            let edges = &g.edges[k];
            let into = edges.iter().any(|&(_, t)| attr[t as usize]);
            let escape = edges.iter().any(|&(i, t)| high(i) && !attr[t as usize]);
            let forced = edges
                .iter()
                .any(|&(i, t)| unblockable(i) && attr[t as usize]);
            if (into && !escape) || forced {
                attr[k] = true;
                changed = true;
            }
        }
        if !changed {
            return attr;
        }
    }
}

fn explicit_cubes(s: &System, g: &ReachGraph, attr: &[bool]) -> BTreeSet<Cube> {
    let mut out = BTreeSet::new();
    for k in 0..g.len() {
        if attr[k] {
            continue;
        }
        let raised = explicit::raised(s, &g.states[k]);
        let enabled: BTreeSet<InteractionId> = (0..raised.len()).filter(|&i| raised[i]).collect();
        for &(risk, t) in &g.edges[k] {
            if attr[t as usize] {
                out.insert(Cube {
                    risk,
                    enabled: enabled.clone(),
                });
            }
        }
    }
    out
}

fn systems() -> Vec<(u64, System)> {
    let p = RandomParams::default();
    let mut out = Vec::new();
    for seed in 0..SEEDS {
        let s = random_system(seed, &p);
        let n = s.components().len();
        if n > 1 {
            let keep = BTreeSet::from([seed as usize % n]);
            if let Ok(a) = abstract_system(&s, &keep) {
                out.push((seed, a.system));
            }
        }
        out.push((seed, s));
    }
    out
}

#[test]
fn reachable_configurations_agree() {
    for (seed, s) in systems() {
        let g = explicit::reach(&s, 100_000).unwrap();
        let mut e = Encoded::new(&s, Ordering::Decl);
        let r = game::reachable(&mut e);
        let s0 = e.stage(true);
        let at0 = e.manager.and(r.set, s0);
        assert_eq!(config_count(&mut e, at0), g.len() as f64, "seed {seed}");
        for c in &g.states {
            let b = e.configuration(c, false);
            assert!(
                !e.manager.and(b, at0).is_false(),
                "seed {seed}: {c:?} missing"
            );
        }
    }
}

#[test]
fn raised_enabled_and_successors_agree() {
    for (seed, s) in systems() {
        let g = explicit::reach(&s, 100_000).unwrap();
        let mut e = Encoded::new(&s, Ordering::Decl);
        let n = s.interactions().len();
        for (k, c) in g.states.iter().enumerate() {
            let st = stage1_of(&mut e, c);
            assert_eq!(config_count(&mut e, st), 1.0, "seed {seed}");
            let raised = explicit::raised(&s, c);
            let enabled = explicit::enabled(&s, c);
            for sigma in 0..n {
                let r = e.raised(sigma);
                assert_eq!(
                    e.manager.leq(st, r),
                    raised[sigma],
                    "seed {seed} raised {sigma}"
                );
                let x = e.executed(sigma);
                let rel = e.manager.and(e.t1, x);
                let img = e.post(st, rel);
                assert_eq!(
                    !img.is_false(),
                    enabled.contains(&sigma),
                    "seed {seed} enabled {sigma}"
                );
                let want: BTreeSet<u32> = g.edges[k]
                    .iter()
                    .filter(|&&(i, _)| i == sigma)
                    .map(|&(_, t)| t)
                    .collect();
                assert_eq!(
                    config_count(&mut e, img),
                    want.len() as f64,
                    "seed {seed} post {sigma}"
                );
                for t in want {
                    let b = e.configuration(&g.states[t as usize], false);
                    assert!(!e.manager.and(b, img).is_false(), "seed {seed}");
                }
            }
        }
    }
}

#[test]
fn verdicts_and_witness_lengths_agree() {
    for (seed, s) in systems() {
        let g = explicit::reach(&s, 100_000).unwrap();
        let mut e = Encoded::new(&s, Ordering::Decl);
        for mode in [Mode::Deadlock, Mode::Risk, Mode::Both] {
            let v = explicit::verdict_in(&s, &g, mode);
            let w = game::violation_word(&mut e, mode.into());
            match (&v, &w) {
                (explicit::Verdict::Safe, None) => {}
                (explicit::Verdict::Unsafe { trace, .. }, Some(w)) => {
                    assert_eq!(trace.steps.len(), w.len(), "seed {seed} {mode:?}");
                    assert!(explicit::member(&s, w), "seed {seed}");
                    assert!(ends_in_violation(&s, w, mode), "seed {seed} {mode:?} {w:?}");
                }
                _ => panic!("seed {seed} {mode:?}: explicit {v:?}, symbolic {w:?}"),
            }
        }
    }
}

fn ends_in_violation(s: &System, w: &[InteractionId], mode: Mode) -> bool {
    let mut cur = vec![s.initial_configuration()];
    for &sigma in w {
        cur = cur
            .iter()
            .flat_map(|c| explicit::step(s, c))
            .filter(|(i, _)| *i == sigma)
            .map(|(_, n)| n)
            .collect();
    }
    cur.iter()
        .any(|c| explicit::violation(s, c, mode).is_some())
}

fn controls(s: &System, seed: u64) -> Vec<Control> {
    let n = s.interactions().len();
    let evens: BTreeSet<InteractionId> = (0..n).filter(|i| (i + seed as usize).is_multiple_of(2)).collect();
    let odds: BTreeSet<InteractionId> = (0..n).filter(|i| !evens.contains(i)).collect();
    vec![
        Control::default(),
        Control {
            high: Some(evens.clone()),
            low: None,
        },
        Control {
            high: Some(evens),
            low: Some(odds),
        },
    ]
}

#[test]
fn attractors_agree_on_reachable_states() {
    let objectives = [
        Objective::Deadlock,
        Objective::Risk,
        Objective::Both,
        Objective::SharpDeadlock,
    ];
    for (seed, s) in systems() {
        let g = explicit::reach(&s, 100_000).unwrap();
        let mut e = Encoded::new(&s, Ordering::Decl);
        let stages: Vec<Bdd> = g.states.iter().map(|c| stage1_of(&mut e, c)).collect();
        for obj in objectives {
            for control in controls(&s, seed) {
                let b = game::objective_states(&mut e, obj);
                let a = game::attractor_controlled(&mut e, b, &control);
                let want = explicit_attractor(&s, &g, obj, &control);
                for k in 0..g.len() {
                    let inside = e.manager.leq(stages[k], a.set);
                    assert_eq!(inside, want[k], "seed {seed} {obj:?} {control:?} state {k}");
                }
            }
            let b = game::objective_states(&mut e, obj);
            let a = game::attractor(&mut e, b);
            let naive = game::attractor_naive(&mut e, b);
            assert_eq!(a.set, naive, "seed {seed} {obj:?}");
        }
    }
}

#[test]
fn fault_cubes_agree() {
    let mut compared = 0;
    for (seed, s) in systems() {
        let g = explicit::reach(&s, 100_000).unwrap();
        let mut e = Encoded::new(&s, Ordering::Decl);
        for obj in [
            Objective::Deadlock,
            Objective::Both,
            Objective::SharpDeadlock,
        ] {
            let b = game::objective_states(&mut e, obj);
            let a = game::attractor(&mut e, b);
            let want = explicit_attractor(&s, &g, obj, &Control::default());
            let r = game::reachable(&mut e);
            let Ok(fs) = game::fault_transitions(&mut e, &a, &r) else {
                assert!(
                    want[0],
                    "seed {seed}: initial state outside the explicit attractor"
                );
                continue;
            };
            assert!(!want[0], "seed {seed}");
            let got: BTreeSet<Cube> = game::candidate_cubes(&mut e, &fs).into_iter().collect();
            let exp = explicit_cubes(&s, &g, &want);
            for c in &got {
                assert!(
                    exp.contains(c),
                    "seed {seed}: symbolic cube {c:?} not explicit"
                );
            }
            for c in &exp {
                assert!(
                    got.iter()
                        .any(|d| d.risk == c.risk && d.enabled.is_subset(&c.enabled)),
                    "seed {seed}: explicit cube {c:?} uncovered"
                );
            }
            compared += 1;
        }
    }
    assert!(compared > 50, "only {compared} comparisons");
}
