//! Acceptance run: one PASS or FAIL line per criterion, each checked
//! against an independent oracle (explicit exploration, truth tables,
//! exhaustive search). Exits non-zero when any criterion fails.

use std::collections::BTreeSet;
use std::panic::{self, AssertUnwindSafe};
use std::process::Command;
use std::time::{Duration, Instant};

use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;
use prisyn_core::abstraction::{abstract_system, synthesize_with_abstraction};
use prisyn_core::ag::{ag_synthesize, decompose, AgError, AgOptions, AgOutcome, AgProblem};
use prisyn_core::bdd::{Bdd, Manager, Var};
use prisyn_core::encode::order::{force_order, hyperedges, span_sum};
use prisyn_core::encode::{Encoded, Ordering};
use prisyn_core::explicit::{self, Mode, ReachGraph, Verdict};
use prisyn_core::fixtures::{self, philosophers, random_system, RandomParams};
use prisyn_core::game::{self, Cube, Objective};
use prisyn_core::model::{parse_system, Configuration, InteractionId, PrioritySet, System};
use prisyn_core::monitor::{parse_dfa, product_with_monitors, Dfa, RiskRule};
use prisyn_core::resolve::{
    build_cnf, localize, synthesize, CandidateFilter, Failure, Outcome, SynthOptions,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

type Check = Result<String, String>;

const BUDGET: usize = 2_000_000;

macro_rules! ensure {
    ($cond:expr, $($arg:tt)*) => {
        if !$cond {
            return Err(format!($($arg)*));
        }
    };
}

fn prisyn(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_prisyn"))
        .args(args)
        .output()
        .expect("binary runs");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stdout).into_owned(),
    )
}

fn json(out: &str) -> Result<Value, String> {
    serde_json::from_str(out).map_err(|e| format!("bad json: {e}"))
}

fn local(s: &System, p: &PrioritySet) -> bool {
    p.iter()
        .all(|(l, h)| s.participants(l).iter().any(|c| s.participants(h).contains(c)))
}

fn ids(s: &System, names: &[&str]) -> BTreeSet<InteractionId> {
    names.iter().map(|n| s.interaction_index(n).unwrap()).collect()
}

fn pairs(s: &System, p: &[(&str, &str)]) -> PrioritySet {
    p.iter()
        .map(|(l, h)| (s.interaction_index(l).unwrap(), s.interaction_index(h).unwrap()))
        .collect()
}

fn philosophers_synthesis() -> Check {
    let mut notes = Vec::new();
    for n in [10usize, 20, 30, 40, 50] {
        let start = Instant::now();
        let name = format!("phil-{n}");
        let (code, out) = prisyn(&["synth", &name, "--ordering", "force", "--json"]);
        let took = start.elapsed();
        let v = json(&out)?;
        ensure!(code == 0 && v["outcome"] == "success", "N={n}: exit {code}");
        let want = [122, 242, 362, 482, 602][n / 10 - 1];
        ensure!(v["variables"] == want, "N={n}: {} variables, want {want}", v["variables"]);
        ensure!(
            v["verification"].as_str().is_some_and(|s| s.starts_with("safe")),
            "N={n}: {}",
            v["verification"]
        );
        ensure!(took < Duration::from_secs(600), "N={n} took {took:?}");
        notes.push(format!("N={n} {want} vars {:.1}s", took.as_secs_f64()));
    }
    Ok(notes.join(", "))
}

/// Strongly connected components with at least one internal edge, as
/// sets of labels fired inside them.
fn cycle_labels(g: &ReachGraph) -> Vec<BTreeSet<InteractionId>> {
    let mut dg = DiGraph::<(), InteractionId>::new();
    let nodes: Vec<_> = (0..g.len()).map(|_| dg.add_node(())).collect();
    for (k, out) in g.edges.iter().enumerate() {
        for &(sigma, t) in out {
            dg.add_edge(nodes[k], nodes[t as usize], sigma);
        }
    }
    let mut out = Vec::new();
    for scc in tarjan_scc(&dg) {
        let members: BTreeSet<usize> = scc.iter().map(|n| n.index()).collect();
        let labels: BTreeSet<InteractionId> = members
            .iter()
            .flat_map(|&k| g.edges[k].iter())
            .filter(|&&(_, t)| members.contains(&(t as usize)))
            .map(|&(sigma, _)| sigma)
            .collect();
        if !labels.is_empty() {
            out.push(labels);
        }
    }
    out
}

fn philosophers_quality() -> Check {
    for n in 2..=6 {
        let s = philosophers(n);
        let r = synthesize(&s, &SynthOptions::new(Mode::Deadlock).ordering(Ordering::Force));
        let p = r.outcome.priorities().ok_or(format!("N={n}: {:?}", r.outcome))?;
        ensure!(local(&s, p), "N={n}: non-local {}", s.format_priorities(p));
        let fixed = s.with_priorities(s.priorities().union(p)).unwrap();
        let g = explicit::reach(&fixed, BUDGET).map_err(|e| e.to_string())?;
        ensure!(
            explicit::verdict_in(&fixed, &g, Mode::Deadlock) == Verdict::Safe,
            "N={n}: deadlock"
        );
        let eats: BTreeSet<InteractionId> = (1..=n)
            .map(|i| s.interaction_index(&format!("take_right_{i}")).unwrap())
            .collect();
        ensure!(
            cycle_labels(&g).iter().any(|l| eats.is_subset(l)),
            "N={n}: no cycle fires every philosopher's eat"
        );
        let rec = explicit::recurrent(&fixed, &g);
        ensure!(eats.iter().all(|&e| rec[e]), "N={n}: some philosopher can starve");
    }
    Ok("N=2..6 deadlock-free, fair cycle through every eat, all pairs share a participant".into())
}

fn abstraction_scaling() -> Check {
    let mut slowest = Duration::ZERO;
    for n in 2..=50 {
        let s = philosophers(n);
        let keep = s.component_set(&["p1", "f1", "p2", "f2"]).unwrap();
        let start = Instant::now();
        let run = synthesize_with_abstraction(&s, &keep, Ordering::Force, 0)
            .map_err(|e| format!("N={n}: {e}"))?;
        let took = start.elapsed();
        slowest = slowest.max(took);
        ensure!(took < Duration::from_secs(30), "N={n} took {took:?}");
        let vars = run.synthesis.rounds[0].variables;
        let want = match n {
            2 => 26,
            3 => 36,
            _ => 38,
        };
        ensure!(vars == want, "N={n}: {vars} variables, want {want}");
        let concrete = match run.concrete {
            Some(Ok(p)) => p,
            other => return Err(format!("N={n}: {other:?} / {:?}", run.synthesis.outcome)),
        };
        if n <= 6 {
            let fixed = s.with_priorities(s.priorities().union(&concrete)).unwrap();
            let v = explicit::verdict(&fixed, Mode::Deadlock, BUDGET).map_err(|e| e.to_string())?;
            ensure!(v == Verdict::Safe, "N={n}: concretized priorities deadlock");
        }
    }
    let (code, out) = prisyn(&["synth", "phil-50", "--keep", "p1,f1,p2,f2", "--json"]);
    let v = json(&out)?;
    ensure!(code == 0 && v["variables"] == 38, "cli phil-50 --keep: exit {code}");
    Ok(format!(
        "N=4..50 at 38 vars (N=2: 26 whole system, N=3: 36), concrete safe N<=6, slowest {:.2}s",
        slowest.as_secs_f64()
    ))
}

fn figure_two() -> Check {
    let s = fixtures::load("fig2").unwrap();
    let l = localize(&s, Objective::Risk, Ordering::Decl, &CandidateFilter::default())
        .map_err(|e| e.to_string())?;
    let cube = |risk: &str, en: &[&str]| Cube {
        risk: s.interaction_index(risk).unwrap(),
        enabled: ids(&s, en),
    };
    let want = vec![
        cube("a", &["a", "b", "c", "g"]),
        cube("b", &["a", "b"]),
        cube("g", &["a", "b", "c", "g"]),
    ];
    ensure!(l.cubes == want, "cubes {:?}", l.cubes);
    let cnf = build_cnf(&l.cubes, s.priorities(), &CandidateFilter::default());
    ensure!(cnf.solve().is_some(), "unsatisfiable");
    ensure!(
        cnf.satisfied_by(&pairs(&s, &[("a", "c"), ("g", "a"), ("b", "a")])),
        "good assignment rejected"
    );
    ensure!(
        !cnf.satisfied_by(&pairs(&s, &[("a", "b"), ("g", "b"), ("b", "a")])),
        "bad assignment accepted"
    );
    Ok("3 cubes, satisfiable, assignments classified".into())
}

fn figure_three() -> Check {
    let s = fixtures::load("fig3").unwrap();
    let plain = synthesize(&s, &SynthOptions::new(Mode::Risk));
    ensure!(
        matches!(plain.outcome, Outcome::Failure(Failure::Unsat { .. })),
        "depth 0: {:?}",
        plain.outcome
    );
    let r = synthesize(&s, &SynthOptions::new(Mode::Risk).repush_depth(1));
    let p = r.outcome.priorities().ok_or(format!("depth 1: {:?}", r.outcome))?;
    ensure!(r.rounds.len() == 2, "{} rounds", r.rounds.len());
    let fixed = s.with_priorities(s.priorities().union(p)).unwrap();
    ensure!(
        explicit::verdict(&fixed, Mode::Risk, BUDGET).unwrap() == Verdict::Safe,
        "depth 1 result unsafe"
    );
    let (c0, _) = prisyn(&["synth", "fig3", "--repush-depth", "0"]);
    let (c1, _) = prisyn(&["synth", "fig3", "--repush-depth", "1"]);
    ensure!(c0 == 1 && c1 == 0, "cli exits {c0} and {c1}");
    Ok("depth 0 unsat, depth 1 success after one repush".into())
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for k in 0..=p.len() {
            let mut q = p.clone();
            q.insert(k, n - 1);
            out.push(q);
        }
    }
    out
}

fn force_heuristic() -> Check {
    let s = parse_system(
        "system {
           component a { locations l; on ac from l to l; on ad from l to l; }
           component b { locations l; on bd from l to l; }
           component c { locations l; on ac from l to l; }
           component d { locations l; on ad from l to l; on bd from l to l; }
         }",
    )
    .unwrap();
    let e = hyperedges(&s);
    ensure!(span_sum(&e, &[0, 1, 2, 3]) == 7, "span abcd");
    ensure!(span_sum(&e, &[2, 0, 3, 1]) == 3, "span cadb");
    let o = force_order(&e, &[0, 1, 2, 3], 10);
    let got = span_sum(&e, &o);
    ensure!(got <= 3, "heuristic reached {got}");
    let best = permutations(4).iter().map(|p| span_sum(&e, p)).min().unwrap();
    ensure!(best == 3, "optimum {best}");
    Ok(format!("spans 7 and 3, heuristic {got}, optimum {best}"))
}

fn keep_sets(s: &System) -> Vec<BTreeSet<usize>> {
    let n = s.components().len();
    (0..n)
        .map(|c| BTreeSet::from([c]))
        .chain((n > 2).then(|| BTreeSet::from([0, 1])))
        .collect()
}

fn soundness_suite() -> Check {
    let p = RandomParams::default();
    let (mut systems, mut successes, mut abstract_ok, mut lemma_checks) = (0, 0, 0, 0);
    for seed in 0..250 {
        let s = random_system(seed, &p);
        systems += 1;
        for mode in [Mode::Deadlock, Mode::Risk, Mode::Both] {
            let r = synthesize(&s, &SynthOptions::new(mode).repush_depth(1));
            if let Some(pr) = r.outcome.priorities() {
                let fixed = s.with_priorities(s.priorities().union(pr)).unwrap();
                let v = explicit::verdict(&fixed, mode, BUDGET).unwrap();
                ensure!(v == Verdict::Safe, "seed {seed} {mode:?}: success not safe");
                successes += 1;
            }
        }
        let g = explicit::reach(&s, BUDGET).unwrap();
        for keep in keep_sets(&s) {
            if let Ok(run) = synthesize_with_abstraction(&s, &keep, Ordering::Decl, 1) {
                if let Some(Ok(c)) = run.concrete {
                    let fixed = s.with_priorities(s.priorities().union(&c)).unwrap();
                    let v = explicit::verdict(&fixed, Mode::Deadlock, BUDGET).unwrap();
                    ensure!(v == Verdict::Safe, "seed {seed} keep {keep:?}: abstract success deadlocks");
                    abstract_ok += 1;
                }
            }
            let Ok(a) = abstract_system(&s, &keep) else { continue };
            let ga = explicit::reach(&a.system, BUDGET).unwrap();
            for c in &g.states {
                let pc = a.project(c);
                ensure!(ga.contains(&pc), "seed {seed} keep {keep:?}: projection unreachable");
                if explicit::is_deadlocked(&s, c) {
                    ensure!(
                        explicit::sharp_deadlocked(&a.system, &pc),
                        "seed {seed} keep {keep:?}: deadlock not ♯-deadlocked"
                    );
                }
                lemma_checks += 1;
            }
        }
    }
    ensure!(systems >= 200, "{systems} systems");
    Ok(format!(
        "{systems} systems, {successes} successes safe, {abstract_ok} abstract successes deadlock-free, {lemma_checks} inclusion checks"
    ))
}

fn config_count(e: &mut Encoded, f: Bdd) -> f64 {
    let mut keep = Vec::new();
    for c in 0..e.vars.locations.len() {
        keep.extend(e.vars.locations[c].iter().map(|p| p.0));
        keep.extend(e.vars.data[c].iter().map(|p| p.0));
    }
    let p = e.project(f, &keep);
    let free = e.var_count() - keep.len();
    e.manager.sat_count(p) / 2f64.powi(free as i32)
}

fn stage1_of(e: &mut Encoded, c: &Configuration) -> Bdd {
    let conf = e.configuration(c, false);
    let s0 = e.stage(true);
    let start = e.manager.and(conf, s0);
    e.post(start, e.t0)
}

#[derive(Clone, Debug)]
enum F {
    Var(Var),
    Not(Box<F>),
    And(Box<F>, Box<F>),
    Or(Box<F>, Box<F>),
    Xor(Box<F>, Box<F>),
    Exists(Var, Box<F>),
}

fn formula(rng: &mut ChaCha8Rng, n: u32, depth: u32) -> F {
    if depth == 0 || rng.gen_bool(0.2) {
        return F::Var(rng.gen_range(0..n));
    }
    let op = rng.gen_range(0..5);
    let v = rng.gen_range(0..n);
    let mut sub = || Box::new(formula(rng, n, depth - 1));
    match op {
        0 => F::Not(sub()),
        1 => F::And(sub(), sub()),
        2 => F::Or(sub(), sub()),
        3 => F::Xor(sub(), sub()),
        _ => F::Exists(v, sub()),
    }
}

fn eval(f: &F, a: &mut [bool]) -> bool {
    match f {
        F::Var(v) => a[*v as usize],
        F::Not(x) => !eval(x, a),
        F::And(x, y) => eval(x, a) && eval(y, a),
        F::Or(x, y) => eval(x, a) || eval(y, a),
        F::Xor(x, y) => eval(x, a) != eval(y, a),
        F::Exists(v, x) => {
            let old = a[*v as usize];
            a[*v as usize] = false;
            let r = eval(x, a);
            a[*v as usize] = true;
            let r = r || eval(x, a);
            a[*v as usize] = old;
            r
        }
    }
}

fn build(m: &mut Manager, f: &F) -> Bdd {
    match f {
        F::Var(v) => m.var(*v),
        F::Not(x) => {
            let x = build(m, x);
            m.not(x)
        }
        F::And(x, y) => {
            let (x, y) = (build(m, x), build(m, y));
            m.and(x, y)
        }
        F::Or(x, y) => {
            let (x, y) = (build(m, x), build(m, y));
            m.or(x, y)
        }
        F::Xor(x, y) => {
            let (x, y) = (build(m, x), build(m, y));
            m.xor(x, y)
        }
        F::Exists(v, x) => {
            let x = build(m, x);
            let vs = m.var_set(&[*v]);
            m.exists(vs, x)
        }
    }
}

fn oracle_equivalence() -> Check {
    let p = RandomParams::default();
    let mut states = 0;
    for seed in 0..200 {
        let s = random_system(seed, &p);
        let g = explicit::reach(&s, BUDGET).unwrap();
        let mut e = Encoded::new(&s, Ordering::Decl);
        let r = game::reachable(&mut e);
        let s0 = e.stage(true);
        let at0 = e.manager.and(r.set, s0);
        ensure!(config_count(&mut e, at0) == g.len() as f64, "seed {seed}: reachable counts differ");
        for c in &g.states {
            let st = stage1_of(&mut e, c);
            let en = explicit::enabled(&s, c);
            for sigma in 0..s.interactions().len() {
                let x = e.executed(sigma);
                let rel = e.manager.and(e.t1, x);
                let img = e.post(st, rel);
                ensure!(!img.is_false() == en.contains(&sigma), "seed {seed}: enabledness of {sigma}");
            }
            states += 1;
        }
        for mode in [Mode::Deadlock, Mode::Risk, Mode::Both] {
            let v = explicit::verdict_in(&s, &g, mode);
            let w = game::violation_word(&mut e, mode.into());
            ensure!(v.is_safe() == w.is_none(), "seed {seed} {mode:?}: verdicts differ");
            if let (Verdict::Unsafe { trace, .. }, Some(w)) = (&v, &w) {
                ensure!(trace.steps.len() == w.len(), "seed {seed} {mode:?}: witness lengths");
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let formulas = 600;
    for k in 0..formulas {
        let n = rng.gen_range(1..=12u32);
        let names: Vec<String> = (0..n).map(|i| format!("x{i}")).collect();
        let mut m = Manager::new(&names).unwrap();
        let f = formula(&mut rng, n, 6);
        let b = build(&mut m, &f);
        let mut a = vec![false; n as usize];
        for row in 0..(1u32 << n) {
            for (i, slot) in a.iter_mut().enumerate() {
                *slot = row >> i & 1 == 1;
            }
            ensure!(m.eval(b, &a) == eval(&f, &mut a.clone()), "formula {k} row {row}");
        }
    }
    Ok(format!("200 systems, {states} states agree; {formulas} formulas match truth tables"))
}

const BOTH_LEFT: &str = "dfa {
  states s00 s10 s01 s11;
  alphabet take_left_1 take_left_2 release_1 release_2;
  init s00;
  accept s11;
  s00 -take_left_1-> s10; s00 -take_left_2-> s01; s00 -release_1-> s00; s00 -release_2-> s00;
  s10 -take_left_1-> s10; s10 -take_left_2-> s11; s10 -release_1-> s00; s10 -release_2-> s10;
  s01 -take_left_1-> s11; s01 -take_left_2-> s01; s01 -release_1-> s01; s01 -release_2-> s00;
  s11 -take_left_1-> s11; s11 -take_left_2-> s11; s11 -release_1-> s01; s11 -release_2-> s10;
}";

const EATS_TWICE: &str = "dfa {
  states e0 e1 bad;
  alphabet take_right_1 release_1;
  init e0;
  accept bad;
  e0 -take_right_1-> e1; e0 -release_1-> e0;
  e1 -take_right_1-> bad; e1 -release_1-> e0;
  bad -take_right_1-> bad; bad -release_1-> bad;
}";

fn product_safe(s: &System, risk: &Dfa) -> bool {
    let prod = product_with_monitors(s, std::slice::from_ref(risk), RiskRule::Replace).unwrap();
    explicit::verdict(&prod, Mode::Risk, BUDGET).unwrap() == Verdict::Safe
}

fn words(s: &System, len: usize) -> Vec<Vec<InteractionId>> {
    let mut out = vec![Vec::new()];
    let mut frontier = vec![(Vec::new(), vec![s.initial_configuration()])];
    for _ in 0..len {
        let mut next = Vec::new();
        for (w, set) in &frontier {
            for sigma in 0..s.interactions().len() {
                let after: BTreeSet<Configuration> = set
                    .iter()
                    .flat_map(|c| explicit::step(s, c))
                    .filter(|(i, _)| *i == sigma)
                    .map(|(_, d)| d)
                    .collect();
                if !after.is_empty() {
                    let mut w = w.clone();
                    w.push(sigma);
                    out.push(w.clone());
                    next.push((w, after.into_iter().collect()));
                }
            }
        }
        frontier = next;
    }
    out
}

fn ag_pipeline() -> Check {
    let start = Instant::now();
    let phil = philosophers(2);
    let cases: Vec<(&str, &[&str], &str)> = vec![
        ("philosopher with both forks", &["p1", "f1", "f2"], BOTH_LEFT),
        ("eat once", &["p1", "f1"], EATS_TWICE),
        ("crosswise", &["p1", "f2"], BOTH_LEFT),
    ];
    let mut kinds = Vec::new();
    for (name, first, risk) in cases {
        let risk = parse_dfa(risk).unwrap();
        let p = AgProblem::new(phil.clone(), phil.component_set(first).unwrap(), risk.clone())
            .map_err(|e| e.to_string())?;
        let rep = ag_synthesize(&p, AgOptions::default()).map_err(|e| e.to_string())?;
        let sizes = rep.conjecture_sizes();
        ensure!(sizes.windows(2).all(|w| w[0] < w[1]), "{name}: sizes {sizes:?}");
        match &rep.outcome {
            AgOutcome::ProvedSafe => {
                ensure!(product_safe(&phil, &risk), "{name}: proved safe but unsafe");
                kinds.push("proved-safe");
            }
            AgOutcome::Success(r) => {
                let all = phil.priorities().union(&r.first).union(&r.second);
                ensure!(
                    product_safe(&phil.with_priorities(all).unwrap(), &risk),
                    "{name}: success but unsafe"
                );
                kinds.push("success");
            }
            AgOutcome::Fail { counterexample } => {
                ensure!(explicit::member(&phil, counterexample), "{name}: bogus counterexample");
                kinds.push("fail");
            }
        }
    }
    ensure!(kinds.contains(&"success") && kinds.contains(&"proved-safe"), "kinds {kinds:?}");

    let p = RandomParams::default();
    let (mut splits, mut checked_words) = (0, 0);
    for seed in 0..250u64 {
        let s = random_system(seed, &p);
        let n = s.components().len();
        let first: BTreeSet<usize> = (0..n).filter(|c| (seed >> c) & 1 == 1).collect();
        if n < 2 || first.is_empty() || first.len() == n {
            continue;
        }
        let Ok(problem) = AgProblem::new(s.clone(), first, Dfa::trivial(s.interactions().to_vec(), false))
        else {
            continue;
        };
        for w in words(&s, 6) {
            ensure!(
                explicit::member(&problem.s1, &w) && explicit::member(&problem.s2, &w),
                "seed {seed}: {w:?} escapes a side"
            );
            checked_words += 1;
        }
        splits += 1;
    }

    let fig6 = fixtures::load("fig6").unwrap();
    let first = fig6.component_set(&["C1"]).unwrap();
    let e = AgProblem::new(fig6.clone(), first.clone(), parse_dfa(fixtures::FIG6_SPEC).unwrap());
    ensure!(
        matches!(e, Err(AgError::SharedHigher { ref high, .. }) if high == "a"),
        "fig6 not rejected"
    );
    let (s1, s2) = decompose(&fig6, &first).unwrap();
    let b = [fig6.interaction_index("b").unwrap()];
    ensure!(explicit::member(&fig6, &b), "b not a word of the whole system");
    ensure!(
        !(explicit::member(&s1, &b) && explicit::member(&s2, &b)),
        "inclusion holds for b"
    );
    let took = start.elapsed();
    ensure!(took < Duration::from_secs(300), "suite took {took:?}");
    Ok(format!(
        "toy outcomes {kinds:?} re-verified, {splits} legal splits / {checked_words} words, fig6 rejected and w=b shown, {:.1}s",
        took.as_secs_f64()
    ))
}

fn dpu() -> Check {
    let (c0, out0) = prisyn(&["synth", "dpu", "--json"]);
    let v0 = json(&out0)?;
    ensure!(c0 == 1 && v0["outcome"] == "failure", "plain: exit {c0}");
    ensure!(
        v0["conflict"].as_array().is_some_and(|a| a.len() == 2),
        "plain conflict {}",
        v0["conflict"]
    );
    let (c1, out1) = prisyn(&["synth", "dpu", "--repush-depth", "1", "--json"]);
    let v1 = json(&out1)?;
    ensure!(c1 == 0 && v1["outcome"] == "success", "repush: exit {c1}");
    ensure!(v1["verification"] == "safe (explicit)", "repush: {}", v1["verification"]);
    Ok("plain resolution unsat on two contradictory cubes, depth 1 succeeds".into())
}

fn main() {
    let criteria: [(&str, fn() -> Check); 10] = [
        ("dining philosophers synthesis", philosophers_synthesis),
        ("philosophers: no starvation, locality", philosophers_quality),
        ("alphabet abstraction", abstraction_scaling),
        ("figure 2 fault cubes", figure_two),
        ("figure 3 repush", figure_three),
        ("FORCE ordering", force_heuristic),
        ("end-to-end soundness", soundness_suite),
        ("oracle equivalence", oracle_equivalence),
        ("assume-guarantee pipeline", ag_pipeline),
        ("DPU fail then repush", dpu),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (k, (name, f)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let r = panic::catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let secs = start.elapsed().as_secs_f64();
        match r {
            Ok(note) => println!("PASS {:>2} {name}: {note} [{secs:.1}s]", k + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {why} [{secs:.1}s]", k + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
