//! Model generators: dining philosophers, small hand-built systems used as
//! regression fixtures, the data-processing-unit model and seeded random
//! systems.

use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::model::{
    parse_system, Component, Expr, LocalConstraint, PartialConfiguration, PrioritySet, System,
    Transition,
};

/// Philosophers `p1..pN` and forks `f1..fN`, declared interleaved.
/// Philosopher `i` takes fork `i` (`take_left_i`), then fork `i+1`
/// (`take_right_i`), and releases both (`release_i`).
pub fn philosophers_text(n: usize) -> String {
    assert!(n >= 2, "at least two philosophers");
    let prev = |i: usize| if i == 1 { n } else { i - 1 };
    let mut out = String::from("system {\n");
    for i in 1..=n {
        let _ = writeln!(
            out,
            "  component p{i} {{\n    locations think hasleft eat;\n    init think;\n    \
             on take_left_{i} from think to hasleft;\n    \
             on take_right_{i} from hasleft to eat;\n    \
             on release_{i} from eat to think;\n  }}"
        );
        let j = prev(i);
        let _ = writeln!(
            out,
            "  component f{i} {{\n    locations free taken;\n    init free;\n    \
             on take_left_{i} from free to taken;\n    \
             on take_right_{j} from free to taken;\n    \
             on release_{i} from taken to free;\n    \
             on release_{j} from taken to free;\n  }}"
        );
    }
    out.push_str("}\n");
    out
}

pub fn philosophers(n: usize) -> System {
    parse_system(&philosophers_text(n)).expect("generated model parses")
}

/// Single-component game: `c1` initial, `c6`/`c7` risk, `c3..c5` doomed,
/// `c2` and `c8` escapable, `c9` unreachable.
pub const FIG2: &str = "system {
  interactions a b c d e f g;
  component g {
    locations c1 c2 c3 c4 c5 c6 c7 c8 c9;
    init c1;
    on a from c1 to c1;
    on e from c1 to c2;
    on d from c1 to c8;
    on a from c2 to c3;
    on g from c2 to c4;
    on b from c2 to c1;
    on c from c2 to c1;
    on f from c3 to c6;
    on f from c4 to c7;
    on f from c5 to c6;
    on b from c8 to c5;
    on a from c8 to c1;
    on b from c9 to c5;
    on a from c9 to c1;
  }
  risk { g@c6 }
  risk { g@c7 }
}
";

/// Two escapable states whose only escapes conflict: `c1` must avoid `a`
/// and `c2` must avoid `b`.
pub const FIG3: &str = "system {
  interactions x y a b z;
  component g {
    locations c0 c1 c2 bad ok;
    init c0;
    on x from c0 to c1;
    on y from c0 to c2;
    on a from c1 to bad;
    on b from c1 to ok;
    on b from c2 to bad;
    on a from c2 to ok;
    on z from ok to ok;
  }
  risk { g@bad }
}
";

/// `C1` over `{a, b, c}`, `C2` sharing `b`, and `C3`, `C4` whose labels
/// are all outside `C1`'s alphabet.
pub const FIG4: &str = "system {
  component C1 {
    locations l10 l11 l12;
    on a from l10 to l11;
    on b from l11 to l12;
    on c from l12 to l10;
  }
  component C2 {
    locations l20 l21;
    on b from l20 to l21;
    on e from l21 to l20;
    on f from l20 to l20;
  }
  component C3 {
    locations l30 l31;
    on e from l30 to l31;
    on f from l31 to l30;
  }
  component C4 {
    locations l40;
    on g from l40 to l40;
  }
}
";

/// `C2` and `C3` alone: deadlocks at `(l21, l31)`, yet ♯ stays enabled
/// once every label but `b` is abstracted.
pub const FIG4_SUB: &str = "system {
  component C2 {
    locations l20 l21;
    on b from l20 to l21;
    on e from l21 to l20;
    on f from l20 to l20;
  }
  component C3 {
    locations l30 l31;
    on e from l30 to l31;
    on f from l31 to l30;
  }
}
";

/// Shared `a`, `b` and `C2`-local `c`, with the shared `a` above `b`.
pub const FIG6: &str = "system {
  interactions a b c;
  component C1 {
    locations m0 m1 m2;
    on a from m0 to m1;
    on b from m0 to m2;
  }
  component C2 {
    locations n0 n1 n2 n3;
    on b from n0 to n1;
    on c from n0 to n2;
    on a from n2 to n3;
  }
  priority b < a;
}
";

/// Figure-6 system with the priority removed.
pub const FIG6_PLAIN: &str = "system {
  interactions a b c;
  component C1 {
    locations m0 m1 m2;
    on a from m0 to m1;
    on b from m0 to m2;
  }
  component C2 {
    locations n0 n1 n2 n3;
    on b from n0 to n1;
    on c from n0 to n2;
    on a from n2 to n3;
  }
}
";

/// Risk word `b` for [`FIG6`].
pub const FIG6_SPEC: &str = "dfa {
  states q0 q1;
  alphabet a b c;
  init q0;
  accept q1;
  q0 -b-> q1;
}
";

/// Master reading a sensor through two interrupt handlers over two
/// cycles. Reading by the serial handler in cycle one, or by the synch
/// handler in cycle two, makes the final calculation impossible.
pub const DPU: &str = "system {
  interactions serial_read synch_read next_cycle skip calc;
  component Master {
    locations m0 m1 m2 m3;
    on synch_read from m0 to m1;
    on serial_read from m0 to m1;
    on next_cycle from m1 to m2;
    on skip from m1 to m0;
    on synch_read from m2 to m3;
    on serial_read from m2 to m3;
    on calc from m3 to m0;
  }
  component Sensor {
    locations s;
    vars v;
    on synch_read from s to s set v:=!v;
    on serial_read from s to s set v:=!v;
  }
  component SynchInt {
    locations i;
    on synch_read from i to i;
  }
  component SerialInt {
    locations c1 c2;
    vars miss1 miss2;
    on serial_read from c1 to c1 set miss1:=1;
    on synch_read from c1 to c1;
    on serial_read from c2 to c2;
    on synch_read from c2 to c2 set miss2:=1;
    on next_cycle from c1 to c2;
    on skip from c1 to c1 when !miss1;
    on calc from c2 to c1 when !miss1 & !miss2;
  }
  component Clock {
    locations k0 k1;
    on next_cycle from k0 to k1;
    on skip from k0 to k0;
    on calc from k1 to k0;
  }
}
";

/// Names accepted by [`figure`].
pub const FIGURES: &[&str] = &[
    "fig2",
    "fig3",
    "fig4",
    "fig4-sub",
    "fig6",
    "fig6-plain",
    "dpu",
];

/// Model text of a named fixture.
pub fn figure(name: &str) -> Option<&'static str> {
    Some(match name {
        "fig2" => FIG2,
        "fig3" => FIG3,
        "fig4" => FIG4,
        "fig4-sub" => FIG4_SUB,
        "fig6" => FIG6,
        "fig6-plain" => FIG6_PLAIN,
        "dpu" => DPU,
        _ => return None,
    })
}

pub fn load(name: &str) -> Option<System> {
    figure(name).map(|t| parse_system(t).expect("fixture parses"))
}

/// Size bounds for [`random_system`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RandomParams {
    pub max_components: usize,
    pub max_locations: usize,
    pub max_variables: usize,
    pub labels: usize,
    pub max_transitions: usize,
    pub max_priorities: usize,
    pub max_risk: usize,
}

impl Default for RandomParams {
    fn default() -> Self {
        RandomParams {
            max_components: 4,
            max_locations: 4,
            max_variables: 2,
            labels: 5,
            max_transitions: 5,
            max_priorities: 2,
            max_risk: 2,
        }
    }
}

fn random_literal(rng: &mut ChaCha8Rng, vars: usize) -> Expr {
    let v = Expr::var(rng.gen_range(0..vars));
    if rng.gen_bool(0.5) {
        Expr::not(v)
    } else {
        v
    }
}

/// A random valid system, deterministic in `seed`. Labels no transition
/// uses are dropped.
pub fn random_system(seed: u64, p: &RandomParams) -> System {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ncomp = rng.gen_range(1..=p.max_components);
    let mut comps = Vec::with_capacity(ncomp);
    for ci in 0..ncomp {
        let nloc = rng.gen_range(1..=p.max_locations);
        let nvar = rng.gen_range(0..=p.max_variables);
        let mut c = Component::new(
            format!("c{ci}"),
            (0..nloc).map(|l| format!("l{l}")).collect(),
            (0..nvar).map(|v| format!("v{v}")).collect(),
        );
        c.initial_location = rng.gen_range(0..nloc);
        c.initial_valuation = rng.gen_range(0..1u64 << nvar);
        for _ in 0..rng.gen_range(1..=p.max_transitions) {
            let mut t = Transition::simple(
                rng.gen_range(0..nloc),
                rng.gen_range(0..p.labels),
                rng.gen_range(0..nloc),
                nvar,
            );
            if nvar > 0 && rng.gen_bool(0.3) {
                t.guard = random_literal(&mut rng, nvar);
            }
            for v in 0..nvar {
                match rng.gen_range(0..4) {
                    0 => t.update[v] = Expr::Const(rng.gen_bool(0.5)),
                    1 => t.update[v] = Expr::not(Expr::var(v)),
                    _ => {}
                }
            }
            c.transitions.push(t);
        }
        comps.push(c);
    }
    let mut used: Vec<usize> = comps
        .iter()
        .flat_map(|c| c.transitions.iter().map(|t| t.label))
        .collect();
    used.sort_unstable();
    used.dedup();
    let remap = |l: usize| used.binary_search(&l).expect("label is used");
    for c in &mut comps {
        for t in &mut c.transitions {
            t.label = remap(t.label);
        }
    }
    let names: Vec<String> = used.iter().map(|l| format!("i{l}")).collect();
    let mut rank: Vec<usize> = (0..names.len()).collect();
    rank.shuffle(&mut rng);
    let mut priorities = PrioritySet::new();
    if names.len() >= 2 {
        for _ in 0..rng.gen_range(0..=p.max_priorities) {
            let a = rng.gen_range(0..names.len());
            let b = rng.gen_range(0..names.len());
            if rank[a] < rank[b] {
                priorities.insert(a, b);
            }
        }
    }
    let mut risk = Vec::new();
    for _ in 0..rng.gen_range(0..=p.max_risk) {
        let ci = rng.gen_range(0..ncomp);
        let mut constraints = vec![None; ncomp];
        let mut k = LocalConstraint::at(rng.gen_range(0..comps[ci].locations.len()));
        if !comps[ci].variables.is_empty() && rng.gen_bool(0.5) {
            k.valuation.push((
                rng.gen_range(0..comps[ci].variables.len()),
                rng.gen_bool(0.5),
            ));
        }
        constraints[ci] = Some(k);
        risk.push(PartialConfiguration { constraints });
    }
    System::new(comps, names, priorities, risk).expect("generated system is valid")
}
