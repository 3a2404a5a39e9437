//! Two-stage symbolic encoding of a system.
//!
//! Stage 0 (`stg = 1`) records in the interaction variables which
//! interactions pass joint participation; stage 1 (`stg = 0`) executes one
//! of them subject to the priorities. Each stage-1 edge leaves exactly the
//! executed interaction's primed variable set, or none for ♯.

pub mod order;

use serde::{Deserialize, Serialize};

use crate::bdd::{Bdd, Manager, RenameId, Var};
use crate::model::{Configuration, Expr, InteractionId, System};

/// Variable layout strategy.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Ordering {
    /// Stage pair, interaction pairs, then component blocks in declaration
    /// order.
    #[default]
    Decl,
    /// Components in FORCE order with each interaction pair placed at the
    /// center of gravity of its participants.
    Force,
}

pub const FORCE_ITERATIONS: usize = 50;

/// Allocation of diagram variables. Every pair is `(unprimed, primed)` with
/// the primed variable directly after its partner.
#[derive(Clone, Debug)]
pub struct VarMap {
    pub stg: (Var, Var),
    /// `None` for ♯, which carries no variables.
    pub interactions: Vec<Option<(Var, Var)>>,
    /// Location bits per component, least significant first.
    pub locations: Vec<Vec<(Var, Var)>>,
    pub data: Vec<Vec<(Var, Var)>>,
    pub component_order: Vec<usize>,
    pub names: Vec<String>,
}

fn bits_for(n: usize) -> usize {
    let mut k = 0;
    while (1usize << k) < n {
        k += 1;
    }
    k
}

impl VarMap {
    pub fn allocate(s: &System, ordering: Ordering) -> VarMap {
        let nc = s.components().len();
        let ni = s.interactions().len();
        let mut vm = VarMap {
            stg: (0, 1),
            interactions: vec![None; ni],
            locations: vec![Vec::new(); nc],
            data: vec![Vec::new(); nc],
            component_order: (0..nc).collect(),
            names: vec!["stg".into(), "stg'".into()],
        };
        enum Item {
            Interaction(usize),
            Component(usize),
        }
        let items: Vec<Item> = match ordering {
            Ordering::Decl => (0..ni)
                .map(Item::Interaction)
                .chain((0..nc).map(Item::Component))
                .collect(),
            Ordering::Force => {
                let edges = order::hyperedges(s);
                let comp_order = order::force_order(&edges, &vm.component_order, FORCE_ITERATIONS);
                let mut pos = vec![0usize; nc];
                for (k, &c) in comp_order.iter().enumerate() {
                    pos[c] = k;
                }
                vm.component_order = comp_order.clone();
                let mut keyed: Vec<(f64, u8, Item)> = comp_order
                    .iter()
                    .map(|&c| (pos[c] as f64, 0, Item::Component(c)))
                    .collect();
                for (sigma, e) in edges.iter().enumerate() {
                    let cog = e.iter().map(|&c| pos[c] as f64).sum::<f64>() / e.len() as f64;
                    keyed.push((cog, 1, Item::Interaction(sigma)));
                }
                keyed.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
                keyed.into_iter().map(|(_, _, it)| it).collect()
            }
        };
        for it in items {
            match it {
                Item::Interaction(sigma) => {
                    if Some(sigma) != s.sharp() {
                        let name = format!("sig:{}", s.interaction_name(sigma));
                        vm.interactions[sigma] = Some(vm.pair(name));
                    }
                }
                Item::Component(c) => {
                    let comp = s.component(c);
                    for b in 0..bits_for(comp.locations.len()) {
                        let p = vm.pair(format!("loc:{}#{b}", comp.name));
                        vm.locations[c].push(p);
                    }
                    for v in &comp.variables {
                        let p = vm.pair(format!("var:{}/{v}", comp.name));
                        vm.data[c].push(p);
                    }
                }
            }
        }
        vm
    }

    fn pair(&mut self, name: String) -> (Var, Var) {
        let v = self.names.len() as Var;
        self.names.push(name.clone());
        self.names.push(format!("{name}'"));
        (v, v + 1)
    }

    pub fn var_count(&self) -> usize {
        self.names.len()
    }

    fn all_pairs(&self) -> Vec<(Var, Var)> {
        let mut out = vec![self.stg];
        out.extend(self.interactions.iter().flatten());
        for c in 0..self.locations.len() {
            out.extend(&self.locations[c]);
            out.extend(&self.data[c]);
        }
        out
    }

    /// Interaction variables `(interaction, unprimed, primed)`, ♯ excluded.
    pub fn interaction_vars(&self) -> impl Iterator<Item = (InteractionId, Var, Var)> + '_ {
        self.interactions
            .iter()
            .enumerate()
            .filter_map(|(i, p)| p.map(|(u, v)| (i, u, v)))
    }
}

/// The encoded system: variable map, the two stage relations and the
/// initial, deadlock and risk predicates, together with their manager.
pub struct Encoded {
    pub system: System,
    pub vars: VarMap,
    pub manager: Manager,
    pub t0: Bdd,
    pub t1: Bdd,
    pub p_ini: Bdd,
    pub p_dead: Bdd,
    pub p_risk: Bdd,
    /// Stage-1 states where ♯ is jointly enabled, ignoring priorities;
    /// `false` for concrete systems.
    pub sharp_raised: Bdd,
    unprimed: Bdd,
    primed: Bdd,
    to_primed: RenameId,
    to_unprimed: RenameId,
}

impl std::fmt::Debug for Encoded {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Encoded")
            .field("vars", &self.vars.var_count())
            .field("manager", &self.manager)
            .finish()
    }
}

fn expr_bdd(m: &mut Manager, e: &Expr, vars: &[(Var, Var)]) -> Bdd {
    match e {
        Expr::Const(b) => m.constant(*b),
        Expr::Var(i) => m.var(vars[*i].0),
        Expr::Not(a) => {
            let a = expr_bdd(m, a, vars);
            m.not(a)
        }
        Expr::And(a, b) => {
            let (a, b) = (expr_bdd(m, a, vars), expr_bdd(m, b, vars));
            m.and(a, b)
        }
        Expr::Or(a, b) => {
            let (a, b) = (expr_bdd(m, a, vars), expr_bdd(m, b, vars));
            m.or(a, b)
        }
    }
}

fn location_literals(bits: &[(Var, Var)], loc: usize, primed: bool) -> Vec<(Var, bool)> {
    bits.iter()
        .enumerate()
        .map(|(k, &(u, p))| (if primed { p } else { u }, loc >> k & 1 == 1))
        .collect()
}

impl Encoded {
    pub fn new(s: &System, ordering: Ordering) -> Encoded {
        let vm = VarMap::allocate(s, ordering);
        let mut m = Manager::new(&vm.names).expect("variable names are unique");
        let pairs = vm.all_pairs();
        let unprimed_vars: Vec<Var> = pairs.iter().map(|p| p.0).collect();
        let primed_vars: Vec<Var> = pairs.iter().map(|p| p.1).collect();
        let unprimed = m.var_set(&unprimed_vars);
        let primed = m.var_set(&primed_vars);
        let to_primed = m.renaming(&unprimed_vars, &primed_vars).unwrap();
        let to_unprimed = m.renaming(&primed_vars, &unprimed_vars).unwrap();
        let mut enc = Encoded {
            system: s.clone(),
            vars: vm,
            t0: m.fls(),
            t1: m.fls(),
            p_ini: m.fls(),
            p_dead: m.fls(),
            p_risk: m.fls(),
            sharp_raised: m.fls(),
            manager: m,
            unprimed,
            primed,
            to_primed,
            to_unprimed,
        };
        enc.build();
        enc
    }

    pub fn var_count(&self) -> usize {
        self.vars.var_count()
    }

    fn loc(&mut self, c: usize, l: usize, primed: bool) -> Bdd {
        let lits = location_literals(&self.vars.locations[c], l, primed);
        self.manager.cube(&lits)
    }

    /// `enc(l) ∧ g` for transition `t` of component `c`.
    fn source_and_guard(&mut self, c: usize, t: usize) -> Bdd {
        let tr = &self.system.component(c).transitions[t];
        let (src, guard) = (tr.source, tr.guard.clone());
        let l = self.loc(c, src, false);
        let g = expr_bdd(&mut self.manager, &guard, &self.vars.data[c]);
        self.manager.and(l, g)
    }

    /// Full local step relation of transition `t` of component `c`.
    fn local_step(&mut self, c: usize, t: usize) -> Bdd {
        let mut r = self.source_and_guard(c, t);
        let tr = self.system.component(c).transitions[t].clone();
        let dst = self.loc(c, tr.destination, true);
        r = self.manager.and(r, dst);
        for (v, f) in tr.update.iter().enumerate() {
            let (_, vp) = self.vars.data[c][v];
            let fb = expr_bdd(&mut self.manager, f, &self.vars.data[c]);
            let x = self.manager.var(vp);
            let eq = self.manager.iff(x, fb);
            r = self.manager.and(r, eq);
        }
        r
    }

    fn frame_pairs(&mut self, pairs: &[(Var, Var)]) -> Bdd {
        let mut r = self.manager.tru();
        for &(u, p) in pairs.iter().rev() {
            let (a, b) = (self.manager.var(u), self.manager.var(p));
            let eq = self.manager.iff(a, b);
            r = self.manager.and(eq, r);
        }
        r
    }

    fn component_frame(&mut self, c: usize) -> Bdd {
        let mut pairs = self.vars.locations[c].clone();
        pairs.extend(&self.vars.data[c]);
        self.frame_pairs(&pairs)
    }

    /// Stage-1 predicate: interaction `sigma` passes joint participation.
    pub fn raised(&mut self, sigma: InteractionId) -> Bdd {
        match self.vars.interactions[sigma] {
            Some((u, _)) => self.manager.var(u),
            None => self.sharp_raised,
        }
    }

    /// Edge predicate: the stage-1 step executed `sigma`.
    pub fn executed(&mut self, sigma: InteractionId) -> Bdd {
        match self.vars.interactions[sigma] {
            Some((_, p)) => self.manager.var(p),
            None => self.label_cube(sigma),
        }
    }

    /// Primed interaction literals recorded by a step executing `sigma`:
    /// its own variable set, every other one cleared.
    fn label_cube(&mut self, sigma: InteractionId) -> Bdd {
        let lits: Vec<(Var, bool)> = self
            .vars
            .interaction_vars()
            .map(|(i, _, p)| (p, i == sigma))
            .collect();
        self.manager.cube(&lits)
    }

    fn build(&mut self) {
        let s = self.system.clone();
        let nc = s.components().len();
        let (stg, stgp) = self.vars.stg;
        let stg0 = self.manager.cube(&[(stg, true), (stgp, false)]);
        let stg1 = self.manager.cube(&[(stg, false), (stgp, true)]);

        let frames: Vec<Bdd> = (0..nc).map(|c| self.component_frame(c)).collect();

        // P_σ per interaction: every participant offers an enabled σ-transition.
        let mut offers: Vec<Vec<Bdd>> = vec![Vec::new(); s.interactions().len()];
        for sigma in 0..s.interactions().len() {
            for &c in s.participants(sigma) {
                let mut any = self.manager.fls();
                for t in 0..s.component(c).transitions.len() {
                    if s.component(c).transitions[t].label == sigma {
                        let sg = self.source_and_guard(c, t);
                        any = self.manager.or(any, sg);
                    }
                }
                offers[sigma].push(any);
            }
        }

        // Stage 0.
        let mut t0 = self.manager.tru();
        for c in (0..nc).rev() {
            t0 = self.manager.and(frames[c], t0);
        }
        for (sigma, _, p) in self.vars.interaction_vars().collect::<Vec<_>>() {
            let ps = self.manager.and_all(offers[sigma].clone());
            let x = self.manager.var(p);
            let eq = self.manager.iff(x, ps);
            t0 = self.manager.and(t0, eq);
        }
        self.t0 = self.manager.and(stg0, t0);

        if let Some(h) = s.sharp() {
            self.sharp_raised = self.manager.or_all(offers[h].clone());
        }

        // Stage 1.
        let mut t1 = self.manager.fls();
        for sigma in 0..s.interactions().len() {
            let sharp = Some(sigma) == s.sharp();
            let mut rel = self.label_cube(sigma);
            if !sharp {
                let r = self.raised(sigma);
                rel = self.manager.and(rel, r);
            }
            let parts = s.participants(sigma);
            let mut some_fires = self.manager.fls();
            for c in (0..nc).rev() {
                if !parts.contains(&c) {
                    rel = self.manager.and(frames[c], rel);
                    continue;
                }
                let mut fire = self.manager.fls();
                for t in 0..s.component(c).transitions.len() {
                    if s.component(c).transitions[t].label == sigma {
                        let st = self.local_step(c, t);
                        fire = self.manager.or(fire, st);
                    }
                }
                if sharp {
                    some_fires = self.manager.or(some_fires, fire);
                    fire = self.manager.or(fire, frames[c]);
                }
                rel = self.manager.and(fire, rel);
            }
            if sharp {
                rel = self.manager.and(rel, some_fires);
            }
            t1 = self.manager.or(t1, rel);
        }
        for (lo, hi) in s.priority_closure().iter().collect::<Vec<_>>() {
            let a = self.raised(lo);
            let b = self.raised(hi);
            let both = self.manager.and(a, b);
            let ex = self.executed(lo);
            let nex = self.manager.not(ex);
            let rule = self.manager.implies(both, nex);
            t1 = self.manager.and(t1, rule);
        }
        self.t1 = self.manager.and(stg1, t1);

        // Initial, deadlock and risk predicates.
        let init = s.initial_configuration();
        let ini = self.configuration(&init, false);
        let st = self.manager.var(stg);
        self.p_ini = self.manager.and(st, ini);

        let nst = self.manager.nvar(stg);
        let mut dead = nst;
        for (_, u, _) in self.vars.interaction_vars().collect::<Vec<_>>() {
            let nu = self.manager.nvar(u);
            dead = self.manager.and(dead, nu);
        }
        let nsr = self.manager.not(self.sharp_raised);
        self.p_dead = self.manager.and(dead, nsr);

        let mut risk = self.manager.fls();
        for r in s.risk_states().to_vec() {
            let mut lits = Vec::new();
            for (c, k) in r.constraints.iter().enumerate() {
                if let Some(k) = k {
                    lits.extend(location_literals(
                        &self.vars.locations[c],
                        k.location,
                        false,
                    ));
                    for &(v, b) in &k.valuation {
                        lits.push((self.vars.data[c][v].0, b));
                    }
                }
            }
            let cube = self.manager.cube(&lits);
            risk = self.manager.or(risk, cube);
        }
        self.p_risk = self.manager.and(nst, risk);
    }

    /// Location and data literals of a configuration (stage and interaction
    /// variables unconstrained).
    pub fn configuration(&mut self, c: &Configuration, primed: bool) -> Bdd {
        let lits = self.configuration_literals(c, primed);
        self.manager.cube(&lits)
    }

    pub fn configuration_literals(&self, c: &Configuration, primed: bool) -> Vec<(Var, bool)> {
        let mut lits = Vec::new();
        for (ci, l) in c.locals.iter().enumerate() {
            lits.extend(location_literals(
                &self.vars.locations[ci],
                l.location as usize,
                primed,
            ));
            for (v, &(u, p)) in self.vars.data[ci].iter().enumerate() {
                lits.push((if primed { p } else { u }, l.valuation >> v & 1 == 1));
            }
        }
        lits
    }

    /// Stage predicate: `stg` for stage 0, `¬stg` for stage 1.
    pub fn stage(&mut self, zero: bool) -> Bdd {
        self.manager.literal(self.vars.stg.0, zero)
    }

    /// Decodes the configuration of a total or partial assignment given as
    /// literals over unprimed variables; unassigned bits read as 0.
    pub fn decode(&self, lits: &[(Var, bool)]) -> Configuration {
        let val = |v: Var| lits.iter().any(|&(w, b)| w == v && b);
        Configuration {
            locals: (0..self.system.components().len())
                .map(|c| crate::model::LocalState {
                    location: self.vars.locations[c]
                        .iter()
                        .enumerate()
                        .map(|(k, &(u, _))| (val(u) as u32) << k)
                        .sum(),
                    valuation: self.vars.data[c]
                        .iter()
                        .enumerate()
                        .map(|(k, &(u, _))| (val(u) as u64) << k)
                        .sum(),
                })
                .collect(),
        }
    }

    /// Successor states of `set` under `rel`, as unprimed predicate.
    pub fn post(&mut self, set: Bdd, rel: Bdd) -> Bdd {
        let img = self.manager.and_exists(set, rel, self.unprimed);
        self.manager.rename(img, self.to_unprimed)
    }

    /// States with some `rel`-edge into `set`.
    pub fn pre(&mut self, set: Bdd, rel: Bdd) -> Bdd {
        let p = self.manager.rename(set, self.to_primed);
        self.manager.and_exists(rel, p, self.primed)
    }

    pub fn prime(&mut self, f: Bdd) -> Bdd {
        self.manager.rename(f, self.to_primed)
    }

    pub fn unprime(&mut self, f: Bdd) -> Bdd {
        self.manager.rename(f, self.to_unprimed)
    }

    pub fn exists_primed(&mut self, f: Bdd) -> Bdd {
        self.manager.exists(self.primed, f)
    }

    pub fn exists_unprimed(&mut self, f: Bdd) -> Bdd {
        self.manager.exists(self.unprimed, f)
    }

    /// Projects `f` onto the listed variables.
    pub fn project(&mut self, f: Bdd, keep: &[Var]) -> Bdd {
        let drop: Vec<Var> = (0..self.vars.var_count() as Var)
            .filter(|v| !keep.contains(v))
            .collect();
        let cube = self.manager.var_set(&drop);
        self.manager.exists(cube, f)
    }

    /// Per-predicate node counts, one `name nodes` line each.
    pub fn stats(&self) -> Vec<(&'static str, usize)> {
        vec![
            ("t0", self.manager.node_count(self.t0)),
            ("t1", self.manager.node_count(self.t1)),
            ("p_ini", self.manager.node_count(self.p_ini)),
            ("p_dead", self.manager.node_count(self.p_dead)),
            ("p_risk", self.manager.node_count(self.p_risk)),
        ]
    }
}
