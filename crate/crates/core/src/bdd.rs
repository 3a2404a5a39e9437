//! Reduced ordered binary decision diagrams.
//!
//! A [`Manager`] owns a hash-consed node store and a lossy operation cache.
//! Variables are ordered by creation index; [`Bdd`] handles are small
//! `Copy` values tagged with their manager so that mixing managers is
//! detected.

use std::fmt::Write;
use std::sync::atomic::{AtomicU32, Ordering};

use rustc_hash::FxHashMap;
use thiserror::Error;

/// Variable handle; also its level in the order.
pub type Var = u32;

const FALSE: u32 = 0;
const TRUE: u32 = 1;
const TERMINAL_VAR: u32 = u32::MAX;

static NEXT_MANAGER: AtomicU32 = AtomicU32::new(1);

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BddError {
    #[error("predicates belong to different managers")]
    ManagerMismatch,
    #[error("duplicate variable name `{0}`")]
    DuplicateVariable(String),
    #[error("substitution lists differ in length ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("substitution lists overlap")]
    Overlap,
    #[error("variable {0} out of range")]
    UnknownVariable(Var),
    #[error("predicate is unsatisfiable")]
    Unsatisfiable,
}

/// A Boolean function in some [`Manager`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Bdd {
    root: u32,
    manager: u32,
}

impl Bdd {
    pub fn is_false(self) -> bool {
        self.root == FALSE
    }

    pub fn is_true(self) -> bool {
        self.root == TRUE
    }

    /// Raw node index, stable for the lifetime of the manager.
    pub fn node(self) -> u32 {
        self.root
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BinOp {
    And,
    Or,
    Xor,
    Implies,
    Iff,
}

#[derive(Clone, Copy)]
struct Node {
    var: u32,
    lo: u32,
    hi: u32,
}

#[derive(Clone, Copy, Default)]
struct CacheEntry {
    op: u32,
    a: u32,
    b: u32,
    c: u32,
    result: u32,
}

const OP_AND: u32 = 1;
const OP_OR: u32 = 2;
const OP_XOR: u32 = 3;
const OP_NOT: u32 = 4;
const OP_EXISTS: u32 = 5;
const OP_AND_EXISTS: u32 = 6;
const OP_RENAME_BASE: u32 = 16;

/// Identifier of a renaming registered with [`Manager::renaming`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct RenameId(u32);

struct Renaming {
    map: Vec<Var>,
}

pub struct Manager {
    id: u32,
    names: Vec<String>,
    nodes: Vec<Node>,
    unique: Vec<u32>,
    unique_mask: usize,
    cache: Vec<CacheEntry>,
    cache_mask: usize,
    renamings: Vec<Renaming>,
    cache_hits: u64,
    cache_lookups: u64,
}

impl std::fmt::Debug for Manager {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Manager")
            .field("id", &self.id)
            .field("vars", &self.names.len())
            .field("nodes", &self.nodes.len())
            .finish()
    }
}

#[inline]
fn hash3(a: u32, b: u32, c: u32) -> usize {
    let h = (a as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)
        ^ (b as u64).wrapping_mul(0xC2B2_AE3D_27D4_EB4F)
        ^ (c as u64).wrapping_mul(0x1656_67B1_9E37_79F9);
    (h ^ (h >> 29)) as usize
}

impl Manager {
    /// Manager with one variable per name, ordered as given.
    pub fn new<S: AsRef<str>>(names: &[S]) -> Result<Manager, BddError> {
        let mut seen = FxHashMap::default();
        for (i, n) in names.iter().enumerate() {
            if seen.insert(n.as_ref().to_string(), i).is_some() {
                return Err(BddError::DuplicateVariable(n.as_ref().to_string()));
            }
        }
        let terminal = Node {
            var: TERMINAL_VAR,
            lo: 0,
            hi: 0,
        };
        let unique_size = 1 << 12;
        let cache_size = 1 << 12;
        Ok(Manager {
            id: NEXT_MANAGER.fetch_add(1, Ordering::Relaxed),
            names: names.iter().map(|n| n.as_ref().to_string()).collect(),
            nodes: vec![terminal, terminal],
            unique: vec![0; unique_size],
            unique_mask: unique_size - 1,
            cache: vec![CacheEntry::default(); cache_size],
            cache_mask: cache_size - 1,
            renamings: Vec::new(),
            cache_hits: 0,
            cache_lookups: 0,
        })
    }

    pub fn var_count(&self) -> usize {
        self.names.len()
    }

    pub fn var_name(&self, v: Var) -> &str {
        &self.names[v as usize]
    }

    pub fn var_names(&self) -> &[String] {
        &self.names
    }

    /// Total number of nodes allocated, terminals included.
    pub fn total_nodes(&self) -> usize {
        self.nodes.len()
    }

    /// `(hits, lookups)` of the operation cache.
    pub fn cache_stats(&self) -> (u64, u64) {
        (self.cache_hits, self.cache_lookups)
    }

    fn wrap(&self, root: u32) -> Bdd {
        Bdd {
            root,
            manager: self.id,
        }
    }

    fn check(&self, f: Bdd) -> Result<u32, BddError> {
        if f.manager == self.id {
            Ok(f.root)
        } else {
            Err(BddError::ManagerMismatch)
        }
    }

    fn own(&self, f: Bdd) -> u32 {
        assert_eq!(f.manager, self.id, "predicate from a different BDD manager");
        f.root
    }

    pub fn constant(&self, b: bool) -> Bdd {
        self.wrap(b as u32)
    }

    pub fn tru(&self) -> Bdd {
        self.wrap(TRUE)
    }

    pub fn fls(&self) -> Bdd {
        self.wrap(FALSE)
    }

    /// The function `v`.
    pub fn var(&mut self, v: Var) -> Bdd {
        assert!((v as usize) < self.names.len(), "variable {v} out of range");
        let r = self.mk(v, FALSE, TRUE);
        self.wrap(r)
    }

    /// The function `¬v`.
    pub fn nvar(&mut self, v: Var) -> Bdd {
        assert!((v as usize) < self.names.len(), "variable {v} out of range");
        let r = self.mk(v, TRUE, FALSE);
        self.wrap(r)
    }

    pub fn literal(&mut self, v: Var, value: bool) -> Bdd {
        if value {
            self.var(v)
        } else {
            self.nvar(v)
        }
    }

    /// Conjunction of literals.
    pub fn cube(&mut self, literals: &[(Var, bool)]) -> Bdd {
        let mut lits = literals.to_vec();
        lits.sort_unstable_by(|a, b| b.0.cmp(&a.0));
        let mut r = TRUE;
        for (v, b) in lits {
            r = if b {
                self.mk(v, FALSE, r)
            } else {
                self.mk(v, r, FALSE)
            };
        }
        self.wrap(r)
    }

    /// Positive cube of a variable set, the form quantifiers expect.
    pub fn var_set(&mut self, vars: &[Var]) -> Bdd {
        let lits: Vec<(Var, bool)> = vars.iter().map(|&v| (v, true)).collect();
        self.cube(&lits)
    }

    fn mk(&mut self, var: u32, lo: u32, hi: u32) -> u32 {
        if lo == hi {
            return lo;
        }
        let mut i = hash3(var, lo, hi) & self.unique_mask;
        loop {
            let id = self.unique[i];
            if id == 0 {
                break;
            }
            let n = self.nodes[id as usize];
            if n.var == var && n.lo == lo && n.hi == hi {
                return id;
            }
            i = (i + 1) & self.unique_mask;
        }
        let id = self.nodes.len() as u32;
        self.nodes.push(Node { var, lo, hi });
        self.unique[i] = id;
        if self.nodes.len() * 2 > self.unique.len() {
            self.grow_unique();
        }
        if self.nodes.len() > self.cache.len() * 2 && self.cache.len() < (1 << 24) {
            let size = self.cache.len() * 4;
            self.cache = vec![CacheEntry::default(); size];
            self.cache_mask = size - 1;
        }
        id
    }

    fn grow_unique(&mut self) {
        let size = self.unique.len() * 2;
        let mask = size - 1;
        let mut table = vec![0u32; size];
        for (id, n) in self.nodes.iter().enumerate().skip(2) {
            let mut i = hash3(n.var, n.lo, n.hi) & mask;
            while table[i] != 0 {
                i = (i + 1) & mask;
            }
            table[i] = id as u32;
        }
        self.unique = table;
        self.unique_mask = mask;
    }

    #[inline]
    fn cache_get(&mut self, op: u32, a: u32, b: u32, c: u32) -> Option<u32> {
        self.cache_lookups += 1;
        let e = self.cache[hash3(op ^ (c << 8), a, b) & self.cache_mask];
        if e.op == op && e.a == a && e.b == b && e.c == c {
            self.cache_hits += 1;
            Some(e.result)
        } else {
            None
        }
    }

    #[inline]
    fn cache_put(&mut self, op: u32, a: u32, b: u32, c: u32, result: u32) {
        let i = hash3(op ^ (c << 8), a, b) & self.cache_mask;
        self.cache[i] = CacheEntry {
            op,
            a,
            b,
            c,
            result,
        };
    }

    #[inline]
    fn level(&self, f: u32) -> u32 {
        self.nodes[f as usize].var
    }

    fn cofactors(&self, f: u32, var: u32) -> (u32, u32) {
        let n = self.nodes[f as usize];
        if n.var == var {
            (n.lo, n.hi)
        } else {
            (f, f)
        }
    }

    fn not_rec(&mut self, f: u32) -> u32 {
        if f <= TRUE {
            return f ^ 1;
        }
        if let Some(r) = self.cache_get(OP_NOT, f, 0, 0) {
            return r;
        }
        let n = self.nodes[f as usize];
        let lo = self.not_rec(n.lo);
        let hi = self.not_rec(n.hi);
        let r = self.mk(n.var, lo, hi);
        self.cache_put(OP_NOT, f, 0, 0, r);
        r
    }

    fn and_rec(&mut self, a: u32, b: u32) -> u32 {
        if a == FALSE || b == FALSE {
            return FALSE;
        }
        if a == TRUE || a == b {
            return b;
        }
        if b == TRUE {
            return a;
        }
        let (a, b) = if a < b { (a, b) } else { (b, a) };
        if let Some(r) = self.cache_get(OP_AND, a, b, 0) {
            return r;
        }
        let v = self.level(a).min(self.level(b));
        let (a0, a1) = self.cofactors(a, v);
        let (b0, b1) = self.cofactors(b, v);
        let lo = self.and_rec(a0, b0);
        let hi = self.and_rec(a1, b1);
        let r = self.mk(v, lo, hi);
        self.cache_put(OP_AND, a, b, 0, r);
        r
    }

    fn or_rec(&mut self, a: u32, b: u32) -> u32 {
        if a == TRUE || b == TRUE {
            return TRUE;
        }
        if a == FALSE || a == b {
            return b;
        }
        if b == FALSE {
            return a;
        }
        let (a, b) = if a < b { (a, b) } else { (b, a) };
        if let Some(r) = self.cache_get(OP_OR, a, b, 0) {
            return r;
        }
        let v = self.level(a).min(self.level(b));
        let (a0, a1) = self.cofactors(a, v);
        let (b0, b1) = self.cofactors(b, v);
        let lo = self.or_rec(a0, b0);
        let hi = self.or_rec(a1, b1);
        let r = self.mk(v, lo, hi);
        self.cache_put(OP_OR, a, b, 0, r);
        r
    }

    fn xor_rec(&mut self, a: u32, b: u32) -> u32 {
        if a == b {
            return FALSE;
        }
        if a == FALSE {
            return b;
        }
        if b == FALSE {
            return a;
        }
        if a == TRUE {
            return self.not_rec(b);
        }
        if b == TRUE {
            return self.not_rec(a);
        }
        let (a, b) = if a < b { (a, b) } else { (b, a) };
        if let Some(r) = self.cache_get(OP_XOR, a, b, 0) {
            return r;
        }
        let v = self.level(a).min(self.level(b));
        let (a0, a1) = self.cofactors(a, v);
        let (b0, b1) = self.cofactors(b, v);
        let lo = self.xor_rec(a0, b0);
        let hi = self.xor_rec(a1, b1);
        let r = self.mk(v, lo, hi);
        self.cache_put(OP_XOR, a, b, 0, r);
        r
    }

    fn apply_raw(&mut self, op: BinOp, a: u32, b: u32) -> u32 {
        match op {
            BinOp::And => self.and_rec(a, b),
            BinOp::Or => self.or_rec(a, b),
            BinOp::Xor => self.xor_rec(a, b),
            BinOp::Implies => {
                let na = self.not_rec(a);
                self.or_rec(na, b)
            }
            BinOp::Iff => {
                let x = self.xor_rec(a, b);
                self.not_rec(x)
            }
        }
    }

    /// Checked binary operation.
    pub fn apply(&mut self, op: BinOp, a: Bdd, b: Bdd) -> Result<Bdd, BddError> {
        let (a, b) = (self.check(a)?, self.check(b)?);
        let r = self.apply_raw(op, a, b);
        Ok(self.wrap(r))
    }

    /// Checked negation.
    pub fn negate(&mut self, f: Bdd) -> Result<Bdd, BddError> {
        let f = self.check(f)?;
        let r = self.not_rec(f);
        Ok(self.wrap(r))
    }

    pub fn not(&mut self, f: Bdd) -> Bdd {
        let f = self.own(f);
        let r = self.not_rec(f);
        self.wrap(r)
    }

    pub fn and(&mut self, a: Bdd, b: Bdd) -> Bdd {
        let (a, b) = (self.own(a), self.own(b));
        let r = self.and_rec(a, b);
        self.wrap(r)
    }

    pub fn or(&mut self, a: Bdd, b: Bdd) -> Bdd {
        let (a, b) = (self.own(a), self.own(b));
        let r = self.or_rec(a, b);
        self.wrap(r)
    }

    pub fn xor(&mut self, a: Bdd, b: Bdd) -> Bdd {
        let (a, b) = (self.own(a), self.own(b));
        let r = self.xor_rec(a, b);
        self.wrap(r)
    }

    pub fn implies(&mut self, a: Bdd, b: Bdd) -> Bdd {
        let (a, b) = (self.own(a), self.own(b));
        let r = self.apply_raw(BinOp::Implies, a, b);
        self.wrap(r)
    }

    pub fn iff(&mut self, a: Bdd, b: Bdd) -> Bdd {
        let (a, b) = (self.own(a), self.own(b));
        let r = self.apply_raw(BinOp::Iff, a, b);
        self.wrap(r)
    }

    /// `a ∧ ¬b`.
    pub fn diff(&mut self, a: Bdd, b: Bdd) -> Bdd {
        let nb = self.not(b);
        self.and(a, nb)
    }

    pub fn ite(&mut self, c: Bdd, t: Bdd, e: Bdd) -> Bdd {
        let ct = self.and(c, t);
        let nc = self.not(c);
        let ne = self.and(nc, e);
        self.or(ct, ne)
    }

    /// Checked if-then-else.
    pub fn try_ite(&mut self, c: Bdd, t: Bdd, e: Bdd) -> Result<Bdd, BddError> {
        self.check(c)?;
        self.check(t)?;
        self.check(e)?;
        Ok(self.ite(c, t, e))
    }

    pub fn and_all(&mut self, fs: impl IntoIterator<Item = Bdd>) -> Bdd {
        let mut acc = self.tru();
        for f in fs {
            acc = self.and(acc, f);
        }
        acc
    }

    pub fn or_all(&mut self, fs: impl IntoIterator<Item = Bdd>) -> Bdd {
        let mut acc = self.fls();
        for f in fs {
            acc = self.or(acc, f);
        }
        acc
    }

    /// `f ⇒ g`.
    pub fn leq(&mut self, f: Bdd, g: Bdd) -> bool {
        self.diff(f, g).is_false()
    }

    fn exists_rec(&mut self, f: u32, cube: u32) -> u32 {
        if f <= TRUE || cube == TRUE {
            return f;
        }
        let fv = self.level(f);
        let mut cube = cube;
        while self.level(cube) < fv {
            cube = self.nodes[cube as usize].hi;
            if cube == TRUE {
                return f;
            }
        }
        if let Some(r) = self.cache_get(OP_EXISTS, f, cube, 0) {
            return r;
        }
        let n = self.nodes[f as usize];
        let r = if self.level(cube) == fv {
            let next = self.nodes[cube as usize].hi;
            let lo = self.exists_rec(n.lo, next);
            if lo == TRUE {
                TRUE
            } else {
                let hi = self.exists_rec(n.hi, next);
                self.or_rec(lo, hi)
            }
        } else {
            let lo = self.exists_rec(n.lo, cube);
            let hi = self.exists_rec(n.hi, cube);
            self.mk(fv, lo, hi)
        };
        self.cache_put(OP_EXISTS, f, cube, 0, r);
        r
    }

    /// `∃vars. f` where `vars` is a positive cube (see [`Manager::var_set`]).
    pub fn exists(&mut self, vars: Bdd, f: Bdd) -> Bdd {
        let (c, f) = (self.own(vars), self.own(f));
        let r = self.exists_rec(f, c);
        self.wrap(r)
    }

    /// Checked `∃vars. f` over an explicit variable list.
    pub fn try_exists(&mut self, vars: &[Var], f: Bdd) -> Result<Bdd, BddError> {
        let f = self.check(f)?;
        if let Some(&v) = vars.iter().find(|&&v| v as usize >= self.names.len()) {
            return Err(BddError::UnknownVariable(v));
        }
        let c = self.var_set(vars);
        let r = self.exists_rec(f, c.root);
        Ok(self.wrap(r))
    }

    pub fn forall(&mut self, vars: Bdd, f: Bdd) -> Bdd {
        let nf = self.not(f);
        let e = self.exists(vars, nf);
        self.not(e)
    }

    fn and_exists_rec(&mut self, a: u32, b: u32, cube: u32) -> u32 {
        if a == FALSE || b == FALSE {
            return FALSE;
        }
        if cube == TRUE {
            return self.and_rec(a, b);
        }
        if a == TRUE {
            return self.exists_rec(b, cube);
        }
        if b == TRUE || a == b {
            return self.exists_rec(a, cube);
        }
        let (a, b) = if a < b { (a, b) } else { (b, a) };
        let v = self.level(a).min(self.level(b));
        let mut cube = cube;
        while self.level(cube) < v {
            cube = self.nodes[cube as usize].hi;
            if cube == TRUE {
                return self.and_rec(a, b);
            }
        }
        if let Some(r) = self.cache_get(OP_AND_EXISTS, a, b, cube) {
            return r;
        }
        let (a0, a1) = self.cofactors(a, v);
        let (b0, b1) = self.cofactors(b, v);
        let r = if self.level(cube) == v {
            let next = self.nodes[cube as usize].hi;
            let lo = self.and_exists_rec(a0, b0, next);
            if lo == TRUE {
                TRUE
            } else {
                let hi = self.and_exists_rec(a1, b1, next);
                self.or_rec(lo, hi)
            }
        } else {
            let lo = self.and_exists_rec(a0, b0, cube);
            let hi = self.and_exists_rec(a1, b1, cube);
            self.mk(v, lo, hi)
        };
        self.cache_put(OP_AND_EXISTS, a, b, cube, r);
        r
    }

    /// Relational product `∃vars. a ∧ b`.
    pub fn and_exists(&mut self, a: Bdd, b: Bdd, vars: Bdd) -> Bdd {
        let (a, b, c) = (self.own(a), self.own(b), self.own(vars));
        let r = self.and_exists_rec(a, b, c);
        self.wrap(r)
    }

    /// Registers a simultaneous renaming `from[i] ↦ to[i]`. Functions it is
    /// applied to should not mention variables of `to`.
    pub fn renaming(&mut self, from: &[Var], to: &[Var]) -> Result<RenameId, BddError> {
        if from.len() != to.len() {
            return Err(BddError::LengthMismatch(from.len(), to.len()));
        }
        let n = self.names.len();
        if let Some(&v) = from.iter().chain(to).find(|&&v| v as usize >= n) {
            return Err(BddError::UnknownVariable(v));
        }
        if from.iter().any(|v| to.contains(v)) {
            return Err(BddError::Overlap);
        }
        let mut map: Vec<Var> = (0..n as Var).collect();
        for (&f, &t) in from.iter().zip(to) {
            map[f as usize] = t;
        }
        self.renamings.push(Renaming { map });
        Ok(RenameId(self.renamings.len() as u32 - 1))
    }

    fn rename_rec(&mut self, f: u32, id: u32) -> u32 {
        if f <= TRUE {
            return f;
        }
        let op = OP_RENAME_BASE + id;
        if let Some(r) = self.cache_get(op, f, 0, 0) {
            return r;
        }
        let n = self.nodes[f as usize];
        let lo = self.rename_rec(n.lo, id);
        let hi = self.rename_rec(n.hi, id);
        let v = self.renamings[id as usize].map[n.var as usize];
        let res = if v < self.level(lo) && v < self.level(hi) {
            self.mk(v, lo, hi)
        } else {
            let x = self.mk(v, FALSE, TRUE);
            let t = self.and_rec(x, hi);
            let nx = self.mk(v, TRUE, FALSE);
            let e = self.and_rec(nx, lo);
            self.or_rec(t, e)
        };
        self.cache_put(op, f, 0, 0, res);
        res
    }

    /// Applies a registered renaming.
    pub fn rename(&mut self, f: Bdd, id: RenameId) -> Bdd {
        let f = self.own(f);
        let r = self.rename_rec(f, id.0);
        self.wrap(r)
    }

    /// Checked simultaneous substitution of `to` for `from`.
    pub fn substitute(&mut self, f: Bdd, from: &[Var], to: &[Var]) -> Result<Bdd, BddError> {
        self.check(f)?;
        let id = self.renaming(from, to)?;
        Ok(self.rename(f, id))
    }

    /// Value under a total assignment indexed by variable.
    pub fn eval(&self, f: Bdd, assignment: &[bool]) -> bool {
        let mut r = self.own(f);
        while r > TRUE {
            let n = self.nodes[r as usize];
            r = if assignment[n.var as usize] {
                n.hi
            } else {
                n.lo
            };
        }
        r == TRUE
    }

    /// Variables `f` depends on, ascending.
    pub fn support(&self, f: Bdd) -> Vec<Var> {
        let mut seen = vec![false; self.names.len()];
        self.visit(self.own(f), |n| seen[n.var as usize] = true);
        (0..self.names.len() as Var)
            .filter(|&v| seen[v as usize])
            .collect()
    }

    fn visit(&self, root: u32, mut fun: impl FnMut(Node)) -> usize {
        let mut stack = vec![root];
        let mut seen = rustc_hash::FxHashSet::default();
        while let Some(r) = stack.pop() {
            if r <= TRUE || !seen.insert(r) {
                continue;
            }
            let n = self.nodes[r as usize];
            fun(n);
            stack.push(n.lo);
            stack.push(n.hi);
        }
        seen.len()
    }

    /// Internal nodes reachable from `f`.
    pub fn node_count(&self, f: Bdd) -> usize {
        self.visit(self.own(f), |_| {})
    }

    /// Number of satisfying assignments over all manager variables.
    pub fn sat_count(&self, f: Bdd) -> f64 {
        let n = self.names.len() as u32;
        let mut memo: FxHashMap<u32, f64> = FxHashMap::default();
        let root = self.own(f);
        let c = self.count_rec(root, &mut memo);
        let top = if root <= TRUE { n } else { self.level(root) };
        c * 2f64.powi(top as i32)
    }

    // Assignments to variables strictly below the node's level.
    fn count_rec(&self, f: u32, memo: &mut FxHashMap<u32, f64>) -> f64 {
        if f <= TRUE {
            return f as f64;
        }
        if let Some(&c) = memo.get(&f) {
            return c;
        }
        let n = self.nodes[f as usize];
        let nv = self.names.len() as u32;
        let lvl = |g: u32| {
            if g <= TRUE {
                nv
            } else {
                self.nodes[g as usize].var
            }
        };
        let lo = self.count_rec(n.lo, memo) * 2f64.powi((lvl(n.lo) - n.var - 1) as i32);
        let hi = self.count_rec(n.hi, memo) * 2f64.powi((lvl(n.hi) - n.var - 1) as i32);
        memo.insert(f, lo + hi);
        lo + hi
    }

    /// One satisfying path of `f`, extended with `false` for every `care`
    /// variable not on the path. Sorted by variable.
    pub fn pick_cube(&self, f: Bdd, care: &[Var]) -> Result<Vec<(Var, bool)>, BddError> {
        let mut r = self.check(f)?;
        if r == FALSE {
            return Err(BddError::Unsatisfiable);
        }
        let mut out: Vec<(Var, bool)> = Vec::new();
        while r > TRUE {
            let n = self.nodes[r as usize];
            if n.lo != FALSE {
                out.push((n.var, false));
                r = n.lo;
            } else {
                out.push((n.var, true));
                r = n.hi;
            }
        }
        for &v in care {
            if !out.iter().any(|&(w, _)| w == v) {
                out.push((v, false));
            }
        }
        out.sort_unstable();
        Ok(out)
    }

    /// Disjoint cubes (paths to `true`) whose disjunction is `f`.
    pub fn cubes(&self, f: Bdd) -> Cubes<'_> {
        let root = self.own(f);
        Cubes {
            manager: self,
            stack: if root == FALSE {
                Vec::new()
            } else {
                vec![(root, Vec::new())]
            },
        }
    }

    /// Graphviz rendering for debugging.
    pub fn to_dot(&self, f: Bdd) -> String {
        let mut out = String::from(
            "digraph bdd {\n  t0 [shape=box,label=\"0\"];\n  t1 [shape=box,label=\"1\"];\n",
        );
        let id = |r: u32| {
            if r <= TRUE {
                format!("t{r}")
            } else {
                format!("n{r}")
            }
        };
        let mut stack = vec![self.own(f)];
        let mut seen = rustc_hash::FxHashSet::default();
        while let Some(r) = stack.pop() {
            if r <= TRUE || !seen.insert(r) {
                continue;
            }
            let n = self.nodes[r as usize];
            let _ = writeln!(out, "  n{r} [label=\"{}\"];", self.names[n.var as usize]);
            let _ = writeln!(out, "  n{r} -> {} [style=dashed];", id(n.lo));
            let _ = writeln!(out, "  n{r} -> {};", id(n.hi));
            stack.push(n.lo);
            stack.push(n.hi);
        }
        if f.root <= TRUE {
            let _ = writeln!(out, "  root -> t{};", f.root);
        }
        out.push_str("}\n");
        out
    }
}

/// Iterator over the paths of a diagram; see [`Manager::cubes`].
pub struct Cubes<'a> {
    manager: &'a Manager,
    stack: Vec<(u32, Vec<(Var, bool)>)>,
}

impl Iterator for Cubes<'_> {
    type Item = Vec<(Var, bool)>;

    fn next(&mut self) -> Option<Self::Item> {
        while let Some((r, path)) = self.stack.pop() {
            if r == TRUE {
                return Some(path);
            }
            if r == FALSE {
                continue;
            }
            let n = self.manager.nodes[r as usize];
            let mut hi = path.clone();
            hi.push((n.var, true));
            let mut lo = path;
            lo.push((n.var, false));
            self.stack.push((n.hi, hi));
            self.stack.push((n.lo, lo));
        }
        None
    }
}
