//! Complete DPLL search with two watched literals and chronological
//! backtracking. Literals are non-zero `i32` in DIMACS convention.

/// Satisfying assignment indexed by variable (index 0 unused), or `None`.
pub fn solve(num_vars: usize, clauses: &[Vec<i32>], decision_order: &[usize]) -> Option<Vec<bool>> {
    Solver::new(num_vars, clauses, decision_order).run()
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Val {
    Unset,
    True,
    False,
}

struct Solver<'a> {
    clauses: Vec<Vec<i32>>,
    /// Clause indices watching each literal, indexed by `lit_index`.
    watches: Vec<Vec<usize>>,
    vals: Vec<Val>,
    trail: Vec<i32>,
    /// `(trail length before the decision, decision literal, flipped)`.
    decisions: Vec<(usize, i32, bool)>,
    order: &'a [usize],
    units: Vec<i32>,
    empty: bool,
}

fn lit_index(l: i32) -> usize {
    let v = l.unsigned_abs() as usize;
    2 * v + (l < 0) as usize
}

impl<'a> Solver<'a> {
    fn new(num_vars: usize, clauses: &[Vec<i32>], order: &'a [usize]) -> Solver<'a> {
        let mut s = Solver {
            clauses: Vec::with_capacity(clauses.len()),
            watches: vec![Vec::new(); 2 * num_vars + 2],
            vals: vec![Val::Unset; num_vars + 1],
            trail: Vec::new(),
            decisions: Vec::new(),
            order,
            units: Vec::new(),
            empty: false,
        };
        for c in clauses {
            let mut c = c.clone();
            c.sort_unstable();
            c.dedup();
            if c.windows(2).any(|w| w[0] == -w[1]) || c.iter().any(|l| c.contains(&-l)) {
                continue;
            }
            match c.len() {
                0 => s.empty = true,
                1 => s.units.push(c[0]),
                _ => {
                    let i = s.clauses.len();
                    s.watches[lit_index(c[0])].push(i);
                    s.watches[lit_index(c[1])].push(i);
                    s.clauses.push(c);
                }
            }
        }
        s
    }

    fn value(&self, l: i32) -> Val {
        match self.vals[l.unsigned_abs() as usize] {
            Val::Unset => Val::Unset,
            Val::True if l > 0 => Val::True,
            Val::False if l < 0 => Val::True,
            _ => Val::False,
        }
    }

    fn assign(&mut self, l: i32) {
        self.vals[l.unsigned_abs() as usize] = if l > 0 { Val::True } else { Val::False };
        self.trail.push(l);
    }

    /// Propagates from trail position `head`; false on conflict.
    fn propagate(&mut self, mut head: usize) -> bool {
        while head < self.trail.len() {
            let falsified = -self.trail[head];
            head += 1;
            let wi = lit_index(falsified);
            let mut watching = std::mem::take(&mut self.watches[wi]);
            let mut k = 0;
            let mut ok = true;
            while k < watching.len() {
                let ci = watching[k];
                let clause = &mut self.clauses[ci];
                if clause[0] == falsified {
                    clause.swap(0, 1);
                }
                let other = clause[0];
                let other_val = {
                    let v = self.vals[other.unsigned_abs() as usize];
                    match v {
                        Val::Unset => Val::Unset,
                        Val::True if other > 0 => Val::True,
                        Val::False if other < 0 => Val::True,
                        _ => Val::False,
                    }
                };
                if other_val == Val::True {
                    k += 1;
                    continue;
                }
                let mut moved = false;
                for j in 2..clause.len() {
                    let l = clause[j];
                    let lv = self.vals[l.unsigned_abs() as usize];
                    let is_false = matches!((lv, l > 0), (Val::True, false) | (Val::False, true));
                    if !is_false {
                        clause.swap(1, j);
                        self.watches[lit_index(clause[1])].push(ci);
                        watching.swap_remove(k);
                        moved = true;
                        break;
                    }
                }
                if moved {
                    continue;
                }
                if other_val == Val::False {
                    ok = false;
                    break;
                }
                self.assign(other);
                k += 1;
            }
            self.watches[wi].extend(watching);
            if !ok {
                return false;
            }
        }
        true
    }

    fn backtrack(&mut self) -> bool {
        while let Some((len, lit, flipped)) = self.decisions.pop() {
            for l in self.trail.drain(len..) {
                self.vals[l.unsigned_abs() as usize] = Val::Unset;
            }
            if !flipped {
                self.decisions.push((len, -lit, true));
                self.assign(-lit);
                if self.propagate(len) {
                    return true;
                }
            }
        }
        false
    }

    fn run(mut self) -> Option<Vec<bool>> {
        if self.empty {
            return None;
        }
        for l in std::mem::take(&mut self.units) {
            match self.value(l) {
                Val::True => {}
                Val::False => return None,
                Val::Unset => self.assign(l),
            }
        }
        if !self.propagate(0) {
            return None;
        }
        let n = self.vals.len() - 1;
        let order: Vec<usize> = self
            .order
            .iter()
            .copied()
            .chain(1..=n)
            .filter(|&v| v >= 1 && v <= n)
            .collect();
        let mut cursor = 0;
        loop {
            while cursor < order.len() && self.vals[order[cursor]] != Val::Unset {
                cursor += 1;
            }
            if cursor == order.len() {
                return Some(self.vals.iter().map(|&v| v == Val::True).collect());
            }
            let lit = -(order[cursor] as i32);
            let len = self.trail.len();
            self.decisions.push((len, lit, false));
            self.assign(lit);
            if !self.propagate(len) {
                if !self.backtrack() {
                    return None;
                }
                cursor = 0;
            }
        }
    }
}

/// Whether `assignment` (indexed by variable) satisfies every clause.
pub fn satisfies(assignment: &[bool], clauses: &[Vec<i32>]) -> bool {
    clauses.iter().all(|c| {
        c.iter()
            .any(|&l| assignment[l.unsigned_abs() as usize] == (l > 0))
    })
}
