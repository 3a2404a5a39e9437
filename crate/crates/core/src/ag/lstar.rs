//! Angluin's L* over an observation table. Counterexamples are processed
//! by adding all their prefixes to the prefix set.

use rustc_hash::FxHashMap;
use thiserror::Error;

use crate::monitor::Dfa;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LStarError {
    #[error("conjecture cap of {0} exceeded")]
    CapExceeded(usize),
    #[error("conjecture did not grow: {before} states, then {after}")]
    NoGrowth { before: usize, after: usize },
    #[error("counterexample is classified identically by the conjecture and the target")]
    SpuriousCounterexample,
}

/// Membership and equivalence answers for a target language over letters
/// `0..alphabet.len()`.
pub trait Teacher {
    fn member(&mut self, word: &[usize]) -> bool;
    /// `None` when `d` accepts the target language, else a word on which
    /// they differ.
    fn equivalence(&mut self, d: &Dfa) -> Option<Vec<usize>>;
}

/// Observation table with cached membership answers.
#[derive(Clone, Debug)]
pub struct Learner {
    alphabet: Vec<String>,
    prefixes: Vec<Vec<usize>>,
    suffixes: Vec<Vec<usize>>,
    cache: FxHashMap<Vec<usize>, bool>,
    sizes: Vec<usize>,
    cap: usize,
}

impl Learner {
    pub fn new(alphabet: Vec<String>, cap: usize) -> Learner {
        Learner {
            alphabet,
            prefixes: vec![Vec::new()],
            suffixes: vec![Vec::new()],
            cache: FxHashMap::default(),
            sizes: Vec::new(),
            cap,
        }
    }

    /// State counts of the conjectures produced so far.
    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn queries(&self) -> usize {
        self.cache.len()
    }

    fn query(&mut self, member: &mut dyn FnMut(&[usize]) -> bool, w: Vec<usize>) -> bool {
        if let Some(&b) = self.cache.get(&w) {
            return b;
        }
        let b = member(&w);
        self.cache.insert(w, b);
        b
    }

    fn row(&mut self, member: &mut dyn FnMut(&[usize]) -> bool, u: &[usize]) -> Vec<bool> {
        let suffixes = self.suffixes.clone();
        suffixes
            .iter()
            .map(|e| {
                let mut w = u.to_vec();
                w.extend(e);
                self.query(member, w)
            })
            .collect()
    }

    fn extend(u: &[usize], a: usize) -> Vec<usize> {
        let mut w = u.to_vec();
        w.push(a);
        w
    }

    /// Adds a one-letter extension whose row is new; false when closed.
    fn close_step(&mut self, member: &mut dyn FnMut(&[usize]) -> bool) -> bool {
        let rows: Vec<Vec<bool>> = self
            .prefixes
            .clone()
            .iter()
            .map(|u| self.row(member, u))
            .collect();
        for u in self.prefixes.clone() {
            for a in 0..self.alphabet.len() {
                let ua = Self::extend(&u, a);
                let r = self.row(member, &ua);
                if !rows.contains(&r) {
                    self.prefixes.push(ua);
                    return true;
                }
            }
        }
        false
    }

    /// Adds a distinguishing suffix for two equal rows; false when
    /// consistent.
    fn consistency_step(&mut self, member: &mut dyn FnMut(&[usize]) -> bool) -> bool {
        let prefixes = self.prefixes.clone();
        let rows: Vec<Vec<bool>> = prefixes.iter().map(|u| self.row(member, u)).collect();
        for i in 0..prefixes.len() {
            for j in i + 1..prefixes.len() {
                if rows[i] != rows[j] {
                    continue;
                }
                for a in 0..self.alphabet.len() {
                    for e in self.suffixes.clone() {
                        let mut wi = Self::extend(&prefixes[i], a);
                        wi.extend(&e);
                        let mut wj = Self::extend(&prefixes[j], a);
                        wj.extend(&e);
                        if self.query(member, wi) != self.query(member, wj) {
                            let mut ae = vec![a];
                            ae.extend(e);
                            self.suffixes.push(ae);
                            return true;
                        }
                    }
                }
            }
        }
        false
    }

    /// Closes the table, makes it consistent and builds the conjecture.
    /// Fails when the cap is reached or the conjecture did not grow.
    pub fn conjecture(
        &mut self,
        member: &mut dyn FnMut(&[usize]) -> bool,
    ) -> Result<Dfa, LStarError> {
        if self.sizes.len() >= self.cap {
            return Err(LStarError::CapExceeded(self.cap));
        }
        while self.close_step(member) || self.consistency_step(member) {}
        let mut reps: Vec<Vec<bool>> = Vec::new();
        let mut rep_words: Vec<Vec<usize>> = Vec::new();
        for u in self.prefixes.clone() {
            let r = self.row(member, &u);
            if !reps.contains(&r) {
                reps.push(r);
                rep_words.push(u);
            }
        }
        let mut delta = Vec::with_capacity(reps.len());
        for u in &rep_words {
            let mut out = Vec::with_capacity(self.alphabet.len());
            for a in 0..self.alphabet.len() {
                let r = self.row(member, &Self::extend(u, a));
                out.push(reps.iter().position(|x| *x == r).expect("table is closed"));
            }
            delta.push(out);
        }
        let d = Dfa {
            states: (0..reps.len()).map(|i| format!("a{i}")).collect(),
            alphabet: self.alphabet.clone(),
            delta,
            initial: 0,
            accepting: reps.iter().map(|r| r[0]).collect(),
        };
        if let Some(&before) = self.sizes.last() {
            if d.len() <= before {
                return Err(LStarError::NoGrowth {
                    before,
                    after: d.len(),
                });
            }
        }
        self.sizes.push(d.len());
        Ok(d)
    }

    /// Adds every prefix of `ce` to the prefix set. `ce` must be
    /// classified differently by `conjecture` and the target.
    pub fn refine(
        &mut self,
        member: &mut dyn FnMut(&[usize]) -> bool,
        conjecture: &Dfa,
        ce: &[usize],
    ) -> Result<(), LStarError> {
        if self.query(member, ce.to_vec()) == conjecture.accepts(ce) {
            return Err(LStarError::SpuriousCounterexample);
        }
        for k in 0..=ce.len() {
            let p = ce[..k].to_vec();
            if !self.prefixes.contains(&p) {
                self.prefixes.push(p);
            }
        }
        Ok(())
    }
}

/// Learns the teacher's language with at most `cap` conjectures.
pub fn lstar(
    teacher: &mut dyn Teacher,
    alphabet: Vec<String>,
    cap: usize,
) -> Result<Dfa, LStarError> {
    let mut learner = Learner::new(alphabet, cap);
    loop {
        let d = {
            let mut m = |w: &[usize]| teacher.member(w);
            learner.conjecture(&mut m)?
        };
        let Some(ce) = teacher.equivalence(&d) else {
            return Ok(d);
        };
        let mut m = |w: &[usize]| teacher.member(w);
        learner.refine(&mut m, &d, &ce)?;
    }
}

/// Teacher answering equivalence by comparing against a known DFA with
/// a product search for a shortest distinguishing word.
pub struct DfaTeacher {
    pub target: Dfa,
}

impl Teacher for DfaTeacher {
    fn member(&mut self, word: &[usize]) -> bool {
        self.target.accepts(word)
    }

    fn equivalence(&mut self, d: &Dfa) -> Option<Vec<usize>> {
        distinguishing_word(&self.target, d)
    }
}

/// Shortest word accepted by exactly one of `a` and `b`, which must share
/// an alphabet.
pub fn distinguishing_word(a: &Dfa, b: &Dfa) -> Option<Vec<usize>> {
    use std::collections::VecDeque;
    let start = (a.initial, b.initial);
    let mut parent: FxHashMap<(usize, usize), Option<((usize, usize), usize)>> =
        FxHashMap::default();
    parent.insert(start, None);
    let mut queue = VecDeque::from([start]);
    while let Some((p, q)) = queue.pop_front() {
        if a.accepting[p] != b.accepting[q] {
            let mut word = Vec::new();
            let mut cur = (p, q);
            while let Some(Some((prev, l))) = parent.get(&cur) {
                word.push(*l);
                cur = *prev;
            }
            word.reverse();
            return Some(word);
        }
        for l in 0..a.alphabet.len() {
            let next = (a.delta[p][l], b.delta[q][l]);
            if let std::collections::hash_map::Entry::Vacant(e) = parent.entry(next) {
                e.insert(Some(((p, q), l)));
                queue.push_back(next);
            }
        }
    }
    None
}
