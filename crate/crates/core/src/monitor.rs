//! Deterministic finite automata over interaction names, used as risk
//! specifications and assumptions, and their synchronous product with a
//! system.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::model::{
    Component, InteractionId, LocalConstraint, ModelError, PartialConfiguration, System, Transition,
};
use crate::model::{Lexer, Tok};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MonitorError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("automaton has no states")]
    NoStates,
    #[error("duplicate {kind} `{name}`")]
    Duplicate { kind: &'static str, name: String },
    #[error("undeclared state `{0}`")]
    UnknownState(String),
    #[error("letter `{0}` is not in the automaton's alphabet")]
    UnknownLetter(String),
    #[error("state `{state}` has two `{letter}` transitions")]
    Nondeterministic { state: String, letter: String },
    #[error("monitor letter `{0}` is not an interaction of the system")]
    LetterNotInSystem(String),
}

/// A complete deterministic automaton. `delta[q][a]` is the successor of
/// state `q` on the `a`-th letter of `alphabet`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Dfa {
    pub states: Vec<String>,
    pub alphabet: Vec<String>,
    pub delta: Vec<Vec<usize>>,
    pub initial: usize,
    pub accepting: Vec<bool>,
}

impl Dfa {
    /// Builds an automaton from named transitions; missing transitions go
    /// to a fresh non-accepting sink.
    pub fn new(
        states: Vec<String>,
        alphabet: Vec<String>,
        initial: &str,
        accepting: &[String],
        transitions: &[(String, String, String)],
    ) -> Result<Dfa, MonitorError> {
        if states.is_empty() {
            return Err(MonitorError::NoStates);
        }
        unique("state", &states)?;
        unique("letter", &alphabet)?;
        let sidx: BTreeMap<&str, usize> = states
            .iter()
            .enumerate()
            .map(|(i, s)| (s.as_str(), i))
            .collect();
        let aidx: BTreeMap<&str, usize> = alphabet
            .iter()
            .enumerate()
            .map(|(i, s)| (s.as_str(), i))
            .collect();
        let state = |n: &str| {
            sidx.get(n)
                .copied()
                .ok_or_else(|| MonitorError::UnknownState(n.into()))
        };
        let initial = state(initial)?;
        let mut acc = vec![false; states.len()];
        for a in accepting {
            acc[state(a)?] = true;
        }
        let mut delta: Vec<Vec<Option<usize>>> = vec![vec![None; alphabet.len()]; states.len()];
        for (from, letter, to) in transitions {
            let (q, r) = (state(from)?, state(to)?);
            let a = *aidx
                .get(letter.as_str())
                .ok_or_else(|| MonitorError::UnknownLetter(letter.clone()))?;
            if delta[q][a].is_some_and(|old| old != r) {
                return Err(MonitorError::Nondeterministic {
                    state: from.clone(),
                    letter: letter.clone(),
                });
            }
            delta[q][a] = Some(r);
        }
        let mut states = states;
        let incomplete = delta.iter().any(|row| row.iter().any(Option::is_none));
        let sink = states.len();
        if incomplete {
            let mut name = "sink".to_string();
            while states.contains(&name) {
                name.push('\'');
            }
            states.push(name);
            acc.push(false);
            delta.push(vec![Some(sink); alphabet.len()]);
        }
        let delta = delta
            .into_iter()
            .map(|row| row.into_iter().map(|t| t.unwrap_or(sink)).collect())
            .collect();
        Ok(Dfa {
            states,
            alphabet,
            delta,
            initial,
            accepting: acc,
        })
    }

    /// One state with self-loops, accepting every word when `accept` holds
    /// and none otherwise.
    pub fn trivial(alphabet: Vec<String>, accept: bool) -> Dfa {
        Dfa {
            states: vec!["q0".into()],
            delta: vec![vec![0; alphabet.len()]],
            alphabet,
            initial: 0,
            accepting: vec![accept],
        }
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn letter(&self, name: &str) -> Option<usize> {
        self.alphabet.iter().position(|a| a == name)
    }

    /// State reached on a word of letter indices.
    pub fn run(&self, word: &[usize]) -> usize {
        word.iter().fold(self.initial, |q, &a| self.delta[q][a])
    }

    pub fn accepts(&self, word: &[usize]) -> bool {
        self.accepting[self.run(word)]
    }

    /// Acceptance of a system word; letters outside the alphabet are
    /// skipped, as the monitor ignores them in a product.
    pub fn accepts_system_word(&self, s: &System, word: &[InteractionId]) -> bool {
        let letters: Vec<usize> = word
            .iter()
            .filter_map(|&w| self.letter(s.interaction_name(w)))
            .collect();
        self.accepts(&letters)
    }

    pub fn complement(&self) -> Dfa {
        let mut d = self.clone();
        for a in &mut d.accepting {
            *a = !*a;
        }
        d
    }

    /// Whether the accepted language is empty.
    pub fn is_language_empty(&self) -> bool {
        let mut seen = vec![false; self.len()];
        let mut stack = vec![self.initial];
        seen[self.initial] = true;
        while let Some(q) = stack.pop() {
            if self.accepting[q] {
                return false;
            }
            for &r in &self.delta[q] {
                if !seen[r] {
                    seen[r] = true;
                    stack.push(r);
                }
            }
        }
        true
    }
}

fn unique(kind: &'static str, names: &[String]) -> Result<(), MonitorError> {
    let mut seen = BTreeSet::new();
    for n in names {
        if !seen.insert(n) {
            return Err(MonitorError::Duplicate {
                kind,
                name: n.clone(),
            });
        }
    }
    Ok(())
}

impl fmt::Display for Dfa {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "dfa {{")?;
        writeln!(f, "  states {};", self.states.join(" "))?;
        writeln!(f, "  alphabet {};", self.alphabet.join(" "))?;
        writeln!(f, "  init {};", self.states[self.initial])?;
        let acc: Vec<&str> = (0..self.len())
            .filter(|&q| self.accepting[q])
            .map(|q| self.states[q].as_str())
            .collect();
        writeln!(f, "  accept {};", acc.join(" "))?;
        for (q, row) in self.delta.iter().enumerate() {
            for (a, &r) in row.iter().enumerate() {
                writeln!(
                    f,
                    "  {} -{}-> {};",
                    self.states[q], self.alphabet[a], self.states[r]
                )?;
            }
        }
        writeln!(f, "}}")
    }
}

/// Parses `dfa { states ..; alphabet ..; init q; accept ..; q -a-> r; }`.
pub fn parse_dfa(text: &str) -> Result<Dfa, MonitorError> {
    let mut lx = Lexer::new(text)?;
    lx.keyword("dfa")?;
    lx.expect_sym('{')?;
    let mut states = None;
    let mut alphabet = None;
    let mut init = None;
    let mut accept = Vec::new();
    let mut transitions = Vec::new();
    while !lx.eat_sym('}') {
        if lx.at_keyword("states") && lx.peek_at(1) != &Tok::Sym('-') {
            lx.next();
            states = Some(lx.ident_list()?);
        } else if lx.at_keyword("alphabet") && lx.peek_at(1) != &Tok::Sym('-') {
            lx.next();
            alphabet = Some(lx.ident_list()?);
        } else if lx.at_keyword("init") && lx.peek_at(1) != &Tok::Sym('-') {
            lx.next();
            init = Some(lx.ident()?);
            lx.expect_sym(';')?;
        } else if lx.at_keyword("accept") && lx.peek_at(1) != &Tok::Sym('-') {
            lx.next();
            accept.extend(lx.ident_list()?);
        } else {
            let from = lx.ident()?;
            lx.expect_sym('-')?;
            let letter = lx.ident()?;
            if lx.next() != Tok::Arrow {
                return Err(lx.error("expected `->`").into());
            }
            let to = lx.ident()?;
            lx.expect_sym(';')?;
            transitions.push((from, letter, to));
        }
    }
    lx.expect_eof()?;
    let states = states.ok_or_else(|| lx.error("missing `states`"))?;
    let alphabet = alphabet.ok_or_else(|| lx.error("missing `alphabet`"))?;
    let init = match init {
        Some(i) => i,
        None => states.first().cloned().ok_or(MonitorError::NoStates)?,
    };
    Dfa::new(states, alphabet, &init, &accept, &transitions)
}

/// How a product's risk configurations combine with the system's own.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RiskRule {
    /// Risk is exactly "every monitor accepts".
    Replace,
    /// The system's risk configurations are kept alongside.
    Union,
}

/// Adds each monitor as a variable-free component following the letters
/// of its alphabet. Monitors never block: they are complete and ignore
/// letters outside their alphabet.
pub fn product_with_monitors(
    s: &System,
    monitors: &[Dfa],
    rule: RiskRule,
) -> Result<System, MonitorError> {
    let mut comps = s.components().to_vec();
    let base = comps.len();
    for (k, m) in monitors.iter().enumerate() {
        let labels: Vec<InteractionId> = m
            .alphabet
            .iter()
            .map(|a| {
                s.interaction_index(a)
                    .ok_or_else(|| MonitorError::LetterNotInSystem(a.clone()))
            })
            .collect::<Result<_, _>>()?;
        let mut name = format!("monitor{}", k + 1);
        while comps.iter().any(|c| c.name == name) {
            name.push('\'');
        }
        let mut c = Component::new(name, m.states.clone(), Vec::new());
        c.initial_location = m.initial;
        for (q, row) in m.delta.iter().enumerate() {
            for (a, &r) in row.iter().enumerate() {
                c.transitions.push(Transition::simple(q, labels[a], r, 0));
            }
        }
        comps.push(c);
    }
    let n = comps.len();
    let mut risk: Vec<PartialConfiguration> = match rule {
        RiskRule::Replace => Vec::new(),
        RiskRule::Union => s
            .risk_states()
            .iter()
            .map(|r| {
                let mut k = r.constraints.clone();
                k.resize(n, None);
                PartialConfiguration { constraints: k }
            })
            .collect(),
    };
    if !monitors.is_empty() {
        let mut partial: Vec<Vec<Option<LocalConstraint>>> = vec![vec![None; n]];
        for (k, m) in monitors.iter().enumerate() {
            let acc: Vec<usize> = (0..m.len()).filter(|&q| m.accepting[q]).collect();
            partial = partial
                .into_iter()
                .flat_map(|p| {
                    acc.iter().map(move |&q| {
                        let mut p = p.clone();
                        p[base + k] = Some(LocalConstraint::at(q));
                        p
                    })
                })
                .collect();
        }
        risk.extend(
            partial
                .into_iter()
                .map(|constraints| PartialConfiguration { constraints }),
        );
    }
    let interactions = s.interactions().to_vec();
    Ok(System::new(
        comps,
        interactions,
        s.priorities().clone(),
        risk,
    )?)
}

/// Single-location component with one self-loop per letter.
pub fn stutter_component(name: &str, letters: &BTreeSet<InteractionId>) -> Component {
    let mut c = Component::new(name, vec!["d".into()], Vec::new());
    c.transitions = letters
        .iter()
        .map(|&l| Transition::simple(0, l, 0, 0))
        .collect();
    c
}
