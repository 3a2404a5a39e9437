//! System data model: components, interactions, priorities and risk
//! configurations, plus the on-disk text format.

mod expr;
mod parse;
mod print;

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use thiserror::Error;

pub use expr::{Expr, ExprDisplay};
pub use parse::parse_system;
pub(crate) use parse::{Lexer, Tok};

/// Index of an interaction label in [`System::interactions`].
pub type InteractionId = usize;

/// Name given to the abstract interaction of a ♯-abstract system.
pub const SHARP: &str = "♯";

/// Components may declare at most this many Boolean variables; valuations
/// are packed into a `u64`.
pub const MAX_VARIABLES: usize = 64;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error("syntax error at {line}:{column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("no components")]
    NoComponents,
    #[error("duplicate {kind} `{name}`")]
    Duplicate { kind: &'static str, name: String },
    #[error("component `{component}`: undeclared location `{location}`")]
    UnknownLocation { component: String, location: String },
    #[error("component `{component}`: undeclared variable `{variable}`")]
    UnknownVariable { component: String, variable: String },
    #[error("undeclared interaction `{0}`")]
    UnknownInteraction(String),
    #[error("unknown component `{0}`")]
    UnknownComponent(String),
    #[error("interaction `{0}` has no participating component")]
    UnusedInteraction(String),
    #[error("component `{component}` declares more than {MAX_VARIABLES} variables")]
    TooManyVariables { component: String },
    #[error("component `{component}` has no locations")]
    NoLocations { component: String },
    #[error("transition of `{component}` does not assign every variable")]
    IncompleteUpdate { component: String },
    #[error("circular priorities: {}", .cycle.join(" < "))]
    CircularPriority { cycle: Vec<String> },
    #[error("risk configuration constrains no component")]
    EmptyRiskConstraint,
    #[error("risk configuration has {found} entries, system has {expected} components")]
    RiskArity { expected: usize, found: usize },
    #[error("data transfer on interaction `{0}` is not supported")]
    DataTransfer(String),
    #[error("invalid component split: {0}")]
    InvalidSplit(&'static str),
}

/// A guarded, labelled transition `(source, guard, label, update, destination)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transition {
    pub source: usize,
    pub guard: Expr,
    pub label: InteractionId,
    /// One formula per declared variable; `Expr::Var(i)` at index `i` keeps it.
    pub update: Vec<Expr>,
    pub destination: usize,
}

impl Transition {
    /// Transition without guard or data update.
    pub fn simple(source: usize, label: InteractionId, destination: usize, vars: usize) -> Self {
        Transition {
            source,
            guard: Expr::Const(true),
            label,
            update: (0..vars).map(Expr::Var).collect(),
            destination,
        }
    }

    /// Applies the update to a packed valuation.
    pub fn apply(&self, valuation: u64) -> u64 {
        self.update
            .iter()
            .enumerate()
            .fold(0u64, |acc, (i, f)| acc | (f.eval(valuation) as u64) << i)
    }

    pub fn is_identity_update(&self, var: usize) -> bool {
        self.update[var] == Expr::Var(var)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Component {
    pub name: String,
    pub locations: Vec<String>,
    pub variables: Vec<String>,
    pub transitions: Vec<Transition>,
    pub initial_location: usize,
    /// Bit `i` holds the initial value of variable `i`.
    pub initial_valuation: u64,
}

impl Component {
    pub fn new(name: impl Into<String>, locations: Vec<String>, variables: Vec<String>) -> Self {
        Component {
            name: name.into(),
            locations,
            variables,
            transitions: Vec::new(),
            initial_location: 0,
            initial_valuation: 0,
        }
    }

    /// Interactions this component participates in (labels of its transitions).
    pub fn alphabet(&self) -> BTreeSet<InteractionId> {
        self.transitions.iter().map(|t| t.label).collect()
    }

    pub fn location_index(&self, name: &str) -> Option<usize> {
        self.locations.iter().position(|l| l == name)
    }

    pub fn variable_index(&self, name: &str) -> Option<usize> {
        self.variables.iter().position(|v| v == name)
    }
}

/// A strict partial order on interactions, stored as `(low, high)` pairs.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PrioritySet {
    pairs: BTreeSet<(InteractionId, InteractionId)>,
}

/// A cycle found while closing a priority relation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PriorityCycle(pub Vec<InteractionId>);

impl PrioritySet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, low: InteractionId, high: InteractionId) -> bool {
        self.pairs.insert((low, high))
    }

    pub fn contains(&self, low: InteractionId, high: InteractionId) -> bool {
        self.pairs.contains(&(low, high))
    }

    pub fn iter(&self) -> impl Iterator<Item = (InteractionId, InteractionId)> + '_ {
        self.pairs.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn union(&self, other: &PrioritySet) -> PrioritySet {
        PrioritySet {
            pairs: self.pairs.union(&other.pairs).copied().collect(),
        }
    }

    pub fn is_subset(&self, other: &PrioritySet) -> bool {
        self.pairs.is_subset(&other.pairs)
    }

    /// Interactions mentioned on either side.
    pub fn support(&self) -> BTreeSet<InteractionId> {
        self.pairs.iter().flat_map(|&(a, b)| [a, b]).collect()
    }

    /// Transitive closure; fails with one cycle if the closure is reflexive
    /// anywhere.
    pub fn closure_and_validate(&self) -> Result<PrioritySet, PriorityCycle> {
        let mut succ: BTreeMap<InteractionId, Vec<InteractionId>> = BTreeMap::new();
        for &(lo, hi) in &self.pairs {
            succ.entry(lo).or_default().push(hi);
        }
        let mut closed = BTreeSet::new();
        for &start in succ.keys() {
            let mut parent: BTreeMap<InteractionId, InteractionId> = BTreeMap::new();
            let mut queue = VecDeque::from([start]);
            let mut seen = BTreeSet::new();
            while let Some(x) = queue.pop_front() {
                for &y in succ.get(&x).map(Vec::as_slice).unwrap_or(&[]) {
                    if y == start {
                        let mut cycle = vec![x];
                        let mut cur = x;
                        while cur != start {
                            cur = parent[&cur];
                            cycle.push(cur);
                        }
                        cycle.reverse();
                        return Err(PriorityCycle(cycle));
                    }
                    if seen.insert(y) {
                        parent.insert(y, x);
                        closed.insert((start, y));
                        queue.push_back(y);
                    }
                }
            }
        }
        Ok(PrioritySet { pairs: closed })
    }
}

impl FromIterator<(InteractionId, InteractionId)> for PrioritySet {
    fn from_iter<T: IntoIterator<Item = (InteractionId, InteractionId)>>(iter: T) -> Self {
        PrioritySet {
            pairs: iter.into_iter().collect(),
        }
    }
}

/// State of one component: its location and packed variable valuation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LocalState {
    pub location: u32,
    pub valuation: u64,
}

/// Global state: one [`LocalState`] per component, in component order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Configuration {
    pub locals: Vec<LocalState>,
}

/// Constraint on one component inside a [`PartialConfiguration`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalConstraint {
    pub location: usize,
    /// `(variable, value)` pairs; unlisted variables are unconstrained.
    pub valuation: Vec<(usize, bool)>,
}

impl LocalConstraint {
    pub fn at(location: usize) -> Self {
        LocalConstraint {
            location,
            valuation: Vec::new(),
        }
    }

    pub fn matches(&self, local: &LocalState) -> bool {
        local.location as usize == self.location
            && self
                .valuation
                .iter()
                .all(|&(v, b)| (local.valuation >> v & 1 == 1) == b)
    }
}

/// A set of configurations given by constraints on some components; the
/// remaining components are wildcards.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartialConfiguration {
    pub constraints: Vec<Option<LocalConstraint>>,
}

impl PartialConfiguration {
    pub fn matches(&self, c: &Configuration) -> bool {
        self.constraints
            .iter()
            .zip(&c.locals)
            .all(|(k, l)| k.as_ref().is_none_or(|k| k.matches(l)))
    }
}

/// Partition of the alphabet induced by splitting the components in two.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlphabetSplit {
    /// Labels used only by the first group.
    pub first_only: BTreeSet<InteractionId>,
    /// Labels used only by the second group.
    pub second_only: BTreeSet<InteractionId>,
    /// Labels used by both groups.
    pub shared: BTreeSet<InteractionId>,
}

/// A component-based system `(C, Σ, P)` with optional risk configurations.
///
/// Construction validates every structural invariant; derived lookup tables
/// (participants, priority closure, outgoing transitions) are cached.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct System {
    components: Vec<Component>,
    interactions: Vec<String>,
    priorities: PrioritySet,
    risk_states: Vec<PartialConfiguration>,
    sharp: Option<InteractionId>,
    participants: Vec<Vec<usize>>,
    closure: PrioritySet,
    higher: Vec<Vec<InteractionId>>,
    outgoing: Vec<Vec<Vec<usize>>>,
}

impl System {
    pub fn new(
        components: Vec<Component>,
        interactions: Vec<String>,
        priorities: PrioritySet,
        risk_states: Vec<PartialConfiguration>,
    ) -> Result<System, ModelError> {
        Self::build(components, interactions, priorities, risk_states, None)
    }

    pub(crate) fn build(
        components: Vec<Component>,
        interactions: Vec<String>,
        priorities: PrioritySet,
        risk_states: Vec<PartialConfiguration>,
        sharp: Option<InteractionId>,
    ) -> Result<System, ModelError> {
        if components.is_empty() {
            return Err(ModelError::NoComponents);
        }
        check_unique("interaction", interactions.iter())?;
        check_unique("component", components.iter().map(|c| &c.name))?;
        let n = interactions.len();
        let mut participants = vec![Vec::new(); n];
        for (ci, c) in components.iter().enumerate() {
            validate_component(c, n, &interactions)?;
            for sigma in c.alphabet() {
                participants[sigma].push(ci);
            }
        }
        if let Some(i) = participants.iter().position(Vec::is_empty) {
            return Err(ModelError::UnusedInteraction(interactions[i].clone()));
        }
        for (lo, hi) in priorities.iter() {
            if lo >= n || hi >= n {
                return Err(ModelError::UnknownInteraction(format!("#{}", lo.max(hi))));
            }
        }
        let closure = priorities
            .closure_and_validate()
            .map_err(|PriorityCycle(cycle)| ModelError::CircularPriority {
                cycle: cycle.iter().map(|&i| interactions[i].clone()).collect(),
            })?;
        for r in &risk_states {
            if r.constraints.len() != components.len() {
                return Err(ModelError::RiskArity {
                    expected: components.len(),
                    found: r.constraints.len(),
                });
            }
            if r.constraints.iter().all(Option::is_none) {
                return Err(ModelError::EmptyRiskConstraint);
            }
            for (k, c) in r.constraints.iter().zip(&components) {
                if let Some(k) = k {
                    if k.location >= c.locations.len() {
                        return Err(ModelError::UnknownLocation {
                            component: c.name.clone(),
                            location: format!("#{}", k.location),
                        });
                    }
                    if k.valuation.iter().any(|&(v, _)| v >= c.variables.len()) {
                        return Err(ModelError::UnknownVariable {
                            component: c.name.clone(),
                            variable: "?".into(),
                        });
                    }
                }
            }
        }
        let mut higher = vec![Vec::new(); n];
        for (lo, hi) in closure.iter() {
            higher[lo].push(hi);
        }
        let outgoing = components
            .iter()
            .map(|c| {
                let mut out = vec![Vec::new(); c.locations.len()];
                for (ti, t) in c.transitions.iter().enumerate() {
                    out[t.source].push(ti);
                }
                out
            })
            .collect();
        Ok(System {
            components,
            interactions,
            priorities,
            risk_states,
            sharp,
            participants,
            closure,
            higher,
            outgoing,
        })
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }

    pub fn component(&self, index: usize) -> &Component {
        &self.components[index]
    }

    pub fn interactions(&self) -> &[String] {
        &self.interactions
    }

    pub fn interaction_name(&self, sigma: InteractionId) -> &str {
        &self.interactions[sigma]
    }

    pub fn interaction_index(&self, name: &str) -> Option<InteractionId> {
        self.interactions.iter().position(|s| s == name)
    }

    pub fn component_index(&self, name: &str) -> Option<usize> {
        self.components.iter().position(|c| c.name == name)
    }

    pub fn priorities(&self) -> &PrioritySet {
        &self.priorities
    }

    /// Transitive closure of the priority relation.
    pub fn priority_closure(&self) -> &PrioritySet {
        &self.closure
    }

    /// Interactions strictly above `sigma` in the closed priority order.
    pub fn higher_than(&self, sigma: InteractionId) -> &[InteractionId] {
        &self.higher[sigma]
    }

    pub fn risk_states(&self) -> &[PartialConfiguration] {
        &self.risk_states
    }

    /// The ♯ interaction when this is a ♯-abstract system.
    pub fn sharp(&self) -> Option<InteractionId> {
        self.sharp
    }

    /// Components whose alphabet contains `sigma`.
    pub fn participants(&self, sigma: InteractionId) -> &[usize] {
        &self.participants[sigma]
    }

    /// Name-based lookup of [`System::participants`].
    pub fn participants_of(&self, name: &str) -> Result<BTreeSet<usize>, ModelError> {
        let sigma = self
            .interaction_index(name)
            .ok_or_else(|| ModelError::UnknownInteraction(name.to_string()))?;
        Ok(self.participants[sigma].iter().copied().collect())
    }

    /// Transitions of component `comp` leaving `location`.
    pub fn outgoing(&self, comp: usize, location: usize) -> impl Iterator<Item = &Transition> {
        let c = &self.components[comp];
        self.outgoing[comp][location]
            .iter()
            .map(move |&t| &c.transitions[t])
    }

    pub fn initial_configuration(&self) -> Configuration {
        Configuration {
            locals: self
                .components
                .iter()
                .map(|c| LocalState {
                    location: c.initial_location as u32,
                    valuation: c.initial_valuation,
                })
                .collect(),
        }
    }

    pub fn with_priorities(&self, priorities: PrioritySet) -> Result<System, ModelError> {
        System::build(
            self.components.clone(),
            self.interactions.clone(),
            priorities,
            self.risk_states.clone(),
            self.sharp,
        )
    }

    pub fn with_risk_states(&self, risk: Vec<PartialConfiguration>) -> Result<System, ModelError> {
        System::build(
            self.components.clone(),
            self.interactions.clone(),
            self.priorities.clone(),
            risk,
            self.sharp,
        )
    }

    /// Partitions Σ into labels private to `first`, private to the rest, and
    /// shared. `first` must be a nonempty strict subset of the components.
    pub fn split_alphabet(&self, first: &BTreeSet<usize>) -> Result<AlphabetSplit, ModelError> {
        if first.is_empty() {
            return Err(ModelError::InvalidSplit("first group is empty"));
        }
        if first.iter().any(|&c| c >= self.components.len()) {
            return Err(ModelError::InvalidSplit("component index out of range"));
        }
        if first.len() == self.components.len() {
            return Err(ModelError::InvalidSplit(
                "first group contains every component",
            ));
        }
        Ok(self.split_unchecked(first))
    }

    pub(crate) fn split_unchecked(&self, first: &BTreeSet<usize>) -> AlphabetSplit {
        let mut split = AlphabetSplit {
            first_only: BTreeSet::new(),
            second_only: BTreeSet::new(),
            shared: BTreeSet::new(),
        };
        for (sigma, parts) in self.participants.iter().enumerate() {
            let in_first = parts.iter().any(|c| first.contains(c));
            let in_second = parts.iter().any(|c| !first.contains(c));
            match (in_first, in_second) {
                (true, true) => split.shared.insert(sigma),
                (true, false) => split.first_only.insert(sigma),
                _ => split.second_only.insert(sigma),
            };
        }
        split
    }

    /// Component indices from a list of names.
    pub fn component_set<S: AsRef<str>>(&self, names: &[S]) -> Result<BTreeSet<usize>, ModelError> {
        names
            .iter()
            .map(|n| {
                self.component_index(n.as_ref())
                    .ok_or_else(|| ModelError::UnknownComponent(n.as_ref().to_string()))
            })
            .collect()
    }

    /// Renders a priority set with interaction names, e.g. `a<b, c<d`.
    pub fn format_priorities(&self, p: &PrioritySet) -> String {
        p.iter()
            .map(|(lo, hi)| format!("{}<{}", self.interactions[lo], self.interactions[hi]))
            .collect::<Vec<_>>()
            .join(", ")
    }

    pub fn format_configuration(&self, c: &Configuration) -> String {
        self.components
            .iter()
            .zip(&c.locals)
            .map(|(comp, l)| {
                let mut s = format!("{}@{}", comp.name, comp.locations[l.location as usize]);
                if !comp.variables.is_empty() {
                    let vals: Vec<String> = comp
                        .variables
                        .iter()
                        .enumerate()
                        .map(|(i, v)| format!("{v}={}", l.valuation >> i & 1))
                        .collect();
                    s.push_str(&format!("[{}]", vals.join(" ")));
                }
                s
            })
            .collect::<Vec<_>>()
            .join(" ")
    }
}

impl fmt::Display for System {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        print::write_system(self, f)
    }
}

fn check_unique<'a>(
    kind: &'static str,
    names: impl Iterator<Item = &'a String>,
) -> Result<(), ModelError> {
    let mut seen = BTreeSet::new();
    for n in names {
        if !seen.insert(n) {
            return Err(ModelError::Duplicate {
                kind,
                name: n.clone(),
            });
        }
    }
    Ok(())
}

fn validate_component(c: &Component, n: usize, interactions: &[String]) -> Result<(), ModelError> {
    if c.locations.is_empty() {
        return Err(ModelError::NoLocations {
            component: c.name.clone(),
        });
    }
    check_unique("location", c.locations.iter())?;
    check_unique("variable", c.variables.iter())?;
    if c.variables.len() > MAX_VARIABLES {
        return Err(ModelError::TooManyVariables {
            component: c.name.clone(),
        });
    }
    let bad_loc = |l: usize| ModelError::UnknownLocation {
        component: c.name.clone(),
        location: format!("#{l}"),
    };
    if c.initial_location >= c.locations.len() {
        return Err(bad_loc(c.initial_location));
    }
    let nvars = c.variables.len();
    for t in &c.transitions {
        if t.source >= c.locations.len() {
            return Err(bad_loc(t.source));
        }
        if t.destination >= c.locations.len() {
            return Err(bad_loc(t.destination));
        }
        if t.label >= n {
            return Err(ModelError::UnknownInteraction(format!("#{}", t.label)));
        }
        if t.update.len() != nvars {
            return Err(ModelError::IncompleteUpdate {
                component: c.name.clone(),
            });
        }
        let over = std::iter::once(&t.guard)
            .chain(&t.update)
            .filter_map(Expr::max_var)
            .find(|&v| v >= nvars);
        if let Some(v) = over {
            return Err(ModelError::UnknownVariable {
                component: c.name.clone(),
                variable: format!("#{v} (in a transition labelled {})", interactions[t.label]),
            });
        }
    }
    Ok(())
}
