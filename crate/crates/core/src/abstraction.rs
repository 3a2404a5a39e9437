//! Alphabet abstraction: labels outside the kept components' alphabets are
//! merged into the may-fire interaction ♯, synthesis targets ♯-deadlock,
//! and ♯-priorities are expanded back to concrete ones.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::encode::Ordering;
use crate::game::Objective;
use crate::model::{
    Component, Configuration, InteractionId, ModelError, PrioritySet, System, SHARP,
};
use crate::resolve::{self, CandidateFilter, SynthOptions, Synthesis};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AbstractionError {
    #[error("no component kept")]
    EmptyKeep,
    #[error("component index {0} out of range")]
    UnknownComponent(usize),
    #[error("abstracted priorities are circular: {}", .0.join(" < "))]
    CircularPriority(Vec<String>),
    #[error("priority `{0}` has ♯ as its higher interaction")]
    SharpOnRight(String),
    #[error("concretized priorities are circular: {}", .0.join(" < "))]
    ConcreteCycle(Vec<String>),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// A ♯-abstract system together with the maps back to its concrete origin.
#[derive(Clone, Debug)]
pub struct AbstractSystem {
    pub system: System,
    /// Concrete interaction of each abstract one; `None` for ♯.
    pub concrete_of: Vec<Option<InteractionId>>,
    /// Abstract interaction of each concrete one.
    pub abstract_of: Vec<InteractionId>,
    /// Concrete interactions merged into ♯.
    pub abstracted: BTreeSet<InteractionId>,
    /// Concrete indices of the components that remain.
    pub components: Vec<usize>,
    /// Names of the components removed because they only offer ♯.
    pub eliminated: Vec<String>,
}

impl AbstractSystem {
    /// The abstract ♯ interaction, if any component offers it.
    pub fn sharp(&self) -> Option<InteractionId> {
        self.system.sharp()
    }

    /// Restriction of a concrete configuration to the remaining components.
    pub fn project(&self, c: &Configuration) -> Configuration {
        Configuration {
            locals: self.components.iter().map(|&i| c.locals[i]).collect(),
        }
    }

    /// Abstract interactions other than ♯.
    pub fn kept(&self) -> BTreeSet<InteractionId> {
        (0..self.concrete_of.len())
            .filter(|&i| self.concrete_of[i].is_some())
            .collect()
    }
}

/// Builds the ♯-abstraction keeping the alphabets of `keep`. Risk
/// configurations are not carried over.
pub fn abstract_system(
    s: &System,
    keep: &BTreeSet<usize>,
) -> Result<AbstractSystem, AbstractionError> {
    if keep.is_empty() {
        return Err(AbstractionError::EmptyKeep);
    }
    let n = s.components().len();
    if let Some(&c) = keep.iter().find(|&&c| c >= n) {
        return Err(AbstractionError::UnknownComponent(c));
    }
    let kept_labels: BTreeSet<InteractionId> = keep
        .iter()
        .flat_map(|&c| s.component(c).alphabet())
        .collect();
    abstract_labels(s, &kept_labels, keep)
}

/// Builds the ♯-abstraction keeping exactly the labels `kept_labels`.
/// Variable-free components outside `protect` whose whole alphabet is
/// abstracted are removed.
pub fn abstract_labels(
    s: &System,
    kept_labels: &BTreeSet<InteractionId>,
    protect: &BTreeSet<usize>,
) -> Result<AbstractSystem, AbstractionError> {
    let keep = protect;
    let ni = s.interactions().len();
    let abstracted: BTreeSet<InteractionId> =
        (0..ni).filter(|i| !kept_labels.contains(i)).collect();

    let mut concrete_of: Vec<Option<InteractionId>> =
        kept_labels.iter().map(|&i| Some(i)).collect();
    let mut names: Vec<String> = kept_labels
        .iter()
        .map(|&i| s.interaction_name(i).to_string())
        .collect();
    let sharp_id = names.len();
    let mut abstract_of = vec![sharp_id; ni];
    for (k, &i) in kept_labels.iter().enumerate() {
        abstract_of[i] = k;
    }

    let mut components = Vec::new();
    let mut eliminated = Vec::new();
    let mut comps: Vec<Component> = Vec::new();
    for (ci, c) in s.components().iter().enumerate() {
        let all_sharp = c.alphabet().iter().all(|l| abstracted.contains(l));
        if !keep.contains(&ci) && all_sharp && c.variables.is_empty() {
            eliminated.push(c.name.clone());
            continue;
        }
        let mut c2 = c.clone();
        for t in &mut c2.transitions {
            t.label = abstract_of[t.label];
        }
        components.push(ci);
        comps.push(c2);
    }
    let uses_sharp = comps
        .iter()
        .any(|c| c.transitions.iter().any(|t| t.label == sharp_id));
    let sharp = if uses_sharp {
        names.push(SHARP.to_string());
        concrete_of.push(None);
        Some(sharp_id)
    } else {
        None
    };

    let mut mapped = PrioritySet::new();
    for (lo, hi) in s.priorities().iter() {
        let (a, b) = (abstract_of[lo], abstract_of[hi]);
        if a == b {
            return Err(AbstractionError::CircularPriority(vec![
                names
                    .get(a)
                    .cloned()
                    .unwrap_or_else(
                        || SHARP.to_string()
                    );
                2
            ]));
        }
        mapped.insert(a, b);
    }
    if let Err(cycle) = mapped.closure_and_validate() {
        let label = |i: usize| names.get(i).cloned().unwrap_or_else(|| SHARP.to_string());
        return Err(AbstractionError::CircularPriority(
            cycle.0.iter().map(|&i| label(i)).collect(),
        ));
    }
    let priorities: PrioritySet = mapped
        .iter()
        .filter(|&(a, b)| a != sharp_id && b != sharp_id)
        .collect();

    let system = System::build(comps, names, priorities, Vec::new(), sharp)?;
    Ok(AbstractSystem {
        system,
        concrete_of,
        abstract_of,
        abstracted,
        components,
        eliminated,
    })
}

/// Candidate filter keeping ♯ off the higher side.
pub fn sharp_filter(a: &AbstractSystem) -> CandidateFilter {
    CandidateFilter {
        low: None,
        high: Some(a.kept()),
    }
}

/// Synthesis against ♯-deadlock on the abstract system.
pub fn synthesize_abstract(
    a: &AbstractSystem,
    ordering: Ordering,
    repush_depth: usize,
) -> Synthesis {
    let opts = SynthOptions::new(Objective::SharpDeadlock)
        .ordering(ordering)
        .repush_depth(repush_depth)
        .filter(sharp_filter(a));
    resolve::synthesize(&a.system, &opts)
}

/// Expands abstract priorities over the concrete alphabet, expanding each
/// `♯ < σ` to every abstracted label below `σ`, and checks the result
/// against the concrete system's own priorities.
pub fn concretize(
    a: &AbstractSystem,
    p: &PrioritySet,
    concrete: &System,
) -> Result<PrioritySet, AbstractionError> {
    let mut out = PrioritySet::new();
    for (lo, hi) in p.iter() {
        let Some(h) = a.concrete_of[hi] else {
            return Err(AbstractionError::SharpOnRight(format!(
                "{}<{}",
                a.system.interaction_name(lo),
                a.system.interaction_name(hi)
            )));
        };
        match a.concrete_of[lo] {
            Some(l) => {
                out.insert(l, h);
            }
            None => {
                for &l in &a.abstracted {
                    out.insert(l, h);
                }
            }
        }
    }
    if let Err(cycle) = concrete.priorities().union(&out).closure_and_validate() {
        return Err(AbstractionError::ConcreteCycle(
            cycle
                .0
                .iter()
                .map(|&i| concrete.interaction_name(i).to_string())
                .collect(),
        ));
    }
    Ok(out)
}

/// Abstract synthesis followed by concretization.
#[derive(Clone, Debug)]
pub struct AbstractRun {
    pub abstraction: AbstractSystem,
    pub synthesis: Synthesis,
    /// Concrete priorities on abstract success.
    pub concrete: Option<Result<PrioritySet, AbstractionError>>,
}

pub fn synthesize_with_abstraction(
    s: &System,
    keep: &BTreeSet<usize>,
    ordering: Ordering,
    repush_depth: usize,
) -> Result<AbstractRun, AbstractionError> {
    let abstraction = abstract_system(s, keep)?;
    let synthesis = synthesize_abstract(&abstraction, ordering, repush_depth);
    let concrete = synthesis
        .outcome
        .priorities()
        .map(|p| concretize(&abstraction, p, s));
    Ok(AbstractRun {
        abstraction,
        synthesis,
        concrete,
    })
}
