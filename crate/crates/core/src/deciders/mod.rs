//! Decision procedures and the brute-force oracle.
//!
//! All searches are breadth-first with transitions tried in index order, so
//! witnesses are shortest and deterministic. Memory is exponential; the
//! procedures store every visited marking in a hash table.

mod concretize;
mod cover;
mod invariants;
mod oracle;
mod reach;

use std::collections::{HashMap, VecDeque};
use std::fmt;

use num_bigint::BigUint;
use thiserror::Error;

use crate::net::{Marking, Objective, TransitionId};
use crate::semantics::FiringMode;

pub use concretize::{concretize_cover_witness, ConcretizeError};
pub use cover::{
    cover_norm_bound, decide_cover_rapn, decide_cover_rapn_with, is_pump_safe, is_reset_disjoint,
    weight, CoverOptions,
};
pub use invariants::sub_invariants;
pub use oracle::{oracle_search, oracle_search_with};
pub use reach::{decide_reach_rawn, decide_reach_rawn_with, reach_norm_bound};

/// Limits for [`oracle_search`]. `None` means unlimited.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SearchBudget {
    /// Maximum run length explored.
    pub max_steps: Option<usize>,
    /// Markings above this norm are pruned.
    pub max_norm: Option<BigUint>,
    /// Maximum number of distinct markings stored.
    pub max_states: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Answer {
    Yes,
    No,
    Exhausted,
}

impl fmt::Display for Answer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Answer::Yes => "yes",
            Answer::No => "no",
            Answer::Exhausted => "exhausted",
        })
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SearchStats {
    /// Distinct markings stored.
    pub states: usize,
    /// Largest norm among stored markings (finite entries only).
    pub peak_norm: BigUint,
    /// The theoretical norm bound, when the procedure has one.
    pub bound: Option<BigUint>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub answer: Answer,
    /// Present iff `answer` is `Yes`.
    pub witness: Option<Vec<TransitionId>>,
    /// The rule under which `witness` replays.
    pub witness_mode: FiringMode,
    pub stats: SearchStats,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DeciderError {
    #[error("expected a {expected} objective, found {found}")]
    WrongObjective { expected: Objective, found: Objective },
    #[error("this procedure takes a net with resets, not a zero-test net")]
    WrongNetKind,
    #[error("net is not acyclic")]
    NotAcyclic,
    #[error("net is not a workflow net")]
    NotWorkflow,
}

/// Callbacks fired during a search.
pub trait SearchObserver {
    /// A marking is stored for the first time.
    fn on_state(&mut self, _marking: &Marking) {}
    /// A transition fired from an expanded marking, whether or not the
    /// result is new.
    fn on_edge(&mut self, _from: &Marking, _t: TransitionId, _to: &Marking) {}
}

impl SearchObserver for () {}

#[derive(Debug, Clone, Default)]
pub(crate) struct Limits {
    pub max_depth: Option<usize>,
    pub max_norm: Option<BigUint>,
    pub max_states: Option<usize>,
}

pub(crate) struct Outcome {
    pub witness: Option<Vec<TransitionId>>,
    pub stats: SearchStats,
    /// Some part of the state space was cut off by a limit.
    pub truncated: bool,
}

/// Breadth-first search from `start` until `goal` holds.
pub(crate) fn bfs(
    start: &Marking,
    transitions: usize,
    mut step: impl FnMut(&Marking, TransitionId) -> Option<Marking>,
    goal: impl Fn(&Marking) -> bool,
    limits: &Limits,
    observer: &mut dyn SearchObserver,
) -> Outcome {
    let mut states = vec![start.clone()];
    let mut parent: Vec<Option<(usize, TransitionId)>> = vec![None];
    let mut depth = vec![0usize];
    let mut index = HashMap::new();
    index.insert(start.clone(), 0usize);
    let mut stats = SearchStats {
        states: 1,
        peak_norm: start.norm(),
        bound: None,
    };
    observer.on_state(start);
    let path = |parent: &[Option<(usize, TransitionId)>], mut v: usize| {
        let mut seq = Vec::new();
        while let Some((u, t)) = parent[v] {
            seq.push(t);
            v = u;
        }
        seq.reverse();
        seq
    };
    if goal(start) {
        return Outcome {
            witness: Some(Vec::new()),
            stats,
            truncated: false,
        };
    }
    let mut truncated = false;
    let mut queue = VecDeque::from([0usize]);
    while let Some(v) = queue.pop_front() {
        let cur = states[v].clone();
        let at_depth_limit = limits.max_depth.is_some_and(|d| depth[v] >= d);
        for ti in 0..transitions {
            let t = TransitionId(ti);
            let Some(next) = step(&cur, t) else { continue };
            if at_depth_limit {
                truncated = true;
                break;
            }
            observer.on_edge(&cur, t, &next);
            let norm = next.norm();
            if limits.max_norm.as_ref().is_some_and(|m| &norm > m) {
                truncated = true;
                continue;
            }
            if index.contains_key(&next) {
                continue;
            }
            if limits.max_states.is_some_and(|m| states.len() >= m) {
                stats.states = states.len();
                return Outcome {
                    witness: None,
                    stats,
                    truncated: true,
                };
            }
            let id = states.len();
            index.insert(next.clone(), id);
            observer.on_state(&next);
            if norm > stats.peak_norm {
                stats.peak_norm = norm;
            }
            let hit = goal(&next);
            states.push(next);
            parent.push(Some((v, t)));
            depth.push(depth[v] + 1);
            if hit {
                stats.states = states.len();
                return Outcome {
                    witness: Some(path(&parent, id)),
                    stats,
                    truncated,
                };
            }
            queue.push_back(id);
        }
    }
    stats.states = states.len();
    Outcome {
        witness: None,
        stats,
        truncated,
    }
}

pub(crate) fn verdict(outcome: Outcome, mode: FiringMode, bound: Option<BigUint>) -> Verdict {
    let answer = match (&outcome.witness, outcome.truncated) {
        (Some(_), _) => Answer::Yes,
        (None, false) => Answer::No,
        (None, true) => Answer::Exhausted,
    };
    let mut stats = outcome.stats;
    stats.bound = bound;
    Verdict {
        answer,
        witness: outcome.witness,
        witness_mode: mode,
        stats,
    }
}
