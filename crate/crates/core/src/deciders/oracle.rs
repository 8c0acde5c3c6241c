//! Budgeted brute-force exploration of the concrete state space.
//!
//! Used to cross-check the deciders and the reductions. A positive answer
//! is always backed by a replayable run. A negative answer is only given
//! when no budget limit cut anything off, so the whole reachable set was
//! seen.

use super::{bfs, verdict, Limits, SearchBudget, SearchObserver, Verdict};
use crate::net::{Instance, Objective};
use crate::semantics::NetView;

pub fn oracle_search(inst: &Instance, budget: &SearchBudget) -> Verdict {
    oracle_search_with(inst, budget, &mut ())
}

pub fn oracle_search_with(
    inst: &Instance,
    budget: &SearchBudget,
    observer: &mut dyn SearchObserver,
) -> Verdict {
    let view = NetView::from(&inst.net);
    let mode = view.concrete_mode();
    let limits = Limits {
        max_depth: budget.max_steps,
        max_norm: budget.max_norm.clone(),
        max_states: budget.max_states,
    };
    let target = &inst.target;
    let outcome = bfs(
        &inst.initial,
        view.arcs().transition_count(),
        |m, t| view.fire(m, t, mode).ok(),
        |m| match inst.objective {
            Objective::Reach => m == target,
            Objective::Cover => m.covers(target),
        },
        &limits,
        observer,
    );
    verdict(outcome, mode, None)
}
