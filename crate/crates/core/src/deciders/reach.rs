//! Reachability in acyclic workflow nets with resets.

use num_bigint::BigUint;
use num_traits::Pow;

use super::{bfs, verdict, DeciderError, Limits, SearchObserver, Verdict};
use crate::net::{Instance, Net, Objective};
use crate::semantics::{fire, FiringMode};
use crate::structure::{detect_workflow, validate_structure, ClaimedKind};

/// `(‖net‖ + ‖initial‖)^(|T|+1)`: no reachable marking is larger.
pub fn reach_norm_bound(inst: &Instance) -> BigUint {
    let net = inst.net.arcs();
    let base = inst.net.norm() + inst.initial.norm();
    Pow::pow(base, net.transition_count() as u64 + 1)
}

fn check(inst: &Instance) -> Result<&Net, DeciderError> {
    if inst.objective != Objective::Reach {
        return Err(DeciderError::WrongObjective {
            expected: Objective::Reach,
            found: inst.objective,
        });
    }
    let net = inst.net.as_reset().ok_or(DeciderError::WrongNetKind)?;
    let report = validate_structure(net, &ClaimedKind::Acyclic).expect("no names to resolve");
    if !report.acyclic {
        return Err(DeciderError::NotAcyclic);
    }
    if detect_workflow(net).is_none() {
        return Err(DeciderError::NotWorkflow);
    }
    Ok(net)
}

/// Decides whether `inst.target` is exactly reachable.
///
/// The search explores the reset semantics directly. Its reachable set is
/// finite because every marking is dominated by one of the reset-free net,
/// whose markings stay within [`reach_norm_bound`].
pub fn decide_reach_rawn(inst: &Instance) -> Result<Verdict, DeciderError> {
    decide_reach_rawn_with(inst, &mut ())
}

pub fn decide_reach_rawn_with(
    inst: &Instance,
    observer: &mut dyn SearchObserver,
) -> Result<Verdict, DeciderError> {
    let net = check(inst)?;
    let outcome = bfs(
        &inst.initial,
        net.transition_count(),
        |m, t| fire(net, m, t).ok(),
        |m| m == &inst.target,
        &Limits::default(),
        observer,
    );
    Ok(verdict(outcome, FiringMode::Concrete, Some(reach_norm_bound(inst))))
}
