//! Simulating zero tests with resets and shadow copies.
//!
//! Every place `p` gets a copy `p#copy` that follows all flow arcs but is
//! never reset, and every zero test on `p` becomes a reset of `p`. The copy
//! can only run ahead of the original, and only when a reset discards
//! tokens. Reaching a target that is duplicated onto the copies therefore
//! forces every simulated zero test to have been honest.
//!
//! A transition that zero-tests one of its own input places can never fire
//! in the source net, yet its mirror could consume first and reset an
//! empty remainder. Such transitions are dropped.

use super::acyclify::{zero_test_view, ReductionError};
use super::roles::{PlaceRole, RoleBuilder, RoleMap, TransitionRole};
use crate::net::{Instance, Marking, Objective, TransitionId};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResetReduction {
    pub instance: Instance,
    pub roles: RoleMap,
    /// `mirrors[t]` is the transition simulating `t`, if kept.
    pub mirrors: Vec<Option<TransitionId>>,
}

impl ResetReduction {
    pub fn lift_run(&self, run: &[TransitionId]) -> Result<Vec<TransitionId>, ReductionError> {
        run.iter()
            .map(|t| {
                self.mirrors[t.0].ok_or_else(|| ReductionError::Dropped(format!("#{}", t.0)))
            })
            .collect()
    }

    pub fn project_run(&self, run: &[TransitionId]) -> Vec<TransitionId> {
        run.iter()
            .filter_map(|t| match self.roles.transition_role(*t) {
                TransitionRole::Mirror(orig) => Some(orig),
                _ => None,
            })
            .collect()
    }
}

fn duplicate(m: &Marking) -> Marking {
    let mut entries = m.entries().to_vec();
    entries.extend_from_slice(m.entries());
    Marking::new(entries)
}

pub fn zero_tests_to_resets(inst: &Instance) -> Result<ResetReduction, ReductionError> {
    if inst.objective != Objective::Reach {
        return Err(ReductionError::NotReach(inst.objective));
    }
    let src = zero_test_view(inst)?;
    let base = src.base();
    let mut b = RoleBuilder::default();
    for p in base.places() {
        b.place(base.place_name(p), PlaceRole::Original(p))?;
    }
    let copies = base
        .places()
        .map(|p| b.place(format!("{}#copy", base.place_name(p)), PlaceRole::Copy(p)))
        .collect::<Result<Vec<_>, _>>()?;

    let mut mirrors = Vec::with_capacity(base.transition_count());
    for t in base.transition_ids() {
        let tr = base.transition(t);
        let tests = src.zero_tests(t);
        if tests.iter().any(|p| tr.pre_weight(*p).is_some()) {
            mirrors.push(None);
            continue;
        }
        let m = b.transition(tr.name(), TransitionRole::Mirror(t))?;
        for (p, w) in tr.pre() {
            b.net.consume(m, *p, w.clone())?;
            b.net.consume(m, copies[p.0], w.clone())?;
        }
        for (p, w) in tr.post() {
            b.net.produce(m, *p, w.clone())?;
            b.net.produce(m, copies[p.0], w.clone())?;
        }
        for p in tests {
            b.net.reset(m, *p)?;
        }
        mirrors.push(Some(m));
    }

    let (net, roles) = b.finish();
    let instance = Instance::new(net, duplicate(&inst.initial), duplicate(&inst.target), Objective::Reach)?;
    Ok(ResetReduction {
        instance,
        roles,
        mirrors,
    })
}
