//! Splitting zero-test transitions so the flow graph becomes acyclic.
//!
//! Each transition `t` becomes `t#sim`, `t#con` and `t#pro` with two new
//! places `t#c` and `t#p`. `t#sim` needs every such place empty and marks
//! both of its own; `t#con` consumes `pre(t)` and performs the zero tests;
//! `t#pro` waits until `t#c` is empty and produces `post(t)`. No flow arc
//! leaves an original place towards a producer, so the result is acyclic.

use thiserror::Error;

use super::roles::{PlaceRole, RoleBuilder, RoleMap, TransitionRole};
use crate::net::{Instance, Marking, NetError, Objective, Tokens, TransitionId, ZeroTestNet};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReductionError {
    #[error("this reduction preserves reachability only; the instance asks for {0}")]
    NotReach(Objective),
    #[error("the input net has resets; expected a net with zero tests")]
    HasResets,
    #[error("transition {0} was dropped by the reduction")]
    Dropped(String),
    #[error(transparent)]
    Net(#[from] NetError),
}

/// Views the instance's net as a zero-test net; a reset-free plain net has
/// no zero tests.
pub(crate) fn zero_test_view(inst: &Instance) -> Result<ZeroTestNet, ReductionError> {
    match &inst.net {
        crate::net::AnyNet::ZeroTest(z) => Ok(z.clone()),
        crate::net::AnyNet::Reset(n) if !n.has_resets() => Ok(ZeroTestNet::new(n.clone(), Vec::new())?),
        crate::net::AnyNet::Reset(_) => Err(ReductionError::HasResets),
    }
}

pub(crate) fn pad(m: &Marking, places: usize) -> Marking {
    let mut entries = m.entries().to_vec();
    entries.resize(places, Tokens::zero());
    Marking::new(entries)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AcyclicReduction {
    pub instance: Instance,
    pub roles: RoleMap,
}

impl AcyclicReduction {
    /// Each source firing becomes its three simulating firings.
    pub fn lift_run(&self, run: &[TransitionId]) -> Vec<TransitionId> {
        let role = |r| self.roles.transition(r).expect("every source transition is split");
        run.iter()
            .flat_map(|&t| {
                [
                    role(TransitionRole::Choose(t)),
                    role(TransitionRole::Consume(t)),
                    role(TransitionRole::Produce(t)),
                ]
            })
            .collect()
    }

    /// Keeps the produce firings, which complete a simulated step.
    pub fn project_run(&self, run: &[TransitionId]) -> Vec<TransitionId> {
        run.iter()
            .filter_map(|t| match self.roles.transition_role(*t) {
                TransitionRole::Produce(orig) => Some(orig),
                _ => None,
            })
            .collect()
    }
}

pub fn acyclify_zero_tests(inst: &Instance) -> Result<AcyclicReduction, ReductionError> {
    if inst.objective != Objective::Reach {
        return Err(ReductionError::NotReach(inst.objective));
    }
    let src = zero_test_view(inst)?;
    let base = src.base();
    let mut b = RoleBuilder::default();
    for p in base.places() {
        b.place(base.place_name(p), PlaceRole::Original(p))?;
    }
    let mut guards = Vec::new();
    for t in base.transition_ids() {
        let name = base.transition(t).name();
        let c = b.place(format!("{name}#c"), PlaceRole::ConsumeDue(t))?;
        let p = b.place(format!("{name}#p"), PlaceRole::ProduceDue(t))?;
        guards.push((c, p));
    }
    let all_guards: Vec<_> = guards.iter().flat_map(|(c, p)| [*c, *p]).collect();

    let mut ztests = Vec::new();
    for t in base.transition_ids() {
        let tr = base.transition(t);
        let name = tr.name();
        let (c, p) = guards[t.0];

        let sim = b.transition(format!("{name}#sim"), TransitionRole::Choose(t))?;
        b.net.produce(sim, c, 1u32)?;
        b.net.produce(sim, p, 1u32)?;
        ztests.push(all_guards.clone());

        let con = b.transition(format!("{name}#con"), TransitionRole::Consume(t))?;
        for (q, w) in tr.pre() {
            b.net.consume(con, *q, w.clone())?;
        }
        b.net.consume(con, c, 1u32)?;
        ztests.push(src.zero_tests(t).to_vec());

        let pro = b.transition(format!("{name}#pro"), TransitionRole::Produce(t))?;
        b.net.consume(pro, p, 1u32)?;
        for (q, w) in tr.post() {
            b.net.produce(pro, *q, w.clone())?;
        }
        ztests.push(vec![c]);
    }

    let (net, roles) = b.finish();
    let places = net.place_count();
    let net = ZeroTestNet::new(net, ztests)?;
    let instance = Instance::new(
        net,
        pad(&inst.initial, places),
        pad(&inst.target, places),
        Objective::Reach,
    )?;
    Ok(AcyclicReduction { instance, roles })
}
