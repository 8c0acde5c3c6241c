//! Firing rules and run replay.
//!
//! Concrete firing happens in three phases: consume, reset, produce. The
//! ω-abstract rule lets a *generating* transition (one that only consumes
//! from ω places) fire "arbitrarily often" in one step. [`fire_abstract`]
//! applies that rule literally. [`fire_saturating`] restricts it to
//! transitions that do not reset their own inputs, since only those can
//! really be repeated; it is the rule the coverability decider uses.

use num_bigint::BigUint;
use thiserror::Error;

use crate::net::{Marking, Net, PlaceId, Tokens, TransitionId, ZeroTestNet};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FireError {
    #[error("transition not enabled: place {} holds too few tokens", .place.0)]
    NotEnabled { place: PlaceId },
    #[error("zero test failed: place {} is not empty", .place.0)]
    ZeroTestFailed { place: PlaceId },
    #[error("marking has {found} entries but the net has {expected} places")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("unknown transition index {0}")]
    UnknownTransition(usize),
    #[error("firing mode {mode:?} does not apply to this kind of net")]
    ModeMismatch { mode: FiringMode },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FiringMode {
    /// Three-phase reset semantics with ω-absorbing arithmetic.
    Concrete,
    /// The literal ω-abstraction rule for generating transitions.
    Abstract,
    /// ω-abstraction applied only to pumpable transitions.
    Saturating,
    /// Zero-test semantics; no reset phase.
    ZeroTest,
}

fn check(net: &Net, m: &Marking, t: TransitionId) -> Result<(), FireError> {
    if m.len() != net.place_count() {
        return Err(FireError::DimensionMismatch {
            expected: net.place_count(),
            found: m.len(),
        });
    }
    if t.0 >= net.transition_count() {
        return Err(FireError::UnknownTransition(t.0));
    }
    Ok(())
}

/// Consumes `pre(t)` from `m`, reporting the first blocking place.
fn consume(net: &Net, m: &Marking, t: TransitionId) -> Result<Vec<Tokens>, FireError> {
    let mut out = m.entries().to_vec();
    for (p, w) in net.transition(t).pre() {
        out[p.0] = out[p.0]
            .checked_sub(w)
            .ok_or(FireError::NotEnabled { place: *p })?;
    }
    Ok(out)
}

fn produce(net: &Net, out: &mut [Tokens], t: TransitionId) {
    for (p, w) in net.transition(t).post() {
        out[p.0] = out[p.0].add(w);
    }
}

pub fn is_enabled(net: &Net, m: &Marking, t: TransitionId) -> bool {
    check(net, m, t).is_ok()
        && net
            .transition(t)
            .pre()
            .iter()
            .all(|(p, w)| m[*p].at_least(w))
}

/// Concrete firing. ω entries absorb arithmetic and survive unless reset.
pub fn fire(net: &Net, m: &Marking, t: TransitionId) -> Result<Marking, FireError> {
    check(net, m, t)?;
    let mut out = consume(net, m, t)?;
    for p in net.transition(t).resets() {
        out[p.0] = Tokens::zero();
    }
    produce(net, &mut out, t);
    Ok(Marking::new(out))
}

/// True iff every place `t` consumes from holds ω. Vacuously true when
/// `t` consumes nothing.
pub fn is_generating(net: &Net, m: &Marking, t: TransitionId) -> bool {
    net.transition(t)
        .pre()
        .iter()
        .all(|(p, _)| m.entries().get(p.0).is_some_and(Tokens::is_omega))
}

/// Generating and resetting none of its own input places, so that firing
/// it once leaves it enabled again.
pub fn is_pumpable(net: &Net, m: &Marking, t: TransitionId) -> bool {
    let tr = net.transition(t);
    is_generating(net, m, t) && tr.pre().iter().all(|(p, _)| !tr.resets_place(*p))
}

fn saturate(net: &Net, m: &Marking, t: TransitionId) -> Marking {
    let tr = net.transition(t);
    let out = m
        .iter()
        .map(|(p, cur)| {
            if tr.resets_place(p) {
                Tokens::Finite(tr.post_weight(p).cloned().unwrap_or_default())
            } else if tr.post_weight(p).is_some() || cur.is_omega() {
                Tokens::Omega
            } else {
                cur.clone()
            }
        })
        .collect();
    Marking::new(out)
}

/// The ω-abstraction rule, applied whenever `t` is generating.
pub fn fire_abstract(net: &Net, m: &Marking, t: TransitionId) -> Result<Marking, FireError> {
    check(net, m, t)?;
    if is_generating(net, m, t) {
        Ok(saturate(net, m, t))
    } else {
        fire(net, m, t)
    }
}

/// The ω-abstraction rule restricted to pumpable transitions; all other
/// firings are concrete.
pub fn fire_saturating(net: &Net, m: &Marking, t: TransitionId) -> Result<Marking, FireError> {
    check(net, m, t)?;
    if is_pumpable(net, m, t) {
        Ok(saturate(net, m, t))
    } else {
        fire(net, m, t)
    }
}

/// Zero-test firing: every tested place must be empty in `m`, then consume
/// and produce.
pub fn fire_zero_test(zt: &ZeroTestNet, m: &Marking, t: TransitionId) -> Result<Marking, FireError> {
    let net = zt.base();
    check(net, m, t)?;
    let mut out = consume(net, m, t)?;
    if let Some(p) = zt.zero_tests(t).iter().find(|p| !m[**p].is_zero()) {
        return Err(FireError::ZeroTestFailed { place: *p });
    }
    produce(net, &mut out, t);
    Ok(Marking::new(out))
}

/// A borrowed net of either flavour.
#[derive(Debug, Clone, Copy)]
pub enum NetView<'a> {
    Reset(&'a Net),
    ZeroTest(&'a ZeroTestNet),
}

impl<'a> NetView<'a> {
    pub fn arcs(&self) -> &'a Net {
        match self {
            NetView::Reset(n) => n,
            NetView::ZeroTest(z) => z.base(),
        }
    }

    /// The natural concrete mode for this kind of net.
    pub fn concrete_mode(&self) -> FiringMode {
        match self {
            NetView::Reset(_) => FiringMode::Concrete,
            NetView::ZeroTest(_) => FiringMode::ZeroTest,
        }
    }

    pub fn fire(&self, m: &Marking, t: TransitionId, mode: FiringMode) -> Result<Marking, FireError> {
        match (self, mode) {
            (NetView::Reset(n), FiringMode::Concrete) => fire(n, m, t),
            (NetView::Reset(n), FiringMode::Abstract) => fire_abstract(n, m, t),
            (NetView::Reset(n), FiringMode::Saturating) => fire_saturating(n, m, t),
            (NetView::ZeroTest(z), FiringMode::ZeroTest) => fire_zero_test(z, m, t),
            _ => Err(FireError::ModeMismatch { mode }),
        }
    }
}

impl<'a> From<&'a Net> for NetView<'a> {
    fn from(n: &'a Net) -> Self {
        NetView::Reset(n)
    }
}

impl<'a> From<&'a ZeroTestNet> for NetView<'a> {
    fn from(z: &'a ZeroTestNet) -> Self {
        NetView::ZeroTest(z)
    }
}

impl<'a> From<&'a crate::net::AnyNet> for NetView<'a> {
    fn from(n: &'a crate::net::AnyNet) -> Self {
        match n {
            crate::net::AnyNet::Reset(n) => NetView::Reset(n),
            crate::net::AnyNet::ZeroTest(z) => NetView::ZeroTest(z),
        }
    }
}

/// A replayed run: the start marking and the marking after each step.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiringTrace {
    pub start: Marking,
    pub steps: Vec<(TransitionId, Marking)>,
    pub mode: FiringMode,
}

impl FiringTrace {
    pub fn final_marking(&self) -> &Marking {
        self.steps.last().map_or(&self.start, |(_, m)| m)
    }

    pub fn transitions(&self) -> Vec<TransitionId> {
        self.steps.iter().map(|(t, _)| *t).collect()
    }

    /// Start marking followed by every intermediate marking.
    pub fn markings(&self) -> impl Iterator<Item = &Marking> {
        std::iter::once(&self.start).chain(self.steps.iter().map(|(_, m)| m))
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("step {index} failed: {cause}")]
pub struct ReplayError {
    pub index: usize,
    pub cause: FireError,
}

/// Fires `seq` from `m` under `mode`, stopping at the first failing step.
pub fn replay<'a>(
    net: impl Into<NetView<'a>>,
    m: &Marking,
    seq: &[TransitionId],
    mode: FiringMode,
) -> Result<FiringTrace, ReplayError> {
    let net = net.into();
    let mut steps = Vec::with_capacity(seq.len());
    let mut cur = m.clone();
    for (index, &t) in seq.iter().enumerate() {
        cur = net
            .fire(&cur, t, mode)
            .map_err(|cause| ReplayError { index, cause })?;
        steps.push((t, cur.clone()));
    }
    Ok(FiringTrace {
        start: m.clone(),
        steps,
        mode,
    })
}

/// Consumption weight of `t` on `p`, zero when there is no arc.
pub fn pre_weight(net: &Net, t: TransitionId, p: PlaceId) -> BigUint {
    net.transition(t).pre_weight(p).cloned().unwrap_or_default()
}

/// Production weight of `t` on `p`, zero when there is no arc.
pub fn post_weight(net: &Net, t: TransitionId, p: PlaceId) -> BigUint {
    net.transition(t).post_weight(p).cloned().unwrap_or_default()
}
