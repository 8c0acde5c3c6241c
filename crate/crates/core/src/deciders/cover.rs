//! Coverability in acyclic Petri nets with resets via ω-abstraction.
//!
//! Markings are explored under [`fire_saturating`]. A transition that only
//! consumes from ω places and resets none of its inputs can be repeated at
//! will, so one firing sends every place it produces into (and does not
//! reset) to ω.
//!
//! When every transition that may ever become generating is disjoint from
//! its own resets (see [`is_pump_safe`]) the abstract state space is finite
//! and bounded by [`cover_norm_bound`], and a plain search is exhaustive.
//! Otherwise a transition can refill a place it resets, or drain its own
//! input, and the finite part of abstract markings may grow without bound.
//! For those nets the search first runs with an acceleration step (a place
//! that strictly grew along a path that never resets it becomes ω). That
//! over-approximation settles negative answers; positive ones are confirmed
//! by a second, unaccelerated search that produces the witness.

use std::collections::{HashSet, VecDeque};

use num_bigint::BigUint;
use num_traits::{One, Pow};

use super::invariants::CoverPruner;
use super::{bfs, verdict, Answer, DeciderError, Limits, SearchObserver, SearchStats, Verdict};
use crate::net::{Instance, Marking, Net, Objective, PlaceId, Tokens, TransitionId};
use crate::semantics::{fire_saturating, FiringMode};
use crate::structure::{validate_structure, ClaimedKind};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverOptions {
    /// Cap on stored markings per search phase; hitting it yields
    /// [`Answer::Exhausted`].
    pub max_states: Option<usize>,
}

impl Default for CoverOptions {
    fn default() -> Self {
        CoverOptions {
            max_states: Some(1_000_000),
        }
    }
}

/// Transitions that can become generating from some ω-free start: the
/// least set closed under "every pre place is produced by a member".
fn potential_generators(net: &Net) -> Vec<bool> {
    let mut gen = vec![false; net.transition_count()];
    let mut omega = vec![false; net.place_count()];
    let mut changed = true;
    while changed {
        changed = false;
        for (i, t) in net.transitions().iter().enumerate() {
            if !gen[i] && t.pre().iter().all(|(p, _)| omega[p.0]) {
                gen[i] = true;
                changed = true;
                for (p, _) in t.post() {
                    omega[p.0] = true;
                }
            }
        }
    }
    gen
}

/// True iff `t` resets none of the places it consumes from or produces to.
pub fn is_reset_disjoint(net: &Net, t: TransitionId) -> bool {
    let tr = net.transition(t);
    tr.pre()
        .iter()
        .chain(tr.post())
        .all(|(p, _)| !tr.resets_place(*p))
}

/// True iff every transition that can become generating is reset-disjoint.
/// On such nets the literal and the saturating abstraction coincide, and the
/// abstract state space is finite.
pub fn is_pump_safe(net: &Net) -> bool {
    potential_generators(net)
        .iter()
        .enumerate()
        .all(|(i, &g)| !g || is_reset_disjoint(net, TransitionId(i)))
}

fn max_production(net: &Net) -> BigUint {
    let k = net.max_production();
    if k < BigUint::one() {
        BigUint::one()
    } else {
        k
    }
}

/// `‖initial‖ · k^|P|` with `k` the largest single-firing production
/// (at least 1).
pub fn cover_norm_bound(inst: &Instance) -> BigUint {
    let net = inst.net.arcs();
    inst.initial.norm() * Pow::pow(max_production(net), net.place_count() as u64)
}

/// `Σ k^(n−i+1) · m[p_i]` over finite entries, places listed in
/// topological order `p_1, ..., p_n`.
pub fn weight(net: &Net, place_order: &[PlaceId], m: &Marking) -> BigUint {
    let k = max_production(net);
    let n = place_order.len();
    let mut total = BigUint::default();
    for (i, p) in place_order.iter().enumerate() {
        if let Some(c) = m.count(*p) {
            total += Pow::pow(k.clone(), (n - i) as u64) * c;
        }
    }
    total
}

fn check(inst: &Instance) -> Result<&Net, DeciderError> {
    if inst.objective != Objective::Cover {
        return Err(DeciderError::WrongObjective {
            expected: Objective::Cover,
            found: inst.objective,
        });
    }
    let net = inst.net.as_reset().ok_or(DeciderError::WrongNetKind)?;
    let report = validate_structure(net, &ClaimedKind::Acyclic).expect("no names to resolve");
    if !report.acyclic {
        return Err(DeciderError::NotAcyclic);
    }
    Ok(net)
}

/// Decides whether some marking covering `inst.target` is reachable. The
/// witness replays under [`FiringMode::Saturating`]; use
/// [`super::concretize_cover_witness`] for a concrete run.
pub fn decide_cover_rapn(inst: &Instance) -> Result<Verdict, DeciderError> {
    decide_cover_rapn_with(inst, &CoverOptions::default(), &mut ())
}

pub fn decide_cover_rapn_with(
    inst: &Instance,
    options: &CoverOptions,
    observer: &mut dyn SearchObserver,
) -> Result<Verdict, DeciderError> {
    let net = check(inst)?;
    let bound = cover_norm_bound(inst);
    let limits = Limits {
        max_states: options.max_states,
        ..Limits::default()
    };
    let pruner = CoverPruner::new(net, &inst.target);
    let plain = |observer: &mut dyn SearchObserver| {
        bfs(
            &inst.initial,
            net.transition_count(),
            |m, t| fire_saturating(net, m, t).ok().filter(|x| pruner.admits(x)),
            |m| m.covers(&inst.target),
            &limits,
            observer,
        )
    };
    if is_pump_safe(net) {
        return Ok(verdict(plain(observer), FiringMode::Saturating, Some(bound)));
    }
    let (accelerated, stats) = accelerated_search(net, inst, &pruner, options.max_states);
    match accelerated {
        Answer::No | Answer::Exhausted => Ok(Verdict {
            answer: accelerated,
            witness: None,
            witness_mode: FiringMode::Saturating,
            stats: SearchStats {
                bound: Some(bound),
                ..stats
            },
        }),
        Answer::Yes => {
            let mut v = verdict(plain(observer), FiringMode::Saturating, Some(bound));
            v.stats.states += stats.states;
            v.stats.peak_norm = v.stats.peak_norm.max(stats.peak_norm);
            Ok(v)
        }
    }
}

/// Breadth-first search with acceleration against every ancestor on the
/// tree path. Over-approximates the covering markings.
fn accelerated_search(
    net: &Net,
    inst: &Instance,
    pruner: &CoverPruner,
    max_states: Option<usize>,
) -> (Answer, SearchStats) {
    let mut nodes: Vec<(Marking, Option<(usize, TransitionId)>)> = vec![(inst.initial.clone(), None)];
    let mut seen: HashSet<Marking> = HashSet::from([inst.initial.clone()]);
    let mut stats = SearchStats {
        states: 1,
        peak_norm: inst.initial.norm(),
        bound: None,
    };
    if inst.initial.covers(&inst.target) {
        return (Answer::Yes, stats);
    }
    let mut queue = VecDeque::from([0usize]);
    let places = net.place_count();
    while let Some(v) = queue.pop_front() {
        let cur = nodes[v].0.clone();
        for ti in 0..net.transition_count() {
            let t = TransitionId(ti);
            let Ok(mut next) = fire_saturating(net, &cur, t) else {
                continue;
            };
            let mut reset = vec![false; places];
            let mark_resets = |t: TransitionId, reset: &mut [bool]| {
                for p in net.transition(t).resets() {
                    reset[p.0] = true;
                }
            };
            mark_resets(t, &mut reset);
            let mut y = v;
            loop {
                let anc = &nodes[y].0;
                if next != *anc && next.covers(anc) {
                    for p in net.places() {
                        if !reset[p.0] && next[p] > anc[p] {
                            next.set(p, Tokens::Omega);
                        }
                    }
                }
                match nodes[y].1 {
                    Some((u, ty)) => {
                        mark_resets(ty, &mut reset);
                        y = u;
                    }
                    None => break,
                }
            }
            if seen.contains(&next) || !pruner.admits(&next) {
                continue;
            }
            if max_states.is_some_and(|m| nodes.len() >= m) {
                stats.states = nodes.len();
                return (Answer::Exhausted, stats);
            }
            let norm = next.norm();
            if norm > stats.peak_norm {
                stats.peak_norm = norm;
            }
            let hit = next.covers(&inst.target);
            seen.insert(next.clone());
            nodes.push((next, Some((v, t))));
            if hit {
                stats.states = nodes.len();
                return (Answer::Yes, stats);
            }
            queue.push_back(nodes.len() - 1);
        }
    }
    stats.states = nodes.len();
    (Answer::No, stats)
}
