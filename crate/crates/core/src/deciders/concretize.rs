//! Turning an abstract covering run into a concrete one.
//!
//! Every pumped firing is repeated often enough to meet the demand of the
//! rest of the run. Demands are computed right to left: the target asks for
//! a number of tokens on each place that is ω at the end, and each step
//! translates what it must deliver into what it must be given.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

use crate::net::{Marking, Net, TransitionId};
use crate::semantics::{is_pumpable, post_weight, pre_weight, replay, FiringMode, ReplayError};

/// Longest concrete run this module will spell out.
const MAX_CONCRETE_LEN: usize = 10_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConcretizeError {
    #[error("abstract run does not replay: {0}")]
    AbstractReplay(ReplayError),
    #[error("abstract run does not reach a marking covering the target")]
    NotACoveringWitness,
    #[error("concrete run would have {0} steps")]
    TooLong(BigUint),
    #[error("concrete run failed verification")]
    Unverified,
}

fn sub_or_zero(a: &BigUint, b: &BigUint) -> BigUint {
    if a > b {
        a - b
    } else {
        BigUint::zero()
    }
}

fn ceil_div(a: &BigUint, b: &BigUint) -> BigUint {
    (a + b - BigUint::one()) / b
}

/// Expands `seq`, a run from `initial` under [`FiringMode::Saturating`]
/// whose last marking covers `target`, into a concrete run that covers
/// `target`. Runs without pumped firings come back unchanged.
pub fn concretize_cover_witness(
    net: &Net,
    initial: &Marking,
    seq: &[TransitionId],
    target: &Marking,
) -> Result<Vec<TransitionId>, ConcretizeError> {
    let trace =
        replay(net, initial, seq, FiringMode::Saturating).map_err(ConcretizeError::AbstractReplay)?;
    if !trace.final_marking().covers(target) {
        return Err(ConcretizeError::NotACoveringWitness);
    }
    let abs: Vec<&Marking> = trace.markings().collect();
    let n = seq.len();

    // need[p]: tokens the concrete marking must hold on an ω place of abs[i]
    let mut need: Vec<BigUint> = net
        .places()
        .map(|p| {
            if abs[n][p].is_omega() {
                target.count(p).cloned().unwrap_or_default()
            } else {
                BigUint::zero()
            }
        })
        .collect();
    let mut reps = vec![BigUint::one(); n];
    for i in (1..=n).rev() {
        let t = seq[i - 1];
        let (prev, cur) = (abs[i - 1], abs[i]);
        let tr = net.transition(t);
        let mut r = BigUint::one();
        if is_pumpable(net, prev, t) {
            for (p, w) in tr.post() {
                if let Some(have) = prev.count(*p) {
                    if cur[*p].is_omega() {
                        r = r.max(ceil_div(&sub_or_zero(&need[p.0], have), w));
                    }
                }
            }
        }
        let mut earlier = vec![BigUint::zero(); need.len()];
        for p in net.places() {
            if !prev[p].is_omega() {
                continue;
            }
            let pre = pre_weight(net, t, p);
            if tr.resets_place(p) {
                earlier[p.0] = pre;
                continue;
            }
            let post = post_weight(net, t, p);
            let r_minus_one = &r - BigUint::one();
            // enabled on each of the r firings
            let enable = if pre > post {
                &pre + &r_minus_one * (&pre - &post)
            } else {
                pre.clone()
            };
            // and left with enough afterwards
            let after = if post >= pre {
                sub_or_zero(&need[p.0], &(&r * (&post - &pre)))
            } else {
                &need[p.0] + &r * (&pre - &post)
            };
            earlier[p.0] = enable.max(after);
        }
        need = earlier;
        reps[i - 1] = r;
    }

    let total: BigUint = reps.iter().sum();
    let len = total
        .to_usize()
        .filter(|&l| l <= MAX_CONCRETE_LEN)
        .ok_or_else(|| ConcretizeError::TooLong(total.clone()))?;
    let mut out = Vec::with_capacity(len);
    for (t, r) in seq.iter().zip(&reps) {
        let r = r.to_usize().expect("bounded by total");
        out.extend(std::iter::repeat_n(*t, r));
    }
    let concrete = replay(net, initial, &out, FiringMode::Concrete).map_err(|_| ConcretizeError::Unverified)?;
    if !concrete.final_marking().covers(target) {
        return Err(ConcretizeError::Unverified);
    }
    Ok(out)
}
