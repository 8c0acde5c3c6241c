//! Building a run of a compiled QBF net that reaches the target exactly.
//!
//! Block `j` first sets `y_j` false, picks `x_j`, and finishes every later
//! block; then it sets `y_j` true and does the same again. Each leaf loads
//! one literal per variable and fires `s` once, so `s` fires `2^k` times.
//! `x_j` is set false whenever that keeps the rest of the formula true.

use thiserror::Error;

use super::qbf_net::CompiledQbfNet;
use super::roles::TransitionRole;
use crate::net::TransitionId;
use crate::qbf::{eval_partial, normalize_qbf, Literal, Qbf, QbfError, Var};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SynthError {
    #[error("the formula is false, so the target cannot be covered")]
    QbfFalse,
    #[error("compiled net has {net} blocks but the formula has {formula}")]
    BlockMismatch { net: usize, formula: usize },
    #[error(transparent)]
    Qbf(#[from] QbfError),
}

/// A run from the initial marking of `c` to exactly its target marking.
pub fn synthesize_cover_run(c: &CompiledQbfNet, q: &Qbf) -> Result<Vec<TransitionId>, SynthError> {
    let q = normalize_qbf(q);
    if q.k() != c.k {
        return Err(SynthError::BlockMismatch {
            net: c.k,
            formula: q.k(),
        });
    }
    if !eval_partial(&q, &[])? {
        return Err(SynthError::QbfFalse);
    }
    let mut run = Vec::new();
    let mut assignment = Vec::with_capacity(q.var_count());
    block(c, &q, 1, &mut assignment, &mut run)?;
    Ok(run)
}

fn block(
    c: &CompiledQbfNet,
    q: &Qbf,
    j: usize,
    assignment: &mut Vec<bool>,
    run: &mut Vec<TransitionId>,
) -> Result<(), QbfError> {
    if j > c.k {
        for (pos, &value) in assignment.iter().enumerate() {
            let lit = Literal {
                var: Var::from_position(pos),
                positive: value,
            };
            run.push(c.transition(TransitionRole::Loading(lit)));
        }
        run.push(c.transition(TransitionRole::Satisfaction));
        return Ok(());
    }
    for y in [false, true] {
        run.push(c.transition(if y {
            TransitionRole::UniversalTrue(j)
        } else {
            TransitionRole::UniversalFalse(j)
        }));
        assignment.push(y);
        assignment.push(false);
        let x = !eval_partial(q, assignment)?;
        *assignment.last_mut().expect("just pushed") = x;
        run.push(c.transition(if x {
            TransitionRole::ExistentialTrue(j)
        } else {
            TransitionRole::ExistentialFalse(j)
        }));
        block(c, q, j + 1, assignment, run)?;
        assignment.truncate(assignment.len() - 2);
    }
    Ok(())
}
