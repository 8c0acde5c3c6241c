//! Balance functions on markings of a compiled QBF net.
//!
//! For block `i`:
//!
//! ```text
//! g_i  = f + b̄_i + b_i + d_{y_i} + Σ_{j<i} 2^{k−j}(2h_j + w_j + v_j) + 2^{k−i}(2h_i + w_i)
//! g'_i = f + ā_i + a_i + d_{x_i} + Σ_{j≤i} 2^{k−j}(2h_j + w_j + v_j)
//! ```
//!
//! A marking is good when every `g_i` and `g'_i` equals `2^k`. Good
//! markings are exactly those where no gadget token was lost to a reset.

use std::fmt;

use num_bigint::BigUint;
use thiserror::Error;

use super::qbf_net::CompiledQbfNet;
use super::roles::PlaceRole;
use crate::net::Marking;
use crate::qbf::{Literal, Var};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GoodnessError {
    #[error("marking has {found} entries but the net has {expected} places")]
    SizeMismatch { expected: usize, found: usize },
    #[error("marking contains ω")]
    Omega,
}

/// A partial truth value read off the literal places.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Val {
    False,
    True,
    Unset,
}

impl fmt::Display for Val {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Val::False => "0",
            Val::True => "1",
            Val::Unset => "?",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GoodnessReport {
    /// `g_1, ..., g_k`.
    pub g: Vec<BigUint>,
    /// `g'_1, ..., g'_k`.
    pub g_prime: Vec<BigUint>,
    pub is_good: bool,
    /// `(β_1, α_1, ..., β_k, α_k)`.
    pub val: Vec<Val>,
}

impl fmt::Display for GoodnessReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |v: &[BigUint]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ");
        writeln!(f, "good: {}", self.is_good)?;
        writeln!(f, "g: {}", join(&self.g))?;
        writeln!(f, "g': {}", join(&self.g_prime))?;
        let val: Vec<String> = self.val.iter().map(Val::to_string).collect();
        write!(f, "val: ({})", val.join(","))
    }
}

/// Evaluates the balance functions and the partial assignment on `m`.
pub fn goodness_report(c: &CompiledQbfNet, m: &Marking) -> Result<GoodnessReport, GoodnessError> {
    if m.len() != c.net.place_count() {
        return Err(GoodnessError::SizeMismatch {
            expected: c.net.place_count(),
            found: m.len(),
        });
    }
    if !m.is_finite() {
        return Err(GoodnessError::Omega);
    }
    let at = |role: PlaceRole| m.count(c.place(role)).cloned().unwrap_or_default();
    let lit = |var, positive| at(PlaceRole::Literal(Literal { var, positive }));
    let k = c.k;
    let scale = |i: usize| BigUint::from(1u32) << (k - i);
    let f = at(PlaceRole::Final);
    let control = |j: usize| {
        BigUint::from(2u32) * at(PlaceRole::Holding(j)) + at(PlaceRole::Waiting(j)) + at(PlaceRole::Decision(j))
    };

    let mut g = Vec::with_capacity(k);
    let mut g_prime = Vec::with_capacity(k);
    let mut val = Vec::with_capacity(2 * k);
    let mut prefix = BigUint::default(); // Σ_{j<i} 2^{k−j}(2h_j + w_j + v_j)
    for i in 1..=k {
        let own = BigUint::from(2u32) * at(PlaceRole::Holding(i)) + at(PlaceRole::Waiting(i));
        g.push(
            &f + lit(Var::Y(i), false)
                + lit(Var::Y(i), true)
                + at(PlaceRole::Dummy(Var::Y(i)))
                + &prefix
                + scale(i) * own,
        );
        prefix += scale(i) * control(i);
        g_prime.push(
            &f + lit(Var::X(i), false) + lit(Var::X(i), true) + at(PlaceRole::Dummy(Var::X(i))) + &prefix,
        );
        for var in [Var::Y(i), Var::X(i)] {
            val.push(if lit(var, false) > BigUint::default() {
                Val::False
            } else if lit(var, true) > BigUint::default() {
                Val::True
            } else {
                Val::Unset
            });
        }
    }
    let full = c.assignments();
    let is_good = g.iter().chain(&g_prime).all(|x| *x == full);
    Ok(GoodnessReport {
        g,
        g_prime,
        is_good,
        val,
    })
}
