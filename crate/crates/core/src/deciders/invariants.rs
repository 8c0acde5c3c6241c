//! Place weightings that no firing can increase.
//!
//! A vector `y ≥ 0` with `y·(post(t) − pre(t)) ≤ 0` for every transition
//! never grows along a run: consumption and production are accounted for
//! and resets only remove tokens. A marking `m` with `y·m < y·target`
//! therefore cannot lead to a marking covering the target.
//!
//! The extreme rays of the cone of such vectors are computed with the
//! double description method, one transition constraint at a time.
//! Adjacency is decided combinatorially from the sets of tight
//! constraints.

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{Signed, Zero};

use crate::net::{Marking, Net, Tokens};

/// Rays kept at any point before the computation is abandoned.
pub(crate) const MAX_RAYS: usize = 4_000;

#[derive(Debug, Clone)]
struct Ray {
    y: Vec<BigInt>,
    /// Tight constraints: places `p` with `y[p] = 0`, then processed
    /// transitions with `y·c_t = 0`.
    tight: Vec<bool>,
}

fn normalize(y: &mut [BigInt]) {
    let g = y.iter().fold(BigInt::zero(), |g, x| g.gcd(x));
    if !g.is_zero() && g != BigInt::from(1) {
        for x in y.iter_mut() {
            *x /= &g;
        }
    }
}

/// Extreme rays of `{y ≥ 0 : y·(post(t) − pre(t)) ≤ 0 for all t}`, or
/// `None` if more than `limit` intermediate rays arise.
pub fn sub_invariants(net: &Net, limit: usize) -> Option<Vec<Vec<BigUint>>> {
    let n = net.place_count();
    let constraints = n + net.transition_count();
    let mut rays: Vec<Ray> = (0..n)
        .map(|p| {
            let mut y = vec![BigInt::zero(); n];
            y[p] = BigInt::from(1);
            let mut tight = vec![false; constraints];
            for (q, slot) in tight.iter_mut().enumerate().take(n) {
                *slot = q != p;
            }
            Ray { y, tight }
        })
        .collect();

    for (ti, t) in net.transitions().iter().enumerate() {
        let mut effect = vec![BigInt::zero(); n];
        for (p, w) in t.post() {
            effect[p.0] += BigInt::from(w.clone());
        }
        for (p, w) in t.pre() {
            effect[p.0] -= BigInt::from(w.clone());
        }
        let value = |r: &Ray| -> BigInt { r.y.iter().zip(&effect).map(|(a, b)| a * b).sum() };
        let values: Vec<BigInt> = rays.iter().map(value).collect();
        let row = n + ti;

        let mut next = Vec::new();
        let (mut pos, mut neg) = (Vec::new(), Vec::new());
        for (i, v) in values.iter().enumerate() {
            match v.sign() {
                Sign::Plus => pos.push(i),
                Sign::Minus => neg.push(i),
                Sign::NoSign => {}
            }
            if v.sign() != Sign::Plus {
                let mut r = rays[i].clone();
                r.tight[row] = v.is_zero();
                next.push(r);
            }
        }
        for &i in &pos {
            for &j in &neg {
                let common: Vec<bool> = rays[i].tight.iter().zip(&rays[j].tight).map(|(a, b)| *a && *b).collect();
                let adjacent = !rays.iter().enumerate().any(|(k, r)| {
                    k != i && k != j && common.iter().zip(&r.tight).all(|(c, t)| !*c || *t)
                });
                if !adjacent {
                    continue;
                }
                let mut y: Vec<BigInt> = rays[i]
                    .y
                    .iter()
                    .zip(&rays[j].y)
                    .map(|(a, b)| a * values[j].abs() + b * &values[i])
                    .collect();
                normalize(&mut y);
                let mut tight = common;
                tight[row] = true;
                for (p, slot) in tight.iter_mut().enumerate().take(n) {
                    *slot = y[p].is_zero();
                }
                next.push(Ray { y, tight });
            }
        }
        if next.len() > limit {
            return None;
        }
        rays = next;
    }
    Some(
        rays.into_iter()
            .map(|r| r.y.into_iter().map(|x| x.to_biguint().expect("rays are non-negative")).collect())
            .collect(),
    )
}

/// The sub-invariants that can rule out covering `target`.
#[derive(Debug, Clone, Default)]
pub(crate) struct CoverPruner {
    /// Pairs `(y, y·target)` with `y·target > 0`.
    rays: Vec<(Vec<BigUint>, BigUint)>,
}

impl CoverPruner {
    pub fn new(net: &Net, target: &Marking) -> Self {
        let Some(rays) = sub_invariants(net, MAX_RAYS) else {
            return CoverPruner::default();
        };
        let rays = rays
            .into_iter()
            .filter_map(|y| {
                let goal = dot(&y, target)?;
                (!goal.is_zero()).then_some((y, goal))
            })
            .collect();
        CoverPruner { rays }
    }

    /// False if some ray proves that no marking covering the target is
    /// reachable from `m`.
    pub fn admits(&self, m: &Marking) -> bool {
        self.rays
            .iter()
            .all(|(y, goal)| dot(y, m).is_none_or(|v| &v >= goal))
    }
}

/// `y·m`, or `None` when `m` has ω on a place with positive weight.
fn dot(y: &[BigUint], m: &Marking) -> Option<BigUint> {
    let mut total = BigUint::zero();
    for (w, (_, tokens)) in y.iter().zip(m.iter()) {
        if w.is_zero() {
            continue;
        }
        match tokens {
            Tokens::Finite(c) => total += w * c,
            Tokens::Omega => return None,
        }
    }
    Some(total)
}
