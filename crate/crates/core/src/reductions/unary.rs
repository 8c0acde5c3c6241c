//! Replacing binary arc weights by chains of unary ones.
//!
//! Every transition `t` keeps its name as a *key* transition whose arcs
//! have weight one. An input arc `p --w--> t` with `w ≥ 2` gets a halving
//! chain `p → t#in-p#1 → ... → t#in-p#L` where each step
//! `t#halve-p#j` turns two tokens of level `j−1` into one of level `j`;
//! the key takes one token from every level `j` whose bit is set in `w`
//! (level 0 is `p` itself). Output arcs get doubling chains built the same
//! way in reverse. Chains grow with the bit length of the weight.
//!
//! Tokens parked in a chain still belong to its source or destination
//! place. So when the key of `u` resets a place `p`, it also resets every
//! chain level attached to `p`. The result only weakly simulates the
//! source net: stranded chain tokens are lost, so coverability is
//! preserved but reachability is not.

use num_bigint::BigUint;
use thiserror::Error;

use super::roles::{PlaceRole, RoleBuilder, RoleMap, TransitionRole};
use crate::net::{Instance, Marking, NetError, Objective, PlaceId, Tokens, TransitionId};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum UnaryError {
    #[error("binary-to-unary only preserves coverability; the instance asks for {0}")]
    NotCover(Objective),
    #[error("only nets with resets are supported")]
    ZeroTestNet,
    #[error(transparent)]
    Net(#[from] NetError),
}

/// One chain: the levels `1..=L` of an arc of weight `w`.
#[derive(Debug, Clone, PartialEq, Eq)]
struct Chain {
    place: PlaceId,
    weight: BigUint,
    /// Chain places for levels `1..=L`.
    levels: Vec<PlaceId>,
    /// Halving or doubling transitions for levels `1..=L`.
    steps: Vec<TransitionId>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnaryReduction {
    pub instance: Instance,
    pub roles: RoleMap,
    /// `keys[t]` is the key transition simulating source transition `t`.
    pub keys: Vec<TransitionId>,
    inputs: Vec<Vec<Chain>>,
    outputs: Vec<Vec<Chain>>,
}

fn bit(w: &BigUint, j: usize) -> bool {
    w.bit(j as u64)
}

fn levels(w: &BigUint) -> usize {
    (w.bits() as usize).saturating_sub(1)
}

impl UnaryReduction {
    /// Number of places and transitions added by the chains.
    pub fn gadget_size(&self) -> usize {
        self.inputs
            .iter()
            .chain(&self.outputs)
            .flatten()
            .map(|c| c.levels.len() + c.steps.len())
            .sum()
    }

    /// Maps a run of the unary net to the source net by keeping key
    /// firings only.
    pub fn project_run(&self, run: &[TransitionId]) -> Vec<TransitionId> {
        run.iter()
            .filter_map(|t| match self.roles.transition_role(*t) {
                TransitionRole::Key(orig) => Some(orig),
                _ => None,
            })
            .collect()
    }

    /// Maps a source run to the unary net: each firing becomes its
    /// halvings, the key, then its doublings.
    pub fn lift_run(&self, run: &[TransitionId]) -> Vec<TransitionId> {
        let mut out = Vec::new();
        for &t in run {
            for c in &self.inputs[t.0] {
                // h_j = bit_j(w) + 2·h_{j+1}, fired bottom-up
                let l = c.levels.len();
                let mut counts = vec![0usize; l + 2];
                for j in (1..=l).rev() {
                    counts[j] = bit(&c.weight, j) as usize + 2 * counts[j + 1];
                }
                for j in 1..=l {
                    out.extend(std::iter::repeat_n(c.steps[j - 1], counts[j]));
                }
            }
            out.push(self.keys[t.0]);
            for c in &self.outputs[t.0] {
                let l = c.levels.len();
                let mut counts = vec![0usize; l + 2];
                for j in (1..=l).rev() {
                    counts[j] = bit(&c.weight, j) as usize + 2 * counts[j + 1];
                }
                for j in (1..=l).rev() {
                    out.extend(std::iter::repeat_n(c.steps[j - 1], counts[j]));
                }
            }
        }
        out
    }
}

/// Builds the unary-weight instance. Only coverability instances over nets
/// with resets are accepted.
pub fn binary_to_unary(inst: &Instance) -> Result<UnaryReduction, UnaryError> {
    if inst.objective != Objective::Cover {
        return Err(UnaryError::NotCover(inst.objective));
    }
    let src = inst.net.as_reset().ok_or(UnaryError::ZeroTestNet)?;
    let mut b = RoleBuilder::default();
    for p in src.places() {
        b.place(src.place_name(p), PlaceRole::Original(p))?;
    }

    let mut keys = Vec::with_capacity(src.transition_count());
    let mut inputs = Vec::with_capacity(src.transition_count());
    let mut outputs = Vec::with_capacity(src.transition_count());
    for t in src.transition_ids() {
        let tr = src.transition(t);
        let name = tr.name();
        let mut ins = Vec::new();
        for (p, w) in tr.pre() {
            let pname = src.place_name(*p);
            let mut chain = Chain {
                place: *p,
                weight: w.clone(),
                levels: Vec::new(),
                steps: Vec::new(),
            };
            for j in 1..=levels(w) {
                let level = j as u32;
                chain.levels.push(b.place(
                    format!("{name}#in-{pname}#{j}"),
                    PlaceRole::HalvingLevel {
                        transition: t,
                        place: *p,
                        level,
                    },
                )?);
                chain.steps.push(b.transition(
                    format!("{name}#halve-{pname}#{j}"),
                    TransitionRole::Halve {
                        transition: t,
                        place: *p,
                        level,
                    },
                )?);
            }
            ins.push(chain);
        }
        let key = b.transition(name, TransitionRole::Key(t))?;
        let mut outs = Vec::new();
        for (q, w) in tr.post() {
            let qname = src.place_name(*q);
            let mut chain = Chain {
                place: *q,
                weight: w.clone(),
                levels: Vec::new(),
                steps: Vec::new(),
            };
            for j in 1..=levels(w) {
                let level = j as u32;
                chain.levels.push(b.place(
                    format!("{name}#out-{qname}#{j}"),
                    PlaceRole::DoublingLevel {
                        transition: t,
                        place: *q,
                        level,
                    },
                )?);
                chain.steps.push(b.transition(
                    format!("{name}#double-{qname}#{j}"),
                    TransitionRole::Double {
                        transition: t,
                        place: *q,
                        level,
                    },
                )?);
            }
            outs.push(chain);
        }
        keys.push(key);
        inputs.push(ins);
        outputs.push(outs);
    }

    let level = |c: &Chain, j: usize| if j == 0 { c.place } else { c.levels[j - 1] };
    for t in src.transition_ids() {
        let key = keys[t.0];
        for c in &inputs[t.0] {
            for j in 1..=c.levels.len() {
                b.net.consume(c.steps[j - 1], level(c, j - 1), 2u32)?;
                b.net.produce(c.steps[j - 1], level(c, j), 1u32)?;
            }
            for j in 0..=c.levels.len() {
                if bit(&c.weight, j) {
                    b.net.consume(key, level(c, j), 1u32)?;
                }
            }
        }
        for c in &outputs[t.0] {
            for j in 1..=c.levels.len() {
                b.net.consume(c.steps[j - 1], level(c, j), 1u32)?;
                b.net.produce(c.steps[j - 1], level(c, j - 1), 2u32)?;
            }
            for j in 0..=c.levels.len() {
                if bit(&c.weight, j) {
                    b.net.produce(key, level(c, j), 1u32)?;
                }
            }
        }
        for &p in src.transition(t).resets() {
            b.net.reset(key, p)?;
            for c in inputs.iter().chain(&outputs).flatten() {
                if c.place == p {
                    for &l in &c.levels {
                        b.net.reset(key, l)?;
                    }
                }
            }
        }
    }

    let (net, roles) = b.finish();
    let extend = |m: &Marking| {
        let mut entries = m.entries().to_vec();
        entries.resize(net.place_count(), Tokens::zero());
        Marking::new(entries)
    };
    let instance = Instance::new(net.clone(), extend(&inst.initial), extend(&inst.target), Objective::Cover)
        .expect("extended markings fit the net");
    Ok(UnaryReduction {
        instance,
        roles,
        keys,
        inputs,
        outputs,
    })
}
