//! Compiling a QBF into an acyclic workflow net with resets whose
//! coverability instance holds exactly when the formula is true.
//!
//! Each block `i` gets a universal gadget (`h_i`, `w_i`, `b̄_i`, `b_i`,
//! `d_{y_i}`) and an existential gadget (`v_i`, `ā_i`, `a_i`, `d_{x_i}`).
//! Control transitions walk through all `2^k` universal choices; loading
//! transitions move literal tokens into clause places and `s` counts each
//! satisfying assignment in `f`. Target: `2^k` tokens in `f`.

use num_bigint::BigUint;
use thiserror::Error;

use super::roles::{PlaceRole, RoleBuilder, RoleMap, TransitionRole};
use crate::net::{Instance, Marking, Net, NetError, Node, Objective, PlaceId, Tokens, TransitionId};
use crate::qbf::{normalize_qbf, Clause, Literal, Qbf, Var};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CompileError {
    #[error("formula has no quantifier blocks")]
    NoBlocks,
    #[error("net is not a compiled QBF net: {0}")]
    NotCompiled(String),
    #[error(transparent)]
    Net(#[from] NetError),
}

/// A compiled net together with the role of each node and the linear
/// order witnessing acyclicity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompiledQbfNet {
    pub net: Net,
    pub roles: RoleMap,
    /// Number of `∀∃` blocks.
    pub k: usize,
    /// Number of real (non-dummy) clauses.
    pub m: usize,
    /// Every place and transition, earliest first. Resets of control
    /// transitions are defined relative to this order.
    pub order: Vec<Node>,
    /// The normalized formula the net encodes.
    pub qbf: Qbf,
}

impl CompiledQbfNet {
    pub fn place(&self, role: PlaceRole) -> PlaceId {
        self.roles
            .place(role)
            .unwrap_or_else(|| panic!("compiled net has no place with role {role}"))
    }

    pub fn transition(&self, role: TransitionRole) -> TransitionId {
        self.roles
            .transition(role)
            .unwrap_or_else(|| panic!("compiled net has no transition with role {role}"))
    }

    /// `2^k`.
    pub fn assignments(&self) -> BigUint {
        BigUint::from(1u32) << self.k
    }

    pub fn initial_marking(&self) -> Marking {
        let mut m = self.net.zero_marking();
        m.set(self.place(PlaceRole::Holding(1)), Tokens::from(1));
        m
    }

    pub fn target_marking(&self) -> Marking {
        let mut m = self.net.zero_marking();
        m.set(self.place(PlaceRole::Final), Tokens::Finite(self.assignments()));
        m
    }

    pub fn instance(&self) -> Instance {
        Instance::new(
            self.net.clone(),
            self.initial_marking(),
            self.target_marking(),
            Objective::Cover,
        )
        .expect("compiled markings fit the net")
    }

    /// Recovers the roles of a net produced by [`compile_qbf_to_rawn`],
    /// e.g. after a round trip through a file. The formula is read back
    /// from the loading transitions and the net must equal its
    /// recompilation.
    pub fn from_net(net: &Net) -> Result<Self, CompileError> {
        let missing = |what: String| CompileError::NotCompiled(format!("missing {what}"));
        let mut k = 0;
        while net.place_id(&format!("h{}", k + 1)).is_some() {
            k += 1;
        }
        if k == 0 {
            return Err(missing("place h1".into()));
        }
        let mut m = 0;
        while net.place_id(&format!("c{}", m + 1)).is_some() {
            m += 1;
        }
        let mut real: Vec<Vec<Literal>> = vec![Vec::new(); m];
        for i in 1..=k {
            for var in [Var::Y(i), Var::X(i)] {
                for positive in [false, true] {
                    let lit = Literal { var, positive };
                    let name = loading_name(lit);
                    let t = net.transition_id(&name).ok_or_else(|| missing(name))?;
                    for (p, _) in net.transition(t).post() {
                        if let Some(j) = net.place_name(*p).strip_prefix('c').and_then(|j| j.parse::<usize>().ok()) {
                            if (1..=m).contains(&j) {
                                real[j - 1].push(lit);
                            }
                        }
                    }
                }
            }
        }
        let mut clauses = Vec::with_capacity(m);
        for (j, lits) in real.into_iter().enumerate() {
            clauses.push(
                Clause::new(lits)
                    .ok_or_else(|| CompileError::NotCompiled(format!("clause place c{} is never loaded", j + 1)))?,
            );
        }
        let q = Qbf::new(k, clauses).expect("literals come from blocks 1..=k");
        let (compiled, _) = compile_qbf_to_rawn(&q)?;
        if compiled.net != *net {
            return Err(CompileError::NotCompiled(
                "net differs from the recompiled formula".into(),
            ));
        }
        Ok(compiled)
    }
}

fn literal_name(lit: Literal) -> String {
    let base = match lit.var {
        Var::Y(i) => format!("b{i}"),
        Var::X(i) => format!("a{i}"),
    };
    if lit.positive {
        base
    } else {
        base + "bar"
    }
}

fn loading_name(lit: Literal) -> String {
    format!("l_{}{}", lit.var, if lit.positive { "" } else { "bar" })
}

fn dummy_name(var: Var) -> String {
    match var {
        Var::Y(i) => format!("dy{i}"),
        Var::X(i) => format!("dx{i}"),
    }
}

fn is_dummy(c: &Clause, k: usize) -> bool {
    (1..=k).any(|i| *c == Clause::tautology(Var::Y(i)) || *c == Clause::tautology(Var::X(i)))
}

/// Builds the net and its coverability instance: one token in `h_1`,
/// target `2^k` tokens in `f`. The formula is normalized first; clauses
/// equal to a block tautology share that block's dummy place.
pub fn compile_qbf_to_rawn(q: &Qbf) -> Result<(CompiledQbfNet, Instance), CompileError> {
    let q = normalize_qbf(q);
    let k = q.k();
    if k == 0 {
        return Err(CompileError::NoBlocks);
    }
    let real: Vec<&Clause> = q.clauses().iter().filter(|c| !is_dummy(c, k)).collect();
    let m = real.len();
    let mut b = RoleBuilder::default();
    let mut order = Vec::new();

    let lit = |var, positive| Literal { var, positive };
    macro_rules! place {
        ($name:expr, $role:expr) => {{
            let p = b.place($name, $role)?;
            order.push(Node::Place(p));
            p
        }};
    }
    macro_rules! transition {
        ($name:expr, $role:expr) => {{
            let t = b.transition($name, $role)?;
            order.push(Node::Transition(t));
            t
        }};
    }

    struct Block {
        h: PlaceId,
        w: PlaceId,
        v: PlaceId,
        bbar: PlaceId,
        b: PlaceId,
        abar: PlaceId,
        a: PlaceId,
        u_bot: TransitionId,
        u_top: TransitionId,
        e_bot: TransitionId,
        e_top: TransitionId,
    }
    let mut blocks = Vec::with_capacity(k);
    for i in 1..=k {
        let h = place!(format!("h{i}"), PlaceRole::Holding(i));
        let u_bot = transition!(format!("u{i}_bot"), TransitionRole::UniversalFalse(i));
        let w = place!(format!("w{i}"), PlaceRole::Waiting(i));
        let u_top = transition!(format!("u{i}_top"), TransitionRole::UniversalTrue(i));
        let bbar_l = lit(Var::Y(i), false);
        let bbar = place!(literal_name(bbar_l), PlaceRole::Literal(bbar_l));
        let b_l = lit(Var::Y(i), true);
        let bp = place!(literal_name(b_l), PlaceRole::Literal(b_l));
        let v = place!(format!("v{i}"), PlaceRole::Decision(i));
        let e_bot = transition!(format!("e{i}_bot"), TransitionRole::ExistentialFalse(i));
        let e_top = transition!(format!("e{i}_top"), TransitionRole::ExistentialTrue(i));
        let abar_l = lit(Var::X(i), false);
        let abar = place!(literal_name(abar_l), PlaceRole::Literal(abar_l));
        let a_l = lit(Var::X(i), true);
        let a = place!(literal_name(a_l), PlaceRole::Literal(a_l));
        blocks.push(Block {
            h,
            w,
            v,
            bbar,
            b: bp,
            abar,
            a,
            u_bot,
            u_top,
            e_bot,
            e_top,
        });
    }
    let mut loading = Vec::with_capacity(4 * k);
    for i in 1..=k {
        for var in [Var::Y(i), Var::X(i)] {
            for positive in [false, true] {
                let l = lit(var, positive);
                loading.push((l, transition!(loading_name(l), TransitionRole::Loading(l))));
            }
        }
    }
    // dummy places in the order d_{y_1}, d_{x_1}, d_{y_2}, ...
    let mut dummies = Vec::with_capacity(2 * k);
    for i in 1..=k {
        for var in [Var::Y(i), Var::X(i)] {
            dummies.push(place!(dummy_name(var), PlaceRole::Dummy(var)));
        }
    }
    let clause_places: Vec<PlaceId> = (1..=m)
        .map(|j| Ok(place!(format!("c{j}"), PlaceRole::Clause(j))))
        .collect::<Result<_, CompileError>>()?;
    let s = transition!("s", TransitionRole::Satisfaction);
    let f = place!("f", PlaceRole::Final);

    let rank: std::collections::HashMap<Node, usize> =
        order.iter().enumerate().map(|(r, n)| (*n, r)).collect();
    let gadget: Vec<PlaceId> = blocks
        .iter()
        .flat_map(|bl| [bl.h, bl.w, bl.bbar, bl.b, bl.v, bl.abar, bl.a])
        .chain(dummies.iter().copied())
        .collect();

    let one = BigUint::from(1u32);
    for (idx, bl) in blocks.iter().enumerate() {
        let i = idx + 1;
        let weight = BigUint::from(1u32) << (k - i);
        let net = &mut b.net;
        net.consume(bl.u_bot, bl.h, one.clone())?;
        net.produce(bl.u_bot, bl.w, one.clone())?;
        net.produce(bl.u_bot, bl.v, one.clone())?;
        net.produce(bl.u_bot, bl.bbar, weight.clone())?;
        net.consume(bl.u_top, bl.w, one.clone())?;
        net.produce(bl.u_top, bl.v, one.clone())?;
        net.produce(bl.u_top, bl.b, weight.clone())?;
        for (t, out) in [(bl.e_bot, bl.abar), (bl.e_top, bl.a)] {
            net.consume(t, bl.v, one.clone())?;
            net.produce(t, out, weight.clone())?;
            if let Some(next) = blocks.get(i) {
                net.produce(t, next.h, one.clone())?;
            }
        }
        for t in [bl.u_bot, bl.u_top, bl.e_bot, bl.e_top] {
            let tr = rank[&Node::Transition(t)];
            for &p in &gadget {
                if rank[&Node::Place(p)] > tr {
                    net.reset(t, p)?;
                }
            }
        }
    }
    for &(l, t) in &loading {
        let i = l.var.block() - 1;
        let bl = &blocks[i];
        let src = match (l.var, l.positive) {
            (Var::Y(_), false) => bl.bbar,
            (Var::Y(_), true) => bl.b,
            (Var::X(_), false) => bl.abar,
            (Var::X(_), true) => bl.a,
        };
        b.net.consume(t, src, one.clone())?;
        for (j, c) in real.iter().enumerate() {
            if c.contains(l) {
                b.net.produce(t, clause_places[j], one.clone())?;
            }
        }
        let own = l.var.position();
        b.net.produce(t, dummies[own], one.clone())?;
        for &d in &dummies[own + 1..] {
            b.net.reset(t, d)?;
        }
    }
    for &c in clause_places.iter().chain(&dummies) {
        b.net.consume(s, c, one.clone())?;
        b.net.reset(s, c)?;
    }
    b.net.produce(s, f, one)?;

    let (net, roles) = b.finish();
    let compiled = CompiledQbfNet {
        net,
        roles,
        k,
        m,
        order,
        qbf: q,
    };
    let inst = compiled.instance();
    Ok((compiled, inst))
}
