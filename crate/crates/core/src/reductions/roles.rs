//! Role tags naming every node a compiler creates.

use std::collections::HashMap;
use std::fmt;

use crate::net::{Net, NetBuilder, NetError, PlaceId, TransitionId};
use crate::qbf::{Literal, Var};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PlaceRole {
    /// `h_i`: block `i` has not started.
    Holding(usize),
    /// `w_i`: `y_i` is currently false.
    Waiting(usize),
    /// `v_i`: `x_i` awaits a value.
    Decision(usize),
    /// `b_i`, `b̄_i`, `a_i` or `ā_i`.
    Literal(Literal),
    /// Place of the `j`-th real clause (1-based).
    Clause(usize),
    /// Place of the tautology `(¬v ∨ v)`.
    Dummy(Var),
    /// Counts verified assignments.
    Final,
    /// A place copied unchanged from the source net.
    Original(PlaceId),
    /// Level `level` (≥ 1) of the halving chain feeding `transition` from `place`.
    HalvingLevel { transition: TransitionId, place: PlaceId, level: u32 },
    /// Level `level` (≥ 1) of the doubling chain from `transition` into `place`.
    DoublingLevel { transition: TransitionId, place: PlaceId, level: u32 },
    /// Marks that the consume half of a split transition is due.
    ConsumeDue(TransitionId),
    /// Marks that the produce half of a split transition is due.
    ProduceDue(TransitionId),
    /// Shadow copy of a place, never reset.
    Copy(PlaceId),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TransitionRole {
    /// `u_i^⊥`: sets `y_i` false.
    UniversalFalse(usize),
    /// `u_i^⊤`: sets `y_i` true.
    UniversalTrue(usize),
    /// `e_i^⊥`: sets `x_i` false.
    ExistentialFalse(usize),
    /// `e_i^⊤`: sets `x_i` true.
    ExistentialTrue(usize),
    /// `ℓ_lit`: moves a literal token into the clauses it satisfies.
    Loading(Literal),
    /// `s`: all clauses hold, count one assignment.
    Satisfaction,
    /// The transition of the source net with unary arcs.
    Key(TransitionId),
    Halve { transition: TransitionId, place: PlaceId, level: u32 },
    Double { transition: TransitionId, place: PlaceId, level: u32 },
    /// First third of a split transition; commits to it.
    Choose(TransitionId),
    /// Second third: consumes and performs the zero tests.
    Consume(TransitionId),
    /// Last third: produces.
    Produce(TransitionId),
    /// Source transition mirrored onto the copy places.
    Mirror(TransitionId),
}

impl fmt::Display for PlaceRole {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PlaceRole::Holding(i) => write!(f, "holding h{i}"),
            PlaceRole::Waiting(i) => write!(f, "waiting w{i}"),
            PlaceRole::Decision(i) => write!(f, "decision v{i}"),
            PlaceRole::Literal(l) => write!(f, "literal {l}"),
            PlaceRole::Clause(j) => write!(f, "clause c{j}"),
            PlaceRole::Dummy(v) => write!(f, "dummy clause of {v}"),
            PlaceRole::Final => f.write_str("final"),
            PlaceRole::Original(p) => write!(f, "original place {}", p.0),
            PlaceRole::HalvingLevel { level, .. } => write!(f, "halving level {level}"),
            PlaceRole::DoublingLevel { level, .. } => write!(f, "doubling level {level}"),
            PlaceRole::ConsumeDue(t) => write!(f, "consume marker of transition {}", t.0),
            PlaceRole::ProduceDue(t) => write!(f, "produce marker of transition {}", t.0),
            PlaceRole::Copy(p) => write!(f, "copy of place {}", p.0),
        }
    }
}

impl fmt::Display for TransitionRole {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TransitionRole::UniversalFalse(i) => write!(f, "universal control u{i}⊥"),
            TransitionRole::UniversalTrue(i) => write!(f, "universal control u{i}⊤"),
            TransitionRole::ExistentialFalse(i) => write!(f, "existential control e{i}⊥"),
            TransitionRole::ExistentialTrue(i) => write!(f, "existential control e{i}⊤"),
            TransitionRole::Loading(l) => write!(f, "loading {l}"),
            TransitionRole::Satisfaction => f.write_str("satisfaction"),
            TransitionRole::Key(t) => write!(f, "key of transition {}", t.0),
            TransitionRole::Halve { level, .. } => write!(f, "halving step {level}"),
            TransitionRole::Double { level, .. } => write!(f, "doubling step {level}"),
            TransitionRole::Choose(t) => write!(f, "choice of transition {}", t.0),
            TransitionRole::Consume(t) => write!(f, "consume half of transition {}", t.0),
            TransitionRole::Produce(t) => write!(f, "produce half of transition {}", t.0),
            TransitionRole::Mirror(t) => write!(f, "mirror of transition {}", t.0),
        }
    }
}

/// Total, injective role assignment for the nodes of a compiled net.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RoleMap {
    places: Vec<PlaceRole>,
    transitions: Vec<TransitionRole>,
    place_index: HashMap<PlaceRole, PlaceId>,
    transition_index: HashMap<TransitionRole, TransitionId>,
}

impl RoleMap {
    pub fn place_role(&self, p: PlaceId) -> PlaceRole {
        self.places[p.0]
    }

    pub fn transition_role(&self, t: TransitionId) -> TransitionRole {
        self.transitions[t.0]
    }

    pub fn place(&self, role: PlaceRole) -> Option<PlaceId> {
        self.place_index.get(&role).copied()
    }

    pub fn transition(&self, role: TransitionRole) -> Option<TransitionId> {
        self.transition_index.get(&role).copied()
    }

    pub fn place_roles(&self) -> &[PlaceRole] {
        &self.places
    }

    pub fn transition_roles(&self) -> &[TransitionRole] {
        &self.transitions
    }
}

/// A [`NetBuilder`] that records a role for each node it creates.
#[derive(Debug, Default)]
pub(crate) struct RoleBuilder {
    pub net: NetBuilder,
    pub roles: RoleMap,
}

impl RoleBuilder {
    pub fn place(&mut self, name: impl Into<String>, role: PlaceRole) -> Result<PlaceId, NetError> {
        let id = self.net.add_place(name)?;
        let fresh = self.roles.place_index.insert(role, id).is_none();
        debug_assert!(fresh, "place role {role:?} assigned twice");
        self.roles.places.push(role);
        Ok(id)
    }

    pub fn transition(
        &mut self,
        name: impl Into<String>,
        role: TransitionRole,
    ) -> Result<TransitionId, NetError> {
        let id = self.net.add_transition(name)?;
        let fresh = self.roles.transition_index.insert(role, id).is_none();
        debug_assert!(fresh, "transition role {role:?} assigned twice");
        self.roles.transitions.push(role);
        Ok(id)
    }

    pub fn finish(self) -> (Net, RoleMap) {
        (self.net.build(), self.roles)
    }
}
