//! Petri nets with resets, their zero-test variant, ω-markings and norms.
//!
//! Places and transitions are addressed by dense indices assigned in
//! declaration order; names are kept only for I/O. Arc weights are stored
//! sparsely and are always at least one, so a missing entry means "no arc".

use std::collections::HashMap;
use std::fmt;
use std::ops::Index;

use num_bigint::BigUint;
use num_traits::Zero;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PlaceId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TransitionId(pub usize);

impl PlaceId {
    pub fn index(self) -> usize {
        self.0
    }
}

impl TransitionId {
    pub fn index(self) -> usize {
        self.0
    }
}

/// A node of the arc graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Node {
    Place(PlaceId),
    Transition(TransitionId),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NetError {
    #[error("identifier `{0}` is declared twice")]
    DuplicateName(String),
    #[error("unknown place index {0}")]
    UnknownPlace(usize),
    #[error("unknown transition index {0}")]
    UnknownTransition(usize),
    #[error("arc between `{place}` and `{transition}` has weight zero")]
    ZeroWeight { place: String, transition: String },
    #[error("arc between `{place}` and `{transition}` is declared twice")]
    DuplicateArc { place: String, transition: String },
    #[error("zero-test nets carry no resets (transition `{0}` resets a place)")]
    ResetInZeroTestNet(String),
    #[error("marking has {found} entries but the net has {expected} places")]
    MarkingSize { expected: usize, found: usize },
    #[error("instance markings must not contain ω")]
    OmegaInInstance,
}

/// Token count of a single place: a natural number or ω.
///
/// Ordering puts every finite value below ω.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Tokens {
    Finite(BigUint),
    Omega,
}

impl Tokens {
    pub fn zero() -> Self {
        Tokens::Finite(BigUint::zero())
    }

    pub fn is_omega(&self) -> bool {
        matches!(self, Tokens::Omega)
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Tokens::Finite(n) if n.is_zero())
    }

    pub fn finite(&self) -> Option<&BigUint> {
        match self {
            Tokens::Finite(n) => Some(n),
            Tokens::Omega => None,
        }
    }

    /// `self >= amount`, with ω above every natural.
    pub fn at_least(&self, amount: &BigUint) -> bool {
        match self {
            Tokens::Finite(n) => n >= amount,
            Tokens::Omega => true,
        }
    }

    /// Subtraction that absorbs into ω. Returns `None` when a finite count
    /// would go negative.
    pub fn checked_sub(&self, amount: &BigUint) -> Option<Tokens> {
        match self {
            Tokens::Finite(n) if n >= amount => Some(Tokens::Finite(n - amount)),
            Tokens::Finite(_) => None,
            Tokens::Omega => Some(Tokens::Omega),
        }
    }

    pub fn add(&self, amount: &BigUint) -> Tokens {
        match self {
            Tokens::Finite(n) => Tokens::Finite(n + amount),
            Tokens::Omega => Tokens::Omega,
        }
    }
}

impl From<u64> for Tokens {
    fn from(n: u64) -> Self {
        Tokens::Finite(BigUint::from(n))
    }
}

impl From<BigUint> for Tokens {
    fn from(n: BigUint) -> Self {
        Tokens::Finite(n)
    }
}

impl fmt::Display for Tokens {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tokens::Finite(n) => write!(f, "{n}"),
            Tokens::Omega => f.write_str("ω"),
        }
    }
}

/// A vector of token counts indexed by place.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Marking(Vec<Tokens>);

impl Marking {
    pub fn new(entries: Vec<Tokens>) -> Self {
        Marking(entries)
    }

    pub fn zeros(places: usize) -> Self {
        Marking(vec![Tokens::zero(); places])
    }

    pub fn from_counts(counts: &[u64]) -> Self {
        Marking(counts.iter().map(|&c| Tokens::from(c)).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn entries(&self) -> &[Tokens] {
        &self.0
    }

    pub fn set(&mut self, place: PlaceId, value: Tokens) {
        self.0[place.0] = value;
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|t| !t.is_omega())
    }

    /// Finite count at `place`, or `None` for ω.
    pub fn count(&self, place: PlaceId) -> Option<&BigUint> {
        self.0[place.0].finite()
    }

    /// Sum of all finite entries; ω entries do not contribute.
    pub fn norm(&self) -> BigUint {
        self.0.iter().filter_map(Tokens::finite).sum()
    }

    /// Pointwise `self >= other` (ω dominates every finite value).
    pub fn covers(&self, other: &Marking) -> bool {
        self.0.len() == other.0.len() && self.0.iter().zip(&other.0).all(|(a, b)| a >= b)
    }

    pub fn iter(&self) -> impl Iterator<Item = (PlaceId, &Tokens)> {
        self.0.iter().enumerate().map(|(i, t)| (PlaceId(i), t))
    }
}

impl Index<PlaceId> for Marking {
    type Output = Tokens;

    fn index(&self, place: PlaceId) -> &Tokens {
        &self.0[place.0]
    }
}

impl fmt::Display for Marking {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, t) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{t}")?;
        }
        f.write_str(")")
    }
}

/// A transition with its pre-vector, post-vector and reset set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transition {
    name: String,
    pre: Vec<(PlaceId, BigUint)>,
    post: Vec<(PlaceId, BigUint)>,
    resets: Vec<PlaceId>,
}

impl Transition {
    pub fn name(&self) -> &str {
        &self.name
    }

    /// Consumption arcs sorted by place.
    pub fn pre(&self) -> &[(PlaceId, BigUint)] {
        &self.pre
    }

    /// Production arcs sorted by place.
    pub fn post(&self) -> &[(PlaceId, BigUint)] {
        &self.post
    }

    /// Reset places, sorted.
    pub fn resets(&self) -> &[PlaceId] {
        &self.resets
    }

    pub fn pre_weight(&self, place: PlaceId) -> Option<&BigUint> {
        lookup(&self.pre, place)
    }

    pub fn post_weight(&self, place: PlaceId) -> Option<&BigUint> {
        lookup(&self.post, place)
    }

    pub fn resets_place(&self, place: PlaceId) -> bool {
        self.resets.binary_search(&place).is_ok()
    }

    /// Total number of tokens produced by one firing.
    pub fn production(&self) -> BigUint {
        self.post.iter().map(|(_, w)| w).sum()
    }
}

fn lookup(arcs: &[(PlaceId, BigUint)], place: PlaceId) -> Option<&BigUint> {
    arcs.binary_search_by_key(&place, |(p, _)| *p)
        .ok()
        .map(|i| &arcs[i].1)
}

/// A Petri net with resets `(P, T, F, R)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Net {
    places: Vec<String>,
    transitions: Vec<Transition>,
    names: HashMap<String, Node>,
}

impl Net {
    pub fn builder() -> NetBuilder {
        NetBuilder::default()
    }

    pub fn place_count(&self) -> usize {
        self.places.len()
    }

    pub fn transition_count(&self) -> usize {
        self.transitions.len()
    }

    pub fn places(&self) -> impl Iterator<Item = PlaceId> {
        (0..self.places.len()).map(PlaceId)
    }

    pub fn transition_ids(&self) -> impl Iterator<Item = TransitionId> {
        (0..self.transitions.len()).map(TransitionId)
    }

    pub fn transitions(&self) -> &[Transition] {
        &self.transitions
    }

    pub fn transition(&self, t: TransitionId) -> &Transition {
        &self.transitions[t.0]
    }

    pub fn place_name(&self, p: PlaceId) -> &str {
        &self.places[p.0]
    }

    pub fn place_names(&self) -> &[String] {
        &self.places
    }

    pub fn node_name(&self, node: Node) -> &str {
        match node {
            Node::Place(p) => self.place_name(p),
            Node::Transition(t) => self.transition(t).name(),
        }
    }

    pub fn place_id(&self, name: &str) -> Option<PlaceId> {
        match self.names.get(name) {
            Some(Node::Place(p)) => Some(*p),
            _ => None,
        }
    }

    pub fn transition_id(&self, name: &str) -> Option<TransitionId> {
        match self.names.get(name) {
            Some(Node::Transition(t)) => Some(*t),
            _ => None,
        }
    }

    pub fn has_resets(&self) -> bool {
        self.transitions.iter().any(|t| !t.resets.is_empty())
    }

    /// `|P|·|T| + Σ F + Σ |R(t)|`.
    pub fn norm(&self) -> BigUint {
        let mut norm = BigUint::from(self.places.len()) * BigUint::from(self.transitions.len());
        for t in &self.transitions {
            for (_, w) in t.pre.iter().chain(&t.post) {
                norm += w;
            }
            norm += BigUint::from(t.resets.len());
        }
        norm
    }

    pub fn reset_count(&self) -> usize {
        self.transitions.iter().map(|t| t.resets.len()).sum()
    }

    /// The same net with every reset set emptied.
    pub fn strip_resets(&self) -> Net {
        let mut net = self.clone();
        for t in &mut net.transitions {
            t.resets.clear();
        }
        net
    }

    /// Largest total production of a single transition.
    pub fn max_production(&self) -> BigUint {
        self.transitions
            .iter()
            .map(Transition::production)
            .max()
            .unwrap_or_default()
    }

    pub fn zero_marking(&self) -> Marking {
        Marking::zeros(self.places.len())
    }

    /// Builds a finite marking from `(place name, count)` pairs; unlisted
    /// places hold zero tokens. Returns `None` for an unknown name.
    pub fn marking<'a>(&self, counts: impl IntoIterator<Item = (&'a str, u64)>) -> Option<Marking> {
        let mut m = self.zero_marking();
        for (name, c) in counts {
            m.set(self.place_id(name)?, Tokens::from(c));
        }
        Some(m)
    }
}

#[derive(Debug, Default, Clone)]
struct TransitionDraft {
    name: String,
    pre: Vec<(PlaceId, BigUint)>,
    post: Vec<(PlaceId, BigUint)>,
    resets: Vec<PlaceId>,
}

/// Incremental construction of a [`Net`].
#[derive(Debug, Default, Clone)]
pub struct NetBuilder {
    places: Vec<String>,
    transitions: Vec<TransitionDraft>,
    names: HashMap<String, Node>,
}

impl NetBuilder {
    pub fn add_place(&mut self, name: impl Into<String>) -> Result<PlaceId, NetError> {
        let name = name.into();
        let id = PlaceId(self.places.len());
        self.claim(&name, Node::Place(id))?;
        self.places.push(name);
        Ok(id)
    }

    pub fn add_transition(&mut self, name: impl Into<String>) -> Result<TransitionId, NetError> {
        let name = name.into();
        let id = TransitionId(self.transitions.len());
        self.claim(&name, Node::Transition(id))?;
        self.transitions.push(TransitionDraft {
            name,
            ..Default::default()
        });
        Ok(id)
    }

    fn claim(&mut self, name: &str, node: Node) -> Result<(), NetError> {
        if self.names.contains_key(name) {
            return Err(NetError::DuplicateName(name.to_string()));
        }
        self.names.insert(name.to_string(), node);
        Ok(())
    }

    pub fn place_id(&self, name: &str) -> Option<PlaceId> {
        match self.names.get(name) {
            Some(Node::Place(p)) => Some(*p),
            _ => None,
        }
    }

    pub fn transition_id(&self, name: &str) -> Option<TransitionId> {
        match self.names.get(name) {
            Some(Node::Transition(t)) => Some(*t),
            _ => None,
        }
    }

    /// Adds a consumption arc `p -> t`.
    pub fn consume(
        &mut self,
        t: TransitionId,
        p: PlaceId,
        weight: impl Into<BigUint>,
    ) -> Result<(), NetError> {
        self.arc(t, p, weight.into(), true)
    }

    /// Adds a production arc `t -> p`.
    pub fn produce(
        &mut self,
        t: TransitionId,
        p: PlaceId,
        weight: impl Into<BigUint>,
    ) -> Result<(), NetError> {
        self.arc(t, p, weight.into(), false)
    }

    fn arc(&mut self, t: TransitionId, p: PlaceId, w: BigUint, input: bool) -> Result<(), NetError> {
        self.check(t, p)?;
        let place = self.places[p.0].clone();
        let draft = &mut self.transitions[t.0];
        if w.is_zero() {
            return Err(NetError::ZeroWeight {
                place,
                transition: draft.name.clone(),
            });
        }
        let arcs = if input { &mut draft.pre } else { &mut draft.post };
        if arcs.iter().any(|(q, _)| *q == p) {
            return Err(NetError::DuplicateArc {
                place,
                transition: draft.name.clone(),
            });
        }
        arcs.push((p, w));
        Ok(())
    }

    /// Adds `p` to the reset set of `t`; repeated resets are idempotent.
    pub fn reset(&mut self, t: TransitionId, p: PlaceId) -> Result<(), NetError> {
        self.check(t, p)?;
        let resets = &mut self.transitions[t.0].resets;
        if !resets.contains(&p) {
            resets.push(p);
        }
        Ok(())
    }

    fn check(&self, t: TransitionId, p: PlaceId) -> Result<(), NetError> {
        if t.0 >= self.transitions.len() {
            return Err(NetError::UnknownTransition(t.0));
        }
        if p.0 >= self.places.len() {
            return Err(NetError::UnknownPlace(p.0));
        }
        Ok(())
    }

    pub fn build(self) -> Net {
        let transitions = self
            .transitions
            .into_iter()
            .map(|mut d| {
                d.pre.sort_by_key(|(p, _)| *p);
                d.post.sort_by_key(|(p, _)| *p);
                d.resets.sort();
                Transition {
                    name: d.name,
                    pre: d.pre,
                    post: d.post,
                    resets: d.resets,
                }
            })
            .collect();
        Net {
            places: self.places,
            transitions,
            names: self.names,
        }
    }
}

/// A Petri net with zero tests `(P, T, F, Z)`. The base net has no resets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZeroTestNet {
    base: Net,
    ztests: Vec<Vec<PlaceId>>,
}

impl ZeroTestNet {
    /// `ztests[t]` lists the places zero-tested by transition `t`.
    pub fn new(base: Net, mut ztests: Vec<Vec<PlaceId>>) -> Result<Self, NetError> {
        if let Some(t) = base.transitions.iter().find(|t| !t.resets.is_empty()) {
            return Err(NetError::ResetInZeroTestNet(t.name.clone()));
        }
        ztests.resize(base.transition_count(), Vec::new());
        if ztests.len() > base.transition_count() {
            return Err(NetError::UnknownTransition(base.transition_count()));
        }
        for tests in &mut ztests {
            if let Some(p) = tests.iter().find(|p| p.0 >= base.place_count()) {
                return Err(NetError::UnknownPlace(p.0));
            }
            tests.sort();
            tests.dedup();
        }
        Ok(ZeroTestNet { base, ztests })
    }

    pub fn base(&self) -> &Net {
        &self.base
    }

    pub fn zero_tests(&self, t: TransitionId) -> &[PlaceId] {
        &self.ztests[t.0]
    }

    /// Norm of the base net plus the number of zero-test edges.
    pub fn norm(&self) -> BigUint {
        self.base.norm() + BigUint::from(self.ztests.iter().map(Vec::len).sum::<usize>())
    }
}

/// Either flavour of net an instance may be posed over.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AnyNet {
    Reset(Net),
    ZeroTest(ZeroTestNet),
}

impl AnyNet {
    /// The consumption/production structure, ignoring resets and zero tests.
    pub fn arcs(&self) -> &Net {
        match self {
            AnyNet::Reset(n) => n,
            AnyNet::ZeroTest(z) => z.base(),
        }
    }

    pub fn norm(&self) -> BigUint {
        match self {
            AnyNet::Reset(n) => n.norm(),
            AnyNet::ZeroTest(z) => z.norm(),
        }
    }

    pub fn as_reset(&self) -> Option<&Net> {
        match self {
            AnyNet::Reset(n) => Some(n),
            AnyNet::ZeroTest(_) => None,
        }
    }

    pub fn as_zero_test(&self) -> Option<&ZeroTestNet> {
        match self {
            AnyNet::ZeroTest(z) => Some(z),
            AnyNet::Reset(_) => None,
        }
    }
}

impl From<Net> for AnyNet {
    fn from(n: Net) -> Self {
        AnyNet::Reset(n)
    }
}

impl From<ZeroTestNet> for AnyNet {
    fn from(z: ZeroTestNet) -> Self {
        AnyNet::ZeroTest(z)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Objective {
    Reach,
    Cover,
}

impl fmt::Display for Objective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Objective::Reach => "reach",
            Objective::Cover => "cover",
        })
    }
}

/// A reachability or coverability query.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    pub net: AnyNet,
    pub initial: Marking,
    pub target: Marking,
    pub objective: Objective,
}

impl Instance {
    pub fn new(
        net: impl Into<AnyNet>,
        initial: Marking,
        target: Marking,
        objective: Objective,
    ) -> Result<Self, NetError> {
        let net = net.into();
        let places = net.arcs().place_count();
        for m in [&initial, &target] {
            if m.len() != places {
                return Err(NetError::MarkingSize {
                    expected: places,
                    found: m.len(),
                });
            }
            if !m.is_finite() {
                return Err(NetError::OmegaInInstance);
            }
        }
        Ok(Instance {
            net,
            initial,
            target,
            objective,
        })
    }

    /// Net norm plus the norms of both markings.
    pub fn norm(&self) -> BigUint {
        self.net.norm() + self.initial.norm() + self.target.norm()
    }

    pub fn with_objective(mut self, objective: Objective) -> Self {
        self.objective = objective;
        self
    }
}
