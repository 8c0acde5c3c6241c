//! Analysis of acyclic Petri nets with resets.
//!
//! The crate covers the net model ([`net`], [`structure`]), firing rules
//! ([`semantics`]), decision procedures for reachability and coverability
//! ([`deciders`]), quantified Boolean formulas ([`qbf`]), net-to-net
//! compilers ([`reductions`]) and a line-oriented text format ([`format`]).

pub mod deciders;
pub mod format;
pub mod net;
pub mod qbf;
pub mod reductions;
pub mod samples;
pub mod semantics;
pub mod structure;

pub use net::{AnyNet, Instance, Marking, Net, NetBuilder, NetError, Node, Objective, PlaceId, Tokens, Transition, TransitionId, ZeroTestNet};
