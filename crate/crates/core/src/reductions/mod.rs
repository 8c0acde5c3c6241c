//! Compilers between net classes and from QBF to nets.

mod acyclify;
mod deresets;
mod goodness;
mod qbf_net;
pub mod roles;
mod synth;
mod unary;

pub use acyclify::{acyclify_zero_tests, AcyclicReduction, ReductionError};
pub use deresets::{zero_tests_to_resets, ResetReduction};
pub use goodness::{goodness_report, GoodnessError, GoodnessReport, Val};
pub use qbf_net::{compile_qbf_to_rawn, CompileError, CompiledQbfNet};
pub use roles::{PlaceRole, RoleMap, TransitionRole};
pub use synth::{synthesize_cover_run, SynthError};
pub use unary::{binary_to_unary, UnaryError, UnaryReduction};
