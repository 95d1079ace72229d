//! Canonical flow and the operational second integral of motion.

pub mod flow;
pub mod invariant;
pub mod state;

pub use flow::{cross_check, flow, position_at, CrossCheckReport, FlowConfig, Record, Termination, TrajectorySamples, EXIT_GAP};
pub use invariant::{
    constant_from_momenta, evaluate_invariant, spread, transported_constant, CrossingEstimate, InvariantReport,
};
pub use state::{hamiltonian, ForceField, Frame, PhaseState, RadialRamp};
