//! Hamilton-Jacobi layer: the free complete integral and separation for angular
//! potentials.

pub mod free;
pub mod jacobi;
pub mod potential;
pub mod separated;

pub use free::{free_action, line_fit_residual, FreeAction, FreeActionValue, LevelSample};
pub use jacobi::{trajectory_from_action, JacobiConstants, JacobiFamily, JacobiPath, PathEnd};
pub use potential::{momentum_square, AngularPotential, PotentialKind, ProblemSetup};
pub use separated::{
    separated_action, solve_f, wrap_angle, Contact, ContactKind, InitialData, SeparatedAction, SeparatedSolution,
    SolveOptions, TableRow, Variation,
};
