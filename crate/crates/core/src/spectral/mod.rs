//! Finite-difference solver for the planar nonlinear eigenvalue problem and
//! the diagnostics run on its output.

pub mod diagnostics;
pub mod grid;
pub mod linear;
pub mod ode;
pub mod oracle;
pub mod potentials;
pub mod solve;

pub use diagnostics::{
    angular_inequality, angular_profile, growth_check, growth_constant, harnack_ratio,
    AngularInequality, AngularProfile, GrowthReport, HarnackReport,
};
pub use grid::{cutoff, Cutoff, Grid2D};
pub use linear::{dense_smallest, PencilEigen, PencilOptions};
pub use ode::{
    dvr_ground_state, ode_ground_state, separated_solution, DecayCertificate, OdeGroundState,
    SeparatedKind, SeparatedSolution,
};
pub use oracle::{oracle_potentials, oracle_residual, OracleReport, ResidualLevel};
pub use potentials::{
    analyze_potentials, planar, tube_geometry, CircleZero, Nonnegativity, PotentialCase,
    PotentialPair, Tube,
};
pub use solve::{
    coercive_part, compact_part, solve_lambda, SolveRoute, SolverConfig, SpectralSolution,
};
