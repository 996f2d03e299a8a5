//! Exact coverage and length, containment, refinement and long-run
//! simulation for the interval procedures.

mod coverage;
mod domination;
mod grid;
mod refinement;
mod simulate;

pub use coverage::{
    coverage_curve, expected_length, noncoverage_antithetic_exact, noncoverage_cp,
    noncoverage_discrete_exact, noncoverage_randomized_exact, noncoverage_split, CoverageCurve,
    MethodSpec, Procedure, MAX_LENGTH_LEVELS,
};
pub use domination::{
    domination_report, korn_domination_report, korn_uniformity, Containment, DominationReport,
    LevelCheck, UniformityReport, ENDPOINT_TOL, MAX_ENUMERATION_N,
};
pub use grid::{check_grid, default_theta_grid, uniform_grid, DEFAULT_GRID_POINTS, JUMP_OFFSET};
pub use refinement::{
    refinement_check, stevens_refinement_check, OrderingAnomaly, Outcome, RefinementReport,
    Witness, MAX_WITNESSES,
};
pub use simulate::{longrun_simulate, Checkpoint, SimulationReport, CHECKPOINTS};
