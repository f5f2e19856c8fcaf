//! Non-autonomous germ conjugation: bounded orbits of expanding affine
//! recurrences and the degree-by-degree solvers producing conjugated target
//! families with Hénon-product (k = 2) or triangular-chain (k >= 3) shape.

pub mod affine;
pub mod solver;

pub use affine::{bounded_affine_orbit, tail_length, AffineRecurrence};
pub use solver::{
    basin_chart_estimate, residual, solve_conjugation, ChartEstimate, CoefficientTable,
    ConjugationSolution, SlotKind,
};
