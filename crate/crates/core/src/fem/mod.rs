//! Plane-strain finite elements for the plate-with-hole experiment.

mod assembly;
mod linalg;
mod mesh;
mod plate;
mod solver;

pub use assembly::Discretization;
pub use linalg::BandMatrix;
pub use mesh::{PlateGeometry, PlateMesh, QuadMesh, PROBE_COUNT};
pub use plate::{dump_fields, solve, FemSolution, LoadProgram};
pub use solver::{Dirichlet, EquilibriumSolver, NewtonSettings, StepDiagnostics, StepResult};
