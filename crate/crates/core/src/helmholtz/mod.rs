//! Absorbed Helmholtz equation `Δu + (p + Q + λ + iε) u = f` on truncated boxes.

pub mod greens;
pub mod krylov;
pub mod operator;
pub mod sweep;

pub use greens::{greens_reference, wavenumber, RadialBumpSolution};
pub use krylov::{solve, Method, SolutionField, SolveDiagnostics, SolveOptions};
pub use operator::{assemble, points_per_wavelength, wavelength, Boundary, Bump, HelmholtzProblem, Operator};
pub use sweep::{epsilon_sweep, SweepReport, SweepSummary};
