//! Garding-cone algebra and a monotone Bellman solver for degenerate
//! `m`-Hessian Dirichlet problems `P_m(D^2 u) = g^(m-1)`, `u = 0` on the boundary.
//!
//! The crate is generic over the scalar type through [`Real`]; the aliases
//! at the root fix it to `f64`, which is what the solver is tuned for.

pub mod bellman;
pub mod cone;
pub mod error;
pub mod quasi;
pub mod sampling;
pub mod scalar;
pub mod solver;
pub mod suite;
pub mod symfun;

pub use error::{Error, Result};
pub use scalar::Real;

pub type SymMat64 = symfun::SymMat<f64>;
pub type SymMat32 = symfun::SymMat<f32>;
pub type Spectrum64 = symfun::Spectrum<f64>;
pub type Control64 = bellman::Control<f64>;
pub type ControlNet64 = bellman::ControlNet<f64>;
pub type GridProblem64 = solver::GridProblem<f64>;
pub type SolveReport64 = solver::SolveReport<f64>;
pub type LadderReport64 = solver::LadderReport<f64>;
