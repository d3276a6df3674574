//! Exactly solvable multistate Landau-Zener models, their commuting matrix
//! families, and numerical cross-checks of closed-form transition
//! probabilities.
//!
//! Numerical routines are generic over [`Real`] (`f32` or `f64`). The
//! aliases below fix the scalar to `f64`, which is what the CLI and the
//! scenario harness use.

pub mod closedform;
pub mod commutant;
pub mod error;
pub mod harness;
pub mod linalg;
pub mod models;
pub mod ode;
pub mod pencil;
pub mod propagator;
pub mod scalar;
pub mod spectra;

pub use error::{Error, Result};
pub use harness::{run_scenario, Scenario, ScenarioReport, Task};
pub use models::{BargmannIndex, HalfInteger, ModelKind, ModelSpec};
pub use pencil::{CMatrix, MatrixPencil};
pub use propagator::{Projection, PropagationConfig};
pub use scalar::Real;

pub type Pencil = MatrixPencil<f64>;
pub type Pencil32 = MatrixPencil<f32>;
pub type Transitions = propagator::TransitionMatrix<f64>;
