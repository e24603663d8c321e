//! Optimal-control enhanced frequency estimation for a single noisy qubit.
//!
//! The crate propagates a qubit density matrix and its derivative with
//! respect to the estimated frequency under piecewise-constant controls,
//! evaluates the quantum and classical Fisher information of the final
//! state, and climbs their gradients with respect to the controls.
//! Closed-form reference values for the uncontrolled and single-pulse
//! cases live in [`oracles`].

pub mod dynamics;
pub mod error;
pub mod fisher;
pub mod grape;
pub mod linalg;
pub mod oracles;

pub use dynamics::{
    propagate, BlochVector, ControlGrid, DensityState, EstimationProblem, NoiseModel, Trajectory,
};
pub use error::{Error, Result};
pub use fisher::{cfi, qfi, sld, Povm};
pub use grape::{ascend, AscentConfig, AscentReport, GradientMethod, InitMode, Objective, UpdateRule};
