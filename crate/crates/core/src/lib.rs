//! Open-system cavity QED toolkit.
//!
//! Builds the Jaynes-Cummings (one atom, one cavity mode) and OH⁺ (electron +
//! covalent-bond degree of freedom in a cavity) models, integrates their
//! Lindblad master equation with a unitary/dissipative splitting, and
//! evaluates von Neumann entropy, concurrence, mutual information, classical
//! correlation and quantum discord along the resulting trajectories.
//!
//! Module map:
//!
//! - [`linalg`]: dense complex matrices, Kronecker products, partial traces,
//!   Jacobi eigendecomposition and Hamiltonian-generated unitaries.
//! - [`models`]: model construction, initial states and the RWA check.
//! - [`solver`]: the split-step integrator and an exact Liouvillian oracle.
//! - [`measures`]: entropies and correlation measures.
//! - [`scenarios`]: config parsing, runs, sweeps, CSV and SVG output.
//!
//! With the default `parallel` feature the measurement-basis grid search and
//! parameter sweeps run on rayon; [`Backend::Sequential`] is always
//! available and produces identical results.

pub mod error;
pub mod exec;
pub mod linalg;
pub mod measures;
pub mod models;
pub mod scenarios;
pub mod solver;
pub mod state;

pub use error::{Error, Result};
pub use exec::Backend;
pub use linalg::{ComplexMatrix, EigenDecomposition, C64};
pub use state::{DensityMatrix, Side};
