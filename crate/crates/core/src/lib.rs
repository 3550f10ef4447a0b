//! Dynamical confinement for one-dimensional Schrödinger operators.
//!
//! A global Hamiltonian `H0 = -d²/dx² + V(x)` on the line is split at `x = 0`
//! into the family of confining self-adjoint operators `H1 ⊕ H2`, each half
//! carrying its own Robin (`φ'(0) = λφ(0)`) or Dirichlet condition. The crate
//! provides
//!
//! - [`potential`]: admissible regular potentials,
//! - [`grid`] and [`operator`]: finite-difference assembly of the global and
//!   confined operators as symmetric tridiagonal blocks,
//! - [`spectral`]: Sturm bisection / inverse iteration eigensolver and
//!   analytic box oracles,
//! - [`dynamics`]: Cayley (Crank–Nicolson) propagation and region observables,
//! - [`boundary`]: exact rational algebra for the δ/δ′ boundary potentials
//!   that turn `H0` into a confining operator.

pub mod boundary;
pub mod dynamics;
pub mod error;
pub mod grid;
pub mod operator;
pub mod potential;
pub mod spectral;
pub mod wavefunction;

pub use error::{Error, Result};
pub use grid::{BoundaryParam, Grid, Layout, Region};
pub use operator::{ConfinedHamiltonian, GlobalHamiltonian, Hamiltonian};
pub use potential::Potential;
pub use wavefunction::WaveFunction;
