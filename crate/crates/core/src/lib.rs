//! Single-observable uncertainty relations.
//!
//! The variance of an observable A in a state ρ that does not commute with
//! A is bounded below by the noncommutativity ‖[A, ρ^s]‖², with a
//! coefficient that depends only on the extreme eigenvalues of ρ, and the
//! bound sharpens further once the classical (pinched) part of A is added
//! back. This crate computes every quantity in those relations, the qubit
//! closed forms, and the sphere-averaged product bounds.
//!
//! Modules, bottom-up:
//!
//! - [`linalg`]: complex matrices, Hermitian eigendecomposition, commutators, powers.
//! - [`states`]: validated states and observables, Bloch form, seeded ensembles.
//! - [`bounds`]: variance, pinching, optimal coefficient, bound reports, witness, coherence.
//! - [`products`]: Robertson, Schrödinger and product-of-single bounds.
//! - [`qubit`]: closed forms and analytic / Monte Carlo sphere averages.

pub mod bounds;
pub mod linalg;
pub mod products;
pub mod qubit;
pub mod states;

pub use bounds::{BoundError, BoundReport, Coefficient, CoherenceReport};
pub use linalg::{ComplexMatrix, LinalgError, SpectralDecomposition};
pub use num_complex::Complex64;
pub use products::ProductReport;
pub use qubit::{AveragedBounds, MonteCarloBounds, QubitError};
pub use states::{BlochState, DensityMatrix, Observable, StateError};
