//! Tomographic-probability toolkit for quantum states.
//!
//! Quantum states are represented here by genuine probability distributions:
//! optical/symplectic tomograms for continuous variables, spin tomograms for
//! discrete ones, and the coin-probability parametrization of qudit density
//! matrices. On top of those sit the parametric-oscillator machinery built on
//! the linear integrals of motion, Franck-Condon factor tables with their
//! entropy-information inequalities, and the Malevich-square ("quantum
//! suprematism") geometry of qubit probability triples.
//!
//! Modules:
//! - [`statespace`]: density matrices, probability vectors, validation.
//! - [`qudit_prob`]: density matrix <-> coin-probability bijection,
//!   artificial qubits, admissibility checks.
//! - [`spin_tomography`]: spin tomograms via SU(2) rotation matrices.
//! - [`cv_tomography`]: Wigner functions, symplectic/optical tomograms,
//!   inverse Radon reconstruction.
//! - [`parosc`]: parametric oscillator evolution and Franck-Condon factors.
//! - [`infotheory`]: Shannon entropies, the partition tool, entropic
//!   inequalities.
//! - [`suprematism`]: Malevich triads, square areas, SVG mosaics.

pub mod cv_tomography;
pub mod grid;
pub mod infotheory;
pub mod parosc;
pub mod qudit_prob;
pub mod spin_tomography;
pub mod statespace;
pub mod suprematism;

pub use statespace::{DensityMatrix, ProbabilityVector, ToleranceConfig};
