//! Numerical laboratory for the symmetry-reduced Allen-Cahn gradient flow on
//! round spheres S^{n+1}.
//!
//! The crate provides:
//!
//! * [`geometry`] — closed-form areas of spheres and Clifford hypersurfaces,
//!   the ratio sequences d(n) and a(n), and batch verification of the area
//!   inequalities;
//! * [`potential`] — the double-well potential, its surface-tension constant
//!   and the heteroclinic profile;
//! * [`grid`] / [`field`] — symmetry-reduced grids on the sphere, the reduced
//!   Laplace-Beltrami operator, the Allen-Cahn energy, its gradient and the
//!   weight-measure mass;
//! * [`critical`] — Newton solvers for the Clifford-interface and ground
//!   states, plus continuation sweeps in epsilon;
//! * [`spectrum`] — Sturm-Liouville mode decomposition of the linearized
//!   operator, Morse index and nullity aggregation;
//! * [`flow`] — semi-implicit time integration of the parabolic equation,
//!   limit classification, and the unstable-direction shooting that produces
//!   connecting orbits from the Clifford state to the ground state.

pub mod critical;
pub mod error;
pub mod field;
pub mod flow;
pub mod geometry;
pub mod grid;
pub mod linalg;
pub mod potential;
pub mod spectrum;

pub use error::{Error, Result};
pub use field::Field;
pub use grid::{GridKind, ReducedGrid};
pub use potential::PotentialSpec;
