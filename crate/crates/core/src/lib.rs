//! Polarized section spaces for abelian varieties and projective toric
//! manifolds, computed through the SYZ transform.
//!
//! The crate is organised bottom-up:
//!
//! - [`lattice`]: exact fans, polytopes, lattice points, vertex charts and
//!   Picard classes.
//! - [`syz`]: path-space functions, the Witten differential, the forward and
//!   inverse SYZ transforms, and finite-difference `∂̄` residuals.
//! - [`abelian`]: the semi-flat torus fibration over a flat torus, its
//!   Bohr-Sommerfeld points, Witten representatives and theta functions.
//! - [`toric`]: the toric Kähler potential, Bohr-Sommerfeld fibers, the
//!   character basis, extendability and the superpotential.
//!
//! Everything is a pure function of its inputs. Grid loops run through
//! rayon but collect before reducing, so results do not depend on the
//! number of worker threads.

pub mod abelian;
pub mod catalog;
pub mod lattice;
pub mod numerics;
pub mod syz;
pub mod toric;

pub use num_complex::Complex64;
