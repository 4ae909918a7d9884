//! Exact integer and rational geometry of fans and lattice polytopes.
//!
//! Nothing in this module touches floating point.

pub mod exact;
mod fan;
mod picard;
mod polytope;

use thiserror::Error;

pub use exact::Rational;
pub use fan::Fan;
pub use picard::{picard_reduce, PicardClass};
pub use polytope::{enumerate_lattice_points, polytope_from_fan, LatticePoint, PointLocation, Polytope, VertexChart};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LatticeError {
    #[error("dimension must be positive")]
    ZeroDimension,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("generator {index} is not primitive")]
    NotPrimitive { index: usize },
    #[error("fan has no maximal cones")]
    NoCones,
    #[error("maximal cone {cone} has {size} generators")]
    ConeSize { cone: usize, size: usize },
    #[error("maximal cone {cone} references missing generator {index}")]
    ConeIndex { cone: usize, index: usize },
    #[error("maximal cone {cone} is not unimodular")]
    NonSmoothCone { cone: usize },
    #[error("generators do not span the ambient space")]
    NotSpanning,
    #[error("half-spaces do not cut out a bounded polytope")]
    Unbounded,
    #[error("half-spaces have empty intersection")]
    Empty,
    #[error("vertex {vertex} is not simple with unimodular normals")]
    NonSmoothVertex { vertex: usize },
    #[error("active facets at vertex {vertex} do not form a maximal cone")]
    VertexConeMismatch { vertex: usize },
    #[error("point is not a vertex of the polytope")]
    NotAVertex,
    #[error("vertex has {active} active facets")]
    DegenerateVertex { active: usize },
}
