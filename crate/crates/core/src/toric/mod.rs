//! Projective toric manifolds: the Kähler potential on the moment polytope,
//! Bohr-Sommerfeld fibers over its lattice points, their basis functions
//! and characters, and the limit checks near the toric boundary.

mod character;
mod curvature;
mod datum;
mod fibers;

use thiserror::Error;

pub use character::{
    basis_and_character, basis_function, basis_section, character, character_rank, extendability_box,
    extendability_sweep, extendability_test, superpotential_eval, toric_context, weighted_character, BasisFunction,
    CharacterMatch, CharacterRow, ExtendabilityReport, CHARACTER_GRID,
};
pub use curvature::{
    condition_star_report, moment_limit_check, prequantum_residual, ConditionStarReport, GeneratorLimits, MixedLimits,
    MomentLimit, PrequantumReport, RAY_DEPTHS,
};
pub use datum::{parse_point_key, potential_jet, KahlerPotential, PotentialJet, ToricInput, ToricKahlerDatum};
pub use fibers::{
    bs_fibers, BohrSommerfeldFiber, BoundaryCertificate, FiberCertificate, NewtonSolve, MAX_NEWTON_ITERATIONS,
};

use crate::lattice::LatticeError;
use crate::syz::SyzError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ToricError {
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error("the polytope has no lattice points")]
    EmptyPolytope,
    #[error("coefficient at {u:?} must be positive and finite (got {value})")]
    NonPositiveCoefficient { u: Vec<i64>, value: f64 },
    #[error("{u:?} is not a lattice point of the polytope")]
    NotALatticePoint { u: Vec<i64> },
    #[error("malformed lattice point key {0:?}")]
    MalformedKey(String),
    #[error("expected dimension {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("Newton solve for {u:?} did not converge (residuals {residuals:?})")]
    NewtonDiverged { u: Vec<i64>, residuals: Vec<f64> },
    #[error("no integral vertex chart certifies the boundary fiber at {u:?}")]
    NonIntegralChart { u: Vec<i64> },
    #[error("|e^(-lambda_{generator}) z^v| = {modulus} is not below 1")]
    OutsideMirrorDomain { generator: usize, modulus: f64 },
    #[error(transparent)]
    Syz(#[from] SyzError),
}

impl ToricError {
    /// Stable variant name for reports.
    pub fn kind(&self) -> &'static str {
        match self {
            ToricError::Lattice(_) => "InvalidLattice",
            ToricError::EmptyPolytope => "EmptyPolytope",
            ToricError::NonPositiveCoefficient { .. } => "NonPositiveCoefficient",
            ToricError::NotALatticePoint { .. } => "NotALatticePoint",
            ToricError::MalformedKey(_) => "MalformedKey",
            ToricError::DimensionMismatch { .. } => "DimensionMismatch",
            ToricError::NewtonDiverged { .. } => "NewtonDiverged",
            ToricError::NonIntegralChart { .. } => "NonIntegralChart",
            ToricError::OutsideMirrorDomain { .. } => "OutsideMirrorDomain",
            ToricError::Syz(_) => "TransformError",
        }
    }
}
