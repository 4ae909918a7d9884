//! Flat tori: the graph of `x ↦ Qx` in `ℝ²ⁿ/ℤ²ⁿ` with symplectic form
//! built from the period `Ω`, its intersection points with the zero
//! section, Witten representatives and the theta functions they transform
//! into.

mod concentration;
mod datum;
mod points;
pub mod semiflat;
mod theta;

use thiserror::Error;

pub use concentration::{concentration_profile, ConcentrationRow, ConcentrationTable};
pub use datum::{bilinear_residuals, validate_datum, AbelianInput, AbelianMirrorDatum, BilinearResiduals};
pub use points::{intersection_points, is_critical, IntersectionPoint};
pub use theta::{
    abelian_context, automorphy_check, theta_function, theta_rank, witten_representative, AutomorphyReport, AxisFactor,
    ThetaCharacteristic, ThetaFunction, WORKING_BOX,
};

use crate::syz::SyzError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AbelianError {
    #[error("{which} is not a square matrix")]
    NotSquare { which: &'static str },
    #[error("{which} has non-finite entries")]
    NotFinite { which: &'static str },
    #[error("Omega is {omega}x{omega} but Q is {q}x{q}")]
    DimensionMismatch { omega: usize, q: usize },
    #[error("{which} is not symmetric")]
    NotSymmetric { which: &'static str },
    #[error("{which} is not positive definite")]
    NotPositiveDefinite { which: &'static str },
    #[error("Q is not integral")]
    NotIntegral,
    #[error("Q and Omega do not commute (max commutator entry {commutator:.3e})")]
    DoNotCommute { commutator: f64 },
    #[error("Qx is not integral at the requested point")]
    NotACriticalPoint,
    #[error("dbar residual {residual:.3e} exceeds tolerance {tolerance:.1e}")]
    ResidualTooLarge { residual: f64, tolerance: f64 },
    #[error("automorphy ratio along axis {axis} deviates by {deviation:.3e}")]
    NonConstantRatio { axis: usize, deviation: f64 },
    #[error("radii must be positive")]
    InvalidRadius,
    #[error("hbar values must be positive and strictly decreasing")]
    InvalidHbarSequence,
    #[error(transparent)]
    Syz(#[from] SyzError),
}

impl AbelianError {
    /// Stable variant name for reports.
    pub fn kind(&self) -> &'static str {
        match self {
            AbelianError::NotSquare { .. } => "NotSquare",
            AbelianError::NotFinite { .. } => "NotFinite",
            AbelianError::DimensionMismatch { .. } => "DimensionMismatch",
            AbelianError::NotSymmetric { .. } => "NotSymmetric",
            AbelianError::NotPositiveDefinite { .. } => "NotPositiveDefinite",
            AbelianError::NotIntegral => "NotIntegral",
            AbelianError::DoNotCommute { .. } => "DoNotCommute",
            AbelianError::NotACriticalPoint => "NotACriticalPoint",
            AbelianError::ResidualTooLarge { .. } => "ResidualTooLarge",
            AbelianError::NonConstantRatio { .. } => "NonConstantRatio",
            AbelianError::InvalidRadius => "InvalidRadius",
            AbelianError::InvalidHbarSequence => "InvalidHbarSequence",
            AbelianError::Syz(_) => "TransformError",
        }
    }
}
