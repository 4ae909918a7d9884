//! Fourier-type transform between path-space functions over a torus
//! fibration and sections of the mirror line bundle, together with the
//! Witten-twisted differential and the matching twisted `∂̄`.
//!
//! A path-space function is a map `(ξ, m) ↦ f(ξ, m)` on `base × ℤⁿ`; its
//! transform is the fiber Fourier series `Σ_m f(ξ, m) e^{2πi⟨m, y̌⟩}`.
//! Complex coordinates on the mirror are `z = y̌ + iħ⁻¹Ωξ`.

mod function;
mod inverse;
mod residual;
mod samples;
mod transform;
mod witten;

use thiserror::Error;

pub use function::{DecayCertificate, PathSpaceFunction, PathSpaceOneForm, Support};
pub use inverse::{coefficient_index, fiber_coefficients, fiber_grid, inverse_transform, InverseTransform};
pub use residual::{
    dbar_refinement, dbar_residual, intertwining_residual, sample_points, twisted_dbar_at, RefinementStudy,
    ResidualReport,
};
pub use samples::{FiberSamples, SampleRow};
pub use transform::{forward_transform, forward_transform_one_form, FourierForm, FourierSection};
pub use witten::{witten_apply, witten_value, AreaOrientation, WittenContext};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SyzError {
    #[error("function has no derivative callback and no finite-difference step")]
    MissingDerivative,
    #[error("decay certificate violated on the sample (worst ratio {ratio:.3e})")]
    DecayViolated { ratio: f64 },
    #[error("truncation radius {radius} is not below half the fiber grid {grid}")]
    NyquistViolated { radius: i64, grid: usize },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("period matrix is singular")]
    SingularPeriod,
    #[error("hbar must be positive (got {0})")]
    InvalidHbar(f64),
    #[error("malformed sample grid: {0}")]
    MalformedSamples(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<csv::Error> for SyzError {
    fn from(e: csv::Error) -> Self {
        SyzError::Io(e.to_string())
    }
}
