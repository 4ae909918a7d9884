use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::function::{certificate_ratio, DecayCertificate, PathSpaceFunction, PathSpaceOneForm, Support};
use super::SyzError;
use crate::numerics::NumericsConfig;

pub type SlopeFn = Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;

/// Which difference of fiber positions enters the area one-form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize)]
pub enum AreaOrientation {
    /// Section position minus zero-section position (lattice label `m + ζ`).
    #[default]
    SectionMinusZero,
    /// Zero-section position minus section position (`m - ζ`).
    ZeroMinusSection,
}

/// Data of a graph section over the base needed to twist `d` and `∂̄`:
/// fiber position `ζ(ξ)`, period matrix `Ω` and `ħ`.
#[derive(Clone)]
pub struct WittenContext {
    dim: usize,
    hbar: f64,
    period: DMatrix<f64>,
    period_inv: DMatrix<f64>,
    slope: SlopeFn,
    orientation: AreaOrientation,
}

impl std::fmt::Debug for WittenContext {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("WittenContext")
            .field("dim", &self.dim)
            .field("hbar", &self.hbar)
            .field("period", &self.period)
            .field("orientation", &self.orientation)
            .finish()
    }
}

impl WittenContext {
    /// Context with identity period.
    pub fn new(dim: usize, hbar: f64, slope: impl Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static) -> Self {
        Self::with_period(DMatrix::identity(dim, dim), hbar, slope).expect("identity is invertible")
    }

    pub fn with_period(
        period: DMatrix<f64>,
        hbar: f64,
        slope: impl Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
    ) -> Result<Self, SyzError> {
        let dim = period.nrows();
        let period_inv = period.clone().try_inverse().ok_or(SyzError::SingularPeriod)?;
        if !(hbar > 0.0) {
            return Err(SyzError::InvalidHbar(hbar));
        }
        Ok(Self {
            dim,
            hbar,
            period,
            period_inv,
            slope: Arc::new(slope),
            orientation: AreaOrientation::default(),
        })
    }

    /// Context for the zero section itself.
    pub fn flat(dim: usize, hbar: f64) -> Self {
        Self::new(dim, hbar, move |_| vec![0.0; dim])
    }

    pub fn with_orientation(mut self, orientation: AreaOrientation) -> Self {
        self.orientation = orientation;
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn period(&self) -> &DMatrix<f64> {
        &self.period
    }

    pub fn period_inverse(&self) -> &DMatrix<f64> {
        &self.period_inv
    }

    pub fn orientation(&self) -> AreaOrientation {
        self.orientation
    }

    pub fn slope(&self, xi: &[f64]) -> Vec<f64> {
        (self.slope)(xi)
    }

    /// Coefficients of the area one-form on component `m`:
    /// `ħ⁻¹ Ω (m ± ζ(ξ))`.
    pub fn area_form(&self, xi: &[f64], m: &[i64]) -> Vec<f64> {
        let zeta = self.slope(xi);
        let sign = match self.orientation {
            AreaOrientation::SectionMinusZero => 1.0,
            AreaOrientation::ZeroMinusSection => -1.0,
        };
        let d: Vec<f64> = m.iter().zip(&zeta).map(|(&mk, z)| mk as f64 + sign * z).collect();
        (0..self.dim)
            .map(|j| (0..self.dim).map(|k| self.period[(j, k)] * d[k]).sum::<f64>() / self.hbar)
            .collect()
    }

    fn slope_bound(&self, cfg: &NumericsConfig) -> f64 {
        let (lo, hi) = cfg.working_box;
        crate::numerics::tensor_grid(self.dim, cfg.samples_per_dim + 1, lo, hi, 0.0)
            .iter()
            .map(|xi| self.slope(xi).iter().map(|z| z * z).sum::<f64>().sqrt())
            .fold(0.0, f64::max)
    }
}

/// `d_W f = d f + 2π (area form) · f`, one coefficient per `dξ^k`.
///
/// Uses the exact gradient of `f` when present and central differences
/// with the configured step otherwise.
pub fn witten_apply(
    f: &PathSpaceFunction,
    ctx: &WittenContext,
    cfg: &NumericsConfig,
) -> Result<PathSpaceOneForm, SyzError> {
    let dim = f.dim();
    if dim != ctx.dim() {
        return Err(SyzError::DimensionMismatch {
            expected: ctx.dim(),
            found: dim,
        });
    }
    if !f.has_exact_gradient() && !(cfg.fd_step > 0.0) {
        return Err(SyzError::MissingDerivative);
    }
    let step = Some((cfg.fd_step, cfg.fd_order));

    // Envelope: |m + ζ| e^{-c|m|²} ≤ (|ζ| + (ce)^{-1/2}) e^{-c|m|²/2}; the
    // derivative part is sampled.
    let cert = f.certificate();
    let polynomial = cert.constant * 2.0 * std::f64::consts::PI * ctx.period().norm() / ctx.hbar()
        * (ctx.slope_bound(cfg) + 1.0 / (cert.rate * std::f64::consts::E).sqrt());
    let derivative_rate = cert.rate / 2.0;
    let mut derivative_constant: f64 = cert.constant;
    {
        let probe = DecayCertificate::new(1.0, derivative_rate);
        let fc = f.clone();
        let worst = certificate_ratio(dim, f.support(), probe, cfg, |xi, m| {
            fc.gradient(xi, m, step)
                .map(|g| g.iter().map(|z| z.norm()).fold(0.0, f64::max))
                .unwrap_or(f64::INFINITY)
        });
        derivative_constant = derivative_constant.max(2.0 * worst);
    }
    let certificate = DecayCertificate::new(polynomial + derivative_constant, derivative_rate);

    let components = (0..dim)
        .map(|k| {
            let fc = f.clone();
            let c = ctx.clone();
            let g = PathSpaceFunction::new(dim, certificate, move |xi, m| {
                let grad = fc.gradient(xi, m, step).expect("derivative access checked");
                let area = c.area_form(xi, m);
                grad[k] + fc.eval(xi, m) * (2.0 * std::f64::consts::PI * area[k])
            });
            match f.support() {
                Support::Finite(list) => g.with_support(list.clone()),
                Support::Predicate(p) => {
                    let p = p.clone();
                    g.with_support_predicate(move |m| p(m))
                }
                Support::All => g,
            }
        })
        .collect();
    Ok(PathSpaceOneForm::new(components))
}

/// Helper for tests and callers that need the value of `d_W f` directly.
pub fn witten_value(
    f: &PathSpaceFunction,
    ctx: &WittenContext,
    xi: &[f64],
    m: &[i64],
    cfg: &NumericsConfig,
) -> Result<Vec<Complex64>, SyzError> {
    let grad = f.gradient(xi, m, Some((cfg.fd_step, cfg.fd_order)))?;
    let area = ctx.area_form(xi, m);
    let v = f.eval(xi, m);
    Ok(grad
        .into_iter()
        .zip(area)
        .map(|(g, a)| g + v * (2.0 * std::f64::consts::PI * a))
        .collect())
}
