use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::function::PathSpaceFunction;
use super::transform::{forward_transform, forward_transform_one_form, FourierSection};
use super::witten::{witten_apply, WittenContext};
use super::SyzError;
use crate::numerics::{central_difference, empirical_order, tensor_grid, NumericsConfig};

/// Outcome of a sampled residual check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidualReport {
    pub residual: f64,
    pub h: f64,
    #[serde(rename = "R")]
    pub truncation: i64,
    #[serde(rename = "G")]
    pub grid: usize,
    pub tolerance: f64,
    pub pass: bool,
}

impl ResidualReport {
    fn new(residual: f64, cfg: &NumericsConfig) -> Self {
        Self {
            residual,
            h: cfg.fd_step,
            truncation: cfg.truncation,
            grid: cfg.grid,
            tolerance: cfg.residual_tol,
            pass: residual <= cfg.residual_tol,
        }
    }
}

/// Joint sample points `(ξ, y̌)`: `ξ` on a shifted tensor grid of the
/// sample box, `y̌` on a differently shifted grid of the unit fiber.
pub fn sample_points(dim: usize, cfg: &NumericsConfig) -> Vec<(Vec<f64>, Vec<f64>)> {
    let s = cfg.samples_per_dim;
    let (lo, hi) = cfg.sample_box;
    let xs = tensor_grid(dim, s, lo, hi, 0.3);
    let ys = tensor_grid(dim, s, 0.0, 1.0, 0.7);
    xs.iter()
        .flat_map(|x| ys.iter().map(move |y| (x.clone(), y.clone())))
        .collect()
}

/// `(∂̄ + iπ Σ ζ_j dz̄^j) s` at one point by central differences, with
/// `∂/∂z̄_j = ½(∂_{y̌_j} + iħ (Ω⁻¹ ∂_ξ)_j)`.
pub fn twisted_dbar_at(
    s: &FourierSection,
    ctx: &WittenContext,
    xi: &[f64],
    y: &[f64],
    cfg: &NumericsConfig,
) -> Vec<Complex64> {
    let dim = s.dim();
    let (h, order) = (cfg.fd_step, cfg.fd_order);
    let d_xi: Vec<Complex64> = (0..dim)
        .map(|k| {
            central_difference(
                |t| {
                    let mut p = xi.to_vec();
                    p[k] += t;
                    s.eval(&p, y)
                },
                h,
                order,
            )
        })
        .collect();
    let value = s.eval(xi, y);
    let zeta = ctx.slope(xi);
    let inv = ctx.period_inverse();
    let i = Complex64::new(0.0, 1.0);
    (0..dim)
        .map(|j| {
            let d_y = central_difference(
                |t| {
                    let mut q = y.to_vec();
                    q[j] += t;
                    s.eval(xi, &q)
                },
                h,
                order,
            );
            let base: Complex64 = (0..dim).map(|k| d_xi[k] * inv[(j, k)]).sum();
            (d_y + i * ctx.hbar() * base) * 0.5 + i * std::f64::consts::PI * zeta[j] * value
        })
        .collect()
}

fn sup_over_samples(dim: usize, cfg: &NumericsConfig, f: impl Fn(&[f64], &[f64]) -> f64 + Sync) -> f64 {
    let values: Vec<f64> = sample_points(dim, cfg).par_iter().map(|(x, y)| f(x, y)).collect();
    values.into_iter().fold(0.0, f64::max)
}

/// Sup over the sample grid of the twisted `∂̄` of `s`.
pub fn dbar_residual(s: &FourierSection, ctx: &WittenContext, cfg: &NumericsConfig) -> ResidualReport {
    let r = sup_over_samples(s.dim(), cfg, |x, y| {
        twisted_dbar_at(s, ctx, x, y, cfg)
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    });
    ResidualReport::new(r, cfg)
}

/// Sup over the sample grid of `𝓕(d_W f) - ∂̄_ħ 𝓕(f)`.
pub fn intertwining_residual(
    f: &PathSpaceFunction,
    ctx: &WittenContext,
    cfg: &NumericsConfig,
) -> Result<ResidualReport, SyzError> {
    let section = forward_transform(f, cfg)?;
    let form = forward_transform_one_form(&witten_apply(f, ctx, cfg)?, ctx, cfg)?;
    let r = sup_over_samples(f.dim(), cfg, |x, y| {
        let lhs = form.eval(x, y);
        let rhs = twisted_dbar_at(&section, ctx, x, y, cfg);
        lhs.iter().zip(&rhs).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    });
    Ok(ResidualReport::new(r, cfg))
}

/// Residuals at steps `h` and `h/2` with the observed order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RefinementStudy {
    pub coarse: ResidualReport,
    pub fine: ResidualReport,
    pub reduction: f64,
    pub order: f64,
}

impl RefinementStudy {
    pub fn from_pair(coarse: ResidualReport, fine: ResidualReport) -> Self {
        let reduction = coarse.residual / fine.residual;
        let order = empirical_order(coarse.residual, fine.residual);
        Self {
            coarse,
            fine,
            reduction,
            order,
        }
    }
}

pub fn dbar_refinement(s: &FourierSection, ctx: &WittenContext, cfg: &NumericsConfig) -> RefinementStudy {
    let fine_cfg = cfg.clone().with_fd_step(cfg.fd_step / 2.0);
    RefinementStudy::from_pair(dbar_residual(s, ctx, cfg), dbar_residual(s, ctx, &fine_cfg))
}
