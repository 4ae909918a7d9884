use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use super::datum::{KahlerPotential, ToricKahlerDatum};
use super::ToricError;
use crate::numerics::{central_difference, empirical_order, tensor_grid, NumericsConfig};

/// Depths along the rays at which limits are sampled.
pub const RAY_DEPTHS: [f64; 3] = [-1.0, -2.0, -3.0];

/// Agreement of the curvature of the prequantum connection with the Kähler
/// form on a sample grid, computed along two independent routes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PrequantumReport {
    /// Max of the two residuals below.
    pub residual: f64,
    /// `|FD Hessian from the analytic gradient − analytic Hessian|` at `h`.
    pub hessian_residual: f64,
    /// Same at `h/2`.
    pub hessian_residual_half: f64,
    pub order: f64,
    /// `|4 ∂_z∂_z̄ φ − Hess φ|` with the Wirtinger derivatives taken by
    /// finite differences of `φ` alone.
    pub kahler_residual: f64,
    /// Largest imaginary part of the `(1,1)` coefficients.
    pub kahler_imaginary: f64,
    pub h: f64,
    pub samples: usize,
    pub tolerance: f64,
    pub pass: bool,
}

fn hessian_from_gradient(pot: &KahlerPotential, xi: &[f64], cfg: &NumericsConfig, h: f64) -> DMatrix<f64> {
    let n = pot.dim();
    DMatrix::from_fn(n, n, |j, k| {
        central_difference(
            |s| {
                let mut x = xi.to_vec();
                x[k] += s;
                pot.gradient(&x)[j]
            },
            h,
            cfg.fd_order,
        )
    })
}

/// `∂_{z_j} ∂_{z̄_k} φ` on `(y̌, ξ)` with `z = y̌ + iξ`, by nested
/// central differences of the potential treated as a function of both.
fn wirtinger_coefficients(pot: &KahlerPotential, xi: &[f64], cfg: &NumericsConfig) -> DMatrix<Complex64> {
    let n = pot.dim();
    let h = cfg.fd_step;
    let i = Complex64::new(0.0, 1.0);
    // The potential is invariant along the fibers; it still enters as a
    // function of both so the y̌-derivatives are taken, not assumed zero.
    let f = |_: &[f64], x: &[f64]| Complex64::new(pot.value(x), 0.0);
    // ∂/∂z̄_k = ½(∂_{y_k} + i∂_{ξ_k}), ∂/∂z_j = ½(∂_{y_j} − i∂_{ξ_j}).
    let dbar = |y: &[f64], x: &[f64], k: usize| -> Complex64 {
        let dy = central_difference(
            |s| {
                let mut yy = y.to_vec();
                yy[k] += s;
                f(&yy, x)
            },
            h,
            cfg.fd_order,
        );
        let dx = central_difference(
            |s| {
                let mut xx = x.to_vec();
                xx[k] += s;
                f(y, &xx)
            },
            h,
            cfg.fd_order,
        );
        (dy + i * dx) * 0.5
    };
    let y0 = vec![0.0; n];
    DMatrix::from_fn(n, n, |j, k| {
        let dy = central_difference(
            |s| {
                let mut yy = y0.clone();
                yy[j] += s;
                dbar(&yy, xi, k)
            },
            h,
            cfg.fd_order,
        );
        let dx = central_difference(
            |s| {
                let mut xx = xi.to_vec();
                xx[j] += s;
                dbar(&y0, &xx, k)
            },
            h,
            cfg.fd_order,
        );
        (dy - i * dx) * 0.5
    })
}

fn base_samples(dim: usize, cfg: &NumericsConfig) -> Vec<Vec<f64>> {
    tensor_grid(dim, cfg.samples_per_dim, -0.5, 0.5, 0.3)
}

/// Compares `Hess φ` (the curvature coefficients `i/2π F = Σ φ_jk dy̌_k ∧ dξ_j`)
/// against finite differences of `dφ` and against `ω̌ = 2i∂∂̄φ`.
pub fn prequantum_residual(datum: &ToricKahlerDatum, cfg: &NumericsConfig) -> PrequantumReport {
    let pot = datum.potential();
    let points = base_samples(datum.dim(), cfg);
    let h = cfg.fd_step;
    let mut coarse: f64 = 0.0;
    let mut fine: f64 = 0.0;
    let mut kahler: f64 = 0.0;
    let mut imag: f64 = 0.0;
    for xi in &points {
        let exact = pot.jet(xi).hessian;
        coarse = coarse.max((hessian_from_gradient(pot, xi, cfg, h) - &exact).amax());
        fine = fine.max((hessian_from_gradient(pot, xi, cfg, h / 2.0) - &exact).amax());
        let w = wirtinger_coefficients(pot, xi, cfg);
        imag = imag.max(w.iter().map(|z| z.im.abs()).fold(0.0, f64::max));
        kahler = kahler.max((w.map(|z| 4.0 * z.re) - &exact).amax());
    }
    let tolerance = 1e-5;
    let residual = coarse.max(kahler);
    let order = empirical_order(coarse, fine);
    PrequantumReport {
        residual,
        hessian_residual: coarse,
        hessian_residual_half: fine,
        order,
        kahler_residual: kahler,
        kahler_imaginary: imag,
        h,
        samples: points.len(),
        tolerance,
        pass: residual <= tolerance && imag <= tolerance,
    }
}

/// `⟨dφ(t v_j), v_j⟩` at the ray depths and its distance to `-λ_j`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MomentLimit {
    pub generator: usize,
    pub limit: f64,
    pub values: Vec<f64>,
    pub residuals: Vec<f64>,
    pub decreasing: bool,
    pub pass: bool,
}

/// Evaluates the pairing along `ξ = t v_j`; the residual is computed as
/// the expected facet slack, so it stays exact down to underflow.
pub fn moment_limit_check(datum: &ToricKahlerDatum, j: usize) -> MomentLimit {
    let pot = datum.potential();
    let v: Vec<f64> = datum.fan().generator(j).iter().map(|&a| a as f64).collect();
    let mut values = Vec::new();
    let mut residuals = Vec::new();
    for t in RAY_DEPTHS {
        let xi: Vec<f64> = v.iter().map(|a| t * a).collect();
        let w = pot.weights(&xi);
        let slack = pot.expect(&w, |u| datum.slack(u, j) as f64);
        residuals.push(slack);
        values.push(slack - datum.lambda()[j] as f64);
    }
    let decreasing = residuals.windows(2).all(|w| w[1] <= w[0]);
    let pass = residuals[residuals.len() - 1] <= 1e-3 && decreasing;
    MomentLimit {
        generator: j,
        limit: -(datum.lambda()[j] as f64),
        values,
        residuals,
        decreasing,
        pass,
    }
}

/// Limits of Condition (*) at one generator of one maximal cone.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GeneratorLimits {
    pub cone: usize,
    pub generator: usize,
    /// `2e^{-4πt}(⟨dφ, v_j⟩ + a_j)` at each depth.
    pub first: Vec<f64>,
    /// `e^{-4πt} Hess φ(v_j, v_j) / 2π` at each depth.
    pub second: Vec<f64>,
    pub gaps: Vec<f64>,
    pub pass: bool,
}

/// Mixed-term decay `e^{-2π(t_j+t_k)} Hess φ(v_j, v_k)` at `t_j = t_k = t`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MixedLimits {
    pub cone: usize,
    pub generators: (usize, usize),
    pub values: Vec<f64>,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionStarReport {
    pub offsets: Vec<i64>,
    pub generators: Vec<GeneratorLimits>,
    pub mixed: Vec<MixedLimits>,
    pub tolerance: f64,
    pub pass: bool,
}

fn shrinking(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1].abs() <= w[0].abs() || w[1].abs() <= 1e-12)
}

/// Samples the three Condition (*) quantities for the section `L_φ` with
/// offsets `a` (normally `a = λ`) at `t ∈ {-1, -2, -3}`.
pub fn condition_star_report(datum: &ToricKahlerDatum, a: &[i64]) -> Result<ConditionStarReport, ToricError> {
    if a.len() != datum.fan().num_rays() {
        return Err(ToricError::DimensionMismatch {
            expected: datum.fan().num_rays(),
            found: a.len(),
        });
    }
    let tolerance = 1e-3;
    let pot = datum.potential();
    let gen = |j: usize| -> Vec<f64> { datum.fan().generator(j).iter().map(|&x| x as f64).collect() };
    let pair = |u: &[i64], j: usize| -> f64 { datum.slack(u, j) as f64 };

    let mut generators = Vec::new();
    let mut mixed = Vec::new();
    for (c, cone) in datum.fan().max_cones().iter().enumerate() {
        for &j in cone {
            let v = gen(j);
            let mut first = Vec::new();
            let mut second = Vec::new();
            for t in RAY_DEPTHS {
                let xi: Vec<f64> = v.iter().map(|x| t * x).collect();
                let w = pot.weights(&xi);
                let scale = (-4.0 * PI * t).exp();
                // ⟨dφ, v_j⟩ + a_j = E[slack_j] + (a_j − λ_j).
                let mean = pot.expect(&w, |u| pair(u, j));
                let shifted = mean + (a[j] - datum.lambda()[j]) as f64;
                let var = pot.expect(&w, |u| (pair(u, j) - mean).powi(2));
                first.push(2.0 * scale * shifted);
                second.push(scale * 4.0 * PI * var / (2.0 * PI));
            }
            let gaps: Vec<f64> = first.iter().zip(&second).map(|(x, y)| (x - y).abs()).collect();
            let pass = gaps[gaps.len() - 1] <= tolerance && shrinking(&gaps);
            generators.push(GeneratorLimits {
                cone: c,
                generator: j,
                first,
                second,
                gaps,
                pass,
            });
        }
        for (p, &j) in cone.iter().enumerate() {
            for &k in &cone[p + 1..] {
                let (vj, vk) = (gen(j), gen(k));
                let values: Vec<f64> = RAY_DEPTHS
                    .iter()
                    .map(|&t| {
                        let xi: Vec<f64> = vj.iter().zip(&vk).map(|(x, y)| t * (x + y)).collect();
                        let w = pot.weights(&xi);
                        let mj = pot.expect(&w, |u| pair(u, j));
                        let mk = pot.expect(&w, |u| pair(u, k));
                        let cov = pot.expect(&w, |u| (pair(u, j) - mj) * (pair(u, k) - mk));
                        (-4.0 * PI * t).exp() * 4.0 * PI * cov
                    })
                    .collect();
                let pass = values[values.len() - 1].abs() <= tolerance && shrinking(&values);
                mixed.push(MixedLimits {
                    cone: c,
                    generators: (j, k),
                    values,
                    pass,
                });
            }
        }
    }
    let pass = generators.iter().all(|g| g.pass) && mixed.iter().all(|m| m.pass);
    Ok(ConditionStarReport {
        offsets: a.to_vec(),
        generators,
        mixed,
        tolerance,
        pass,
    })
}
