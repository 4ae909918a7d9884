//! The non-compact line `B = ℝ` with the section `ζ(x) = x`: the
//! transformed representatives are monomials in `w = e^{-2πiz}` on the
//! punctured plane.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use super::AbelianError;
use crate::numerics::NumericsConfig;
use crate::syz::{
    dbar_residual, forward_transform, DecayCertificate, FourierSection, PathSpaceFunction, WittenContext,
};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonomialMatch {
    pub k: i64,
    /// Degree read off from the winding of the section around the fiber.
    pub degree: i64,
    /// Fitted coefficient `c` in `c · w^k`.
    pub coefficient: f64,
    /// Max relative deviation from `c · w^k` on the sample grid.
    pub residual: f64,
    pub dbar_residual: f64,
    pub pass: bool,
}

/// Context of the graph `ζ(x) = x` over the line.
pub fn line_context(hbar: f64) -> WittenContext {
    WittenContext::new(1, hbar, |x| vec![x[0]])
}

/// `exp(-π(x - k)²)` on the single component `n = -k`.
pub fn line_representative(k: i64) -> PathSpaceFunction {
    let value = move |x: &[f64], _: &[i64]| Complex64::new((-PI * (x[0] - k as f64).powi(2)).exp(), 0.0);
    let gradient = move |x: &[f64], _: &[i64]| {
        let d = x[0] - k as f64;
        vec![Complex64::new(-2.0 * PI * d * (-PI * d * d).exp(), 0.0)]
    };
    PathSpaceFunction::new(1, DecayCertificate::new(1.0, 1.0), value)
        .with_gradient(gradient)
        .with_support(vec![vec![-k]])
}

/// Transform in the frame `e^{-πx²}`.
pub fn line_section(k: i64, cfg: &NumericsConfig) -> Result<FourierSection, AbelianError> {
    let mut c = cfg.clone();
    c.truncation = c.truncation.max(k.abs());
    Ok(forward_transform(&line_representative(k), &c)?
        .with_frame("holomorphic", |x, _| Complex64::new((-PI * x[0] * x[0]).exp(), 0.0)))
}

/// Matches the transform of the `k`-th representative with `c · w^k`.
pub fn monomial_match(k: i64, cfg: &NumericsConfig) -> Result<MonomialMatch, AbelianError> {
    let section = line_section(k, cfg)?;
    let g = cfg.grid;
    let xs: Vec<f64> = (0..cfg.samples_per_dim)
        .map(|j| -0.5 + (j as f64 + 0.3) / cfg.samples_per_dim as f64)
        .collect();

    // Winding of s(x, ·) around the fiber circle, against that of w.
    let x0 = xs[0];
    let mut winding = 0.0;
    let mut prev = section.eval_in_frame(&[x0], &[0.0]).arg();
    for j in 1..=g {
        let cur = section.eval_in_frame(&[x0], &[j as f64 / g as f64]).arg();
        let mut d = cur - prev;
        while d > PI {
            d -= 2.0 * PI;
        }
        while d < -PI {
            d += 2.0 * PI;
        }
        winding += d;
        prev = cur;
    }
    // w = e^{-2πiz} winds -1 times as y̌ goes once around.
    let degree = (-winding / (2.0 * PI)).round() as i64;

    let w = |x: f64, y: f64| (Complex64::new(0.0, -2.0 * PI) * Complex64::new(y, x)).exp();
    let mut ratios = Vec::new();
    for &x in &xs {
        for j in 0..g {
            let y = (j as f64 + 0.5) / g as f64;
            ratios.push((x, y, section.eval_in_frame(&[x], &[y]) / w(x, y).powi(degree as i32)));
        }
    }
    let mean = ratios.iter().map(|r| r.2).sum::<Complex64>() / ratios.len() as f64;
    let residual = ratios
        .iter()
        .map(|r| (r.2 - mean).norm() / mean.norm())
        .fold(0.0, f64::max);
    let dbar = dbar_residual(&section, &line_context(1.0), cfg).residual;
    Ok(MonomialMatch {
        k,
        degree,
        coefficient: mean.re,
        residual,
        dbar_residual: dbar,
        pass: degree == k && residual <= cfg.residual_tol && dbar <= cfg.residual_tol,
    })
}
