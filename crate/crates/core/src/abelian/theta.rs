use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::points::{coset_member, is_critical};
use super::{AbelianError, AbelianMirrorDatum};
use crate::lattice::exact::adjugate;
use crate::numerics::{numerical_rank, seeded_points, NumericsConfig, RankReport};
use crate::syz::{
    dbar_residual, forward_transform, sample_points, DecayCertificate, FourierSection, PathSpaceFunction,
    ResidualReport, WittenContext,
};

/// Base box on which the Gaussian certificates of the representatives hold.
pub const WORKING_BOX: (f64, f64) = (-0.5, 1.5);

fn rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
        .collect()
}

fn quad(a: &[Vec<f64>], t: &[f64]) -> f64 {
    a.iter()
        .zip(t)
        .map(|(row, ti)| ti * row.iter().zip(t).map(|(x, y)| x * y).sum::<f64>())
        .sum()
}

/// Witten context of the graph of `x ↦ Qx` with period `Ω`.
pub fn abelian_context(datum: &AbelianMirrorDatum, hbar: f64) -> Result<WittenContext, AbelianError> {
    let q = datum.polarization().to_vec();
    Ok(WittenContext::with_period(datum.period().clone(), hbar, move |x| {
        q.iter()
            .map(|row| row.iter().zip(x).map(|(&a, b)| a as f64 * b).sum())
            .collect()
    })?)
}

/// The Gaussian `exp(-πħ⁻¹ tᵀQΩt)`, `t = x + Q⁻¹n`, on the components `n`
/// lying over the critical point `x_k` (those with `Q⁻¹n + x_k ∈ ℤⁿ`).
pub fn witten_representative(
    datum: &AbelianMirrorDatum,
    x_k: &[f64],
    hbar: f64,
) -> Result<PathSpaceFunction, AbelianError> {
    let n = datum.dim();
    if x_k.len() != n || !is_critical(datum, x_k, 1e-9) {
        return Err(AbelianError::NotACriticalPoint);
    }
    if !(hbar > 0.0) {
        return Err(AbelianError::Syz(crate::syz::SyzError::InvalidHbar(hbar)));
    }
    let q = datum.polarization();
    let shift: Vec<i64> = q
        .iter()
        .map(|row| row.iter().zip(x_k).map(|(&a, b)| a as f64 * b).sum::<f64>().round() as i64)
        .collect();
    let adj = adjugate(q);
    let det = datum.det_q();
    let qo = rows(&datum.q_omega());
    let qinv = rows(&datum.polarization_f64().try_inverse().expect("Q is invertible"));

    let lam_max = datum.q_omega().symmetric_eigenvalues().max();
    let omega_qinv = {
        let m = datum.period() * datum.polarization_f64().try_inverse().expect("Q invertible");
        (&m + m.transpose()) * 0.5
    };
    let lam_min = omega_qinv.symmetric_eigenvalues().min();
    let box_sq = n as f64 * WORKING_BOX.0.abs().max(WORKING_BOX.1.abs()).powi(2);
    let certificate = DecayCertificate::new((PI / hbar * lam_max * box_sq).exp(), PI / (2.0 * hbar) * lam_min);

    let t_of = move |x: &[f64], label: &[i64]| -> Vec<f64> {
        (0..x.len())
            .map(|i| x[i] + qinv[i].iter().zip(label).map(|(a, &b)| a * b as f64).sum::<f64>())
            .collect()
    };
    let t_value = t_of.clone();
    let qo_value = qo.clone();
    let value = move |x: &[f64], label: &[i64]| {
        let t = t_value(x, label);
        Complex64::new((-PI / hbar * quad(&qo_value, &t)).exp(), 0.0)
    };
    let gradient = move |x: &[f64], label: &[i64]| {
        let t = t_of(x, label);
        let a = (-PI / hbar * quad(&qo, &t)).exp();
        qo.iter()
            .map(|row| {
                let g: f64 = row.iter().zip(&t).map(|(p, s)| p * s).sum();
                Complex64::new(-2.0 * PI / hbar * g * a, 0.0)
            })
            .collect()
    };
    Ok(PathSpaceFunction::new(n, certificate, value)
        .with_gradient(gradient)
        .with_support_predicate(move |label| coset_member(&adj, det, &shift, label)))
}

/// Characteristic `[0; -iQΩx_k]` of the classical theta function.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThetaCharacteristic {
    pub a: Vec<f64>,
    pub b_imag: Vec<f64>,
}

/// Transform of a Witten representative, carrying the holomorphic frame
/// `e^{-πħ⁻¹(x-x_k)ᵀQΩ(x-x_k)} e^{-2πi⟨Qx_k, y̌⟩}` and its `∂̄` certificate.
#[derive(Debug, Clone)]
pub struct ThetaFunction {
    pub datum: AbelianMirrorDatum,
    pub point: Vec<f64>,
    pub section: FourierSection,
    pub context: WittenContext,
    pub residual: ResidualReport,
    pub characteristic: ThetaCharacteristic,
}

impl ThetaFunction {
    /// Value in the holomorphic frame.
    pub fn eval(&self, x: &[f64], y: &[f64]) -> Complex64 {
        self.section.eval_in_frame(x, y)
    }

    /// Value in the unitary frame.
    pub fn eval_unitary(&self, x: &[f64], y: &[f64]) -> Complex64 {
        self.section.eval(x, y)
    }

    pub fn hbar(&self) -> f64 {
        self.context.hbar()
    }
}

pub fn theta_function(
    datum: &AbelianMirrorDatum,
    x_k: &[f64],
    cfg: &NumericsConfig,
) -> Result<ThetaFunction, AbelianError> {
    let hbar = cfg.hbar;
    let rep = witten_representative(datum, x_k, hbar)?;
    let mut cert_cfg = cfg.clone();
    cert_cfg.working_box = WORKING_BOX;
    let qo = rows(&datum.q_omega());
    let qxk: Vec<f64> = datum
        .polarization()
        .iter()
        .map(|row| row.iter().zip(x_k).map(|(&a, b)| a as f64 * b).sum())
        .collect();
    let xk = x_k.to_vec();
    let qxk_frame = qxk.clone();
    let section = forward_transform(&rep, &cert_cfg)?.with_frame("holomorphic", move |x, y| {
        let d: Vec<f64> = x.iter().zip(&xk).map(|(a, b)| a - b).collect();
        let phase: f64 = qxk_frame.iter().zip(y).map(|(a, b)| a * b).sum();
        Complex64::from_polar((-PI / hbar * quad(&qo, &d)).exp(), -2.0 * PI * phase)
    });
    let context = abelian_context(datum, hbar)?;
    let residual = dbar_residual(&section, &context, cfg);
    if !residual.pass {
        return Err(AbelianError::ResidualTooLarge {
            residual: residual.residual,
            tolerance: residual.tolerance,
        });
    }
    let b_imag = datum
        .q_omega()
        .row_iter()
        .map(|row| -row.iter().zip(x_k).map(|(a, b)| a * b).sum::<f64>())
        .collect();
    Ok(ThetaFunction {
        datum: datum.clone(),
        point: x_k.to_vec(),
        section,
        context,
        residual,
        characteristic: ThetaCharacteristic {
            a: vec![0.0; datum.dim()],
            b_imag,
        },
    })
}

/// Quasi-periodicity of a theta function under `x ↦ x + e_j`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AxisFactor {
    pub axis: usize,
    /// Modulus prefactor `e^{πħ⁻¹(QΩ)_jj}` of the holomorphic-frame factor.
    pub modulus: f64,
    /// Max `|ratio / expected - 1|` in the holomorphic frame.
    pub frame_deviation: f64,
    /// Max `|ratio / e^{-2πi⟨Qe_j, y̌⟩} - 1|` in the unitary frame.
    pub unitary_deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AutomorphyReport {
    pub factors: Vec<AxisFactor>,
    /// Max `|θ(x, y̌ + e_j) - θ(x, y̌)|` over the sample.
    pub fiber_periodicity: f64,
    pub samples: usize,
    pub tolerance: f64,
    pub pass: bool,
}

/// Checks on a sample grid that `θ(x + e_j, y̌) / θ(x, y̌)` equals the
/// factor `e^{πħ⁻¹(QΩ)_jj} e^{-2πi⟨Qe_j, w⟩}`, `w = y̌ + iħ⁻¹Ω(x - x_k)`,
/// and that the unitary-frame ratio is `e^{-2πi⟨Qe_j, y̌⟩}`.
pub fn automorphy_check(theta: &ThetaFunction, cfg: &NumericsConfig) -> Result<AutomorphyReport, AbelianError> {
    let datum = &theta.datum;
    let n = datum.dim();
    let hbar = theta.hbar();
    let mut sample_cfg = cfg.clone();
    sample_cfg.sample_box = (-0.5, 0.5);
    let points = sample_points(n, &sample_cfg);
    let q = datum.polarization();
    let qo = datum.q_omega();
    let omega = datum.period();
    let i = Complex64::new(0.0, 1.0);

    let mut factors = Vec::new();
    for j in 0..n {
        let devs: Vec<(f64, f64)> = points
            .par_iter()
            .map(|(x, y)| {
                let mut xs = x.clone();
                xs[j] += 1.0;
                let d: Vec<f64> = x.iter().zip(&theta.point).map(|(a, b)| a - b).collect();
                // ⟨Qe_j, w⟩ with w complex.
                let w_dot: Complex64 = (0..n)
                    .map(|r| {
                        let om: f64 = (0..n).map(|c| omega[(r, c)] * d[c]).sum();
                        (y[r] + i * om / hbar) * q[r][j] as f64
                    })
                    .sum();
                let expected = (PI / hbar * qo[(j, j)]).exp() * (-2.0 * PI * i * w_dot).exp();
                let ratio = theta.eval(&xs, y) / theta.eval(x, y);
                let qy: f64 = (0..n).map(|r| q[r][j] as f64 * y[r]).sum();
                let unitary = theta.eval_unitary(&xs, y) / theta.eval_unitary(x, y);
                (
                    (ratio / expected - 1.0).norm(),
                    (unitary / Complex64::from_polar(1.0, -2.0 * PI * qy) - 1.0).norm(),
                )
            })
            .collect();
        let frame_deviation = devs.iter().map(|d| d.0).fold(0.0, f64::max);
        let unitary_deviation = devs.iter().map(|d| d.1).fold(0.0, f64::max);
        if frame_deviation.max(unitary_deviation) > cfg.residual_tol {
            return Err(AbelianError::NonConstantRatio {
                axis: j,
                deviation: frame_deviation.max(unitary_deviation),
            });
        }
        factors.push(AxisFactor {
            axis: j,
            modulus: (PI / hbar * qo[(j, j)]).exp(),
            frame_deviation,
            unitary_deviation,
        });
    }
    let fiber_periodicity = points
        .par_iter()
        .map(|(x, y)| {
            (0..n)
                .map(|j| {
                    let mut ys = y.clone();
                    ys[j] += 1.0;
                    (theta.eval(x, &ys) - theta.eval(x, y)).norm()
                })
                .fold(0.0, f64::max)
        })
        .collect::<Vec<_>>()
        .into_iter()
        .fold(0.0, f64::max);
    Ok(AutomorphyReport {
        factors,
        fiber_periodicity,
        samples: points.len(),
        tolerance: cfg.residual_tol,
        pass: true,
    })
}

/// Numerical rank of the unitary-frame evaluation matrix of the given
/// theta functions at as many seeded generic points.
pub fn theta_rank(thetas: &[ThetaFunction], cfg: &NumericsConfig) -> RankReport {
    let Some(first) = thetas.first() else {
        return numerical_rank(&[], 1e-6);
    };
    let n = first.datum.dim();
    let count = thetas.len();
    let xs = seeded_points(n, count, -0.25, 0.25, cfg.seed);
    let ys = seeded_points(n, count, 0.0, 1.0, cfg.seed.wrapping_add(1));
    let rows: Vec<Vec<Complex64>> = thetas
        .par_iter()
        .map(|t| xs.iter().zip(&ys).map(|(x, y)| t.eval_unitary(x, y)).collect())
        .collect();
    numerical_rank(&rows, 1e-6)
}
