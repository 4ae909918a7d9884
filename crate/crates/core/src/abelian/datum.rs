use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::AbelianError;

const COMMUTE_TOL: f64 = 1e-12;

/// Values of the two bilinear relations for the period and polarization:
/// the first should vanish, the second should be positive definite.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BilinearResiduals {
    /// Max-norm of the first relation.
    pub vanishing: f64,
    /// Smallest eigenvalue of the Hermitian part of the second relation.
    pub positivity: f64,
    /// Max-norm of the anti-Hermitian part of the second relation.
    pub hermiticity: f64,
}

/// Validated pair `(Ω, Q)`: real symmetric positive-definite period and
/// integral symmetric positive-definite polarization that commute.
#[derive(Debug, Clone, PartialEq)]
pub struct AbelianMirrorDatum {
    dim: usize,
    period: DMatrix<f64>,
    polarization: Vec<Vec<i64>>,
    bilinear: BilinearResiduals,
}

/// JSON payload `{ "Omega": [[..]], "Q": [[..]] }`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AbelianInput {
    #[serde(rename = "Omega")]
    pub omega: Vec<Vec<f64>>,
    #[serde(rename = "Q")]
    pub q: Vec<Vec<f64>>,
}

impl AbelianInput {
    pub fn validate(&self) -> Result<AbelianMirrorDatum, AbelianError> {
        validate_datum(&self.omega, &self.q)
    }
}

fn to_matrix(rows: &[Vec<f64>], name: &'static str) -> Result<DMatrix<f64>, AbelianError> {
    let n = rows.len();
    if n == 0 || rows.iter().any(|r| r.len() != n) {
        return Err(AbelianError::NotSquare { which: name });
    }
    if rows.iter().flatten().any(|x| !x.is_finite()) {
        return Err(AbelianError::NotFinite { which: name });
    }
    Ok(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
}

fn check_symmetric_pd(m: &DMatrix<f64>, name: &'static str) -> Result<(), AbelianError> {
    let scale = m.amax().max(1.0);
    if (m - m.transpose()).amax() > 1e-12 * scale {
        return Err(AbelianError::NotSymmetric { which: name });
    }
    if m.clone().cholesky().is_none() {
        return Err(AbelianError::NotPositiveDefinite { which: name });
    }
    Ok(())
}

/// Validates `(Ω, Q)` and evaluates the bilinear relations.
pub fn validate_datum(omega: &[Vec<f64>], q: &[Vec<f64>]) -> Result<AbelianMirrorDatum, AbelianError> {
    let period = to_matrix(omega, "Omega")?;
    let qf = to_matrix(q, "Q")?;
    if period.nrows() != qf.nrows() {
        return Err(AbelianError::DimensionMismatch {
            omega: period.nrows(),
            q: qf.nrows(),
        });
    }
    check_symmetric_pd(&period, "Omega")?;
    if qf.iter().any(|x| (x - x.round()).abs() > 1e-12) {
        return Err(AbelianError::NotIntegral);
    }
    check_symmetric_pd(&qf, "Q")?;
    let commutator = (&qf * &period - &period * &qf).amax();
    if commutator > COMMUTE_TOL * period.amax().max(1.0) * qf.amax().max(1.0) {
        return Err(AbelianError::DoNotCommute { commutator });
    }
    let n = period.nrows();
    let polarization = (0..n)
        .map(|i| (0..n).map(|j| qf[(i, j)].round() as i64).collect())
        .collect();
    let bilinear = bilinear_residuals(&period, &qf);
    Ok(AbelianMirrorDatum {
        dim: n,
        period,
        polarization,
        bilinear,
    })
}

/// Evaluates `(I  iΩ) J⁻¹ (I; iΩ)` and `-i (I  iΩ) J⁻¹ (I; -iΩ)` with
/// `J = [[0, Q], [-Q, 0]]`, as full complex block products.
pub fn bilinear_residuals(period: &DMatrix<f64>, q: &DMatrix<f64>) -> BilinearResiduals {
    let n = period.nrows();
    let c = |m: &DMatrix<f64>| m.map(|x| Complex64::new(x, 0.0));
    let i = Complex64::new(0.0, 1.0);
    let mut j = DMatrix::<Complex64>::zeros(2 * n, 2 * n);
    j.view_mut((0, n), (n, n)).copy_from(&c(q));
    j.view_mut((n, 0), (n, n)).copy_from(&c(&(-q)));
    let j_inv = j.try_inverse().expect("Q is invertible");

    let omega = c(period);
    let mut row = DMatrix::<Complex64>::zeros(n, 2 * n);
    row.view_mut((0, 0), (n, n)).copy_from(&DMatrix::identity(n, n));
    row.view_mut((0, n), (n, n)).copy_from(&(&omega * i));
    let col = |sign: f64| {
        let mut m = DMatrix::<Complex64>::zeros(2 * n, n);
        m.view_mut((0, 0), (n, n)).copy_from(&DMatrix::identity(n, n));
        m.view_mut((n, 0), (n, n)).copy_from(&(&omega * (i * sign)));
        m
    };
    let first = &row * &j_inv * col(1.0);
    let second = (&row * &j_inv * col(-1.0)) * (-i);

    let herm = (&second + second.adjoint()) * Complex64::new(0.5, 0.0);
    let anti = (&second - second.adjoint()) * Complex64::new(0.5, 0.0);
    let herm_real = DMatrix::from_fn(2 * n, 2 * n, |a, b| {
        // Real embedding of the Hermitian matrix preserves its spectrum.
        let (blk_r, blk_c) = (a / n, b / n);
        let (r, cc) = (a % n, b % n);
        let z = herm[(r, cc)];
        match (blk_r, blk_c) {
            (0, 0) | (1, 1) => z.re,
            (0, 1) => -z.im,
            _ => z.im,
        }
    });
    let positivity = SymmetricEigen::new(herm_real).eigenvalues.min();
    BilinearResiduals {
        vanishing: first.iter().map(|z| z.norm()).fold(0.0, f64::max),
        positivity,
        hermiticity: anti.iter().map(|z| z.norm()).fold(0.0, f64::max),
    }
}

impl AbelianMirrorDatum {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn period(&self) -> &DMatrix<f64> {
        &self.period
    }

    pub fn polarization(&self) -> &[Vec<i64>] {
        &self.polarization
    }

    pub fn polarization_f64(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.dim, self.dim, |i, j| self.polarization[i][j] as f64)
    }

    /// The symmetric positive-definite product `QΩ`.
    pub fn q_omega(&self) -> DMatrix<f64> {
        let p = &self.polarization_f64() * &self.period;
        (&p + p.transpose()) * 0.5
    }

    pub fn det_q(&self) -> i64 {
        crate::lattice::exact::int_det(&self.polarization)
    }

    pub fn bilinear(&self) -> &BilinearResiduals {
        &self.bilinear
    }
}
