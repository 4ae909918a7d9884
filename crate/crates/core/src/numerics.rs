//! Shared numerical plumbing: configuration, finite-difference stencils,
//! integer boxes, sample grids and numerical rank.

use std::ops::{Add, Mul, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Order of the central finite-difference stencil used for derivatives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum FdOrder {
    /// Three-point stencil, error `O(h²)`.
    Second,
    /// Five-point stencil, error `O(h⁴)`.
    #[default]
    Fourth,
}

impl FdOrder {
    /// Formal order of accuracy.
    pub fn order(self) -> u32 {
        match self {
            FdOrder::Second => 2,
            FdOrder::Fourth => 4,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("truncation radius must be at least 1 (got {0})")]
    Truncation(i64),
    #[error("fiber grid size must be at least 4 (got {0})")]
    Grid(usize),
    #[error("finite-difference step must lie in (0, 0.1) (got {0})")]
    Step(f64),
    #[error("hbar must be positive (got {0})")]
    Hbar(f64),
    #[error("tolerance {name} must be positive (got {value})")]
    Tolerance { name: &'static str, value: f64 },
    #[error("sample count per dimension must be at least 1")]
    Samples,
    #[error("sample box is empty: [{0}, {1}]")]
    Box(f64, f64),
}

/// Numerical knobs shared by every analytic routine.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct NumericsConfig {
    /// Lattice truncation radius `R`, in units of `|m|∞`.
    pub truncation: i64,
    /// Fiber grid size `G` per dimension.
    pub grid: usize,
    /// Finite-difference step in base coordinates.
    pub fd_step: f64,
    pub fd_order: FdOrder,
    /// Deformation parameter ħ.
    pub hbar: f64,
    pub newton_tol: f64,
    pub residual_tol: f64,
    /// Points per dimension of the residual sample grids.
    pub samples_per_dim: usize,
    /// Base box on which decay certificates are checked.
    pub working_box: (f64, f64),
    /// Base box from which residual sample points are drawn.
    pub sample_box: (f64, f64),
    /// Seed for generic sample points.
    pub seed: u64,
}

impl Default for NumericsConfig {
    fn default() -> Self {
        Self {
            truncation: 8,
            grid: 64,
            fd_step: 1e-3,
            fd_order: FdOrder::Fourth,
            hbar: 1.0,
            newton_tol: 1e-10,
            residual_tol: 1e-6,
            samples_per_dim: 4,
            working_box: (-0.5, 1.5),
            sample_box: (0.0, 1.0),
            seed: 7,
        }
    }
}

impl NumericsConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.truncation < 1 {
            return Err(ConfigError::Truncation(self.truncation));
        }
        if self.grid < 4 {
            return Err(ConfigError::Grid(self.grid));
        }
        if !(self.fd_step > 0.0 && self.fd_step < 0.1) {
            return Err(ConfigError::Step(self.fd_step));
        }
        if !(self.hbar > 0.0 && self.hbar.is_finite()) {
            return Err(ConfigError::Hbar(self.hbar));
        }
        for (name, value) in [("newton_tol", self.newton_tol), ("residual_tol", self.residual_tol)] {
            if !(value > 0.0) {
                return Err(ConfigError::Tolerance { name, value });
            }
        }
        if self.samples_per_dim == 0 {
            return Err(ConfigError::Samples);
        }
        for b in [self.working_box, self.sample_box] {
            if !(b.0 < b.1) {
                return Err(ConfigError::Box(b.0, b.1));
            }
        }
        Ok(())
    }

    pub fn with_fd_step(mut self, h: f64) -> Self {
        self.fd_step = h;
        self
    }

    pub fn with_truncation(mut self, r: i64) -> Self {
        self.truncation = r;
        self
    }

    pub fn with_grid(mut self, g: usize) -> Self {
        self.grid = g;
        self
    }

    pub fn with_hbar(mut self, hbar: f64) -> Self {
        self.hbar = hbar;
        self
    }

    pub fn with_fd_order(mut self, order: FdOrder) -> Self {
        self.fd_order = order;
        self
    }
}

/// Central difference of a scalar- or complex-valued function of one
/// real variable at `0`, i.e. `f'(0)` approximated with step `h`.
pub fn central_difference<T, F>(f: F, h: f64, order: FdOrder) -> T
where
    T: Copy + Add<Output = T> + Sub<Output = T> + Mul<f64, Output = T>,
    F: Fn(f64) -> T,
{
    match order {
        FdOrder::Second => (f(h) - f(-h)) * (0.5 / h),
        FdOrder::Fourth => {
            let near = f(h) - f(-h);
            let far = f(2.0 * h) - f(-2.0 * h);
            (near * 8.0 - far) * (1.0 / (12.0 * h))
        }
    }
}

/// Empirical convergence order from residuals at `h` and `h/2`.
pub fn empirical_order(coarse: f64, fine: f64) -> f64 {
    (coarse / fine).log2()
}

/// All integer vectors with `|m|∞ ≤ radius`, in lexicographic order.
pub fn integer_box(dim: usize, radius: i64) -> Vec<Vec<i64>> {
    integer_range_box(&vec![-radius; dim], &vec![radius; dim])
}

/// All integer vectors `lo ≤ m ≤ hi` (componentwise), lexicographic.
pub fn integer_range_box(lo: &[i64], hi: &[i64]) -> Vec<Vec<i64>> {
    assert_eq!(lo.len(), hi.len());
    if lo.iter().zip(hi).any(|(a, b)| a > b) {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut cur = lo.to_vec();
    loop {
        out.push(cur.clone());
        let mut k = lo.len();
        loop {
            if k == 0 {
                return out;
            }
            k -= 1;
            if cur[k] < hi[k] {
                cur[k] += 1;
                cur[k + 1..].copy_from_slice(&lo[k + 1..]);
                break;
            }
        }
    }
}

/// Points of the integer shell `|m|∞ = radius`.
pub fn integer_shell(dim: usize, radius: i64) -> Vec<Vec<i64>> {
    integer_box(dim, radius)
        .into_iter()
        .filter(|m| m.iter().map(|c| c.abs()).max().unwrap_or(0) == radius)
        .collect()
}

pub fn sup_norm(m: &[i64]) -> i64 {
    m.iter().map(|c| c.abs()).max().unwrap_or(0)
}

/// Uniform tensor grid `lo + (hi - lo)(j + offset)/count`, `j = 0..count`,
/// in every one of `dim` coordinates.
pub fn tensor_grid(dim: usize, count: usize, lo: f64, hi: f64, offset: f64) -> Vec<Vec<f64>> {
    let axis: Vec<f64> = (0..count)
        .map(|j| lo + (hi - lo) * (j as f64 + offset) / count as f64)
        .collect();
    let idx = integer_range_box(&vec![0; dim], &vec![count as i64 - 1; dim]);
    idx.into_iter()
        .map(|ix| ix.iter().map(|&j| axis[j as usize]).collect())
        .collect()
}

/// Seeded uniform points in `[lo, hi)^dim`.
pub fn seeded_points(dim: usize, count: usize, lo: f64, hi: f64, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| (0..dim).map(|_| rng.random_range(lo..hi)).collect())
        .collect()
}

/// `log Σ exp(a_i)` without overflow.
pub fn log_sum_exp(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        return max;
    }
    max + values.iter().map(|v| (v - max).exp()).sum::<f64>().ln()
}

/// Singular values of a complex matrix after scaling each row to unit
/// Euclidean norm, sorted descending.
pub fn normalized_singular_values(rows: &[Vec<Complex64>]) -> Vec<f64> {
    if rows.is_empty() {
        return Vec::new();
    }
    let ncols = rows[0].len();
    let mut m = DMatrix::<Complex64>::zeros(rows.len(), ncols);
    for (i, row) in rows.iter().enumerate() {
        let norm = row.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let scale = if norm > 0.0 { 1.0 / norm } else { 0.0 };
        for (j, z) in row.iter().enumerate() {
            m[(i, j)] = z * scale;
        }
    }
    let mut sv: Vec<f64> = m.singular_values().iter().copied().collect();
    sv.sort_by(|a, b| b.partial_cmp(a).unwrap());
    sv
}

/// Numerical rank summary of an evaluation matrix.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankReport {
    pub rows: usize,
    pub cols: usize,
    pub rank: usize,
    pub smallest_singular_value: f64,
    pub threshold: f64,
}

pub fn numerical_rank(rows: &[Vec<Complex64>], threshold: f64) -> RankReport {
    let sv = normalized_singular_values(rows);
    RankReport {
        rows: rows.len(),
        cols: rows.first().map_or(0, Vec::len),
        rank: sv.iter().filter(|&&s| s > threshold).count(),
        smallest_singular_value: sv.last().copied().unwrap_or(0.0),
        threshold,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stencils_hit_their_order() {
        let f = |x: f64| (1.3 * x + 0.2).sin();
        let exact = 1.3 * 0.2f64.cos();
        for order in [FdOrder::Second, FdOrder::Fourth] {
            let e1 = (central_difference(f, 1e-2, order) - exact).abs();
            let e2 = (central_difference(f, 5e-3, order) - exact).abs();
            let p = empirical_order(e1, e2);
            assert!((p - order.order() as f64).abs() < 0.1, "{order:?}: {p}");
        }
    }

    #[test]
    fn box_and_shell_sizes() {
        assert_eq!(integer_box(2, 2).len(), 25);
        assert_eq!(integer_shell(2, 2).len(), 16);
        assert_eq!(integer_shell(1, 3), vec![vec![-3], vec![3]]);
        assert_eq!(integer_box(1, 1), vec![vec![-1], vec![0], vec![1]]);
        assert!(integer_range_box(&[1], &[0]).is_empty());
    }

    #[test]
    fn lse_is_stable() {
        assert!((log_sum_exp(&[1000.0, 1000.0]) - (1000.0 + 2f64.ln())).abs() < 1e-12);
        assert!((log_sum_exp(&[-1000.0]) + 1000.0).abs() < 1e-12);
    }

    #[test]
    fn rank_of_identity_and_duplicate_rows() {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        let r = numerical_rank(&[vec![one, zero], vec![zero, one]], 1e-6);
        assert_eq!(r.rank, 2);
        let r = numerical_rank(&[vec![one, one], vec![one * 2.0, one * 2.0]], 1e-6);
        assert_eq!(r.rank, 1);
    }

    #[test]
    fn default_config_is_valid() {
        NumericsConfig::default().validate().unwrap();
        assert!(NumericsConfig::default().with_fd_step(0.2).validate().is_err());
        assert!(NumericsConfig::default().with_grid(2).validate().is_err());
    }
}
