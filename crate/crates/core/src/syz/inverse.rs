use std::sync::{Arc, Mutex};

use num_complex::Complex64;
use rustfft::FftPlanner;

use super::function::PathSpaceFunction;
use super::transform::FourierSection;
use super::SyzError;
use crate::numerics::{integer_box, integer_range_box, NumericsConfig};

/// Uniform fiber grid points `j / G`, row-major with the last axis fastest.
pub fn fiber_grid(dim: usize, grid: usize) -> Vec<Vec<f64>> {
    integer_range_box(&vec![0; dim], &vec![grid as i64 - 1; dim])
        .into_iter()
        .map(|j| j.iter().map(|&k| k as f64 / grid as f64).collect())
        .collect()
}

/// Discrete fiber averages `(1/Gⁿ) Σ_j s(y_j) e^{-2πi⟨m, y_j⟩}` for every
/// residue class `m mod G`, in the same layout as the input.
pub fn fiber_coefficients(values: &[Complex64], dim: usize, grid: usize) -> Vec<Complex64> {
    assert_eq!(values.len(), grid.pow(dim as u32), "grid sample count");
    let mut data = values.to_vec();
    let fft = FftPlanner::<f64>::new().plan_fft_forward(grid);
    let mut line = vec![Complex64::new(0.0, 0.0); grid];
    for axis in 0..dim {
        let stride = grid.pow((dim - 1 - axis) as u32);
        let block = stride * grid;
        for outer in (0..data.len()).step_by(block) {
            for inner in 0..stride {
                for (t, slot) in line.iter_mut().enumerate() {
                    *slot = data[outer + inner + t * stride];
                }
                fft.process(&mut line);
                for (t, v) in line.iter().enumerate() {
                    data[outer + inner + t * stride] = *v;
                }
            }
        }
    }
    let scale = 1.0 / data.len() as f64;
    data.iter_mut().for_each(|z| *z *= scale);
    data
}

/// Position of mode `m` in the output of [`fiber_coefficients`].
pub fn coefficient_index(m: &[i64], grid: usize) -> usize {
    m.iter()
        .fold(0usize, |acc, &k| acc * grid + k.rem_euclid(grid as i64) as usize)
}

/// Result of the inverse transform: the recovered path-space function and
/// a bound on fiber-grid aliasing.
#[derive(Debug, Clone)]
pub struct InverseTransform {
    pub function: PathSpaceFunction,
    pub radius: i64,
    pub aliasing_bound: f64,
}

/// Recovers `α_m(ξ)` for `|m|∞ ≤ min(R, G/2 - 1)` by sampling the section
/// on the uniform fiber grid at each requested base point.
pub fn inverse_transform(section: &FourierSection, cfg: &NumericsConfig) -> Result<InverseTransform, SyzError> {
    let grid = cfg.grid;
    if 2 * cfg.truncation >= grid as i64 {
        return Err(SyzError::NyquistViolated {
            radius: cfg.truncation,
            grid,
        });
    }
    let dim = section.dim();
    let radius = cfg.truncation.min(grid as i64 / 2 - 1);
    let aliasing_bound = if 2 * section.radius() < grid as i64 {
        0.0
    } else {
        section.certificate().tail(dim, (grid as i64 + 1) / 2 - 1)
    };

    let points = fiber_grid(dim, grid);
    let cache: Arc<Mutex<Option<(Vec<f64>, Arc<Vec<Complex64>>)>>> = Arc::new(Mutex::new(None));
    let s = section.clone();
    let value = move |xi: &[f64], m: &[i64]| {
        let coeffs = {
            let mut guard = cache.lock().expect("cache lock");
            match guard.as_ref() {
                Some((key, c)) if key.as_slice() == xi => c.clone(),
                _ => {
                    let samples: Vec<Complex64> = points.iter().map(|y| s.eval(xi, y)).collect();
                    let c = Arc::new(fiber_coefficients(&samples, dim, grid));
                    *guard = Some((xi.to_vec(), c.clone()));
                    c
                }
            }
        };
        coeffs[coefficient_index(m, grid)]
    };
    let function = PathSpaceFunction::new(dim, section.certificate(), value).with_support(integer_box(dim, radius));
    Ok(InverseTransform {
        function,
        radius,
        aliasing_bound,
    })
}
