use rayon::prelude::*;
use serde::Serialize;

use super::theta::witten_representative;
use super::{AbelianError, AbelianMirrorDatum};
use crate::numerics::{integer_box, integer_range_box, NumericsConfig};
use crate::syz::Support;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConcentrationRow {
    pub hbar: f64,
    pub radius: f64,
    pub fraction: f64,
}

/// Fraction of the fiberwise `L²` mass of a Witten representative lying
/// within each radius of its critical point, per `ħ`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConcentrationTable {
    pub rows: Vec<ConcentrationRow>,
    pub quadrature_points: usize,
    pub truncation: i64,
    /// Whether each radius has fractions nondecreasing as `ħ` decreases.
    pub monotone: bool,
}

impl ConcentrationTable {
    pub fn fraction(&self, hbar: f64, radius: f64) -> Option<f64> {
        self.rows
            .iter()
            .find(|r| r.hbar == hbar && r.radius == radius)
            .map(|r| r.fraction)
    }

    pub fn write_csv<W: std::io::Write>(&self, out: W) -> Result<(), csv::Error> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["hbar", "radius", "fraction"])?;
        for r in &self.rows {
            w.write_record(&[r.hbar.to_string(), r.radius.to_string(), format!("{:.12}", r.fraction)])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Midpoint-rule integration of `Σ_n |A_k(x, n)|²` over the unit cell
/// centred at `x_k`, with `cfg.grid` points per dimension.
pub fn concentration_profile(
    datum: &AbelianMirrorDatum,
    x_k: &[f64],
    radii: &[f64],
    hbars: &[f64],
    cfg: &NumericsConfig,
) -> Result<ConcentrationTable, AbelianError> {
    if radii.iter().any(|&r| !(r > 0.0)) {
        return Err(AbelianError::InvalidRadius);
    }
    if hbars.iter().any(|&h| !(h > 0.0)) || hbars.windows(2).any(|w| w[1] >= w[0]) {
        return Err(AbelianError::InvalidHbarSequence);
    }
    let n = datum.dim();
    let g = cfg.grid;
    let cell: Vec<Vec<f64>> = integer_range_box(&vec![0; n], &vec![g as i64 - 1; n])
        .into_iter()
        .map(|j| {
            j.iter()
                .zip(x_k)
                .map(|(&i, c)| c - 0.5 + (i as f64 + 0.5) / g as f64)
                .collect()
        })
        .collect();

    let mut rows = Vec::new();
    for &hbar in hbars {
        let rep = witten_representative(datum, x_k, hbar)?;
        let labels: Vec<Vec<i64>> = integer_box(n, cfg.truncation)
            .into_iter()
            .filter(|m| match rep.support() {
                Support::Predicate(p) => p(m),
                other => other.contains(m),
            })
            .collect();
        let samples: Vec<(f64, f64)> = cell
            .par_iter()
            .map(|x| {
                let density: f64 = labels.iter().map(|m| rep.eval(x, m).norm_sqr()).sum();
                let dist2: f64 = x.iter().zip(x_k).map(|(a, b)| (a - b) * (a - b)).sum();
                (density, dist2.sqrt())
            })
            .collect();
        let total: f64 = samples.iter().map(|s| s.0).sum();
        for &r in radii {
            let inside: f64 = samples.iter().filter(|s| s.1 < r).map(|s| s.0).sum();
            rows.push(ConcentrationRow {
                hbar,
                radius: r,
                fraction: inside / total,
            });
        }
    }
    let monotone = radii.iter().all(|&r| {
        let seq: Vec<f64> = rows
            .iter()
            .filter(|row| row.radius == r)
            .map(|row| row.fraction)
            .collect();
        seq.windows(2).all(|w| w[1] >= w[0])
    });
    Ok(ConcentrationTable {
        rows,
        quadrature_points: cell.len(),
        truncation: cfg.truncation,
        monotone,
    })
}
