use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::datum::ToricKahlerDatum;
use super::ToricError;
use crate::numerics::{integer_range_box, numerical_rank, seeded_points, tensor_grid, NumericsConfig, RankReport};
use crate::syz::{
    dbar_residual, forward_transform, DecayCertificate, FourierSection, PathSpaceFunction, WittenContext,
};

/// Sample points per axis of the character-match grid.
pub const CHARACTER_GRID: usize = 8;

/// Witten context of the section `L_φ`: `ζ = dφ`, `ħ = 1`, unit period.
pub fn toric_context(datum: &ToricKahlerDatum) -> WittenContext {
    let pot = datum.shared_potential();
    WittenContext::new(datum.dim(), 1.0, move |xi| pot.gradient(xi).iter().copied().collect())
}

/// `f_u(ξ, m) = e^{−2πφ(ξ) + 2π⟨u,ξ⟩}` on the component `m = −u`.
#[derive(Debug, Clone)]
pub struct BasisFunction {
    pub u: Vec<i64>,
    pub function: PathSpaceFunction,
}

/// `f_m` evaluated at a base point, for any integer `m`.
pub fn weighted_character(datum: &ToricKahlerDatum, m: &[i64], xi: &[f64]) -> f64 {
    let phi = datum.potential().value(xi);
    let pair: f64 = m.iter().zip(xi).map(|(&a, b)| a as f64 * b).sum();
    (-2.0 * PI * phi + 2.0 * PI * pair).exp()
}

pub fn basis_function(datum: &ToricKahlerDatum, u: &[i64]) -> Result<BasisFunction, ToricError> {
    if u.len() != datum.dim() || !datum.polytope().contains(u) {
        return Err(ToricError::NotALatticePoint { u: u.to_vec() });
    }
    let pot = datum.shared_potential();
    let idx = pot
        .points()
        .iter()
        .position(|p| p == u)
        .expect("lattice point is listed");
    // e^{4πφ} ≥ c_u e^{4π⟨u,ξ⟩} bounds f_u by c_u^{-1/2}.
    let bound = pot.coefficient(idx).powf(-0.5);
    let norm2: f64 = u.iter().map(|&a| (a * a) as f64).sum();
    let cert = DecayCertificate::new(bound * norm2.exp(), 1.0);
    let (uv, ug) = (u.to_vec(), u.to_vec());
    let (pv, pg) = (pot.clone(), pot);
    let function = PathSpaceFunction::new(datum.dim(), cert, move |xi, _| {
        let pair: f64 = uv.iter().zip(xi).map(|(&a, b)| a as f64 * b).sum();
        Complex64::new((-2.0 * PI * pv.value(xi) + 2.0 * PI * pair).exp(), 0.0)
    })
    .with_gradient(move |xi, _| {
        let jet = pg.jet(xi);
        let pair: f64 = ug.iter().zip(xi).map(|(&a, b)| a as f64 * b).sum();
        let f = (-2.0 * PI * jet.value + 2.0 * PI * pair).exp();
        ug.iter()
            .zip(jet.gradient.iter())
            .map(|(&a, g)| Complex64::new(2.0 * PI * (a as f64 - g) * f, 0.0))
            .collect()
    })
    .with_support(vec![u.iter().map(|a| -a).collect()]);
    Ok(BasisFunction {
        u: u.to_vec(),
        function,
    })
}

/// Transform of `f_u` with the frame `ě_φ = e^{−2πφ}` attached.
pub fn basis_section(datum: &ToricKahlerDatum, u: &[i64], cfg: &NumericsConfig) -> Result<FourierSection, ToricError> {
    let basis = basis_function(datum, u)?;
    let mut c = cfg.clone();
    c.truncation = c.truncation.max(u.iter().map(|a| a.abs()).max().unwrap_or(0));
    let pot = datum.shared_potential();
    Ok(
        forward_transform(&basis.function, &c)?.with_frame("toric", move |xi, _| {
            Complex64::new((-2.0 * PI * pot.value(xi)).exp(), 0.0)
        }),
    )
}

/// `e^{−2πi⟨u, z⟩}` with `z = y̌ + iξ`.
pub fn character(u: &[i64], xi: &[f64], y: &[f64]) -> Complex64 {
    let pair: f64 = u.iter().zip(y).map(|(&a, b)| a as f64 * b).sum();
    let damp: f64 = u.iter().zip(xi).map(|(&a, b)| a as f64 * b).sum();
    Complex64::from_polar((2.0 * PI * damp).exp(), -2.0 * PI * pair)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CharacterRow {
    pub xi: Vec<f64>,
    pub y: Vec<f64>,
    pub section: Complex64,
    pub character: Complex64,
}

/// Comparison of the transformed basis function with its character.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CharacterMatch {
    pub u: Vec<i64>,
    /// Max relative deviation on the grid.
    pub residual: f64,
    pub dbar_residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    #[serde(skip)]
    pub rows: Vec<CharacterRow>,
}

impl CharacterMatch {
    pub fn write_csv<W: std::io::Write>(&self, out: W, metadata: &[(String, String)]) -> std::io::Result<()> {
        let mut out = out;
        for (k, v) in metadata {
            writeln!(out, "# {k}={v}")?;
        }
        let n = self.u.len();
        let mut w = csv::Writer::from_writer(out);
        let mut header: Vec<String> = (1..=n).map(|j| format!("xi{j}")).collect();
        header.extend((1..=n).map(|j| format!("y{j}")));
        header.extend(["re", "im", "char_re", "char_im"].map(String::from));
        w.write_record(&header)?;
        for r in &self.rows {
            let mut rec: Vec<String> = r.xi.iter().chain(&r.y).map(|v| v.to_string()).collect();
            rec.extend([r.section.re, r.section.im, r.character.re, r.character.im].map(|v| v.to_string()));
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Builds `f_u`, transforms it and compares with `e^{−2πi⟨u,z⟩}` in the
/// frame `ě_φ` on a grid of `ξ ∈ [−½, ½)ⁿ` by `y̌ ∈ [0, 1)ⁿ`.
pub fn basis_and_character(
    datum: &ToricKahlerDatum,
    u: &[i64],
    cfg: &NumericsConfig,
) -> Result<(BasisFunction, CharacterMatch), ToricError> {
    let basis = basis_function(datum, u)?;
    let section = basis_section(datum, u, cfg)?;
    let n = datum.dim();
    let xs = tensor_grid(n, CHARACTER_GRID, -0.5, 0.5, 0.5);
    let ys = tensor_grid(n, CHARACTER_GRID, 0.0, 1.0, 0.0);
    let rows: Vec<CharacterRow> = xs
        .iter()
        .flat_map(|x| ys.iter().map(move |y| (x, y)))
        .map(|(x, y)| CharacterRow {
            xi: x.clone(),
            y: y.clone(),
            section: section.eval_in_frame(x, y),
            character: character(u, x, y),
        })
        .collect();
    let residual = rows
        .iter()
        .map(|r| (r.section - r.character).norm() / r.character.norm())
        .fold(0.0, f64::max);
    let dbar = dbar_residual(&section, &toric_context(datum), cfg).residual;
    let tolerance = cfg.residual_tol;
    Ok((
        basis,
        CharacterMatch {
            u: u.to_vec(),
            residual,
            dbar_residual: dbar,
            tolerance,
            pass: residual <= tolerance && dbar <= tolerance,
            rows,
        },
    ))
}

/// Numerical rank of the transformed basis evaluated at `|B∩M|` seeded
/// generic points with `ξ ∈ [−¼, ¼]ⁿ`, `y̌ ∈ [0, 1)ⁿ`.
pub fn character_rank(datum: &ToricKahlerDatum, cfg: &NumericsConfig) -> Result<RankReport, ToricError> {
    let n = datum.dim();
    let count = datum.lattice_points().len();
    let xs = seeded_points(n, count, -0.25, 0.25, cfg.seed);
    let ys = seeded_points(n, count, 0.0, 1.0, cfg.seed.wrapping_add(1));
    let rows: Vec<Vec<Complex64>> = datum
        .lattice_points()
        .par_iter()
        .map(|p| {
            let s = basis_section(datum, &p.coords, cfg)?;
            Ok(xs.iter().zip(&ys).map(|(x, y)| s.eval_in_frame(x, y)).collect())
        })
        .collect::<Result<_, ToricError>>()?;
    Ok(numerical_rank(&rows, 1e-6))
}

/// Boundedness probe for `f_m`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExtendabilityReport {
    pub m: Vec<i64>,
    pub bounded: bool,
    /// Largest sampled value of `f_m` over the probe rays (bounded case).
    pub sup: Option<f64>,
    /// Generator index whose ray `ξ = −t v_k` shows growth.
    pub witness: Option<usize>,
    /// `f_m(−t v_k)` at `t = 0, 1, 2, 3` along the witness ray.
    pub growth: Option<Vec<f64>>,
}

const PROBE_DEPTHS: [f64; 4] = [0.0, 1.0, 2.0, 3.0];

/// Samples `f_m` along the rays `ξ = −t v_k`. Classifies as unbounded when
/// some ray grows strictly with `f_m(−3v_k) > 10 f_m(0)`.
pub fn extendability_test(datum: &ToricKahlerDatum, m: &[i64]) -> ExtendabilityReport {
    let fan = datum.fan();
    let n = datum.dim();
    let ray = |dir: &[f64]| -> Vec<f64> {
        PROBE_DEPTHS
            .iter()
            .map(|&t| {
                let xi: Vec<f64> = dir.iter().map(|d| t * d).collect();
                weighted_character(datum, m, &xi)
            })
            .collect()
    };
    let mut sup: f64 = 0.0;
    for k in 0..fan.num_rays() {
        let dir: Vec<f64> = fan.generator(k).iter().map(|&a| -(a as f64)).collect();
        let vals = ray(&dir);
        sup = vals.iter().copied().fold(sup, f64::max);
        let grows = vals.windows(2).all(|w| w[1] > w[0]) && vals[3] > 10.0 * vals[0];
        if grows {
            return ExtendabilityReport {
                m: m.to_vec(),
                bounded: false,
                sup: None,
                witness: Some(k),
                growth: Some(vals),
            };
        }
    }
    for j in 0..n {
        for sign in [1.0, -1.0] {
            let mut dir = vec![0.0; n];
            dir[j] = sign;
            sup = ray(&dir).into_iter().fold(sup, f64::max);
        }
    }
    ExtendabilityReport {
        m: m.to_vec(),
        bounded: true,
        sup: Some(sup),
        witness: None,
        growth: None,
    }
}

/// Integer points in the box around the polytope with each side doubled
/// (at least one extra layer per side).
pub fn extendability_box(datum: &ToricKahlerDatum) -> Vec<Vec<i64>> {
    let (lo, hi) = datum.polytope().bounding_box();
    let pad: Vec<i64> = lo.iter().zip(&hi).map(|(a, b)| ((b - a + 1) / 2).max(1)).collect();
    let lo: Vec<i64> = lo.iter().zip(&pad).map(|(a, p)| a - p).collect();
    let hi: Vec<i64> = hi.iter().zip(&pad).map(|(b, p)| b + p).collect();
    integer_range_box(&lo, &hi)
}

pub fn extendability_sweep(datum: &ToricKahlerDatum) -> Vec<ExtendabilityReport> {
    extendability_box(datum)
        .par_iter()
        .map(|m| extendability_test(datum, m))
        .collect()
}

/// `W(z) = Σ_j e^{−λ_j} z^{v_j}` on `|e^{−λ_j} z^{v_j}| < 1`.
pub fn superpotential_eval(datum: &ToricKahlerDatum, z: &[Complex64]) -> Result<Complex64, ToricError> {
    if z.len() != datum.dim() {
        return Err(ToricError::DimensionMismatch {
            expected: datum.dim(),
            found: z.len(),
        });
    }
    let mut total = Complex64::new(0.0, 0.0);
    for (j, v) in datum.fan().generators().iter().enumerate() {
        let term = z.iter().zip(v).fold(
            Complex64::new((-(datum.lambda()[j] as f64)).exp(), 0.0),
            |acc, (zi, &e)| acc * zi.powi(e as i32),
        );
        let modulus = term.norm();
        if !(modulus < 1.0) {
            return Err(ToricError::OutsideMirrorDomain { generator: j, modulus });
        }
        total += term;
    }
    Ok(total)
}
