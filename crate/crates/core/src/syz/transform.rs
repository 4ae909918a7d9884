use std::sync::Arc;

use num_complex::Complex64;

use super::function::{DecayCertificate, PathSpaceFunction, PathSpaceOneForm, Support, ValueFn};
use super::witten::WittenContext;
use super::SyzError;
use crate::numerics::{integer_box, sup_norm, NumericsConfig};

pub type FrameFn = Arc<dyn Fn(&[f64], &[f64]) -> Complex64 + Send + Sync>;

/// A frame of the mirror line bundle, given by its value relative to the
/// unitary frame.
#[derive(Clone)]
pub struct FrameMultiplier {
    pub name: String,
    pub value: FrameFn,
}

impl std::fmt::Debug for FrameMultiplier {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FrameMultiplier").field("name", &self.name).finish()
    }
}

/// Section `s(ξ, y̌) = Σ_m α_m(ξ) e^{2πi⟨m, y̌⟩}` in the unitary frame,
/// with finitely many modes.
#[derive(Clone)]
pub struct FourierSection {
    dim: usize,
    modes: Vec<Vec<i64>>,
    coefficient: ValueFn,
    radius: i64,
    certificate: DecayCertificate,
    truncation_bound: f64,
    frame: Option<FrameMultiplier>,
}

impl std::fmt::Debug for FourierSection {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FourierSection")
            .field("dim", &self.dim)
            .field("modes", &self.modes.len())
            .field("radius", &self.radius)
            .field("truncation_bound", &self.truncation_bound)
            .field("frame", &self.frame)
            .finish()
    }
}

impl FourierSection {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn modes(&self) -> &[Vec<i64>] {
        &self.modes
    }

    pub fn radius(&self) -> i64 {
        self.radius
    }

    pub fn certificate(&self) -> DecayCertificate {
        self.certificate
    }

    /// Bound on the sup-norm of the discarded modes.
    pub fn truncation_bound(&self) -> f64 {
        self.truncation_bound
    }

    pub fn frame_name(&self) -> &str {
        self.frame.as_ref().map_or("unitary", |f| f.name.as_str())
    }

    pub fn coefficient(&self, xi: &[f64], m: &[i64]) -> Complex64 {
        if sup_norm(m) > self.radius || !self.modes.iter().any(|x| x == m) {
            return Complex64::new(0.0, 0.0);
        }
        (self.coefficient)(xi, m)
    }

    /// Value in the unitary frame.
    pub fn eval(&self, xi: &[f64], y: &[f64]) -> Complex64 {
        self.modes
            .iter()
            .map(|m| {
                let phase: f64 = m.iter().zip(y).map(|(&k, t)| k as f64 * t).sum();
                (self.coefficient)(xi, m) * Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * phase)
            })
            .fold(Complex64::new(0.0, 0.0), |a, b| a + b)
    }

    /// Attaches a holomorphic frame given relative to the unitary one.
    pub fn with_frame(
        mut self,
        name: impl Into<String>,
        value: impl Fn(&[f64], &[f64]) -> Complex64 + Send + Sync + 'static,
    ) -> Self {
        self.frame = Some(FrameMultiplier {
            name: name.into(),
            value: Arc::new(value),
        });
        self
    }

    /// Value expressed in the attached frame (unitary if none).
    pub fn eval_in_frame(&self, xi: &[f64], y: &[f64]) -> Complex64 {
        let s = self.eval(xi, y);
        match &self.frame {
            Some(f) => s / (f.value)(xi, y),
            None => s,
        }
    }

    /// Frame value relative to the unitary frame.
    pub fn frame_value(&self, xi: &[f64], y: &[f64]) -> Complex64 {
        self.frame
            .as_ref()
            .map_or(Complex64::new(1.0, 0.0), |f| (f.value)(xi, y))
    }
}

/// Image of a one-form: the `dz̄^j` coefficients.
#[derive(Clone, Debug)]
pub struct FourierForm {
    components: Vec<FourierSection>,
}

impl FourierForm {
    pub fn component(&self, j: usize) -> &FourierSection {
        &self.components[j]
    }

    pub fn components(&self) -> &[FourierSection] {
        &self.components
    }

    pub fn eval(&self, xi: &[f64], y: &[f64]) -> Vec<Complex64> {
        self.components.iter().map(|c| c.eval(xi, y)).collect()
    }

    pub fn truncation_bound(&self) -> f64 {
        self.components
            .iter()
            .map(FourierSection::truncation_bound)
            .fold(0.0, f64::max)
    }
}

fn truncated_modes(f: &PathSpaceFunction, radius: i64) -> Vec<Vec<i64>> {
    match f.support() {
        Support::All => integer_box(f.dim(), radius),
        Support::Predicate(p) => integer_box(f.dim(), radius).into_iter().filter(|m| p(m)).collect(),
        Support::Finite(list) => list.iter().filter(|m| sup_norm(m) <= radius).cloned().collect(),
    }
}

fn tail_bound(f: &PathSpaceFunction, radius: i64) -> f64 {
    match f.support() {
        Support::Finite(list) if list.iter().all(|m| sup_norm(m) <= radius) => 0.0,
        _ => f.certificate().tail(f.dim(), radius),
    }
}

/// Fourier series in the fiber variable with coefficients `f(ξ, m)`,
/// truncated to `|m|∞ ≤ R`.
pub fn forward_transform(f: &PathSpaceFunction, cfg: &NumericsConfig) -> Result<FourierSection, SyzError> {
    f.verify_certificate(cfg)?;
    Ok(FourierSection {
        dim: f.dim(),
        modes: truncated_modes(f, cfg.truncation),
        coefficient: f.value_fn(),
        radius: cfg.truncation,
        certificate: f.certificate(),
        truncation_bound: tail_bound(f, cfg.truncation),
        frame: None,
    })
}

/// Transform of `Σ β_k dξ^k`: the `dz̄^j` coefficient is
/// `(iħ/2) Σ_k (Ω⁻¹)_{jk} β_k`.
pub fn forward_transform_one_form(
    beta: &PathSpaceOneForm,
    ctx: &WittenContext,
    cfg: &NumericsConfig,
) -> Result<FourierForm, SyzError> {
    let dim = beta.dim();
    for c in beta.components() {
        c.verify_certificate(cfg)?;
    }
    let prefactor = Complex64::new(0.0, ctx.hbar() / 2.0);
    let inv = ctx.period_inverse().clone();
    let comps: Vec<ValueFn> = beta.components().iter().map(|c| c.value_fn()).collect();
    let supports: Vec<Support> = beta.components().iter().map(|c| c.support().clone()).collect();
    let mut modes: Vec<Vec<i64>> = Vec::new();
    for c in beta.components() {
        for m in truncated_modes(c, cfg.truncation) {
            if !modes.contains(&m) {
                modes.push(m);
            }
        }
    }
    modes.sort();
    let norm_inv: f64 = inv.norm();

    let components = (0..dim)
        .map(|j| {
            let comps = comps.clone();
            let supports = supports.clone();
            let row: Vec<f64> = (0..dim).map(|k| inv[(j, k)]).collect();
            let coefficient: ValueFn = Arc::new(move |xi: &[f64], m: &[i64]| {
                let mut s = Complex64::new(0.0, 0.0);
                for k in 0..row.len() {
                    if row[k] != 0.0 && supports[k].contains(m) {
                        s += comps[k](xi, m) * row[k];
                    }
                }
                s * prefactor
            });
            let certificate = DecayCertificate::new(
                prefactor.norm() * norm_inv * beta.components().iter().map(|c| c.certificate().constant).sum::<f64>(),
                beta.components()
                    .iter()
                    .map(|c| c.certificate().rate)
                    .fold(f64::INFINITY, f64::min),
            );
            let truncation_bound = prefactor.norm()
                * norm_inv
                * beta
                    .components()
                    .iter()
                    .map(|c| tail_bound(c, cfg.truncation))
                    .sum::<f64>();
            FourierSection {
                dim,
                modes: modes.clone(),
                coefficient,
                radius: cfg.truncation,
                certificate,
                truncation_bound,
                frame: None,
            }
        })
        .collect();
    Ok(FourierForm { components })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_character_mode() {
        let m0 = vec![2i64];
        let m0c = m0.clone();
        let f = PathSpaceFunction::new(1, DecayCertificate::new(1.0, 1.0), move |_, m| {
            Complex64::new(f64::from(u8::from(m == m0c.as_slice())), 0.0)
        })
        .with_support(vec![m0]);
        let s = forward_transform(&f, &NumericsConfig::default()).unwrap();
        let y = 0.137;
        let expect = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * 2.0 * y);
        assert!((s.eval(&[0.3], &[y]) - expect).norm() < 1e-14);
        assert_eq!(s.truncation_bound(), 0.0);
    }
}
