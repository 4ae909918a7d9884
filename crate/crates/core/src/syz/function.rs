use std::sync::Arc;

use num_complex::Complex64;

use super::SyzError;
use crate::numerics::{central_difference, integer_shell, tensor_grid, FdOrder, NumericsConfig};

pub type ValueFn = Arc<dyn Fn(&[f64], &[i64]) -> Complex64 + Send + Sync>;
pub type GradientFn = Arc<dyn Fn(&[f64], &[i64]) -> Vec<Complex64> + Send + Sync>;

/// Gaussian envelope `|f(ξ, m)| ≤ constant · exp(-rate · |m|²)` on the
/// working box.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct DecayCertificate {
    pub constant: f64,
    pub rate: f64,
}

impl DecayCertificate {
    pub fn new(constant: f64, rate: f64) -> Self {
        assert!(constant >= 0.0 && rate > 0.0, "certificate needs C ≥ 0, c > 0");
        Self { constant, rate }
    }

    pub fn envelope(&self, m: &[i64]) -> f64 {
        let norm2: f64 = m.iter().map(|&k| (k * k) as f64).sum();
        self.constant * (-self.rate * norm2).exp()
    }

    /// Bound on `Σ_{|m|∞ > radius} constant · exp(-rate |m|²)` over `ℤ^dim`.
    ///
    /// Uses `Sⁿ - S_Rⁿ = (S - S_R) Σ_i S^i S_R^{n-1-i}` to avoid cancellation.
    pub fn tail(&self, dim: usize, radius: i64) -> f64 {
        let inner = 1.0 + 2.0 * (1..=radius).map(|k| self.gauss(k)).sum::<f64>();
        let mut outer = 0.0;
        let mut k = radius.max(0) + 1;
        loop {
            let t = 2.0 * self.gauss(k);
            outer += t;
            if t <= 1e-18 * outer || t == 0.0 {
                break;
            }
            k += 1;
        }
        let full = inner + outer;
        let spread: f64 = (0..dim)
            .map(|i| full.powi(i as i32) * inner.powi((dim - 1 - i) as i32))
            .sum();
        self.constant * outer * spread
    }

    fn gauss(&self, k: i64) -> f64 {
        (-self.rate * (k * k) as f64).exp()
    }
}

pub type SupportFn = Arc<dyn Fn(&[i64]) -> bool + Send + Sync>;

/// Components `m` on which a function may be nonzero.
#[derive(Clone)]
pub enum Support {
    All,
    Finite(Vec<Vec<i64>>),
    Predicate(SupportFn),
}

impl std::fmt::Debug for Support {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Support::All => write!(f, "All"),
            Support::Finite(list) => f.debug_tuple("Finite").field(list).finish(),
            Support::Predicate(_) => write!(f, "Predicate"),
        }
    }
}

impl Support {
    pub fn contains(&self, m: &[i64]) -> bool {
        match self {
            Support::All => true,
            Support::Finite(list) => list.iter().any(|x| x == m),
            Support::Predicate(p) => p(m),
        }
    }

    fn union(&self, other: &Support) -> Support {
        match (self, other) {
            (Support::Finite(a), Support::Finite(b)) => {
                let mut out = a.clone();
                out.extend(b.iter().filter(|m| !a.contains(m)).cloned());
                out.sort();
                Support::Finite(out)
            }
            (Support::All, _) | (_, Support::All) => Support::All,
            (a, b) => {
                let (a, b) = (a.clone(), b.clone());
                Support::Predicate(Arc::new(move |m| a.contains(m) || b.contains(m)))
            }
        }
    }
}

/// Complex function on `base × ℤⁿ` with a Gaussian decay certificate in
/// the lattice variable and optional exact base gradient.
#[derive(Clone)]
pub struct PathSpaceFunction {
    dim: usize,
    value: ValueFn,
    gradient: Option<GradientFn>,
    certificate: DecayCertificate,
    support: Support,
}

impl std::fmt::Debug for PathSpaceFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PathSpaceFunction")
            .field("dim", &self.dim)
            .field("exact_gradient", &self.gradient.is_some())
            .field("certificate", &self.certificate)
            .field("support", &self.support)
            .finish()
    }
}

impl PathSpaceFunction {
    pub fn new(
        dim: usize,
        certificate: DecayCertificate,
        value: impl Fn(&[f64], &[i64]) -> Complex64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            dim,
            value: Arc::new(value),
            gradient: None,
            certificate,
            support: Support::All,
        }
    }

    pub fn zero(dim: usize) -> Self {
        Self::new(dim, DecayCertificate::new(0.0, 1.0), |_, _| Complex64::new(0.0, 0.0))
            .with_support(Vec::new())
            .with_gradient(move |_, _| vec![Complex64::new(0.0, 0.0); dim])
    }

    pub fn with_gradient(
        mut self,
        gradient: impl Fn(&[f64], &[i64]) -> Vec<Complex64> + Send + Sync + 'static,
    ) -> Self {
        self.gradient = Some(Arc::new(gradient));
        self
    }

    /// Declares the function to vanish off the components where `pred` holds.
    pub fn with_support_predicate(mut self, pred: impl Fn(&[i64]) -> bool + Send + Sync + 'static) -> Self {
        self.support = Support::Predicate(Arc::new(pred));
        self
    }

    /// Restricts the declared support to a finite list of components.
    pub fn with_support(mut self, modes: Vec<Vec<i64>>) -> Self {
        let mut modes = modes;
        modes.sort();
        modes.dedup();
        self.support = Support::Finite(modes);
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn certificate(&self) -> DecayCertificate {
        self.certificate
    }

    pub fn support(&self) -> &Support {
        &self.support
    }

    pub fn has_exact_gradient(&self) -> bool {
        self.gradient.is_some()
    }

    pub fn eval(&self, xi: &[f64], m: &[i64]) -> Complex64 {
        if !self.support.contains(m) {
            return Complex64::new(0.0, 0.0);
        }
        (self.value)(xi, m)
    }

    pub(crate) fn value_fn(&self) -> ValueFn {
        self.value.clone()
    }

    /// Base gradient, exact when available, otherwise by central
    /// differences with step `h`.
    pub fn gradient(&self, xi: &[f64], m: &[i64], h: Option<(f64, FdOrder)>) -> Result<Vec<Complex64>, SyzError> {
        if !self.support.contains(m) {
            return Ok(vec![Complex64::new(0.0, 0.0); self.dim]);
        }
        if let Some(g) = &self.gradient {
            return Ok(g(xi, m));
        }
        let (h, order) = h.ok_or(SyzError::MissingDerivative)?;
        Ok((0..self.dim)
            .map(|k| {
                central_difference(
                    |t| {
                        let mut p = xi.to_vec();
                        p[k] += t;
                        (self.value)(&p, m)
                    },
                    h,
                    order,
                )
            })
            .collect())
    }

    /// `a·f + b·g`.
    pub fn linear_combination(a: Complex64, f: &Self, b: Complex64, g: &Self) -> Self {
        assert_eq!(f.dim, g.dim);
        let (fv, gv) = (f.value.clone(), g.value.clone());
        let (fs, gs) = (f.support.clone(), g.support.clone());
        let value = move |xi: &[f64], m: &[i64]| {
            let mut s = Complex64::new(0.0, 0.0);
            if fs.contains(m) {
                s += a * fv(xi, m);
            }
            if gs.contains(m) {
                s += b * gv(xi, m);
            }
            s
        };
        let certificate = DecayCertificate::new(
            a.norm() * f.certificate.constant + b.norm() * g.certificate.constant,
            f.certificate.rate.min(g.certificate.rate),
        );
        let mut out = Self::new(f.dim, certificate, value);
        out.support = f.support.union(&g.support);
        if let (Some(fg), Some(gg)) = (f.gradient.clone(), g.gradient.clone()) {
            let (fs, gs) = (f.support.clone(), g.support.clone());
            out.gradient = Some(Arc::new(move |xi: &[f64], m: &[i64]| {
                let mut s = vec![Complex64::new(0.0, 0.0); xi.len()];
                if fs.contains(m) {
                    for (t, v) in s.iter_mut().zip(fg(xi, m)) {
                        *t += a * v;
                    }
                }
                if gs.contains(m) {
                    for (t, v) in s.iter_mut().zip(gg(xi, m)) {
                        *t += b * v;
                    }
                }
                s
            }));
        }
        out
    }

    /// Largest observed `|f| / envelope` on the working box at the shells
    /// `|m|∞ ∈ {R, R+1}`; the certificate holds on the sample when ≤ 1.
    pub fn certificate_ratio(&self, cfg: &NumericsConfig) -> f64 {
        certificate_ratio(self.dim, &self.support, self.certificate, cfg, |xi, m| {
            (self.value)(xi, m).norm()
        })
    }

    /// Samples the decay certificate; fails with the worst offender.
    pub fn verify_certificate(&self, cfg: &NumericsConfig) -> Result<(), SyzError> {
        let ratio = self.certificate_ratio(cfg);
        if ratio > 1.0 + 1e-9 {
            return Err(SyzError::DecayViolated { ratio });
        }
        Ok(())
    }
}

pub(crate) fn certificate_ratio(
    dim: usize,
    support: &Support,
    cert: DecayCertificate,
    cfg: &NumericsConfig,
    modulus: impl Fn(&[f64], &[i64]) -> f64,
) -> f64 {
    let (lo, hi) = cfg.working_box;
    let points = tensor_grid(dim, cfg.samples_per_dim + 1, lo, hi, 0.0);
    let mut worst: f64 = 0.0;
    for radius in [cfg.truncation, cfg.truncation + 1] {
        for m in integer_shell(dim, radius) {
            if !support.contains(&m) {
                continue;
            }
            let env = cert.envelope(&m);
            for xi in &points {
                let v = modulus(xi, &m);
                if v == 0.0 {
                    continue;
                }
                worst = worst.max(if env > 0.0 { v / env } else { f64::INFINITY });
            }
        }
    }
    worst
}

/// A path-space one-form `Σ_k β_k(ξ, m) dξ^k`.
#[derive(Clone, Debug)]
pub struct PathSpaceOneForm {
    components: Vec<PathSpaceFunction>,
}

impl PathSpaceOneForm {
    pub fn new(components: Vec<PathSpaceFunction>) -> Self {
        assert!(!components.is_empty());
        Self { components }
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn component(&self, k: usize) -> &PathSpaceFunction {
        &self.components[k]
    }

    pub fn components(&self) -> &[PathSpaceFunction] {
        &self.components
    }

    pub fn eval(&self, xi: &[f64], m: &[i64]) -> Vec<Complex64> {
        self.components.iter().map(|c| c.eval(xi, m)).collect()
    }
}
