use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::ToricError;
use crate::lattice::{polytope_from_fan, Fan, LatticeError, LatticePoint, Polytope};

/// Value, gradient and Hessian of the Kähler potential at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct PotentialJet {
    pub value: f64,
    pub gradient: DVector<f64>,
    pub hessian: DMatrix<f64>,
}

/// `φ(ξ) = (1/4π) log Σ_u c_u e^{4π⟨u,ξ⟩}` over a finite set of lattice
/// points, evaluated through normalized softmax weights.
#[derive(Debug, Clone, PartialEq)]
pub struct KahlerPotential {
    dim: usize,
    points: Vec<Vec<i64>>,
    log_c: Vec<f64>,
}

/// Softmax weights at one point together with the log partition function.
pub(crate) struct Weights {
    pub p: Vec<f64>,
    pub log_z: f64,
}

impl KahlerPotential {
    pub fn new(dim: usize, points: Vec<Vec<i64>>, coefficients: Vec<f64>) -> Self {
        assert_eq!(points.len(), coefficients.len());
        Self {
            dim,
            points,
            log_c: coefficients.iter().map(|c| c.ln()).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points(&self) -> &[Vec<i64>] {
        &self.points
    }

    pub fn coefficient(&self, i: usize) -> f64 {
        self.log_c[i].exp()
    }

    pub(crate) fn weights(&self, xi: &[f64]) -> Weights {
        let expo: Vec<f64> = self
            .points
            .iter()
            .zip(&self.log_c)
            .map(|(u, lc)| lc + 4.0 * PI * u.iter().zip(xi).map(|(&a, b)| a as f64 * b).sum::<f64>())
            .collect();
        let max = expo.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let w: Vec<f64> = expo.iter().map(|e| (e - max).exp()).collect();
        let z: f64 = w.iter().sum();
        Weights {
            p: w.iter().map(|v| v / z).collect(),
            log_z: max + z.ln(),
        }
    }

    pub fn value(&self, xi: &[f64]) -> f64 {
        self.weights(xi).log_z / (4.0 * PI)
    }

    /// Weighted mean of the lattice points, anchored at the heaviest one so
    /// the sum runs over exact integer differences.
    fn mean(&self, w: &Weights) -> DVector<f64> {
        let anchor = argmax(&w.p);
        let a = &self.points[anchor];
        DVector::from_fn(self.dim, |j, _| {
            a[j] as f64
                + self
                    .points
                    .iter()
                    .zip(&w.p)
                    .map(|(u, p)| p * (u[j] - a[j]) as f64)
                    .sum::<f64>()
        })
    }

    pub fn gradient(&self, xi: &[f64]) -> DVector<f64> {
        self.mean(&self.weights(xi))
    }

    pub fn jet(&self, xi: &[f64]) -> PotentialJet {
        let w = self.weights(xi);
        let mean = self.mean(&w);
        let mut hessian = DMatrix::zeros(self.dim, self.dim);
        for (u, p) in self.points.iter().zip(&w.p) {
            let d = DVector::from_fn(self.dim, |j, _| u[j] as f64 - mean[j]);
            hessian += (4.0 * PI * p) * &d * d.transpose();
        }
        PotentialJet {
            value: w.log_z / (4.0 * PI),
            gradient: mean,
            hessian,
        }
    }

    /// `Σ_u p_u s(u)` for an integer statistic `s`, free of cancellation
    /// when `s ≥ 0`.
    pub(crate) fn expect(&self, w: &Weights, s: impl Fn(&[i64]) -> f64) -> f64 {
        self.points.iter().zip(&w.p).map(|(u, p)| p * s(u)).sum()
    }

    /// Restriction to the points selected by `keep`.
    pub(crate) fn restrict(&self, keep: impl Fn(&[i64]) -> bool) -> Self {
        let (points, log_c) = self
            .points
            .iter()
            .zip(&self.log_c)
            .filter(|(u, _)| keep(u))
            .map(|(u, c)| (u.clone(), *c))
            .unzip();
        Self {
            dim: self.dim,
            points,
            log_c,
        }
    }
}

fn argmax(v: &[f64]) -> usize {
    v.iter()
        .enumerate()
        .fold(
            (0, f64::NEG_INFINITY),
            |best, (i, &x)| if x > best.1 { (i, x) } else { best },
        )
        .0
}

/// Projective toric manifold from a fan and integer offsets, with the
/// Kähler potential built from positive coefficients on its lattice points.
#[derive(Debug, Clone)]
pub struct ToricKahlerDatum {
    fan: Fan,
    lambda: Vec<i64>,
    polytope: Polytope,
    potential: Arc<KahlerPotential>,
}

impl ToricKahlerDatum {
    /// Coefficients missing from `c` default to 1.
    pub fn new(fan: Fan, lambda: Vec<i64>, c: &BTreeMap<Vec<i64>, f64>) -> Result<Self, ToricError> {
        let polytope = polytope_from_fan(&fan, &lambda).map_err(|e| match e {
            LatticeError::Empty => ToricError::EmptyPolytope,
            other => ToricError::Lattice(other),
        })?;
        if polytope.lattice_points().is_empty() {
            return Err(ToricError::EmptyPolytope);
        }
        for (u, &v) in c {
            if u.len() != fan.dim() || !polytope.contains(u) {
                return Err(ToricError::NotALatticePoint { u: u.clone() });
            }
            if !(v > 0.0 && v.is_finite()) {
                return Err(ToricError::NonPositiveCoefficient { u: u.clone(), value: v });
            }
        }
        let points: Vec<Vec<i64>> = polytope.lattice_points().iter().map(|p| p.coords.clone()).collect();
        let coeffs = points.iter().map(|u| c.get(u).copied().unwrap_or(1.0)).collect();
        let potential = Arc::new(KahlerPotential::new(fan.dim(), points, coeffs));
        Ok(Self {
            fan,
            lambda,
            polytope,
            potential,
        })
    }

    pub fn with_unit_coefficients(fan: Fan, lambda: Vec<i64>) -> Result<Self, ToricError> {
        Self::new(fan, lambda, &BTreeMap::new())
    }

    pub fn dim(&self) -> usize {
        self.fan.dim()
    }

    pub fn fan(&self) -> &Fan {
        &self.fan
    }

    pub fn lambda(&self) -> &[i64] {
        &self.lambda
    }

    pub fn polytope(&self) -> &Polytope {
        &self.polytope
    }

    pub fn lattice_points(&self) -> &[LatticePoint] {
        self.polytope.lattice_points()
    }

    pub fn potential(&self) -> &KahlerPotential {
        &self.potential
    }

    pub(crate) fn shared_potential(&self) -> Arc<KahlerPotential> {
        self.potential.clone()
    }

    /// `⟨u, v_j⟩ + λ_j`.
    pub fn slack(&self, u: &[i64], j: usize) -> i64 {
        self.fan.generator(j).iter().zip(u).map(|(a, b)| a * b).sum::<i64>() + self.lambda[j]
    }
}

/// `(φ, dφ, Hess φ)` at `ξ`.
pub fn potential_jet(datum: &ToricKahlerDatum, xi: &[f64]) -> Result<PotentialJet, ToricError> {
    if xi.len() != datum.dim() {
        return Err(ToricError::DimensionMismatch {
            expected: datum.dim(),
            found: xi.len(),
        });
    }
    Ok(datum.potential.jet(xi))
}

/// JSON input: the fan fields, the offsets and optional coefficients keyed
/// by `"(u1,...,un)"`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ToricInput {
    pub n: usize,
    pub generators: Vec<Vec<i64>>,
    pub max_cones: Vec<Vec<usize>>,
    pub lambda: Vec<i64>,
    #[serde(default)]
    pub c: BTreeMap<String, f64>,
}

impl ToricInput {
    pub fn build(&self) -> Result<ToricKahlerDatum, ToricError> {
        let fan = Fan::new(self.n, self.generators.clone(), self.max_cones.clone())?;
        let mut c = BTreeMap::new();
        for (key, &v) in &self.c {
            c.insert(parse_point_key(key)?, v);
        }
        ToricKahlerDatum::new(fan, self.lambda.clone(), &c)
    }
}

/// Parses `"(1,-2)"` (parentheses optional) into a lattice point.
pub fn parse_point_key(key: &str) -> Result<Vec<i64>, ToricError> {
    let inner = key.trim().trim_start_matches('(').trim_end_matches(')');
    inner
        .split(',')
        .map(|s| s.trim().parse::<i64>())
        .collect::<Result<_, _>>()
        .map_err(|_| ToricError::MalformedKey(key.to_string()))
}
