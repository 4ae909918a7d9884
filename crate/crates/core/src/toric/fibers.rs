use nalgebra::DVector;
use rayon::prelude::*;
use serde::Serialize;

use super::datum::{KahlerPotential, ToricKahlerDatum};
use super::ToricError;
use crate::lattice::PointLocation;
use crate::numerics::NumericsConfig;

pub const MAX_NEWTON_ITERATIONS: usize = 30;

/// Outcome of minimizing `φ(ξ) − ⟨u, ξ⟩`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NewtonSolve {
    pub xi: Vec<f64>,
    /// `‖dφ(ξ) − u‖` before each step and at the end.
    pub residuals: Vec<f64>,
    pub iterations: usize,
}

/// Damped Newton with Armijo backtracking from `ξ = 0`. The Hessian is
/// inverted through its pseudo-inverse so potentials restricted to a face
/// (singular along the face normals) are handled by the same routine.
pub(crate) fn solve_moment(pot: &KahlerPotential, target: &[i64], tol: f64) -> Result<NewtonSolve, Vec<f64>> {
    let n = pot.dim();
    let u = DVector::from_fn(n, |j, _| target[j] as f64);
    let objective = |x: &DVector<f64>| pot.value(x.as_slice()) - u.dot(x);
    let mut xi = DVector::zeros(n);
    let mut residuals = Vec::new();
    for it in 0..=MAX_NEWTON_ITERATIONS {
        let jet = pot.jet(xi.as_slice());
        let grad = &jet.gradient - &u;
        let r = grad.norm();
        residuals.push(r);
        if !r.is_finite() {
            return Err(residuals);
        }
        if r <= tol {
            return Ok(NewtonSolve {
                xi: xi.iter().copied().collect(),
                residuals,
                iterations: it,
            });
        }
        if it == MAX_NEWTON_ITERATIONS {
            break;
        }
        let scale = jet.hessian.amax().max(f64::MIN_POSITIVE);
        let step = -jet
            .hessian
            .clone()
            .svd(true, true)
            .solve(&grad, 1e-12 * scale)
            .map_err(|_| residuals.clone())?;
        let slope = grad.dot(&step);
        if !(slope < 0.0) {
            return Err(residuals);
        }
        let f0 = objective(&xi);
        let mut alpha = 1.0;
        loop {
            let trial = &xi + alpha * &step;
            // Near the solution the objective decrease drops below roundoff,
            // so a sufficient decrease of the residual also accepts a step.
            let r_trial = (pot.gradient(trial.as_slice()) - &u).norm();
            if objective(&trial) <= f0 + 1e-4 * alpha * slope || r_trial <= (1.0 - 1e-4 * alpha) * r {
                xi = trial;
                break;
            }
            alpha *= 0.5;
            if alpha < 1e-12 {
                return Err(residuals);
            }
        }
    }
    Err(residuals)
}

/// Combinatorial certificate that the prequantum connection is trivial on
/// a boundary fiber: in the chart of a vertex `v` whose active facets
/// contain those of `u`, the vector `A(v + μ + u)` with lift `μ = −2v` is
/// integral (it equals the facet slacks of `u` in that chart).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundaryCertificate {
    pub vertex: Vec<i64>,
    pub cone: Vec<usize>,
    pub lift: Vec<i64>,
    pub chart_vector: Vec<i64>,
    /// Ray start `ξ₀` solving the face-restricted moment equation.
    pub ray_base: Vec<f64>,
    /// `‖dφ(ξ₀ + 3d) − u‖` along the witness direction `d`.
    pub ray_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum FiberCertificate {
    Interior(NewtonSolve),
    Boundary(BoundaryCertificate),
}

/// Bohr-Sommerfeld fiber over a lattice point of the moment polytope.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BohrSommerfeldFiber {
    pub u: Vec<i64>,
    pub location: PointLocation,
    /// Solved base point with `dφ(ξ) = u` (interior points).
    pub xi: Option<Vec<f64>>,
    /// Integer direction into the normal cone of the face of `u`
    /// (boundary points).
    pub witness: Option<Vec<i64>>,
    #[serde(skip)]
    pub certificate: FiberCertificate,
}

fn boundary_fiber(
    datum: &ToricKahlerDatum,
    u: &[i64],
    cfg: &NumericsConfig,
) -> Result<BohrSommerfeldFiber, ToricError> {
    let fan = datum.fan();
    let tight: Vec<usize> = (0..fan.num_rays()).filter(|&j| datum.slack(u, j) == 0).collect();
    let vertices = datum
        .polytope()
        .integer_vertices()
        .ok_or_else(|| ToricError::NonIntegralChart { u: u.to_vec() })?;
    // A vertex whose tight facets include those of u, and a maximal cone
    // among its tight facets, preferring one that contains them all.
    let (vertex, cone) = vertices
        .iter()
        .filter_map(|v| {
            let active: Vec<usize> = (0..fan.num_rays()).filter(|&j| datum.slack(v, j) == 0).collect();
            if !tight.iter().all(|j| active.contains(j)) {
                return None;
            }
            let cones: Vec<&Vec<usize>> = fan
                .max_cones()
                .iter()
                .filter(|c| c.iter().all(|j| active.contains(j)))
                .collect();
            let best = cones
                .iter()
                .find(|c| tight.iter().all(|j| c.contains(j)))
                .or(cones.first())
                .map(|c| (*c).clone())?;
            Some((v.clone(), best))
        })
        .next()
        .ok_or_else(|| ToricError::NonIntegralChart { u: u.to_vec() })?;

    let lift: Vec<i64> = vertex.iter().map(|x| -2 * x).collect();
    let shifted: Vec<i64> = vertex.iter().zip(&lift).zip(u).map(|((v, l), x)| v + l + x).collect();
    let chart_vector: Vec<i64> = cone
        .iter()
        .map(|&j| fan.generator(j).iter().zip(&shifted).map(|(a, b)| a * b).sum())
        .collect();
    // Integer arithmetic makes integrality automatic; the meaningful check
    // is that the chart vector reproduces the slacks of u.
    if cone.iter().zip(&chart_vector).any(|(&j, &s)| s != datum.slack(u, j)) {
        return Err(ToricError::NonIntegralChart { u: u.to_vec() });
    }

    let n = datum.dim();
    let mut witness = vec![0i64; n];
    for &j in &tight {
        for (w, g) in witness.iter_mut().zip(fan.generator(j)) {
            *w -= g;
        }
    }
    let face = datum
        .potential()
        .restrict(|p| tight.iter().all(|&j| datum.slack(p, j) == 0));
    let base = solve_moment(&face, u, cfg.newton_tol).map_err(|residuals| ToricError::NewtonDiverged {
        u: u.to_vec(),
        residuals,
    })?;
    let end: Vec<f64> = base.xi.iter().zip(&witness).map(|(x, &d)| x + 3.0 * d as f64).collect();
    let g = datum.potential().gradient(&end);
    let ray_residual = g
        .iter()
        .zip(u)
        .map(|(a, &b)| (a - b as f64).powi(2))
        .sum::<f64>()
        .sqrt();

    Ok(BohrSommerfeldFiber {
        u: u.to_vec(),
        location: PointLocation::Boundary,
        xi: None,
        witness: Some(witness),
        certificate: FiberCertificate::Boundary(BoundaryCertificate {
            vertex,
            cone,
            lift,
            chart_vector,
            ray_base: base.xi,
            ray_residual,
        }),
    })
}

/// One fiber per lattice point, in lattice-point order. Interior points
/// are solved by Newton from `ξ = 0`, boundary points certified
/// combinatorially with a witness ray.
pub fn bs_fibers(datum: &ToricKahlerDatum, cfg: &NumericsConfig) -> Result<Vec<BohrSommerfeldFiber>, ToricError> {
    datum
        .lattice_points()
        .par_iter()
        .map(|p| match p.location {
            PointLocation::Interior => {
                let solve = solve_moment(datum.potential(), &p.coords, cfg.newton_tol).map_err(|residuals| {
                    ToricError::NewtonDiverged {
                        u: p.coords.clone(),
                        residuals,
                    }
                })?;
                Ok(BohrSommerfeldFiber {
                    u: p.coords.clone(),
                    location: PointLocation::Interior,
                    xi: Some(solve.xi.clone()),
                    witness: None,
                    certificate: FiberCertificate::Interior(solve),
                })
            }
            PointLocation::Boundary => boundary_fiber(datum, &p.coords, cfg),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn newton_reports_iterates_for_unreachable_targets() {
        let pot = KahlerPotential::new(1, vec![vec![0], vec![1]], vec![1.0, 1.0]);
        let ok = solve_moment(&pot, &[-1], 1e-10);
        assert!(ok.is_err());
        let hist = ok.unwrap_err();
        assert!(!hist.is_empty() && hist.iter().all(|r| *r > 0.0));
        let half = KahlerPotential::new(1, vec![vec![0], vec![2]], vec![1.0, 1.0]);
        let s = solve_moment(&half, &[1], 1e-12).unwrap();
        assert_eq!(s.iterations, 0);
    }
}
