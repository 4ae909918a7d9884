use serde::{Deserialize, Serialize};

use super::exact::{gcd_all, int_det, rank};
use super::LatticeError;

/// A complete smooth fan given by primitive ray generators and the index
/// sets of its maximal cones.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "FanInput", into = "FanInput")]
pub struct Fan {
    dim: usize,
    generators: Vec<Vec<i64>>,
    max_cones: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct FanInput {
    n: usize,
    generators: Vec<Vec<i64>>,
    max_cones: Vec<Vec<usize>>,
}

impl TryFrom<FanInput> for Fan {
    type Error = LatticeError;
    fn try_from(s: FanInput) -> Result<Self, Self::Error> {
        Fan::new(s.n, s.generators, s.max_cones)
    }
}

impl From<Fan> for FanInput {
    fn from(f: Fan) -> Self {
        FanInput {
            n: f.dim,
            generators: f.generators,
            max_cones: f.max_cones,
        }
    }
}

impl Fan {
    /// Validates primitivity, cone smoothness and spanning.
    pub fn new(dim: usize, generators: Vec<Vec<i64>>, max_cones: Vec<Vec<usize>>) -> Result<Self, LatticeError> {
        if dim == 0 {
            return Err(LatticeError::ZeroDimension);
        }
        for (k, v) in generators.iter().enumerate() {
            if v.len() != dim {
                return Err(LatticeError::DimensionMismatch {
                    expected: dim,
                    found: v.len(),
                });
            }
            if gcd_all(v) != 1 {
                return Err(LatticeError::NotPrimitive { index: k });
            }
        }
        if max_cones.is_empty() {
            return Err(LatticeError::NoCones);
        }
        for (c, cone) in max_cones.iter().enumerate() {
            if cone.len() != dim {
                return Err(LatticeError::ConeSize {
                    cone: c,
                    size: cone.len(),
                });
            }
            if let Some(&bad) = cone.iter().find(|&&i| i >= generators.len()) {
                return Err(LatticeError::ConeIndex { cone: c, index: bad });
            }
            let m: Vec<Vec<i64>> = cone.iter().map(|&i| generators[i].clone()).collect();
            if int_det(&m).abs() != 1 {
                return Err(LatticeError::NonSmoothCone { cone: c });
            }
        }
        if rank(&generators) < dim {
            return Err(LatticeError::NotSpanning);
        }
        Ok(Self {
            dim,
            generators,
            max_cones,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn generators(&self) -> &[Vec<i64>] {
        &self.generators
    }

    pub fn generator(&self, k: usize) -> &[i64] {
        &self.generators[k]
    }

    pub fn num_rays(&self) -> usize {
        self.generators.len()
    }

    pub fn max_cones(&self) -> &[Vec<usize>] {
        &self.max_cones
    }

    /// Generator matrix of a maximal cone, rows in cone order.
    pub fn cone_matrix(&self, cone: usize) -> Vec<Vec<i64>> {
        self.max_cones[cone]
            .iter()
            .map(|&i| self.generators[i].clone())
            .collect()
    }

    /// Whether `indices` (in any order) is a maximal cone.
    pub fn is_max_cone(&self, indices: &[usize]) -> bool {
        let mut want = indices.to_vec();
        want.sort_unstable();
        self.max_cones.iter().any(|c| {
            let mut have = c.clone();
            have.sort_unstable();
            have == want
        })
    }

    /// The map `u ↦ (⟨u, v_k⟩)_k`.
    pub fn pairings(&self, u: &[i64]) -> Vec<i64> {
        self.generators
            .iter()
            .map(|v| v.iter().zip(u).map(|(a, b)| a * b).sum())
            .collect()
    }
}
