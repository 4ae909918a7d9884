use std::io::Write;

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use super::exact::{floor_ceil, int_det, nullspace, rank, rat_dot, solve, unimodular_inverse, Rational};
use super::fan::Fan;
use super::LatticeError;
use crate::numerics::integer_range_box;

/// Position of a lattice point relative to the facets of a polytope.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PointLocation {
    Interior,
    Boundary,
}

impl PointLocation {
    pub fn label(self) -> &'static str {
        match self {
            PointLocation::Interior => "interior",
            PointLocation::Boundary => "boundary",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LatticePoint {
    pub coords: Vec<i64>,
    pub location: PointLocation,
}

/// Bounded polytope `{x : ⟨x, v_k⟩ + λ_k ≥ 0}` with exact vertices and
/// labeled lattice points.
#[derive(Debug, Clone, PartialEq)]
pub struct Polytope {
    dim: usize,
    normals: Vec<Vec<i64>>,
    offsets: Vec<i64>,
    vertices: Vec<Vec<Rational>>,
    full_dimensional: bool,
    lattice_points: Vec<LatticePoint>,
}

impl Polytope {
    /// Builds the polytope, rejecting unbounded or empty systems and
    /// non-simple or non-unimodular vertices. Lower-dimensional polytopes
    /// are accepted and skip the vertex smoothness check.
    pub fn from_halfspaces(normals: Vec<Vec<i64>>, offsets: Vec<i64>) -> Result<Self, LatticeError> {
        let dim = normals.first().map_or(0, Vec::len);
        if dim == 0 {
            return Err(LatticeError::ZeroDimension);
        }
        if offsets.len() != normals.len() {
            return Err(LatticeError::DimensionMismatch {
                expected: normals.len(),
                found: offsets.len(),
            });
        }
        if let Some(v) = normals.iter().find(|v| v.len() != dim) {
            return Err(LatticeError::DimensionMismatch {
                expected: dim,
                found: v.len(),
            });
        }
        if rank(&normals) < dim {
            return Err(LatticeError::Unbounded);
        }
        let vertices = enumerate_vertices(&normals, &offsets, dim);
        if vertices.is_empty() {
            return Err(LatticeError::Empty);
        }
        if has_recession_ray(&normals, dim) {
            return Err(LatticeError::Unbounded);
        }
        let full_dimensional = centroid_is_interior(&normals, &offsets, &vertices);
        let mut p = Self {
            dim,
            normals,
            offsets,
            vertices,
            full_dimensional,
            lattice_points: Vec::new(),
        };
        if p.full_dimensional {
            for (i, v) in p.vertices.iter().enumerate() {
                let active = p.active_facets(v);
                let m: Vec<Vec<i64>> = active.iter().map(|&k| p.normals[k].clone()).collect();
                if active.len() != dim || int_det(&m).abs() != 1 {
                    return Err(LatticeError::NonSmoothVertex { vertex: i });
                }
            }
        }
        p.lattice_points = p.brute_force_lattice_points();
        Ok(p)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn normals(&self) -> &[Vec<i64>] {
        &self.normals
    }

    pub fn offsets(&self) -> &[i64] {
        &self.offsets
    }

    pub fn vertices(&self) -> &[Vec<Rational>] {
        &self.vertices
    }

    pub fn is_full_dimensional(&self) -> bool {
        self.full_dimensional
    }

    pub fn lattice_points(&self) -> &[LatticePoint] {
        &self.lattice_points
    }

    /// Vertices as integer vectors, when all are integral.
    pub fn integer_vertices(&self) -> Option<Vec<Vec<i64>>> {
        self.vertices
            .iter()
            .map(|v| {
                v.iter()
                    .map(|x| x.is_integer().then(|| x.to_integer() as i64))
                    .collect()
            })
            .collect()
    }

    /// Facet slacks `⟨x, v_k⟩ + λ_k`.
    pub fn slacks(&self, x: &[i64]) -> Vec<i64> {
        self.normals
            .iter()
            .zip(&self.offsets)
            .map(|(v, l)| v.iter().zip(x).map(|(a, b)| a * b).sum::<i64>() + l)
            .collect()
    }

    pub fn contains(&self, x: &[i64]) -> bool {
        self.slacks(x).iter().all(|&s| s >= 0)
    }

    pub fn location(&self, x: &[i64]) -> Option<PointLocation> {
        let s = self.slacks(x);
        if s.iter().any(|&v| v < 0) {
            None
        } else if s.iter().all(|&v| v > 0) {
            Some(PointLocation::Interior)
        } else {
            Some(PointLocation::Boundary)
        }
    }

    /// Indices of facets whose inequality is tight at `x`.
    pub fn active_facets(&self, x: &[Rational]) -> Vec<usize> {
        self.normals
            .iter()
            .zip(&self.offsets)
            .enumerate()
            .filter(|(_, (v, &l))| (rat_dot(v, x) + Rational::from_integer(l as i128)).is_zero())
            .map(|(k, _)| k)
            .collect()
    }

    /// Integer bounding box `(lo, hi)` of the polytope.
    pub fn bounding_box(&self) -> (Vec<i64>, Vec<i64>) {
        let mut lo = vec![i64::MAX; self.dim];
        let mut hi = vec![i64::MIN; self.dim];
        for v in &self.vertices {
            for (j, x) in v.iter().enumerate() {
                let (f, c) = floor_ceil(x);
                lo[j] = lo[j].min(f);
                hi[j] = hi[j].max(c);
            }
        }
        (lo, hi)
    }

    fn brute_force_lattice_points(&self) -> Vec<LatticePoint> {
        let (lo, hi) = self.bounding_box();
        integer_range_box(&lo, &hi)
            .into_iter()
            .filter_map(|x| self.location(&x).map(|location| LatticePoint { coords: x, location }))
            .collect()
    }

    /// Rows of active facet normals at a vertex, ordered so the determinant
    /// is `+1` when some ordering achieves it.
    pub fn vertex_chart(&self, vertex: &[Rational]) -> Result<VertexChart, LatticeError> {
        if !self.vertices.iter().any(|v| v.as_slice() == vertex) {
            return Err(LatticeError::NotAVertex);
        }
        let active = self.active_facets(vertex);
        if active.len() != self.dim {
            return Err(LatticeError::DegenerateVertex { active: active.len() });
        }
        let rows_for = |order: &[usize]| -> Vec<Vec<i64>> { order.iter().map(|&k| self.normals[k].clone()).collect() };
        let facets = permutations(&active)
            .into_iter()
            .find(|p| int_det(&rows_for(p)) == 1)
            .unwrap_or_else(|| active.clone());
        let matrix = rows_for(&facets);
        let inverse = unimodular_inverse(&matrix).ok_or(LatticeError::DegenerateVertex { active: active.len() })?;
        let shift = facets.iter().map(|&k| self.offsets[k]).collect();
        Ok(VertexChart {
            vertex: vertex.to_vec(),
            facets,
            matrix,
            inverse,
            shift,
        })
    }

    /// Writes the lattice points as CSV rows `x1,...,xn,label`.
    pub fn write_lattice_points_csv<W: Write>(&self, out: W) -> Result<(), csv::Error> {
        let mut w = csv::Writer::from_writer(out);
        let mut header: Vec<String> = (1..=self.dim).map(|j| format!("x{j}")).collect();
        header.push("label".into());
        w.write_record(&header)?;
        for p in &self.lattice_points {
            let mut rec: Vec<String> = p.coords.iter().map(i64::to_string).collect();
            rec.push(p.location.label().into());
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Chart data at a vertex: rows of `matrix` are the active facet normals in
/// the order `facets`, `inverse` is its exact inverse, `shift` the matching
/// offsets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VertexChart {
    pub vertex: Vec<Rational>,
    pub facets: Vec<usize>,
    pub matrix: Vec<Vec<i64>>,
    pub inverse: Vec<Vec<i64>>,
    pub shift: Vec<i64>,
}

impl VertexChart {
    pub fn det(&self) -> i64 {
        int_det(&self.matrix)
    }
}

/// `B = {x : ⟨x, v_k⟩ + λ_k ≥ 0}` for a fan, additionally checking that
/// every vertex's active facets form a maximal cone.
pub fn polytope_from_fan(fan: &Fan, lambda: &[i64]) -> Result<Polytope, LatticeError> {
    if lambda.len() != fan.num_rays() {
        return Err(LatticeError::DimensionMismatch {
            expected: fan.num_rays(),
            found: lambda.len(),
        });
    }
    let p = Polytope::from_halfspaces(fan.generators().to_vec(), lambda.to_vec())?;
    if p.is_full_dimensional() {
        for (i, v) in p.vertices().iter().enumerate() {
            if !fan.is_max_cone(&p.active_facets(v)) {
                return Err(LatticeError::VertexConeMismatch { vertex: i });
            }
        }
    }
    Ok(p)
}

pub fn enumerate_lattice_points(p: &Polytope) -> &[LatticePoint] {
    p.lattice_points()
}

fn enumerate_vertices(normals: &[Vec<i64>], offsets: &[i64], dim: usize) -> Vec<Vec<Rational>> {
    let mut out: Vec<Vec<Rational>> = Vec::new();
    for subset in combinations(normals.len(), dim) {
        let m: Vec<Vec<i64>> = subset.iter().map(|&k| normals[k].clone()).collect();
        let rhs: Vec<Rational> = subset
            .iter()
            .map(|&k| Rational::from_integer(-(offsets[k] as i128)))
            .collect();
        let Some(x) = solve(&m, &rhs) else { continue };
        let feasible = normals
            .iter()
            .zip(offsets)
            .all(|(v, &l)| rat_dot(v, &x) + Rational::from_integer(l as i128) >= Rational::zero());
        if feasible && !out.contains(&x) {
            out.push(x);
        }
    }
    out.sort();
    out
}

/// Whether `{r : V r ≥ 0}` contains a nonzero vector, for `V` of full
/// column rank (so the cone is pointed and any ray is cut out by `n-1`
/// independent tight rows).
fn has_recession_ray(normals: &[Vec<i64>], dim: usize) -> bool {
    combinations(normals.len(), dim - 1).into_iter().any(|subset| {
        let m: Vec<Vec<i64>> = subset.iter().map(|&k| normals[k].clone()).collect();
        let ns = nullspace(&m, dim);
        if ns.len() != 1 {
            return false;
        }
        let r = &ns[0];
        [Rational::one(), -Rational::one()]
            .iter()
            .any(|s| normals.iter().all(|v| (rat_dot(v, r) * *s) >= Rational::zero()))
    })
}

fn centroid_is_interior(normals: &[Vec<i64>], offsets: &[i64], vertices: &[Vec<Rational>]) -> bool {
    let n = vertices[0].len();
    let count = Rational::from_integer(vertices.len() as i128);
    let c: Vec<Rational> = (0..n)
        .map(|j| vertices.iter().map(|v| v[j]).fold(Rational::zero(), |a, b| a + b) / count)
        .collect();
    normals
        .iter()
        .zip(offsets)
        .all(|(v, &l)| (rat_dot(v, &c) + Rational::from_integer(l as i128)).is_positive())
}

/// All `k`-subsets of `0..n` in lexicographic order.
pub(crate) fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if k <= n {
        rec(0, n, k, &mut Vec::new(), &mut out);
    }
    out
}

/// Permutations of `items` in lexicographic order of positions.
fn permutations(items: &[usize]) -> Vec<Vec<usize>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let head = rest.remove(i);
        for mut tail in permutations(&rest) {
            tail.insert(0, head);
            out.push(tail);
        }
    }
    out
}
