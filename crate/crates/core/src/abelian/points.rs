use num_traits::Zero;
use serde::Serialize;

use super::AbelianMirrorDatum;
use crate::lattice::exact::{mat_vec, smith_normal_form, Rational};
use crate::numerics::integer_range_box;

/// A point `x ∈ [0, 1)ⁿ` with `Qx ∈ ℤⁿ`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IntersectionPoint {
    pub index: usize,
    #[serde(serialize_with = "serialize_rationals")]
    pub coords: Vec<Rational>,
    /// The integer vector `Qx`.
    pub image: Vec<i64>,
}

fn serialize_rationals<S: serde::Serializer>(v: &[Rational], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|r| format!("{}/{}", r.numer(), r.denom())))
}

impl IntersectionPoint {
    pub fn to_f64(&self) -> Vec<f64> {
        self.coords
            .iter()
            .map(|r| *r.numer() as f64 / *r.denom() as f64)
            .collect()
    }
}

/// All `x ∈ [0, 1)ⁿ` with `Qx` integral, in lexicographic order.
///
/// With `U Q W = D` in Smith form, `x = W D⁻¹ j mod 1` for `0 ≤ j_i < d_i`.
pub fn intersection_points(datum: &AbelianMirrorDatum) -> Vec<IntersectionPoint> {
    let q = datum.polarization();
    let n = datum.dim();
    let snf = smith_normal_form(q);
    let d = &snf.diagonal;
    let hi: Vec<i64> = d.iter().map(|&x| x - 1).collect();
    let mut coords: Vec<Vec<Rational>> = integer_range_box(&vec![0; n], &hi)
        .into_iter()
        .map(|j| {
            (0..n)
                .map(|r| {
                    let x = (0..n)
                        .map(|c| Rational::new((snf.w[r][c] * j[c]) as i128, d[c] as i128))
                        .fold(Rational::zero(), |a, b| a + b);
                    x - x.floor()
                })
                .collect()
        })
        .collect();
    coords.sort();
    coords.dedup();
    coords
        .into_iter()
        .enumerate()
        .map(|(index, x)| {
            let image = (0..n)
                .map(|r| {
                    let v = (0..n)
                        .map(|c| x[c] * Rational::from_integer(q[r][c] as i128))
                        .fold(Rational::zero(), |a, b| a + b);
                    debug_assert!(v.is_integer());
                    v.to_integer() as i64
                })
                .collect();
            IntersectionPoint {
                index,
                coords: x,
                image,
            }
        })
        .collect()
}

/// Whether `Qx ∈ ℤⁿ` up to `tol`.
pub fn is_critical(datum: &AbelianMirrorDatum, x: &[f64], tol: f64) -> bool {
    let q = datum.polarization();
    q.iter().all(|row| {
        let v: f64 = row.iter().zip(x).map(|(&a, b)| a as f64 * b).sum();
        (v - v.round()).abs() <= tol
    })
}

/// `Q⁻¹ n + x_k ∈ ℤⁿ`, i.e. `n + Q x_k ∈ Q ℤⁿ`, decided exactly via the
/// adjugate: `adj(Q)(n + Qx_k) ≡ 0 mod det Q`.
pub(crate) fn coset_member(adjugate: &[Vec<i64>], det: i64, shift: &[i64], label: &[i64]) -> bool {
    let v: Vec<i64> = label.iter().zip(shift).map(|(a, b)| a + b).collect();
    mat_vec(adjugate, &v).iter().all(|x| x % det == 0)
}
