use serde::Serialize;

use super::exact::{hermite_normal_form, mat_vec, smith_normal_form, unimodular_inverse};
use super::fan::Fan;

/// Divisor class `[a] ∈ ℤ^d / ι(M)` where `ι(u) = (⟨u, v_k⟩)_k`.
///
/// `representative` vanishes on the first maximal cone; `invariants` lists
/// the free coordinates followed by torsion residues. Both are canonical,
/// so equality of classes is plain equality.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct PicardClass {
    pub representative: Vec<i64>,
    pub invariants: Vec<i64>,
}

pub fn picard_reduce(a: &[i64], fan: &Fan) -> PicardClass {
    assert_eq!(a.len(), fan.num_rays(), "divisor length must match ray count");
    let gens = fan.generators();
    let snf = smith_normal_form(gens);
    let r = snf.rank();
    let ua = mat_vec(&snf.u, a);

    // Left kernel of the generator matrix, in canonical form.
    let kernel_rows: Vec<Vec<i64>> = snf.u[r..].to_vec();
    let kernel = hermite_normal_form(&kernel_rows);
    let mut invariants = mat_vec(&kernel, a);
    invariants.extend(
        snf.diagonal
            .iter()
            .zip(&ua)
            .filter(|(&d, _)| d > 1)
            .map(|(&d, &x)| x.rem_euclid(d)),
    );

    // Shift by ι(u) so that the first maximal cone carries zeros.
    let cone = &fan.max_cones()[0];
    let inv = unimodular_inverse(&fan.cone_matrix(0)).expect("maximal cones are unimodular");
    let a_cone: Vec<i64> = cone.iter().map(|&i| a[i]).collect();
    let u: Vec<i64> = mat_vec(&inv, &a_cone).into_iter().map(|x| -x).collect();
    let shift = fan.pairings(&u);
    let representative = a.iter().zip(shift).map(|(x, s)| x + s).collect();

    PicardClass {
        representative,
        invariants,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p1() -> Fan {
        Fan::new(1, vec![vec![1], vec![-1]], vec![vec![0], vec![1]]).unwrap()
    }

    #[test]
    fn projective_line_degree() {
        for (a, k) in [([0, 3], 3), ([2, 1], 3), ([-4, 1], -3)] {
            let c = picard_reduce(&a, &p1());
            assert_eq!(c.invariants, vec![k]);
            assert_eq!(c.representative, vec![0, k]);
        }
    }
}
