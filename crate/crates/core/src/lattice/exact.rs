//! Exact integer and rational linear algebra on small dense matrices.

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{One, Signed, Zero};

/// Exact rational scalar used for all polytope arithmetic.
pub type Rational = Ratio<i128>;

pub type IntMatrix = Vec<Vec<i64>>;
pub type RatMatrix = Vec<Vec<Rational>>;

pub fn to_rational(m: &[Vec<i64>]) -> RatMatrix {
    m.iter()
        .map(|row| row.iter().map(|&x| Rational::from_integer(x as i128)).collect())
        .collect()
}

/// Determinant of a square integer matrix by fraction-free elimination.
pub fn int_det(m: &[Vec<i64>]) -> i64 {
    let n = m.len();
    if n == 0 {
        return 1;
    }
    let mut a: Vec<Vec<i128>> = m.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n {
        if a[k][k] == 0 {
            match (k + 1..n).find(|&i| a[i][k] != 0) {
                Some(i) => {
                    a.swap(k, i);
                    sign = -sign;
                }
                None => return 0,
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
            }
        }
        prev = a[k][k];
    }
    (sign * a[n - 1][n - 1]) as i64
}

/// Reduced row echelon form over ℚ; returns the pivot columns.
fn rref(a: &mut RatMatrix) -> Vec<usize> {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        let inv = a[r][c].recip();
        for x in a[r].iter_mut() {
            *x *= inv;
        }
        for i in 0..rows {
            if i != r && !a[i][c].is_zero() {
                let f = a[i][c];
                for j in 0..cols {
                    let t = a[r][j] * f;
                    a[i][j] -= t;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank(m: &[Vec<i64>]) -> usize {
    let mut a = to_rational(m);
    rref(&mut a).len()
}

/// Basis of the right null space `{x : m x = 0}` over ℚ.
pub fn nullspace(m: &[Vec<i64>], cols: usize) -> RatMatrix {
    let mut a = to_rational(m);
    let pivots = rref(&mut a);
    (0..cols)
        .filter(|c| !pivots.contains(c))
        .map(|free| {
            let mut x = vec![Rational::zero(); cols];
            x[free] = Rational::one();
            for (row, &p) in pivots.iter().enumerate() {
                x[p] = -a[row][free];
            }
            x
        })
        .collect()
}

/// Solves the square system `m x = b` exactly; `None` if singular.
pub fn solve(m: &[Vec<i64>], b: &[Rational]) -> Option<Vec<Rational>> {
    let n = m.len();
    let mut a: RatMatrix = to_rational(m);
    for (row, rhs) in a.iter_mut().zip(b) {
        row.push(*rhs);
    }
    let pivots = rref(&mut a);
    if pivots.len() < n || pivots.iter().any(|&p| p >= n) {
        return None;
    }
    Some(a.iter().map(|row| row[n]).collect())
}

/// Inverse of a unimodular integer matrix.
pub fn unimodular_inverse(m: &[Vec<i64>]) -> Option<IntMatrix> {
    let n = m.len();
    if int_det(m).abs() != 1 {
        return None;
    }
    let mut a = to_rational(m);
    for (i, row) in a.iter_mut().enumerate() {
        row.extend((0..n).map(|j| if i == j { Rational::one() } else { Rational::zero() }));
    }
    rref(&mut a);
    Some(
        a.iter()
            .map(|row| row[n..].iter().map(|x| x.to_integer() as i64).collect())
            .collect(),
    )
}

/// Classical adjugate, so that `m · adj(m) = det(m) · I`.
pub fn adjugate(m: &[Vec<i64>]) -> IntMatrix {
    let n = m.len();
    if n == 1 {
        return vec![vec![1]];
    }
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    // Entry (i, j) is the (j, i) cofactor.
                    let minor: Vec<Vec<i64>> = (0..n)
                        .filter(|&r| r != j)
                        .map(|r| (0..n).filter(|&c| c != i).map(|c| m[r][c]).collect())
                        .collect();
                    let sign = if (i + j) % 2 == 0 { 1 } else { -1 };
                    sign * int_det(&minor)
                })
                .collect()
        })
        .collect()
}

pub fn mat_mul(a: &[Vec<i64>], b: &[Vec<i64>]) -> IntMatrix {
    let inner = b.len();
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| (0..cols).map(|j| (0..inner).map(|k| row[k] * b[k][j]).sum()).collect())
        .collect()
}

pub fn mat_vec(a: &[Vec<i64>], x: &[i64]) -> Vec<i64> {
    a.iter().map(|row| dot(row, x)).collect()
}

pub fn dot(a: &[i64], b: &[i64]) -> i64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn rat_dot(a: &[i64], x: &[Rational]) -> Rational {
    a.iter()
        .zip(x)
        .map(|(&c, v)| *v * Rational::from_integer(c as i128))
        .fold(Rational::zero(), |s, t| s + t)
}

pub fn identity(n: usize) -> IntMatrix {
    (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect()
}

pub fn transpose(a: &[Vec<i64>]) -> IntMatrix {
    let cols = a.first().map_or(0, Vec::len);
    (0..cols).map(|j| a.iter().map(|r| r[j]).collect()).collect()
}

pub fn gcd_all(v: &[i64]) -> i64 {
    v.iter().fold(0i64, |g, &x| g.gcd(&x))
}

/// Smith normal form `u · m · w = d` with `u`, `w` unimodular and the
/// nonzero diagonal entries of `d` positive, each dividing the next.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SmithForm {
    pub u: IntMatrix,
    pub w: IntMatrix,
    pub diagonal: Vec<i64>,
}

impl SmithForm {
    pub fn rank(&self) -> usize {
        self.diagonal.iter().filter(|&&d| d != 0).count()
    }
}

pub fn smith_normal_form(m: &[Vec<i64>]) -> SmithForm {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut a = m.to_vec();
    let mut u = identity(rows);
    let mut w = identity(cols);
    let size = rows.min(cols);

    for t in 0..size {
        // Pivot on the smallest nonzero entry of the remaining block.
        let mut best: Option<(usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                if a[i][j] != 0 && best.is_none_or(|(bi, bj)| a[i][j].abs() < a[bi][bj].abs()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        a.swap(t, pi);
        u.swap(t, pi);
        for r in a.iter_mut() {
            r.swap(t, pj);
        }
        for r in w.iter_mut() {
            r.swap(t, pj);
        }

        loop {
            let mut clean = true;
            for i in t + 1..rows {
                let q = Integer::div_floor(&a[i][t], &a[t][t]);
                if q != 0 {
                    row_axpy(&mut a, i, t, -q);
                    row_axpy(&mut u, i, t, -q);
                }
                if a[i][t] != 0 {
                    clean = false;
                    a.swap(t, i);
                    u.swap(t, i);
                }
            }
            for j in t + 1..cols {
                let q = Integer::div_floor(&a[t][j], &a[t][t]);
                if q != 0 {
                    col_axpy(&mut a, j, t, -q);
                    col_axpy(&mut w, j, t, -q);
                }
                if a[t][j] != 0 {
                    clean = false;
                    for r in a.iter_mut() {
                        r.swap(t, j);
                    }
                    for r in w.iter_mut() {
                        r.swap(t, j);
                    }
                }
            }
            if !clean {
                continue;
            }
            // Divisibility of the rest of the block by the pivot.
            let bad = (t + 1..rows)
                .flat_map(|i| (t + 1..cols).map(move |j| (i, j)))
                .find(|&(i, j)| a[i][j] % a[t][t] != 0);
            match bad {
                Some((i, _)) => {
                    row_axpy(&mut a, t, i, 1);
                    row_axpy(&mut u, t, i, 1);
                }
                None => break,
            }
        }
        if a[t][t] < 0 {
            for x in a[t].iter_mut() {
                *x = -*x;
            }
            for x in u[t].iter_mut() {
                *x = -*x;
            }
        }
    }
    let diagonal = (0..size).map(|i| a[i][i]).collect();
    SmithForm { u, w, diagonal }
}

fn row_axpy(a: &mut [Vec<i64>], target: usize, source: usize, factor: i64) {
    let src = a[source].clone();
    for (x, s) in a[target].iter_mut().zip(src) {
        *x += factor * s;
    }
}

fn col_axpy(a: &mut [Vec<i64>], target: usize, source: usize, factor: i64) {
    for r in a.iter_mut() {
        r[target] += factor * r[source];
    }
}

/// Row-style Hermite normal form: upper echelon, positive pivots, entries
/// above each pivot reduced into `[0, pivot)`. Zero rows are dropped.
pub fn hermite_normal_form(m: &[Vec<i64>]) -> IntMatrix {
    let mut a = m.to_vec();
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        while let Some(p) = (r..rows).filter(|&i| a[i][c] != 0).min_by_key(|&i| a[i][c].abs()) {
            a.swap(r, p);
            let mut done = true;
            for i in r + 1..rows {
                let q = Integer::div_floor(&a[i][c], &a[r][c]);
                row_axpy(&mut a, i, r, -q);
                if a[i][c] != 0 {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if a[r][c] == 0 {
            continue;
        }
        if a[r][c] < 0 {
            for x in a[r].iter_mut() {
                *x = -*x;
            }
        }
        for i in 0..r {
            let q = Integer::div_floor(&a[i][c], &a[r][c]);
            row_axpy(&mut a, i, r, -q);
        }
        r += 1;
    }
    a.truncate(r);
    a
}

/// `floor` and `ceil` of a rational as integers.
pub fn floor_ceil(x: &Rational) -> (i64, i64) {
    (x.floor().to_integer() as i64, x.ceil().to_integer() as i64)
}

pub fn is_integral(x: &[Rational]) -> bool {
    x.iter().all(|v| v.is_integer())
}

pub fn rat_abs(x: &Rational) -> Rational {
    x.abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn determinants() {
        assert_eq!(int_det(&[vec![2, 1], vec![1, 2]]), 3);
        assert_eq!(int_det(&[vec![0, 1], vec![-1, -1]]), 1);
        assert_eq!(int_det(&[vec![0, 1, 0], vec![1, 0, 0], vec![0, 0, 1]]), -1);
        assert_eq!(int_det(&[vec![1, 2], vec![2, 4]]), 0);
    }

    #[test]
    fn smith_form_reconstructs() {
        let m = vec![vec![1, 0], vec![0, 1], vec![-1, -1]];
        let s = smith_normal_form(&m);
        let d = mat_mul(&mat_mul(&s.u, &m), &s.w);
        assert_eq!(s.diagonal, vec![1, 1]);
        for (i, row) in d.iter().enumerate() {
            for (j, &x) in row.iter().enumerate() {
                let expect = if i == j { s.diagonal[i] } else { 0 };
                assert_eq!(x, expect);
            }
        }
        let s = smith_normal_form(&[vec![2, 4], vec![6, 8]]);
        assert_eq!(s.diagonal, vec![2, 4]);
        assert_eq!(int_det(&s.u).abs(), 1);
        assert_eq!(int_det(&s.w).abs(), 1);
    }

    #[test]
    fn adjugate_times_matrix_is_det() {
        let m = vec![vec![2, 1, 0], vec![1, 3, 1], vec![0, 1, 4]];
        let d = int_det(&m);
        let prod = mat_mul(&m, &adjugate(&m));
        for (i, row) in prod.iter().enumerate() {
            for (j, &x) in row.iter().enumerate() {
                assert_eq!(x, if i == j { d } else { 0 });
            }
        }
    }

    #[test]
    fn hnf_is_canonical() {
        assert_eq!(hermite_normal_form(&[vec![-1, -1]]), vec![vec![1, 1]]);
        assert_eq!(
            hermite_normal_form(&[vec![2, 1], vec![4, 3]]),
            vec![vec![2, 0], vec![0, 1]]
        );
    }

    #[test]
    fn inverse_and_nullspace() {
        let a = vec![vec![0, 1], vec![-1, -1]];
        let inv = unimodular_inverse(&a).unwrap();
        assert_eq!(mat_mul(&a, &inv), identity(2));
        let ns = nullspace(&[vec![1, 1]], 2);
        assert_eq!(ns.len(), 1);
        assert_eq!(ns[0][0], -ns[0][1]);
    }
}
