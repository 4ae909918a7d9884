//! Built-in smooth projective toric fans and the lattice polytopes of
//! standard line bundles on them.

use crate::lattice::Fan;

/// Fan of the projective line: rays `±1`.
pub fn projective_line() -> Fan {
    Fan::new(1, vec![vec![1], vec![-1]], vec![vec![0], vec![1]]).expect("valid fan")
}

/// Fan of the projective plane: rays `e₁, e₂, -e₁-e₂`.
pub fn projective_plane() -> Fan {
    Fan::new(
        2,
        vec![vec![1, 0], vec![0, 1], vec![-1, -1]],
        vec![vec![0, 1], vec![1, 2], vec![2, 0]],
    )
    .expect("valid fan")
}

/// Fan of `ℙ¹ × ℙ¹`: rays `±e₁, ±e₂`.
pub fn product_of_lines() -> Fan {
    Fan::new(
        2,
        vec![vec![1, 0], vec![0, 1], vec![-1, 0], vec![0, -1]],
        vec![vec![0, 1], vec![1, 2], vec![2, 3], vec![3, 0]],
    )
    .expect("valid fan")
}

/// Offsets for `O(k)` on the projective line (interval `[0, k]`).
pub fn line_offsets(k: i64) -> Vec<i64> {
    vec![0, k]
}

/// Offsets for `O(d)` on the projective plane (standard simplex scaled by `d`).
pub fn plane_offsets(d: i64) -> Vec<i64> {
    vec![0, 0, d]
}

/// Offsets for `O(a, b)` on `ℙ¹ × ℙ¹` (rectangle `[0, a] × [0, b]`).
pub fn product_offsets(a: i64, b: i64) -> Vec<i64> {
    vec![0, 0, a, b]
}

/// A named fan with offsets, as used by the verification sweeps.
#[derive(Debug, Clone)]
pub struct CatalogEntry {
    pub name: String,
    pub fan: Fan,
    pub lambda: Vec<i64>,
}

/// `ℙ¹` with `k = 1..4`, `ℙ²` with `d = 1..3`, `ℙ¹×ℙ¹` with `(1,1)`, `(2,1)`.
pub fn standard_entries() -> Vec<CatalogEntry> {
    let mut out = Vec::new();
    for k in 1..=4 {
        out.push(CatalogEntry {
            name: format!("P1(O({k}))"),
            fan: projective_line(),
            lambda: line_offsets(k),
        });
    }
    for d in 1..=3 {
        out.push(CatalogEntry {
            name: format!("P2(O({d}))"),
            fan: projective_plane(),
            lambda: plane_offsets(d),
        });
    }
    for (a, b) in [(1, 1), (2, 1)] {
        out.push(CatalogEntry {
            name: format!("P1xP1(O({a},{b}))"),
            fan: product_of_lines(),
            lambda: product_offsets(a, b),
        });
    }
    out
}
