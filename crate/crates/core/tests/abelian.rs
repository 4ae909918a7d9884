use std::f64::consts::PI;

use num_complex::Complex64;
use proptest::prelude::*;
use syzq_core::abelian::*;
use syzq_core::numerics::{integer_box, NumericsConfig};
use syzq_core::syz::{witten_value, WittenContext};

fn datum(omega: &[&[f64]], q: &[&[f64]]) -> AbelianMirrorDatum {
    let o: Vec<Vec<f64>> = omega.iter().map(|r| r.to_vec()).collect();
    let q: Vec<Vec<f64>> = q.iter().map(|r| r.to_vec()).collect();
    validate_datum(&o, &q).unwrap()
}

/// Direct lattice sum of the classical theta series in the holomorphic
/// frame, independent of the transform machinery.
fn theta_oracle(d: &AbelianMirrorDatum, xk: &[f64], x: &[f64], y: &[f64], hbar: f64, radius: i64) -> Complex64 {
    let n = d.dim();
    let qo = d.q_omega();
    let q = d.polarization();
    let om = d.period();
    let i = Complex64::new(0.0, 1.0);
    let mut s = Complex64::new(0.0, 0.0);
    for m in integer_box(n, radius) {
        let mf: Vec<f64> = m.iter().map(|&v| v as f64).collect();
        let quad: f64 = (0..n)
            .map(|a| (0..n).map(|b| mf[a] * qo[(a, b)] * mf[b]).sum::<f64>())
            .sum();
        let mut phase = Complex64::new(0.0, 0.0);
        for a in 0..n {
            let qm: f64 = (0..n).map(|b| q[a][b] as f64 * mf[b]).sum();
            let w = y[a] + i * (0..n).map(|b| om[(a, b)] * (x[b] - xk[b])).sum::<f64>() / hbar;
            phase += w * qm;
        }
        s += (-PI / hbar * quad).exp() * (2.0 * PI * i * phase).exp();
    }
    s
}

#[test]
fn validation_examples() {
    assert!(validate_datum(&[vec![2.0]], &[vec![3.0]]).is_ok());
    let e = validate_datum(&[vec![2.0, 0.0], vec![0.0, 3.0]], &[vec![1.0, 1.0], vec![1.0, 2.0]]);
    assert!(matches!(e, Err(AbelianError::DoNotCommute { .. })));
    assert!(validate_datum(&[vec![1.0, 0.0], vec![0.0, 1.0]], &[vec![2.0, 1.0], vec![1.0, 2.0]]).is_ok());
    assert!(matches!(
        validate_datum(&[vec![1.0]], &[vec![1.5]]),
        Err(AbelianError::NotIntegral)
    ));
    assert!(matches!(
        validate_datum(&[vec![1.0, 0.5], vec![0.4, 1.0]], &[vec![1.0, 0.0], vec![0.0, 1.0]]),
        Err(AbelianError::NotSymmetric { which: "Omega" })
    ));
    assert!(matches!(
        validate_datum(&[vec![-1.0]], &[vec![1.0]]),
        Err(AbelianError::NotPositiveDefinite { which: "Omega" })
    ));
}

#[test]
fn bilinear_relations_hold_for_valid_data() {
    let d = datum(&[&[1.0, 0.5], &[0.5, 1.0]], &[&[2.0, 1.0], &[1.0, 2.0]]);
    let b = d.bilinear();
    assert!(b.vanishing < 1e-12, "{b:?}");
    assert!(b.positivity > 0.0);
    assert!(b.hermiticity < 1e-12);
    // Non-commuting pair: the first relation fails to vanish.
    let om = nalgebra::DMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 3.0]);
    let q = nalgebra::DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, 2.0]);
    assert!(bilinear_residuals(&om, &q).vanishing > 0.1);
}

fn brute_force_points(q: &[Vec<i64>]) -> Vec<Vec<f64>> {
    let n = q.len();
    let det = syzq_core::lattice::exact::int_det(q).abs();
    let mut out = Vec::new();
    for j in syzq_core::numerics::integer_range_box(&vec![0; n], &vec![det - 1; n]) {
        let x: Vec<f64> = j.iter().map(|&v| v as f64 / det as f64).collect();
        let ok = q.iter().all(|row| {
            let s: i64 = row.iter().zip(&j).map(|(a, b)| a * b).sum();
            s % det == 0
        });
        if ok {
            out.push(x);
        }
    }
    out
}

#[test]
fn intersection_points_match_brute_force() {
    let cases: Vec<(Vec<Vec<f64>>, Vec<Vec<f64>>)> = vec![
        (vec![vec![1.0]], vec![vec![1.0]]),
        (vec![vec![1.0]], vec![vec![2.0]]),
        (vec![vec![1.0]], vec![vec![3.0]]),
        (
            vec![vec![1.0, 0.0], vec![0.0, 1.0]],
            vec![vec![2.0, 1.0], vec![1.0, 2.0]],
        ),
        (
            vec![vec![1.0, 0.0], vec![0.0, 1.0]],
            vec![vec![3.0, 0.0], vec![0.0, 2.0]],
        ),
        (
            vec![vec![1.0, 0.0], vec![0.0, 1.0]],
            vec![vec![4.0, 2.0], vec![2.0, 3.0]],
        ),
    ];
    for (o, q) in cases {
        let d = validate_datum(&o, &q).unwrap();
        let pts = intersection_points(&d);
        assert_eq!(pts.len() as i64, d.det_q().abs());
        let got: Vec<Vec<f64>> = pts.iter().map(|p| p.to_f64()).collect();
        let want = brute_force_points(d.polarization());
        assert_eq!(got.len(), want.len());
        for (a, b) in got.iter().zip(&want) {
            assert!(a.iter().zip(b).all(|(x, y)| (x - y).abs() < 1e-15), "{a:?} vs {b:?}");
        }
        for p in &pts {
            assert!(is_critical(&d, &p.to_f64(), 0.0));
        }
    }
    let d = datum(&[&[1.0]], &[&[2.0]]);
    let xs: Vec<Vec<f64>> = intersection_points(&d).iter().map(|p| p.to_f64()).collect();
    assert_eq!(xs, vec![vec![0.0], vec![0.5]]);
}

#[test]
fn representative_values_and_closedness() {
    let d = datum(&[&[1.0]], &[&[1.0]]);
    let a = witten_representative(&d, &[0.0], 1.0).unwrap();
    assert!((a.eval(&[0.0], &[0]).re - 1.0).abs() < 1e-15);
    assert!((a.eval(&[0.0], &[1]).re - (-PI).exp()).abs() < 1e-15);
    assert!((a.eval(&[0.0], &[1]).re - 0.043214).abs() < 1e-6);
    assert_eq!(
        witten_representative(&d, &[0.3], 1.0).unwrap_err(),
        AbelianError::NotACriticalPoint
    );

    let cfg = NumericsConfig::default();
    let cases = [
        datum(&[&[1.0]], &[&[3.0]]),
        datum(&[&[1.0, 0.5], &[0.5, 1.0]], &[&[2.0, 1.0], &[1.0, 2.0]]),
    ];
    for d in &cases {
        let ctx = abelian_context(d, 1.0).unwrap();
        for p in intersection_points(d) {
            let a = witten_representative(d, &p.to_f64(), 1.0).unwrap();
            for m in integer_box(d.dim(), 3) {
                if !a.support().contains(&m) {
                    continue;
                }
                for x in [vec![0.1; d.dim()], vec![0.7; d.dim()]] {
                    // Exact gradient against a plain central difference.
                    let g = a.gradient(&x, &m, None).unwrap();
                    for (j, gj) in g.iter().enumerate() {
                        let h = 1e-5;
                        let (mut xp, mut xm) = (x.clone(), x.clone());
                        xp[j] += h;
                        xm[j] -= h;
                        let fd = (a.eval(&xp, &m) - a.eval(&xm, &m)) / (2.0 * h);
                        assert!((gj - fd).norm() < 1e-6 * (1.0 + fd.norm()), "{gj} vs {fd}");
                    }
                    let w = witten_value(&a, &ctx, &x, &m, &cfg).unwrap();
                    assert!(w.iter().all(|z| z.norm() < 1e-12), "{w:?}");
                }
            }
        }
    }
}

#[test]
fn theta_value_matches_lattice_sum() {
    let d = datum(&[&[1.0]], &[&[1.0]]);
    let cfg = NumericsConfig::default().with_truncation(6);
    let t = theta_function(&d, &[0.0], &cfg).unwrap();
    let v = t.eval(&[0.0], &[0.0]);
    let oracle: f64 = (-20i64..=20).map(|m| (-PI * (m * m) as f64).exp()).sum();
    assert!((v.re - oracle).abs() < 1e-12 && v.im.abs() < 1e-14);
    assert!((v.re - 1.0864348).abs() < 1e-7);
}

#[test]
fn theta_matches_classical_series_off_origin() {
    let cases = [
        (datum(&[&[1.0]], &[&[2.0]]), 1.0),
        (datum(&[&[1.0, 0.5], &[0.5, 1.0]], &[&[2.0, 1.0], &[1.0, 2.0]]), 1.0),
        (datum(&[&[1.0, 0.0], &[0.0, 1.0]], &[&[3.0, 0.0], &[0.0, 2.0]]), 0.7),
    ];
    for (d, hbar) in cases {
        let cfg = NumericsConfig::default().with_hbar(hbar);
        for p in intersection_points(&d) {
            let xk = p.to_f64();
            let t = theta_function(&d, &xk, &cfg).unwrap();
            for (x, y) in [(0.13, 0.71), (0.42, 0.05), (-0.3, 0.5)] {
                let x = vec![x; d.dim()];
                let y = vec![y; d.dim()];
                let got = t.eval(&x, &y);
                let want = theta_oracle(&d, &xk, &x, &y, hbar, 12);
                assert!((got - want).norm() < 1e-10 * want.norm().max(1.0), "{got} vs {want}");
            }
        }
    }
}

#[test]
fn thetas_of_degree_two_are_independent() {
    let d = datum(&[&[1.0]], &[&[2.0]]);
    let cfg = NumericsConfig::default();
    let ts: Vec<_> = intersection_points(&d)
        .iter()
        .map(|p| theta_function(&d, &p.to_f64(), &cfg).unwrap())
        .collect();
    let (p1, p2) = (([0.1], [0.23]), ([-0.2], [0.61]));
    let m = [
        [ts[0].eval_unitary(&p1.0, &p1.1), ts[1].eval_unitary(&p1.0, &p1.1)],
        [ts[0].eval_unitary(&p2.0, &p2.1), ts[1].eval_unitary(&p2.0, &p2.1)],
    ];
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    assert!(det.norm() > 1e-6);
    assert_eq!(theta_rank(&ts, &cfg).rank, 2);
}

#[test]
fn automorphy_of_basic_theta() {
    let d = datum(&[&[1.0]], &[&[1.0]]);
    let cfg = NumericsConfig::default();
    let t = theta_function(&d, &[0.0], &cfg).unwrap();
    let r = automorphy_check(&t, &cfg).unwrap();
    assert_eq!(r.samples, 16);
    assert!(r.factors[0].frame_deviation < 1e-8, "{r:?}");
    assert!(r.factors[0].unitary_deviation < 1e-8);
    assert!((r.factors[0].modulus - PI.exp()).abs() < 1e-9);
    assert!(r.fiber_periodicity < 1e-12);
    // The zero shift is trivially the identity.
    assert_eq!(
        t.eval(&[0.2], &[0.3]) / t.eval(&[0.2], &[0.3]),
        Complex64::new(1.0, 0.0)
    );
}

#[test]
fn automorphy_in_two_dimensions() {
    let d = datum(&[&[1.0, 0.5], &[0.5, 1.0]], &[&[2.0, 1.0], &[1.0, 2.0]]);
    let cfg = NumericsConfig::default();
    for p in intersection_points(&d) {
        let t = theta_function(&d, &p.to_f64(), &cfg).unwrap();
        let r = automorphy_check(&t, &cfg).unwrap();
        assert!(r.pass);
        assert!(r.factors.iter().all(|f| f.frame_deviation < 1e-7), "{r:?}");
    }
}

#[test]
fn sign_flipped_context_breaks_holomorphicity() {
    let d = datum(&[&[1.0]], &[&[1.0]]);
    let cfg = NumericsConfig::default();
    let t = theta_function(&d, &[0.0], &cfg).unwrap();
    let flipped = WittenContext::new(1, 1.0, |x| vec![-x[0]]);
    let r = syzq_core::syz::dbar_residual(&t.section, &flipped, &cfg);
    assert!(r.residual > 1e-2);
}

#[test]
fn concentration_matches_gaussian_oracle() {
    let d = datum(&[&[1.0]], &[&[1.0]]);
    let cfg = NumericsConfig::default().with_grid(256);
    let table = concentration_profile(&d, &[0.0], &[0.25, 0.5], &[1.0, 0.5, 0.2, 0.1], &cfg).unwrap();
    assert!(table.monotone);
    // |A|² is a Gaussian of variance ħ/(4π) per lattice translate; at
    // ħ = 0.1 the translates are negligible inside the cell.
    let sigma = (0.1f64 / (4.0 * PI)).sqrt();
    let oracle = statrs::function::erf::erf(0.25 / (sigma * 2f64.sqrt()))
        / statrs::function::erf::erf(0.5 / (sigma * 2f64.sqrt()));
    let got = table.fraction(0.1, 0.25).unwrap();
    assert!((got - oracle).abs() < 1e-4, "{got} vs {oracle}");
    assert!(got > 0.99);
    // The cell half-width covers all the mass.
    assert!((table.fraction(1.0, 0.5).unwrap() - 1.0).abs() < 1e-12);
    assert!(table.fraction(0.1, 0.25).unwrap() > table.fraction(1.0, 0.25).unwrap());
}

#[test]
fn monomial_demo_degrees() {
    let cfg = NumericsConfig::default();
    for k in [-2i64, 0, 1, 3] {
        let r = semiflat::monomial_match(k, &cfg).unwrap();
        assert_eq!(r.degree, k);
        assert!(r.pass, "{r:?}");
        assert!((r.coefficient - (-PI * (k * k) as f64).exp()).abs() < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn theta_is_fiber_periodic(x in -0.5f64..0.5, y in 0.0f64..1.0, q in 1i64..4) {
        let d = validate_datum(&[vec![1.0]], &[vec![q as f64]]).unwrap();
        let cfg = NumericsConfig::default();
        let t = theta_function(&d, &[0.0], &cfg).unwrap();
        let a = t.eval(&[x], &[y]);
        let b = t.eval(&[x], &[y + 1.0]);
        prop_assert!((a - b).norm() <= 1e-12 * a.norm().max(1.0));
    }
}
