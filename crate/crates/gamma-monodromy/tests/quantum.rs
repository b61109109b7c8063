mod common;

use common::{eval, proj_oracle, shift, twisted_oracle};
use gamma_monodromy::cohomology::SpaceModel;
use gamma_monodromy::quantum::{
    blowup_calibration, discriminant_proj, discriminant_twisted, quantum_mult_proj, quantum_mult_twisted,
    s_from_inverse, s_inverse_blowup_unit, s_inverse_proj, s_inverse_twisted, SSeries,
};
use gamma_monodromy::numerics::{identity, inverse, max_abs, CMatrix, CVector};
use num_complex::Complex64 as Cx;
use proptest::prelude::*;

fn c(re: f64, im: f64) -> Cx {
    Cx::new(re, im)
}

#[test]
fn projective_series_matches_resolvent_sum() {
    for m in 1..=5usize {
        for q in [c(1.0, 0.0), c(0.3, -0.8), c(-2.0, 0.5)] {
            let z = c(7.0, 2.0);
            let s = s_inverse_proj(m, q, 40);
            let d = max_abs(&(eval(&s, z) - proj_oracle(m, q, z, 12)));
            assert!(d < 1e-13, "m={m} q={q}: {d:e}");
        }
    }
}

#[test]
fn twisted_series_matches_resolvent_sum() {
    for n in 3..=6usize {
        for big_q in [c(1.0, 0.0), c(1.3, 0.4), c(0.8, -0.9)] {
            let z = c(5.0, -3.0);
            let s = s_inverse_twisted(n, big_q, 40);
            let d = max_abs(&(eval(&s, z) - twisted_oracle(n, big_q, z, 20)));
            assert!(d < 1e-12, "n={n} Q={big_q}: {d:e}");
        }
    }
}

#[test]
fn twisted_series_is_the_projective_one_at_the_reflected_parameter() {
    for n in 3..=6usize {
        for big_q in [c(1.0, 0.0), c(1.3, 0.4), c(0.6, -1.1)] {
            let q = -big_q.powi(-((n - 1) as i32));
            let tw = s_inverse_twisted(n, big_q, 14);
            let pr = s_inverse_proj(n - 2, q, 14);
            for k in 0..=14 {
                let conj = CMatrix::from_fn(n - 1, n - 1, |i, j| {
                    let s = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
                    pr.coeffs[k][(i, j)] * s
                });
                assert!(max_abs(&(&tw.coeffs[k] - conj)) < 1e-12 * (1.0 + max_abs(&tw.coeffs[k])), "n={n} k={k}");
            }
        }
    }
}

#[test]
fn symplectic_condition_at_a_point() {
    // S(-z)^dagger S(z) = 1 with the adjoint taken for the pairing.
    let check = |space: &SpaceModel, sinv: &SSeries| {
        let g = space.pairing.map(|x| c(x, 0.0));
        let gi = inverse(&g).unwrap();
        let z = c(9.0, 4.0);
        let a = eval(sinv, z);
        let b = eval(sinv, -z);
        let lhs = &gi * b.transpose() * &g * &a;
        max_abs(&(lhs - identity(space.rank())))
    };
    for m in 1..=5 {
        let d = check(&SpaceModel::proj(m), &s_inverse_proj(m, c(0.9, 0.3), 60));
        assert!(d < 1e-12, "P^{m}: {d:e}");
    }
    for n in 3..=6 {
        let d = check(&SpaceModel::twisted_e(n).unwrap(), &s_inverse_twisted(n, c(1.1, -0.2), 60));
        assert!(d < 1e-12, "twisted {n}: {d:e}");
    }
}

#[test]
fn inverse_from_adjoint_is_an_inverse() {
    for n in 3..=6usize {
        let space = SpaceModel::twisted_e(n).unwrap();
        let sinv = s_inverse_twisted(n, c(1.4, 0.3), 16);
        let s = s_from_inverse(&sinv, &space);
        assert!(s.product_defect(&sinv) < 1e-12);
        assert!(sinv.product_defect(&s) < 1e-12);
    }
}

fn twisted_s(n: usize, big_q: Cx, order: usize) -> SSeries {
    s_from_inverse(&s_inverse_twisted(n, big_q, order), &SpaceModel::twisted_e(n).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn divisor_relation_by_finite_differences(n in 3usize..=6, re in 0.6f64..2.0, im in -1.0f64..1.0) {
        // Q dS_l/dQ = (n-1) e S_{l-1} + S_{l-1} rho
        let big_q = c(re, im);
        let order = 8;
        let h = 1e-3;
        let at = |t: f64| twisted_s(n, big_q * (1.0 + t), order);
        let (p1, m1, p2, m2) = (at(h), at(-h), at(2.0 * h), at(-2.0 * h));
        let s = twisted_s(n, big_q, order);
        let r = n - 1;
        let mut e = shift(r);
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        e[(0, r - 1)] += big_q.powi(-(r as i32)) * sign;
        let space = SpaceModel::twisted_e(n).unwrap();
        for l in 1..=order {
            // Richardson-extrapolated central difference in log Q
            let qd = ((&p1.coeffs[l] - &m1.coeffs[l]) * c(8.0, 0.0) - (&p2.coeffs[l] - &m2.coeffs[l])) / c(12.0 * h, 0.0);
            let rhs = &e * &s.coeffs[l - 1] * c(r as f64, 0.0) + &s.coeffs[l - 1] * &space.rho;
            let scale = 1.0 + max_abs(&rhs);
            prop_assert!(max_abs(&(qd - &rhs)) < 1e-7 * scale, "n={} l={}", n, l);
        }
    }

    #[test]
    fn projective_symplectic_defect_is_small(m in 1usize..=6, re in -2.0f64..2.0, im in -2.0f64..2.0) {
        let space = SpaceModel::proj(m);
        let s = s_from_inverse(&s_inverse_proj(m, c(re, im), 14), &space);
        prop_assert!(gamma_monodromy::quantum::symplectic_defect(&s, &space) < 1e-9 * (1.0 + c(re, im).norm()).powi(14));
    }
}

#[test]
fn quantum_products_satisfy_their_relations() {
    for m in 1..=6usize {
        let q = c(0.7, -0.4);
        let p = quantum_mult_proj(m, q).unwrap().generator;
        let mut pw = identity(m + 1);
        for _ in 0..=m {
            pw = &pw * &p;
        }
        assert!(max_abs(&(pw - identity(m + 1) * q)) < 1e-14);
        // the spectrum is the discriminant divided by n
        let disc = discriminant_proj(m + 2 - 1 + 1, q.ln());
        assert_eq!(disc.len(), m + 1);
        for u in disc {
            let lam = u / (m + 1) as f64;
            let det = (&p - identity(m + 1) * lam).determinant();
            assert!(det.norm() < 1e-12, "m={m}");
        }
    }
    for n in 3..=6usize {
        let big_q = c(1.2, 0.5);
        let qp = quantum_mult_twisted(n, big_q).unwrap();
        for u in discriminant_twisted(n, big_q) {
            let det = (&qp.euler - identity(n - 1) * u).determinant();
            assert!(det.norm() < 1e-10, "n={n}");
        }
    }
}

#[test]
fn blowup_unit_column_along_the_exceptional_line() {
    // J restricted to q2 = 0: sum_d q1^d prod_{m<=d} (h - e - mz)^{-n} prod_{m=1-d}^{0} (e - mz)
    for n in 3..=5usize {
        let space = SpaceModel::bl_proj(n).unwrap();
        let h = space.cup_matrix(&space.basis_vector(1));
        let e = space.cup_matrix(&space.basis_vector(n + 1));
        let one = identity(space.rank());
        let q1 = c(0.4, 0.3);
        let z = c(6.0, 1.0);
        let order = 30;
        let mut oracle = CVector::zeros(space.rank());
        for d in 0..=12usize {
            let mut op = identity(space.rank());
            for m in 1..=d {
                let r = inverse(&(&h - &e - &one * (z * m as f64))).unwrap();
                for _ in 0..n {
                    op = &op * &r;
                }
            }
            for m in 0..d {
                op = &op * (&e + &one * (z * m as f64));
            }
            oracle += op.column(0) * q1.powi(d as i32);
        }
        let series = s_inverse_blowup_unit(n, q1, order).unwrap();
        let value = series.iter().enumerate().fold(CVector::zeros(space.rank()), |acc, (k, v)| acc + v * z.powi(-(k as i32)));
        assert!((&value - &oracle).camax() < 1e-13, "n={n}: {:e}", (&value - &oracle).camax());

        let dmax = 12 / (n - 1) + 1;
        let cal = blowup_calibration(n, dmax, 12).unwrap();
        let coarse = s_inverse_blowup_unit(n, q1, 12).unwrap();
        for (j, v) in coarse.iter().enumerate() {
            let sum = (0..=dmax).fold(CVector::zeros(space.rank()), |acc, d| {
                acc + cal.coefficient(0, d, 0, j).map(|x| c(x, 0.0)) * q1.powi(d as i32)
            });
            assert!((v - sum).camax() < 1e-13, "n={n} j={j}");
        }
    }
}

#[test]
fn blowup_columns_are_consistent_with_the_pairing() {
    // S(-z)^dagger S(z) = 1 coefficientwise in (q1, q2, 1/z), up to the truncation order
    let n = 3;
    let cal = blowup_calibration(n, 2, 8).unwrap();
    assert!(cal.positive_power_residual < 1e-10);
    let g = cal.space.pairing.clone();
    let r = cal.rank();
    for d1 in 0..=2usize {
        for d2 in 0..=2usize {
            for total in 1..=8usize {
                let mut acc = nalgebra::DMatrix::<f64>::zeros(r, r);
                for a1 in 0..=d1 {
                    for a2 in 0..=d2 {
                        for k in 0..=total {
                            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                            let left = nalgebra::DMatrix::from_fn(r, r, |i, j| cal.coefficient(j, a1, a2, k)[i]);
                            let right =
                                nalgebra::DMatrix::from_fn(r, r, |i, j| cal.coefficient(j, d1 - a1, d2 - a2, total - k)[i]);
                            acc += left.transpose() * &g * right * sign;
                        }
                    }
                }
                assert!(acc.amax() < 1e-9, "d=({d1},{d2}) order {total}: {:e}", acc.amax());
            }
        }
    }
}
