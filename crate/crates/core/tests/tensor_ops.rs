mod common;

use common::*;
use mgpca_core::{
    eig_dominant, eig_max, frobenius_norm, inner_product, rank_one_tensor, Matrix, SymmetricMatrix,
    TensorStack,
};
use proptest::prelude::*;

fn triple_loop_inner(a: &TensorStack, b: &TensorStack) -> f64 {
    let mut s = 0.0;
    for i in 0..a.subjects() {
        for x in 0..a.nodes() {
            for y in 0..a.nodes() {
                s += a.get(x, y, i) * b.get(x, y, i);
            }
        }
    }
    s
}

#[test]
fn inner_product_and_norm_match_triple_loop() {
    let mut r = rng(1);
    for _ in 0..100 {
        let a = random_stack(&mut r, "a", 3, 4);
        let b = random_stack(&mut r, "b", 3, 4);
        let got = inner_product(&a, &b).unwrap();
        let want = triple_loop_inner(&a, &b);
        assert!((got - want).abs() <= 1e-12 * want.abs().max(1.0));
        let c = random_stack(&mut r, "c", 4, 5);
        let n = frobenius_norm(&c);
        assert!((n - triple_loop_inner(&c, &c).sqrt()).abs() <= 1e-12 * n);
    }
}

#[test]
fn vector_contractions_match_triple_loop() {
    let mut r = rng(2);
    for _ in 0..100 {
        let x = random_stack(&mut r, "x", 3, 4);
        let v = normals(&mut r, 3);
        let w = normals(&mut r, 4);
        for mode in 1..=2 {
            let got = x.mode_n_multiply_vector(&v, mode).unwrap();
            for b in 0..3 {
                for i in 0..4 {
                    let want: f64 = (0..3)
                        .map(|a| {
                            if mode == 1 {
                                x.get(a, b, i) * v[a]
                            } else {
                                x.get(b, a, i) * v[a]
                            }
                        })
                        .sum();
                    assert!((got[(b, i)] - want).abs() < 1e-12);
                }
            }
        }
        let got = x.mode_n_multiply_vector(&w, 3).unwrap();
        for a in 0..3 {
            for b in 0..3 {
                let want: f64 = (0..4).map(|i| x.get(a, b, i) * w[i]).sum();
                assert!((got[(a, b)] - want).abs() < 1e-12);
            }
        }
        let m3 = x.contract_subjects(&w).unwrap();
        assert_eq!(m3.as_slice(), got.as_slice());
    }
}

#[test]
fn matrix_contractions_match_triple_loop() {
    let mut r = rng(3);
    for _ in 0..100 {
        let x = random_stack(&mut r, "x", 3, 4);
        let dims = [3, 3, 4];
        for mode in 1..=3 {
            let j = 2;
            let m = random_matrix(&mut r, j, dims[mode - 1]);
            let got = x.mode_n_multiply_matrix(&m, mode).unwrap();
            let mut out_dims = dims;
            out_dims[mode - 1] = j;
            assert_eq!(got.dims(), out_dims);
            for i1 in 0..out_dims[0] {
                for i2 in 0..out_dims[1] {
                    for i3 in 0..out_dims[2] {
                        let idx = [i1, i2, i3];
                        let want: f64 = (0..dims[mode - 1])
                            .map(|t| {
                                let mut s = idx;
                                s[mode - 1] = t;
                                x.get(s[0], s[1], s[2]) * m[(idx[mode - 1], t)]
                            })
                            .sum();
                        assert!((got.get(i1, i2, i3) - want).abs() < 1e-12);
                    }
                }
            }
        }
    }
}

#[test]
fn rank_one_norm_identity() {
    let mut r = rng(4);
    for _ in 0..100 {
        let v = normals(&mut r, 5);
        let u = normals(&mut r, 4);
        let d = normals(&mut r, 1)[0];
        let t = rank_one_tensor(&v, &u, d);
        let want = d.abs() * dot(&v, &v) * norm(&u);
        assert!((frobenius_norm(&t) - want).abs() <= 1e-12 * want.max(1.0));
    }
}

#[test]
fn eig_max_matches_full_decomposition() {
    let mut r = rng(5);
    for _ in 0..200 {
        let m = random_symmetric(&mut r, 6);
        let got = eig_max(&m).unwrap();
        let (value, vector) = dense_top(&dm_sym(&m), false);
        assert!((got.value - value).abs() < 1e-10 * value.abs().max(1.0));
        assert!(max_abs_diff(&got.vector, &canonical(&vector)) < 1e-8);
        assert_eq!(got.vector, canonical(&got.vector));
        let dom = eig_dominant(&m).unwrap();
        let (dv, dvec) = dense_top(&dm_sym(&m), true);
        assert!((dom.value - dv).abs() < 1e-10 * dv.abs().max(1.0));
        assert!(max_abs_diff(&dom.vector, &canonical(&dvec)) < 1e-8);
    }
}

#[test]
fn eig_max_on_graded_and_clustered_spectra() {
    let mut r = rng(6);
    for n in [2, 3, 10, 40, 75] {
        for _ in 0..5 {
            let q = dm(&random_matrix(&mut r, n, n)).qr().q();
            let spectrum: Vec<f64> = (0..n)
                .map(|i| {
                    let sign = if i % 3 == 0 { -1.0 } else { 1.0 };
                    sign * 10f64.powi(-(i as i32 % 8)) * (1.0 + i as f64 / n as f64)
                })
                .collect();
            let a = &q
                * nalgebra::DMatrix::from_diagonal(&nalgebra::DVector::from_vec(spectrum))
                * q.transpose();
            let a = Matrix::from_row_major(n, n, a.transpose().as_slice().to_vec()).unwrap();
            let m = SymmetricMatrix::symmetrize(&a).unwrap();
            let got = eig_max(&m).unwrap();
            let (value, vector) = dense_top(&dm_sym(&m), false);
            assert!((got.value - value).abs() < 1e-10 * value.abs().max(1.0));
            let sa = sin_angle(&got.vector, &vector);
            assert!(sa < 1e-8, "n={n} sin={sa} value={} want={value}", got.value);
        }
    }
}

#[test]
fn non_finite_matrix_is_rejected() {
    assert!(SymmetricMatrix::new(1, vec![f64::NAN]).is_err());
}

fn stack_strategy(p: usize, n: usize) -> impl Strategy<Value = TensorStack> {
    proptest::collection::vec(-3.0..3.0f64, p * p * n)
        .prop_map(move |v| TensorStack::symmetrized("x", p, n, v).unwrap())
}

proptest! {
    #[test]
    fn inner_product_is_symmetric_and_bilinear(
        a in stack_strategy(3, 2), b in stack_strategy(3, 2), c in stack_strategy(3, 2), s in -2.0..2.0f64
    ) {
        let ab = inner_product(&a, &b).unwrap();
        prop_assert!((ab - inner_product(&b, &a).unwrap()).abs() < 1e-10);
        let sum: Vec<f64> = a.as_slice().iter().zip(c.as_slice()).map(|(x, y)| s * x + y).collect();
        let sum = TensorStack::new("x", 3, 2, sum).unwrap();
        let lhs = inner_product(&sum, &b).unwrap();
        let rhs = s * ab + inner_product(&c, &b).unwrap();
        prop_assert!((lhs - rhs).abs() < 1e-10 * (1.0 + lhs.abs()));
    }

    #[test]
    fn frobenius_triangle_inequality(a in stack_strategy(3, 3), b in stack_strategy(3, 3)) {
        let sum: Vec<f64> = a.as_slice().iter().zip(b.as_slice()).map(|(x, y)| x + y).collect();
        let sum = TensorStack::new("x", 3, 3, sum).unwrap();
        prop_assert!(frobenius_norm(&sum) <= frobenius_norm(&a) + frobenius_norm(&b) + 1e-10);
    }

    #[test]
    fn identity_product_and_mode_order(x in stack_strategy(4, 3), v in proptest::collection::vec(-1.0..1.0f64, 4)) {
        for mode in 1..=3 {
            let size = if mode == 3 { 3 } else { 4 };
            prop_assert_eq!(x.mode_n_multiply_matrix(&Matrix::identity(size), mode).unwrap(), x.to_tensor3());
        }
        let first = x.mode_n_multiply_vector(&v, 1).unwrap();
        let second = x.mode_n_multiply_vector(&v, 2).unwrap();
        let a = first.tr_matvec(&v).unwrap();
        let b = second.tr_matvec(&v).unwrap();
        let q = x.quadratic_forms(&v).unwrap();
        for i in 0..3 {
            prop_assert!((a[i] - b[i]).abs() < 1e-12);
            prop_assert!((a[i] - q[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn rank_one_contracts_back_to_weight(
        v in proptest::collection::vec(-1.0..1.0f64, 5),
        u in proptest::collection::vec(-1.0..1.0f64, 4),
        d in -5.0..5.0f64
    ) {
        prop_assume!(norm(&v) > 1e-3 && norm(&u) > 1e-3);
        let v: Vec<f64> = v.iter().map(|x| x / norm(&v)).collect();
        let u: Vec<f64> = u.iter().map(|x| x / norm(&u)).collect();
        let t = rank_one_tensor(&v, &u, d);
        let got = dot(&t.quadratic_forms(&v).unwrap(), &u);
        prop_assert!((got - d).abs() < 1e-10);
    }

    #[test]
    fn eig_max_residual_and_rayleigh_bound(
        vals in proptest::collection::vec(-5.0..5.0f64, 25),
        probe in proptest::collection::vec(-1.0..1.0f64, 5)
    ) {
        let m = SymmetricMatrix::symmetrize(&Matrix::from_row_major(5, 5, vals).unwrap()).unwrap();
        let e = eig_max(&m).unwrap();
        let mv = m.to_matrix().matvec(&e.vector).unwrap();
        let res: Vec<f64> = mv.iter().zip(&e.vector).map(|(a, b)| a - e.value * b).collect();
        prop_assert!(norm(&res) <= 1e-8 * e.value.abs().max(1.0));
        prop_assert!((norm(&e.vector) - 1.0).abs() < 1e-12);
        prop_assume!(norm(&probe) > 1e-3);
        let w: Vec<f64> = probe.iter().map(|x| x / norm(&probe)).collect();
        prop_assert!(e.value >= m.quadratic_form(&w) - 1e-10);
    }
}
