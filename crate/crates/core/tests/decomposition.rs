mod common;

use common::*;
use mgpca_core::analysis::variance_explained;
use mgpca_core::simulation::{generate, Noise, SimulationConfig};
use mgpca_core::{
    cpve, fit_component, hosvd_init, multiscale_pca, reconstruct, single_scale_pca, update_u,
    update_v, FitConfig, FitStatus, Init, KruskalDecomposition, Matrix, Projector, TensorStack,
};
use nalgebra::DMatrix;

fn planted(
    scales: Vec<usize>,
    n: usize,
    rank: usize,
    noise: Noise,
    seed: u64,
) -> mgpca_core::simulation::SyntheticDataset {
    generate(&SimulationConfig {
        scales,
        subjects: n,
        rank,
        noise,
        sd_fraction: 0.05,
        seed,
        ..SimulationConfig::default()
    })
    .unwrap()
}

fn random_projector(r: &mut rand_chacha::ChaCha8Rng, p: usize, k: usize) -> Projector {
    let basis = mgpca_core::linalg::orthonormal_basis(&random_matrix(r, p, k)).unwrap();
    Projector::complement(&basis).unwrap()
}

fn check_invariants(fit: &KruskalDecomposition) {
    let u = fit.factors();
    for h in 0..u.cols() {
        assert!((norm(&u.column(h)) - 1.0).abs() < 1e-8);
    }
    for s in fit.scales() {
        let g = s.modes.gram();
        for a in 0..g.rows() {
            for b in 0..g.cols() {
                let want = if a == b { 1.0 } else { 0.0 };
                assert!((g[(a, b)] - want).abs() < 1e-6);
            }
        }
    }
}

#[test]
fn hosvd_matches_unfolding_svd() {
    let mut r = rng(10);
    for t in 0..100 {
        let (p, n) = (5, 4);
        let x = random_stack(&mut r, "x", p, n);
        let proj = if t % 2 == 0 {
            Projector::identity(p)
        } else {
            random_projector(&mut r, p, 2)
        };
        let got = hosvd_init(&x, &proj).unwrap();
        let pm = dm(&proj.to_matrix());
        let mut unfold = DMatrix::zeros(p, p * n);
        for i in 0..n {
            let xi = DMatrix::from_row_slice(p, p, x.slice(i));
            let s = &pm * xi * &pm;
            unfold.view_mut((0, i * p), (p, p)).copy_from(&s);
        }
        let svd = unfold.svd(true, false);
        let mut best = 0;
        for k in 1..svd.singular_values.len() {
            if svd.singular_values[k] > svd.singular_values[best] {
                best = k;
            }
        }
        let lead: Vec<f64> = svd.u.unwrap().column(best).iter().copied().collect();
        assert!(sin_angle(&got, &lead) < 1e-6);
    }
}

#[test]
fn hosvd_rank_one_and_zero() {
    let mut r = rng(11);
    let v = unit(&mut r, 6);
    let u = normals(&mut r, 3);
    let x = mgpca_core::rank_one_tensor(&v, &u, 1.5);
    let got = hosvd_init(&x, &Projector::identity(6)).unwrap();
    assert!(sin_angle(&got, &v) < 1e-8);
    assert!(hosvd_init(&TensorStack::zeros("z", 6, 3), &Projector::identity(6)).is_err());
}

#[test]
fn update_u_matches_dense_eigensolver() {
    let mut r = rng(12);
    for _ in 0..100 {
        let n = 7;
        let stacks: Vec<TensorStack> = [3, 4, 5]
            .iter()
            .map(|&p| random_stack(&mut r, "x", p, n))
            .collect();
        let vs: Vec<Vec<f64>> = stacks.iter().map(|s| unit(&mut r, s.nodes())).collect();
        let ps: Vec<Projector> = stacks
            .iter()
            .map(|s| random_projector(&mut r, s.nodes(), 1))
            .collect();
        let got = update_u(&stacks, &vs, &ps).unwrap();
        let mut m = DMatrix::zeros(n, n);
        for ((x, v), p) in stacks.iter().zip(&vs).zip(&ps) {
            let g = nalgebra::DVector::from_vec(x.quadratic_forms(&p.apply(v)).unwrap());
            m += &g * g.transpose();
        }
        let (_, want) = dense_top(&m, false);
        assert!(max_abs_diff(&got, &canonical(&want)) < 1e-8);
    }
}

#[test]
fn update_u_special_cases() {
    let n = 4;
    let e = |i: usize| -> Vec<f64> { (0..n).map(|k| if k == i { 1.0 } else { 0.0 }).collect() };
    // g = X ×₁ v ×₂ v with v = e₀ picks the (0, 0) entry of every slice.
    let stack = |g: &[f64]| {
        let mut vals = vec![0.0; 4 * n];
        for i in 0..n {
            vals[i * 4] = g[i];
        }
        TensorStack::new("x", 2, n, vals).unwrap()
    };
    let g1 = [3.0, 0.0, 1.0, 0.0];
    let g2 = [0.0, 1.0, 0.0, 0.5];
    let v = vec![1.0, 0.0];
    let i2 = Projector::identity(2);
    let single = update_u(
        &[stack(&g1)],
        std::slice::from_ref(&v),
        std::slice::from_ref(&i2),
    )
    .unwrap();
    let n1 = norm(&g1);
    assert!(max_abs_diff(&single, &g1.map(|x| x / n1)) < 1e-15);
    let both = update_u(
        &[stack(&g1), stack(&g2)],
        &[v.clone(), v.clone()],
        &[i2.clone(), i2],
    )
    .unwrap();
    assert!(max_abs_diff(&both, &g1.map(|x| x / n1)) < 1e-15);
    let _ = e(0);
}

#[test]
fn update_v_matches_dense_eigensolver() {
    let mut r = rng(13);
    for _ in 0..100 {
        let (p, n) = (6, 5);
        let x = random_stack(&mut r, "x", p, n);
        let u = unit(&mut r, n);
        let proj = random_projector(&mut r, p, 2);
        let got = update_v(&x, &u, &proj).unwrap();
        let pm = dm(&proj.to_matrix());
        let a = dm_sym(&x.contract_subjects(&u).unwrap());
        let b = &pm * a * &pm;
        let (_, want) = dense_top(&b, true);
        assert!(max_abs_diff(&got, &canonical(&want)) < 1e-8);
        let back = proj.apply(&got);
        assert!(max_abs_diff(&back, &got) < 1e-8);
        assert!((norm(&got) - 1.0).abs() < 1e-12);
    }
}

#[test]
fn planted_rank_one_recovers_subject_factor() {
    let d = planted(vec![8, 12, 16], 20, 1, Noise::None, 21);
    let ps: Vec<Projector> = d
        .stacks
        .iter()
        .map(|s| Projector::identity(s.nodes()))
        .collect();
    let fit = fit_component(&d.stacks, &ps, &FitConfig::new(1), 0).unwrap();
    let truth = d.factors.column(0);
    assert!((dot(&fit.u, &truth) / norm(&truth)).abs() > 1.0 - 1e-8);
}

#[test]
fn single_scale_objective_is_squared_criterion() {
    let mut r = rng(14);
    let x = random_stack(&mut r, "x", 5, 6);
    let fit = fit_component(
        std::slice::from_ref(&x),
        &[Projector::identity(5)],
        &FitConfig::new(1),
        0,
    )
    .unwrap();
    let c = dot(&x.quadratic_forms(&fit.v[0]).unwrap(), &fit.u);
    assert!((fit.diagnostics.objective - c * c).abs() <= 1e-12 * c * c);
}

#[test]
fn objective_traces_ascend() {
    let mut r = rng(15);
    for seed in 0..20 {
        let stacks: Vec<TensorStack> = [4, 6]
            .iter()
            .map(|&p| random_stack(&mut r, &format!("s{p}"), p, 8))
            .collect();
        let fit = multiscale_pca(&stacks, &FitConfig::new(3).with_seed(seed)).unwrap();
        for d in fit.diagnostics() {
            for w in d.objective_trace.windows(2) {
                assert!(w[1] >= w[0] - 1e-10 * w[0].abs().max(1.0));
            }
        }
        check_invariants(&fit);
    }
}

#[test]
fn planted_model_is_fitted_exactly() {
    let d = planted(vec![10, 15, 20], 30, 4, Noise::None, 3);
    let fit = multiscale_pca(&d.stacks, &FitConfig::new(4)).unwrap();
    assert_eq!(fit.status(), FitStatus::Complete);
    check_invariants(&fit);
    for x in &d.stacks {
        let rec = reconstruct(&fit, x.scale_id(), 4).unwrap();
        let diff: Vec<f64> = x
            .as_slice()
            .iter()
            .zip(rec.as_slice())
            .map(|(a, b)| a - b)
            .collect();
        assert!(norm(&diff) < 1e-6 * x.frobenius_norm());
        let c = cpve(&fit, &d.stacks, 4).unwrap();
        assert!((c - 1.0).abs() < 1e-8);
    }
    assert!(variance_explained(fit.factors(), &d.factors).unwrap() > 1.0 - 1e-8);
}

#[test]
fn rank_one_weight_is_recovered() {
    let d = planted(vec![9], 12, 1, Noise::None, 5);
    let fit = single_scale_pca(&d.stacks[0], &FitConfig::new(1)).unwrap();
    let truth = d.truth[0].weights[0] * norm(&d.factors.column(0));
    let got = fit.scales()[0].weights[0];
    assert!((got.abs() - truth.abs()).abs() < 1e-8 * truth.abs());
}

#[test]
fn identical_copies_reproduce_single_scale() {
    let d = planted(vec![6], 9, 3, Noise::Normal, 16);
    let x = d.stacks[0].clone().with_scale_id("a");
    let config = FitConfig::new(3).with_seed(4);
    let single = single_scale_pca(&x, &config).unwrap();
    let copies = vec![
        x.clone(),
        x.clone().with_scale_id("b"),
        x.clone().with_scale_id("c"),
    ];
    let multi = multiscale_pca(&copies, &config).unwrap();
    assert!(max_abs_diff(single.factors().as_slice(), multi.factors().as_slice()) < 1e-6);
    for (s, m) in single.diagnostics().iter().zip(multi.diagnostics()) {
        assert!((m.objective - 3.0 * s.objective).abs() <= 1e-8 * m.objective);
    }
}

#[test]
fn subject_permutation_permutes_factors() {
    let d = planted(vec![7, 9], 12, 3, Noise::Normal, 8);
    let perm: Vec<usize> = (0..12).map(|i| (i * 5) % 12).collect();
    let permuted: Vec<TensorStack> = d
        .stacks
        .iter()
        .map(|s| s.select_subjects(&perm).unwrap())
        .collect();
    let config = FitConfig::new(3);
    let a = multiscale_pca(&d.stacks, &config).unwrap();
    let b = multiscale_pca(&permuted, &config).unwrap();
    for h in 0..3 {
        let ua = a.factors().column(h);
        let ub = b.factors().column(h);
        let ua_perm: Vec<f64> = perm.iter().map(|&i| ua[i]).collect();
        let s = if dot(&ua_perm, &ub) < 0.0 { -1.0 } else { 1.0 };
        assert!(max_abs_diff(&ua_perm.iter().map(|x| s * x).collect::<Vec<_>>(), &ub) < 1e-8);
        for (sa, sb) in a.scales().iter().zip(b.scales()) {
            assert!((sa.weights[h] - s * sb.weights[h]).abs() < 1e-8);
            assert!(sin_angle(&sa.modes.column(h), &sb.modes.column(h)) < 1e-8);
        }
    }
}

#[test]
fn fits_are_deterministic() {
    let d = planted(vec![6, 8], 10, 2, Noise::Rademacher, 9);
    let config = FitConfig::new(3).with_seed(77);
    assert_eq!(
        multiscale_pca(&d.stacks, &config).unwrap(),
        multiscale_pca(&d.stacks, &config).unwrap()
    );
}

#[test]
fn random_initializations_agree_up_to_sign() {
    let d = planted(vec![12], 20, 3, Noise::Normal, 10);
    let a = single_scale_pca(
        &d.stacks[0],
        &FitConfig::new(3).with_init(Init::Random).with_seed(1),
    )
    .unwrap();
    let b = single_scale_pca(
        &d.stacks[0],
        &FitConfig::new(3).with_init(Init::Random).with_seed(2),
    )
    .unwrap();
    assert!(max_abs_diff(a.factors().as_slice(), b.factors().as_slice()) < 1e-6);
}

#[test]
fn one_component_single_scale_matches_single_scale_fit() {
    let mut r = rng(17);
    let x = random_stack(&mut r, "x", 5, 7);
    let config = FitConfig::new(1).with_seed(3);
    assert_eq!(
        multiscale_pca(std::slice::from_ref(&x), &config).unwrap(),
        single_scale_pca(&x, &config).unwrap()
    );
}

#[test]
fn cpve_matches_explicit_projectors() {
    let mut r = rng(18);
    for t in 0..100 {
        let stacks: Vec<TensorStack> = [4, 5]
            .iter()
            .map(|&p| random_stack(&mut r, &format!("s{p}"), p, 6))
            .collect();
        let fit =
            multiscale_pca(&stacks, &FitConfig::new(3).with_seed(t).with_restarts(1)).unwrap();
        let mut previous = 0.0;
        for k in 1..=3 {
            let got = cpve(&fit, &stacks, k).unwrap();
            let pu = projector_onto(&fit.factors().leading_columns(k));
            let mut want = f64::INFINITY;
            for x in &stacks {
                let pv = projector_onto(&fit.scale(x.scale_id()).unwrap().modes.leading_columns(k));
                let mut total = 0.0;
                for l in 0..x.subjects() {
                    let mut acc = DMatrix::zeros(x.nodes(), x.nodes());
                    for i in 0..x.subjects() {
                        acc +=
                            DMatrix::from_row_slice(x.nodes(), x.nodes(), x.slice(i)) * pu[(l, i)];
                    }
                    total += (&pv * acc * &pv).norm_squared();
                }
                want = want.min(total.sqrt() / x.frobenius_norm());
            }
            assert!((got - want).abs() < 1e-10);
            assert!(got >= previous - 1e-12 && got <= 1.0 + 1e-12);
            previous = got;
        }
        assert!(cpve(&fit, &stacks, 0).is_err());
        assert!(cpve(&fit, &stacks, 4).is_err());
    }
}

fn projector_onto(a: &Matrix) -> DMatrix<f64> {
    let a = dm(a);
    let g = (a.transpose() * &a).try_inverse().unwrap();
    &a * g * a.transpose()
}

#[test]
fn reconstruction_residual_shrinks_with_k() {
    let mut r = rng(19);
    let x = random_stack(&mut r, "x", 6, 8);
    let fit = single_scale_pca(&x, &FitConfig::new(5)).unwrap();
    let mut previous = f64::INFINITY;
    for k in 0..=5 {
        let rec = reconstruct(&fit, "x", k).unwrap();
        let diff: Vec<f64> = x
            .as_slice()
            .iter()
            .zip(rec.as_slice())
            .map(|(a, b)| a - b)
            .collect();
        let res = norm(&diff);
        assert!(res <= previous + 1e-10);
        previous = res;
    }
    assert!(reconstruct(&fit, "x", 6).is_err());
}

#[test]
fn parcellation_sized_problem_runs() {
    let d = planted(vec![68, 136, 204], 100, 3, Noise::Normal, 1);
    let fit = multiscale_pca(&d.stacks, &FitConfig::new(3).with_restarts(2)).unwrap();
    assert_eq!(fit.components(), 3);
    check_invariants(&fit);
}

#[test]
fn stored_parts_are_validated() {
    let d = planted(vec![6], 8, 2, Noise::None, 2);
    let fit = single_scale_pca(&d.stacks[0], &FitConfig::new(2)).unwrap();
    let again = KruskalDecomposition::from_parts(
        fit.scales().to_vec(),
        fit.factors().clone(),
        fit.diagnostics().to_vec(),
        fit.status(),
    )
    .unwrap();
    assert_eq!(again, fit);
    let mut bad = fit.scales().to_vec();
    let col = bad[0].modes.column(0);
    bad[0].modes.set_column(1, &col);
    assert!(
        KruskalDecomposition::from_parts(bad, fit.factors().clone(), vec![], fit.status()).is_err()
    );
}
