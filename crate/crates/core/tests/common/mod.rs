#![allow(dead_code)]

use mgpca_core::{Matrix, SymmetricMatrix, TensorStack};
use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn normals(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| StandardNormal.sample(rng)).collect()
}

pub fn unit(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let mut v = normals(rng, n);
    let s = norm(&v);
    v.iter_mut().for_each(|x| *x /= s);
    v
}

pub fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn random_stack(rng: &mut ChaCha8Rng, id: &str, p: usize, n: usize) -> TensorStack {
    TensorStack::symmetrized(id, p, n, normals(rng, p * p * n)).unwrap()
}

pub fn random_symmetric(rng: &mut ChaCha8Rng, n: usize) -> SymmetricMatrix {
    let m = Matrix::from_row_major(n, n, normals(rng, n * n)).unwrap();
    SymmetricMatrix::symmetrize(&m).unwrap()
}

pub fn random_matrix(rng: &mut ChaCha8Rng, r: usize, c: usize) -> Matrix {
    Matrix::from_row_major(r, c, normals(rng, r * c)).unwrap()
}

pub fn dm(m: &Matrix) -> DMatrix<f64> {
    DMatrix::from_row_slice(m.rows(), m.cols(), m.as_slice())
}

pub fn dm_sym(m: &SymmetricMatrix) -> DMatrix<f64> {
    DMatrix::from_row_slice(m.dim(), m.dim(), m.as_slice())
}

/// Largest-magnitude entry made nonnegative, lowest index on ties.
pub fn canonical(v: &[f64]) -> Vec<f64> {
    let mut best = 0;
    for i in 0..v.len() {
        if v[i].abs() > v[best].abs() {
            best = i;
        }
    }
    if v[best] < 0.0 {
        v.iter().map(|x| -x).collect()
    } else {
        v.to_vec()
    }
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// Distance between the unit directions of two nonzero vectors, ignoring sign.
///
/// Equals `2 sin(θ/2)`, which matches the sine of the angle for small angles.
pub fn sin_angle(a: &[f64], b: &[f64]) -> f64 {
    let (na, nb) = (norm(a), norm(b));
    let s = if dot(a, b) < 0.0 { -1.0 } else { 1.0 };
    a.iter()
        .zip(b)
        .map(|(x, y)| (x / na - s * y / nb).powi(2))
        .sum::<f64>()
        .sqrt()
}

/// Eigenpair of the top (or dominant, when `dominant`) eigenvalue by full decomposition.
pub fn dense_top(m: &DMatrix<f64>, dominant: bool) -> (f64, Vec<f64>) {
    let eig = m.clone().symmetric_eigen();
    let key = |l: f64| if dominant { l.abs() } else { l };
    let mut best = 0;
    for i in 1..eig.eigenvalues.len() {
        if key(eig.eigenvalues[i]) > key(eig.eigenvalues[best]) {
            best = i;
        }
    }
    (
        eig.eigenvalues[best],
        eig.eigenvectors.column(best).iter().copied().collect(),
    )
}
