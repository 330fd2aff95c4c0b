//! Extremal eigenpairs of dense symmetric matrices.
//!
//! The matrix is reduced to tridiagonal form with Householder reflections, the
//! tridiagonal spectrum is found by implicit QL, and the requested eigenvector is
//! recovered by inverse iteration on the unreduced tridiagonal block that owns
//! the eigenvalue, then mapped back through the reflections.
//!
//! Output is deterministic: the entry of largest magnitude is made nonnegative
//! (lowest index on ties), and a repeated extremal eigenvalue resolves to the
//! block with the lowest starting index, so the identity yields `e₁`.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::math;
use crate::tensor::SymmetricMatrix;

#[derive(Debug, Clone, PartialEq)]
pub struct EigenPair {
    pub value: f64,
    pub vector: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Target {
    /// Algebraically largest eigenvalue.
    Largest,
    /// Eigenvalue of largest magnitude; the positive one wins an exact tie.
    Dominant,
}

/// Eigenpair with the algebraically largest eigenvalue.
pub fn eig_max(m: &SymmetricMatrix) -> Result<EigenPair> {
    extremal_eigenpair(m.as_slice(), m.dim(), Target::Largest)
}

/// Eigenpair whose eigenvalue has the largest magnitude.
///
/// This is the maximizer of `(vᵀ m v)²` over unit `v`.
pub fn eig_dominant(m: &SymmetricMatrix) -> Result<EigenPair> {
    extremal_eigenpair(m.as_slice(), m.dim(), Target::Dominant)
}

/// Eigenpair of the symmetric `n×n` row-major matrix `a` (only the lower
/// triangle is trusted to be symmetric with the upper one).
pub(crate) fn extremal_eigenpair(a: &[f64], n: usize, target: Target) -> Result<EigenPair> {
    if a.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite);
    }
    if n == 0 {
        return Err(Error::InvalidArgument("empty matrix".into()));
    }
    if n == 1 {
        return Ok(EigenPair {
            value: a[0],
            vector: vec![1.0],
        });
    }
    let tri = Tridiagonal::reduce(a, n);
    let blocks = tri.blocks();

    let mut block_eigs: Vec<Vec<f64>> = Vec::with_capacity(blocks.len());
    for &(start, end) in &blocks {
        let mut d = tri.diag[start..end].to_vec();
        let e = &tri.off[start..end - 1];
        symmetric_tridiagonal_eigenvalues(&mut d, e)?;
        block_eigs.push(d);
    }
    let all = block_eigs.iter().flatten();
    let hi = all.clone().fold(f64::NEG_INFINITY, |m, &x| m.max(x));
    let lo = all.fold(f64::INFINITY, |m, &x| m.min(x));
    let wanted = match target {
        Target::Largest => hi,
        Target::Dominant if -lo > hi => lo,
        Target::Dominant => hi,
    };
    let scale = hi.abs().max(lo.abs());
    let tol = 16.0 * f64::EPSILON * scale;

    let (block, value) = blocks
        .iter()
        .zip(&block_eigs)
        .find_map(|(&blk, eigs)| {
            eigs.iter()
                .copied()
                .filter(|x| (x - wanted).abs() <= tol)
                .min_by(|x, y| (x - wanted).abs().total_cmp(&(y - wanted).abs()))
                .map(|x| (blk, x))
        })
        .ok_or(Error::NoConvergence)?;

    let (start, end) = block;
    let local = inverse_iteration(&tri.diag[start..end], &tri.off[start..end - 1], value)?;
    let mut y = vec![0.0; n];
    y[start..end].copy_from_slice(&local);
    tri.apply_q(&mut y);
    math::normalize(&mut y).ok_or(Error::NoConvergence)?;
    math::canonical_sign(&mut y);

    // Rayleigh quotient of the final vector.
    let mut rq = 0.0;
    for i in 0..n {
        let row = &a[i * n..(i + 1) * n];
        rq += y[i] * math::dot(row, &y);
    }
    Ok(EigenPair {
        value: rq,
        vector: y,
    })
}

struct Tridiagonal {
    n: usize,
    diag: Vec<f64>,
    off: Vec<f64>,
    /// `(first row, unit Householder vector)`; each reflector is `I − 2wwᵀ`.
    reflectors: Vec<(usize, Vec<f64>)>,
}

impl Tridiagonal {
    fn reduce(a: &[f64], n: usize) -> Self {
        let mut work = a.to_vec();
        let mut off = vec![0.0; n - 1];
        let mut reflectors = Vec::new();
        let mut p = vec![0.0; n];
        for k in 0..n.saturating_sub(2) {
            let s = k + 1;
            let m = n - s;
            let x0 = work[s * n + k];
            let tail: f64 = (s + 1..n).map(|i| work[i * n + k] * work[i * n + k]).sum();
            if tail == 0.0 {
                off[k] = x0;
                continue;
            }
            let norm_x = math::sqrt(x0 * x0 + tail);
            let alpha = if x0 >= 0.0 { -norm_x } else { norm_x };
            let mut w: Vec<f64> = (s..n).map(|i| work[i * n + k]).collect();
            w[0] -= alpha;
            let wn = math::norm(&w);
            for x in w.iter_mut() {
                *x /= wn;
            }
            // A22 ← H A22 H with H = I − 2wwᵀ, as a symmetric rank-2 update.
            for i in 0..m {
                let row = &work[(s + i) * n + s..(s + i) * n + n];
                p[i] = 2.0 * math::dot(row, &w);
            }
            let kc = math::dot(&w, &p[..m]);
            for i in 0..m {
                p[i] -= kc * w[i];
            }
            for i in 0..m {
                let (wi, pi) = (w[i], p[i]);
                let row = &mut work[(s + i) * n + s..(s + i) * n + n];
                for j in 0..m {
                    row[j] -= wi * p[j] + pi * w[j];
                }
            }
            off[k] = alpha;
            reflectors.push((s, w));
        }
        off[n - 2] = work[(n - 1) * n + (n - 2)];
        let diag = (0..n).map(|i| work[i * n + i]).collect();
        Self {
            n,
            diag,
            off,
            reflectors,
        }
    }

    /// Maximal unreduced blocks as half-open index ranges.
    fn blocks(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        let mut start = 0;
        for k in 0..self.n - 1 {
            let scale = self.diag[k].abs() + self.diag[k + 1].abs();
            if self.off[k].abs() <= f64::EPSILON * scale || self.off[k] == 0.0 {
                out.push((start, k + 1));
                start = k + 1;
            }
        }
        out.push((start, self.n));
        out
    }

    /// `y ← Q y` where `A = Q T Qᵀ`.
    fn apply_q(&self, y: &mut [f64]) {
        for (s, w) in self.reflectors.iter().rev() {
            let t = 2.0 * math::dot(&y[*s..], w);
            if t != 0.0 {
                for (yi, wi) in y[*s..].iter_mut().zip(w) {
                    *yi -= t * wi;
                }
            }
        }
    }
}

/// Eigenvalues of the symmetric tridiagonal matrix with diagonal `d` and
/// off-diagonal `e` by the implicit QL method; `d` is overwritten.
fn symmetric_tridiagonal_eigenvalues(d: &mut [f64], off: &[f64]) -> Result<()> {
    let n = d.len();
    if n < 2 {
        return Ok(());
    }
    let mut e = vec![0.0; n];
    e[..n - 1].copy_from_slice(off);
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m < n - 1 {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 100 {
                return Err(Error::NoConvergence);
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = math::hypot(g, 1.0);
            g = d[m] - d[l] + e[l] / (g + if g >= 0.0 { r } else { -r });
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut i = m;
            let mut underflow = false;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = math::hypot(f, g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

/// Eigenvector of an unreduced symmetric tridiagonal block for the eigenvalue
/// `value`, by inverse iteration with a partially pivoted LU solve.
fn inverse_iteration(diag: &[f64], off: &[f64], value: f64) -> Result<Vec<f64>> {
    let m = diag.len();
    if m == 1 {
        return Ok(vec![1.0]);
    }
    let norm_t = diag
        .iter()
        .chain(off)
        .fold(0.0_f64, |acc, x| acc.max(x.abs()))
        .max(f64::MIN_POSITIVE);
    let lu = ShiftedTridiagonalLu::new(diag, off, value, f64::EPSILON * norm_t);

    // Fixed, irregular start vectors; a second one covers the rare case where
    // the first is (numerically) orthogonal to the target.
    let starts: [fn(usize) -> f64; 2] = [
        |i| {
            let t = i as f64 * 0.618_033_988_749_895;
            1.0 + t - math::floor(t)
        },
        |i| (if i % 2 == 0 { 1.0 } else { -0.5 }) + 0.01 * i as f64,
    ];
    let mut best: Option<(f64, Vec<f64>)> = None;
    for start in starts {
        let mut x: Vec<f64> = (0..m).map(start).collect();
        math::normalize(&mut x);
        for _ in 0..4 {
            lu.solve(&mut x);
            if math::normalize(&mut x).is_none() {
                break;
            }
        }
        if x.iter().any(|v| !v.is_finite()) {
            continue;
        }
        let residual = tridiagonal_residual(diag, off, value, &x);
        if residual <= 1e3 * f64::EPSILON * norm_t * (m as f64) {
            return Ok(x);
        }
        if best.as_ref().is_none_or(|(r, _)| residual < *r) {
            best = Some((residual, x));
        }
    }
    best.map(|(_, x)| x).ok_or(Error::NoConvergence)
}

fn tridiagonal_residual(diag: &[f64], off: &[f64], value: f64, x: &[f64]) -> f64 {
    let m = diag.len();
    let mut acc = 0.0;
    for i in 0..m {
        let mut r = (diag[i] - value) * x[i];
        if i > 0 {
            r += off[i - 1] * x[i - 1];
        }
        if i + 1 < m {
            r += off[i] * x[i + 1];
        }
        acc += r * r;
    }
    math::sqrt(acc)
}

/// LU factorization with partial pivoting of `T − σI` for tridiagonal `T`.
struct ShiftedTridiagonalLu {
    d: Vec<f64>,
    du: Vec<f64>,
    du2: Vec<f64>,
    l: Vec<f64>,
    swapped: Vec<bool>,
}

impl ShiftedTridiagonalLu {
    fn new(diag: &[f64], off: &[f64], shift: f64, pivot_floor: f64) -> Self {
        let m = diag.len();
        let mut d: Vec<f64> = diag.iter().map(|x| x - shift).collect();
        let mut du = off.to_vec();
        let dl = off;
        let mut du2 = vec![0.0; m.saturating_sub(2)];
        let mut l = vec![0.0; m - 1];
        let mut swapped = vec![false; m - 1];
        for k in 0..m - 1 {
            if d[k].abs() >= dl[k].abs() {
                if d[k] == 0.0 {
                    d[k] = pivot_floor;
                }
                let f = dl[k] / d[k];
                l[k] = f;
                d[k + 1] -= f * du[k];
            } else {
                let f = d[k] / dl[k];
                d[k] = dl[k];
                l[k] = f;
                let tmp = du[k];
                du[k] = d[k + 1];
                d[k + 1] = tmp - f * d[k + 1];
                if k + 2 < m {
                    du2[k] = du[k + 1];
                    du[k + 1] *= -f;
                }
                swapped[k] = true;
            }
        }
        if d[m - 1] == 0.0 {
            d[m - 1] = pivot_floor;
        }
        Self {
            d,
            du,
            du2,
            l,
            swapped,
        }
    }

    fn solve(&self, b: &mut [f64]) {
        let m = self.d.len();
        for k in 0..m - 1 {
            if self.swapped[k] {
                let t = b[k];
                b[k] = b[k + 1];
                b[k + 1] = t - self.l[k] * b[k];
            } else {
                b[k + 1] -= self.l[k] * b[k];
            }
        }
        b[m - 1] /= self.d[m - 1];
        if m > 1 {
            b[m - 2] = (b[m - 2] - self.du[m - 2] * b[m - 1]) / self.d[m - 2];
        }
        for k in (0..m.saturating_sub(2)).rev() {
            b[k] = (b[k] - self.du[k] * b[k + 1] - self.du2[k] * b[k + 2]) / self.d[k];
        }
    }
}

/// Eigenpair of a row-major symmetric matrix held in a [`Matrix`].
pub(crate) fn extremal_of(m: &Matrix, target: Target) -> Result<EigenPair> {
    debug_assert_eq!(m.rows(), m.cols());
    extremal_eigenpair(m.as_slice(), m.rows(), target)
}
