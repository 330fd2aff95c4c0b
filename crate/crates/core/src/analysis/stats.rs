//! Scoring and testing: variance explained, quartile groups, MMD, BH-FDR.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};
use crate::math;
use crate::rng;

/// `‖P_Û U‖ / ‖U‖` with `P_Û` the orthogonal projector onto the columns of `u_hat`.
pub fn variance_explained(u_hat: &Matrix, u_true: &Matrix) -> Result<f64> {
    if u_hat.rows() != u_true.rows() {
        return Err(Error::DimensionMismatch(format!(
            "{} rows against {}",
            u_hat.rows(),
            u_true.rows()
        )));
    }
    let total = u_true.frobenius_norm();
    if total == 0.0 {
        return Err(Error::Degenerate("reference factors are zero".into()));
    }
    let q = linalg::orthonormal_basis(u_hat)?;
    let coef = q.transpose().matmul(u_true)?;
    Ok((coef.frobenius_norm() / total).min(1.0))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuartileGroups {
    /// Subjects at or above the upper-quartile value, ascending by index.
    pub high: Vec<usize>,
    /// Subjects at or below the lower-quartile value, ascending by index.
    pub low: Vec<usize>,
}

/// Upper and lower quartile groups of the observed values.
///
/// With `n` observed values sorted ascending as `s` and `q = ⌈n/4⌉`, the low
/// cut is `s[q−1]` and the high cut is `s[n−q]`; every subject on a cut is
/// included.
pub fn quartile_groups(y: &[Option<f64>]) -> Result<QuartileGroups> {
    let mut sorted: Vec<f64> = y.iter().flatten().copied().collect();
    let n = sorted.len();
    if n < 8 {
        return Err(Error::InvalidArgument(format!(
            "{n} observed values; quartile groups need at least 8"
        )));
    }
    if sorted.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite);
    }
    sorted.sort_by(|a, b| a.total_cmp(b));
    let q = math::ceil(n as f64 / 4.0) as usize;
    let (lo, hi) = (sorted[q - 1], sorted[n - q]);
    if lo >= hi {
        return Err(Error::Degenerate("quartile cuts coincide".into()));
    }
    let pick = |keep: &dyn Fn(f64) -> bool| -> Vec<usize> {
        y.iter()
            .enumerate()
            .filter_map(|(i, v)| v.filter(|x| keep(*x)).map(|_| i))
            .collect()
    };
    Ok(QuartileGroups {
        high: pick(&|x| x >= hi),
        low: pick(&|x| x <= lo),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MmdResult {
    /// Unbiased estimate of the squared discrepancy.
    pub statistic: f64,
    pub p_value: f64,
    /// Gaussian kernel bandwidth.
    pub bandwidth: f64,
}

/// Two-sample test on the rows of `a` and `b`.
///
/// Gaussian kernel `exp(−‖x−y‖² / 2σ²)` with `σ` the median pairwise distance
/// of the pooled rows; `p = (1 + #{permuted ≥ observed}) / (1 + permutations)`.
pub fn mmd_test(a: &Matrix, b: &Matrix, permutations: usize, seed: u64) -> Result<MmdResult> {
    let (m, n) = (a.rows(), b.rows());
    if a.cols() != b.cols() {
        return Err(Error::DimensionMismatch(
            "groups differ in dimension".into(),
        ));
    }
    if m < 2 || n < 2 {
        return Err(Error::InvalidArgument(
            "each group needs at least two rows".into(),
        ));
    }
    if !a.is_finite() || !b.is_finite() {
        return Err(Error::NonFinite);
    }
    let t = m + n;
    let row = |i: usize| if i < m { a.row(i) } else { b.row(i - m) };
    let mut sq = vec![0.0; t * t];
    for i in 0..t {
        for j in i + 1..t {
            let d: f64 = row(i)
                .iter()
                .zip(row(j))
                .map(|(x, y)| (x - y) * (x - y))
                .sum();
            sq[i * t + j] = d;
            sq[j * t + i] = d;
        }
    }
    let mut dists: Vec<f64> = (0..t)
        .flat_map(|i| (i + 1..t).map(move |j| (i, j)))
        .map(|(i, j)| math::sqrt(sq[i * t + j]))
        .collect();
    let sigma = math::median(&mut dists);
    if !(sigma > 0.0) {
        return Err(Error::Degenerate("median pairwise distance is zero".into()));
    }
    let gamma = 1.0 / (2.0 * sigma * sigma);
    let kernel: Vec<f64> = sq
        .iter()
        .enumerate()
        .map(|(idx, d)| {
            if idx / t == idx % t {
                0.0
            } else {
                math::exp(-gamma * d)
            }
        })
        .collect();
    let total: f64 = kernel.iter().sum();
    let within = |idx: &[usize]| -> f64 {
        let mut s = 0.0;
        for &i in idx {
            let r = &kernel[i * t..(i + 1) * t];
            for &j in idx {
                s += r[j];
            }
        }
        s
    };
    let stat = |order: &[usize]| -> f64 {
        let (ga, gb) = order.split_at(m);
        let saa = within(ga);
        let sbb = within(gb);
        let sab = 0.5 * (total - saa - sbb);
        saa / (m * (m - 1)) as f64 + sbb / (n * (n - 1)) as f64 - 2.0 * sab / (m * n) as f64
    };
    let mut order: Vec<usize> = (0..t).collect();
    let observed = stat(&order);
    let mut rng = rng::stream(seed, 0);
    let mut exceed = 0usize;
    for _ in 0..permutations {
        order.shuffle(&mut rng);
        if stat(&order) >= observed {
            exceed += 1;
        }
    }
    Ok(MmdResult {
        statistic: observed,
        p_value: (1 + exceed) as f64 / (1 + permutations) as f64,
        bandwidth: sigma,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct FdrResult {
    pub rejected: Vec<bool>,
    /// Largest rejected p-value, if any.
    pub threshold: Option<f64>,
}

/// Benjamini–Hochberg step-up at level `q`.
pub fn fdr_adjust(p_values: &[f64], q: f64) -> Result<FdrResult> {
    if p_values.iter().any(|p| !(0.0..=1.0).contains(p)) {
        return Err(Error::InvalidArgument("p-values must lie in [0, 1]".into()));
    }
    let m = p_values.len();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&i, &j| p_values[i].total_cmp(&p_values[j]).then(i.cmp(&j)));
    let cutoff = (1..=m)
        .rev()
        .find(|&k| p_values[order[k - 1]] <= k as f64 * q / m as f64);
    let threshold = cutoff.map(|k| p_values[order[k - 1]]);
    let rejected = p_values
        .iter()
        .map(|p| threshold.is_some_and(|t| *p <= t))
        .collect();
    Ok(FdrResult {
        rejected,
        threshold,
    })
}
