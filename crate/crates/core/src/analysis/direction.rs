//! Trait directions in factor space and their back-projection onto edges.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::decomposition::KruskalDecomposition;
use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};
use crate::math;
use crate::tensor::SymmetricMatrix;

fn centered(y: &[f64]) -> Vec<f64> {
    let mean = y.iter().sum::<f64>() / y.len() as f64;
    y.iter().map(|v| v - mean).collect()
}

/// `Uᵀy / ‖Uᵀy‖` after centering the columns of `U` and `y`.
///
/// This maximizes `wᵀUᵀy` over unit `w`.
pub fn cca_direction(u: &Matrix, y: &[f64]) -> Result<Vec<f64>> {
    if u.rows() != y.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} factor rows for {} trait values",
            u.rows(),
            y.len()
        )));
    }
    if y.len() < 2 {
        return Err(Error::InvalidArgument("need at least two subjects".into()));
    }
    let mut uc = u.clone();
    uc.center_columns();
    let yc = centered(y);
    let mut w = uc.tr_matvec(&yc)?;
    let scale = uc.frobenius_norm() * math::norm(&yc);
    let n = math::norm(&w);
    if !(n > 1e-12 * scale) {
        return Err(Error::NoAssociation);
    }
    for x in &mut w {
        *x /= n;
    }
    Ok(w)
}

/// Fisher discriminant `S_w⁻¹(μ₁ − μ₀)`, unit length, oriented so that
/// `wᵀμ₁ > wᵀμ₀`.
///
/// The pooled within-class scatter gets a ridge of `1e-6 · trace / K`.
pub fn lda_direction(u: &Matrix, labels: &[bool]) -> Result<Vec<f64>> {
    if u.rows() != labels.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} factor rows for {} labels",
            u.rows(),
            labels.len()
        )));
    }
    let k = u.cols();
    let ones: Vec<usize> = (0..labels.len()).filter(|&i| labels[i]).collect();
    let zeros: Vec<usize> = (0..labels.len()).filter(|&i| !labels[i]).collect();
    if ones.len() < 2 || zeros.len() < 2 {
        return Err(Error::InvalidArgument(
            "each group needs at least two subjects".into(),
        ));
    }
    let mean = |rows: &[usize]| -> Vec<f64> {
        (0..k)
            .map(|c| rows.iter().map(|&i| u[(i, c)]).sum::<f64>() / rows.len() as f64)
            .collect()
    };
    let (m1, m0) = (mean(&ones), mean(&zeros));
    let diff: Vec<f64> = m1.iter().zip(&m0).map(|(a, b)| a - b).collect();
    let spread = math::norm(&m1).max(math::norm(&m0)).max(1.0);
    if math::norm(&diff) <= 1e-12 * spread {
        return Err(Error::Degenerate("group means coincide".into()));
    }
    let mut sw = Matrix::zeros(k, k);
    for (rows, m) in [(&ones, &m1), (&zeros, &m0)] {
        for &i in rows.iter() {
            for a in 0..k {
                let da = u[(i, a)] - m[a];
                for b in 0..k {
                    sw[(a, b)] += da * (u[(i, b)] - m[b]);
                }
            }
        }
    }
    let scale = (labels.len() - 2) as f64;
    let mut trace = 0.0;
    for a in 0..k {
        for b in 0..k {
            sw[(a, b)] /= scale;
        }
        trace += sw[(a, a)];
    }
    let ridge = 1e-6 * trace / k as f64;
    for a in 0..k {
        sw[(a, a)] += ridge;
    }
    let l = linalg::cholesky(&sw)?;
    let mut w = linalg::cholesky_solve(&l, &diff);
    math::normalize(&mut w).ok_or(Error::Singular("within-class scatter".into()))?;
    if math::dot(&w, &diff) < 0.0 {
        for x in &mut w {
            *x = -*x;
        }
    }
    Ok(w)
}

/// How the Δ-network scale `s` is normalized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Scaling {
    /// `s = wᵀUᵀy / (‖Uw‖² ‖y‖²)`.
    #[default]
    Squared,
    /// `s = wᵀUᵀy / (‖Uw‖ ‖y‖)`, the correlation form.
    Unsquared,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DeltaNetwork {
    pub scale_id: String,
    pub matrix: SymmetricMatrix,
    pub scaling: f64,
}

/// `Δ = s Σ_h d_h w_h v_h v_hᵀ` at one scale.
///
/// `y` has one entry per subject of the decomposition; `s` is computed from
/// the centered factor rows and centered values of the observed subjects.
pub fn delta_network(
    decomp: &KruskalDecomposition,
    w: &[f64],
    scale_id: &str,
    y: &[Option<f64>],
    scaling: Scaling,
) -> Result<DeltaNetwork> {
    let k = decomp.components();
    if w.len() != k {
        return Err(Error::DimensionMismatch(format!(
            "direction of length {} for {k} components",
            w.len()
        )));
    }
    if y.len() != decomp.subjects() {
        return Err(Error::DimensionMismatch(
            "one trait value per subject".into(),
        ));
    }
    let s_factors = decomp.scale(scale_id)?;
    let rows: Vec<usize> = (0..y.len()).filter(|&i| y[i].is_some()).collect();
    let yv: Vec<f64> = rows.iter().map(|&i| y[i].expect("observed")).collect();
    let mut u = decomp.factors().select_rows(&rows);
    u.center_columns();
    let yc = centered(&yv);
    let uw = u.matvec(w)?;
    let (nuw, ny) = (math::norm(&uw), math::norm(&yc));
    if nuw == 0.0 || ny == 0.0 {
        return Err(Error::Degenerate(
            "zero projected scores or constant trait".into(),
        ));
    }
    let num = math::dot(&uw, &yc);
    let s = match scaling {
        Scaling::Squared => num / (nuw * nuw * ny * ny),
        Scaling::Unsquared => num / (nuw * ny),
    };
    let coef: Vec<f64> = (0..k).map(|h| s * s_factors.weights[h] * w[h]).collect();
    let p = s_factors.modes.rows();
    let modes = &s_factors.modes;
    let matrix = SymmetricMatrix::from_upper_fn(p, |a, b| {
        (0..k)
            .map(|h| coef[h] * (modes[(a, h)] * modes[(b, h)]))
            .sum()
    });
    Ok(DeltaNetwork {
        scale_id: scale_id.into(),
        matrix,
        scaling: s,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub a: usize,
    pub b: usize,
    pub value: f64,
}

/// The `count` strictly upper-triangular entries of largest magnitude, by
/// decreasing magnitude with ties in `(a, b)` order.
pub fn threshold_top(m: &SymmetricMatrix, count: usize) -> Result<Vec<Edge>> {
    let p = m.dim();
    let total = p * p.saturating_sub(1) / 2;
    if count > total {
        return Err(Error::InvalidArgument(format!(
            "{count} edges requested from {total} available"
        )));
    }
    let mut edges: Vec<Edge> = Vec::with_capacity(total);
    for a in 0..p {
        for b in a + 1..p {
            edges.push(Edge {
                a,
                b,
                value: m.get(a, b),
            });
        }
    }
    edges.sort_by(|x, y| {
        y.value
            .abs()
            .total_cmp(&x.value.abs())
            .then((x.a, x.b).cmp(&(y.a, y.b)))
    });
    edges.truncate(count);
    Ok(edges)
}
