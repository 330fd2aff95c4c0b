//! Ridge regression of traits on subject factors, and the repeated-split study.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;

use super::traits::TraitTable;
use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};
use crate::math;
use crate::rng;

/// Penalties searched by [`cv_lambda`].
pub const LAMBDA_GRID: [f64; 7] = [1e-3, 1e-2, 1e-1, 1.0, 1e1, 1e2, 1e3];

/// Ridge fit on standardized features with an unpenalized intercept.
#[derive(Debug, Clone, PartialEq)]
pub struct RidgeModel {
    pub means: Vec<f64>,
    /// Population standard deviations; a constant column keeps scale 1.
    pub scales: Vec<f64>,
    pub coefficients: Vec<f64>,
    pub intercept: f64,
}

impl RidgeModel {
    pub fn fit(x: &Matrix, y: &[f64], lambda: f64) -> Result<Self> {
        let (n, k) = (x.rows(), x.cols());
        if y.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "{n} rows for {} responses",
                y.len()
            )));
        }
        if n < 2 {
            return Err(Error::InvalidArgument(
                "need at least two training rows".into(),
            ));
        }
        if !(lambda >= 0.0 && lambda.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "penalty {lambda} is not usable"
            )));
        }
        let mut z = x.clone();
        let means = z.center_columns();
        let scales: Vec<f64> = (0..k)
            .map(|c| {
                let sd = math::sqrt((0..n).map(|i| z[(i, c)] * z[(i, c)]).sum::<f64>() / n as f64);
                if sd > 0.0 {
                    sd
                } else {
                    1.0
                }
            })
            .collect();
        for i in 0..n {
            for (c, s) in scales.iter().enumerate() {
                z[(i, c)] /= s;
            }
        }
        let intercept = y.iter().sum::<f64>() / n as f64;
        let yc: Vec<f64> = y.iter().map(|v| v - intercept).collect();
        let mut a = z.gram();
        for c in 0..k {
            a[(c, c)] += lambda;
        }
        let coefficients = if k == 0 {
            Vec::new()
        } else {
            let l = linalg::cholesky(&a)?;
            linalg::cholesky_solve(&l, &z.tr_matvec(&yc)?)
        };
        Ok(Self {
            means,
            scales,
            coefficients,
            intercept,
        })
    }

    pub fn predict(&self, x: &Matrix) -> Result<Vec<f64>> {
        if x.cols() != self.coefficients.len() {
            return Err(Error::DimensionMismatch("feature count".into()));
        }
        Ok((0..x.rows())
            .map(|i| {
                let row = x.row(i);
                self.intercept
                    + (0..row.len())
                        .map(|c| (row[c] - self.means[c]) / self.scales[c] * self.coefficients[c])
                        .sum::<f64>()
            })
            .collect())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RidgePrediction {
    pub predictions: Vec<f64>,
    pub mse: f64,
}

pub fn ridge_predict(
    train_x: &Matrix,
    train_y: &[f64],
    test_x: &Matrix,
    test_y: &[f64],
    lambda: f64,
) -> Result<RidgePrediction> {
    if test_x.rows() != test_y.len() || test_y.is_empty() {
        return Err(Error::DimensionMismatch("test rows and responses".into()));
    }
    let model = RidgeModel::fit(train_x, train_y, lambda)?;
    let predictions = model.predict(test_x)?;
    let mse = predictions
        .iter()
        .zip(test_y)
        .map(|(p, y)| (p - y) * (p - y))
        .sum::<f64>()
        / test_y.len() as f64;
    Ok(RidgePrediction { predictions, mse })
}

/// Penalty from `grid` with the lowest 5-fold error; folds are row index mod 5
/// and the smallest penalty wins ties.
pub fn cv_lambda(x: &Matrix, y: &[f64], grid: &[f64]) -> Result<f64> {
    const FOLDS: usize = 5;
    let n = x.rows();
    if n < 2 * FOLDS {
        return Err(Error::InvalidArgument(format!(
            "{n} rows are too few for {FOLDS}-fold cross-validation"
        )));
    }
    let mut best: Option<(f64, f64)> = None;
    for &lambda in grid {
        let mut err = 0.0;
        for f in 0..FOLDS {
            let train: Vec<usize> = (0..n).filter(|i| i % FOLDS != f).collect();
            let test: Vec<usize> = (0..n).filter(|i| i % FOLDS == f).collect();
            let ty: Vec<f64> = train.iter().map(|&i| y[i]).collect();
            let sy: Vec<f64> = test.iter().map(|&i| y[i]).collect();
            match ridge_predict(
                &x.select_rows(&train),
                &ty,
                &x.select_rows(&test),
                &sy,
                lambda,
            ) {
                Ok(r) => err += r.mse * test.len() as f64,
                Err(Error::Singular(_)) => err = f64::INFINITY,
                Err(e) => return Err(e),
            }
        }
        if best.is_none_or(|(_, e)| err < e) {
            best = Some((lambda, err));
        }
    }
    match best {
        Some((lambda, err)) if err.is_finite() => Ok(lambda),
        _ => Err(Error::Singular(
            "no penalty in the grid gives a solvable fit".into(),
        )),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Penalty {
    Fixed(f64),
    /// Chosen per fit by [`cv_lambda`] over [`LAMBDA_GRID`].
    CrossValidated,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PredictionConfig {
    pub splits: usize,
    pub train_fraction: f64,
    /// Leading factor count; each model uses at most its own `K`.
    pub factors: usize,
    pub penalty: Penalty,
    pub seed: u64,
}

impl Default for PredictionConfig {
    fn default() -> Self {
        Self {
            splits: 100,
            train_fraction: 0.7,
            factors: 70,
            penalty: Penalty::CrossValidated,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraitPrediction {
    pub trait_name: String,
    /// Median test error per model, in model order.
    pub median_mse: Vec<f64>,
    /// `(median_ref − median_m) / median_m` with model 0 as the reference.
    pub relative_change: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PredictionStudy {
    pub models: Vec<String>,
    pub rows: Vec<TraitPrediction>,
    /// Traits left out, with the reason.
    pub skipped: Vec<(String, String)>,
}

/// Smallest number of observed subjects a trait needs to enter the study.
pub const MIN_STUDY_SUBJECTS: usize = 15;

/// Repeated random train/test splits, shared across models, with a ridge fit
/// per split, trait and model. `models[m].1` is the `N×K` factor matrix whose
/// rows follow the trait table's subjects.
pub fn prediction_study(
    models: &[(String, Matrix)],
    traits: &TraitTable,
    config: &PredictionConfig,
) -> Result<PredictionStudy> {
    if models.is_empty() {
        return Err(Error::InvalidArgument("no models given".into()));
    }
    let n = traits.subject_ids().len();
    if let Some((name, _)) = models.iter().find(|(_, u)| u.rows() != n) {
        return Err(Error::DimensionMismatch(format!(
            "model {name} has a different subject count from the trait table"
        )));
    }
    if config.splits == 0 || !(config.train_fraction > 0.0 && config.train_fraction < 1.0) {
        return Err(Error::InvalidConfig("splits and train fraction".into()));
    }
    if config.factors == 0 {
        return Err(Error::InvalidConfig(
            "at least one factor is required".into(),
        ));
    }
    let features: Vec<Matrix> = models
        .iter()
        .map(|(_, u)| u.leading_columns(config.factors.min(u.cols())))
        .collect();
    let mut rows = Vec::new();
    let mut skipped = Vec::new();
    for (t_idx, tr) in traits.traits().iter().enumerate() {
        let (idx, vals) = tr.observed();
        if idx.len() < MIN_STUDY_SUBJECTS {
            skipped.push((
                tr.name.clone(),
                format!(
                    "{} observed subjects, fewer than {MIN_STUDY_SUBJECTS}",
                    idx.len()
                ),
            ));
            continue;
        }
        let n_train = math::round(config.train_fraction * idx.len() as f64) as usize;
        let n_train = n_train.clamp(2, idx.len() - 1);
        let mut errors: Vec<Vec<f64>> = vec![Vec::with_capacity(config.splits); models.len()];
        let mut order: Vec<usize> = (0..idx.len()).collect();
        for s in 0..config.splits {
            let mut rng = rng::stream(config.seed, rng::stream_id(&[t_idx as u64, s as u64]));
            order.sort_unstable();
            order.shuffle(&mut rng);
            let (tr_pos, te_pos) = order.split_at(n_train);
            let tr_rows: Vec<usize> = tr_pos.iter().map(|&p| idx[p]).collect();
            let te_rows: Vec<usize> = te_pos.iter().map(|&p| idx[p]).collect();
            let ty: Vec<f64> = tr_pos.iter().map(|&p| vals[p]).collect();
            let sy: Vec<f64> = te_pos.iter().map(|&p| vals[p]).collect();
            for (m, x) in features.iter().enumerate() {
                let train_x = x.select_rows(&tr_rows);
                let lambda = match config.penalty {
                    Penalty::Fixed(l) => l,
                    Penalty::CrossValidated => cv_lambda(&train_x, &ty, &LAMBDA_GRID)?,
                };
                let r = ridge_predict(&train_x, &ty, &x.select_rows(&te_rows), &sy, lambda)?;
                errors[m].push(r.mse);
            }
        }
        let median_mse: Vec<f64> = errors.iter_mut().map(|e| math::median(e)).collect();
        let reference = median_mse[0];
        let relative_change = median_mse
            .iter()
            .map(|m| {
                if *m == reference {
                    0.0
                } else {
                    (reference - m) / m
                }
            })
            .collect();
        rows.push(TraitPrediction {
            trait_name: tr.name.clone(),
            median_mse,
            relative_change,
        });
    }
    Ok(PredictionStudy {
        models: models.iter().map(|(n, _)| n.clone()).collect(),
        rows,
        skipped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn huge_penalty_predicts_training_mean() {
        let x = Matrix::from_row_major(4, 1, vec![0., 1., 2., 3.]).unwrap();
        let y = [1., 3., 2., 6.];
        let r = ridge_predict(&x, &y, &x, &y, 1e8).unwrap();
        assert!(r.predictions.iter().all(|p| (p - 3.0).abs() < 1e-4));
    }

    #[test]
    fn collinear_without_penalty_is_singular() {
        let x = Matrix::from_row_major(4, 2, vec![0., 0., 1., 2., 2., 4., 3., 6.]).unwrap();
        let y = [1., 3., 2., 6.];
        assert!(matches!(
            RidgeModel::fit(&x, &y, 0.0),
            Err(Error::Singular(_))
        ));
        assert!(RidgeModel::fit(&x, &y, 1.0).is_ok());
    }
}
