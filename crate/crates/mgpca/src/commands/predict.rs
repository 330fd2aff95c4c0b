use std::collections::HashMap;
use std::path::PathBuf;

use clap::Args;
use mgpca_core::analysis::{prediction_study, Penalty, PredictionConfig, TraitTable};

use super::select_traits;
use crate::csv_io::{fmt, read_traits, write_table};
use crate::error::{CliError, Result};
use crate::fit_files::StoredFit;

fn parse_model(s: &str) -> std::result::Result<(String, PathBuf), String> {
    match s.split_once('=') {
        Some((name, dir)) if !name.is_empty() && !dir.is_empty() => {
            Ok((name.into(), PathBuf::from(dir)))
        }
        _ => Err(format!("expected NAME=DIR, got `{s}`")),
    }
}

#[derive(Debug, Args)]
pub struct PredictArgs {
    /// Fit to compare, as NAME=DIR; repeat for several. The first is the reference.
    #[arg(long = "model", required = true, value_parser = parse_model)]
    pub models: Vec<(String, PathBuf)>,
    /// Trait CSV (`subject_id,<trait>,...`).
    #[arg(long)]
    pub traits: PathBuf,
    /// Optional `trait,kind,category` CSV.
    #[arg(long)]
    pub kinds: Option<PathBuf>,
    /// Trait to predict; repeat for several. Defaults to every trait.
    #[arg(long = "trait")]
    pub trait_names: Vec<String>,
    /// Random train/test splits per trait.
    #[arg(long, default_value_t = 100)]
    pub splits: usize,
    #[arg(long, default_value_t = 0.7)]
    pub train_frac: f64,
    /// Leading factors used; each model uses at most its own count.
    #[arg(long, default_value_t = 70)]
    pub factors: usize,
    /// Fixed ridge penalty.
    #[arg(long, conflicts_with = "cv")]
    pub lambda: Option<f64>,
    /// Choose the penalty by 5-fold cross-validation on each training set (the default).
    #[arg(long)]
    pub cv: bool,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output CSV.
    #[arg(long)]
    pub out: PathBuf,
}

pub fn run(a: &PredictArgs) -> Result<()> {
    if a.splits == 0 || !(a.train_frac > 0.0 && a.train_frac < 1.0) || a.factors == 0 {
        return Err(CliError::Usage(
            "--splits and --factors must be positive and --train-frac must lie in (0, 1)".into(),
        ));
    }
    if a.lambda.is_some_and(|l| !(l >= 0.0 && l.is_finite())) {
        return Err(CliError::Usage(
            "--lambda must be finite and nonnegative".into(),
        ));
    }
    let full = read_traits(&a.traits, a.kinds.as_deref())?;
    let chosen: Vec<_> = select_traits(&full, &a.trait_names)?
        .into_iter()
        .map(|(_, t)| t.clone())
        .collect();
    let table = TraitTable::new(full.subject_ids().to_vec(), chosen)?;
    let mut models = Vec::with_capacity(a.models.len());
    for (name, dir) in &a.models {
        let fit = StoredFit::load(dir)?;
        let index: HashMap<&str, usize> = fit
            .subject_ids
            .iter()
            .enumerate()
            .map(|(i, s)| (s.as_str(), i))
            .collect();
        let rows = table
            .subject_ids()
            .iter()
            .map(|s| {
                index.get(s.as_str()).copied().ok_or_else(|| {
                    CliError::Data(format!("model {name} has no factors for subject `{s}`"))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        models.push((name.clone(), fit.decomposition.factors().select_rows(&rows)));
    }
    let config = PredictionConfig {
        splits: a.splits,
        train_fraction: a.train_frac,
        factors: a.factors,
        penalty: match a.lambda {
            Some(l) => Penalty::Fixed(l),
            None => Penalty::CrossValidated,
        },
        seed: a.seed,
    };
    let study = prediction_study(&models, &table, &config)?;
    for (name, reason) in &study.skipped {
        eprintln!("predict: skipped {name}: {reason}");
    }
    let header: Vec<String> = ["trait", "model", "median_mse", "relative_change"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    let rows: Vec<Vec<String>> = study
        .rows
        .iter()
        .flat_map(|r| {
            study.models.iter().enumerate().map(move |(m, name)| {
                vec![
                    r.trait_name.clone(),
                    name.clone(),
                    fmt(r.median_mse[m]),
                    fmt(r.relative_change[m]),
                ]
            })
        })
        .collect();
    write_table(&a.out, &header, &rows)
}
