use std::path::PathBuf;

use clap::Args;
use mgpca_core::analysis::{fdr_adjust, mmd_test, quartile_groups, TraitKind};
use mgpca_core::rng::derive_seed;

use super::{align, select_traits};
use crate::csv_io::{fmt, kind_name, read_traits, write_table};
use crate::error::{CliError, Result};
use crate::fit_files::StoredFit;

#[derive(Debug, Args)]
pub struct MmdArgs {
    /// Directory written by `decompose`.
    #[arg(long)]
    pub fit: PathBuf,
    /// Trait CSV (`subject_id,<trait>,...`).
    #[arg(long)]
    pub traits: PathBuf,
    /// Optional `trait,kind,category` CSV.
    #[arg(long)]
    pub kinds: Option<PathBuf>,
    /// Trait to test; repeat for several. Defaults to every trait.
    #[arg(long = "trait")]
    pub trait_names: Vec<String>,
    #[arg(long, default_value_t = 1000)]
    pub permutations: usize,
    /// Benjamini–Hochberg level across the tested traits.
    #[arg(long, default_value_t = 0.05)]
    pub fdr: f64,
    /// Leading factors used as coordinates. Defaults to all.
    #[arg(long)]
    pub factors: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output CSV.
    #[arg(long)]
    pub out: PathBuf,
}

pub fn run(a: &MmdArgs) -> Result<()> {
    if !(a.fdr > 0.0 && a.fdr < 1.0) {
        return Err(CliError::Usage("--fdr must lie in (0, 1)".into()));
    }
    let fit = StoredFit::load(&a.fit)?;
    let table = read_traits(&a.traits, a.kinds.as_deref())?;
    let chosen = select_traits(&table, &a.trait_names)?;
    let k = fit.decomposition.components();
    let factors = a.factors.unwrap_or(k);
    if factors == 0 || factors > k {
        return Err(CliError::Usage(format!("--factors must lie in 1..={k}")));
    }
    let u = fit.decomposition.factors().leading_columns(factors);
    let mut results = Vec::with_capacity(chosen.len());
    for (idx, t) in &chosen {
        let y = align(t, &table, &fit.subject_ids);
        let (high, low) = if t.kind == TraitKind::Binary {
            let mut distinct: Vec<f64> = y.iter().flatten().copied().collect();
            distinct.sort_by(f64::total_cmp);
            distinct.dedup();
            let upper = distinct.last().copied().unwrap_or(f64::NAN);
            let high: Vec<usize> = (0..y.len()).filter(|&i| y[i] == Some(upper)).collect();
            let low: Vec<usize> = (0..y.len())
                .filter(|&i| y[i].is_some() && y[i] != Some(upper))
                .collect();
            (high, low)
        } else {
            let g = quartile_groups(&y)
                .map_err(|e| CliError::Data(format!("trait {}: {e}", t.name)))?;
            (g.high, g.low)
        };
        let seed = derive_seed(a.seed, &[*idx as u64]);
        let r = mmd_test(
            &u.select_rows(&high),
            &u.select_rows(&low),
            a.permutations,
            seed,
        )
        .map_err(|e| CliError::Data(format!("trait {}: {e}", t.name)))?;
        results.push((t, high.len(), low.len(), r));
    }
    let p: Vec<f64> = results.iter().map(|r| r.3.p_value).collect();
    let fdr = fdr_adjust(&p, a.fdr)?;
    let header: Vec<String> = [
        "trait",
        "kind",
        "n_high",
        "n_low",
        "statistic",
        "bandwidth",
        "p_value",
        "rejected",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    let rows: Vec<Vec<String>> = results
        .iter()
        .zip(&fdr.rejected)
        .map(|((t, nh, nl, r), rej)| {
            vec![
                t.name.clone(),
                kind_name(t.kind).into(),
                nh.to_string(),
                nl.to_string(),
                fmt(r.statistic),
                fmt(r.bandwidth),
                fmt(r.p_value),
                rej.to_string(),
            ]
        })
        .collect();
    write_table(&a.out, &header, &rows)
}
