use std::path::PathBuf;

use clap::{Args, ValueEnum};
use mgpca_core::analysis::{
    cca_direction, delta_network, lda_direction, threshold_top, Scaling, TraitKind,
};

use super::{align, create_dir, file_stem, select_traits};
use crate::csv_io::{fmt, read_traits, write_table};
use crate::error::{CliError, Result};
use crate::fit_files::StoredFit;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    /// LDA for binary traits, CCA otherwise.
    Auto,
    Cca,
    Lda,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ScalingArg {
    Squared,
    Unsquared,
}

#[derive(Debug, Args)]
pub struct DeltaArgs {
    /// Directory written by `decompose`.
    #[arg(long)]
    pub fit: PathBuf,
    /// Trait CSV (`subject_id,<trait>,...`).
    #[arg(long)]
    pub traits: PathBuf,
    /// Optional `trait,kind,category` CSV.
    #[arg(long)]
    pub kinds: Option<PathBuf>,
    /// Trait to map; repeat for several. Defaults to every trait.
    #[arg(long = "trait")]
    pub trait_names: Vec<String>,
    /// Scale to map; repeat for several. Defaults to every scale.
    #[arg(long = "scale")]
    pub scales: Vec<String>,
    /// Edges kept per network.
    #[arg(long, default_value_t = 100)]
    pub top: usize,
    #[arg(long, value_enum, default_value_t = MethodArg::Auto)]
    pub method: MethodArg,
    #[arg(long, value_enum, default_value_t = ScalingArg::Squared)]
    pub scaling: ScalingArg,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
}

pub fn run(a: &DeltaArgs) -> Result<()> {
    let fit = StoredFit::load(&a.fit)?;
    let table = read_traits(&a.traits, a.kinds.as_deref())?;
    let chosen = select_traits(&table, &a.trait_names)?;
    let decomp = &fit.decomposition;
    let scale_ids: Vec<String> = if a.scales.is_empty() {
        decomp.scales().iter().map(|s| s.scale_id.clone()).collect()
    } else {
        a.scales.clone()
    };
    for id in &scale_ids {
        let s = decomp
            .scale(id)
            .map_err(|_| CliError::Usage(format!("unknown scale `{id}`")))?;
        let p = s.modes.rows();
        if a.top > p * (p - 1) / 2 {
            return Err(CliError::Usage(format!(
                "--top {} exceeds the {} edges of scale {id}",
                a.top,
                p * (p - 1) / 2
            )));
        }
    }
    let scaling = match a.scaling {
        ScalingArg::Squared => Scaling::Squared,
        ScalingArg::Unsquared => Scaling::Unsquared,
    };
    create_dir(&a.out)?;
    let k = decomp.components();
    let mut directions = Vec::with_capacity(chosen.len());
    for (_, t) in &chosen {
        let y = align(t, &table, &fit.subject_ids);
        let rows: Vec<usize> = (0..y.len()).filter(|&i| y[i].is_some()).collect();
        let values: Vec<f64> = rows.iter().map(|&i| y[i].expect("observed")).collect();
        let u = decomp.factors().select_rows(&rows);
        let lda = match a.method {
            MethodArg::Auto => t.kind == TraitKind::Binary,
            MethodArg::Cca => false,
            MethodArg::Lda => true,
        };
        let w = if lda {
            let mut distinct = values.clone();
            distinct.sort_by(f64::total_cmp);
            distinct.dedup();
            if distinct.len() != 2 {
                return Err(CliError::Data(format!(
                    "LDA needs a two-valued trait; {} has {}",
                    t.name,
                    distinct.len()
                )));
            }
            let labels: Vec<bool> = values.iter().map(|v| *v == distinct[1]).collect();
            lda_direction(&u, &labels)
        } else {
            cca_direction(&u, &values)
        }
        .map_err(|e| CliError::Data(format!("trait {}: {e}", t.name)))?;
        let mut s_value = None;
        for id in &scale_ids {
            let delta = delta_network(decomp, &w, id, &y, scaling)
                .map_err(|e| CliError::Data(format!("trait {}: {e}", t.name)))?;
            s_value = Some(delta.scaling);
            let edges = threshold_top(&delta.matrix, a.top)?;
            let rows: Vec<Vec<String>> = edges
                .iter()
                .map(|e| vec![e.a.to_string(), e.b.to_string(), fmt(e.value)])
                .collect();
            let header: Vec<String> = ["node_a", "node_b", "value"]
                .iter()
                .map(|s| s.to_string())
                .collect();
            let path = a.out.join(format!("delta_{}_{id}.csv", file_stem(&t.name)));
            write_table(&path, &header, &rows)?;
        }
        let mut row = vec![
            t.name.clone(),
            if lda { "lda" } else { "cca" }.to_string(),
            s_value.map(fmt).unwrap_or_default(),
        ];
        row.extend(w.iter().map(|v| fmt(*v)));
        directions.push(row);
    }
    let mut header: Vec<String> = ["trait", "method", "scaling"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    header.extend((1..=k).map(|h| format!("w{h}")));
    write_table(&a.out.join("directions.csv"), &header, &directions)
}
