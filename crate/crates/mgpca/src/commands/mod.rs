//! Subcommands. Each reads its inputs, runs one library workflow and writes
//! plain files; nothing depends on the clock or the environment.

use std::collections::HashMap;
use std::fs;
use std::path::Path;

use clap::{Parser, Subcommand};
use mgpca_core::analysis::{Trait, TraitTable};

use crate::error::{CliError, Result};

pub mod decompose;
pub mod delta;
pub mod mmd;
pub mod predict;
pub mod simulate;

#[derive(Debug, Parser)]
#[command(
    name = "mgpca",
    version,
    about = "Multi-scale graph PCA of connectome stacks"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate planted multi-scale data, optionally with the variance-explained study.
    Simulate(simulate::SimulateArgs),
    /// Fit the joint decomposition to tensor files.
    Decompose(decompose::DecomposeArgs),
    /// Map trait directions back to edge-level networks.
    Delta(delta::DeltaArgs),
    /// MMD tests between high and low trait groups, with FDR control.
    Mmd(mmd::MmdArgs),
    /// Repeated-split ridge prediction of traits from several fits.
    Predict(predict::PredictArgs),
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Simulate(a) => simulate::run(&a),
        Command::Decompose(a) => decompose::run(&a),
        Command::Delta(a) => delta::run(&a),
        Command::Mmd(a) => mmd::run(&a),
        Command::Predict(a) => predict::run(&a),
    }
}

pub(crate) fn create_dir(path: &Path) -> Result<()> {
    fs::create_dir_all(path).map_err(CliError::io(path))
}

pub(crate) fn write_json(path: &Path, value: &impl serde::Serialize) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::format(path, e))?;
    text.push('\n');
    fs::write(path, text).map_err(CliError::io(path))
}

/// Traits named on the command line, or all of them, with their table index.
pub(crate) fn select_traits<'a>(
    table: &'a TraitTable,
    names: &[String],
) -> Result<Vec<(usize, &'a Trait)>> {
    if names.is_empty() {
        return Ok(table.traits().iter().enumerate().collect());
    }
    names
        .iter()
        .map(|n| {
            table
                .traits()
                .iter()
                .enumerate()
                .find(|(_, t)| &t.name == n)
                .ok_or_else(|| CliError::Usage(format!("unknown trait `{n}`")))
        })
        .collect()
}

/// Trait values reordered to `subject_ids`; subjects absent from the table are missing.
pub(crate) fn align(t: &Trait, table: &TraitTable, subject_ids: &[String]) -> Vec<Option<f64>> {
    let index: HashMap<&str, usize> = table
        .subject_ids()
        .iter()
        .enumerate()
        .map(|(i, s)| (s.as_str(), i))
        .collect();
    subject_ids
        .iter()
        .map(|s| index.get(s.as_str()).and_then(|&i| t.values[i]))
        .collect()
}

/// File-name form of a trait name.
pub(crate) fn file_stem(name: &str) -> String {
    name.chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || c == '-' || c == '_' {
                c
            } else {
                '_'
            }
        })
        .collect()
}
