use std::path::PathBuf;

use clap::{Args, ValueEnum};
use mgpca_core::analysis::{Trait, TraitKind, TraitTable};
use mgpca_core::simulation::{
    generate, linear_traits, run_study, FlipMode, Noise, SimulationConfig, Structure, StudyConfig,
};
use serde::Serialize;

use super::{create_dir, write_json};
use crate::csv_io::{fmt, write_kinds, write_table, write_traits};
use crate::error::{CliError, Result};
use crate::fit_files::write_factors;
use crate::tensor_file::TensorFile;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StructureArg {
    Random,
    Sparse,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum NoiseArg {
    None,
    Normal,
    Rademacher,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FlipArg {
    /// Multiply flipped entries by −1.
    Sign,
    /// Replace flipped entries `x` by `1 − x`.
    Toggle,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Node count of each scale, comma separated.
    #[arg(long, value_delimiter = ',', default_values_t = [25usize, 50, 75])]
    pub scales: Vec<usize>,
    /// Number of subjects.
    #[arg(long = "n", default_value_t = 100)]
    pub subjects: usize,
    /// Planted rank.
    #[arg(long, default_value_t = 10)]
    pub rank: usize,
    #[arg(long, value_enum, default_value_t = StructureArg::Random)]
    pub structure: StructureArg,
    /// Fraction of entries zeroed in each sparse network mode.
    #[arg(long, default_value_t = 0.75)]
    pub sparsity: f64,
    #[arg(long, value_enum, default_value_t = NoiseArg::None)]
    pub noise: NoiseArg,
    /// Normal noise standard deviation as a fraction of each slice's value range.
    #[arg(long, default_value_t = 1.0 / 3.0)]
    pub sd_frac: f64,
    /// Fraction of edges flipped per slice under Rademacher noise.
    #[arg(long, default_value_t = 0.25)]
    pub flip_frac: f64,
    #[arg(long, value_enum, default_value_t = FlipArg::Sign)]
    pub flip_mode: FlipArg,
    /// Keep the planted stacks unnormalized.
    #[arg(long)]
    pub no_normalize: bool,
    /// Also write this many traits linear in the planted factors.
    #[arg(long, default_value_t = 0)]
    pub traits: usize,
    /// Trait noise standard deviation relative to the signal's.
    #[arg(long, default_value_t = 0.5)]
    pub trait_noise: f64,
    /// Run the variance-explained study over random/sparse × normal/Rademacher.
    #[arg(long)]
    pub study: bool,
    #[arg(long, default_value_t = 10, requires = "study")]
    pub repetitions: usize,
    /// Components fitted in the study.
    #[arg(long, default_value_t = 10, requires = "study")]
    pub max_k: usize,
    #[arg(long, default_value_t = 5, requires = "study")]
    pub restarts: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Serialize)]
struct Manifest<'a> {
    command: &'static str,
    scales: &'a [usize],
    subjects: usize,
    rank: usize,
    structure: &'static str,
    sparsity: f64,
    noise: &'static str,
    sd_fraction: f64,
    flip_fraction: f64,
    flip_mode: &'static str,
    normalize: bool,
    traits: usize,
    trait_noise: f64,
    seed: u64,
    scale_ids: Vec<String>,
    study: Option<StudyManifest>,
}

#[derive(Serialize)]
struct StudyManifest {
    repetitions: usize,
    max_k: usize,
    restarts: usize,
}

pub fn subject_ids(n: usize) -> Vec<String> {
    let width = n.to_string().len().max(3);
    (1..=n).map(|i| format!("sub{i:0width$}")).collect()
}

pub fn run(a: &SimulateArgs) -> Result<()> {
    let config = SimulationConfig {
        scales: a.scales.clone(),
        subjects: a.subjects,
        rank: a.rank,
        structure: match a.structure {
            StructureArg::Random => Structure::Random,
            StructureArg::Sparse => Structure::Sparse,
        },
        sparsity: a.sparsity,
        noise: match a.noise {
            NoiseArg::None => Noise::None,
            NoiseArg::Normal => Noise::Normal,
            NoiseArg::Rademacher => Noise::Rademacher,
        },
        sd_fraction: a.sd_frac,
        flip_fraction: a.flip_frac,
        flip_mode: match a.flip_mode {
            FlipArg::Sign => FlipMode::SignFlip,
            FlipArg::Toggle => FlipMode::Toggle,
        },
        normalize: !a.no_normalize,
        seed: a.seed,
    };
    config
        .validate()
        .map_err(|e| CliError::Usage(e.to_string()))?;
    if a.study && (a.repetitions == 0 || a.max_k == 0 || a.restarts == 0) {
        return Err(CliError::Usage(
            "--repetitions, --max-k and --restarts must be positive".into(),
        ));
    }
    if !(a.trait_noise >= 0.0 && a.trait_noise.is_finite()) {
        return Err(CliError::Usage(
            "--trait-noise must be finite and nonnegative".into(),
        ));
    }
    create_dir(&a.out)?;
    let data = generate(&config)?;
    let ids = subject_ids(a.subjects);
    for x in &data.stacks {
        let path = a.out.join(format!("{}.mgpca", x.scale_id()));
        TensorFile::new(x.clone(), ids.clone())?.save(&path)?;
    }
    write_factors(&a.out, "truth_", &data.truth, &data.factors, &ids)?;
    if a.traits > 0 {
        let values = linear_traits(&data.factors, a.traits, a.trait_noise, a.seed)?;
        let traits = values
            .into_iter()
            .enumerate()
            .map(|(t, v)| Trait {
                name: format!("trait{}", t + 1),
                kind: TraitKind::Continuous,
                category: "synthetic".into(),
                values: v.into_iter().map(Some).collect(),
            })
            .collect();
        let table = TraitTable::new(ids.clone(), traits)?;
        write_traits(&a.out.join("traits.csv"), &table)?;
        write_kinds(&a.out.join("kinds.csv"), &table)?;
    }
    if a.study {
        let study = StudyConfig {
            base: config.clone(),
            repetitions: a.repetitions,
            max_k: a.max_k,
            restarts: a.restarts,
            seed: a.seed,
            ..StudyConfig::default()
        };
        let rows = run_study(&study)?;
        let header: Vec<String> = ["structure", "noise", "K", "method", "mean_ve", "sd_ve"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        let table: Vec<Vec<String>> = rows
            .iter()
            .map(|r| {
                vec![
                    r.structure.name().into(),
                    r.noise.name().into(),
                    r.k.to_string(),
                    r.method.clone(),
                    r.mean_ve.map(fmt).unwrap_or_default(),
                    r.sd_ve.map(fmt).unwrap_or_default(),
                ]
            })
            .collect();
        let failed: usize = rows.iter().map(|r| r.failures).sum();
        if failed > 0 {
            eprintln!("study: {failed} (repetition, K, method) cells produced no score");
        }
        write_table(&a.out.join("study.csv"), &header, &table)?;
    }
    write_json(
        &a.out.join("manifest.json"),
        &Manifest {
            command: "simulate",
            scales: &a.scales,
            subjects: a.subjects,
            rank: a.rank,
            structure: config.structure.name(),
            sparsity: a.sparsity,
            noise: config.noise.name(),
            sd_fraction: a.sd_frac,
            flip_fraction: a.flip_frac,
            flip_mode: match a.flip_mode {
                FlipArg::Sign => "sign",
                FlipArg::Toggle => "toggle",
            },
            normalize: config.normalize,
            traits: a.traits,
            trait_noise: a.trait_noise,
            seed: a.seed,
            scale_ids: data
                .stacks
                .iter()
                .map(|x| x.scale_id().to_string())
                .collect(),
            study: a.study.then_some(StudyManifest {
                repetitions: a.repetitions,
                max_k: a.max_k,
                restarts: a.restarts,
            }),
        },
    )
}
