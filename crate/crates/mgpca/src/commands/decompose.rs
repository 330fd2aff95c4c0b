use std::collections::HashMap;
use std::path::PathBuf;

use clap::{Args, ValueEnum};
use mgpca_core::{
    cpve, fit_missing, impute, multiscale_pca, normalize_stack, AvailabilityMask, FitConfig,
    FitStatus, Init, TensorStack,
};
use serde::Serialize;

use super::{create_dir, write_json};
use crate::csv_io::read_mask;
use crate::error::{CliError, Result};
use crate::fit_files::{check_scale_id, StoredFit};
use crate::tensor_file::TensorFile;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum InitArg {
    Hosvd,
    Random,
}

#[derive(Debug, Args)]
pub struct DecomposeArgs {
    /// Tensor files, one per scale.
    #[arg(required = true)]
    pub inputs: Vec<PathBuf>,
    /// Number of components.
    #[arg(long)]
    pub k: usize,
    /// Starts per component; the first is seeded by `--init`, the rest are random.
    #[arg(long, default_value_t = FitConfig::DEFAULT_RESTARTS)]
    pub restarts: usize,
    #[arg(long, default_value_t = FitConfig::DEFAULT_MAX_ITERS)]
    pub max_iters: usize,
    /// Relative objective change that stops the alternating updates.
    #[arg(long, default_value_t = FitConfig::DEFAULT_TOL)]
    pub tol: f64,
    #[arg(long, value_enum, default_value_t = InitArg::Hosvd)]
    pub init: InitArg,
    /// Divide each stack by its Frobenius norm before fitting.
    #[arg(long)]
    pub normalize: bool,
    /// Availability CSV (`subject_id,scale_id,available`); enables the missing-data fit.
    #[arg(long)]
    pub mask: Option<PathBuf>,
    /// Write `imputed_<scale>.mgpca` for every scale with missing subjects.
    #[arg(long, requires = "mask")]
    pub impute: bool,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Serialize)]
struct Manifest {
    command: &'static str,
    inputs: Vec<InputRecord>,
    mask: Option<String>,
    subjects: usize,
    config: ConfigRecord,
    requested: usize,
    fitted: usize,
    complete: bool,
    /// Per k, the smallest per-scale value; absent for incomplete masks.
    cpve: Option<Vec<f64>>,
    scales: Vec<ScaleRecord>,
    components: Vec<ComponentRecord>,
}

#[derive(Serialize)]
struct InputRecord {
    path: String,
    scale_id: String,
    nodes: usize,
    subjects: usize,
}

#[derive(Serialize)]
struct ConfigRecord {
    components: usize,
    restarts: usize,
    max_iters: usize,
    tol: f64,
    init: &'static str,
    normalize: bool,
    impute: bool,
    seed: u64,
}

#[derive(Serialize)]
struct ScaleRecord {
    scale_id: String,
    frobenius_norm: f64,
    cpve: Option<Vec<f64>>,
}

#[derive(Serialize)]
struct ComponentRecord {
    objective: f64,
    terms: Vec<f64>,
    iterations: usize,
    converged: bool,
    restart: usize,
    objective_trace: Vec<f64>,
}

fn unique_ids(ids: &[String], what: &str) -> Result<HashMap<String, usize>> {
    let mut map = HashMap::with_capacity(ids.len());
    for (i, id) in ids.iter().enumerate() {
        if map.insert(id.clone(), i).is_some() {
            return Err(CliError::Data(format!(
                "subject `{id}` appears twice in {what}"
            )));
        }
    }
    Ok(map)
}

/// Reorders `file` to `order`, which must be the same set of subjects.
fn reorder(file: &TensorFile, order: &[String], what: &str) -> Result<TensorStack> {
    let index = unique_ids(&file.subject_ids, what)?;
    if index.len() != order.len() {
        return Err(CliError::Data(format!(
            "{what} holds {} subjects where {} are expected",
            index.len(),
            order.len()
        )));
    }
    let picks = order
        .iter()
        .map(|id| {
            index
                .get(id)
                .copied()
                .ok_or_else(|| CliError::Data(format!("{what} lacks subject `{id}`")))
        })
        .collect::<Result<Vec<_>>>()?;
    if picks.iter().enumerate().all(|(i, &p)| i == p) {
        return Ok(file.stack.clone());
    }
    Ok(file.stack.select_subjects(&picks)?)
}

pub fn run(a: &DecomposeArgs) -> Result<()> {
    let config = FitConfig {
        components: a.k,
        restarts: a.restarts,
        max_iters: a.max_iters,
        tol: a.tol,
        seed: a.seed,
        init: match a.init {
            InitArg::Hosvd => Init::Hosvd,
            InitArg::Random => Init::Random,
        },
    };
    let files = a
        .inputs
        .iter()
        .map(|p| TensorFile::load(p))
        .collect::<Result<Vec<_>>>()?;
    for f in &files {
        check_scale_id(f.stack.scale_id())?;
    }
    let (subject_ids, mask, mut stacks) = match &a.mask {
        None => {
            let ids = files[0].subject_ids.clone();
            let stacks = files
                .iter()
                .zip(&a.inputs)
                .map(|(f, p)| {
                    reorder(f, &ids, &p.display().to_string()).map_err(|e| {
                        CliError::Data(format!(
                            "{e}; subject lists differ, pass --mask for missing data"
                        ))
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            (ids, None, stacks)
        }
        Some(path) => {
            let m = read_mask(path)?;
            unique_ids(&m.subject_ids, &path.display().to_string())?;
            let s = m.scale_ids.len();
            let mut bits = Vec::with_capacity(m.subject_ids.len() * files.len());
            let columns = files
                .iter()
                .map(|f| {
                    m.scale_ids
                        .iter()
                        .position(|id| id == f.stack.scale_id())
                        .ok_or_else(|| {
                            CliError::Data(format!(
                                "mask has no column for scale `{}`",
                                f.stack.scale_id()
                            ))
                        })
                })
                .collect::<Result<Vec<_>>>()?;
            for i in 0..m.subject_ids.len() {
                bits.extend(columns.iter().map(|&c| m.bits[i * s + c]));
            }
            let mask = AvailabilityMask::new(m.subject_ids.len(), files.len(), bits)?;
            let stacks = files
                .iter()
                .zip(&a.inputs)
                .enumerate()
                .map(|(j, (f, p))| {
                    let order: Vec<String> = mask
                        .available(j)
                        .iter()
                        .map(|&i| m.subject_ids[i].clone())
                        .collect();
                    reorder(f, &order, &p.display().to_string())
                })
                .collect::<Result<Vec<_>>>()?;
            (m.subject_ids, Some(mask), stacks)
        }
    };
    let nodes: Vec<usize> = stacks.iter().map(|x| x.nodes()).collect();
    config
        .validate(&nodes, subject_ids.len())
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let norms: Vec<f64> = stacks.iter().map(|x| x.frobenius_norm()).collect();
    if a.normalize {
        for x in &mut stacks {
            *x = normalize_stack(x)?.0;
        }
    }
    let decomp = match &mask {
        Some(m) => fit_missing(&stacks, m, &config)?,
        None => multiscale_pca(&stacks, &config)?,
    };
    if let FitStatus::Truncated { requested, fitted } = decomp.status() {
        eprintln!("decompose: residual degenerated after {fitted} of {requested} components");
    }
    create_dir(&a.out)?;
    let scored = mask.as_ref().is_none_or(|m| m.is_complete());
    let k = decomp.components();
    let per_scale: Vec<Option<Vec<f64>>> = stacks
        .iter()
        .map(|x| {
            scored
                .then(|| {
                    (1..=k)
                        .map(|h| cpve(&decomp, std::slice::from_ref(x), h))
                        .collect::<mgpca_core::Result<Vec<_>>>()
                })
                .transpose()
        })
        .collect::<mgpca_core::Result<_>>()?;
    let joint = scored.then(|| {
        (0..k)
            .map(|h| {
                per_scale
                    .iter()
                    .flatten()
                    .map(|c| c[h])
                    .fold(f64::INFINITY, f64::min)
            })
            .collect()
    });
    let stored = StoredFit {
        decomposition: decomp,
        subject_ids,
    };
    stored.save(&a.out)?;
    if a.impute {
        let m = mask.as_ref().expect("clap enforces --mask with --impute");
        for (j, x) in stacks.iter().enumerate() {
            let avail = m.available(j);
            if avail.len() == m.subjects() {
                continue;
            }
            let scale = if a.normalize { norms[j] } else { 1.0 };
            let p = x.nodes();
            let mut values = Vec::with_capacity(p * p * m.subjects());
            for i in 0..m.subjects() {
                match avail.binary_search(&i) {
                    Ok(pos) => values.extend(x.slice(pos).iter().map(|v| v * scale)),
                    Err(_) => values.extend(
                        impute(&stored.decomposition, m, j, i)?
                            .matrix
                            .as_slice()
                            .iter()
                            .map(|v| v * scale),
                    ),
                }
            }
            let full = TensorStack::new(x.scale_id(), p, m.subjects(), values)?;
            let path = a.out.join(format!("imputed_{}.mgpca", x.scale_id()));
            TensorFile::new(full, stored.subject_ids.clone())?.save(&path)?;
        }
    }
    let d = &stored.decomposition;
    let manifest = Manifest {
        command: "decompose",
        inputs: files
            .iter()
            .zip(&a.inputs)
            .map(|(f, p)| InputRecord {
                path: p.display().to_string(),
                scale_id: f.stack.scale_id().into(),
                nodes: f.stack.nodes(),
                subjects: f.stack.subjects(),
            })
            .collect(),
        mask: a.mask.as_ref().map(|p| p.display().to_string()),
        subjects: d.subjects(),
        config: ConfigRecord {
            components: a.k,
            restarts: a.restarts,
            max_iters: a.max_iters,
            tol: a.tol,
            init: match a.init {
                InitArg::Hosvd => "hosvd",
                InitArg::Random => "random",
            },
            normalize: a.normalize,
            impute: a.impute,
            seed: a.seed,
        },
        requested: a.k,
        fitted: k,
        complete: d.status() == FitStatus::Complete,
        cpve: joint,
        scales: stacks
            .iter()
            .zip(norms)
            .zip(per_scale)
            .map(|((x, n), c)| ScaleRecord {
                scale_id: x.scale_id().into(),
                frobenius_norm: n,
                cpve: c,
            })
            .collect(),
        components: d
            .diagnostics()
            .iter()
            .map(|c| ComponentRecord {
                objective: c.objective,
                terms: c.terms.clone(),
                iterations: c.iterations,
                converged: c.converged,
                restart: c.restart,
                objective_trace: c.objective_trace.clone(),
            })
            .collect(),
    };
    write_json(&a.out.join("manifest.json"), &manifest)
}
