//! Planted multi-scale populations and the variance-explained study.
//!
//! Subject factors are standard normal. At each scale the network modes start
//! as Gamma(1, 1) draws, are optionally sparsified by zeroing the smallest
//! entries of each mode, and are then orthonormalized so the planted model
//! satisfies the constraints of the fitted one.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::seq::index;
use rand_distr::{Distribution, Gamma, StandardNormal};

use crate::analysis::variance_explained;
use crate::decomposition::{multiscale_pca, single_scale_pca, FitConfig, ScaleFactors};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::math;
use crate::rng::{self, Rng};
use crate::tensor::{SymmetricMatrix, TensorStack};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Structure {
    Random,
    /// A fraction of the entries of every mode is zeroed before orthonormalization.
    Sparse,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Noise {
    None,
    /// Symmetric Gaussian noise with per-subject sd proportional to the slice range.
    Normal,
    /// A fixed fraction of the off-diagonal entries of every slice is flipped.
    Rademacher,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FlipMode {
    /// `x → −x`.
    SignFlip,
    /// `x → 1 − x`.
    Toggle,
}

impl Structure {
    pub fn name(self) -> &'static str {
        match self {
            Structure::Random => "random",
            Structure::Sparse => "sparse",
        }
    }
}

impl Noise {
    pub fn name(self) -> &'static str {
        match self {
            Noise::None => "none",
            Noise::Normal => "normal",
            Noise::Rademacher => "rademacher",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationConfig {
    /// Node count of each scale.
    pub scales: Vec<usize>,
    pub subjects: usize,
    pub rank: usize,
    pub structure: Structure,
    /// Fraction of each mode zeroed under [`Structure::Sparse`].
    pub sparsity: f64,
    pub noise: Noise,
    /// Noise sd as a fraction of each slice's range (max − min).
    pub sd_fraction: f64,
    /// Fraction of the off-diagonal pairs flipped per subject.
    pub flip_fraction: f64,
    pub flip_mode: FlipMode,
    /// Divide each clean stack by its Frobenius norm before adding noise.
    pub normalize: bool,
    pub seed: u64,
}

impl Default for SimulationConfig {
    fn default() -> Self {
        Self {
            scales: vec![25, 50, 75],
            subjects: 100,
            rank: 10,
            structure: Structure::Random,
            sparsity: 0.75,
            noise: Noise::None,
            sd_fraction: 1.0 / 3.0,
            flip_fraction: 0.25,
            flip_mode: FlipMode::SignFlip,
            normalize: true,
            seed: 0,
        }
    }
}

impl SimulationConfig {
    pub fn validate(&self) -> Result<()> {
        if self.scales.is_empty() || self.scales.contains(&0) {
            return Err(Error::InvalidConfig(
                "every scale needs at least one node".into(),
            ));
        }
        let smallest = self
            .scales
            .iter()
            .copied()
            .min()
            .unwrap_or(0)
            .min(self.subjects);
        if self.rank == 0 || self.rank > smallest {
            return Err(Error::InvalidConfig(format!(
                "rank {} is infeasible for scales {:?} and {} subjects",
                self.rank, self.scales, self.subjects
            )));
        }
        for (name, f) in [
            ("sparsity", self.sparsity),
            ("sd fraction", self.sd_fraction),
            ("flip fraction", self.flip_fraction),
        ] {
            if !(0.0..=1.0).contains(&f) {
                return Err(Error::InvalidConfig(format!(
                    "{name} {f} is outside [0, 1]"
                )));
            }
        }
        Ok(())
    }
}

/// Label of scale `j` with `p` nodes.
pub fn scale_label(j: usize, p: usize) -> String {
    format!("s{}_{p}", j + 1)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticDataset {
    /// Stacks after noise.
    pub stacks: Vec<TensorStack>,
    /// Stacks before noise.
    pub clean: Vec<TensorStack>,
    /// Planted `N×rank` subject factors (unnormalized columns).
    pub factors: Matrix,
    /// Planted modes and weights; weights absorb the normalization.
    pub truth: Vec<ScaleFactors>,
    pub noise: Noise,
}

impl SyntheticDataset {
    /// `Σ_h d_h v_h ∘ v_h ∘ u_h` from the planted factors of scale `j`.
    pub fn planted_stack(&self, j: usize) -> Result<TensorStack> {
        let t = &self.truth[j];
        planted(&t.scale_id, &t.modes, &self.factors, &t.weights)
    }
}

fn planted(
    scale_id: &str,
    modes: &Matrix,
    factors: &Matrix,
    weights: &[f64],
) -> Result<TensorStack> {
    let (p, n, r) = (modes.rows(), factors.rows(), modes.cols());
    let mut values = vec![0.0; p * p * n];
    for i in 0..n {
        let slice = &mut values[i * p * p..(i + 1) * p * p];
        for h in 0..r {
            let c = weights[h] * factors[(i, h)];
            for a in 0..p {
                for b in a..p {
                    slice[a * p + b] += (modes[(a, h)] * modes[(b, h)]) * c;
                }
            }
        }
        for a in 0..p {
            for b in 0..a {
                slice[a * p + b] = slice[b * p + a];
            }
        }
    }
    TensorStack::new(scale_id, p, n, values)
}

fn draw_mode(rng: &mut Rng, p: usize, config: &SimulationConfig) -> Vec<f64> {
    let gamma = Gamma::new(1.0, 1.0).expect("valid shape and scale");
    let mut v: Vec<f64> = (0..p).map(|_| gamma.sample(rng)).collect();
    if config.structure == Structure::Sparse {
        let zero = math::floor(config.sparsity * p as f64) as usize;
        let zero = zero.min(p.saturating_sub(1));
        let mut order: Vec<usize> = (0..p).collect();
        order.sort_by(|&a, &b| v[a].total_cmp(&v[b]).then(a.cmp(&b)));
        for &i in &order[..zero] {
            v[i] = 0.0;
        }
    }
    v
}

/// Orthonormal `p×r` modes from Gamma draws, redrawing any column that falls
/// into the span of the earlier ones.
fn planted_modes(rng: &mut Rng, p: usize, config: &SimulationConfig) -> Result<Matrix> {
    let r = config.rank;
    let mut cols: Vec<Vec<f64>> = Vec::with_capacity(r);
    let mut attempts = 0;
    while cols.len() < r {
        attempts += 1;
        if attempts > 100 * r {
            return Err(Error::Degenerate(
                "could not draw independent network modes".into(),
            ));
        }
        let mut v = draw_mode(rng, p, config);
        let scale = math::norm(&v);
        for _ in 0..2 {
            for c in &cols {
                let proj = math::dot(&v, c);
                for (x, y) in v.iter_mut().zip(c) {
                    *x -= proj * y;
                }
            }
        }
        if math::norm(&v) < 1e-10 * scale.max(1.0) {
            continue;
        }
        math::normalize(&mut v);
        cols.push(v);
    }
    Matrix::from_columns(p, &cols)
}

fn add_normal_noise(x: &TensorStack, fraction: f64, rng: &mut Rng) -> Result<TensorStack> {
    let p = x.nodes();
    let mut values = x.as_slice().to_vec();
    for slice in values.chunks_exact_mut(p * p) {
        let (lo, hi) = slice
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), v| {
                (l.min(*v), h.max(*v))
            });
        let sd = fraction * (hi - lo);
        for a in 0..p {
            for b in a..p {
                let z: f64 = StandardNormal.sample(rng);
                slice[a * p + b] += sd * z;
                slice[b * p + a] = slice[a * p + b];
            }
        }
    }
    TensorStack::new(x.scale_id(), p, x.subjects(), values)
}

fn add_flips(x: &TensorStack, fraction: f64, mode: FlipMode, rng: &mut Rng) -> Result<TensorStack> {
    let p = x.nodes();
    let pairs: Vec<(usize, usize)> = (0..p)
        .flat_map(|a| (a + 1..p).map(move |b| (a, b)))
        .collect();
    let count = math::round(fraction * pairs.len() as f64) as usize;
    let mut values = x.as_slice().to_vec();
    for slice in values.chunks_exact_mut(p * p) {
        for k in index::sample(rng, pairs.len(), count) {
            let (a, b) = pairs[k];
            let old = slice[a * p + b];
            let new = match mode {
                FlipMode::SignFlip => -old,
                FlipMode::Toggle => 1.0 - old,
            };
            slice[a * p + b] = new;
            slice[b * p + a] = new;
        }
    }
    TensorStack::new(x.scale_id(), p, x.subjects(), values)
}

pub fn generate(config: &SimulationConfig) -> Result<SyntheticDataset> {
    config.validate()?;
    let (n, r) = (config.subjects, config.rank);
    let mut urng = rng::stream(config.seed, rng::stream_id(&[0]));
    let factors = Matrix::from_fn(n, r, |_, _| StandardNormal.sample(&mut urng));
    let mut stacks = Vec::with_capacity(config.scales.len());
    let mut clean = Vec::with_capacity(config.scales.len());
    let mut truth = Vec::with_capacity(config.scales.len());
    for (j, &p) in config.scales.iter().enumerate() {
        let id = scale_label(j, p);
        let mut vrng = rng::stream(config.seed, rng::stream_id(&[1, j as u64]));
        let modes = planted_modes(&mut vrng, p, config)?;
        let mut weights = vec![1.0; r];
        let raw = planted(&id, &modes, &factors, &weights)?;
        let x = if config.normalize {
            let norm = raw.frobenius_norm();
            if norm == 0.0 {
                return Err(Error::ZeroTensor);
            }
            for w in &mut weights {
                *w /= norm;
            }
            planted(&id, &modes, &factors, &weights)?
        } else {
            raw
        };
        let mut nrng = rng::stream(config.seed, rng::stream_id(&[2, j as u64]));
        let noisy = match config.noise {
            Noise::None => x.clone(),
            Noise::Normal => add_normal_noise(&x, config.sd_fraction, &mut nrng)?,
            Noise::Rademacher => add_flips(&x, config.flip_fraction, config.flip_mode, &mut nrng)?,
        };
        stacks.push(noisy);
        clean.push(x);
        truth.push(ScaleFactors {
            scale_id: id,
            weights,
            modes,
        });
    }
    Ok(SyntheticDataset {
        stacks,
        clean,
        factors,
        truth,
        noise: config.noise,
    })
}

/// `count` traits `y = Uβ + ε` with `β ~ N(0, I)` and Gaussian `ε` whose
/// standard deviation is `noise` times the sample standard deviation of `Uβ`.
pub fn linear_traits(
    factors: &Matrix,
    count: usize,
    noise: f64,
    seed: u64,
) -> Result<Vec<Vec<f64>>> {
    if !(noise >= 0.0 && noise.is_finite()) {
        return Err(Error::InvalidConfig(format!(
            "trait noise {noise} must be finite and nonnegative"
        )));
    }
    let (n, r) = (factors.rows(), factors.cols());
    if n < 2 || r == 0 {
        return Err(Error::InvalidArgument(
            "need at least two subjects and one factor".into(),
        ));
    }
    (0..count)
        .map(|t| {
            let mut brng = rng::stream(seed, rng::stream_id(&[3, t as u64, 0]));
            let beta: Vec<f64> = (0..r).map(|_| StandardNormal.sample(&mut brng)).collect();
            let signal = factors.matvec(&beta)?;
            let mean = signal.iter().sum::<f64>() / n as f64;
            let sd = math::sqrt(
                signal.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1) as f64,
            );
            let mut erng = rng::stream(seed, rng::stream_id(&[3, t as u64, 1]));
            Ok(signal
                .iter()
                .map(|v| {
                    let z: f64 = StandardNormal.sample(&mut erng);
                    v + noise * sd * z
                })
                .collect())
        })
        .collect()
}

/// Sums the entries of `fine` over node groups; self-connections are dropped.
///
/// `partition[a]` is the group of fine node `a`; every group in `0..groups`
/// must be used.
pub fn coarsen(
    fine: &SymmetricMatrix,
    partition: &[usize],
    groups: usize,
) -> Result<SymmetricMatrix> {
    let p = fine.dim();
    if partition.len() != p {
        return Err(Error::InvalidArgument(format!(
            "partition covers {} of {p} nodes",
            partition.len()
        )));
    }
    if let Some(g) = partition.iter().find(|&&g| g >= groups) {
        return Err(Error::InvalidArgument(format!("group {g} is out of range")));
    }
    if let Some(g) = (0..groups).find(|g| !partition.contains(g)) {
        return Err(Error::InvalidArgument(format!("group {g} is empty")));
    }
    let mut out = vec![0.0; groups * groups];
    for a in 0..p {
        for b in 0..p {
            let (ga, gb) = (partition[a], partition[b]);
            if ga != gb {
                out[ga * groups + gb] += fine.get(a, b);
            }
        }
    }
    SymmetricMatrix::symmetrize(&Matrix::from_row_major(groups, groups, out)?)
}

#[derive(Debug, Clone, PartialEq)]
pub struct StudyConfig {
    /// Shared settings; structure, noise and seed come from the grid.
    pub base: SimulationConfig,
    pub structures: Vec<Structure>,
    pub noises: Vec<Noise>,
    pub repetitions: usize,
    /// Components fitted; every prefix `1..=max_k` is scored.
    pub max_k: usize,
    pub restarts: usize,
    pub seed: u64,
}

impl Default for StudyConfig {
    fn default() -> Self {
        Self {
            base: SimulationConfig::default(),
            structures: vec![Structure::Random, Structure::Sparse],
            noises: vec![Noise::Normal, Noise::Rademacher],
            repetitions: 10,
            max_k: 10,
            restarts: FitConfig::DEFAULT_RESTARTS,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StudyRow {
    pub structure: Structure,
    pub noise: Noise,
    pub k: usize,
    /// `"multi"` or a scale label.
    pub method: String,
    /// Mean over the repetitions that produced `k` components.
    pub mean_ve: Option<f64>,
    /// Sample standard deviation over the same repetitions.
    pub sd_ve: Option<f64>,
    pub failures: usize,
}

/// Variance explained of fitted against planted factors over the grid.
///
/// Each repetition fits the joint model and every single scale once with
/// `max_k` components and scores each leading prefix.
pub fn run_study(config: &StudyConfig) -> Result<Vec<StudyRow>> {
    if config.repetitions == 0 || config.max_k == 0 {
        return Err(Error::InvalidConfig(
            "repetitions and max_k must be positive".into(),
        ));
    }
    let methods: Vec<String> = core::iter::once(String::from("multi"))
        .chain(
            config
                .base
                .scales
                .iter()
                .enumerate()
                .map(|(j, &p)| scale_label(j, p)),
        )
        .collect();
    let mut rows = Vec::new();
    for (si, &structure) in config.structures.iter().enumerate() {
        for (ni, &noise) in config.noises.iter().enumerate() {
            // scores[method][k-1] collects one value per successful repetition.
            let mut scores: Vec<Vec<Vec<f64>>> =
                vec![vec![Vec::new(); config.max_k]; methods.len()];
            let mut failures = vec![vec![0usize; config.max_k]; methods.len()];
            for rep in 0..config.repetitions {
                let seed = rng::derive_seed(config.seed, &[si as u64, ni as u64, rep as u64]);
                let sim = SimulationConfig {
                    structure,
                    noise,
                    seed,
                    ..config.base.clone()
                };
                let fit_config = FitConfig::new(config.max_k)
                    .with_seed(seed)
                    .with_restarts(config.restarts);
                let data = match generate(&sim) {
                    Ok(d) => d,
                    Err(_) => {
                        failures.iter_mut().flatten().for_each(|f| *f += 1);
                        continue;
                    }
                };
                for (m, _) in methods.iter().enumerate() {
                    let fit = if m == 0 {
                        multiscale_pca(&data.stacks, &fit_config)
                    } else {
                        single_scale_pca(&data.stacks[m - 1], &fit_config)
                    };
                    for k in 1..=config.max_k {
                        let ve = fit.as_ref().ok().and_then(|f| {
                            (f.components() >= k)
                                .then(|| {
                                    variance_explained(
                                        &f.factors().leading_columns(k),
                                        &data.factors,
                                    )
                                    .ok()
                                })
                                .flatten()
                        });
                        match ve {
                            Some(v) => scores[m][k - 1].push(v),
                            None => failures[m][k - 1] += 1,
                        }
                    }
                }
            }
            for k in 1..=config.max_k {
                for (m, method) in methods.iter().enumerate() {
                    let s = &scores[m][k - 1];
                    let mean = (!s.is_empty()).then(|| s.iter().sum::<f64>() / s.len() as f64);
                    let sd = mean.filter(|_| s.len() > 1).map(|mu| {
                        math::sqrt(
                            s.iter().map(|v| (v - mu) * (v - mu)).sum::<f64>()
                                / (s.len() - 1) as f64,
                        )
                    });
                    rows.push(StudyRow {
                        structure,
                        noise,
                        k,
                        method: method.clone(),
                        mean_ve: mean,
                        sd_ve: sd,
                        failures: failures[m][k - 1],
                    });
                }
            }
        }
    }
    Ok(rows)
}
