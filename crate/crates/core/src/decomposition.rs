//! Greedy multi-scale decomposition by alternating rank-one updates.
//!
//! Component `h` maximizes `Σ_j (X̂^(j) ×₁ P_j v_j ×₂ P_j v_j ×₃ u)²` over unit
//! `u` and unit `v_j`, where `X̂^(j)` is the residual after `h − 1` deflations
//! and `P_j` projects away the modes already found at scale `j`.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand_distr::{Distribution, StandardNormal};

use crate::eigen::{self, Target};
use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};
use crate::math;
use crate::missing::MaskedLayout;
use crate::rng;
use crate::tensor::{rank_one_tensor, Projector, SymmetricMatrix, TensorStack};

/// How the first restart of each component is seeded.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Init {
    /// Leading direction of the projected mode-1 unfolding at each scale.
    Hosvd,
    /// Projected standard normal vectors.
    Random,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitConfig {
    /// Number of components `K`.
    pub components: usize,
    /// Starts per component, the kept one having the largest objective.
    pub restarts: usize,
    pub max_iters: usize,
    /// Relative change of the objective below which a fit counts as converged.
    pub tol: f64,
    pub seed: u64,
    pub init: Init,
}

impl FitConfig {
    pub const DEFAULT_RESTARTS: usize = 5;
    pub const DEFAULT_MAX_ITERS: usize = 200;
    pub const DEFAULT_TOL: f64 = 1e-8;

    pub fn new(components: usize) -> Self {
        Self {
            components,
            restarts: Self::DEFAULT_RESTARTS,
            max_iters: Self::DEFAULT_MAX_ITERS,
            tol: Self::DEFAULT_TOL,
            seed: 0,
            init: Init::Hosvd,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_restarts(mut self, restarts: usize) -> Self {
        self.restarts = restarts;
        self
    }

    pub fn with_init(mut self, init: Init) -> Self {
        self.init = init;
        self
    }

    fn check_numbers(&self) -> Result<()> {
        if self.components == 0 {
            return Err(Error::InvalidConfig(
                "at least one component is required".into(),
            ));
        }
        if self.restarts == 0 {
            return Err(Error::InvalidConfig("restarts must be positive".into()));
        }
        if self.max_iters == 0 {
            return Err(Error::InvalidConfig("max_iters must be positive".into()));
        }
        if !(self.tol >= 0.0 && self.tol.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "tolerance {} is not usable",
                self.tol
            )));
        }
        Ok(())
    }

    /// Checks `K ≤ min_j P_j` and `K ≤ N` along with the scalar settings.
    pub fn validate(&self, nodes: &[usize], subjects: usize) -> Result<()> {
        self.check_numbers()?;
        if let Some(&p) = nodes.iter().min() {
            if self.components > p {
                return Err(Error::InvalidConfig(format!(
                    "{} components exceed the smallest scale ({p} nodes)",
                    self.components
                )));
            }
        }
        if self.components > subjects {
            return Err(Error::InvalidConfig(format!(
                "{} components exceed the {subjects} subjects",
                self.components
            )));
        }
        Ok(())
    }
}

/// Weights and network modes of one scale.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaleFactors {
    pub scale_id: String,
    /// `d_h`, one per component; may be negative.
    pub weights: Vec<f64>,
    /// `P×K` matrix whose columns are the orthonormal modes `v_h`.
    pub modes: Matrix,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComponentDiagnostics {
    /// Objective after each full sweep of updates.
    pub objective_trace: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    /// Index of the restart that produced the kept solution.
    pub restart: usize,
    pub objective: f64,
    /// `(X̂^(j) ×₁ v_j ×₂ v_j ×₃ u)²` per scale at the final iterate.
    pub terms: Vec<f64>,
}

/// One extracted component before deflation.
#[derive(Debug, Clone, PartialEq)]
pub struct ComponentFit {
    pub u: Vec<f64>,
    pub v: Vec<Vec<f64>>,
    pub diagnostics: ComponentDiagnostics,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FitStatus {
    Complete,
    /// The residual became degenerate before `requested` components were found.
    Truncated {
        requested: usize,
        fitted: usize,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct KruskalDecomposition {
    scales: Vec<ScaleFactors>,
    factors: Matrix,
    diagnostics: Vec<ComponentDiagnostics>,
    status: FitStatus,
}

impl KruskalDecomposition {
    /// Assembles a decomposition from stored factors, checking unit columns
    /// (`1e-8`) and within-scale orthogonality (`1e-6`).
    pub fn from_parts(
        scales: Vec<ScaleFactors>,
        factors: Matrix,
        diagnostics: Vec<ComponentDiagnostics>,
        status: FitStatus,
    ) -> Result<Self> {
        let k = factors.cols();
        check_unit_columns(&factors, "U")?;
        for s in &scales {
            if s.weights.len() != k || s.modes.cols() != k {
                return Err(Error::DimensionMismatch(format!(
                    "scale {} has {} weights and {} modes for {k} components",
                    s.scale_id,
                    s.weights.len(),
                    s.modes.cols()
                )));
            }
            if !s.modes.is_finite() || s.weights.iter().any(|d| !d.is_finite()) {
                return Err(Error::NonFinite);
            }
            check_unit_columns(&s.modes, &s.scale_id)?;
            let g = s.modes.gram();
            for a in 0..k {
                for b in 0..a {
                    if g[(a, b)].abs() > 1e-6 {
                        return Err(Error::InvalidArgument(format!(
                            "modes {b} and {a} of scale {} are not orthogonal",
                            s.scale_id
                        )));
                    }
                }
            }
        }
        if !diagnostics.is_empty() && diagnostics.len() != k {
            return Err(Error::DimensionMismatch(
                "one diagnostics entry per component".into(),
            ));
        }
        Ok(Self {
            scales,
            factors,
            diagnostics,
            status,
        })
    }

    pub fn components(&self) -> usize {
        self.factors.cols()
    }

    pub fn subjects(&self) -> usize {
        self.factors.rows()
    }

    pub fn scales(&self) -> &[ScaleFactors] {
        &self.scales
    }

    pub fn scale(&self, scale_id: &str) -> Result<&ScaleFactors> {
        self.scales
            .iter()
            .find(|s| s.scale_id == scale_id)
            .ok_or_else(|| Error::UnknownScale(scale_id.into()))
    }

    /// Shared `N×K` subject factors `U`.
    pub fn factors(&self) -> &Matrix {
        &self.factors
    }

    pub fn diagnostics(&self) -> &[ComponentDiagnostics] {
        &self.diagnostics
    }

    pub fn status(&self) -> FitStatus {
        self.status
    }
}

fn check_unit_columns(m: &Matrix, what: &str) -> Result<()> {
    for h in 0..m.cols() {
        let n = math::norm(&m.column(h));
        if (n - 1.0).abs() > 1e-8 {
            return Err(Error::InvalidArgument(format!(
                "column {h} of {what} has norm {n}"
            )));
        }
    }
    Ok(())
}

/// Divides a stack by its Frobenius norm, returning the norm.
pub fn normalize_stack(x: &TensorStack) -> Result<(TensorStack, f64)> {
    let n = x.frobenius_norm();
    if n == 0.0 {
        return Err(Error::ZeroTensor);
    }
    Ok((x.scaled(1.0 / n), n))
}

/// Leading left singular direction of `x ×₁ P ×₂ P` unfolded along mode 1.
pub fn hosvd_init(x: &TensorStack, projection: &Projector) -> Result<Vec<f64>> {
    let p = x.nodes();
    if projection.dim() != p {
        return Err(Error::DimensionMismatch(format!(
            "{}-dimensional projector for a {p}-node stack",
            projection.dim()
        )));
    }
    if x.frobenius_norm() == 0.0 {
        return Err(Error::ZeroTensor);
    }
    let mut gram = vec![0.0; p * p];
    for i in 0..x.subjects() {
        let m = projection.sandwich(&x.slice_matrix(i));
        let m = m.as_slice();
        for a in 0..p {
            let ra = &m[a * p..(a + 1) * p];
            for b in a..p {
                gram[a * p + b] += math::dot(ra, &m[b * p..(b + 1) * p]);
            }
        }
    }
    for a in 0..p {
        for b in 0..a {
            gram[a * p + b] = gram[b * p + a];
        }
    }
    if gram.iter().all(|g| *g == 0.0) {
        return Err(Error::DegenerateProjection);
    }
    let top = eigen::extremal_eigenpair(&gram, p, Target::Largest)?;
    let mut v = projection.apply(&top.vector);
    math::normalize(&mut v).ok_or(Error::DegenerateProjection)?;
    math::canonical_sign(&mut v);
    Ok(v)
}

/// Top eigenvector of `Σ_j g_j g_jᵀ` with `g_j = X^(j) ×₁ P_j v_j ×₂ P_j v_j`.
pub fn update_u(
    stacks: &[TensorStack],
    v: &[Vec<f64>],
    projectors: &[Projector],
) -> Result<Vec<f64>> {
    if stacks.is_empty() || stacks.len() != v.len() || stacks.len() != projectors.len() {
        return Err(Error::DimensionMismatch(
            "one mode and one projector per stack".into(),
        ));
    }
    let n = stacks[0].subjects();
    let mut gs = Vec::with_capacity(stacks.len());
    for ((x, vj), pj) in stacks.iter().zip(v).zip(projectors) {
        if x.subjects() != n {
            return Err(Error::DimensionMismatch(
                "stacks differ in subject count".into(),
            ));
        }
        if pj.dim() != x.nodes() {
            return Err(Error::DimensionMismatch("projector size".into()));
        }
        if vj.len() != x.nodes() {
            return Err(Error::DimensionMismatch("mode length".into()));
        }
        gs.push(x.quadratic_forms(&pj.apply(vj))?);
    }
    u_from_forms(&gs)
}

/// Top eigenvector of `G Gᵀ` for `G = [g_1 … g_R]`, found through `GᵀG`.
pub(crate) fn u_from_forms(gs: &[Vec<f64>]) -> Result<Vec<f64>> {
    let n = gs[0].len();
    let g = Matrix::from_columns(n, gs)?;
    let gram = g.gram();
    if gram.as_slice().iter().all(|x| *x == 0.0) {
        return Err(Error::DegenerateProjection);
    }
    let y = eigen::extremal_of(&gram, Target::Largest)?;
    let mut u = g.matvec(&y.vector)?;
    math::normalize(&mut u).ok_or(Error::DegenerateProjection)?;
    math::canonical_sign(&mut u);
    Ok(u)
}

/// Dominant eigenvector of `P (X ×₃ u) P`.
///
/// The dominant rather than the largest eigenvalue is taken because the
/// objective depends on `(vᵀ P (X ×₃ u) P v)²`.
pub fn update_v(x: &TensorStack, u: &[f64], projector: &Projector) -> Result<Vec<f64>> {
    if projector.dim() != x.nodes() {
        return Err(Error::DimensionMismatch("projector size".into()));
    }
    let a = x.contract_subjects(u)?;
    let scale = a.frobenius_norm();
    if scale == 0.0 {
        return Err(Error::DegenerateProjection);
    }
    let b = projector.sandwich(&a);
    if b.frobenius_norm() <= 1e-12 * scale {
        return Err(Error::DegenerateProjection);
    }
    Ok(eigen::eig_dominant(&b)?.vector)
}

/// Subject layout of the stacks handed to the engine.
#[derive(Clone, Copy)]
pub(crate) enum Layout<'a> {
    /// Every stack holds all `N` subjects in the same order.
    Complete,
    /// Stack `j` holds only the subjects available at scale `j`.
    Masked(&'a MaskedLayout),
}

impl Layout<'_> {
    fn restrict(&self, u: &[f64], j: usize) -> Vec<f64> {
        match self {
            Layout::Complete => u.to_vec(),
            Layout::Masked(m) => m.members(j).iter().map(|&i| u[i]).collect(),
        }
    }

    fn update_u(&self, gs: &[Vec<f64>], previous: Option<&[f64]>) -> Result<Vec<f64>> {
        match self {
            Layout::Complete => u_from_forms(gs),
            Layout::Masked(m) => m.update_u(gs, previous),
        }
    }

    fn is_partial(&self, j: usize) -> bool {
        match self {
            Layout::Complete => false,
            Layout::Masked(m) => m.members(j).len() != m.subjects(),
        }
    }
}

fn forms(residuals: &[TensorStack], v: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    residuals
        .iter()
        .zip(v)
        .map(|(x, vj)| x.quadratic_forms(vj))
        .collect()
}

fn is_degenerate(e: &Error) -> bool {
    matches!(
        e,
        Error::DegenerateProjection | Error::ZeroTensor | Error::Degenerate(_)
    )
}

/// Fits component `component` (0-based) on the current residuals.
///
/// Restart 0 starts from [`hosvd_init`] when `config.init` is [`Init::Hosvd`];
/// every other restart starts from projected random vectors. The restart with
/// the highest final objective is kept, the earliest one on ties.
pub fn fit_component(
    residuals: &[TensorStack],
    projectors: &[Projector],
    config: &FitConfig,
    component: usize,
) -> Result<ComponentFit> {
    if residuals.is_empty() || residuals.len() != projectors.len() {
        return Err(Error::DimensionMismatch("one projector per stack".into()));
    }
    let n = residuals[0].subjects();
    if residuals.iter().any(|x| x.subjects() != n) {
        return Err(Error::DimensionMismatch(
            "stacks differ in subject count".into(),
        ));
    }
    config.check_numbers()?;
    fit_component_in(residuals, projectors, Layout::Complete, config, component)
}

pub(crate) fn fit_component_in(
    residuals: &[TensorStack],
    projectors: &[Projector],
    layout: Layout<'_>,
    config: &FitConfig,
    component: usize,
) -> Result<ComponentFit> {
    let mut best: Option<ComponentFit> = None;
    let mut first_error = None;
    for restart in 0..config.restarts {
        let start = if restart == 0 && config.init == Init::Hosvd {
            residuals
                .iter()
                .zip(projectors)
                .map(|(x, p)| hosvd_init(x, p))
                .collect::<Result<Vec<_>>>()
        } else {
            random_start(residuals, projectors, config.seed, component, restart)
        };
        let run = start.and_then(|v| ascend(residuals, projectors, layout, config, v, restart));
        match run {
            Ok(fit) => {
                if best
                    .as_ref()
                    .is_none_or(|b| fit.diagnostics.objective > b.diagnostics.objective)
                {
                    best = Some(fit);
                }
            }
            Err(e) if is_degenerate(&e) => {
                first_error.get_or_insert(e);
            }
            Err(e) => return Err(e),
        }
    }
    best.ok_or_else(|| first_error.unwrap_or(Error::DegenerateProjection))
}

fn random_start(
    residuals: &[TensorStack],
    projectors: &[Projector],
    seed: u64,
    component: usize,
    restart: usize,
) -> Result<Vec<Vec<f64>>> {
    let mut rng = rng::stream(seed, rng::stream_id(&[component as u64, restart as u64]));
    residuals
        .iter()
        .zip(projectors)
        .map(|(x, p)| {
            let draw: Vec<f64> = (0..x.nodes())
                .map(|_| StandardNormal.sample(&mut rng))
                .collect();
            let mut v = p.apply(&draw);
            math::normalize(&mut v).ok_or(Error::DegenerateProjection)?;
            Ok(v)
        })
        .collect()
}

fn ascend(
    residuals: &[TensorStack],
    projectors: &[Projector],
    layout: Layout<'_>,
    config: &FitConfig,
    mut v: Vec<Vec<f64>>,
    restart: usize,
) -> Result<ComponentFit> {
    let mut gs = forms(residuals, &v)?;
    let mut u: Vec<f64> = Vec::new();
    let mut trace = Vec::new();
    let mut terms = Vec::new();
    let mut converged = false;
    for _ in 0..config.max_iters {
        u = layout.update_u(&gs, (!u.is_empty()).then_some(u.as_slice()))?;
        let restricted: Vec<Vec<f64>> = (0..residuals.len())
            .map(|j| layout.restrict(&u, j))
            .collect();
        for (j, x) in residuals.iter().enumerate() {
            v[j] = update_v(x, &restricted[j], &projectors[j])?;
        }
        gs = forms(residuals, &v)?;
        terms = gs
            .iter()
            .zip(&restricted)
            .map(|(g, uj)| {
                let c = math::dot(g, uj);
                c * c
            })
            .collect();
        let objective: f64 = terms.iter().sum();
        let previous = trace.last().copied();
        trace.push(objective);
        if let Some(prev) = previous {
            if (objective - prev).abs() <= config.tol * prev.abs() {
                converged = true;
                break;
            }
        }
    }
    let objective = *trace.last().expect("at least one iteration");
    Ok(ComponentFit {
        u,
        v,
        diagnostics: ComponentDiagnostics {
            iterations: trace.len(),
            objective_trace: trace,
            converged,
            restart,
            objective,
            terms,
        },
    })
}

/// Joint decomposition of stacks that share their subjects.
pub fn multiscale_pca(data: &[TensorStack], config: &FitConfig) -> Result<KruskalDecomposition> {
    if data.is_empty() {
        return Err(Error::InvalidArgument("no stacks given".into()));
    }
    let n = data[0].subjects();
    if data.iter().any(|x| x.subjects() != n) {
        return Err(Error::DimensionMismatch(
            "stacks differ in subject count".into(),
        ));
    }
    let nodes: Vec<usize> = data.iter().map(|x| x.nodes()).collect();
    config.validate(&nodes, n)?;
    fit_in(data, Layout::Complete, n, config)
}

/// The one-scale case, the baseline against which joint fits are compared.
pub fn single_scale_pca(x: &TensorStack, config: &FitConfig) -> Result<KruskalDecomposition> {
    multiscale_pca(core::slice::from_ref(x), config)
}

pub(crate) fn fit_in(
    data: &[TensorStack],
    layout: Layout<'_>,
    subjects: usize,
    config: &FitConfig,
) -> Result<KruskalDecomposition> {
    for (a, x) in data.iter().enumerate() {
        if data[..a].iter().any(|y| y.scale_id() == x.scale_id()) {
            return Err(Error::InvalidArgument(format!(
                "scale id `{}` appears twice",
                x.scale_id()
            )));
        }
    }
    let original: Vec<f64> = data.iter().map(|x| x.frobenius_norm()).collect();
    let mut residuals: Vec<TensorStack> = data.to_vec();
    let mut projectors: Vec<Projector> = data
        .iter()
        .map(|x| Projector::identity(x.nodes()))
        .collect();
    let mut modes: Vec<Vec<Vec<f64>>> = vec![Vec::new(); data.len()];
    let mut weights: Vec<Vec<f64>> = vec![Vec::new(); data.len()];
    let mut factors: Vec<Vec<f64>> = Vec::new();
    let mut diagnostics = Vec::new();

    'components: for h in 0..config.components {
        let exhausted = residuals
            .iter()
            .zip(&original)
            .any(|(r, &x)| r.frobenius_norm() <= 1e-10 * x);
        if exhausted {
            break;
        }
        let fit = match fit_component_in(&residuals, &projectors, layout, config, h) {
            Ok(fit) => fit,
            Err(e) if is_degenerate(&e) => break,
            Err(e) => return Err(e),
        };
        let mut vs = Vec::with_capacity(data.len());
        for (j, vj) in fit.v.iter().enumerate() {
            let mut v = projectors[j].apply(vj);
            if math::normalize(&mut v).is_none() {
                break 'components;
            }
            vs.push(v);
        }
        for (j, v) in vs.into_iter().enumerate() {
            let uj = layout.restrict(&fit.u, j);
            let mut d = math::dot(&residuals[j].quadratic_forms(&v)?, &uj);
            if layout.is_partial(j) {
                let mass = math::dot(&uj, &uj);
                d = if mass > 0.0 { d / mass } else { 0.0 };
            }
            residuals[j].subtract_rank_one(&v, &uj, d)?;
            modes[j].push(v);
            weights[j].push(d);
            let basis = Matrix::from_columns(data[j].nodes(), &modes[j])?;
            projectors[j] = Projector::complement(&basis)?;
        }
        factors.push(fit.u);
        diagnostics.push(fit.diagnostics);
    }

    let fitted = factors.len();
    let status = if fitted == config.components {
        FitStatus::Complete
    } else {
        FitStatus::Truncated {
            requested: config.components,
            fitted,
        }
    };
    let scales = data
        .iter()
        .zip(modes)
        .zip(weights)
        .map(|((x, m), w)| {
            Ok(ScaleFactors {
                scale_id: x.scale_id().into(),
                weights: w,
                modes: Matrix::from_columns(x.nodes(), &m)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(KruskalDecomposition {
        scales,
        factors: Matrix::from_columns(subjects, &factors)?,
        diagnostics,
        status,
    })
}

/// Cumulative proportion of variance explained by the first `k` components:
/// the smallest over scales of `‖X ×₁ P_V ×₂ P_V ×₃ P_U‖ / ‖X‖`, with `P_V`
/// and `P_U` the projectors onto the first `k` columns of `V^(j)` and `U`.
pub fn cpve(decomp: &KruskalDecomposition, data: &[TensorStack], k: usize) -> Result<f64> {
    if k == 0 || k > decomp.components() {
        return Err(Error::InvalidArgument(format!(
            "k = {k} outside 1..={}",
            decomp.components()
        )));
    }
    let qu = linalg::orthonormal_basis(&decomp.factors.leading_columns(k))?;
    let mut best = f64::INFINITY;
    for x in data {
        let s = decomp.scale(x.scale_id())?;
        if x.nodes() != s.modes.rows() || x.subjects() != decomp.subjects() {
            return Err(Error::DimensionMismatch(format!(
                "stack {} does not match the decomposition",
                x.scale_id()
            )));
        }
        let total = x.frobenius_norm();
        if total == 0.0 {
            return Err(Error::ZeroTensor);
        }
        let qv = linalg::orthonormal_basis(&s.modes.leading_columns(k))?;
        let core = projected_core(x, &qv, &qu);
        best = best.min(math::norm(&core) / total);
    }
    Ok(best)
}

/// `X ×₁ Qᵥᵀ ×₂ Qᵥᵀ ×₃ Qᵤᵀ` flattened, for orthonormal `Qᵥ` (`P×k`) and `Qᵤ` (`N×k`).
fn projected_core(x: &TensorStack, qv: &Matrix, qu: &Matrix) -> Vec<f64> {
    let (p, k) = (qv.rows(), qv.cols());
    let mut core = vec![0.0; k * k * qu.cols()];
    let mut xq = Matrix::zeros(p, k);
    for i in 0..x.subjects() {
        let slice = x.slice(i);
        for a in 0..p {
            let row = &slice[a * p..(a + 1) * p];
            for c in 0..k {
                xq[(a, c)] = (0..p).map(|b| row[b] * qv[(b, c)]).sum();
            }
        }
        let m = qv.transpose().matmul(&xq).expect("shapes agree");
        for l in 0..qu.cols() {
            let w = qu[(i, l)];
            for (o, v) in core[l * k * k..(l + 1) * k * k]
                .iter_mut()
                .zip(m.as_slice())
            {
                *o += w * v;
            }
        }
    }
    core
}

/// `Σ_{h<k} d_h v_h ∘ v_h ∘ u_h` at one scale.
pub fn reconstruct(decomp: &KruskalDecomposition, scale_id: &str, k: usize) -> Result<TensorStack> {
    let s = decomp.scale(scale_id)?;
    if k > decomp.components() {
        return Err(Error::InvalidArgument(format!(
            "k = {k} exceeds the {} fitted components",
            decomp.components()
        )));
    }
    let p = s.modes.rows();
    let mut out = TensorStack::zeros(scale_id, p, decomp.subjects());
    for h in 0..k {
        let term = rank_one_tensor(&s.modes.column(h), &decomp.factors.column(h), s.weights[h]);
        let mut values = out.as_slice().to_vec();
        for (o, t) in values.iter_mut().zip(term.as_slice()) {
            *o += t;
        }
        out = TensorStack::new(scale_id, p, decomp.subjects(), values)?;
    }
    Ok(out)
}

/// `Σ_h d_h u_{ih} v_h v_hᵀ` for one subject at one scale.
pub(crate) fn subject_slice(s: &ScaleFactors, u_row: &[f64]) -> SymmetricMatrix {
    let p = s.modes.rows();
    let coef: Vec<f64> = s.weights.iter().zip(u_row).map(|(d, u)| d * u).collect();
    SymmetricMatrix::from_upper_fn(p, |a, b| {
        (0..coef.len())
            .map(|h| (s.modes[(a, h)] * s.modes[(b, h)]) * coef[h])
            .sum()
    })
}
