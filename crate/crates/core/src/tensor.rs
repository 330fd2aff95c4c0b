//! Semi-symmetric adjacency stacks and the multilinear algebra on them.
//!
//! A [`TensorStack`] holds `N` symmetric `P×P` slices, one per subject, stored
//! slice after slice with each slice row-major. Entry `[a, b, i]` lives at
//! `i·P² + a·P + b`.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::math;

/// Dense symmetric matrix, stored in full with both triangles bitwise equal.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricMatrix {
    n: usize,
    data: Vec<f64>,
}

impl SymmetricMatrix {
    /// Wraps row-major values, rejecting anything not exactly symmetric.
    pub fn new(n: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != n * n {
            return Err(Error::DimensionMismatch(format!(
                "{} values for a {n}x{n} matrix",
                data.len()
            )));
        }
        if data.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite);
        }
        for a in 0..n {
            for b in 0..a {
                if data[a * n + b] != data[b * n + a] {
                    return Err(Error::NotSymmetric);
                }
            }
        }
        Ok(Self { n, data })
    }

    /// Averages the two triangles.
    pub fn symmetrize(m: &Matrix) -> Result<Self> {
        let n = m.rows();
        if m.cols() != n {
            return Err(Error::DimensionMismatch("non-square matrix".into()));
        }
        if !m.is_finite() {
            return Err(Error::NonFinite);
        }
        let mut data = m.as_slice().to_vec();
        for a in 0..n {
            for b in 0..a {
                let s = 0.5 * (data[a * n + b] + data[b * n + a]);
                data[a * n + b] = s;
                data[b * n + a] = s;
            }
        }
        Ok(Self { n, data })
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    pub fn from_diagonal(d: &[f64]) -> Self {
        let mut m = Self::zeros(d.len());
        for (i, x) in d.iter().enumerate() {
            m.data[i * d.len() + i] = *x;
        }
        m
    }

    /// Builds from the upper triangle (including the diagonal) of `f(a, b)`.
    pub fn from_upper_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = vec![0.0; n * n];
        for a in 0..n {
            for b in a..n {
                let x = f(a, b);
                data[a * n + b] = x;
                data[b * n + a] = x;
            }
        }
        Self { n, data }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, a: usize, b: usize) -> f64 {
        self.data[a * self.n + b]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn to_matrix(&self) -> Matrix {
        Matrix::from_row_major(self.n, self.n, self.data.clone()).expect("square storage")
    }

    pub fn frobenius_norm(&self) -> f64 {
        math::norm(&self.data)
    }

    pub fn quadratic_form(&self, w: &[f64]) -> f64 {
        assert_eq!(w.len(), self.n);
        let mut acc = 0.0;
        for a in 0..self.n {
            acc += w[a] * math::dot(&self.data[a * self.n..(a + 1) * self.n], w);
        }
        acc
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            n: self.n,
            data: self.data.iter().map(|x| x * s).collect(),
        }
    }
}

/// Stack of `N` symmetric `P×P` adjacency matrices for one parcellation scale.
#[derive(Debug, Clone, PartialEq)]
pub struct TensorStack {
    scale_id: String,
    nodes: usize,
    subjects: usize,
    values: Vec<f64>,
}

impl TensorStack {
    /// Rejects values that are non-finite or whose slices are not exactly symmetric.
    pub fn new(
        scale_id: impl Into<String>,
        nodes: usize,
        subjects: usize,
        values: Vec<f64>,
    ) -> Result<Self> {
        if values.len() != nodes * nodes * subjects {
            return Err(Error::DimensionMismatch(format!(
                "{} values for a {nodes}x{nodes}x{subjects} stack",
                values.len()
            )));
        }
        if values.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite);
        }
        for slice in values.chunks_exact(nodes * nodes.max(1)) {
            for a in 0..nodes {
                for b in 0..a {
                    if slice[a * nodes + b] != slice[b * nodes + a] {
                        return Err(Error::NotSymmetric);
                    }
                }
            }
        }
        Ok(Self {
            scale_id: scale_id.into(),
            nodes,
            subjects,
            values,
        })
    }

    /// Like [`TensorStack::new`] but averages the triangles of each slice.
    pub fn symmetrized(
        scale_id: impl Into<String>,
        nodes: usize,
        subjects: usize,
        mut values: Vec<f64>,
    ) -> Result<Self> {
        if values.len() != nodes * nodes * subjects {
            return Err(Error::DimensionMismatch(format!(
                "{} values for a {nodes}x{nodes}x{subjects} stack",
                values.len()
            )));
        }
        for slice in values.chunks_exact_mut(nodes * nodes.max(1)) {
            for a in 0..nodes {
                for b in 0..a {
                    let s = 0.5 * (slice[a * nodes + b] + slice[b * nodes + a]);
                    slice[a * nodes + b] = s;
                    slice[b * nodes + a] = s;
                }
            }
        }
        Self::new(scale_id, nodes, subjects, values)
    }

    pub fn from_slices(scale_id: impl Into<String>, slices: &[SymmetricMatrix]) -> Result<Self> {
        let nodes = slices.first().map_or(0, |s| s.dim());
        if slices.iter().any(|s| s.dim() != nodes) {
            return Err(Error::DimensionMismatch("slices of different sizes".into()));
        }
        let mut values = Vec::with_capacity(nodes * nodes * slices.len());
        for s in slices {
            values.extend_from_slice(s.as_slice());
        }
        Ok(Self {
            scale_id: scale_id.into(),
            nodes,
            subjects: slices.len(),
            values,
        })
    }

    pub fn zeros(scale_id: impl Into<String>, nodes: usize, subjects: usize) -> Self {
        Self {
            scale_id: scale_id.into(),
            nodes,
            subjects,
            values: vec![0.0; nodes * nodes * subjects],
        }
    }

    pub fn scale_id(&self) -> &str {
        &self.scale_id
    }

    pub fn with_scale_id(mut self, scale_id: impl Into<String>) -> Self {
        self.scale_id = scale_id.into();
        self
    }

    /// `P`, the node count.
    pub fn nodes(&self) -> usize {
        self.nodes
    }

    /// `N`, the subject count.
    pub fn subjects(&self) -> usize {
        self.subjects
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    pub fn get(&self, a: usize, b: usize, i: usize) -> f64 {
        self.values[(i * self.nodes + a) * self.nodes + b]
    }

    /// Row-major values of subject `i`'s adjacency matrix.
    pub fn slice(&self, i: usize) -> &[f64] {
        let p2 = self.nodes * self.nodes;
        &self.values[i * p2..(i + 1) * p2]
    }

    pub fn slice_matrix(&self, i: usize) -> SymmetricMatrix {
        SymmetricMatrix {
            n: self.nodes,
            data: self.slice(i).to_vec(),
        }
    }

    /// Sub-stack of the listed subjects, in the listed order.
    pub fn select_subjects(&self, subjects: &[usize]) -> Result<Self> {
        if let Some(&bad) = subjects.iter().find(|&&i| i >= self.subjects) {
            return Err(Error::DimensionMismatch(format!(
                "subject {bad} out of range for a stack of {}",
                self.subjects
            )));
        }
        let mut values = Vec::with_capacity(self.nodes * self.nodes * subjects.len());
        for &i in subjects {
            values.extend_from_slice(self.slice(i));
        }
        Ok(Self {
            scale_id: self.scale_id.clone(),
            nodes: self.nodes,
            subjects: subjects.len(),
            values,
        })
    }

    pub fn inner_product(&self, other: &TensorStack) -> Result<f64> {
        if self.nodes != other.nodes || self.subjects != other.subjects {
            return Err(Error::DimensionMismatch(format!(
                "{0}x{0}x{1} against {2}x{2}x{3}",
                self.nodes, self.subjects, other.nodes, other.subjects
            )));
        }
        Ok(math::dot(&self.values, &other.values))
    }

    pub fn frobenius_norm(&self) -> f64 {
        math::norm(&self.values)
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            scale_id: self.scale_id.clone(),
            nodes: self.nodes,
            subjects: self.subjects,
            values: self.values.iter().map(|x| x * s).collect(),
        }
    }

    /// Mode-3 contraction `X ×₃ u = Σᵢ uᵢ Xᵢ`.
    pub fn contract_subjects(&self, u: &[f64]) -> Result<SymmetricMatrix> {
        if u.len() != self.subjects {
            return Err(Error::DimensionMismatch(format!(
                "subject vector of length {} for a stack of {}",
                u.len(),
                self.subjects
            )));
        }
        let p2 = self.nodes * self.nodes;
        let mut out = vec![0.0; p2];
        for (slice, &ui) in self.values.chunks_exact(p2.max(1)).zip(u) {
            if ui == 0.0 {
                continue;
            }
            for (o, x) in out.iter_mut().zip(slice) {
                *o += ui * x;
            }
        }
        Ok(SymmetricMatrix {
            n: self.nodes,
            data: out,
        })
    }

    /// `X ×₁ w ×₂ w`: the per-subject quadratic forms `wᵀ Xᵢ w`.
    pub fn quadratic_forms(&self, w: &[f64]) -> Result<Vec<f64>> {
        if w.len() != self.nodes {
            return Err(Error::DimensionMismatch(format!(
                "node vector of length {} for a {}-node stack",
                w.len(),
                self.nodes
            )));
        }
        let p = self.nodes;
        let mut xw = vec![0.0; p];
        Ok((0..self.subjects)
            .map(|i| {
                let slice = self.slice(i);
                for a in 0..p {
                    xw[a] = math::dot(&slice[a * p..(a + 1) * p], w);
                }
                math::dot(&xw, w)
            })
            .collect())
    }

    /// Contraction of mode `mode` (1, 2 or 3) with a vector.
    ///
    /// Modes 1 and 2 give a `P×N` matrix indexed by the remaining node and the
    /// subject; mode 3 gives the `P×P` weighted sum of slices.
    pub fn mode_n_multiply_vector(&self, v: &[f64], mode: usize) -> Result<Matrix> {
        let (p, n) = (self.nodes, self.subjects);
        match mode {
            1 | 2 => {
                if v.len() != p {
                    return Err(Error::DimensionMismatch(format!(
                        "vector of length {} against mode of size {p}",
                        v.len()
                    )));
                }
                let mut out = Matrix::zeros(p, n);
                for i in 0..n {
                    let slice = self.slice(i);
                    for a in 0..p {
                        for b in 0..p {
                            let x = slice[a * p + b];
                            if mode == 1 {
                                out[(b, i)] += x * v[a];
                            } else {
                                out[(a, i)] += x * v[b];
                            }
                        }
                    }
                }
                Ok(out)
            }
            3 => Ok(self.contract_subjects(v)?.to_matrix()),
            m => Err(Error::InvalidMode(m)),
        }
    }

    /// Mode-`n` product with a `J×Iₙ` matrix; the result is a general 3-way tensor.
    pub fn mode_n_multiply_matrix(&self, m: &Matrix, mode: usize) -> Result<Tensor3> {
        self.to_tensor3().mode_n_multiply_matrix(m, mode)
    }

    pub fn to_tensor3(&self) -> Tensor3 {
        Tensor3 {
            dims: [self.nodes, self.nodes, self.subjects],
            values: self.values.clone(),
        }
    }

    /// Subtracts `d · v ∘ v ∘ u` in place.
    pub fn subtract_rank_one(&mut self, v: &[f64], u: &[f64], d: f64) -> Result<()> {
        if v.len() != self.nodes || u.len() != self.subjects {
            return Err(Error::DimensionMismatch("rank-one term shape".into()));
        }
        let p = self.nodes;
        for (i, &ui) in u.iter().enumerate() {
            let du = d * ui;
            let slice = &mut self.values[i * p * p..(i + 1) * p * p];
            for a in 0..p {
                for b in 0..p {
                    slice[a * p + b] -= (v[a] * v[b]) * du;
                }
            }
        }
        Ok(())
    }
}

/// ⟨a, b⟩ summed over all entries.
pub fn inner_product(a: &TensorStack, b: &TensorStack) -> Result<f64> {
    a.inner_product(b)
}

pub fn frobenius_norm(x: &TensorStack) -> f64 {
    x.frobenius_norm()
}

/// `d · v ∘ v ∘ u`, with entry `[a, b, i] = d·v[a]·v[b]·u[i]`.
pub fn rank_one_tensor(v: &[f64], u: &[f64], d: f64) -> TensorStack {
    let p = v.len();
    let mut values = Vec::with_capacity(p * p * u.len());
    for &ui in u {
        let du = d * ui;
        for a in 0..p {
            for b in 0..p {
                values.push((v[a] * v[b]) * du);
            }
        }
    }
    TensorStack {
        scale_id: String::new(),
        nodes: p,
        subjects: u.len(),
        values,
    }
}

/// Dense `I₁×I₂×I₃` tensor with the same layout as [`TensorStack`].
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor3 {
    dims: [usize; 3],
    values: Vec<f64>,
}

impl Tensor3 {
    pub fn new(dims: [usize; 3], values: Vec<f64>) -> Result<Self> {
        if values.len() != dims.iter().product::<usize>() {
            return Err(Error::DimensionMismatch(format!(
                "{} values for dims {dims:?}",
                values.len()
            )));
        }
        Ok(Self { dims, values })
    }

    pub fn dims(&self) -> [usize; 3] {
        self.dims
    }

    #[inline]
    fn offset(&self, i1: usize, i2: usize, i3: usize) -> usize {
        (i3 * self.dims[0] + i1) * self.dims[1] + i2
    }

    #[inline]
    pub fn get(&self, i1: usize, i2: usize, i3: usize) -> f64 {
        self.values[self.offset(i1, i2, i3)]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }

    pub fn frobenius_norm(&self) -> f64 {
        math::norm(&self.values)
    }

    pub fn inner_product(&self, other: &Tensor3) -> Result<f64> {
        if self.dims != other.dims {
            return Err(Error::DimensionMismatch(format!(
                "{:?} against {:?}",
                self.dims, other.dims
            )));
        }
        Ok(math::dot(&self.values, &other.values))
    }

    /// `(X ×ₙ A)[…, j, …] = Σ_{iₙ} x[…, iₙ, …] · a[j, iₙ]`.
    pub fn mode_n_multiply_matrix(&self, m: &Matrix, mode: usize) -> Result<Tensor3> {
        if !(1..=3).contains(&mode) {
            return Err(Error::InvalidMode(mode));
        }
        let k = mode - 1;
        if m.cols() != self.dims[k] {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} matrix against mode {mode} of size {}",
                m.rows(),
                m.cols(),
                self.dims[k]
            )));
        }
        let mut dims = self.dims;
        dims[k] = m.rows();
        let mut out = Tensor3 {
            dims,
            values: vec![0.0; dims.iter().product()],
        };
        let [d1, d2, d3] = self.dims;
        for i3 in 0..d3 {
            for i1 in 0..d1 {
                for i2 in 0..d2 {
                    let x = self.get(i1, i2, i3);
                    if x == 0.0 {
                        continue;
                    }
                    let idx = [i1, i2, i3];
                    for j in 0..m.rows() {
                        let mut t = idx;
                        t[k] = j;
                        let o = out.offset(t[0], t[1], t[2]);
                        out.values[o] += x * m[(j, idx[k])];
                    }
                }
            }
        }
        Ok(out)
    }
}

/// Orthogonal projector on `ℝᴾ`, kept in the cheapest exact representation.
#[derive(Debug, Clone, PartialEq)]
pub struct Projector {
    dim: usize,
    kind: ProjectorKind,
}

#[derive(Debug, Clone, PartialEq)]
enum ProjectorKind {
    Identity,
    /// `I − V Vᵀ` for orthonormal columns `V`.
    Complement(Matrix),
    Dense(Matrix),
}

impl Projector {
    pub fn identity(dim: usize) -> Self {
        Self {
            dim,
            kind: ProjectorKind::Identity,
        }
    }

    /// `I − V Vᵀ`; the columns of `basis` must be orthonormal to `1e-8`.
    pub fn complement(basis: &Matrix) -> Result<Self> {
        let gram = basis.gram();
        for i in 0..gram.rows() {
            for j in 0..gram.cols() {
                let want = if i == j { 1.0 } else { 0.0 };
                if (gram[(i, j)] - want).abs() > 1e-8 {
                    return Err(Error::InvalidProjector("basis is not orthonormal".into()));
                }
            }
        }
        if basis.cols() == 0 {
            return Ok(Self::identity(basis.rows()));
        }
        Ok(Self {
            dim: basis.rows(),
            kind: ProjectorKind::Complement(basis.clone()),
        })
    }

    /// Accepts any matrix that is symmetric and idempotent to `1e-8`.
    pub fn from_matrix(m: &Matrix) -> Result<Self> {
        let n = m.rows();
        if m.cols() != n {
            return Err(Error::InvalidProjector("not square".into()));
        }
        if !m.is_finite() {
            return Err(Error::NonFinite);
        }
        for a in 0..n {
            for b in 0..a {
                if (m[(a, b)] - m[(b, a)]).abs() > 1e-8 {
                    return Err(Error::InvalidProjector("not symmetric".into()));
                }
            }
        }
        let sq = m.matmul(m)?;
        for (x, y) in sq.as_slice().iter().zip(m.as_slice()) {
            if (x - y).abs() > 1e-8 {
                return Err(Error::InvalidProjector("not idempotent".into()));
            }
        }
        Ok(Self {
            dim: n,
            kind: ProjectorKind::Dense(m.clone()),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_identity(&self) -> bool {
        matches!(self.kind, ProjectorKind::Identity)
    }

    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len(), self.dim);
        match &self.kind {
            ProjectorKind::Identity => v.to_vec(),
            ProjectorKind::Complement(basis) => {
                let coef = basis.tr_matvec(v).expect("checked length");
                let back = basis.matvec(&coef).expect("checked length");
                v.iter().zip(&back).map(|(x, y)| x - y).collect()
            }
            ProjectorKind::Dense(m) => m.matvec(v).expect("checked length"),
        }
    }

    /// `P B P`, exactly symmetric.
    pub fn sandwich(&self, b: &SymmetricMatrix) -> SymmetricMatrix {
        assert_eq!(b.dim(), self.dim);
        let n = self.dim;
        match &self.kind {
            ProjectorKind::Identity => b.clone(),
            ProjectorKind::Complement(v) => {
                // P B P = B − V Cᵀ − C Vᵀ + V S Vᵀ with C = B V and S = Vᵀ B V.
                let bm = b.to_matrix();
                let c = bm.matmul(v).expect("shapes agree");
                let s = v.transpose().matmul(&c).expect("shapes agree");
                let w = v.matmul(&s).expect("shapes agree");
                let k = v.cols();
                SymmetricMatrix::from_upper_fn(n, |a, bb| {
                    let mut x = b.get(a, bb);
                    for h in 0..k {
                        x -= v[(a, h)] * c[(bb, h)] + c[(a, h)] * v[(bb, h)];
                        x += w[(a, h)] * v[(bb, h)];
                    }
                    x
                })
            }
            ProjectorKind::Dense(p) => {
                let pbp = p
                    .matmul(&b.to_matrix())
                    .and_then(|x| x.matmul(p))
                    .expect("shapes agree");
                SymmetricMatrix::symmetrize(&pbp).expect("finite")
            }
        }
    }

    pub fn to_matrix(&self) -> Matrix {
        let n = self.dim;
        match &self.kind {
            ProjectorKind::Identity => Matrix::identity(n),
            ProjectorKind::Complement(v) => {
                let mut m = Matrix::identity(n);
                let vvt = v.matmul(&v.transpose()).expect("shapes agree");
                for (x, y) in m.as_mut_slice().iter_mut().zip(vvt.as_slice()) {
                    *x -= y;
                }
                m
            }
            ProjectorKind::Dense(m) => m.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ones(p: usize, n: usize) -> TensorStack {
        TensorStack::new("x", p, n, vec![1.0; p * p * n]).unwrap()
    }

    #[test]
    fn all_ones_inner_product_counts_entries() {
        let x = ones(2, 3);
        assert_eq!(inner_product(&x, &x).unwrap(), 12.0);
        let z = TensorStack::zeros("z", 2, 3);
        assert_eq!(inner_product(&x, &z).unwrap(), 0.0);
        assert!(inner_product(&x, &ones(3, 3)).is_err());
    }

    #[test]
    fn frobenius_of_ones_and_zero() {
        assert_eq!(frobenius_norm(&ones(2, 1)), 2.0);
        assert_eq!(frobenius_norm(&TensorStack::zeros("z", 4, 2)), 0.0);
    }

    #[test]
    fn constructor_rejects_asymmetry_and_nan() {
        assert_eq!(
            TensorStack::new("x", 2, 1, vec![0., 1., 2., 0.]),
            Err(Error::NotSymmetric)
        );
        assert_eq!(
            TensorStack::new("x", 1, 1, vec![f64::INFINITY]),
            Err(Error::NonFinite)
        );
        let s = TensorStack::symmetrized("x", 2, 1, vec![0., 1., 2., 0.]).unwrap();
        assert_eq!(s.slice(0), &[0., 1.5, 1.5, 0.]);
    }

    #[test]
    fn mode_one_selects_row_of_identity_slice() {
        let x = TensorStack::new("x", 2, 1, vec![1., 0., 0., 1.]).unwrap();
        let m = x.mode_n_multiply_vector(&[1., 0.], 1).unwrap();
        assert_eq!((m.rows(), m.cols()), (2, 1));
        assert_eq!(m.as_slice(), &[1., 0.]);
        assert_eq!(
            x.mode_n_multiply_vector(&[1., 0.], 4),
            Err(Error::InvalidMode(4))
        );
        assert!(x.mode_n_multiply_vector(&[1., 0., 0.], 2).is_err());
    }

    #[test]
    fn mode_three_with_one_hot_is_slice_selection() {
        let vals: Vec<f64> = (0..3)
            .flat_map(|i| {
                let s = i as f64;
                [s, s + 1.0, s + 1.0, 2.0 * s]
            })
            .collect();
        let x = TensorStack::new("x", 2, 3, vals).unwrap();
        let m = x.mode_n_multiply_vector(&[0., 1., 0.], 3).unwrap();
        assert_eq!(m.as_slice(), x.slice(1));
    }

    #[test]
    fn identity_and_zero_matrix_products() {
        let x = TensorStack::symmetrized("x", 3, 2, (0..18).map(|i| i as f64).collect()).unwrap();
        for mode in 1..=3 {
            let size = x.to_tensor3().dims()[mode - 1];
            let same = x
                .mode_n_multiply_matrix(&Matrix::identity(size), mode)
                .unwrap();
            assert_eq!(same, x.to_tensor3());
            let zero = x
                .mode_n_multiply_matrix(&Matrix::zeros(2, size), mode)
                .unwrap();
            assert!(zero.as_slice().iter().all(|v| *v == 0.0));
        }
    }

    #[test]
    fn rank_one_examples() {
        let t = rank_one_tensor(&[1., 0.], &[1.], 2.0);
        assert_eq!(t.slice(0), &[2., 0., 0., 0.]);
        let z = rank_one_tensor(&[0.3, -0.2], &[1., 2.], 0.0);
        assert!(z.as_slice().iter().all(|v| *v == 0.0));
    }

    #[test]
    fn complement_projector_sandwich_matches_dense_product() {
        let basis = Matrix::from_row_major(3, 1, vec![0.6, 0.8, 0.0]).unwrap();
        let p = Projector::complement(&basis).unwrap();
        let dense = Projector::from_matrix(&p.to_matrix()).unwrap();
        let b = SymmetricMatrix::new(3, vec![1., 2., 3., 2., 5., 4., 3., 4., 9.]).unwrap();
        let x = p.sandwich(&b);
        let y = dense.sandwich(&b);
        for (u, v) in x.as_slice().iter().zip(y.as_slice()) {
            assert!((u - v).abs() < 1e-12);
        }
        let v = p.apply(&[0.6, 0.8, 0.0]);
        assert!(math::norm(&v) < 1e-15);
    }

    #[test]
    fn invalid_projectors_are_rejected() {
        let not_idem = Matrix::from_row_major(2, 2, vec![2., 0., 0., 1.]).unwrap();
        assert!(matches!(
            Projector::from_matrix(&not_idem),
            Err(Error::InvalidProjector(_))
        ));
        let not_sym = Matrix::from_row_major(2, 2, vec![1., 1., 0., 0.]).unwrap();
        assert!(Projector::from_matrix(&not_sym).is_err());
        let skew = Matrix::from_row_major(2, 1, vec![1., 1.]).unwrap();
        assert!(Projector::complement(&skew).is_err());
    }
}
