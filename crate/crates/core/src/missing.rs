//! Fitting when some subjects lack some scales, and imputing the gaps.
//!
//! Availability is a binary `N×R` mask `Γ`. For subject `ℓ`, `S(ℓ)` is the set
//! of scales it has and `G(ℓ) = {z : S(ℓ) ⊆ S(z)}` the subjects with at least
//! that much data. Subjects sharing one `S` form a pattern; each pattern's
//! factor entries come from one eigenproblem over its `G` restricted to its `S`.
//!
//! Stack `j` handed to [`fit_missing`] holds only the subjects available at
//! scale `j`, in increasing subject order.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::decomposition::{
    self, fit_in, subject_slice, u_from_forms, FitConfig, KruskalDecomposition, Layout,
};
use crate::error::{Error, Result};
use crate::math;
use crate::tensor::{Projector, SymmetricMatrix, TensorStack};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AvailabilityMask {
    subjects: usize,
    scales: usize,
    bits: Vec<bool>,
}

/// Subjects sharing one set of available scales.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pattern {
    /// The shared `S`, ascending.
    pub scales: Vec<usize>,
    /// Subjects whose available scales are exactly `scales`.
    pub members: Vec<usize>,
    /// The shared `G`: subjects available at every scale in `scales`.
    pub comparable: Vec<usize>,
}

impl AvailabilityMask {
    /// `bits` is row-major `N×R`; `bits[i·R + j]` marks subject `i` at scale `j`.
    pub fn new(subjects: usize, scales: usize, bits: Vec<bool>) -> Result<Self> {
        if bits.len() != subjects * scales {
            return Err(Error::InvalidMask(format!(
                "{} entries for {subjects} subjects and {scales} scales",
                bits.len()
            )));
        }
        if scales == 0 {
            return Err(Error::InvalidMask("no scales".into()));
        }
        if let Some(i) =
            (0..subjects).find(|&i| !bits[i * scales..(i + 1) * scales].iter().any(|b| *b))
        {
            return Err(Error::InvalidMask(format!(
                "subject {i} has no available scale"
            )));
        }
        Ok(Self {
            subjects,
            scales,
            bits,
        })
    }

    pub fn complete(subjects: usize, scales: usize) -> Self {
        Self {
            subjects,
            scales,
            bits: vec![true; subjects * scales],
        }
    }

    pub fn subjects(&self) -> usize {
        self.subjects
    }

    pub fn scales(&self) -> usize {
        self.scales
    }

    #[inline]
    pub fn get(&self, subject: usize, scale: usize) -> bool {
        self.bits[subject * self.scales + scale]
    }

    pub fn is_complete(&self) -> bool {
        self.bits.iter().all(|b| *b)
    }

    /// Subjects available at `scale`, ascending.
    pub fn available(&self, scale: usize) -> Vec<usize> {
        (0..self.subjects).filter(|&i| self.get(i, scale)).collect()
    }

    fn scale_set(&self, subject: usize) -> Vec<usize> {
        (0..self.scales).filter(|&j| self.get(subject, j)).collect()
    }

    fn comparable_to(&self, set: &[usize]) -> Vec<usize> {
        (0..self.subjects)
            .filter(|&z| set.iter().all(|&j| self.get(z, j)))
            .collect()
    }

    /// `(S, G)` for every subject, 0-based.
    pub fn subject_sets(&self) -> (Vec<Vec<usize>>, Vec<Vec<usize>>) {
        let s: Vec<Vec<usize>> = (0..self.subjects).map(|i| self.scale_set(i)).collect();
        let g = s.iter().map(|si| self.comparable_to(si)).collect();
        (s, g)
    }

    /// Distinct patterns, largest `G` first, then by first member.
    pub fn patterns(&self) -> Vec<Pattern> {
        let mut out: Vec<Pattern> = Vec::new();
        for i in 0..self.subjects {
            let s = self.scale_set(i);
            match out.iter_mut().find(|p| p.scales == s) {
                Some(p) => p.members.push(i),
                None => {
                    let comparable = self.comparable_to(&s);
                    out.push(Pattern {
                        scales: s,
                        members: vec![i],
                        comparable,
                    });
                }
            }
        }
        out.sort_by_key(|p| core::cmp::Reverse(p.comparable.len()));
        out
    }
}

/// Index maps between subject ids and positions inside the reduced stacks.
#[derive(Debug, Clone)]
pub(crate) struct MaskedLayout {
    complete: bool,
    subjects: usize,
    members: Vec<Vec<usize>>,
    positions: Vec<Vec<Option<usize>>>,
    patterns: Vec<Pattern>,
}

impl MaskedLayout {
    pub(crate) fn new(mask: &AvailabilityMask) -> Self {
        let members: Vec<Vec<usize>> = (0..mask.scales()).map(|j| mask.available(j)).collect();
        let positions = members
            .iter()
            .map(|m| {
                let mut pos = vec![None; mask.subjects()];
                for (k, &i) in m.iter().enumerate() {
                    pos[i] = Some(k);
                }
                pos
            })
            .collect();
        Self {
            complete: mask.is_complete(),
            subjects: mask.subjects(),
            members,
            positions,
            patterns: mask.patterns(),
        }
    }

    pub(crate) fn subjects(&self) -> usize {
        self.subjects
    }

    pub(crate) fn members(&self, scale: usize) -> &[usize] {
        &self.members[scale]
    }

    /// Assembles `u` from one eigenproblem per pattern.
    ///
    /// `gs[j]` holds `X^(j) ×₁ v_j ×₂ v_j` over the subjects of stack `j`. Each
    /// pattern's eigenvector is rescaled by the least-squares coefficient that
    /// best matches it to `previous` (or, on the first sweep, to the entries
    /// assembled so far) on its comparable subjects.
    pub(crate) fn update_u(&self, gs: &[Vec<f64>], previous: Option<&[f64]>) -> Result<Vec<f64>> {
        if self.complete {
            return u_from_forms(gs);
        }
        let mut u = vec![0.0; self.subjects];
        for pat in &self.patterns {
            let cols: Vec<Vec<f64>> = pat
                .scales
                .iter()
                .map(|&j| {
                    pat.comparable
                        .iter()
                        .map(|&z| {
                            gs[j][self.positions[j][z].expect("comparable subjects are available")]
                        })
                        .collect()
                })
                .collect();
            let y = u_from_forms(&cols)?;
            let reference = previous.unwrap_or(&u);
            let overlap: f64 = pat
                .comparable
                .iter()
                .zip(&y)
                .map(|(&z, yz)| reference[z] * yz)
                .sum();
            let c = if overlap == 0.0 { 1.0 } else { overlap };
            for (&z, yz) in pat.comparable.iter().zip(&y) {
                if pat.members.binary_search(&z).is_ok() {
                    u[z] = c * yz;
                }
            }
        }
        math::normalize(&mut u).ok_or(Error::DegenerateProjection)?;
        math::canonical_sign(&mut u);
        Ok(u)
    }
}

fn check_stacks(stacks: &[TensorStack], mask: &AvailabilityMask) -> Result<()> {
    if stacks.len() != mask.scales() {
        return Err(Error::DimensionMismatch(format!(
            "{} stacks for a mask over {} scales",
            stacks.len(),
            mask.scales()
        )));
    }
    for (j, x) in stacks.iter().enumerate() {
        let have = mask.available(j).len();
        if have == 0 {
            return Err(Error::InvalidMask(format!(
                "scale {} has no available subjects",
                x.scale_id()
            )));
        }
        if x.subjects() != have {
            return Err(Error::DimensionMismatch(format!(
                "stack {} holds {} subjects but the mask marks {have} available",
                x.scale_id(),
                x.subjects()
            )));
        }
    }
    Ok(())
}

/// Masked counterpart of [`decomposition::update_u`].
pub fn update_u_missing(
    stacks: &[TensorStack],
    v: &[Vec<f64>],
    projectors: &[Projector],
    mask: &AvailabilityMask,
    previous: Option<&[f64]>,
) -> Result<Vec<f64>> {
    check_stacks(stacks, mask)?;
    if v.len() != stacks.len() || projectors.len() != stacks.len() {
        return Err(Error::DimensionMismatch(
            "one mode and one projector per stack".into(),
        ));
    }
    if previous.is_some_and(|p| p.len() != mask.subjects()) {
        return Err(Error::DimensionMismatch("previous factor length".into()));
    }
    let gs = stacks
        .iter()
        .zip(v)
        .zip(projectors)
        .map(|((x, vj), p)| {
            if vj.len() != x.nodes() || p.dim() != x.nodes() {
                return Err(Error::DimensionMismatch("mode or projector size".into()));
            }
            x.quadratic_forms(&p.apply(vj))
        })
        .collect::<Result<Vec<_>>>()?;
    MaskedLayout::new(mask).update_u(&gs, previous)
}

/// [`decomposition::update_v`] on the subjects available at `scale`.
///
/// `x` may hold either all `N` subjects or only the available ones; `u` always
/// has length `N`.
pub fn update_v_missing(
    x: &TensorStack,
    u: &[f64],
    projector: &Projector,
    mask: &AvailabilityMask,
    scale: usize,
) -> Result<Vec<f64>> {
    if scale >= mask.scales() || u.len() != mask.subjects() {
        return Err(Error::DimensionMismatch(
            "scale index or factor length".into(),
        ));
    }
    let avail = mask.available(scale);
    if avail.is_empty() {
        return Err(Error::InvalidMask(format!(
            "scale {scale} has no available subjects"
        )));
    }
    let sub_u: Vec<f64> = avail.iter().map(|&i| u[i]).collect();
    if x.subjects() == mask.subjects() && avail.len() != mask.subjects() {
        decomposition::update_v(&x.select_subjects(&avail)?, &sub_u, projector)
    } else if x.subjects() == avail.len() {
        decomposition::update_v(x, &sub_u, projector)
    } else {
        Err(Error::DimensionMismatch(
            "stack does not match the mask".into(),
        ))
    }
}

/// Joint decomposition when stack `j` holds only the subjects available at `j`.
///
/// With a complete mask the result is identical to
/// [`decomposition::multiscale_pca`]. Weights at incomplete scales are the
/// least-squares coefficients over the available subjects.
pub fn fit_missing(
    data: &[TensorStack],
    mask: &AvailabilityMask,
    config: &FitConfig,
) -> Result<KruskalDecomposition> {
    check_stacks(data, mask)?;
    let nodes: Vec<usize> = data.iter().map(|x| x.nodes()).collect();
    config.validate(&nodes, mask.subjects())?;
    let layout = MaskedLayout::new(mask);
    fit_in(data, Layout::Masked(&layout), mask.subjects(), config)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Imputation {
    pub matrix: SymmetricMatrix,
    /// Set when the slice was in fact observed; the matrix is then a reconstruction.
    pub observed: bool,
}

/// Reconstructed slice `Σ_h d_h u_{ih} v_h v_hᵀ` of scale index `scale` for `subject`.
pub fn impute(
    decomp: &KruskalDecomposition,
    mask: &AvailabilityMask,
    scale: usize,
    subject: usize,
) -> Result<Imputation> {
    if scale >= decomp.scales().len() || scale >= mask.scales() {
        return Err(Error::InvalidArgument(format!(
            "scale index {scale} out of range"
        )));
    }
    if subject >= decomp.subjects() || subject >= mask.subjects() {
        return Err(Error::InvalidArgument(format!(
            "subject {subject} out of range"
        )));
    }
    let row = decomp.factors().row(subject);
    Ok(Imputation {
        matrix: subject_slice(&decomp.scales()[scale], row),
        observed: mask.get(subject, scale),
    })
}
