//! Multi-scale graph principal component analysis.
//!
//! Several stacks of symmetric adjacency matrices, one stack per parcellation
//! scale, are decomposed jointly into scale-specific network modes and a shared
//! subject-factor matrix:
//!
//! ```text
//! X^(j) ≈ Σ_h d_h^(j) · v_h^(j) ∘ v_h^(j) ∘ u_h      j = 1..R
//! ```
//!
//! Components are extracted greedily. Each rank-one term is found by blockwise
//! coordinate ascent on the sum over scales of the squared projected
//! contractions, then deflated from the residual stacks.
//!
//! The crate is `no_std` (it needs `alloc`). File formats and the command-line
//! front end live in the `mgpca` crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod analysis;
pub mod decomposition;
mod eigen;
mod error;
pub mod linalg;
mod math;
pub mod missing;
pub mod rng;
pub mod simulation;
pub mod tensor;

pub use decomposition::{
    cpve, fit_component, hosvd_init, multiscale_pca, normalize_stack, reconstruct,
    single_scale_pca, update_u, update_v, ComponentDiagnostics, ComponentFit, FitConfig, FitStatus,
    Init, KruskalDecomposition, ScaleFactors,
};
pub use eigen::{eig_dominant, eig_max, EigenPair};
pub use error::{Error, Result};
pub use linalg::Matrix;
pub use missing::{fit_missing, impute, AvailabilityMask, Imputation};
pub use tensor::{
    frobenius_norm, inner_product, rank_one_tensor, Projector, SymmetricMatrix, Tensor3,
    TensorStack,
};
