//! Inductive zero-shot learning with sparse attribute propagation (SAP) and
//! bidirectional projection learning (BPL).
//!
//! Given a training set in which only a few images per seen class carry an
//! attribute annotation, the solver propagates those annotations to the
//! unannotated images through a graph-spectral sparse-coding step, denoises
//! them with an elementwise L1 fit, and alternates both with a bidirectional
//! linear projection between feature and attribute space. The learned
//! projection classifies unseen-class images by nearest prototype in feature
//! space.
//!
//! Module map:
//! - [`matcore`] — dense symmetric eigendecomposition and the Sylvester solver.
//! - [`spectral`] — k-NN Gaussian affinity graph, normalized Laplacian, and
//!   the truncated spectral basis.
//! - [`l1solve`] — weighted-L1 quadratic subproblem solvers (soft
//!   thresholding, cyclic coordinate descent, KKT residuals).
//! - [`solver`] — the alternating SAP-I / SAP-II / BPL trainer.
//! - [`zsleval`] — nearest-prototype prediction and standard / generalized
//!   zero-shot metrics.
//! - [`dataio`] — dataset model, matrix/manifest file formats, normalization,
//!   pool augmentation, and the seeded synthetic generator.
//!
//! With the default `parallel` feature, column-separable inner loops run on
//! rayon; build with `--no-default-features` for a sequential binary.

pub mod dataio;
pub mod l1solve;
pub mod matcore;
mod par;
pub mod solver;
pub mod spectral;
pub mod zsleval;

pub use matcore::Matrix;
