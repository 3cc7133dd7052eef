//! k-NN Gaussian affinity graph, normalized Laplacian, and the truncated
//! spectral basis used to restrict the propagated attributes.
//!
//! For `L = V·Σ·Vᵀ` the factor `B = Σ^{1/2}·Vᵀ` satisfies `L = Bᵀ·B`, and for
//! any coefficient matrix `α` over the `m` smallest eigenvectors,
//! `‖B·V_m·α_{.j}‖₁ = Σᵢ Σᵢᵢ^{1/2}·|αᵢⱼ|` by orthonormality. The solver only
//! ever needs those per-basis penalty weights `Σᵢᵢ^{1/2}`, so `B` (an `N×N`
//! matrix) is never materialized outside of tests.

use crate::matcore::{self, Matrix};
use crate::par;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SpectralError {
    #[error("graph needs at least 2 points, got {0}")]
    TooFewPoints(usize),
    #[error("invalid graph config: {0}")]
    InvalidConfig(String),
    #[error("isolated node {0} has zero degree")]
    IsolatedNode(usize),
    #[error("basis size {m} exceeds node count {n}")]
    BasisTooLarge { m: usize, n: usize },
    #[error("Laplacian eigenvalue {value} at index {index} outside [0, 2]")]
    SpectrumOutOfRange { index: usize, value: f64 },
    #[error(transparent)]
    Mat(#[from] matcore::MatError),
}

/// Graph construction parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GraphConfig {
    /// Neighbors kept per node before union symmetrization.
    pub k_g: usize,
    /// Gaussian kernel width in `exp(−‖xᵢ−xⱼ‖² / (2σ²))`.
    pub sigma: f64,
    /// Number of smallest Laplacian eigenpairs retained.
    pub m: usize,
}

impl GraphConfig {
    /// Checks the config against a dataset of `n` points:
    /// `1 ≤ k_g < n`, `σ > 0`, `1 ≤ m ≤ n`.
    pub fn validate(&self, n: usize) -> Result<(), SpectralError> {
        if self.k_g == 0 || self.k_g >= n {
            return Err(SpectralError::InvalidConfig(format!(
                "k_g = {} must satisfy 1 <= k_g < n = {}",
                self.k_g, n
            )));
        }
        if !(self.sigma > 0.0) {
            return Err(SpectralError::InvalidConfig(format!(
                "sigma = {} must be positive",
                self.sigma
            )));
        }
        if self.m == 0 || self.m > n {
            return Err(SpectralError::InvalidConfig(format!(
                "m = {} must satisfy 1 <= m <= n = {}",
                self.m, n
            )));
        }
        Ok(())
    }
}

/// Symmetric weighted k-NN graph. No self-loops; every node has positive
/// degree (Gaussian weights are strictly positive and each node keeps at
/// least one neighbor).
#[derive(Debug, Clone)]
pub struct AffinityGraph {
    n: usize,
    /// Per-node neighbor list `(index, weight)`, sorted by index.
    edges: Vec<Vec<(usize, f64)>>,
    degrees: Vec<f64>,
}

impl AffinityGraph {
    pub fn node_count(&self) -> usize {
        self.n
    }

    /// Neighbors of `i` with weights, sorted by neighbor index.
    pub fn neighbors(&self, i: usize) -> &[(usize, f64)] {
        &self.edges[i]
    }

    /// Sum of incident edge weights at node `i`.
    pub fn degree(&self, i: usize) -> f64 {
        self.degrees[i]
    }

    /// Weight of edge `(i, j)`, or 0 when absent.
    pub fn weight(&self, i: usize, j: usize) -> f64 {
        self.edges[i]
            .binary_search_by_key(&j, |&(idx, _)| idx)
            .map(|pos| self.edges[i][pos].1)
            .unwrap_or(0.0)
    }
}

/// The `m` smallest Laplacian eigenpairs standing in for the full factor `B`.
#[derive(Debug, Clone)]
pub struct SpectralBasis {
    /// Basis size.
    pub m: usize,
    /// `N×m` orthonormal eigenvector block `V_m`.
    pub eigvecs: Matrix,
    /// Ascending Laplacian eigenvalues `Σᵢᵢ`, clamped into `[0, 2]`.
    pub eigvals: Vec<f64>,
    /// Per-basis L1 penalty weights `Σᵢᵢ^{1/2}`.
    pub penalty_weights: Vec<f64>,
}

/// Builds the union-symmetrized k-NN Gaussian affinity graph over the columns
/// of `x` (`d×N`, one point per column).
///
/// Each node selects its `k_g` nearest neighbors by Euclidean distance
/// (self excluded, ties broken by lower index); the edge `(i, j)` is kept if
/// either endpoint selected the other, with weight
/// `exp(−‖xᵢ−xⱼ‖² / (2σ²))`. Duplicate points get weight 1.
pub fn build_knn_affinity(x: &Matrix, cfg: &GraphConfig) -> Result<AffinityGraph, SpectralError> {
    let n = x.ncols();
    if n < 2 {
        return Err(SpectralError::TooFewPoints(n));
    }
    cfg.validate(n)?;

    let inv_two_sigma_sq = 1.0 / (2.0 * cfg.sigma * cfg.sigma);
    let sq_norms: Vec<f64> = (0..n).map(|j| x.column(j).norm_squared()).collect();

    // Per-node k-NN selection; each task touches only its own output slot.
    let knn: Vec<Vec<(usize, f64)>> = par::map_indexed(n, |i| {
        let xi = x.column(i);
        let mut dists: Vec<(f64, usize)> = (0..n)
            .filter(|&j| j != i)
            .map(|j| {
                // max(0) guards cancellation for near-duplicate points.
                let d2 = (sq_norms[i] + sq_norms[j] - 2.0 * xi.dot(&x.column(j))).max(0.0);
                (d2, j)
            })
            .collect();
        dists.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        dists
            .into_iter()
            .take(cfg.k_g)
            .map(|(d2, j)| (j, (-d2 * inv_two_sigma_sq).exp()))
            .collect()
    });

    // Union symmetrization: deterministic sequential merge.
    let mut edges: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    for (i, nbrs) in knn.iter().enumerate() {
        for &(j, w) in nbrs {
            edges[i].push((j, w));
            edges[j].push((i, w));
        }
    }
    let mut degrees = vec![0.0; n];
    for (i, list) in edges.iter_mut().enumerate() {
        list.sort_by_key(|&(j, _)| j);
        list.dedup_by_key(|&mut (j, _)| j);
        degrees[i] = list.iter().map(|&(_, w)| w).sum();
    }
    Ok(AffinityGraph { n, edges, degrees })
}

/// Normalized Laplacian `L = I − D^{−1/2}·A·D^{−1/2}` as a dense symmetric
/// matrix. Rejects graphs with an isolated (zero-degree) node.
pub fn normalized_laplacian(g: &AffinityGraph) -> Result<Matrix, SpectralError> {
    let n = g.node_count();
    for i in 0..n {
        if !(g.degree(i) > 0.0) {
            return Err(SpectralError::IsolatedNode(i));
        }
    }
    let inv_sqrt_deg: Vec<f64> = (0..n).map(|i| 1.0 / g.degree(i).sqrt()).collect();
    let mut l = Matrix::identity(n, n);
    for i in 0..n {
        for &(j, w) in g.neighbors(i) {
            if j > i {
                // Assign both triangles from one computation: exact symmetry.
                let v = -w * inv_sqrt_deg[i] * inv_sqrt_deg[j];
                l[(i, j)] = v;
                l[(j, i)] = v;
            }
        }
    }
    Ok(l)
}

/// Extracts the `m` smallest eigenpairs of a normalized Laplacian.
///
/// Eigenvalues are clamped into `[0, 2]` (values outside by more than 1e-9
/// are rejected as corrupt input); signs follow the crate-wide convention of
/// [`matcore::sym_eig`].
pub fn spectral_basis(l: &Matrix, m: usize) -> Result<SpectralBasis, SpectralError> {
    let n = l.nrows();
    if m == 0 || m > n {
        return Err(SpectralError::BasisTooLarge { m, n });
    }
    let eig = matcore::sym_eig(l)?;
    for (i, &v) in eig.values.iter().enumerate() {
        if !(-1e-9..=2.0 + 1e-9).contains(&v) {
            return Err(SpectralError::SpectrumOutOfRange { index: i, value: v });
        }
    }
    let eigvals: Vec<f64> = eig.values[..m].iter().map(|v| v.clamp(0.0, 2.0)).collect();
    let penalty_weights: Vec<f64> = eigvals.iter().map(|v| v.sqrt()).collect();
    let eigvecs = eig.vectors.columns(0, m).into_owned();
    Ok(SpectralBasis { m, eigvecs, eigvals, penalty_weights })
}

/// Materializes the full factor `B = Σ^{1/2}·Vᵀ` of a Laplacian. Test and
/// diagnostic use only; the solver path works from penalty weights alone.
pub fn materialize_b(l: &Matrix) -> Result<Matrix, SpectralError> {
    let eig = matcore::sym_eig(l)?;
    let n = l.nrows();
    let mut b = eig.vectors.transpose();
    for i in 0..n {
        let s = eig.values[i].max(0.0).sqrt();
        for j in 0..n {
            b[(i, j)] *= s;
        }
    }
    Ok(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::{entry_l1, frob};
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn cfg(k_g: usize, m: usize) -> GraphConfig {
        GraphConfig { k_g, sigma: 1.0, m }
    }

    fn random_points(d: usize, n: usize, seed: u64) -> Matrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Matrix::from_fn(d, n, |_, _| rng.random_range(-2.0..2.0))
    }

    /// All-pairs brute-force reference for the union k-NN rule.
    fn brute_force_edges(x: &Matrix, k_g: usize) -> Vec<Vec<bool>> {
        let n = x.ncols();
        let mut selected = vec![vec![false; n]; n];
        for i in 0..n {
            let mut dists: Vec<(f64, usize)> = (0..n)
                .filter(|&j| j != i)
                .map(|j| ((x.column(i) - x.column(j)).norm_squared(), j))
                .collect();
            dists.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            for &(_, j) in dists.iter().take(k_g) {
                selected[i][j] = true;
            }
        }
        let mut edge = vec![vec![false; n]; n];
        for i in 0..n {
            for j in 0..n {
                edge[i][j] = selected[i][j] || selected[j][i];
            }
        }
        edge
    }

    #[test]
    fn identical_points_weight_one() {
        let x = Matrix::from_row_slice(2, 2, &[1.0, 1.0, 2.0, 2.0]);
        let g = build_knn_affinity(&x, &cfg(1, 1)).unwrap();
        assert_abs_diff_eq!(g.weight(0, 1), 1.0, epsilon = 1e-15);
        assert_eq!(g.neighbors(0).len(), 1);
    }

    #[test]
    fn gaussian_weight_at_sqrt2() {
        let x = Matrix::from_row_slice(2, 2, &[0.0, 1.0, 0.0, 1.0]);
        let g = build_knn_affinity(&x, &cfg(1, 1)).unwrap();
        assert_abs_diff_eq!(g.weight(0, 1), (-1.0f64).exp(), epsilon = 1e-12);
    }

    #[test]
    fn collinear_points_union_rule() {
        // Points at 0, 1, 3 with k_g = 1: node 2 picks node 1, nobody picks
        // node 2, so the union keeps edges (0,1) and (1,2) only.
        let x = Matrix::from_row_slice(1, 3, &[0.0, 1.0, 3.0]);
        let g = build_knn_affinity(&x, &cfg(1, 1)).unwrap();
        assert_abs_diff_eq!(g.weight(0, 1), (-0.5f64).exp(), epsilon = 1e-12);
        assert_abs_diff_eq!(g.weight(1, 2), (-2.0f64).exp(), epsilon = 1e-12);
        assert_eq!(g.weight(0, 2), 0.0);
    }

    #[test]
    fn rejects_kg_out_of_range() {
        let x = random_points(2, 4, 1);
        assert!(build_knn_affinity(&x, &cfg(4, 1)).is_err());
        assert!(build_knn_affinity(&x, &cfg(0, 1)).is_err());
    }

    #[test]
    fn laplacian_two_nodes() {
        let x = Matrix::from_row_slice(1, 2, &[0.0, 0.0]);
        let g = build_knn_affinity(&x, &cfg(1, 1)).unwrap();
        let l = normalized_laplacian(&g).unwrap();
        let expect = Matrix::from_row_slice(2, 2, &[1.0, -1.0, -1.0, 1.0]);
        assert!(frob(&(l - expect)) <= 1e-12);
    }

    #[test]
    fn path_graph_kernel_vector() {
        // Unit-weight path 0–1–2: duplicate coordinates give weight 1 edges.
        // Smallest eigenvalue is 0 with eigenvector ∝ D^{1/2}·1 = (1, √2, 1).
        let x = Matrix::from_row_slice(1, 3, &[0.0, 0.0, 10.0]);
        let mut g = build_knn_affinity(&x, &cfg(1, 1)).unwrap();
        // Force exact unit weights on both path edges.
        for list in &mut g.edges {
            for e in list.iter_mut() {
                e.1 = 1.0;
            }
        }
        g.edges[1] = vec![(0, 1.0), (2, 1.0)];
        g.edges[0] = vec![(1, 1.0)];
        g.edges[2] = vec![(1, 1.0)];
        g.degrees = vec![1.0, 2.0, 1.0];
        let l = normalized_laplacian(&g).unwrap();
        let basis = spectral_basis(&l, 1).unwrap();
        assert_abs_diff_eq!(basis.eigvals[0], 0.0, epsilon = 1e-10);
        let expect = Matrix::from_row_slice(3, 1, &[0.5, 0.5 * 2f64.sqrt(), 0.5]);
        assert!(frob(&(basis.eigvecs.clone() - expect)) <= 1e-8);
    }

    #[test]
    fn spectrum_within_zero_two() {
        for seed in [5u64, 6, 7] {
            let x = random_points(3, 20, seed);
            let g = build_knn_affinity(&x, &cfg(3, 1)).unwrap();
            let l = normalized_laplacian(&g).unwrap();
            let e = matcore::sym_eig(&l).unwrap();
            assert!(e.values.iter().all(|&v| (-1e-9..=2.0 + 1e-9).contains(&v)));
        }
    }

    #[test]
    fn connected_graph_first_penalty_zero() {
        let x = random_points(2, 12, 9);
        let g = build_knn_affinity(&x, &cfg(4, 1)).unwrap();
        let l = normalized_laplacian(&g).unwrap();
        let basis = spectral_basis(&l, 1).unwrap();
        assert_abs_diff_eq!(basis.penalty_weights[0], 0.0, epsilon = 1e-5);
    }

    #[test]
    fn truncated_eigvals_match_full_decomposition() {
        let x = random_points(3, 30, 17);
        let g = build_knn_affinity(&x, &cfg(5, 5)).unwrap();
        let l = normalized_laplacian(&g).unwrap();
        let basis = spectral_basis(&l, 5).unwrap();
        let full = matcore::sym_eig(&l).unwrap();
        for i in 0..5 {
            assert_abs_diff_eq!(basis.eigvals[i], full.values[i].max(0.0), epsilon = 1e-10);
        }
    }

    #[test]
    fn full_basis_reconstructs_laplacian() {
        let x = random_points(2, 24, 23);
        let g = build_knn_affinity(&x, &cfg(4, 24)).unwrap();
        let l = normalized_laplacian(&g).unwrap();
        let b = materialize_b(&l).unwrap();
        assert!(frob(&(b.transpose() * &b - &l)) <= 1e-8);
    }

    #[test]
    fn l1_simplification_identity() {
        // ‖B·V_m·α_{.j}‖₁ equals the penalty-weighted ‖α_{.j}‖₁.
        let x = random_points(3, 20, 29);
        let g = build_knn_affinity(&x, &cfg(4, 6)).unwrap();
        let l = normalized_laplacian(&g).unwrap();
        let basis = spectral_basis(&l, 6).unwrap();
        let b = materialize_b(&l).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let alpha = Matrix::from_fn(6, 4, |_, _| rng.random_range(-1.0..1.0));
        for j in 0..4 {
            let direct = entry_l1(&(&b * &basis.eigvecs * alpha.column(j)).into_owned());
            let weighted: f64 = (0..6)
                .map(|i| basis.penalty_weights[i] * alpha[(i, j)].abs())
                .sum();
            assert_abs_diff_eq!(direct, weighted, epsilon = 1e-8);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]
        #[test]
        fn union_rule_matches_brute_force(seed in 0u64..200, n in 4usize..24, k_g in 1usize..4) {
            let k_g = k_g.min(n - 1);
            let x = random_points(2, n, seed);
            let g = build_knn_affinity(&x, &cfg(k_g, 1)).unwrap();
            let expect = brute_force_edges(&x, k_g);
            for i in 0..n {
                for j in 0..n {
                    let present = g.weight(i, j) > 0.0;
                    prop_assert_eq!(present, expect[i][j] && i != j,
                        "edge ({}, {}) mismatch", i, j);
                    prop_assert!((g.weight(i, j) - g.weight(j, i)).abs() == 0.0);
                }
                prop_assert!(g.weight(i, i) == 0.0);
                prop_assert!(g.degree(i) > 0.0);
            }
        }
    }
}
