//! PCA of a graph snapshot and the quantities derived from it: the principal
//! subspace, node spectral coordinates, per-node signal-to-noise ratio and
//! partial centrality.
//!
//! The covariance is `C = WᵀW / (n - 1)`; whether `W` is column-centered
//! first is a [`PcaOptions`] switch. Eigenpairs are sorted by descending
//! eigenvalue and every eigenvector is sign-fixed so that its entry of
//! largest magnitude is positive, which makes coordinates reproducible.

mod centrality;
mod jacobi;
mod matrix;

use std::fmt::Write as _;

use thiserror::Error;

pub use centrality::{degree_centrality, partial_degree_centrality};
pub use jacobi::{jacobi_eigen, MAX_SWEEPS, RELATIVE_TOLERANCE};
pub use matrix::Matrix;

#[derive(Debug, Error, PartialEq)]
pub enum SpectralError {
    #[error("matrix is {0}x{1}, expected square")]
    NotSquare(usize, usize),
    #[error("matrix is not symmetric (max asymmetry {0:e})")]
    NotSymmetric(f64),
    #[error("matrix has non-finite entries")]
    NonFinite,
    #[error("covariance needs at least 2 rows, got {0}")]
    TooSmall(usize),
    #[error("Jacobi iteration did not converge after {sweeps} sweeps (off-diagonal residual {residual:e})")]
    NoConvergence { sweeps: usize, residual: f64 },
    #[error("empty eigenvalue list")]
    EmptySpectrum,
    #[error("k = {k} leaves no noise subspace in dimension {n}")]
    NoNoiseSubspace { k: usize, n: usize },
    #[error("dimension {dim} outside the principal subspace of size {k}")]
    DimensionOutOfRange { dim: usize, k: usize },
    #[error("no dimensions given")]
    EmptyDimensions,
    #[error("node {node} out of range for dimension {n}")]
    UnknownNode { node: usize, n: usize },
}

/// Eigenvalues below zero but above `-NEGATIVE_CLAMP · λ₁` are rounding noise
/// of a PSD matrix and are set to zero.
pub const NEGATIVE_CLAMP: f64 = 1e-10;

/// Default cumulative energy ratio for choosing `k`.
pub const DEFAULT_ENERGY_RATIO: f64 = 0.85;

/// Subtracts each column's mean. Returns the centered matrix and the means.
pub fn center_columns(w: &Matrix) -> (Matrix, Vec<f64>) {
    let rows = w.rows();
    let means: Vec<f64> = (0..w.cols())
        .map(|c| if rows == 0 { 0.0 } else { (0..rows).map(|r| w[(r, c)]).sum::<f64>() / rows as f64 })
        .collect();
    let centered = Matrix::from_fn(rows, w.cols(), |r, c| w[(r, c)] - means[c]);
    (centered, means)
}

/// `WᵀW / (n - 1)`, built exactly symmetric.
pub fn covariance(w: &Matrix) -> Result<Matrix, SpectralError> {
    let n = w.rows();
    if n < 2 {
        return Err(SpectralError::TooSmall(n));
    }
    let cols = w.cols();
    let mut c = Matrix::zeros(cols, cols);
    let scale = 1.0 / (n - 1) as f64;
    for i in 0..cols {
        for j in i..cols {
            let mut s = 0.0;
            for r in 0..n {
                s += w[(r, i)] * w[(r, j)];
            }
            c[(i, j)] = s * scale;
            c[(j, i)] = s * scale;
        }
    }
    Ok(c)
}

/// Sorted eigendecomposition `Pᵀ C P = Λ` of a symmetric matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralDecomposition {
    /// λ₁ ≥ λ₂ ≥ … ≥ λₙ.
    pub eigenvalues: Vec<f64>,
    /// Column `i` is the eigenvector of `eigenvalues[i]`.
    pub eigenvectors: Matrix,
    /// Means removed before the covariance was formed; zeros when the data
    /// was not centered.
    pub column_means: Vec<f64>,
}

impl SpectralDecomposition {
    pub fn n(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn total_energy(&self) -> f64 {
        self.eigenvalues.iter().map(|l| l.max(0.0)).sum()
    }

    /// `P Λ Pᵀ`.
    pub fn reconstruct(&self) -> Matrix {
        let n = self.n();
        let p = &self.eigenvectors;
        Matrix::from_fn(n, n, |r, c| (0..n).map(|i| p[(r, i)] * self.eigenvalues[i] * p[(c, i)]).sum())
    }

    /// Dumps the eigenvalues on the first line and the rows of `P` after it.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("# eigenvalues\n");
        let vals: Vec<String> = self.eigenvalues.iter().map(f64::to_string).collect();
        let _ = writeln!(out, "{}", vals.join(","));
        out.push_str("# eigenvectors (column i pairs with eigenvalue i)\n");
        for r in 0..self.eigenvectors.rows() {
            let row: Vec<String> = self.eigenvectors.row(r).iter().map(f64::to_string).collect();
            let _ = writeln!(out, "{}", row.join(","));
        }
        out
    }
}

/// Eigendecomposition of a symmetric matrix with descending eigenvalues,
/// clamped rounding negatives and the largest-entry-positive sign gauge.
pub fn eigendecompose(c: &Matrix) -> Result<SpectralDecomposition, SpectralError> {
    if !c.is_square() {
        return Err(SpectralError::NotSquare(c.rows(), c.cols()));
    }
    if !c.is_finite() {
        return Err(SpectralError::NonFinite);
    }
    let n = c.rows();
    let scale = c.max_abs();
    let asym = c.max_abs_diff(&c.transpose());
    if asym > 1e-12 * scale.max(f64::MIN_POSITIVE) {
        return Err(SpectralError::NotSymmetric(asym));
    }

    let (values, vectors) = jacobi_eigen(c)?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b)));

    let mut eigenvalues: Vec<f64> = order.iter().map(|&i| values[i]).collect();
    let floor = -NEGATIVE_CLAMP * eigenvalues.first().copied().unwrap_or(0.0).max(0.0);
    for l in &mut eigenvalues {
        if *l < 0.0 && *l > floor {
            *l = 0.0;
        }
    }
    let mut eigenvectors = Matrix::from_fn(n, n, |r, c| vectors[(r, order[c])]);
    for col in 0..n {
        let mut pivot = 0;
        for r in 1..n {
            if eigenvectors[(r, col)].abs() > eigenvectors[(pivot, col)].abs() {
                pivot = r;
            }
        }
        if eigenvectors[(pivot, col)] < 0.0 {
            for r in 0..n {
                eigenvectors[(r, col)] = -eigenvectors[(r, col)];
            }
        }
    }
    Ok(SpectralDecomposition { eigenvalues, eigenvectors, column_means: vec![0.0; n] })
}

/// How node coordinates in the spectral space are read off the PCA.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AlphaMode {
    /// `α_u` is row `u` of the eigenvector matrix `P`.
    #[default]
    EigenvectorRows,
    /// `α_u` is the projection `w_u · P` of node `u`'s (possibly centered)
    /// weight row.
    Projection,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PcaOptions {
    /// Subtract column means before forming the covariance.
    pub centering: bool,
    pub alpha: AlphaMode,
}

impl Default for PcaOptions {
    fn default() -> Self {
        PcaOptions { centering: false, alpha: AlphaMode::EigenvectorRows }
    }
}

/// Output of the PCA step: the decomposition plus the data matrix it was
/// computed from (centered or not).
#[derive(Debug, Clone, PartialEq)]
pub struct Pca {
    pub decomposition: SpectralDecomposition,
    pub data: Matrix,
}

/// Center (optionally), form the covariance and diagonalize it.
pub fn pca(w: &Matrix, options: PcaOptions) -> Result<Pca, SpectralError> {
    if !w.is_square() {
        return Err(SpectralError::NotSquare(w.rows(), w.cols()));
    }
    let (data, means) = if options.centering {
        center_columns(w)
    } else {
        (w.clone(), vec![0.0; w.cols()])
    };
    let c = covariance(&data)?;
    let mut decomposition = eigendecompose(&c)?;
    decomposition.column_means = means;
    Ok(Pca { decomposition, data })
}

/// Smallest `k` whose leading eigenvalues carry at least `ratio` of the total
/// energy. Negative eigenvalues count as zero; an all-zero spectrum gives 1.
pub fn select_k(eigenvalues: &[f64], ratio: f64) -> Result<usize, SpectralError> {
    if eigenvalues.is_empty() {
        return Err(SpectralError::EmptySpectrum);
    }
    let total: f64 = eigenvalues.iter().map(|l| l.max(0.0)).sum();
    if total <= 0.0 {
        return Ok(1);
    }
    let mut acc = 0.0;
    for (i, l) in eigenvalues.iter().enumerate() {
        acc += l.max(0.0);
        if acc >= ratio * total {
            return Ok(i + 1);
        }
    }
    Ok(eigenvalues.len())
}

/// The leading `k` eigenpairs selected by the energy ratio.
#[derive(Debug, Clone, PartialEq)]
pub struct PrincipalSubspace {
    pub k: usize,
    pub ratio: f64,
    /// First `k` eigenvectors as columns.
    pub basis: Matrix,
    /// First `k` eigenvalues.
    pub eigenvalues: Vec<f64>,
}

impl PrincipalSubspace {
    pub fn select(decomposition: &SpectralDecomposition, ratio: f64) -> Result<Self, SpectralError> {
        let k = select_k(&decomposition.eigenvalues, ratio)?;
        Ok(Self::with_k(decomposition, k, ratio))
    }

    pub fn with_k(decomposition: &SpectralDecomposition, k: usize, ratio: f64) -> Self {
        PrincipalSubspace {
            k,
            ratio,
            basis: decomposition.eigenvectors.leading_columns(k),
            eigenvalues: decomposition.eigenvalues[..k].to_vec(),
        }
    }
}

/// Per-node coordinates `α_u` in the spectral space (one row per node).
#[derive(Debug, Clone, PartialEq)]
pub struct NodeSpectralCoords {
    pub alpha: Matrix,
}

impl NodeSpectralCoords {
    pub fn from_pca(pca: &Pca, mode: AlphaMode) -> Self {
        let alpha = match mode {
            AlphaMode::EigenvectorRows => pca.decomposition.eigenvectors.clone(),
            AlphaMode::Projection => pca.data.matmul(&pca.decomposition.eigenvectors),
        };
        NodeSpectralCoords { alpha }
    }

    pub fn n(&self) -> usize {
        self.alpha.rows()
    }

    pub fn row(&self, u: usize) -> &[f64] {
        self.alpha.row(u)
    }

    /// Signal and noise energy of node `u` split at `k`:
    /// `Σ_{i<k} (λ_i α_ui)²` and `Σ_{j≥k} (λ_j α_uj)²`.
    pub fn energy_split(&self, u: usize, eigenvalues: &[f64], k: usize) -> (f64, f64) {
        let row = self.row(u);
        let term = |i: usize| (eigenvalues[i] * row[i]).powi(2);
        let signal = (0..k).map(term).sum();
        let noise = (k..row.len()).map(term).sum();
        (signal, noise)
    }
}

/// Signal-to-noise ratio of node `u`. Infinite when the noise energy is zero
/// and the signal is not; zero when both vanish.
pub fn snr(u: usize, eigenvalues: &[f64], coords: &NodeSpectralCoords, k: usize) -> Result<f64, SpectralError> {
    if u >= coords.n() {
        return Err(SpectralError::UnknownNode { node: u, n: coords.n() });
    }
    let n = eigenvalues.len();
    if k == 0 || k >= n {
        return Err(SpectralError::NoNoiseSubspace { k, n });
    }
    let (signal, noise) = coords.energy_split(u, eigenvalues, k);
    Ok(if noise > 0.0 {
        signal / noise
    } else if signal > 0.0 {
        f64::INFINITY
    } else {
        0.0
    })
}

/// A node is noise iff its SNR is strictly below 1.
pub fn classify_noise(
    u: usize,
    eigenvalues: &[f64],
    coords: &NodeSpectralCoords,
    k: usize,
) -> Result<bool, SpectralError> {
    Ok(snr(u, eigenvalues, coords, k)? < 1.0)
}

/// `|α_ui| · λ_i` for a dimension `i < k` (0-based).
pub fn partial_centrality(
    u: usize,
    dim: usize,
    coords: &NodeSpectralCoords,
    subspace: &PrincipalSubspace,
) -> Result<f64, SpectralError> {
    if dim >= subspace.k {
        return Err(SpectralError::DimensionOutOfRange { dim, k: subspace.k });
    }
    if u >= coords.n() {
        return Err(SpectralError::UnknownNode { node: u, n: coords.n() });
    }
    Ok(coords.row(u)[dim].abs() * subspace.eigenvalues[dim])
}

/// Sum of [`partial_centrality`] over a non-empty set of dimensions.
pub fn total_partial_centrality(
    u: usize,
    dims: &[usize],
    coords: &NodeSpectralCoords,
    subspace: &PrincipalSubspace,
) -> Result<f64, SpectralError> {
    if dims.is_empty() {
        return Err(SpectralError::EmptyDimensions);
    }
    dims.iter().map(|&d| partial_centrality(u, d, coords, subspace)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_symmetric(n: usize, rng: &mut ChaCha8Rng) -> Matrix {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let v = rng.random_range(-1.0..1.0);
                m[(i, j)] = v;
                m[(j, i)] = v;
            }
        }
        m
    }

    fn assert_invariants(c: &Matrix, d: &SpectralDecomposition) {
        let n = d.n();
        let p = &d.eigenvectors;
        let ptp = p.transpose().matmul(p);
        assert!(ptp.max_abs_diff(&Matrix::identity(n)) <= 1e-8);
        let l1 = d.eigenvalues[0].abs().max(1.0);
        for i in 0..n {
            let x = p.column(i);
            for r in 0..n {
                let cx: f64 = (0..n).map(|j| c[(r, j)] * x[j]).sum();
                assert!((cx - d.eigenvalues[i] * x[r]).abs() <= 1e-7 * l1);
            }
        }
        for w in d.eigenvalues.windows(2) {
            assert!(w[0] >= w[1]);
        }
    }

    #[test]
    fn center_columns_examples() {
        let (z, means) = center_columns(&Matrix::zeros(3, 3));
        assert_eq!(z, Matrix::zeros(3, 3));
        assert_eq!(means, vec![0.0; 3]);

        let w = Matrix::from_rows(&[vec![4.0, 1.0], vec![4.0, 2.0], vec![4.0, 6.0]]);
        let (c, means) = center_columns(&w);
        assert_eq!(means, vec![4.0, 3.0]);
        assert_eq!(c.column(0), vec![0.0; 3]);
        assert_eq!(c.column(1), vec![-2.0, -1.0, 3.0]);
    }

    #[test]
    fn covariance_examples() {
        assert_eq!(covariance(&Matrix::zeros(4, 4)).unwrap(), Matrix::zeros(4, 4));
        assert_eq!(covariance(&Matrix::zeros(1, 3)), Err(SpectralError::TooSmall(1)));
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let w = random_symmetric(6, &mut rng);
        let (wc, _) = center_columns(&w);
        let c = covariance(&wc).unwrap();
        assert_eq!(c, c.transpose());
        for _ in 0..50 {
            let x: Vec<f64> = (0..6).map(|_| rng.random_range(-1.0..1.0)).collect();
            let q: f64 = (0..6).flat_map(|i| (0..6).map(move |j| (i, j))).map(|(i, j)| x[i] * c[(i, j)] * x[j]).sum();
            assert!(q >= -1e-10);
        }
    }

    #[test]
    fn textbook_two_by_two() {
        let c = Matrix::from_rows(&[vec![2.0, 1.0], vec![1.0, 2.0]]);
        let d = eigendecompose(&c).unwrap();
        assert!((d.eigenvalues[0] - 3.0).abs() < 1e-12);
        assert!((d.eigenvalues[1] - 1.0).abs() < 1e-12);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        // column 0 = (1,1)/√2; column 1 = ±(1,-1)/√2 with the tie on |entry|
        // resolved towards index 0 being positive
        assert!((d.eigenvectors[(0, 0)] - h).abs() < 1e-12);
        assert!((d.eigenvectors[(1, 0)] - h).abs() < 1e-12);
        assert!((d.eigenvectors[(0, 1)] - h).abs() < 1e-12);
        assert!((d.eigenvectors[(1, 1)] + h).abs() < 1e-12);
    }

    #[test]
    fn diagonal_matrix() {
        let c = Matrix::from_rows(&[vec![2.0, 0.0, 0.0], vec![0.0, 5.0, 0.0], vec![0.0, 0.0, 1.0]]);
        let d = eigendecompose(&c).unwrap();
        assert_eq!(d.eigenvalues, vec![5.0, 2.0, 1.0]);
        let expected = Matrix::from_rows(&[vec![0.0, 1.0, 0.0], vec![1.0, 0.0, 0.0], vec![0.0, 0.0, 1.0]]);
        assert_eq!(d.eigenvectors, expected);
    }

    #[test]
    fn random_symmetric_reconstruction() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let c = random_symmetric(8, &mut rng);
        let d = eigendecompose(&c).unwrap();
        assert!(d.reconstruct().max_abs_diff(&c) <= 1e-7);
        assert_invariants(&c, &d);
    }

    #[test]
    fn agrees_with_nalgebra_eigenvalues() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for n in [3, 7, 15] {
            let c = random_symmetric(n, &mut rng);
            let d = eigendecompose(&c).unwrap();
            let na = nalgebra::DMatrix::from_fn(n, n, |r, col| c[(r, col)]);
            let mut reference: Vec<f64> = na.symmetric_eigenvalues().iter().copied().collect();
            reference.sort_by(|a, b| b.total_cmp(a));
            for (a, b) in d.eigenvalues.iter().zip(&reference) {
                assert!((a - b).abs() < 1e-9, "{a} vs {b}");
            }
        }
    }

    #[test]
    fn rejects_bad_input() {
        assert_eq!(eigendecompose(&Matrix::zeros(2, 3)), Err(SpectralError::NotSquare(2, 3)));
        let asym = Matrix::from_rows(&[vec![1.0, 2.0], vec![0.0, 1.0]]);
        assert!(matches!(eigendecompose(&asym), Err(SpectralError::NotSymmetric(_))));
        let nan = Matrix::from_rows(&[vec![f64::NAN, 0.0], vec![0.0, 1.0]]);
        assert_eq!(eigendecompose(&nan), Err(SpectralError::NonFinite));
    }

    #[test]
    fn tiny_negatives_are_clamped() {
        // rank-one PSD matrix; its two zero eigenvalues may come out as
        // rounding noise of either sign
        let x = [0.3, -0.7, 0.2];
        let c = Matrix::from_fn(3, 3, |r, c| x[r] * x[c]);
        let d = eigendecompose(&c).unwrap();
        assert!(d.eigenvalues.iter().all(|&l| l >= 0.0));
    }

    #[test]
    fn select_k_examples() {
        assert_eq!(select_k(&[8.0, 1.0, 1.0], 0.85), Ok(2));
        assert_eq!(select_k(&[1.0, 0.0, 0.0], 0.85), Ok(1));
        assert_eq!(select_k(&[1.0, 0.0, 0.0], 1.0), Ok(1));
        assert_eq!(select_k(&[4.0, 3.0, 2.0, 1.0], 0.7), Ok(2));
        assert_eq!(select_k(&[0.0, 0.0], 0.85), Ok(1));
        assert_eq!(select_k(&[3.0, -1e-14], 0.85), Ok(1));
        assert_eq!(select_k(&[], 0.85), Err(SpectralError::EmptySpectrum));
    }

    fn coords(rows: &[Vec<f64>]) -> NodeSpectralCoords {
        NodeSpectralCoords { alpha: Matrix::from_rows(rows) }
    }

    #[test]
    fn snr_examples() {
        let l = [2.0, 1.0];
        let c = coords(&[vec![0.8, 0.6], vec![0.7, 0.0], vec![0.0, 0.9], vec![0.0, 0.0]]);
        let s = snr(0, &l, &c, 1).unwrap();
        assert!((s - 1.6f64.powi(2) / 0.36).abs() < 1e-12);
        assert!((s - 7.11).abs() < 0.01);
        assert_eq!(snr(1, &l, &c, 1), Ok(f64::INFINITY));
        assert_eq!(snr(2, &l, &c, 1), Ok(0.0));
        assert_eq!(snr(3, &l, &c, 1), Ok(0.0));
        assert_eq!(snr(0, &l, &c, 2), Err(SpectralError::NoNoiseSubspace { k: 2, n: 2 }));
        assert!(!classify_noise(0, &l, &c, 1).unwrap());
        assert!(classify_noise(2, &l, &c, 1).unwrap());
    }

    #[test]
    fn noise_threshold_is_strict() {
        // signal (1·1)² = 1, noise (1·1)² = 1 → SNR exactly 1 → not noise
        let l = [1.0, 1.0];
        let c = coords(&[vec![1.0, 1.0], vec![0.5, 1.0]]);
        assert_eq!(snr(0, &l, &c, 1), Ok(1.0));
        assert!(!classify_noise(0, &l, &c, 1).unwrap());
        assert_eq!(snr(1, &l, &c, 1), Ok(0.25));
        assert!(classify_noise(1, &l, &c, 1).unwrap());
    }

    fn subspace(eigenvalues: &[f64], k: usize) -> PrincipalSubspace {
        let n = eigenvalues.len();
        PrincipalSubspace { k, ratio: 0.85, basis: Matrix::identity(n).leading_columns(k), eigenvalues: eigenvalues[..k].to_vec() }
    }

    #[test]
    fn partial_centrality_examples() {
        let s = subspace(&[3.0, 1.0, 0.1], 2);
        let c = coords(&[vec![-0.5, 0.3, 0.1], vec![0.0, 0.2, 0.9]]);
        assert_eq!(partial_centrality(0, 0, &c, &s), Ok(1.5));
        assert_eq!(partial_centrality(1, 0, &c, &s), Ok(0.0));
        assert_eq!(partial_centrality(0, 2, &c, &s), Err(SpectralError::DimensionOutOfRange { dim: 2, k: 2 }));
        let single = total_partial_centrality(0, &[0], &c, &s).unwrap();
        assert_eq!(single, 1.5);
        let both = total_partial_centrality(0, &[0, 1], &c, &s).unwrap();
        assert!((both - 1.8).abs() < 1e-12);
        assert!(both >= single);
        assert_eq!(total_partial_centrality(0, &[], &c, &s), Err(SpectralError::EmptyDimensions));
    }

    #[test]
    fn scaling_weights_preserves_centrality_rankings() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let n = 10;
        let w = Matrix::from_fn(n, n, |r, c| if r == c { 0.0 } else { ((r * 7 + c * 7) % 5) as f64 + rng.random_range(0.0..0.01) });
        let w = Matrix::from_fn(n, n, |r, c| 0.5 * (w[(r, c)] + w[(c, r)]));
        let rank = |m: &Matrix| {
            let p = pca(m, PcaOptions::default()).unwrap();
            let s = PrincipalSubspace::select(&p.decomposition, 0.85).unwrap();
            let c = NodeSpectralCoords::from_pca(&p, AlphaMode::EigenvectorRows);
            let pcs: Vec<f64> = (0..n).map(|u| partial_centrality(u, 0, &c, &s).unwrap()).collect();
            let mut idx: Vec<usize> = (0..n).collect();
            idx.sort_by(|&a, &b| pcs[b].total_cmp(&pcs[a]).then(a.cmp(&b)));
            (idx, pcs, s.eigenvalues[0])
        };
        let (base_rank, base_pc, l1) = rank(&w);
        let (scaled_rank, scaled_pc, l1s) = rank(&w.scale(3.0));
        assert_eq!(base_rank, scaled_rank);
        assert!((l1s / l1 - 9.0).abs() < 1e-9);
        for (a, b) in base_pc.iter().zip(&scaled_pc) {
            assert!((b - 9.0 * a).abs() <= 1e-9 * b.abs().max(1.0));
        }
    }

    #[test]
    fn projection_mode_is_data_times_p() {
        let w = Matrix::from_rows(&[vec![0.0, 2.0, 1.0], vec![2.0, 0.0, 0.5], vec![1.0, 0.5, 0.0]]);
        let p = pca(&w, PcaOptions { centering: true, alpha: AlphaMode::Projection }).unwrap();
        let c = NodeSpectralCoords::from_pca(&p, AlphaMode::Projection);
        let expected = p.data.matmul(&p.decomposition.eigenvectors);
        assert_eq!(c.alpha, expected);
        assert!(p.decomposition.column_means.iter().all(|m| *m > 0.0));
    }

    #[test]
    fn energy_split_partitions_total() {
        let l = [3.0, 2.0, 0.5, 0.1];
        let c = coords(&[vec![0.1, -0.4, 0.7, 0.2]]);
        let total: f64 = (0..4).map(|i| (l[i] * c.row(0)[i]).powi(2)).sum();
        for k in 0..=4 {
            let (s, n) = c.energy_split(0, &l, k);
            assert!((s + n - total).abs() < 1e-15);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn decomposition_invariants_and_determinism(n in 2usize..12, seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let w = Matrix::from_fn(n, n, |_, _| rng.random_range(0.0..5.0));
            let (wc, _) = center_columns(&w);
            let c = covariance(&wc).unwrap();
            let d = eigendecompose(&c).unwrap();
            assert_invariants(&c, &d);
            prop_assert_eq!(&d, &eigendecompose(&c).unwrap());
            for col in 0..n {
                let x = d.eigenvectors.column(col);
                let pivot = (0..n).fold(0, |p, r| if x[r].abs() > x[p].abs() { r } else { p });
                prop_assert!(x[pivot] >= 0.0);
            }
        }
    }
}
