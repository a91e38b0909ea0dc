//! Overlapping community detection in the spectral space.
//!
//! Non-noise nodes are clustered in one pass by angle to a set of running
//! centroids seeded from the leading eigenvectors. A node whose angle to a
//! second centroid lands in `[π/4 - φ, π/4 + φ]` also joins that community and
//! becomes a bridging node.
//!
//! Labels are 0-based in memory and written 1-based in CSV exports.

use std::collections::BTreeSet;
use std::f64::consts::{FRAC_PI_4, PI};
use std::fmt::{self, Write as _};

use thiserror::Error;

use crate::spectral::{
    classify_noise, pca, snr, Matrix, NodeSpectralCoords, Pca, PcaOptions, PrincipalSubspace, SpectralError,
    DEFAULT_ENERGY_RATIO,
};

/// Overlap coefficient φ: 0.027π radians, a little under 5°.
pub const DEFAULT_PHI: f64 = 0.027 * PI;

#[derive(Debug, Error, PartialEq)]
pub enum CommunityError {
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error("no structure: every node is noise")]
    NoStructure,
    #[error("phi must lie in [0, pi/4), got {0}")]
    InvalidPhi(f64),
    #[error("energy ratio must lie in (0, 1], got {0}")]
    InvalidRatio(f64),
    #[error("angle undefined for a zero vector")]
    ZeroVector,
    #[error("need at least 2 nodes, got {0}")]
    TooSmall(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Category {
    Noise,
    Strong,
    Bridging,
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Category::Noise => "noise",
            Category::Strong => "strong",
            Category::Bridging => "bridging",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Centroid {
    pub index: usize,
    pub m: Vec<f64>,
    /// Strong members backing the mean.
    pub n_strong: usize,
    /// Set when every contributor left, so `m` holds the last valid mean.
    pub frozen: bool,
    sum: Vec<f64>,
}

impl Centroid {
    /// Centroid placed at a single seed point.
    pub fn seeded(index: usize, point: &[f64]) -> Self {
        Centroid { index, m: point.to_vec(), n_strong: 1, frozen: false, sum: point.to_vec() }
    }

    fn add(&mut self, point: &[f64]) {
        for (s, p) in self.sum.iter_mut().zip(point) {
            *s += p;
        }
        self.n_strong += 1;
        self.frozen = false;
        self.refresh();
    }

    fn remove(&mut self, point: &[f64]) {
        for (s, p) in self.sum.iter_mut().zip(point) {
            *s -= p;
        }
        self.n_strong -= 1;
        if self.n_strong == 0 {
            self.frozen = true;
        } else {
            self.refresh();
        }
    }

    fn refresh(&mut self) {
        let n = self.n_strong as f64;
        self.m = self.sum.iter().map(|s| s / n).collect();
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CommunityAssignment {
    pub k: usize,
    pub com: Vec<BTreeSet<usize>>,
    pub category: Vec<Category>,
    /// Community chosen by minimum angle; `None` for noise.
    pub primary: Vec<Option<usize>>,
    pub centroids: Vec<Centroid>,
    pub phi: f64,
}

impl CommunityAssignment {
    /// Every node noise, `k = 1`, no centroids.
    pub fn all_noise(n: usize, phi: f64) -> Self {
        CommunityAssignment {
            k: 1,
            com: vec![BTreeSet::new(); n],
            category: vec![Category::Noise; n],
            primary: vec![None; n],
            centroids: Vec::new(),
            phi,
        }
    }

    pub fn n(&self) -> usize {
        self.com.len()
    }

    pub fn is_noise(&self, u: usize) -> bool {
        self.category[u] == Category::Noise
    }

    /// Nodes carrying `label`, strong and bridging alike.
    pub fn members(&self, label: usize) -> Vec<usize> {
        (0..self.n()).filter(|&u| self.com[u].contains(&label)).collect()
    }

    pub fn stats(&self) -> CommunityStats {
        let n = self.n().max(1) as f64;
        let count = |c: Category| self.category.iter().filter(|&&x| x == c).count() as f64 * 100.0 / n;
        CommunityStats {
            k: self.k,
            noise_pct: count(Category::Noise),
            strong_pct: count(Category::Strong),
            bridging_pct: count(Category::Bridging),
        }
    }

    /// `node,category,labels` with 1-based `|`-separated labels.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("node,category,labels\n");
        for u in 0..self.n() {
            let labels: Vec<String> = self.com[u].iter().map(|l| (l + 1).to_string()).collect();
            let _ = writeln!(out, "{u},{},{}", self.category[u], labels.join("|"));
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CommunityStats {
    pub k: usize,
    pub noise_pct: f64,
    pub bridging_pct: f64,
    pub strong_pct: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CommunityParams {
    /// Cumulative energy ratio used to pick `k`.
    pub ratio: f64,
    /// Overlap half-width around π/4, radians.
    pub phi: f64,
    /// Measure angles on the first `k` coordinates of α only.
    pub truncate_to_k: bool,
    pub pca: PcaOptions,
}

impl Default for CommunityParams {
    fn default() -> Self {
        CommunityParams { ratio: DEFAULT_ENERGY_RATIO, phi: DEFAULT_PHI, truncate_to_k: true, pca: PcaOptions::default() }
    }
}

impl CommunityParams {
    pub fn validate(&self) -> Result<(), CommunityError> {
        if !(self.phi >= 0.0 && self.phi < FRAC_PI_4) {
            return Err(CommunityError::InvalidPhi(self.phi));
        }
        if !(self.ratio > 0.0 && self.ratio <= 1.0) {
            return Err(CommunityError::InvalidRatio(self.ratio));
        }
        Ok(())
    }
}

/// Coordinates used for angles: α rows cut to `dim` columns.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralPoints {
    rows: Vec<Vec<f64>>,
}

impl SpectralPoints {
    pub fn new(coords: &NodeSpectralCoords, dim: usize) -> Self {
        SpectralPoints { rows: (0..coords.n()).map(|u| coords.row(u)[..dim].to_vec()).collect() }
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Self {
        SpectralPoints { rows }
    }

    pub fn n(&self) -> usize {
        self.rows.len()
    }

    pub fn point(&self, u: usize) -> &[f64] {
        &self.rows[u]
    }
}

/// θ(u, i) = arccos(α·m / (‖α‖‖m‖)), with the cosine clamped to [-1, 1].
pub fn angular_distance(alpha: &[f64], m: &[f64]) -> Result<f64, CommunityError> {
    let dot: f64 = alpha.iter().zip(m).map(|(a, b)| a * b).sum();
    let na = alpha.iter().map(|a| a * a).sum::<f64>().sqrt();
    let nm = m.iter().map(|a| a * a).sum::<f64>().sqrt();
    if na == 0.0 || nm == 0.0 {
        return Err(CommunityError::ZeroVector);
    }
    Ok((dot / (na * nm)).clamp(-1.0, 1.0).acos())
}

/// Seeds one centroid per dimension `i < k` at the non-noise node with the
/// largest `|α_ui|`, ties to the lowest id. The seeded node receives label `i`.
pub fn initial_centroids(
    coords: &NodeSpectralCoords,
    points: &SpectralPoints,
    k: usize,
    noise: &[bool],
) -> Result<(Vec<Centroid>, Vec<BTreeSet<usize>>), CommunityError> {
    let n = coords.n();
    let mut com = vec![BTreeSet::new(); n];
    let mut centroids = Vec::with_capacity(k);
    for i in 0..k {
        let mut best: Option<(usize, f64)> = None;
        for u in (0..n).filter(|&u| !noise[u]) {
            let a = coords.row(u)[i].abs();
            if best.is_none_or(|(_, b)| a > b) {
                best = Some((u, a));
            }
        }
        let (v, _) = best.ok_or(CommunityError::NoStructure)?;
        centroids.push(Centroid::seeded(i, points.point(v)));
        com[v].insert(i);
    }
    Ok((centroids, com))
}

fn angles_to(point: &[f64], centroids: &[Centroid]) -> Vec<f64> {
    centroids.iter().map(|c| angular_distance(point, &c.m).unwrap_or(f64::INFINITY)).collect()
}

fn argmin(values: &[f64]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, &v) in values.iter().enumerate() {
        if v.is_finite() && best.is_none_or(|b| v < values[b]) {
            best = Some(i);
        }
    }
    best
}

/// Single pass over nodes in ascending id order.
///
/// Each non-noise node takes the nearest centroid as its primary community
/// and every other centroid at an angle within `[π/4 - φ, π/4 + φ]` as an
/// extra one, both measured against the centroids as they stand at the
/// node's visit. Only nodes that end up with a single label feed the running
/// mean of their centroid.
pub fn cluster_nodes(
    points: &SpectralPoints,
    mut centroids: Vec<Centroid>,
    seeded: Vec<BTreeSet<usize>>,
    noise: &[bool],
    phi: f64,
) -> CommunityAssignment {
    let n = points.n();
    let k = centroids.len();
    let mut com = seeded.clone();
    let mut category = vec![Category::Noise; n];
    let mut primary = vec![None; n];

    for u in 0..n {
        if noise[u] {
            continue;
        }
        let point = points.point(u);
        let theta = angles_to(point, &centroids);
        let Some(i) = argmin(&theta) else {
            // no usable angle; treated as noise
            com[u].clear();
            continue;
        };
        primary[u] = Some(i);
        com[u].insert(i);
        let mut bridging = false;
        for (j, &t) in theta.iter().enumerate() {
            if j != i && (t - FRAC_PI_4).abs() <= phi {
                com[u].insert(j);
                bridging = true;
            }
        }
        category[u] = if bridging { Category::Bridging } else { Category::Strong };

        let strong_here = com[u].len() == 1;
        if seeded[u].is_empty() {
            if strong_here {
                centroids[i].add(point);
            }
        } else if !strong_here {
            for &s in &seeded[u] {
                centroids[s].remove(point);
            }
        }
    }

    CommunityAssignment { k, com, category, primary, centroids, phi }
}

/// Makes categories agree with label counts: two or more labels is
/// bridging, exactly one is strong. Noise nodes are left alone.
pub fn adjust_categories(mut a: CommunityAssignment) -> CommunityAssignment {
    for u in 0..a.n() {
        if a.category[u] == Category::Noise {
            continue;
        }
        let labels = a.com[u].len();
        if labels >= 2 && a.category[u] == Category::Strong {
            a.category[u] = Category::Bridging;
        } else if labels == 1 && a.category[u] == Category::Bridging {
            a.category[u] = Category::Strong;
        } else if labels == 0 {
            a.category[u] = Category::Noise;
        }
    }
    a
}

/// Sum of squared distances from strong members to their centroid.
pub fn objective_j(a: &CommunityAssignment, points: &SpectralPoints) -> f64 {
    let mut j = 0.0;
    for u in 0..a.n() {
        if a.category[u] != Category::Strong {
            continue;
        }
        let Some(&label) = a.com[u].iter().next() else { continue };
        let Some(c) = a.centroids.get(label) else { continue };
        j += points.point(u).iter().zip(&c.m).map(|(x, m)| (x - m).powi(2)).sum::<f64>();
    }
    j
}

/// Nearest-centroid label of every non-noise node against fixed centroids.
pub fn reassign_with_frozen_centroids(a: &CommunityAssignment, points: &SpectralPoints) -> Vec<Option<usize>> {
    (0..a.n())
        .map(|u| if a.primary[u].is_none() { None } else { argmin(&angles_to(points.point(u), &a.centroids)) })
        .collect()
}

/// Everything the pipeline produced for one snapshot.
#[derive(Debug, Clone, PartialEq)]
pub struct CommunityAnalysis {
    pub pca: Pca,
    pub subspace: PrincipalSubspace,
    pub coords: NodeSpectralCoords,
    pub points: SpectralPoints,
    pub snr: Vec<f64>,
    pub assignment: CommunityAssignment,
}

impl CommunityAnalysis {
    pub fn k(&self) -> usize {
        self.assignment.k
    }
}

/// PCA, `k` selection, noise classification, seeding, clustering and
/// category adjustment on a weight snapshot.
///
/// A snapshot with no energy at all yields every node as noise with `k = 1`.
/// When `k` reaches `n` there is no noise subspace and no node is noise.
pub fn detect_communities(w: &Matrix, params: &CommunityParams) -> Result<CommunityAnalysis, CommunityError> {
    params.validate()?;
    let n = w.rows();
    if n < 2 {
        return Err(CommunityError::TooSmall(n));
    }
    let pca = pca(w, params.pca)?;
    let coords = NodeSpectralCoords::from_pca(&pca, params.pca.alpha);
    let decomposition = &pca.decomposition;

    if decomposition.total_energy() <= 0.0 {
        let subspace = PrincipalSubspace::with_k(decomposition, 1, params.ratio);
        let points = SpectralPoints::new(&coords, if params.truncate_to_k { 1 } else { n });
        return Ok(CommunityAnalysis {
            assignment: CommunityAssignment::all_noise(n, params.phi),
            snr: vec![0.0; n],
            pca,
            subspace,
            coords,
            points,
        });
    }

    let subspace = PrincipalSubspace::select(decomposition, params.ratio)?;
    let k = subspace.k;
    let eigenvalues = &decomposition.eigenvalues;
    let (noise, ratios): (Vec<bool>, Vec<f64>) = if k >= n {
        (vec![false; n], vec![f64::INFINITY; n])
    } else {
        let mut noise = Vec::with_capacity(n);
        let mut ratios = Vec::with_capacity(n);
        for u in 0..n {
            noise.push(classify_noise(u, eigenvalues, &coords, k)?);
            ratios.push(snr(u, eigenvalues, &coords, k)?);
        }
        (noise, ratios)
    };
    if noise.iter().all(|&x| x) {
        return Err(CommunityError::NoStructure);
    }

    let points = SpectralPoints::new(&coords, if params.truncate_to_k { k } else { n });
    let (centroids, seeded) = initial_centroids(&coords, &points, k, &noise)?;
    let assignment = adjust_categories(cluster_nodes(&points, centroids, seeded, &noise, params.phi));
    Ok(CommunityAnalysis { pca, subspace, coords, points, snr: ratios, assignment })
}
