//! Spectrum of `ẑ` in each irrep, computed two ways.
//!
//! [`block_spectrum`] decomposes `ẑ` along `Π_{Y,X}` and diagonalizes the
//! Hermitian diagonal blocks, so its eigenvalues are real by construction.
//! [`dense_spectrum`] runs the general complex eigensolver on the full matrix
//! and reports how far from real the result is. Both are validated against
//! traces of powers of `ẑ`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::blocks::{block_grid, structure_report, EigenspaceLabel, Partition};
use crate::error::{Error, Result};
use crate::groupring::{quaquaversal_element, Generator, WordEvaluator};
use crate::linalg::{self, CMatrix, C64};
use crate::repgen::IrrepIndex;

/// Single-linkage distance for grouping eigenvalues.
pub const CLUSTER_TOL: f64 = 1e-7;
/// Cluster centroids with smaller imaginary part are reported as real.
pub const REAL_DROP_TOL: f64 = 1e-8;
/// Block route is refused above this structural residual.
pub const STRUCTURE_TOL: f64 = 1e-6;
/// Trace moments checked for `p = 1..=MOMENT_POWERS`.
pub const MOMENT_POWERS: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EigCluster {
    /// Real part of the centroid.
    pub value: f64,
    /// Imaginary part of the centroid, zeroed below [`REAL_DROP_TOL`].
    pub imag: f64,
    pub multiplicity: usize,
    /// Largest distance of a member from the centroid.
    pub spread: f64,
}

/// Groups eigenvalues whose single-linkage distance is at most `tol`.
/// Clusters come back sorted by real part.
pub fn cluster_eigenvalues(values: &[C64], tol: f64) -> Vec<EigCluster> {
    let n = values.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for i in 0..n {
        for j in i + 1..n {
            if (values[i] - values[j]).norm() <= tol {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[a] = b;
                }
            }
        }
    }
    let mut groups: std::collections::BTreeMap<usize, Vec<C64>> = Default::default();
    for (i, &v) in values.iter().enumerate() {
        let root = find(&mut parent, i);
        groups.entry(root).or_default().push(v);
    }
    let mut clusters: Vec<EigCluster> = groups
        .into_values()
        .map(|members| {
            let centroid: C64 = members.iter().sum::<C64>() / members.len() as f64;
            let spread = members
                .iter()
                .map(|m| (m - centroid).norm())
                .fold(0.0, f64::max);
            EigCluster {
                value: centroid.re,
                imag: if centroid.im.abs() <= REAL_DROP_TOL {
                    0.0
                } else {
                    centroid.im
                },
                multiplicity: members.len(),
                spread,
            }
        })
        .collect();
    clusters.sort_by(|a, b| a.value.total_cmp(&b.value).then(a.imag.total_cmp(&b.imag)));
    clusters
}

/// Total multiplicity of clusters within `tol` of `value`.
pub fn multiplicity_near(clusters: &[EigCluster], value: f64, tol: f64) -> usize {
    clusters
        .iter()
        .filter(|c| (C64::new(c.value, c.imag) - linalg::real(value)).norm() <= tol)
        .map(|c| c.multiplicity)
        .sum()
}

/// Bottleneck distance between two nearly real multisets: both are sorted
/// by real part and paired in order. Bounds the Hausdorff distance from above.
pub fn spectral_distance(a: &[C64], b: &[C64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    let sort = |v: &[C64]| {
        let mut v = v.to_vec();
        v.sort_by(|x, y| x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im)));
        v
    };
    sort(a)
        .iter()
        .zip(sort(b).iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpectrumMethod {
    Block,
    Dense,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReport {
    pub k: IrrepIndex,
    pub method: SpectrumMethod,
    #[serde(skip)]
    pub eigenvalues: Vec<C64>,
    pub clusters: Vec<EigCluster>,
    /// `max |Im λ|`.
    pub realness_residual: f64,
    /// `|Σ λᵖ − tr(ẑᵖ)|` for `p = 1..=6`.
    pub trace_moment_residuals: Vec<f64>,
    pub spectral_radius: f64,
    /// `1 − spectral_radius`.
    pub gap: f64,
    /// `n · ε · ‖ẑ‖_F`, the solver's backward-error scale.
    pub backward_error: f64,
}

impl SpectrumReport {
    fn build(k: IrrepIndex, method: SpectrumMethod, z: &CMatrix, eigenvalues: Vec<C64>) -> Self {
        let realness_residual = eigenvalues.iter().map(|l| l.im.abs()).fold(0.0, f64::max);
        let spectral_radius = eigenvalues.iter().map(|l| l.norm()).fold(0.0, f64::max);
        SpectrumReport {
            k,
            method,
            clusters: cluster_eigenvalues(&eigenvalues, CLUSTER_TOL),
            realness_residual,
            trace_moment_residuals: trace_moment_residuals(z, &eigenvalues),
            spectral_radius,
            gap: 1.0 - spectral_radius,
            backward_error: linalg::backward_error_estimate(z),
            eigenvalues,
        }
    }

    pub fn total_multiplicity(&self) -> usize {
        self.clusters.iter().map(|c| c.multiplicity).sum()
    }

    pub fn max_moment_residual(&self) -> f64 {
        self.trace_moment_residuals
            .iter()
            .copied()
            .fold(0.0, f64::max)
    }

    /// `|Σλᵖ − tr(ẑᵖ)| ≤ 1e-8 · (2k+1)` for every `p`.
    pub fn moments_valid(&self) -> bool {
        self.max_moment_residual() <= 1e-8 * self.k.dim() as f64
    }

    pub fn multiplicity_of(&self, value: f64) -> usize {
        multiplicity_near(&self.clusters, value, CLUSTER_TOL)
    }
}

fn trace_moment_residuals(z: &CMatrix, eigenvalues: &[C64]) -> Vec<f64> {
    let mut power = z.clone();
    let mut out = Vec::with_capacity(MOMENT_POWERS);
    for p in 1..=MOMENT_POWERS {
        if p > 1 {
            power = &power * z;
        }
        let sum: C64 = eigenvalues.iter().map(|l| l.powi(p as i32)).sum();
        out.push((sum - linalg::trace(&power)).norm());
    }
    out
}

/// `ẑ = π_{2k+1}(z)`.
pub fn quaquaversal_operator(k: IrrepIndex) -> CMatrix {
    quaquaversal_element().evaluate(k)
}

/// Union of the diagonal-block spectra under `Π_{Y,X}`.
pub fn block_spectrum(k: IrrepIndex) -> Result<SpectrumReport> {
    let z = quaquaversal_operator(k);
    let partition = Partition::quaquaversal(k)?;
    let grid = block_grid(&z, &partition)?;
    let structure = structure_report(&grid);
    if !structure.within(STRUCTURE_TOL) {
        return Err(Error::StructureViolation {
            k: k.k(),
            upper: structure.upper,
            hermiticity: structure.hermiticity,
            zero_block: structure.zero_block,
        });
    }
    let eigenvalues: Vec<C64> = (0..4)
        .flat_map(|i| linalg::hermitian_eigenvalues(grid.block(i, i)))
        .map(linalg::real)
        .collect();
    Ok(SpectrumReport::build(
        k,
        SpectrumMethod::Block,
        &z,
        eigenvalues,
    ))
}

/// General complex eigenvalues of the full matrix.
pub fn dense_spectrum(k: IrrepIndex) -> Result<SpectrumReport> {
    let z = quaquaversal_operator(k);
    let eigenvalues = linalg::eigenvalues(&z)?;
    Ok(SpectrumReport::build(
        k,
        SpectrumMethod::Dense,
        &z,
        eigenvalues,
    ))
}

/// Predicted floors on the multiplicities of `1/4`, `1/2` and `1/8`, with the
/// candidate closed forms for the `1/8` count tabulated next to the numeric
/// one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MultiplicityPrediction {
    pub k: IrrepIndex,
    /// `(2k+1 − (−1)^k)/4`.
    pub d: usize,
    /// Numeric dimension of the `+1` eigenspace of `T⁺` on `Λ_{+1,−1}`.
    pub q: usize,
    /// `⌊(k+4)/5⌋`.
    pub closed_form: usize,
    /// `#{m ∈ [−k, k] : m ≡ 1 (mod 6)}`.
    pub mod6_count: usize,
    pub floor_quarter: usize,
    pub floor_half: usize,
    pub floor_eighth: usize,
    pub q_matches_closed_form: bool,
    pub q_matches_mod6: bool,
    pub closed_form_matches_mod6: bool,
}

/// `⌊(k+4)/5⌋ = ⌈k/5⌉`, the closed form proposed for the `1/8` count.
pub fn floor_fifth_count(k: IrrepIndex) -> usize {
    (k.k() as usize).div_ceil(5)
}

pub fn mod6_weight_count(k: IrrepIndex) -> usize {
    k.weights().filter(|m| m.rem_euclid(6) == 1).count()
}

/// Number of eigenvalues within [`CLUSTER_TOL`] of `+1` of `T + T⁻¹`
/// restricted to `{v : S²v = v, T³v = −v}`.
pub fn numeric_q(k: IrrepIndex) -> Result<usize> {
    let partition = Partition::quaquaversal(k)?;
    let basis = partition.basis(EigenspaceLabel { alpha: 1, beta: -1 });
    let ev = WordEvaluator::new(k);
    let t = ev.power(Generator::T, 1);
    let t_plus = basis.adjoint() * (t + t.adjoint()) * basis;
    Ok(linalg::hermitian_eigenvalues(&t_plus)
        .into_iter()
        .filter(|x| (x - 1.0).abs() <= CLUSTER_TOL)
        .count())
}

pub fn predicted_multiplicities(k: IrrepIndex) -> Result<MultiplicityPrediction> {
    if k.k() < 1 {
        return Err(Error::InvalidArgument(
            "multiplicity predictions need k ≥ 1".into(),
        ));
    }
    let d = crate::blocks::predicted_dims(k)[1];
    let q = numeric_q(k)?;
    let closed = floor_fifth_count(k);
    let mod6 = mod6_weight_count(k);
    Ok(MultiplicityPrediction {
        k,
        d,
        q,
        closed_form: closed,
        mod6_count: mod6,
        floor_quarter: d,
        floor_half: 2 * d - q,
        floor_eighth: q,
        q_matches_closed_form: q == closed,
        q_matches_mod6: q == mod6,
        closed_form_matches_mod6: closed == mod6,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MultiplicityCheck {
    pub k: IrrepIndex,
    pub d: usize,
    pub q: usize,
    pub observed_eighth: usize,
    pub observed_quarter: usize,
    pub observed_half: usize,
    pub pass: bool,
    pub error: Option<String>,
}

/// Checks the dense spectrum against the multiplicity floors `1/4 ≥ d`,
/// `1/2 ≥ d`, `1/8 ≥ q`. Failures are reported in the record.
pub fn check_multiplicities(k: IrrepIndex) -> MultiplicityCheck {
    let failed = |error: String| MultiplicityCheck {
        k,
        d: 0,
        q: 0,
        observed_eighth: 0,
        observed_quarter: 0,
        observed_half: 0,
        pass: false,
        error: Some(error),
    };
    let prediction = match predicted_multiplicities(k) {
        Ok(p) => p,
        Err(e) => return failed(e.to_string()),
    };
    let spectrum = match dense_spectrum(k) {
        Ok(s) => s,
        Err(e) => return failed(e.to_string()),
    };
    let observed_eighth = spectrum.multiplicity_of(0.125);
    let observed_quarter = spectrum.multiplicity_of(0.25);
    let observed_half = spectrum.multiplicity_of(0.5);
    MultiplicityCheck {
        k,
        d: prediction.d,
        q: prediction.q,
        observed_eighth,
        observed_quarter,
        observed_half,
        pass: observed_quarter >= prediction.d
            && observed_half >= prediction.d
            && observed_eighth >= prediction.q,
        error: None,
    }
}

/// Eigenvalue range of the `Λ_{+1,+1}` diagonal block `(S⁺ + 4 + T⁺)/8`.
pub fn first_block_range(k: IrrepIndex) -> Result<(f64, f64)> {
    let z = quaquaversal_operator(k);
    let partition = Partition::quaquaversal(k)?;
    let basis = partition.basis(EigenspaceLabel::ALL[0]);
    if basis.ncols() == 0 {
        return Err(Error::EmptyBlock { k: k.k() });
    }
    let block = basis.adjoint() * z * basis;
    let values = linalg::hermitian_eigenvalues(&block);
    Ok((values[0], values[values.len() - 1]))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GapRow {
    pub k: IrrepIndex,
    pub spectral_radius: f64,
    pub gap: f64,
    pub realness_residual: f64,
    pub backward_error: f64,
    /// Largest spectral radius over rows `1..=k`.
    pub running_max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapScan {
    pub rows: Vec<GapRow>,
    pub max_radius: f64,
    pub argmax_k: IrrepIndex,
}

/// Dense spectral radius of `ẑ` for `k = 1..=k_max`. Rows are computed in
/// parallel on the current rayon pool and returned in order of `k`.
pub fn gap_scan(k_max: u32) -> Result<GapScan> {
    if k_max < 1 {
        return Err(Error::InvalidArgument("gap scan needs k_max ≥ 1".into()));
    }
    let reports: Vec<SpectrumReport> = (1..=k_max)
        .into_par_iter()
        .map(|k| dense_spectrum(IrrepIndex::new(k)))
        .collect::<Result<_>>()?;
    let mut rows = Vec::with_capacity(reports.len());
    let mut running: f64 = 0.0;
    let mut argmax = IrrepIndex::new(1);
    for r in reports {
        if r.spectral_radius > running {
            running = r.spectral_radius;
            argmax = r.k;
        }
        rows.push(GapRow {
            k: r.k,
            spectral_radius: r.spectral_radius,
            gap: r.gap,
            realness_residual: r.realness_residual,
            backward_error: r.backward_error,
            running_max: running,
        });
    }
    Ok(GapScan {
        rows,
        max_radius: running,
        argmax_k: argmax,
    })
}
