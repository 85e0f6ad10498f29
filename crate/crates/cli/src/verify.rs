//! The invariant suite behind `qq verify`.

use std::f64::consts::PI;

use quaquaversal::blocks::{
    block_grid, diagonal_block_mismatch, predicted_dims, scalar_term_residual, structure_report,
    verify_theorem_on, AxisPair, EigenspaceLabel, Partition,
};
use quaquaversal::linalg::{frobenius, identity, unitarity_defect};
use quaquaversal::repgen::{rot, SWEEP_ANGLES};
use quaquaversal::spectra::{
    block_spectrum, check_multiplicities, dense_spectrum, quaquaversal_operator, spectral_distance,
};
use quaquaversal::tiling::{moment_residual, GenerationIndex, MomentMode};
use quaquaversal::{Axis, IrrepIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

/// Random angles per `k` for the block-structure theorem.
pub const RANDOM_ANGLES: usize = 20;
/// Largest `k` and generation for the exact tiling-moment check.
pub const TILING_K_MAX: u32 = 6;
pub const TILING_N_MAX: u32 = 4;

const ALGEBRA_TOL: f64 = 1e-10;
const THEOREM_TOL: f64 = 1e-9;
const BLOCK_TOL: f64 = 1e-9;
const REALNESS_TOL: f64 = 1e-8;
const AGREEMENT_TOL: f64 = 1e-8;
const EXACT_MOMENT_TOL: f64 = 1e-10;
const GOLDEN_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Serialize)]
pub struct SuiteOptions {
    pub kmax: u32,
    pub pair: AxisPair,
    /// Extra angle for the theorem check.
    pub theta: Option<f64>,
    pub seed: u64,
    /// Replaces every per-check tolerance except the exact ones
    /// (dimensions, multiplicity floors, spectral radius).
    pub tol: Option<f64>,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        SuiteOptions {
            kmax: 10,
            pair: AxisPair::QUAQUAVERSAL,
            theta: None,
            seed: 0,
            tol: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: String,
    /// `None` for checks that are not tied to one irrep.
    pub k: Option<u32>,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl CheckResult {
    fn new(name: &str, k: u32, residual: f64, tolerance: f64) -> Self {
        CheckResult {
            name: name.to_owned(),
            k: Some(k),
            residual,
            tolerance,
            pass: residual <= tolerance,
            detail: None,
        }
    }

    fn failed(name: &str, k: u32, message: String) -> Self {
        CheckResult {
            name: name.to_owned(),
            k: Some(k),
            residual: f64::INFINITY,
            tolerance: 0.0,
            pass: false,
            detail: Some(message),
        }
    }

    fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = Some(detail.into());
        self
    }

    /// One human-readable line.
    pub fn line(&self) -> String {
        let k = self
            .k
            .map_or_else(|| "  -".to_owned(), |k| format!("{k:>3}"));
        let mut s = format!(
            "[{}] k={k} {:<28} residual {:>10.3e}  tol {:>8.1e}",
            if self.pass { "PASS" } else { "FAIL" },
            self.name,
            self.residual,
            self.tolerance
        );
        if let Some(d) = &self.detail {
            s.push_str("  ");
            s.push_str(d);
        }
        s
    }
}

/// Runs every check for `k = 1..=kmax`. Irreps are processed in parallel on
/// the current rayon pool; results come back ordered by `k`.
pub fn run_suite(options: &SuiteOptions) -> Vec<CheckResult> {
    let per_k: Vec<Vec<CheckResult>> = (1..=options.kmax)
        .into_par_iter()
        .map(|k| checks_for(k, options))
        .collect();
    per_k.into_iter().flatten().collect()
}

fn checks_for(k: u32, opts: &SuiteOptions) -> Vec<CheckResult> {
    let index = IrrepIndex::new(k);
    let tol = |default: f64| opts.tol.unwrap_or(default);
    let mut out = Vec::new();

    out.push(CheckResult::new(
        "unitarity",
        k,
        unitarity_residual(index),
        tol(ALGEBRA_TOL),
    ));

    let user = match Partition::new(index, opts.pair) {
        Ok(p) => p,
        Err(e) => {
            out.push(CheckResult::failed("partition", k, e.to_string()));
            return out;
        }
    };
    let swapped = match Partition::new(index, opts.pair.swapped()) {
        Ok(p) => p,
        Err(e) => {
            out.push(CheckResult::failed("partition", k, e.to_string()));
            return out;
        }
    };
    out.push(CheckResult::new(
        "projector_algebra",
        k,
        projector_residual(&user).max(projector_residual(&swapped)),
        tol(ALGEBRA_TOL),
    ));

    let predicted = predicted_dims(index);
    let dims_off = user
        .dims()
        .iter()
        .zip(predicted)
        .map(|(&a, b)| a.abs_diff(b))
        .max()
        .unwrap_or(0);
    out.push(
        CheckResult::new("eigenspace_dimensions", k, dims_off as f64, 0.0)
            .with_detail(format!("{:?}", user.dims())),
    );

    let mut angles = vec![
        ("theorem_quarter_turn", PI / 2.0),
        ("theorem_sixth_turn", PI / 3.0),
    ];
    if let Some(theta) = opts.theta {
        angles.push(("theorem_given_angle", theta));
    }
    for (name, theta) in angles {
        out.push(match verify_theorem_on(&user, theta) {
            Ok(r) => CheckResult::new(name, k, r.max(), tol(THEOREM_TOL)),
            Err(e) => CheckResult::failed(name, k, e.to_string()),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    rng.set_stream(u64::from(k));
    let mut worst: f64 = 0.0;
    let mut error = None;
    for _ in 0..RANDOM_ANGLES {
        let theta = rng.random_range(0.0..2.0 * PI);
        match verify_theorem_on(&user, theta) {
            Ok(r) => worst = worst.max(r.max()),
            Err(e) => error = Some(e.to_string()),
        }
    }
    out.push(match error {
        None => CheckResult::new("theorem_random_angles", k, worst, tol(THEOREM_TOL))
            .with_detail(format!("{RANDOM_ANGLES} angles, seed {}", opts.seed)),
        Some(e) => CheckResult::failed("theorem_random_angles", k, e),
    });

    // Operator-specific checks always use the partition the operator is
    // adapted to, whatever pair the theorem checks run on.
    let z = quaquaversal_operator(index);
    match Partition::quaquaversal(index) {
        Ok(q) => {
            for p in [
                &q,
                &Partition::new(index, AxisPair::QUAQUAVERSAL.swapped()).expect("x,y is valid"),
            ] {
                let name = if p.pair() == AxisPair::QUAQUAVERSAL {
                    "operator_structure"
                } else {
                    "operator_structure_swapped"
                };
                out.push(match block_grid(&z, p) {
                    Ok(grid) => {
                        CheckResult::new(name, k, structure_report(&grid).max(), tol(BLOCK_TOL))
                    }
                    Err(e) => CheckResult::failed(name, k, e.to_string()),
                });
            }
            out.push(match diagonal_block_mismatch(&q) {
                Ok(m) => CheckResult::new(
                    "predicted_diagonal_blocks",
                    k,
                    m.into_iter().fold(0.0, f64::max),
                    tol(BLOCK_TOL),
                ),
                Err(e) => CheckResult::failed("predicted_diagonal_blocks", k, e.to_string()),
            });
            out.push(CheckResult::new(
                "scalar_term",
                k,
                scalar_term_residual(&q),
                tol(BLOCK_TOL),
            ));
        }
        Err(e) => out.push(CheckResult::failed("operator_structure", k, e.to_string())),
    }

    match (dense_spectrum(index), block_spectrum(index)) {
        (Ok(dense), Ok(block)) => {
            out.push(CheckResult::new(
                "realness",
                k,
                dense.realness_residual.max(block.realness_residual),
                tol(REALNESS_TOL),
            ));
            let moment_tol = 1e-8 * index.dim() as f64;
            out.push(CheckResult::new(
                "trace_moments",
                k,
                dense.max_moment_residual().max(block.max_moment_residual()),
                opts.tol.map_or(moment_tol, |t| t * index.dim() as f64),
            ));
            out.push(CheckResult::new(
                "block_dense_agreement",
                k,
                spectral_distance(&dense.eigenvalues, &block.eigenvalues),
                tol(AGREEMENT_TOL),
            ));
            let bound = 1.0 - 10.0 * dense.backward_error;
            out.push(CheckResult {
                name: "spectral_radius_below_one".into(),
                k: Some(k),
                residual: dense.spectral_radius,
                tolerance: bound,
                pass: dense.spectral_radius < bound,
                detail: None,
            });
            if k == 1 {
                out.push(golden_spectrum(&dense));
            }
        }
        (Err(e), _) | (_, Err(e)) => out.push(CheckResult::failed("spectrum", k, e.to_string())),
    }

    let m = check_multiplicities(index);
    out.push(CheckResult {
        name: "multiplicity_floors".into(),
        k: Some(k),
        residual: if m.pass { 0.0 } else { 1.0 },
        tolerance: 0.0,
        pass: m.pass,
        detail: Some(m.error.unwrap_or_else(|| {
            format!(
                "1/8: {} ≥ {}, 1/4: {} ≥ {}, 1/2: {} ≥ {}",
                m.observed_eighth, m.q, m.observed_quarter, m.d, m.observed_half, m.d
            )
        })),
    });

    if k <= TILING_K_MAX {
        let mut worst: f64 = 0.0;
        let mut error = None;
        for n in 1..=TILING_N_MAX {
            match moment_residual(index, GenerationIndex::new(n), MomentMode::Exact) {
                Ok(r) => worst = worst.max(r),
                Err(e) => error = Some(e.to_string()),
            }
        }
        out.push(match error {
            None => CheckResult::new("exact_tiling_moments", k, worst, tol(EXACT_MOMENT_TOL))
                .with_detail(format!("N = 1..{TILING_N_MAX}")),
            Some(e) => CheckResult::failed("exact_tiling_moments", k, e),
        });
    }

    out
}

/// Largest `‖UU† − I‖_F` over the axes and sweep angles, plus the
/// homomorphism defect `‖R(a)R(b) − R(a+b)‖_F`, divided by `√(2k+1)`.
fn unitarity_residual(k: IrrepIndex) -> f64 {
    let scale = (k.dim() as f64).sqrt();
    let mut worst: f64 = 0.0;
    for axis in Axis::ALL {
        for (i, &a) in SWEEP_ANGLES.iter().enumerate() {
            let ra = rot(axis, k, a);
            worst = worst.max(unitarity_defect(ra.matrix()));
            let b = SWEEP_ANGLES[(i + 1) % SWEEP_ANGLES.len()];
            let product = ra.matrix() * rot(axis, k, b).matrix();
            worst = worst.max(frobenius(&(product - rot(axis, k, a + b).matrix())));
        }
    }
    worst / scale
}

/// Idempotence, Hermiticity, completeness and mutual orthogonality of the
/// four projections, divided by `√(2k+1)`.
fn projector_residual(p: &Partition) -> f64 {
    let n = p.k().dim();
    let mut worst: f64 = 0.0;
    let mut sum = quaquaversal::CMatrix::zeros(n, n);
    for a in EigenspaceLabel::ALL {
        let pa = p.projection(a);
        worst = worst.max(frobenius(&(pa * pa - pa)));
        worst = worst.max(frobenius(&(pa - pa.adjoint())));
        sum += pa;
        for b in EigenspaceLabel::ALL {
            if a != b {
                worst = worst.max(frobenius(&(pa * p.projection(b))));
            }
        }
    }
    worst = worst.max(frobenius(&(sum - identity(n))));
    worst / (n as f64).sqrt()
}

fn golden_spectrum(dense: &quaquaversal::spectra::SpectrumReport) -> CheckResult {
    let expected = [0.125, 0.25, 0.5];
    let mut values: Vec<f64> = dense.eigenvalues.iter().map(|l| l.re).collect();
    values.sort_by(f64::total_cmp);
    let residual = if values.len() == expected.len() {
        values
            .iter()
            .zip(expected)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
            .max(dense.realness_residual)
    } else {
        f64::INFINITY
    };
    CheckResult::new("golden_spectrum", 1, residual, GOLDEN_TOL)
        .with_detail("spectrum {1/8, 1/4, 1/2}, each simple")
}
