//! Dense complex linear algebra shared by the other modules.
//!
//! Hermitian problems go through nalgebra's `SymmetricEigen`. General
//! (non-normal) eigenvalue problems use the Householder-Hessenberg reduction
//! followed by a single-shift complex QR iteration implemented here, so the
//! dense route shares no solver code with the Hermitian block route.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};

pub type C64 = nalgebra::Complex<f64>;
pub type CMatrix = DMatrix<C64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

pub fn real(x: f64) -> C64 {
    C64::new(x, 0.0)
}

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

pub fn frobenius(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn trace(m: &CMatrix) -> C64 {
    m.diagonal().iter().sum()
}

/// `‖M − M†‖_F`.
pub fn hermiticity_defect(m: &CMatrix) -> f64 {
    frobenius(&(m - m.adjoint()))
}

/// `‖U U† − I‖_F`.
pub fn unitarity_defect(m: &CMatrix) -> f64 {
    frobenius(&(m * m.adjoint() - identity(m.nrows())))
}

/// Largest singular value.
pub fn spectral_norm(m: &CMatrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone().singular_values().max()
}

/// Eigen-decomposition of the Hermitian part `(M + M†)/2`, eigenvalues
/// ascending, eigenvectors as matching columns.
pub fn hermitian_eigen(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let n = m.nrows();
    if n == 0 {
        return (Vec::new(), CMatrix::zeros(0, 0));
    }
    let sym = (m + m.adjoint()).scale(0.5);
    let eig = SymmetricEigen::new(sym);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = CMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    hermitian_eigen(m).0
}

/// `V · diag(f(λ)) · V†` for the Hermitian matrix `h`.
pub fn hermitian_function(h: &CMatrix, f: impl Fn(f64) -> C64) -> CMatrix {
    let (values, vectors) = hermitian_eigen(h);
    let mut scaled = vectors.clone();
    for (j, &lambda) in values.iter().enumerate() {
        let fj = f(lambda);
        for z in scaled.column_mut(j).iter_mut() {
            *z *= fj;
        }
    }
    scaled * vectors.adjoint()
}

/// Backward-error scale of the dense eigensolver: `n · ε · ‖M‖_F`.
pub fn backward_error_estimate(m: &CMatrix) -> f64 {
    m.nrows().max(1) as f64 * f64::EPSILON * frobenius(m)
}

const MAX_SWEEPS_PER_EIGENVALUE: usize = 60;

/// All eigenvalues of a general square complex matrix.
pub fn eigenvalues(m: &CMatrix) -> Result<Vec<C64>> {
    let n = m.nrows();
    if m.ncols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    let mut h = m.clone();
    reduce_to_hessenberg(&mut h);
    hessenberg_qr(h, frobenius(m))
}

/// In-place Householder reduction to upper Hessenberg form (similarity).
pub fn reduce_to_hessenberg(a: &mut CMatrix) {
    let n = a.nrows();
    if n < 3 {
        return;
    }
    for col in 0..n - 2 {
        let len = n - col - 1;
        let x: Vec<C64> = (0..len).map(|i| a[(col + 1 + i, col)]).collect();
        let xnorm = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if xnorm == 0.0 {
            continue;
        }
        let phase = if x[0].norm() == 0.0 {
            ONE
        } else {
            x[0] / x[0].norm()
        };
        let alpha = -phase * xnorm;
        let mut v = x;
        v[0] -= alpha;
        let vnorm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if vnorm == 0.0 {
            continue;
        }
        for z in v.iter_mut() {
            *z /= vnorm;
        }
        // H = I - 2 v v†, applied as H A H.
        for j in 0..n {
            let mut dot = ZERO;
            for i in 0..len {
                dot += v[i].conj() * a[(col + 1 + i, j)];
            }
            for i in 0..len {
                a[(col + 1 + i, j)] -= v[i] * dot * 2.0;
            }
        }
        for i in 0..n {
            let mut dot = ZERO;
            for jj in 0..len {
                dot += a[(i, col + 1 + jj)] * v[jj];
            }
            for jj in 0..len {
                a[(i, col + 1 + jj)] -= dot * v[jj].conj() * 2.0;
            }
        }
        for i in col + 2..n {
            a[(i, col)] = ZERO;
        }
    }
}

struct Givens {
    c: C64,
    s: C64,
}

impl Givens {
    /// Rotation `G` with `G · [x, y]ᵀ = [r, 0]ᵀ`.
    fn zeroing(x: C64, y: C64) -> Self {
        let r = (x.norm_sqr() + y.norm_sqr()).sqrt();
        if r == 0.0 {
            Givens { c: ONE, s: ZERO }
        } else {
            Givens { c: x / r, s: y / r }
        }
    }
}

/// Eigenvalues of an upper Hessenberg matrix by shifted QR with deflation.
fn hessenberg_qr(mut h: CMatrix, scale: f64) -> Result<Vec<C64>> {
    let n = h.nrows();
    let mut eig = vec![ZERO; n];
    if n == 0 {
        return Ok(eig);
    }
    let eps = f64::EPSILON;
    let tiny = f64::MIN_POSITIVE * n as f64;
    let mut hi = n - 1;
    let mut iter = 0usize;
    let mut total = 0usize;
    let budget = MAX_SWEEPS_PER_EIGENVALUE * n;

    loop {
        if hi == 0 {
            eig[0] = h[(0, 0)];
            break;
        }
        let mut lo = hi;
        while lo > 0 {
            let sub = h[(lo, lo - 1)].norm();
            let mut diag = h[(lo - 1, lo - 1)].norm() + h[(lo, lo)].norm();
            if diag == 0.0 {
                diag = scale;
            }
            if sub <= eps * diag || sub <= tiny {
                h[(lo, lo - 1)] = ZERO;
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            eig[hi] = h[(hi, hi)];
            hi -= 1;
            iter = 0;
            continue;
        }

        iter += 1;
        total += 1;
        if total > budget {
            return Err(Error::NonConvergence {
                n,
                iterations: total,
                frobenius_norm: scale,
                subdiagonal: h[(hi, hi - 1)].norm(),
            });
        }

        let shift = if iter.is_multiple_of(11) {
            // Exceptional shift to break cycles.
            h[(hi, hi)] + real(0.75 * h[(hi, hi - 1)].norm())
        } else {
            wilkinson_shift(
                h[(hi - 1, hi - 1)],
                h[(hi - 1, hi)],
                h[(hi, hi - 1)],
                h[(hi, hi)],
            )
        };

        for i in lo..=hi {
            h[(i, i)] -= shift;
        }
        let mut rotations = Vec::with_capacity(hi - lo);
        for j in lo..hi {
            let g = Givens::zeroing(h[(j, j)], h[(j + 1, j)]);
            for col in j..=hi {
                let top = h[(j, col)];
                let bot = h[(j + 1, col)];
                h[(j, col)] = g.c.conj() * top + g.s.conj() * bot;
                h[(j + 1, col)] = -g.s * top + g.c * bot;
            }
            h[(j + 1, j)] = ZERO;
            rotations.push(g);
        }
        for (offset, g) in rotations.iter().enumerate() {
            let j = lo + offset;
            let last_row = (j + 2).min(hi);
            for row in lo..=last_row {
                let left = h[(row, j)];
                let right = h[(row, j + 1)];
                h[(row, j)] = left * g.c + right * g.s;
                h[(row, j + 1)] = -left * g.s.conj() + right * g.c.conj();
            }
        }
        for i in lo..=hi {
            h[(i, i)] += shift;
        }
    }
    Ok(eig)
}

/// Eigenvalue of `[[a, b], [c, d]]` closest to `d`.
fn wilkinson_shift(a: C64, b: C64, c: C64, d: C64) -> C64 {
    let half = (a - d) * 0.5;
    let disc = (half * half + b * c).sqrt();
    let mean = (a + d) * 0.5;
    let r1 = mean + disc;
    let r2 = mean - disc;
    if (r1 - d).norm() <= (r2 - d).norm() {
        r1
    } else {
        r2
    }
}
