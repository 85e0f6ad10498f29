//! Rotations about the coordinate axes in the `(2k+1)`-dimensional irrep.
//!
//! Basis convention: rows and columns are indexed by the weight `m` running
//! from `-k` to `+k` in ascending order. `J_z` is `diag(m)`, and a rotation by
//! `θ` is `exp(-iθ J)`, so `rot(Z, k, θ)` is `diag(exp(-i m θ))`.
//! `rot(Y, ·)` is the real Wigner small-d matrix and `rot(X, ·)` is obtained
//! from it by conjugating with quarter turns about `z`.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::ops::Mul;
use std::str::FromStr;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::linalg::{self, CMatrix, C64, ZERO};

/// Label `k` of the irrep `H_{2k+1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct IrrepIndex(u32);

impl IrrepIndex {
    pub const fn new(k: u32) -> Self {
        IrrepIndex(k)
    }

    pub const fn k(self) -> u32 {
        self.0
    }

    pub const fn dim(self) -> usize {
        2 * self.0 as usize + 1
    }

    /// Weights `-k..=k`, in basis order.
    pub fn weights(self) -> impl Iterator<Item = i64> + Clone {
        let k = self.0 as i64;
        -k..=k
    }

    /// `(-1)^k`.
    pub const fn parity(self) -> i64 {
        if self.0.is_multiple_of(2) {
            1
        } else {
            -1
        }
    }
}

impl From<u32> for IrrepIndex {
    fn from(k: u32) -> Self {
        IrrepIndex(k)
    }
}

impl fmt::Display for IrrepIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Axis::X => "x",
            Axis::Y => "y",
            Axis::Z => "z",
        })
    }
}

impl FromStr for Axis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "x" => Ok(Axis::X),
            "y" => Ok(Axis::Y),
            "z" => Ok(Axis::Z),
            other => Err(Error::InvalidArgument(format!(
                "unknown axis {other:?}, expected one of x, y, z"
            ))),
        }
    }
}

/// A rotation (or product of rotations) acting on `H_{2k+1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryOperator {
    k: IrrepIndex,
    matrix: CMatrix,
}

impl UnitaryOperator {
    pub fn identity(k: IrrepIndex) -> Self {
        UnitaryOperator {
            k,
            matrix: linalg::identity(k.dim()),
        }
    }

    /// Wraps a matrix known to be unitary. Only the shape is checked.
    pub fn from_matrix(k: IrrepIndex, matrix: CMatrix) -> Result<Self, Error> {
        if matrix.nrows() != k.dim() || matrix.ncols() != k.dim() {
            return Err(Error::DimensionMismatch {
                expected: k.dim(),
                rows: matrix.nrows(),
                cols: matrix.ncols(),
            });
        }
        Ok(UnitaryOperator { k, matrix })
    }

    pub fn k(&self) -> IrrepIndex {
        self.k
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn inverse(&self) -> Self {
        UnitaryOperator {
            k: self.k,
            matrix: self.matrix.adjoint(),
        }
    }

    pub fn pow(&self, exponent: u32) -> Self {
        let mut out = UnitaryOperator::identity(self.k);
        for _ in 0..exponent {
            out = &out * self;
        }
        out
    }
}

impl Mul for &UnitaryOperator {
    type Output = UnitaryOperator;

    fn mul(self, rhs: &UnitaryOperator) -> UnitaryOperator {
        assert_eq!(self.k, rhs.k, "operators from different irreps");
        UnitaryOperator {
            k: self.k,
            matrix: &self.matrix * &rhs.matrix,
        }
    }
}

impl Mul for UnitaryOperator {
    type Output = UnitaryOperator;

    fn mul(self, rhs: UnitaryOperator) -> UnitaryOperator {
        &self * &rhs
    }
}

/// Hermitian generator `J_axis` in the weight basis.
pub fn angular_momentum(axis: Axis, k: IrrepIndex) -> CMatrix {
    let n = k.dim();
    let kf = k.k() as f64;
    let mut raising = CMatrix::zeros(n, n);
    for (i, m) in k.weights().enumerate().take(n - 1) {
        let m = m as f64;
        raising[(i + 1, i)] = linalg::real(((kf - m) * (kf + m + 1.0)).sqrt());
    }
    let lowering = raising.adjoint();
    match axis {
        Axis::Z => CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
            n,
            k.weights().map(|m| linalg::real(m as f64)),
        )),
        Axis::X => (&raising + &lowering).scale(0.5),
        // (J+ - J-) / 2i
        Axis::Y => (&raising - &lowering) * C64::new(0.0, -0.5),
    }
}

/// `exp(-iθ J_axis)` through the Hermitian eigendecomposition of `J_axis`.
pub fn exp_angular_momentum(axis: Axis, k: IrrepIndex, theta: f64) -> CMatrix {
    linalg::hermitian_function(&angular_momentum(axis, k), |lambda| {
        C64::from_polar(1.0, -theta * lambda)
    })
}

/// Wigner small-d matrix `d^k(θ)`, the `y`-rotation in the weight basis.
pub fn small_d(k: IrrepIndex, theta: f64) -> DMatrix<f64> {
    exp_angular_momentum(Axis::Y, k, theta).map(|z| z.re)
}

/// Closed-form Wigner small-d sum evaluated with log-factorials.
///
/// Independent of the generator route; used to cross-check [`small_d`].
pub fn small_d_closed_form(k: IrrepIndex, theta: f64) -> DMatrix<f64> {
    let j = k.k() as i64;
    let n = k.dim();
    let log_fact: Vec<f64> = std::iter::once(0.0)
        .chain((1..=2 * j + 1).scan(0.0, |acc, i| {
            *acc += (i as f64).ln();
            Some(*acc)
        }))
        .collect();
    let lf = |i: i64| log_fact[i as usize];
    let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());

    DMatrix::from_fn(n, n, |row, col| {
        let mp = row as i64 - j;
        let m = col as i64 - j;
        let prefactor = 0.5 * (lf(j + mp) + lf(j - mp) + lf(j + m) + lf(j - m));
        let s_min = 0.max(m - mp);
        let s_max = (j + m).min(j - mp);
        (s_min..=s_max)
            .map(|sv| {
                let sign = if (mp - m + sv) % 2 == 0 { 1.0 } else { -1.0 };
                let log_mag =
                    prefactor - lf(j + m - sv) - lf(sv) - lf(mp - m + sv) - lf(j - mp - sv);
                let cos_pow = (2 * j + m - mp - 2 * sv) as i32;
                let sin_pow = (mp - m + 2 * sv) as i32;
                sign * log_mag.exp() * c.powi(cos_pow) * s.powi(sin_pow)
            })
            .sum()
    })
}

fn z_rotation(k: IrrepIndex, theta: f64) -> CMatrix {
    CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        k.dim(),
        k.weights()
            .map(|m| C64::from_polar(1.0, -(m as f64) * theta)),
    ))
}

/// Image of the rotation about `axis` by `theta` in `H_{2k+1}`.
pub fn rot(axis: Axis, k: IrrepIndex, theta: f64) -> UnitaryOperator {
    let matrix = match axis {
        Axis::Z => z_rotation(k, theta),
        Axis::Y => small_d(k, theta).map(linalg::real),
        Axis::X => {
            let d = small_d(k, theta).map(linalg::real);
            z_rotation(k, -FRAC_PI_2) * d * z_rotation(k, FRAC_PI_2)
        }
    };
    UnitaryOperator { k, matrix }
}

/// Character of a rotation by `theta`: `sin((2k+1)θ/2) / sin(θ/2)`.
pub fn character(k: IrrepIndex, theta: f64) -> f64 {
    let half = (theta / 2.0).sin();
    if half.abs() < 1e-6 {
        // Near the removable singularity fall back to 1 + 2 Σ cos(mθ).
        1.0 + 2.0 * (1..=k.k()).map(|m| (m as f64 * theta).cos()).sum::<f64>()
    } else {
        ((2 * k.k() + 1) as f64 * theta / 2.0).sin() / half
    }
}

/// Columns are the Cartesian unit vectors `x̂, ŷ, ẑ` written in the `k = 1`
/// weight basis (`m = -1, 0, +1`).
///
/// `C† · rot(a, 1, θ) · C` is the classical 3×3 rotation matrix.
pub fn cartesian_basis() -> CMatrix {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    CMatrix::from_row_slice(
        3,
        3,
        &[
            C64::new(h, 0.0),
            C64::new(0.0, h),
            ZERO,
            ZERO,
            ZERO,
            linalg::ONE,
            C64::new(-h, 0.0),
            C64::new(0.0, h),
            ZERO,
        ],
    )
}

/// Rewrites a `k = 1` operator in the Cartesian basis.
pub fn to_cartesian(m: &CMatrix) -> CMatrix {
    let c = cartesian_basis();
    c.adjoint() * m * c
}

/// Angles used throughout the test sweeps.
pub const SWEEP_ANGLES: [f64; 5] = [PI / 3.0, PI / 2.0, 2.0 * PI / 3.0, PI, 4.0 * PI / 3.0];
