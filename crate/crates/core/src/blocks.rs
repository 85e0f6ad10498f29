//! Joint eigenspaces of two half turns and the induced 4×4 block structure.
//!
//! For an ordered pair of axes `(v, w)` the space `H_{2k+1}` splits into the
//! joint eigenspaces `Λ_{α,β}` of `R_v^π` (eigenvalue `α`) and `R_w^π`
//! (eigenvalue `β`), ordered `(+,+), (+,−), (−,+), (−,−)`. Operators are cut
//! into a grid of blocks along that partition, and [`structure_report`]
//! measures how far a grid is from being lower block triangular with
//! Hermitian diagonal blocks.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::groupring::{quaquaversal_element, Generator, WordEvaluator};
use crate::linalg::{self, frobenius, CMatrix};
use crate::repgen::{rot, Axis, IrrepIndex};

/// Residuals below this are treated as relative to `1e-14` instead of `‖M‖`.
pub const NORM_FLOOR: f64 = 1e-14;

/// Tolerance on `trace(P)` being an integer.
pub const TRACE_INTEGRALITY_TOL: f64 = 1e-6;

pub(crate) fn relative(residual: f64, scale: f64) -> f64 {
    residual / scale.max(NORM_FLOOR)
}

/// Ordered pair of distinct axes defining the partition `Π_{v,w}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AxisPair {
    v: Axis,
    w: Axis,
}

impl AxisPair {
    /// `Π_{Y,X}`: `α` is the eigenvalue of `S² = R_y^π`, `β` that of
    /// `T³ = R_x^π`.
    pub const QUAQUAVERSAL: AxisPair = AxisPair {
        v: Axis::Y,
        w: Axis::X,
    };

    pub fn new(v: Axis, w: Axis) -> Result<Self> {
        if v == w {
            return Err(Error::DegenerateAxisPair(v));
        }
        Ok(AxisPair { v, w })
    }

    pub fn v(self) -> Axis {
        self.v
    }

    pub fn w(self) -> Axis {
        self.w
    }

    pub fn swapped(self) -> Self {
        AxisPair {
            v: self.w,
            w: self.v,
        }
    }
}

impl Default for AxisPair {
    fn default() -> Self {
        AxisPair::QUAQUAVERSAL
    }
}

impl fmt::Display for AxisPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", self.v, self.w)
    }
}

impl FromStr for AxisPair {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (v, w) = s.split_once(',').ok_or_else(|| {
            Error::InvalidArgument(format!("axis pair {s:?} must look like \"y,x\""))
        })?;
        AxisPair::new(v.parse()?, w.parse()?)
    }
}

/// `Λ_{α,β}` with `α, β ∈ {+1, −1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EigenspaceLabel {
    pub alpha: i8,
    pub beta: i8,
}

impl EigenspaceLabel {
    /// Partition order.
    pub const ALL: [EigenspaceLabel; 4] = [
        EigenspaceLabel { alpha: 1, beta: 1 },
        EigenspaceLabel { alpha: 1, beta: -1 },
        EigenspaceLabel { alpha: -1, beta: 1 },
        EigenspaceLabel {
            alpha: -1,
            beta: -1,
        },
    ];

    pub fn new(alpha: i8, beta: i8) -> Result<Self> {
        if alpha.abs() != 1 || beta.abs() != 1 {
            return Err(Error::InvalidArgument(format!(
                "eigenspace label ({alpha},{beta}) must use ±1"
            )));
        }
        Ok(EigenspaceLabel { alpha, beta })
    }

    pub fn index(self) -> usize {
        match (self.alpha, self.beta) {
            (1, 1) => 0,
            (1, _) => 1,
            (_, 1) => 2,
            _ => 3,
        }
    }

    pub fn flip_beta(self) -> Self {
        EigenspaceLabel {
            alpha: self.alpha,
            beta: -self.beta,
        }
    }

    fn transposed(self) -> Self {
        EigenspaceLabel {
            alpha: self.beta,
            beta: self.alpha,
        }
    }
}

impl fmt::Display for EigenspaceLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:+},{:+})", self.alpha, self.beta)
    }
}

/// `P_{α,β} = (I + α R_v^π + β R_w^π + αβ R_v^π R_w^π) / 4`.
pub fn projection(k: IrrepIndex, pair: AxisPair, label: EigenspaceLabel) -> CMatrix {
    let rv = rot(pair.v, k, std::f64::consts::PI).into_matrix();
    let rw = rot(pair.w, k, std::f64::consts::PI).into_matrix();
    projection_from(&rv, &rw, label)
}

fn projection_from(rv: &CMatrix, rw: &CMatrix, label: EigenspaceLabel) -> CMatrix {
    let (a, b) = (label.alpha as f64, label.beta as f64);
    let n = rv.nrows();
    (linalg::identity(n) + rv.scale(a) + rw.scale(b) + (rv * rw).scale(a * b)).scale(0.25)
}

fn basis_of_projection(p: &CMatrix) -> Result<CMatrix> {
    let trace = linalg::trace(p).re;
    let rank = trace.round();
    if (trace - rank).abs() > TRACE_INTEGRALITY_TOL || rank < 0.0 {
        return Err(Error::NonIntegralTrace { trace });
    }
    let rank = rank as usize;
    let (values, vectors) = linalg::hermitian_eigen(p);
    let found = values.iter().filter(|&&x| x > 0.5).count();
    if found != rank {
        return Err(Error::RankMismatch {
            expected: rank,
            found,
        });
    }
    let n = p.nrows();
    Ok(vectors.columns(n - rank, rank).into_owned())
}

/// Orthonormal basis (as columns) of `Λ_{α,β}`.
pub fn eigenspace_basis(k: IrrepIndex, pair: AxisPair, label: EigenspaceLabel) -> Result<CMatrix> {
    basis_of_projection(&projection(k, pair, label))
}

/// Closed-form dimensions of the four eigenspaces, in partition order.
pub fn predicted_dims(k: IrrepIndex) -> [usize; 4] {
    let n = k.dim() as i64;
    let sign = k.parity();
    let first = ((n + 3 * sign) / 4) as usize;
    let rest = ((n - sign) / 4) as usize;
    [first, rest, rest, rest]
}

/// The ordered partition `Π_{v,w}` with an orthonormal basis per part.
#[derive(Debug, Clone)]
pub struct Partition {
    k: IrrepIndex,
    pair: AxisPair,
    projections: [CMatrix; 4],
    bases: [CMatrix; 4],
}

impl Partition {
    pub fn new(k: IrrepIndex, pair: AxisPair) -> Result<Self> {
        let rv = rot(pair.v, k, std::f64::consts::PI).into_matrix();
        let rw = rot(pair.w, k, std::f64::consts::PI).into_matrix();
        let projections = EigenspaceLabel::ALL.map(|l| projection_from(&rv, &rw, l));
        let bases = [
            basis_of_projection(&projections[0])?,
            basis_of_projection(&projections[1])?,
            basis_of_projection(&projections[2])?,
            basis_of_projection(&projections[3])?,
        ];
        Ok(Partition {
            k,
            pair,
            projections,
            bases,
        })
    }

    pub fn quaquaversal(k: IrrepIndex) -> Result<Self> {
        Partition::new(k, AxisPair::QUAQUAVERSAL)
    }

    pub fn k(&self) -> IrrepIndex {
        self.k
    }

    pub fn pair(&self) -> AxisPair {
        self.pair
    }

    pub fn dims(&self) -> [usize; 4] {
        [0, 1, 2, 3].map(|i| self.bases[i].ncols())
    }

    pub fn basis(&self, label: EigenspaceLabel) -> &CMatrix {
        &self.bases[label.index()]
    }

    pub fn projection(&self, label: EigenspaceLabel) -> &CMatrix {
        &self.projections[label.index()]
    }

    /// All four bases side by side; unitary.
    pub fn unitary(&self) -> CMatrix {
        let n = self.k.dim();
        let mut u = CMatrix::zeros(n, n);
        let mut col = 0;
        for b in &self.bases {
            u.columns_mut(col, b.ncols()).copy_from(b);
            col += b.ncols();
        }
        u
    }
}

/// An operator cut into the 4×4 grid `B_i† · M · B_j`.
#[derive(Debug, Clone)]
pub struct BlockGrid {
    dims: [usize; 4],
    blocks: Vec<CMatrix>,
    operator_norm: f64,
}

impl BlockGrid {
    pub fn block(&self, row: usize, col: usize) -> &CMatrix {
        &self.blocks[4 * row + col]
    }

    pub fn block_by_label(&self, row: EigenspaceLabel, col: EigenspaceLabel) -> &CMatrix {
        self.block(row.index(), col.index())
    }

    pub fn dims(&self) -> [usize; 4] {
        self.dims
    }

    /// `‖M‖_F` of the decomposed operator.
    pub fn operator_norm(&self) -> f64 {
        self.operator_norm
    }

    pub fn norms(&self) -> [[f64; 4]; 4] {
        let mut out = [[0.0; 4]; 4];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, x) in row.iter_mut().enumerate() {
                *x = frobenius(self.block(i, j));
            }
        }
        out
    }

    /// The operator in the partition basis, `U† M U`.
    pub fn assemble(&self) -> CMatrix {
        let n: usize = self.dims.iter().sum();
        let mut out = CMatrix::zeros(n, n);
        let offsets: Vec<usize> = self
            .dims
            .iter()
            .scan(0, |acc, d| {
                let start = *acc;
                *acc += d;
                Some(start)
            })
            .collect();
        for i in 0..4 {
            for j in 0..4 {
                out.view_mut((offsets[i], offsets[j]), (self.dims[i], self.dims[j]))
                    .copy_from(self.block(i, j));
            }
        }
        out
    }
}

pub fn block_grid(m: &CMatrix, partition: &Partition) -> Result<BlockGrid> {
    let n = partition.k().dim();
    if m.nrows() != n || m.ncols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    let left: Vec<CMatrix> = partition.bases.iter().map(|b| b.adjoint() * m).collect();
    let mut blocks = Vec::with_capacity(16);
    for row in &left {
        for b in &partition.bases {
            blocks.push(row * b);
        }
    }
    Ok(BlockGrid {
        dims: partition.dims(),
        blocks,
        operator_norm: frobenius(m),
    })
}

/// The three structural residuals, each relative to `‖M‖_F`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StructureReport {
    /// Largest strictly-upper block.
    pub upper: f64,
    /// Largest `‖B − B†‖` over diagonal blocks.
    pub hermiticity: f64,
    /// The block taking `Λ_{+1,−1}` into `Λ_{−1,+1}`.
    pub zero_block: f64,
}

impl StructureReport {
    pub fn max(&self) -> f64 {
        self.upper.max(self.hermiticity).max(self.zero_block)
    }

    pub fn within(&self, tol: f64) -> bool {
        self.max() <= tol
    }
}

pub fn structure_report(grid: &BlockGrid) -> StructureReport {
    let scale = grid.operator_norm();
    let mut upper: f64 = 0.0;
    let mut hermiticity: f64 = 0.0;
    for i in 0..4 {
        for j in i + 1..4 {
            upper = upper.max(frobenius(grid.block(i, j)));
        }
        let d = grid.block(i, i);
        if !d.is_empty() {
            hermiticity = hermiticity.max(linalg::hermiticity_defect(d));
        }
    }
    let zero = frobenius(grid.block_by_label(
        EigenspaceLabel { alpha: -1, beta: 1 },
        EigenspaceLabel { alpha: 1, beta: -1 },
    ));
    StructureReport {
        upper: relative(upper, scale),
        hermiticity: relative(hermiticity, scale),
        zero_block: relative(zero, scale),
    }
}

/// Residuals for `A = R_v^θ + R_v^θ R_w^π` and for the mapping properties of
/// the even/odd parts `R^{θ±} = (R_v^θ ± R_v^{−θ}) / 2` used to derive its
/// structure. Sandwich residuals are relative to `‖R_v^θ‖_F = √(2k+1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TheoremReport {
    pub theta: f64,
    pub structure: StructureReport,
    /// max over labels of `‖P_{α,−β} R^{θ+} P_{α,β}‖`.
    pub even_cross: f64,
    /// max over labels of `‖(I − P_{α,β}) R^{θ+} P_{α,β}‖`.
    pub even_leak: f64,
    /// max over labels of `‖P_{α,β} R^{θ−} P_{α,β}‖`.
    pub odd_diagonal: f64,
    /// max over labels of `‖(I − P_{α,−β}) R^{θ−} P_{α,β}‖`.
    pub odd_leak: f64,
    /// `‖R^{θ−} R_w^π + R_w^π R^{θ−}‖`.
    pub anticommutation: f64,
    /// `‖R^{θ+} R_w^π − R_w^π R^{θ+}‖`.
    pub commutation: f64,
}

impl TheoremReport {
    pub fn max(&self) -> f64 {
        [
            self.structure.max(),
            self.even_cross,
            self.even_leak,
            self.odd_diagonal,
            self.odd_leak,
            self.anticommutation,
            self.commutation,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

pub fn verify_theorem(k: IrrepIndex, theta: f64, pair: AxisPair) -> Result<TheoremReport> {
    verify_theorem_on(&Partition::new(k, pair)?, theta)
}

/// [`verify_theorem`] reusing an existing partition.
pub fn verify_theorem_on(partition: &Partition, theta: f64) -> Result<TheoremReport> {
    let k = partition.k();
    let pair = partition.pair();
    let n = k.dim();
    let r = rot(pair.v, k, theta).into_matrix();
    let r_inv = rot(pair.v, k, -theta).into_matrix();
    let rw = rot(pair.w, k, std::f64::consts::PI).into_matrix();
    let a = &r + &r * &rw;
    let structure = structure_report(&block_grid(&a, partition)?);

    let even = (&r + &r_inv).scale(0.5);
    let odd = (&r - &r_inv).scale(0.5);
    let id = linalg::identity(n);
    let scale = (n as f64).sqrt();
    let (mut even_cross, mut even_leak, mut odd_diagonal, mut odd_leak) = (0f64, 0f64, 0f64, 0f64);
    for label in EigenspaceLabel::ALL {
        let p = partition.projection(label);
        let p_flip = partition.projection(label.flip_beta());
        let even_p = &even * p;
        let odd_p = &odd * p;
        even_cross = even_cross.max(frobenius(&(p_flip * &even_p)));
        even_leak = even_leak.max(frobenius(&((&id - p) * &even_p)));
        odd_diagonal = odd_diagonal.max(frobenius(&(p * &odd_p)));
        odd_leak = odd_leak.max(frobenius(&((&id - p_flip) * &odd_p)));
    }
    Ok(TheoremReport {
        theta,
        structure,
        even_cross: relative(even_cross, scale),
        even_leak: relative(even_leak, scale),
        odd_diagonal: relative(odd_diagonal, scale),
        odd_leak: relative(odd_leak, scale),
        anticommutation: relative(frobenius(&(&odd * &rw + &rw * &odd)), scale),
        commutation: relative(frobenius(&(&even * &rw - &rw * &even)), scale),
    })
}

/// Diagonal blocks of `ẑ` as prescribed in closed form, in `partition` order.
///
/// On the subspace where `S² = a` and `T³ = b`:
/// `(a,b) = (+,+)`: `(S⁺ + 4 + T⁺)/8`; `(+,−)`: `(2 − T⁺)/8`;
/// `(−,+)`: `I/4`; `(−,−)`: `I/2`, with `S⁺ = S + S⁻¹`, `T⁺ = T + T⁻¹`.
/// Only the partitions `Π_{Y,X}` and `Π_{X,Y}` are meaningful here.
pub fn predicted_diagonal_blocks(partition: &Partition) -> Result<[CMatrix; 4]> {
    let pair = partition.pair();
    let transposed = if pair == AxisPair::QUAQUAVERSAL {
        false
    } else if pair == AxisPair::QUAQUAVERSAL.swapped() {
        true
    } else {
        return Err(Error::InvalidArgument(format!(
            "diagonal block prescriptions need the (y,x) or (x,y) pair, got ({pair})"
        )));
    };
    let k = partition.k();
    let n = k.dim();
    let ev = WordEvaluator::new(k);
    let s = ev.power(Generator::S, 1);
    let t = ev.power(Generator::T, 1);
    let s_plus = s + s.adjoint();
    let t_plus = t + t.adjoint();
    let id = linalg::identity(n);

    let operator_for = |label: EigenspaceLabel| -> CMatrix {
        let sub = if transposed {
            label.transposed()
        } else {
            label
        };
        match (sub.alpha, sub.beta) {
            (1, 1) => (&s_plus + &t_plus + id.scale(4.0)).scale(0.125),
            (1, _) => (id.scale(2.0) - &t_plus).scale(0.125),
            (_, 1) => id.scale(0.25),
            _ => id.scale(0.5),
        }
    };
    Ok(EigenspaceLabel::ALL.map(|label| {
        let b = partition.basis(label);
        b.adjoint() * operator_for(label) * b
    }))
}

/// `max_i ‖predicted_i − actual_i‖_F / ‖ẑ‖_F` over the four diagonal blocks.
pub fn diagonal_block_mismatch(partition: &Partition) -> Result<[f64; 4]> {
    let z = quaquaversal_element().evaluate(partition.k());
    let grid = block_grid(&z, partition)?;
    let predicted = predicted_diagonal_blocks(partition)?;
    let scale = grid.operator_norm();
    Ok([0, 1, 2, 3].map(|i| relative(frobenius(&(&predicted[i] - grid.block(i, i))), scale)))
}

/// `max ‖P_{α,β}(S²T³ + 3I)P_{α,β} − (αβ + 3)P_{α,β}‖` under `Π_{Y,X}`,
/// relative to `√(2k+1)`.
pub fn scalar_term_residual(partition: &Partition) -> f64 {
    let k = partition.k();
    let n = k.dim();
    let ev = WordEvaluator::new(k);
    let term =
        ev.evaluate(&"S^2 T^3".parse().expect("literal word")) + linalg::identity(n).scale(3.0);
    let worst = EigenspaceLabel::ALL
        .iter()
        .map(|&label| {
            let p = partition.projection(label);
            let want = p.scale((label.alpha * label.beta) as f64 + 3.0);
            frobenius(&(p * &term * p - want))
        })
        .fold(0.0, f64::max);
    relative(worst, (n as f64).sqrt())
}
