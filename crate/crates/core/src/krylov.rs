//! Structure-oblivious block-Krylov construction with deflation.
//!
//! Blocks are scanned in order `k = 1, 2, ...`. Block `k` holds the candidates
//! `M^{k-1} R_{k-1}`; within a block, columns are scanned left to right and a
//! column is deflated when it is (almost) linearly dependent on every column
//! accepted before it. The surviving columns define `R_k = R_{k-1} E_k`, with
//! `E_k` stored as the list of retained column positions.

use crate::error::{Error, Result};
use crate::linalg::{orthonormalize_against, Matrix, OrthoShadow};

/// Deflation history of one block-Krylov run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeflationRecord {
    /// Width of the starting block `R`.
    pub start_width: usize,
    /// `m_1 ≥ m_2 ≥ … ≥ m_{k0}`, all positive.
    pub block_widths: Vec<usize>,
    /// Entry `k` lists the columns of `I_{m_{k-1}}` retained in `E_k`.
    pub selections: Vec<Vec<usize>>,
}

impl DeflationRecord {
    pub fn k0(&self) -> usize {
        self.block_widths.len()
    }

    /// Total number of basis columns `N0`.
    pub fn n0(&self) -> usize {
        self.block_widths.iter().sum()
    }

    /// Column offset of each block inside the basis, plus the final total.
    pub fn block_offsets(&self) -> Vec<usize> {
        let mut offsets = Vec::with_capacity(self.k0() + 1);
        let mut acc = 0;
        offsets.push(0);
        for w in &self.block_widths {
            acc += w;
            offsets.push(acc);
        }
        offsets
    }

    /// For each block, the columns of the original `R` it still carries.
    pub fn active_start_columns(&self) -> Vec<Vec<usize>> {
        let mut active: Vec<usize> = (0..self.start_width).collect();
        self.selections
            .iter()
            .map(|sel| {
                active = sel.iter().map(|&p| active[p]).collect();
                active.clone()
            })
            .collect()
    }

    /// Checks the structural invariants of the record.
    pub fn validate(&self) -> Result<()> {
        if self.selections.len() != self.block_widths.len() {
            return Err(Error::InvalidInput("selections/block_widths length".into()));
        }
        let mut prev = self.start_width;
        for (sel, &w) in self.selections.iter().zip(&self.block_widths) {
            let increasing = sel.windows(2).all(|p| p[0] < p[1]);
            if sel.len() != w || w == 0 || w > prev || !increasing || sel.iter().any(|&i| i >= prev)
            {
                return Err(Error::InvalidInput(format!(
                    "malformed selection {sel:?} for width {w} (previous {prev})"
                )));
            }
            prev = w;
        }
        Ok(())
    }
}

/// A block-Krylov basis matrix with the decisions that produced it.
#[derive(Clone, Debug)]
pub struct KrylovBasis {
    pub matrix: Matrix,
    pub record: DeflationRecord,
    pub orthonormal: bool,
}

impl KrylovBasis {
    pub fn n0(&self) -> usize {
        self.matrix.ncols()
    }
}

/// Applies the left-to-right deflation rule block by block.
///
/// Shared by the reference construction here and by the structured recursions,
/// so both make their decisions with one rule.
pub(crate) struct Deflator {
    shadow: OrthoShadow,
    tol: f64,
    limit: usize,
    start_width: usize,
    widths: Vec<usize>,
    selections: Vec<Vec<usize>>,
}

impl Deflator {
    pub(crate) fn new(
        dim: usize,
        start_width: usize,
        tol: f64,
        n_max: Option<usize>,
    ) -> Result<Self> {
        if tol.is_nan() || tol <= 0.0 {
            return Err(Error::InvalidInput(format!(
                "tolerance must be positive, got {tol}"
            )));
        }
        let limit = n_max.map_or(dim, |n| n.min(dim));
        Ok(Deflator {
            shadow: OrthoShadow::new(dim),
            tol,
            limit,
            start_width,
            widths: Vec::new(),
            selections: Vec::new(),
        })
    }

    pub(crate) fn accepted(&self) -> usize {
        self.shadow.len()
    }

    pub(crate) fn is_full(&self) -> bool {
        self.accepted() >= self.limit
    }

    /// Decides which candidate columns survive. Returns the retained positions;
    /// an empty result ends the sequence and is not recorded.
    pub(crate) fn select(&mut self, candidates: &Matrix) -> Vec<usize> {
        let mut kept = Vec::new();
        for j in 0..candidates.ncols() {
            if self.is_full() {
                break;
            }
            if self
                .shadow
                .try_extend(candidates.column_entries(j), self.tol)
            {
                kept.push(j);
            }
        }
        if !kept.is_empty() {
            self.widths.push(kept.len());
            self.selections.push(kept.clone());
        }
        kept
    }

    pub(crate) fn finish(self) -> (DeflationRecord, Matrix) {
        let q = self.shadow.to_matrix();
        (
            DeflationRecord {
                start_width: self.start_width,
                block_widths: self.widths,
                selections: self.selections,
            },
            q,
        )
    }
}

fn check_pair(m_op: &Matrix, r: &Matrix) -> Result<()> {
    if !m_op.is_square() || m_op.nrows() != r.nrows() {
        return Err(Error::DimensionMismatch {
            context: "block krylov",
            left: m_op.shape(),
            right: r.shape(),
        });
    }
    Ok(())
}

/// `[R, M R, …, M^{kmax-1} R]`.
pub fn block_krylov_matrix(m_op: &Matrix, r: &Matrix, kmax: usize) -> Result<Matrix> {
    check_pair(m_op, r)?;
    if kmax == 0 {
        return Err(Error::InvalidInput("kmax must be at least 1".into()));
    }
    let mut blocks = vec![r.clone()];
    for _ in 1..kmax {
        let next = m_op.matmul(blocks.last().expect("non-empty"))?;
        blocks.push(next);
    }
    let refs: Vec<&Matrix> = blocks.iter().collect();
    Matrix::hstack(r.nrows(), &refs)
}

/// Runs the deflated construction, returning the raw kept columns and their
/// orthonormalized counterparts.
fn run_deflation(
    m_op: &Matrix,
    r: &Matrix,
    tol: f64,
    n_max: Option<usize>,
) -> Result<(Matrix, Matrix, DeflationRecord)> {
    check_pair(m_op, r)?;
    let n = m_op.nrows();
    let mut deflator = Deflator::new(n, r.ncols(), tol, n_max)?;
    let mut raw_blocks: Vec<Matrix> = Vec::new();
    // candidate block M^{k-1} R_{k-1}
    let mut candidates = r.clone();
    while !deflator.is_full() {
        let kept = deflator.select(&candidates);
        if kept.is_empty() {
            break;
        }
        let block = candidates.select_columns(&kept);
        candidates = m_op.matmul(&block)?;
        raw_blocks.push(block);
    }
    let refs: Vec<&Matrix> = raw_blocks.iter().collect();
    let raw = Matrix::hstack(n, &refs)?;
    let (record, q) = deflator.finish();
    Ok((raw, q, record))
}

/// The deflated block-Krylov matrix `V(M, R) = [R_1, M R_2, …, M^{k0-1} R_{k0}]`.
///
/// Columns are the raw Krylov vectors, not orthonormalized.
pub fn deflated_krylov(
    m_op: &Matrix,
    r: &Matrix,
    tol: f64,
    n_max: Option<usize>,
) -> Result<KrylovBasis> {
    let (raw, _, record) = run_deflation(m_op, r, tol, n_max)?;
    Ok(KrylovBasis {
        matrix: raw,
        record,
        orthonormal: false,
    })
}

/// Orthonormal basis matrix with the same deflation decisions as [`deflated_krylov`].
pub fn orthonormal_basis(
    m_op: &Matrix,
    r: &Matrix,
    tol: f64,
    n_max: Option<usize>,
) -> Result<KrylovBasis> {
    let (_, q, record) = run_deflation(m_op, r, tol, n_max)?;
    Ok(KrylovBasis {
        matrix: q,
        record,
        orthonormal: true,
    })
}

/// Finds the upper triangular `U` with `v1 = v2 U`.
///
/// `U` is obtained by least squares through a thin QR factorization of `v2`.
/// The check accepts when `‖v1 − v2 U‖_F ≤ tol ‖v1‖_F`, the strictly lower part of
/// `U` has Frobenius norm at most `tol ‖U‖_F`, and every diagonal entry satisfies
/// `|U[k,k]| > tol ‖v1[:,k]‖`.
pub fn change_of_basis_check(v1: &Matrix, v2: &Matrix, tol: f64) -> Result<Matrix> {
    if v1.shape() != v2.shape() {
        return Err(Error::DimensionMismatch {
            context: "change_of_basis_check",
            left: v1.shape(),
            right: v2.shape(),
        });
    }
    let n0 = v2.ncols();
    let (q, idx) = orthonormalize_against(&Matrix::zeros(v2.nrows(), 0), v2, f64::EPSILON)?;
    if idx.len() != n0 {
        return Err(Error::InvalidInput("v2 is not of full column rank".into()));
    }
    // v2 = q * t with t upper triangular; U = t^{-1} q^H v1
    let qh = q.adjoint();
    let t = qh.matmul(v2)?;
    let y = qh.matmul(v1)?;
    let u = back_substitute(&t, &y)?;

    let residual = (v1 - &v2.matmul(&u)?).norm_fro() / v1.norm_fro().max(f64::MIN_POSITIVE);
    let mut lower = 0.0;
    for i in 0..n0 {
        for j in 0..i {
            lower += u[(i, j)].norm_sqr();
        }
    }
    let below_diagonal = lower.sqrt() / u.norm_fro().max(f64::MIN_POSITIVE);
    let min_diagonal = (0..n0)
        .map(|k| u[(k, k)].norm() / v1.column_norm(k).max(f64::MIN_POSITIVE))
        .fold(f64::INFINITY, f64::min);

    if residual <= tol && below_diagonal <= tol && (n0 == 0 || min_diagonal > tol) {
        Ok(u)
    } else {
        Err(Error::NotSameFlag {
            residual,
            below_diagonal,
            min_diagonal,
        })
    }
}

/// Solves `t X = y` for upper triangular `t`, using only its upper part.
fn back_substitute(t: &Matrix, y: &Matrix) -> Result<Matrix> {
    let n = t.nrows();
    let mut x = y.clone();
    for c in 0..y.ncols() {
        for i in (0..n).rev() {
            let mut acc = x[(i, c)];
            for k in i + 1..n {
                acc -= t[(i, k)] * x[(k, c)];
            }
            if t[(i, i)].norm() == 0.0 {
                return Err(Error::Singular {
                    context: "back substitution",
                });
            }
            x[(i, c)] = acc / t[(i, i)];
        }
    }
    Ok(x)
}
