//! Structured operator classes and their factored block-Krylov bases.
//!
//! Two classes of pairs `(M, R)` are supported:
//!
//! * **Case I**: `M = (c ⊗ I_{n0}) [M^(1) … M^(l)] + Σ ⊗ I_{n0}`, `R = c ⊗ R0`, with
//!   every `c_i ≠ 0`.
//! * **Case II**: `M = [C^(1); …; C^(l)] [M^(1) … M^(l)] + diag(σ_i I_{n_i})`,
//!   `R = [C^(1); …; C^(l)] R0`.
//!
//! For both classes the deflated block-Krylov matrix `V(M, R)` factors as a stack
//! of `W U^(i)` (Case I) or `C^(i) W U^(i)` (Case II) with `W` living in the small
//! space `C^{n0}` and every `U^(i)` upper triangular and nonsingular. The
//! constructors below build `W` and the `U^(i)` blockwise by the recursions
//!
//! ```text
//! Case I:  U_jk^(i) = (Σ_t σ_it U_{j,k-1}^(t)) E_k  (j < k),   U_kk^(i) = c_i I
//!          W_k      = (Σ_i M^(i) Σ_j W_j U_{j,k-1}^(i)) E_k,    W_1 = R0 E_1
//! Case II: U_jk^(i) = σ_i U_{j,k-1}^(i) E_k          (j < k),   U_kk^(i) = I
//!          W_k      = (Σ_i M^(i) C^(i) Σ_j W_j U_{j,k-1}^(i)) E_k
//! ```
//!
//! The selections `E_k` are decided on the full-space candidate block rebuilt from
//! the current `W`, `U` blocks, with the same rule as [`crate::krylov`], so the two
//! paths share one [`DeflationRecord`].

use crate::error::{Error, Result};
use crate::krylov::{DeflationRecord, Deflator};
use crate::linalg::{c64, Matrix, Scalar};

fn zero() -> Scalar {
    c64(0.0, 0.0)
}

#[derive(Clone, Debug, PartialEq)]
pub struct CaseIOperator {
    m_blocks: Vec<Matrix>,
    c: Vec<Scalar>,
    sigma: Matrix,
    r: Matrix,
}

impl CaseIOperator {
    /// `m_blocks` are the `l` square blocks `M^(i)`, `c` the coupling vector,
    /// `sigma` the `l x l` matrix `Σ` and `r` the `n0 x m` start block.
    pub fn new(m_blocks: Vec<Matrix>, c: Vec<Scalar>, sigma: Matrix, r: Matrix) -> Result<Self> {
        let l = m_blocks.len();
        if l == 0 {
            return Err(Error::InvalidInput("Case I operator needs l >= 1".into()));
        }
        let n0 = r.nrows();
        if n0 == 0 || r.ncols() == 0 {
            return Err(Error::InvalidInput("start block must be non-empty".into()));
        }
        for b in &m_blocks {
            if b.shape() != (n0, n0) {
                return Err(Error::DimensionMismatch {
                    context: "Case I block M^(i)",
                    left: b.shape(),
                    right: (n0, n0),
                });
            }
        }
        if c.len() != l {
            return Err(Error::DimensionMismatch {
                context: "Case I vector c",
                left: (c.len(), 1),
                right: (l, 1),
            });
        }
        if sigma.shape() != (l, l) {
            return Err(Error::DimensionMismatch {
                context: "Case I matrix sigma",
                left: sigma.shape(),
                right: (l, l),
            });
        }
        if !c.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        if let Some(index) = c.iter().position(|z| *z == zero()) {
            return Err(Error::ZeroC { index });
        }
        Ok(CaseIOperator {
            m_blocks,
            c,
            sigma,
            r,
        })
    }

    pub fn l(&self) -> usize {
        self.m_blocks.len()
    }

    pub fn n0(&self) -> usize {
        self.r.nrows()
    }

    pub fn m(&self) -> usize {
        self.r.ncols()
    }

    /// Full dimension `N = l n0`.
    pub fn dim(&self) -> usize {
        self.l() * self.n0()
    }

    pub fn m_blocks(&self) -> &[Matrix] {
        &self.m_blocks
    }

    pub fn c(&self) -> &[Scalar] {
        &self.c
    }

    pub fn sigma(&self) -> &Matrix {
        &self.sigma
    }

    pub fn r(&self) -> &Matrix {
        &self.r
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CaseIIOperator {
    c_blocks: Vec<Matrix>,
    m_blocks: Vec<Matrix>,
    sigma: Vec<Scalar>,
    r: Matrix,
}

impl CaseIIOperator {
    /// `c_blocks[i]` is `n_i x n0`, `m_blocks[i]` is `n0 x n_i`, `sigma` holds the
    /// `l` diagonal shifts and `r` the `n0 x m` start block.
    pub fn new(
        c_blocks: Vec<Matrix>,
        m_blocks: Vec<Matrix>,
        sigma: Vec<Scalar>,
        r: Matrix,
    ) -> Result<Self> {
        let l = c_blocks.len();
        if l == 0 {
            return Err(Error::InvalidInput("Case II operator needs l >= 1".into()));
        }
        let n0 = r.nrows();
        if n0 == 0 || r.ncols() == 0 {
            return Err(Error::InvalidInput("start block must be non-empty".into()));
        }
        if m_blocks.len() != l || sigma.len() != l {
            return Err(Error::InvalidInput(format!(
                "Case II needs l = {l} blocks of C, M and sigma; got {} and {}",
                m_blocks.len(),
                sigma.len()
            )));
        }
        for (cb, mb) in c_blocks.iter().zip(&m_blocks) {
            let ni = cb.nrows();
            if ni == 0 || cb.ncols() != n0 {
                return Err(Error::DimensionMismatch {
                    context: "Case II block C^(i)",
                    left: cb.shape(),
                    right: (ni, n0),
                });
            }
            if mb.shape() != (n0, ni) {
                return Err(Error::DimensionMismatch {
                    context: "Case II block M^(i)",
                    left: mb.shape(),
                    right: (n0, ni),
                });
            }
        }
        if !sigma.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(CaseIIOperator {
            c_blocks,
            m_blocks,
            sigma,
            r,
        })
    }

    pub fn l(&self) -> usize {
        self.c_blocks.len()
    }

    pub fn n0(&self) -> usize {
        self.r.nrows()
    }

    pub fn m(&self) -> usize {
        self.r.ncols()
    }

    /// Block sizes `n_1, …, n_l`.
    pub fn block_sizes(&self) -> Vec<usize> {
        self.c_blocks.iter().map(Matrix::nrows).collect()
    }

    /// Full dimension `N = n_1 + … + n_l`.
    pub fn dim(&self) -> usize {
        self.block_sizes().iter().sum()
    }

    pub fn c_blocks(&self) -> &[Matrix] {
        &self.c_blocks
    }

    pub fn m_blocks(&self) -> &[Matrix] {
        &self.m_blocks
    }

    pub fn sigma(&self) -> &[Scalar] {
        &self.sigma
    }

    pub fn r(&self) -> &Matrix {
        &self.r
    }

    fn stacked_c(&self) -> Matrix {
        let refs: Vec<&Matrix> = self.c_blocks.iter().collect();
        Matrix::vstack(self.n0(), &refs).expect("validated block shapes")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CaseTag {
    CaseI,
    CaseII,
}

/// Borrowed view of either operator class.
#[derive(Clone, Copy, Debug)]
pub enum OperatorRef<'a> {
    CaseI(&'a CaseIOperator),
    CaseII(&'a CaseIIOperator),
}

impl<'a> From<&'a CaseIOperator> for OperatorRef<'a> {
    fn from(op: &'a CaseIOperator) -> Self {
        OperatorRef::CaseI(op)
    }
}

impl<'a> From<&'a CaseIIOperator> for OperatorRef<'a> {
    fn from(op: &'a CaseIIOperator) -> Self {
        OperatorRef::CaseII(op)
    }
}

/// Factored basis `(W, U^(1), …, U^(l))`.
#[derive(Clone, Debug)]
pub struct StructuredBasis {
    pub w: Matrix,
    pub u_blocks: Vec<Matrix>,
    pub record: DeflationRecord,
    pub case_tag: CaseTag,
}

impl StructuredBasis {
    pub fn n0(&self) -> usize {
        self.w.ncols()
    }
}

/// Dense `(M, R)` of a Case I operator.
pub fn assemble_case_i(op: &CaseIOperator) -> (Matrix, Matrix) {
    let n0 = op.n0();
    let eye = Matrix::identity(n0);
    let c = Matrix::column_vector(&op.c);
    let refs: Vec<&Matrix> = op.m_blocks.iter().collect();
    let row = Matrix::hstack(n0, &refs).expect("validated block shapes");
    let m_mat = &(&c.kron(&eye) * &row) + &op.sigma.kron(&eye);
    let r_mat = c.kron(&op.r);
    (m_mat, r_mat)
}

/// Dense `(M, R)` of a Case II operator.
pub fn assemble_case_ii(op: &CaseIIOperator) -> (Matrix, Matrix) {
    let n0 = op.n0();
    let stacked = op.stacked_c();
    let refs: Vec<&Matrix> = op.m_blocks.iter().collect();
    let row = Matrix::hstack(n0, &refs).expect("validated block shapes");
    let shifts: Vec<Matrix> = op
        .c_blocks
        .iter()
        .zip(&op.sigma)
        .map(|(cb, &s)| Matrix::identity(cb.nrows()).scale(s))
        .collect();
    let shift_refs: Vec<&Matrix> = shifts.iter().collect();
    let m_mat = &(&stacked * &row) + &Matrix::block_diag(&shift_refs);
    let r_mat = &stacked * &op.r;
    (m_mat, r_mat)
}

/// What distinguishes the two recursions.
trait Recursion {
    fn levels(&self) -> usize;
    fn dim(&self) -> usize;
    fn start(&self) -> &Matrix;
    /// Coefficient of the diagonal block `U_kk^(i)`.
    fn diagonal(&self, i: usize) -> Scalar;
    /// Off-diagonal update of level `i` from the previous column blocks `U_{j,k-1}^(t)`
    /// of every level `t`.
    fn mix(&self, i: usize, prev: &[&Matrix]) -> Matrix;
    /// New `W` block from the previous reconstructions `X^(i) = Σ_j W_j U_{j,k-1}^(i)`.
    fn next_w(&self, xs: &[Matrix]) -> Matrix;
    /// Maps a level-`i` reconstruction from `C^{n0}` into its rows of `C^N`.
    fn lift(&self, i: usize, x: &Matrix) -> Matrix;
    fn tag(&self) -> CaseTag;
}

impl Recursion for CaseIOperator {
    fn levels(&self) -> usize {
        self.l()
    }

    fn dim(&self) -> usize {
        CaseIOperator::dim(self)
    }

    fn start(&self) -> &Matrix {
        &self.r
    }

    fn diagonal(&self, i: usize) -> Scalar {
        self.c[i]
    }

    fn mix(&self, i: usize, prev: &[&Matrix]) -> Matrix {
        let (rows, cols) = prev[0].shape();
        let mut acc = Matrix::zeros(rows, cols);
        for (t, u) in prev.iter().enumerate() {
            let s = self.sigma[(i, t)];
            if s != zero() {
                acc = &acc + &u.scale(s);
            }
        }
        acc
    }

    fn next_w(&self, xs: &[Matrix]) -> Matrix {
        let (rows, cols) = (self.n0(), xs[0].ncols());
        xs.iter()
            .zip(&self.m_blocks)
            .fold(Matrix::zeros(rows, cols), |acc, (x, mb)| &acc + &(mb * x))
    }

    fn lift(&self, _i: usize, x: &Matrix) -> Matrix {
        x.clone()
    }

    fn tag(&self) -> CaseTag {
        CaseTag::CaseI
    }
}

impl Recursion for CaseIIOperator {
    fn levels(&self) -> usize {
        self.l()
    }

    fn dim(&self) -> usize {
        CaseIIOperator::dim(self)
    }

    fn start(&self) -> &Matrix {
        &self.r
    }

    fn diagonal(&self, _i: usize) -> Scalar {
        c64(1.0, 0.0)
    }

    fn mix(&self, i: usize, prev: &[&Matrix]) -> Matrix {
        prev[i].scale(self.sigma[i])
    }

    fn next_w(&self, xs: &[Matrix]) -> Matrix {
        let (rows, cols) = (self.n0(), xs[0].ncols());
        xs.iter()
            .enumerate()
            .fold(Matrix::zeros(rows, cols), |acc, (i, x)| {
                &acc + &(&self.m_blocks[i] * &(&self.c_blocks[i] * x))
            })
    }

    fn lift(&self, i: usize, x: &Matrix) -> Matrix {
        &self.c_blocks[i] * x
    }

    fn tag(&self) -> CaseTag {
        CaseTag::CaseII
    }
}

fn build<S: Recursion>(op: &S, tol: f64, n_max: Option<usize>) -> Result<StructuredBasis> {
    let l = op.levels();
    let r = op.start();
    let (n0, m) = r.shape();
    let mut deflator = Deflator::new(op.dim(), m, tol, n_max)?;

    // w_blocks[k] = W_k; u_cols[k][i][j] = U_jk^(i) for j <= k
    let mut w_blocks: Vec<Matrix> = Vec::new();
    let mut u_cols: Vec<Vec<Vec<Matrix>>> = Vec::new();

    // Pre-selection blocks of the first step: W~_1 = R, U~_11^(i) = diag_i I_m.
    let mut w_tilde = r.clone();
    let mut u_tilde: Vec<Vec<Matrix>> = (0..l).map(|_| Vec::new()).collect();

    while !deflator.is_full() {
        let k = w_blocks.len();
        let width = w_tilde.ncols();

        // Candidate block k, stacked over levels.
        let mut rows = Vec::with_capacity(l);
        for (i, off_diag) in u_tilde.iter().enumerate() {
            let mut inner = w_tilde.scale(op.diagonal(i));
            for (j, u) in off_diag.iter().enumerate() {
                inner = &inner + &(&w_blocks[j] * u);
            }
            rows.push(op.lift(i, &inner));
        }
        let row_refs: Vec<&Matrix> = rows.iter().collect();
        let candidates = Matrix::vstack(width, &row_refs)?;

        let kept = deflator.select(&candidates);
        if kept.is_empty() {
            break;
        }

        let mk = kept.len();
        w_blocks.push(w_tilde.select_columns(&kept));
        let column: Vec<Vec<Matrix>> = u_tilde
            .iter()
            .enumerate()
            .map(|(i, off_diag)| {
                let mut col: Vec<Matrix> =
                    off_diag.iter().map(|u| u.select_columns(&kept)).collect();
                col.push(Matrix::identity(mk).scale(op.diagonal(i)));
                col
            })
            .collect();
        u_cols.push(column);

        // Pre-selection blocks of step k + 1.
        let last = &u_cols[k];
        let xs: Vec<Matrix> = (0..l)
            .map(|i| {
                last[i]
                    .iter()
                    .enumerate()
                    .fold(Matrix::zeros(n0, mk), |acc, (j, u)| {
                        &acc + &(&w_blocks[j] * u)
                    })
            })
            .collect();
        w_tilde = op.next_w(&xs);
        u_tilde = (0..l)
            .map(|i| {
                (0..=k)
                    .map(|j| {
                        let prev: Vec<&Matrix> = (0..l).map(|t| &last[t][j]).collect();
                        op.mix(i, &prev)
                    })
                    .collect()
            })
            .collect();
    }

    let (record, _) = deflator.finish();
    let offsets = record.block_offsets();
    let total = record.n0();
    let w_refs: Vec<&Matrix> = w_blocks.iter().collect();
    let w = Matrix::hstack(n0, &w_refs)?;
    let u_blocks = (0..l)
        .map(|i| {
            let mut u = Matrix::zeros(total, total);
            for (k, column) in u_cols.iter().enumerate() {
                for (j, block) in column[i].iter().enumerate() {
                    u.set_block(offsets[j], offsets[k], block);
                }
            }
            u
        })
        .collect();
    Ok(StructuredBasis {
        w,
        u_blocks,
        record,
        case_tag: op.tag(),
    })
}

/// Factored basis of a Case I pair.
pub fn structured_basis_case_i(
    op: &CaseIOperator,
    tol: f64,
    n_max: Option<usize>,
) -> Result<StructuredBasis> {
    build(op, tol, n_max)
}

/// Factored basis of a Case II pair.
pub fn structured_basis_case_ii(
    op: &CaseIIOperator,
    tol: f64,
    n_max: Option<usize>,
) -> Result<StructuredBasis> {
    build(op, tol, n_max)
}

/// Rebuilds the full-space basis matrix from its factored form.
pub fn reconstruct<'a>(sb: &StructuredBasis, op: impl Into<OperatorRef<'a>>) -> Result<Matrix> {
    let op = op.into();
    let n0_cols = sb.n0();
    let mismatch = |expected: CaseTag| {
        Error::InvalidInput(format!(
            "basis was built for {:?}, operator is {expected:?}",
            sb.case_tag
        ))
    };
    let blocks: Vec<Matrix> = match op {
        OperatorRef::CaseI(op) => {
            if sb.case_tag != CaseTag::CaseI {
                return Err(mismatch(CaseTag::CaseI));
            }
            check_factor_shapes(sb, op.n0(), op.l())?;
            sb.u_blocks.iter().map(|u| &sb.w * u).collect()
        }
        OperatorRef::CaseII(op) => {
            if sb.case_tag != CaseTag::CaseII {
                return Err(mismatch(CaseTag::CaseII));
            }
            check_factor_shapes(sb, op.n0(), op.l())?;
            sb.u_blocks
                .iter()
                .zip(&op.c_blocks)
                .map(|(u, cb)| cb * &(&sb.w * u))
                .collect()
        }
    };
    let refs: Vec<&Matrix> = blocks.iter().collect();
    Matrix::vstack(n0_cols, &refs)
}

fn check_factor_shapes(sb: &StructuredBasis, n0: usize, l: usize) -> Result<()> {
    let n = sb.n0();
    if sb.w.nrows() != n0
        || sb.u_blocks.len() != l
        || sb.u_blocks.iter().any(|u| u.shape() != (n, n))
    {
        return Err(Error::DimensionMismatch {
            context: "reconstruct",
            left: sb.w.shape(),
            right: (n0, l),
        });
    }
    Ok(())
}

/// First `n` columns of `W`, spanning the subspace `S_n ⊆ C^{n0}`.
pub fn leading_subspaces(sb: &StructuredBasis, n: usize) -> Result<Matrix> {
    if n == 0 || n > sb.n0() {
        return Err(Error::OutOfRange {
            index: n,
            limit: sb.n0(),
        });
    }
    Ok(sb.w.leading_columns(n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::krylov::deflated_krylov;
    use crate::linalg::{relative_difference, DEFAULT_TOL};

    fn re(x: f64) -> Scalar {
        c64(x, 0.0)
    }

    fn scalar(x: f64) -> Matrix {
        Matrix::from_real(1, 1, &[x]).unwrap()
    }

    #[test]
    fn zero_c_rejected() {
        let err = CaseIOperator::new(
            vec![scalar(1.0), scalar(2.0)],
            vec![re(1.0), re(0.0)],
            Matrix::zeros(2, 2),
            scalar(1.0),
        )
        .unwrap_err();
        assert_eq!(err, Error::ZeroC { index: 1 });
    }

    #[test]
    fn case_i_single_level_is_plain() {
        let m1 = Matrix::from_real(2, 2, &[1.0, 2.0, 3.0, 4.0]).unwrap();
        let r = Matrix::from_real(2, 1, &[1.0, -1.0]).unwrap();
        let op = CaseIOperator::new(
            vec![m1.clone()],
            vec![re(1.0)],
            Matrix::zeros(1, 1),
            r.clone(),
        )
        .unwrap();
        let (m, rr) = assemble_case_i(&op);
        assert_eq!(m, m1);
        assert_eq!(rr, r);
    }

    #[test]
    fn case_i_scalar_blocks() {
        let (a, b) = (0.3, -1.7);
        let sigma = Matrix::from_real(2, 2, &[0.0, 0.0, -1.0, 0.0]).unwrap();
        let op = CaseIOperator::new(
            vec![scalar(a), scalar(b)],
            vec![re(1.0), re(1.0)],
            sigma,
            scalar(1.0),
        )
        .unwrap();
        let (m, _) = assemble_case_i(&op);
        assert_eq!(m, Matrix::from_real(2, 2, &[a, b, a - 1.0, b]).unwrap());
    }

    #[test]
    fn case_ii_single_level() {
        let cb = Matrix::from_real(2, 1, &[1.0, 2.0]).unwrap();
        let mb = Matrix::from_real(1, 2, &[0.5, -1.0]).unwrap();
        let r = scalar(3.0);
        let op = CaseIIOperator::new(vec![cb.clone()], vec![mb.clone()], vec![re(0.0)], r.clone())
            .unwrap();
        let (m, rr) = assemble_case_ii(&op);
        assert_eq!(m, &cb * &mb);
        assert_eq!(rr, &cb * &r);
    }

    #[test]
    fn case_ii_scalar_blocks() {
        let op = CaseIIOperator::new(
            vec![scalar(1.0), scalar(1.0)],
            vec![scalar(0.5), scalar(-0.5)],
            vec![re(0.0), re(1.0)],
            scalar(1.0),
        )
        .unwrap();
        let (m, r) = assemble_case_ii(&op);
        assert_eq!(m, Matrix::from_real(2, 2, &[0.5, -0.5, 0.5, 0.5]).unwrap());
        assert_eq!(r, Matrix::from_real(2, 1, &[1.0, 1.0]).unwrap());
    }

    #[test]
    fn case_i_trivial_basis() {
        let e1 = Matrix::from_real(2, 1, &[1.0, 0.0]).unwrap();
        let op = CaseIOperator::new(
            vec![Matrix::identity(2)],
            vec![re(1.0)],
            Matrix::zeros(1, 1),
            e1.clone(),
        )
        .unwrap();
        let sb = structured_basis_case_i(&op, DEFAULT_TOL, None).unwrap();
        assert_eq!(sb.n0(), 1);
        assert_eq!(sb.w, e1);
        assert_eq!(sb.u_blocks, vec![scalar(1.0)]);
        assert_eq!(reconstruct(&sb, &op).unwrap(), e1);
    }

    #[test]
    fn case_ii_zero_shift_single_level() {
        let cb = Matrix::from_real(3, 2, &[1.0, 0.0, 0.0, 1.0, 1.0, 1.0]).unwrap();
        let mb = Matrix::from_real(2, 3, &[0.0, 1.0, 0.0, 1.0, 0.0, 0.5]).unwrap();
        let r = Matrix::from_real(2, 1, &[1.0, 0.0]).unwrap();
        let op = CaseIIOperator::new(vec![cb.clone()], vec![mb.clone()], vec![re(0.0)], r.clone())
            .unwrap();
        let sb = structured_basis_case_ii(&op, DEFAULT_TOL, None).unwrap();
        // with sigma = 0, U^(1) = I and W = [R, (M C) R, ...]
        assert_eq!(sb.u_blocks[0], Matrix::identity(sb.n0()));
        let mc = &mb * &cb;
        assert_eq!(sb.w.column(0), r);
        assert!(relative_difference(&sb.w.column(1), &(&mc * &r)) < 1e-15);
    }

    #[test]
    fn leading_subspaces_range() {
        let op = CaseIOperator::new(
            vec![Matrix::identity(2)],
            vec![re(1.0)],
            Matrix::zeros(1, 1),
            Matrix::from_real(2, 1, &[1.0, 0.0]).unwrap(),
        )
        .unwrap();
        let sb = structured_basis_case_i(&op, DEFAULT_TOL, None).unwrap();
        assert_eq!(leading_subspaces(&sb, 1).unwrap(), sb.w);
        assert!(matches!(
            leading_subspaces(&sb, 2),
            Err(Error::OutOfRange { .. })
        ));
        assert!(leading_subspaces(&sb, 0).is_err());
    }

    #[test]
    fn reconstruct_rejects_wrong_case() {
        let op1 = CaseIOperator::new(
            vec![Matrix::identity(1)],
            vec![re(1.0)],
            Matrix::zeros(1, 1),
            scalar(1.0),
        )
        .unwrap();
        let op2 = CaseIIOperator::new(
            vec![scalar(1.0)],
            vec![scalar(1.0)],
            vec![re(0.0)],
            scalar(1.0),
        )
        .unwrap();
        let sb = structured_basis_case_i(&op1, DEFAULT_TOL, None).unwrap();
        assert!(reconstruct(&sb, &op2).is_err());
    }

    #[test]
    fn two_level_matches_reference() {
        let m1 = Matrix::from_real(2, 2, &[0.2, 0.1, -0.3, 0.4]).unwrap();
        let m2 = Matrix::from_real(2, 2, &[0.5, 0.0, 0.1, -0.2]).unwrap();
        let sigma = Matrix::from_real(2, 2, &[0.0, 0.0, -1.0, 0.0]).unwrap();
        let r = Matrix::from_real(2, 1, &[1.0, 0.5]).unwrap();
        let op = CaseIOperator::new(vec![m1, m2], vec![re(1.0), re(0.7)], sigma, r).unwrap();
        let sb = structured_basis_case_i(&op, DEFAULT_TOL, None).unwrap();
        let (m, rr) = assemble_case_i(&op);
        let reference = deflated_krylov(&m, &rr, DEFAULT_TOL, None).unwrap();
        assert_eq!(sb.record, reference.record);
        assert!(relative_difference(&reconstruct(&sb, &op).unwrap(), &reference.matrix) < 1e-12);
    }
}
