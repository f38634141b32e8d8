//! Dense complex linear algebra.
//!
//! Everything in the crate is carried by [`Matrix`], a row-major dense matrix of
//! `Complex64`. Real data is promoted on construction. Zero-sized dimensions are
//! allowed so that empty bases and empty column selections are representable.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type Scalar = Complex64;

/// Relative pivot floor used by [`Lu::factor`].
pub const PIVOT_FLOOR: f64 = 1e-14;

/// Default relative deflation tolerance.
pub const DEFAULT_TOL: f64 = 1e-10;

#[inline]
pub fn c64(re: f64, im: f64) -> Scalar {
    Complex64::new(re, im)
}

#[derive(Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Scalar>,
}

impl Matrix {
    /// Builds a matrix from row-major entries, rejecting wrong lengths and non-finite values.
    pub fn new(rows: usize, cols: usize, data: Vec<Scalar>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::InvalidInput(format!(
                "{} entries supplied for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        if !data.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn from_real(rows: usize, cols: usize, data: &[f64]) -> Result<Self> {
        Self::new(rows, cols, data.iter().map(|&x| c64(x, 0.0)).collect())
    }

    /// Builds a matrix from a list of equally long rows.
    pub fn from_rows<R: AsRef<[Scalar]>>(rows: &[R]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            let r = r.as_ref();
            if r.len() != cols {
                return Err(Error::InvalidInput("ragged rows".into()));
            }
            data.extend_from_slice(r);
        }
        Self::new(rows.len(), cols, data)
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![Scalar::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = c64(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Scalar) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    /// Column vector with the given entries.
    pub fn column_vector(entries: &[Scalar]) -> Self {
        Matrix {
            rows: entries.len(),
            cols: 1,
            data: entries.to_vec(),
        }
    }

    pub fn diagonal(entries: &[Scalar]) -> Self {
        let mut m = Self::zeros(entries.len(), entries.len());
        for (i, &z) in entries.iter().enumerate() {
            m[(i, i)] = z;
        }
        m
    }

    #[inline]
    pub fn nrows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn ncols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Row-major view of the entries.
    pub fn as_slice(&self) -> &[Scalar] {
        &self.data
    }

    pub fn is_finite(&self) -> bool {
        self.data
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Matrix {
        Matrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn scale(&self, s: Scalar) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| z * s).collect(),
        }
    }

    pub fn matmul(&self, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch {
                context: "matmul",
                left: self.shape(),
                right: other.shape(),
            });
        }
        let mut out = Matrix::zeros(self.rows, other.cols);
        let n = other.cols;
        for i in 0..self.rows {
            let out_row = &mut out.data[i * n..(i + 1) * n];
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == Scalar::new(0.0, 0.0) {
                    continue;
                }
                let b_row = &other.data[k * n..(k + 1) * n];
                for (o, &b) in out_row.iter_mut().zip(b_row) {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }

    /// Kronecker product: block `(j, k)` of the result is `self[(j, k)] * other`.
    pub fn kron(&self, other: &Matrix) -> Matrix {
        let (p, q) = other.shape();
        Matrix::from_fn(self.rows * p, self.cols * q, |r, c| {
            self[(r / p, c / q)] * other[(r % p, c % q)]
        })
    }

    /// Solves `self * X = rhs` by LU with partial pivoting.
    pub fn solve(&self, rhs: &Matrix) -> Result<Matrix> {
        Lu::factor(self)?.solve(rhs)
    }

    pub fn norm_fro(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn column_norm(&self, j: usize) -> f64 {
        (0..self.rows)
            .map(|i| self[(i, j)].norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn column(&self, j: usize) -> Matrix {
        self.select_columns(&[j])
    }

    pub fn column_entries(&self, j: usize) -> Vec<Scalar> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    /// Keeps the listed columns in the listed order.
    pub fn select_columns(&self, indices: &[usize]) -> Matrix {
        Matrix::from_fn(self.rows, indices.len(), |i, j| self[(i, indices[j])])
    }

    pub fn leading_columns(&self, n: usize) -> Matrix {
        self.block(0, 0, self.rows, n)
    }

    pub fn block(&self, r0: usize, c0: usize, nr: usize, nc: usize) -> Matrix {
        assert!(
            r0 + nr <= self.rows && c0 + nc <= self.cols,
            "block out of range"
        );
        Matrix::from_fn(nr, nc, |i, j| self[(r0 + i, c0 + j)])
    }

    pub fn set_block(&mut self, r0: usize, c0: usize, b: &Matrix) {
        assert!(
            r0 + b.rows <= self.rows && c0 + b.cols <= self.cols,
            "set_block out of range"
        );
        for i in 0..b.rows {
            for j in 0..b.cols {
                self[(r0 + i, c0 + j)] = b[(i, j)];
            }
        }
    }

    /// Horizontal concatenation. An empty list yields a `rows x 0` matrix.
    pub fn hstack(rows: usize, parts: &[&Matrix]) -> Result<Matrix> {
        let cols = parts.iter().map(|p| p.cols).sum();
        let mut out = Matrix::zeros(rows, cols);
        let mut c0 = 0;
        for p in parts {
            if p.rows != rows {
                return Err(Error::DimensionMismatch {
                    context: "hstack",
                    left: (rows, c0),
                    right: p.shape(),
                });
            }
            out.set_block(0, c0, p);
            c0 += p.cols;
        }
        Ok(out)
    }

    /// Vertical concatenation. An empty list yields a `0 x cols` matrix.
    pub fn vstack(cols: usize, parts: &[&Matrix]) -> Result<Matrix> {
        let rows = parts.iter().map(|p| p.rows).sum();
        let mut out = Matrix::zeros(rows, cols);
        let mut r0 = 0;
        for p in parts {
            if p.cols != cols {
                return Err(Error::DimensionMismatch {
                    context: "vstack",
                    left: (r0, cols),
                    right: p.shape(),
                });
            }
            out.set_block(r0, 0, p);
            r0 += p.rows;
        }
        Ok(out)
    }

    pub fn block_diag(parts: &[&Matrix]) -> Matrix {
        let rows = parts.iter().map(|p| p.rows).sum();
        let cols = parts.iter().map(|p| p.cols).sum();
        let mut out = Matrix::zeros(rows, cols);
        let (mut r0, mut c0) = (0, 0);
        for p in parts {
            out.set_block(r0, c0, p);
            r0 += p.rows;
            c0 += p.cols;
        }
        out
    }

    fn check_same_shape(&self, other: &Matrix, context: &'static str) {
        assert!(
            self.shape() == other.shape(),
            "dimension mismatch in {context}: {:?} vs {:?}",
            self.shape(),
            other.shape()
        );
    }
}

/// `‖a − b‖_F / ‖b‖_F`, or the absolute difference when `b` vanishes.
pub fn relative_difference(a: &Matrix, b: &Matrix) -> f64 {
    let diff = (a - b).norm_fro();
    let scale = b.norm_fro();
    if scale > 0.0 {
        diff / scale
    } else {
        diff
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = Scalar;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Scalar {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Scalar {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let z = self[(i, j)];
                write!(f, "{:>11.4e}{:+.4e}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl Add for &Matrix {
    type Output = Matrix;

    fn add(self, rhs: &Matrix) -> Matrix {
        self.check_same_shape(rhs, "add");
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Sub for &Matrix {
    type Output = Matrix;

    fn sub(self, rhs: &Matrix) -> Matrix {
        self.check_same_shape(rhs, "sub");
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl Neg for &Matrix {
    type Output = Matrix;

    fn neg(self) -> Matrix {
        self.scale(c64(-1.0, 0.0))
    }
}

/// Panics on non-conforming operands; use [`Matrix::matmul`] for a fallible product.
impl Mul for &Matrix {
    type Output = Matrix;

    fn mul(self, rhs: &Matrix) -> Matrix {
        match self.matmul(rhs) {
            Ok(m) => m,
            Err(e) => panic!("{e}"),
        }
    }
}

impl Mul<&Matrix> for Matrix {
    type Output = Matrix;

    fn mul(self, rhs: &Matrix) -> Matrix {
        &self * rhs
    }
}

impl Mul<Scalar> for &Matrix {
    type Output = Matrix;

    fn mul(self, rhs: Scalar) -> Matrix {
        self.scale(rhs)
    }
}

/// LU factorization `P A = L U` with partial pivoting, stored compactly.
#[derive(Clone, Debug)]
pub struct Lu {
    factors: Matrix,
    perm: Vec<usize>,
}

impl Lu {
    /// Fails with [`Error::Singular`] when a pivot magnitude is at most
    /// `PIVOT_FLOOR * ‖a‖_F`.
    pub fn factor(a: &Matrix) -> Result<Lu> {
        if !a.is_square() {
            return Err(Error::DimensionMismatch {
                context: "lu",
                left: a.shape(),
                right: a.shape(),
            });
        }
        if !a.is_finite() {
            return Err(Error::NonFinite);
        }
        let n = a.rows;
        let floor = PIVOT_FLOOR * a.norm_fro();
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();

        for k in 0..n {
            let (p, pivot_abs) =
                (k..n)
                    .map(|i| (i, lu[(i, k)].norm()))
                    .fold(
                        (k, -1.0),
                        |best, cur| if cur.1 > best.1 { cur } else { best },
                    );
            if pivot_abs <= floor {
                return Err(Error::Singular { context: "lu" });
            }
            if p != k {
                for j in 0..n {
                    lu.data.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
            }
            let pivot = lu[(k, k)];
            for i in k + 1..n {
                let factor = lu[(i, k)] / pivot;
                lu[(i, k)] = factor;
                if factor == Scalar::new(0.0, 0.0) {
                    continue;
                }
                for j in k + 1..n {
                    let u = lu[(k, j)];
                    lu[(i, j)] -= factor * u;
                }
            }
        }
        Ok(Lu { factors: lu, perm })
    }

    pub fn dim(&self) -> usize {
        self.factors.rows
    }

    pub fn solve(&self, rhs: &Matrix) -> Result<Matrix> {
        let n = self.dim();
        if rhs.rows != n {
            return Err(Error::DimensionMismatch {
                context: "solve",
                left: (n, n),
                right: rhs.shape(),
            });
        }
        let lu = &self.factors;
        let mut x = rhs.select_rows(&self.perm);
        let m = rhs.cols;
        for c in 0..m {
            for i in 1..n {
                let mut acc = x[(i, c)];
                for k in 0..i {
                    acc -= lu[(i, k)] * x[(k, c)];
                }
                x[(i, c)] = acc;
            }
            for i in (0..n).rev() {
                let mut acc = x[(i, c)];
                for k in i + 1..n {
                    acc -= lu[(i, k)] * x[(k, c)];
                }
                x[(i, c)] = acc / lu[(i, i)];
            }
        }
        Ok(x)
    }
}

impl Matrix {
    fn select_rows(&self, indices: &[usize]) -> Matrix {
        Matrix::from_fn(indices.len(), self.cols, |i, j| self[(indices[i], j)])
    }
}

fn dot_conj(q: &[Scalar], v: &[Scalar]) -> Scalar {
    q.iter().zip(v).map(|(a, b)| a.conj() * b).sum()
}

fn vec_norm(v: &[Scalar]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Incrementally grown orthonormal column set used for deflation decisions.
#[derive(Clone, Debug, Default)]
pub(crate) struct OrthoShadow {
    dim: usize,
    columns: Vec<Vec<Scalar>>,
}

impl OrthoShadow {
    pub(crate) fn new(dim: usize) -> Self {
        OrthoShadow {
            dim,
            columns: Vec::new(),
        }
    }

    pub(crate) fn len(&self) -> usize {
        self.columns.len()
    }

    /// Pushes a column assumed to be orthonormal to the current set.
    fn push_raw(&mut self, column: Vec<Scalar>) {
        self.columns.push(column);
    }

    /// Two passes of modified Gram–Schmidt. Keeps the normalized residual when
    /// its norm exceeds `tol` times the original norm.
    pub(crate) fn try_extend(&mut self, mut v: Vec<Scalar>, tol: f64) -> bool {
        let original = vec_norm(&v);
        if original == 0.0 {
            return false;
        }
        for _ in 0..2 {
            for q in &self.columns {
                let h = dot_conj(q, &v);
                for (vi, qi) in v.iter_mut().zip(q) {
                    *vi -= h * qi;
                }
            }
        }
        let residual = vec_norm(&v);
        if residual > tol * original {
            let inv = 1.0 / residual;
            v.iter_mut().for_each(|z| *z *= inv);
            self.columns.push(v);
            true
        } else {
            false
        }
    }

    pub(crate) fn to_matrix(&self) -> Matrix {
        Matrix::from_fn(self.dim, self.columns.len(), |i, j| self.columns[j][i])
    }
}

/// Orthonormalizes `candidates` against `basis` and against each other.
///
/// A candidate is kept when its residual after two modified Gram–Schmidt passes
/// exceeds `tol` times its original norm. Kept columns are returned normalized, in
/// their original order, together with their indices into `candidates`.
pub fn orthonormalize_against(
    basis: &Matrix,
    candidates: &Matrix,
    tol: f64,
) -> Result<(Matrix, Vec<usize>)> {
    if basis.rows != candidates.rows {
        return Err(Error::DimensionMismatch {
            context: "orthonormalize_against",
            left: basis.shape(),
            right: candidates.shape(),
        });
    }
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::InvalidInput(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    let mut shadow = OrthoShadow::new(basis.rows);
    for j in 0..basis.cols {
        shadow.push_raw(basis.column_entries(j));
    }
    let offset = shadow.len();
    let mut kept = Vec::new();
    for j in 0..candidates.cols {
        if shadow.try_extend(candidates.column_entries(j), tol) {
            kept.push(j);
        }
    }
    let q = Matrix::from_fn(basis.rows, kept.len(), |i, j| shadow.columns[offset + j][i]);
    Ok((q, kept))
}
