//! Dynamical-system models and their first-order formulations.
//!
//! An `l`-th-order system `Σ_i P_i x^{(i)} = B u`, `y = D u + Σ_j L_j x^{(j)}` is
//! linearized by the companion construction into a first-order pencil of size
//! `l n0`. A first-order integro-DAE `P_1 x' + P_0 x + P_{-1} ∫x = B u` is
//! linearized with an auxiliary integrated state, where `P_{-1}` is only ever held
//! in factored form `F_1 G F_2^H` or `F_1 G^{-1} F_2^H`.
//!
//! For an expansion point `s0` the Krylov operators of a first-order system are
//! `M = (s0 E − A)^{-1} E` and `R = (s0 E − A)^{-1} B`. The higher-order pair is a
//! Case I operator and the integro-DAE pair a Case II operator; both structured
//! representations are built here directly from the system matrices.

use crate::error::{Error, Result};
use crate::linalg::{c64, relative_difference, Lu, Matrix, Scalar};
use crate::structured::{CaseIIOperator, CaseIOperator};

fn one() -> Scalar {
    c64(1.0, 0.0)
}

fn expect_shape(m: &Matrix, shape: (usize, usize), context: &'static str) -> Result<()> {
    if m.shape() != shape {
        return Err(Error::DimensionMismatch {
            context,
            left: m.shape(),
            right: shape,
        });
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq)]
pub struct HigherOrderSystem {
    p_coeffs: Vec<Matrix>,
    b: Matrix,
    l_coeffs: Vec<Matrix>,
    d: Matrix,
}

impl HigherOrderSystem {
    /// `p_coeffs = [P_0, …, P_l]`, `l_coeffs = [L_0, …, L_{l-1}]`.
    pub fn new(p_coeffs: Vec<Matrix>, b: Matrix, l_coeffs: Vec<Matrix>, d: Matrix) -> Result<Self> {
        if p_coeffs.len() < 2 {
            return Err(Error::InvalidInput(
                "a system of order l needs l + 1 >= 2 coefficients".into(),
            ));
        }
        let order = p_coeffs.len() - 1;
        let (n0, m) = b.shape();
        if n0 == 0 || m == 0 {
            return Err(Error::InvalidInput("B must be non-empty".into()));
        }
        for p in &p_coeffs {
            expect_shape(p, (n0, n0), "P_i")?;
        }
        if l_coeffs.len() != order {
            return Err(Error::InvalidInput(format!(
                "order {order} needs {order} output coefficients, got {}",
                l_coeffs.len()
            )));
        }
        let p = d.nrows();
        if p == 0 {
            return Err(Error::InvalidInput("D must be non-empty".into()));
        }
        expect_shape(&d, (p, m), "D")?;
        for lj in &l_coeffs {
            expect_shape(lj, (p, n0), "L_j")?;
        }
        Ok(HigherOrderSystem {
            p_coeffs,
            b,
            l_coeffs,
            d,
        })
    }

    pub fn order(&self) -> usize {
        self.p_coeffs.len() - 1
    }

    pub fn n0(&self) -> usize {
        self.b.nrows()
    }

    pub fn inputs(&self) -> usize {
        self.b.ncols()
    }

    pub fn outputs(&self) -> usize {
        self.d.nrows()
    }

    pub fn p_coeffs(&self) -> &[Matrix] {
        &self.p_coeffs
    }

    pub fn b(&self) -> &Matrix {
        &self.b
    }

    pub fn l_coeffs(&self) -> &[Matrix] {
        &self.l_coeffs
    }

    pub fn d(&self) -> &Matrix {
        &self.d
    }

    /// `P̂_i = Σ_{j=0}^{l-i} s0^j P_{i+j}` for `i = 0..=l`, accumulated from the top
    /// as `P̂_l = P_l`, `P̂_i = P_i + s0 P̂_{i+1}`. `P̂_0` equals `P(s0)`.
    pub fn shifted_coefficients(&self, s0: Scalar) -> Vec<Matrix> {
        let l = self.order();
        let mut hat = vec![Matrix::zeros(0, 0); l + 1];
        hat[l] = self.p_coeffs[l].clone();
        for i in (0..l).rev() {
            hat[i] = &self.p_coeffs[i] + &hat[i + 1].scale(s0);
        }
        hat
    }
}

/// Horner evaluation of `P(s) = Σ_i s^i P_i`.
pub fn eval_poly(sys: &HigherOrderSystem, s: Scalar) -> Matrix {
    let mut coeffs = sys.p_coeffs.iter().rev();
    let top = coeffs.next().expect("at least two coefficients").clone();
    coeffs.fold(top, |acc, p| &acc.scale(s) + p)
}

/// First-order descriptor system `E z' = A z + B u`, `y = L z + D u`.
#[derive(Clone, Debug, PartialEq)]
pub struct FirstOrderSystem {
    e: Matrix,
    a: Matrix,
    b: Matrix,
    l: Matrix,
    d: Matrix,
}

impl FirstOrderSystem {
    pub fn new(e: Matrix, a: Matrix, b: Matrix, l: Matrix, d: Matrix) -> Result<Self> {
        let n = e.nrows();
        if n == 0 {
            return Err(Error::InvalidInput(
                "state dimension must be positive".into(),
            ));
        }
        expect_shape(&e, (n, n), "E")?;
        expect_shape(&a, (n, n), "A")?;
        let m = b.ncols();
        expect_shape(&b, (n, m), "B")?;
        let p = l.nrows();
        expect_shape(&l, (p, n), "L")?;
        expect_shape(&d, (p, m), "D")?;
        if m == 0 || p == 0 {
            return Err(Error::InvalidInput(
                "need at least one input and one output".into(),
            ));
        }
        Ok(FirstOrderSystem { e, a, b, l, d })
    }

    pub fn dim(&self) -> usize {
        self.e.nrows()
    }

    pub fn inputs(&self) -> usize {
        self.b.ncols()
    }

    pub fn outputs(&self) -> usize {
        self.l.nrows()
    }

    pub fn e(&self) -> &Matrix {
        &self.e
    }

    pub fn a(&self) -> &Matrix {
        &self.a
    }

    pub fn b(&self) -> &Matrix {
        &self.b
    }

    pub fn l(&self) -> &Matrix {
        &self.l
    }

    pub fn d(&self) -> &Matrix {
        &self.d
    }

    /// `s E − A`.
    pub fn shifted_pencil(&self, s: Scalar) -> Matrix {
        &self.e.scale(s) - &self.a
    }
}

/// Companion linearization of an `l`-th-order system into a pencil of size `l n0`.
pub fn linearize_higher_order(sys: &HigherOrderSystem) -> FirstOrderSystem {
    let l = sys.order();
    let n0 = sys.n0();
    let n = l * n0;
    let eye = Matrix::identity(n0);

    let mut e = Matrix::identity(n);
    e.set_block((l - 1) * n0, (l - 1) * n0, &sys.p_coeffs[l]);

    // A = -[[0, -I], …, [P_0 … P_{l-1}]]
    let mut a = Matrix::zeros(n, n);
    for k in 0..l - 1 {
        a.set_block(k * n0, (k + 1) * n0, &eye);
    }
    for (j, p) in sys.p_coeffs[..l].iter().enumerate() {
        a.set_block((l - 1) * n0, j * n0, &-p);
    }

    let mut b = Matrix::zeros(n, sys.inputs());
    b.set_block((l - 1) * n0, 0, &sys.b);
    let l_refs: Vec<&Matrix> = sys.l_coeffs.iter().collect();
    let l_mat = Matrix::hstack(sys.outputs(), &l_refs).expect("validated output blocks");
    FirstOrderSystem {
        e,
        a,
        b,
        l: l_mat,
        d: sys.d.clone(),
    }
}

/// `M = (s0 E − A)^{-1} E`, `R = (s0 E − A)^{-1} B` by one LU factorization.
pub fn krylov_operators_direct(fos: &FirstOrderSystem, s0: Scalar) -> Result<(Matrix, Matrix)> {
    let lu = Lu::factor(&fos.shifted_pencil(s0)).map_err(|e| match e {
        Error::Singular { .. } => Error::Singular {
            context: "shifted pencil s0 E - A",
        },
        other => other,
    })?;
    Ok((lu.solve(&fos.e)?, lu.solve(&fos.b)?))
}

fn factor_named(m: &Matrix, context: &'static str) -> Result<Lu> {
    Lu::factor(m).map_err(|e| match e {
        Error::Singular { .. } => Error::Singular { context },
        other => other,
    })
}

/// Case I representation of the Krylov pair of an `l`-th-order system.
///
/// `M^(i) = P(s0)^{-1} P̂_i`, `R = P(s0)^{-1} B`, `c = (1, s0, …, s0^{l-1})` and
/// `Σ_{ij} = −s0^{i-j-1}` below the diagonal.
pub fn case_i_from_higher_order(sys: &HigherOrderSystem, s0: Scalar) -> Result<CaseIOperator> {
    if s0 == c64(0.0, 0.0) {
        return Err(Error::ZeroExpansionPoint);
    }
    let l = sys.order();
    let hat = sys.shifted_coefficients(s0);
    let lu = factor_named(&hat[0], "P(s0)")?;
    let m_blocks = hat[1..]
        .iter()
        .map(|ph| lu.solve(ph))
        .collect::<Result<Vec<_>>>()?;
    let r = lu.solve(&sys.b)?;
    let powers: Vec<Scalar> = (0..l).map(|k| s0.powu(k as u32)).collect();
    let sigma = Matrix::from_fn(l, l, |i, j| {
        if i > j {
            -powers[i - j - 1]
        } else {
            c64(0.0, 0.0)
        }
    });
    CaseIOperator::new(m_blocks, powers, sigma, r)
}

/// Relative residuals of the factorization identities behind the Case I representation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AppendixAReport {
    /// `‖(s0 E − A) − F_1 F_2‖ / ‖s0 E − A‖` for the two displayed factors.
    pub factorization: f64,
    /// `‖F_1 X − I‖ / (‖F_1‖ ‖X‖)` for the explicit inverse `X` of the first factor.
    pub inverse: f64,
    /// Largest relative difference between the closed forms of `(M, R)` and a direct solve.
    pub closed_form: f64,
}

impl AppendixAReport {
    pub fn max(&self) -> f64 {
        self.factorization.max(self.inverse).max(self.closed_form)
    }
}

pub fn verify_appendix_a(sys: &HigherOrderSystem, s0: Scalar) -> Result<AppendixAReport> {
    if s0 == c64(0.0, 0.0) {
        return Err(Error::ZeroExpansionPoint);
    }
    let l = sys.order();
    let n0 = sys.n0();
    let n = l * n0;
    let eye = Matrix::identity(n0);
    let neg_eye = -&eye;
    let hat = sys.shifted_coefficients(s0);
    let lu = factor_named(&hat[0], "P(s0)")?;
    let p0_inv = lu.solve(&eye)?;

    // F_1 = [[0, -I, 0…], …, [P̂_0 P̂_1 … P̂_{l-1}]]
    let mut f1 = Matrix::zeros(n, n);
    for k in 0..l - 1 {
        f1.set_block(k * n0, (k + 1) * n0, &neg_eye);
    }
    for (j, ph) in hat[..l].iter().enumerate() {
        f1.set_block((l - 1) * n0, j * n0, ph);
    }
    // F_2 = I on the diagonal, -s0 I below it
    let mut f2 = Matrix::identity(n);
    for k in 1..l {
        f2.set_block(k * n0, (k - 1) * n0, &eye.scale(-s0));
    }
    let fos = linearize_higher_order(sys);
    let pencil = fos.shifted_pencil(s0);
    let factorization = relative_difference(&(&f1 * &f2), &pencil);

    // X = [[M^(1) … M^(l-1) P̂_0^{-1}], [-I 0 …], …]
    let m_blocks = hat[1..]
        .iter()
        .map(|ph| lu.solve(ph))
        .collect::<Result<Vec<_>>>()?;
    let mut x = Matrix::zeros(n, n);
    for (j, mb) in m_blocks[..l - 1].iter().enumerate() {
        x.set_block(0, j * n0, mb);
    }
    x.set_block(0, (l - 1) * n0, &p0_inv);
    for k in 1..l {
        x.set_block(k * n0, (k - 1) * n0, &neg_eye);
    }
    let inverse = (&(&f1 * &x) - &Matrix::identity(n)).norm_fro() / (f1.norm_fro() * x.norm_fro());

    // M = T Y with T the lower triangular Toeplitz matrix of powers of s0,
    // Y = [[M^(1) … M^(l)], [-I 0 …], …]; R = (c ⊗ I) P(s0)^{-1} B
    let mut t = Matrix::zeros(n, n);
    for i in 0..l {
        for j in 0..=i {
            t.set_block(i * n0, j * n0, &eye.scale(s0.powu((i - j) as u32)));
        }
    }
    let mut y = Matrix::zeros(n, n);
    for (j, mb) in m_blocks.iter().enumerate() {
        y.set_block(0, j * n0, mb);
    }
    for k in 1..l {
        y.set_block(k * n0, (k - 1) * n0, &neg_eye);
    }
    let m_closed = &t * &y;
    let c = Matrix::column_vector(&(0..l).map(|k| s0.powu(k as u32)).collect::<Vec<_>>());
    let r_closed = c.kron(&eye) * &lu.solve(&sys.b)?;
    let (m_direct, r_direct) = krylov_operators_direct(&fos, s0)?;
    let closed_form =
        relative_difference(&m_closed, &m_direct).max(relative_difference(&r_closed, &r_direct));

    Ok(AppendixAReport {
        factorization,
        inverse,
        closed_form,
    })
}

/// How `P_{-1}` is factored.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Factorization {
    /// `P_{-1} = F_1 G F_2^H`, any `G`.
    Product,
    /// `P_{-1} = F_1 G^{-1} F_2^H`, nonsingular `G`.
    InverseProduct,
}

#[derive(Clone, Debug, PartialEq)]
pub struct IntegroDAESystem {
    p1: Matrix,
    p0: Matrix,
    f1: Matrix,
    f2: Matrix,
    g: Matrix,
    factorization: Factorization,
    b: Matrix,
    l: Matrix,
    d: Matrix,
}

impl IntegroDAESystem {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        p1: Matrix,
        p0: Matrix,
        f1: Matrix,
        f2: Matrix,
        g: Matrix,
        factorization: Factorization,
        b: Matrix,
        l: Matrix,
        d: Matrix,
    ) -> Result<Self> {
        let (n0, m) = b.shape();
        if n0 == 0 || m == 0 {
            return Err(Error::InvalidInput("B must be non-empty".into()));
        }
        expect_shape(&p1, (n0, n0), "P_1")?;
        expect_shape(&p0, (n0, n0), "P_0")?;
        let nh = g.nrows();
        if nh == 0 {
            return Err(Error::InvalidInput("G must be non-empty".into()));
        }
        expect_shape(&g, (nh, nh), "G")?;
        expect_shape(&f1, (n0, nh), "F_1")?;
        expect_shape(&f2, (n0, nh), "F_2")?;
        let p = l.nrows();
        if p == 0 {
            return Err(Error::InvalidInput("L must be non-empty".into()));
        }
        expect_shape(&l, (p, n0), "L")?;
        expect_shape(&d, (p, m), "D")?;
        if factorization == Factorization::InverseProduct {
            factor_named(&g, "G")?;
        }
        Ok(IntegroDAESystem {
            p1,
            p0,
            f1,
            f2,
            g,
            factorization,
            b,
            l,
            d,
        })
    }

    /// The trivial factorization `F_1 = F_2 = I`, `G = P_{-1}`.
    pub fn trivial(
        p1: Matrix,
        p0: Matrix,
        p_minus_one: Matrix,
        b: Matrix,
        l: Matrix,
        d: Matrix,
    ) -> Result<Self> {
        let n0 = b.nrows();
        Self::new(
            p1,
            p0,
            Matrix::identity(n0),
            Matrix::identity(n0),
            p_minus_one,
            Factorization::Product,
            b,
            l,
            d,
        )
    }

    pub fn n0(&self) -> usize {
        self.b.nrows()
    }

    /// Size `n̂0` of the auxiliary state.
    pub fn aux_dim(&self) -> usize {
        self.g.nrows()
    }

    pub fn inputs(&self) -> usize {
        self.b.ncols()
    }

    pub fn outputs(&self) -> usize {
        self.l.nrows()
    }

    pub fn factorization(&self) -> Factorization {
        self.factorization
    }

    pub fn p1(&self) -> &Matrix {
        &self.p1
    }

    pub fn p0(&self) -> &Matrix {
        &self.p0
    }

    pub fn f1(&self) -> &Matrix {
        &self.f1
    }

    pub fn f2(&self) -> &Matrix {
        &self.f2
    }

    pub fn g(&self) -> &Matrix {
        &self.g
    }

    pub fn b(&self) -> &Matrix {
        &self.b
    }

    pub fn l(&self) -> &Matrix {
        &self.l
    }

    pub fn d(&self) -> &Matrix {
        &self.d
    }

    /// `G^{-1} F_2^H` in the inverse-product form, `F_2^H` otherwise.
    fn coupling(&self) -> Result<Matrix> {
        let f2h = self.f2.adjoint();
        match self.factorization {
            Factorization::Product => Ok(f2h),
            Factorization::InverseProduct => factor_named(&self.g, "G")?.solve(&f2h),
        }
    }

    /// `F_1 G` in the product form, `F_1` otherwise.
    fn feed(&self) -> Matrix {
        match self.factorization {
            Factorization::Product => &self.f1 * &self.g,
            Factorization::InverseProduct => self.f1.clone(),
        }
    }

    /// Dense `P_{-1}`, formed on demand.
    pub fn p_minus_one(&self) -> Result<Matrix> {
        Ok(match self.factorization {
            Factorization::Product => &self.feed() * &self.f2.adjoint(),
            Factorization::InverseProduct => &self.f1 * &self.coupling()?,
        })
    }

    /// `Q(s) = s P_1 + P_0 + P_{-1} / s`.
    pub fn q(&self, s: Scalar) -> Result<Matrix> {
        if s == c64(0.0, 0.0) {
            return Err(Error::ZeroExpansionPoint);
        }
        Ok(&(&self.p1.scale(s) + &self.p0) + &self.p_minus_one()?.scale(one() / s))
    }
}

/// First-order form with the integrated state `F_2^H ∫x` (product form) or
/// `G^{-1} F_2^H ∫x` (inverse-product form).
pub fn linearize_integro_dae(sys: &IntegroDAESystem) -> FirstOrderSystem {
    let n0 = sys.n0();
    let nh = sys.aux_dim();
    let (feed, e_aux) = match sys.factorization {
        Factorization::Product => (sys.feed(), Matrix::identity(nh)),
        Factorization::InverseProduct => (sys.f1.clone(), sys.g.clone()),
    };
    let mut a = Matrix::zeros(n0 + nh, n0 + nh);
    a.set_block(0, 0, &-&sys.p0);
    a.set_block(0, n0, &-&feed);
    a.set_block(n0, 0, &sys.f2.adjoint());
    let e = Matrix::block_diag(&[&sys.p1, &e_aux]);
    let b = Matrix::vstack(sys.inputs(), &[&sys.b, &Matrix::zeros(nh, sys.inputs())])
        .expect("validated shapes");
    let l = Matrix::hstack(sys.outputs(), &[&sys.l, &Matrix::zeros(sys.outputs(), nh)])
        .expect("validated shapes");
    FirstOrderSystem {
        e,
        a,
        b,
        l,
        d: sys.d.clone(),
    }
}

/// Case II representation of the Krylov pair of an integro-DAE.
///
/// `l = 2`, `n_1 = n0`, `n_2 = n̂0`, `σ = (0, 1/s0)`, `R = Q_0^{-1} B`,
/// `C^(1) = I`, `M^(1) = Q_0^{-1} P_1`, and
/// `C^(2) = F_2^H / s0`, `M^(2) = −Q_0^{-1} F_1 G / s0` (product form) or
/// `C^(2) = G^{-1} F_2^H / s0`, `M^(2) = −Q_0^{-1} F_1 / s0` (inverse-product form).
pub fn case_ii_from_integro_dae(sys: &IntegroDAESystem, s0: Scalar) -> Result<CaseIIOperator> {
    let q0 = sys.q(s0)?;
    let lu = factor_named(&q0, "Q_0")?;
    let inv_s0 = one() / s0;
    let c2 = sys.coupling()?.scale(inv_s0);
    let m1 = lu.solve(&sys.p1)?;
    let m2 = lu.solve(&sys.feed())?.scale(-inv_s0);
    let r = lu.solve(&sys.b)?;
    CaseIIOperator::new(
        vec![Matrix::identity(sys.n0()), c2],
        vec![m1, m2],
        vec![c64(0.0, 0.0), inv_s0],
        r,
    )
}

/// Relative residuals of the block factorization behind the Case II representation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AppendixBReport {
    /// Factored `(s0 E − A)^{-1}` against a direct solve.
    pub inverse: f64,
    /// Closed forms of `(M, R)` against a direct solve.
    pub closed_form: f64,
}

impl AppendixBReport {
    pub fn max(&self) -> f64 {
        self.inverse.max(self.closed_form)
    }
}

pub fn verify_appendix_b(sys: &IntegroDAESystem, s0: Scalar) -> Result<AppendixBReport> {
    let q0 = sys.q(s0)?;
    let lu = factor_named(&q0, "Q_0")?;
    let n0 = sys.n0();
    let nh = sys.aux_dim();
    let n = n0 + nh;
    let inv_s0 = one() / s0;
    let q0_inv = lu.solve(&Matrix::identity(n0))?;
    let coupling = sys.coupling()?;

    // lower factor [[I, 0], [coupling / s0, I]]
    let mut lower = Matrix::identity(n);
    lower.set_block(n0, 0, &coupling.scale(inv_s0));
    // upper factor [[Q_0^{-1}, -Q_0^{-1} F_1 X / s0], [0, Y / s0]]
    // with X = G, Y = I (product form) or X = Y = G^{-1} (inverse-product form)
    let (right, corner) = match sys.factorization {
        Factorization::Product => (&q0_inv * &sys.feed(), Matrix::identity(nh)),
        Factorization::InverseProduct => {
            let g_inv = factor_named(&sys.g, "G")?.solve(&Matrix::identity(nh))?;
            (&(&q0_inv * &sys.f1) * &g_inv, g_inv)
        }
    };
    let mut upper = Matrix::zeros(n, n);
    upper.set_block(0, 0, &q0_inv);
    upper.set_block(0, n0, &right.scale(-inv_s0));
    upper.set_block(n0, n0, &corner.scale(inv_s0));
    let factored = &lower * &upper;

    let fos = linearize_integro_dae(sys);
    let direct_inverse = factor_named(&fos.shifted_pencil(s0), "shifted pencil s0 E - A")?
        .solve(&Matrix::identity(n))?;
    let inverse = relative_difference(&factored, &direct_inverse);

    // M = [I; coupling / s0] [Q_0^{-1} P_1, -Q_0^{-1} feed / s0] + diag(0, I / s0)
    let stacked = Matrix::vstack(n0, &[&Matrix::identity(n0), &coupling.scale(inv_s0)])?;
    let row = Matrix::hstack(
        n0,
        &[
            &(&q0_inv * &sys.p1),
            &(&q0_inv * &sys.feed()).scale(-inv_s0),
        ],
    )?;
    let shift = Matrix::block_diag(&[&Matrix::zeros(n0, n0), &Matrix::identity(nh).scale(inv_s0)]);
    let m_closed = &(&stacked * &row) + &shift;
    let r_closed = &stacked * &(&q0_inv * &sys.b);
    let (m_direct, r_direct) = krylov_operators_direct(&fos, s0)?;
    let closed_form =
        relative_difference(&m_closed, &m_direct).max(relative_difference(&r_closed, &r_direct));
    Ok(AppendixBReport {
        inverse,
        closed_form,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structured::{assemble_case_i, assemble_case_ii};

    fn s(x: f64) -> Matrix {
        Matrix::from_real(1, 1, &[x]).unwrap()
    }

    fn scalar_second_order() -> HigherOrderSystem {
        // s^2 + 1
        HigherOrderSystem::new(
            vec![s(1.0), s(0.0), s(1.0)],
            s(1.0),
            vec![s(1.0), s(0.0)],
            s(0.0),
        )
        .unwrap()
    }

    fn scalar_integro() -> IntegroDAESystem {
        IntegroDAESystem::trivial(s(1.0), s(0.0), s(1.0), s(1.0), s(1.0), s(0.0)).unwrap()
    }

    #[test]
    fn eval_poly_simple_points() {
        let sys =
            HigherOrderSystem::new(vec![s(2.0), s(3.0)], s(1.0), vec![s(1.0)], s(0.0)).unwrap();
        assert_eq!(eval_poly(&sys, c64(0.0, 0.0)), s(2.0));
        assert_eq!(eval_poly(&sys, c64(1.0, 0.0)), s(5.0));
    }

    #[test]
    fn first_order_companion_is_degenerate() {
        let p0 = Matrix::from_real(2, 2, &[1.0, 2.0, 0.0, 1.0]).unwrap();
        let p1 = Matrix::from_real(2, 2, &[3.0, 0.0, 1.0, 1.0]).unwrap();
        let b = Matrix::from_real(2, 1, &[1.0, 0.0]).unwrap();
        let l0 = Matrix::from_real(1, 2, &[0.0, 1.0]).unwrap();
        let sys = HigherOrderSystem::new(
            vec![p0.clone(), p1.clone()],
            b.clone(),
            vec![l0.clone()],
            s(0.0),
        )
        .unwrap();
        let fos = linearize_higher_order(&sys);
        assert_eq!(fos.e(), &p1);
        assert_eq!(fos.a(), &-&p0);
        assert_eq!(fos.b(), &b);
        assert_eq!(fos.l(), &l0);
    }

    #[test]
    fn second_order_scalar_companion() {
        let sys = HigherOrderSystem::new(
            vec![s(2.0), s(3.0), s(5.0)],
            s(1.0),
            vec![s(1.0), s(0.0)],
            s(0.0),
        )
        .unwrap();
        let fos = linearize_higher_order(&sys);
        assert_eq!(
            fos.e(),
            &Matrix::from_real(2, 2, &[1.0, 0.0, 0.0, 5.0]).unwrap()
        );
        assert_eq!(
            fos.a(),
            &Matrix::from_real(2, 2, &[0.0, 1.0, -2.0, -3.0]).unwrap()
        );
    }

    #[test]
    fn direct_operators_simple_pencils() {
        let b = Matrix::from_real(2, 1, &[1.0, 2.0]).unwrap();
        let l = Matrix::from_real(1, 2, &[1.0, 0.0]).unwrap();
        let fos = FirstOrderSystem::new(
            Matrix::identity(2),
            Matrix::zeros(2, 2),
            b.clone(),
            l.clone(),
            s(0.0),
        )
        .unwrap();
        let (m, r) = krylov_operators_direct(&fos, c64(2.0, 0.0)).unwrap();
        assert_eq!(m, Matrix::identity(2).scale(c64(0.5, 0.0)));
        assert_eq!(r, b.scale(c64(0.5, 0.0)));

        let alg = FirstOrderSystem::new(
            Matrix::zeros(2, 2),
            -&Matrix::identity(2),
            b.clone(),
            l,
            s(0.0),
        )
        .unwrap();
        let (m, r) = krylov_operators_direct(&alg, c64(3.0, 0.0)).unwrap();
        assert_eq!(m, Matrix::zeros(2, 2));
        assert_eq!(r, b);
    }

    #[test]
    fn direct_operators_singular_pencil() {
        let fos = FirstOrderSystem::new(s(1.0), s(2.0), s(1.0), s(1.0), s(0.0)).unwrap();
        assert!(matches!(
            krylov_operators_direct(&fos, c64(2.0, 0.0)),
            Err(Error::Singular { .. })
        ));
    }

    #[test]
    fn case_i_scalar_second_order() {
        let sys = scalar_second_order();
        let op = case_i_from_higher_order(&sys, c64(1.0, 0.0)).unwrap();
        assert_eq!(op.m_blocks(), &[s(0.5), s(0.5)]);
        assert_eq!(op.c(), &[c64(1.0, 0.0), c64(1.0, 0.0)]);
        assert_eq!(
            op.sigma(),
            &Matrix::from_real(2, 2, &[0.0, 0.0, -1.0, 0.0]).unwrap()
        );
        let (m, _) = assemble_case_i(&op);
        let expected = Matrix::from_real(2, 2, &[0.5, 0.5, -0.5, 0.5]).unwrap();
        assert_eq!(m, expected);
        let (md, _) =
            krylov_operators_direct(&linearize_higher_order(&sys), c64(1.0, 0.0)).unwrap();
        assert!(relative_difference(&md, &expected) < 1e-15);
    }

    #[test]
    fn case_i_first_order_coincides() {
        let p0 = Matrix::from_real(2, 2, &[1.0, 0.5, 0.0, 2.0]).unwrap();
        let p1 = Matrix::from_real(2, 2, &[1.0, 0.0, 0.3, 1.0]).unwrap();
        let b = Matrix::from_real(2, 1, &[1.0, -1.0]).unwrap();
        let sys =
            HigherOrderSystem::new(vec![p0, p1], b, vec![Matrix::zeros(1, 2)], s(0.0)).unwrap();
        let s0 = c64(0.5, 0.25);
        let op = case_i_from_higher_order(&sys, s0).unwrap();
        assert_eq!(op.c(), &[c64(1.0, 0.0)]);
        assert_eq!(op.sigma(), &Matrix::zeros(1, 1));
        let (m, r) = assemble_case_i(&op);
        let (md, rd) = krylov_operators_direct(&linearize_higher_order(&sys), s0).unwrap();
        assert!(relative_difference(&m, &md) < 1e-14);
        assert!(relative_difference(&r, &rd) < 1e-14);
    }

    #[test]
    fn case_i_errors() {
        let sys = scalar_second_order();
        assert_eq!(
            case_i_from_higher_order(&sys, c64(0.0, 0.0)).unwrap_err(),
            Error::ZeroExpansionPoint
        );
        let zero = HigherOrderSystem::new(
            vec![s(0.0), s(0.0), s(0.0)],
            s(1.0),
            vec![s(1.0), s(0.0)],
            s(0.0),
        )
        .unwrap();
        assert!(matches!(
            case_i_from_higher_order(&zero, c64(1.0, 0.0)),
            Err(Error::Singular { .. })
        ));
    }

    #[test]
    fn appendix_a_scalar_instances() {
        let rep = verify_appendix_a(&scalar_second_order(), c64(1.0, 0.0)).unwrap();
        assert!(rep.max() <= 1e-14, "{rep:?}");
        let first =
            HigherOrderSystem::new(vec![s(2.0), s(3.0)], s(1.0), vec![s(1.0)], s(0.0)).unwrap();
        let rep = verify_appendix_a(&first, c64(0.5, 0.0)).unwrap();
        assert_eq!(rep.factorization, 0.0);
        assert!(rep.max() <= 1e-15, "{rep:?}");
    }

    #[test]
    fn integro_scalar_linearization() {
        let fos = linearize_integro_dae(&scalar_integro());
        assert_eq!(fos.e(), &Matrix::identity(2));
        assert_eq!(
            fos.a(),
            &Matrix::from_real(2, 2, &[0.0, -1.0, 1.0, 0.0]).unwrap()
        );
        assert_eq!(fos.b(), &Matrix::from_real(2, 1, &[1.0, 0.0]).unwrap());
        assert_eq!(fos.l(), &Matrix::from_real(1, 2, &[1.0, 0.0]).unwrap());
    }

    #[test]
    fn trivial_factorization_holds_p_minus_one() {
        let pm1 = Matrix::from_real(2, 2, &[1.0, 2.0, 3.0, 4.0]).unwrap();
        let sys = IntegroDAESystem::trivial(
            Matrix::identity(2),
            Matrix::zeros(2, 2),
            pm1.clone(),
            Matrix::from_real(2, 1, &[1.0, 0.0]).unwrap(),
            Matrix::from_real(1, 2, &[1.0, 0.0]).unwrap(),
            s(0.0),
        )
        .unwrap();
        let fos = linearize_integro_dae(&sys);
        assert_eq!(fos.a().block(0, 2, 2, 2), -&pm1);
        assert_eq!(sys.p_minus_one().unwrap(), pm1);
    }

    #[test]
    fn inverse_product_needs_nonsingular_g() {
        let err = IntegroDAESystem::new(
            s(1.0),
            s(0.0),
            s(1.0),
            s(1.0),
            s(0.0),
            Factorization::InverseProduct,
            s(1.0),
            s(1.0),
            s(0.0),
        )
        .unwrap_err();
        assert!(matches!(err, Error::Singular { .. }));
    }

    #[test]
    fn case_ii_scalar_instance() {
        let sys = scalar_integro();
        let s0 = c64(1.0, 0.0);
        let op = case_ii_from_integro_dae(&sys, s0).unwrap();
        assert_eq!(op.m_blocks(), &[s(0.5), s(-0.5)]);
        assert_eq!(op.c_blocks(), &[s(1.0), s(1.0)]);
        assert_eq!(op.sigma(), &[c64(0.0, 0.0), c64(1.0, 0.0)]);
        let (m, _) = assemble_case_ii(&op);
        let expected = Matrix::from_real(2, 2, &[0.5, -0.5, 0.5, 0.5]).unwrap();
        assert_eq!(m, expected);
        let (md, _) = krylov_operators_direct(&linearize_integro_dae(&sys), s0).unwrap();
        assert!(relative_difference(&md, &expected) < 1e-15);
        assert_eq!(
            case_ii_from_integro_dae(&sys, c64(0.0, 0.0)).unwrap_err(),
            Error::ZeroExpansionPoint
        );
    }

    #[test]
    fn appendix_b_scalar_instance() {
        let rep = verify_appendix_b(&scalar_integro(), c64(1.0, 0.0)).unwrap();
        assert!(rep.max() <= 1e-14, "{rep:?}");
    }

    #[test]
    fn identity_g_forms_coincide() {
        let p1 = Matrix::from_real(2, 2, &[1.0, 0.2, 0.0, 0.5]).unwrap();
        let p0 = Matrix::from_real(2, 2, &[0.3, 0.0, -0.1, 0.7]).unwrap();
        let f1 = Matrix::from_real(2, 1, &[1.0, -1.0]).unwrap();
        let f2 = Matrix::from_real(2, 1, &[0.5, 2.0]).unwrap();
        let b = Matrix::from_real(2, 1, &[1.0, 1.0]).unwrap();
        let l = Matrix::from_real(1, 2, &[1.0, 0.0]).unwrap();
        let build = |f| {
            IntegroDAESystem::new(
                p1.clone(),
                p0.clone(),
                f1.clone(),
                f2.clone(),
                Matrix::identity(1),
                f,
                b.clone(),
                l.clone(),
                s(0.0),
            )
            .unwrap()
        };
        let (af1, af2) = (
            build(Factorization::Product),
            build(Factorization::InverseProduct),
        );
        assert_eq!(linearize_integro_dae(&af1), linearize_integro_dae(&af2));
        let s0 = c64(0.7, -0.2);
        assert_eq!(
            case_ii_from_integro_dae(&af1, s0).unwrap(),
            case_ii_from_integro_dae(&af2, s0).unwrap()
        );
        assert_eq!(
            verify_appendix_b(&af1, s0).unwrap(),
            verify_appendix_b(&af2, s0).unwrap()
        );
    }
}
