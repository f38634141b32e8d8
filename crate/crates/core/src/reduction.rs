//! Padé-type model reduction by one-sided projection onto block-Krylov subspaces.
//!
//! With `M = (s0 E − A)^{-1} E` and `R = (s0 E − A)^{-1} B` the transfer function
//! is `H(s) = D + L (I + (s − s0) M)^{-1} R`. Expanding the inverse as a Neumann
//! series gives the Taylor coefficients about `s0`:
//!
//! ```text
//! H(s) = D + Σ_j (s − s0)^j T_j,   T_j = (−1)^j L M^j R.
//! ```
//!
//! `D` is carried separately; [`moments`] returns the `T_j`. The reduced model keeps
//! `D_n = D`.

use crate::error::{Error, Result};
use crate::krylov::{orthonormal_basis, DeflationRecord};
use crate::linalg::{c64, Lu, Matrix, Scalar};
use crate::systems::{krylov_operators_direct, FirstOrderSystem};

/// `H(s) = D + L (s E − A)^{-1} B`.
pub fn transfer_function(fos: &FirstOrderSystem, s: Scalar) -> Result<Matrix> {
    let lu = Lu::factor(&fos.shifted_pencil(s)).map_err(|e| match e {
        Error::Singular { .. } => Error::Singular {
            context: "transfer function s E - A",
        },
        other => other,
    })?;
    let x = lu.solve(fos.b())?;
    Ok(fos.d() + &(fos.l() * &x))
}

/// Taylor coefficients `T_0, …, T_jmax` of `H` about `s0`, excluding `D`.
pub fn moments(fos: &FirstOrderSystem, s0: Scalar, jmax: usize) -> Result<Vec<Matrix>> {
    let (m, r) = krylov_operators_direct(fos, s0)?;
    let mut out = Vec::with_capacity(jmax + 1);
    let mut x = r;
    let mut sign = c64(1.0, 0.0);
    for j in 0..=jmax {
        out.push((fos.l() * &x).scale(sign));
        if j < jmax {
            x = &m * &x;
            sign = -sign;
        }
    }
    Ok(out)
}

#[derive(Clone, Debug)]
pub struct ReducedModel {
    system: FirstOrderSystem,
    s0: Scalar,
    projector: Matrix,
    record: DeflationRecord,
}

impl ReducedModel {
    /// Reduced state dimension `n`.
    pub fn n(&self) -> usize {
        self.projector.ncols()
    }

    /// The reduced system `(E_n, A_n, B_n, L_n, D_n)`.
    pub fn system(&self) -> &FirstOrderSystem {
        &self.system
    }

    pub fn s0(&self) -> Scalar {
        self.s0
    }

    /// Orthonormal `N x n` projection basis.
    pub fn projector(&self) -> &Matrix {
        &self.projector
    }

    /// Deflation history of the full Krylov sequence the projector was cut from.
    pub fn record(&self) -> &DeflationRecord {
        &self.record
    }
}

/// Projects onto the first `n` columns of an orthonormal basis of `K(M, R)`.
pub fn pade_type_reduce(
    fos: &FirstOrderSystem,
    s0: Scalar,
    n: usize,
    tol: f64,
) -> Result<ReducedModel> {
    if n == 0 {
        return Err(Error::InvalidInput("reduced order must be positive".into()));
    }
    let (m, r) = krylov_operators_direct(fos, s0)?;
    let basis = orthonormal_basis(&m, &r, tol, None)?;
    if basis.n0() < n {
        return Err(Error::TooFewColumns {
            requested: n,
            available: basis.n0(),
        });
    }
    let v = basis.matrix.leading_columns(n);
    let vh = v.adjoint();
    let system = FirstOrderSystem::new(
        &(&vh * fos.e()) * &v,
        &(&vh * fos.a()) * &v,
        &vh * fos.b(),
        fos.l() * &v,
        fos.d().clone(),
    )?;
    Ok(ReducedModel {
        system,
        s0,
        projector: v,
        record: basis.record,
    })
}

#[derive(Clone, Debug)]
pub struct MomentReport {
    /// Number of compared moments `T_0, …, T_{jmax-1}`.
    pub jmax: usize,
    pub original_moments: Vec<Matrix>,
    pub reduced_moments: Vec<Matrix>,
    /// `‖T_j − T̃_j‖_F / max(‖T_j‖_F, 1)`.
    pub relative_errors: Vec<f64>,
    /// Length of the longest prefix of errors at or below the threshold.
    pub matched_count: usize,
    /// Complete deflation blocks contained in the first `n` basis columns.
    pub predicted_floor: usize,
}

/// Compares the first `jmax` moments of `fos` and `rom`.
pub fn moment_match_report(
    fos: &FirstOrderSystem,
    rom: &ReducedModel,
    jmax: usize,
    threshold: f64,
) -> Result<MomentReport> {
    let (original_moments, reduced_moments) = if jmax == 0 {
        (Vec::new(), Vec::new())
    } else {
        let mut orig = moments(fos, rom.s0, jmax - 1)?;
        let mut red = moments(&rom.system, rom.s0, jmax - 1)?;
        orig.truncate(jmax);
        red.truncate(jmax);
        (orig, red)
    };
    let relative_errors: Vec<f64> = original_moments
        .iter()
        .zip(&reduced_moments)
        .map(|(t, tr)| (t - tr).norm_fro() / t.norm_fro().max(1.0))
        .collect();
    let matched_count = relative_errors
        .iter()
        .take_while(|&&e| e <= threshold)
        .count();
    Ok(MomentReport {
        jmax,
        original_moments,
        reduced_moments,
        relative_errors,
        matched_count,
        predicted_floor: predicted_floor(&rom.record, rom.n()),
    })
}

/// Number of leading blocks whose cumulative width fits in `n` columns.
pub fn predicted_floor(record: &DeflationRecord, n: usize) -> usize {
    record
        .block_offsets()
        .iter()
        .skip(1)
        .take_while(|&&offset| offset <= n)
        .count()
}
