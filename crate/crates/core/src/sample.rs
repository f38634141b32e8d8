//! Seeded random instances for tests, benchmarks and the command-line tool.
//!
//! Entries are drawn uniformly from the unit square `[-1, 1] + i[-1, 1]` (or the
//! interval `[-1, 1]` for real instances). All generators take the RNG explicitly
//! so that a fixed seed reproduces the same instance on every platform.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::linalg::{c64, Matrix, Scalar};
use crate::structured::{CaseIIOperator, CaseIOperator};
use crate::systems::{Factorization, HigherOrderSystem, IntegroDAESystem};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn scalar<G: Rng>(g: &mut G) -> Scalar {
    c64(g.random_range(-1.0..=1.0), g.random_range(-1.0..=1.0))
}

/// Scalar bounded away from zero: modulus in `[0.5, 1.5]`.
pub fn nonzero_scalar<G: Rng>(g: &mut G) -> Scalar {
    let r = g.random_range(0.5..=1.5);
    let t = g.random_range(0.0..std::f64::consts::TAU);
    Scalar::from_polar(r, t)
}

pub fn complex_matrix<G: Rng>(g: &mut G, rows: usize, cols: usize) -> Matrix {
    Matrix::from_fn(rows, cols, |_, _| scalar(g))
}

pub fn real_matrix<G: Rng>(g: &mut G, rows: usize, cols: usize) -> Matrix {
    Matrix::from_fn(rows, cols, |_, _| c64(g.random_range(-1.0..=1.0), 0.0))
}

/// `rows x cols` with rank `min(rank, rows, cols)` (generically), as a product
/// of two random factors.
pub fn low_rank_matrix<G: Rng>(g: &mut G, rows: usize, cols: usize, rank: usize) -> Matrix {
    let left = complex_matrix(g, rows, rank);
    let right = complex_matrix(g, rank, cols);
    &left * &right
}

/// Random matrix plus `shift * I`; a shift of a few times `sqrt(n)` keeps the
/// result comfortably nonsingular.
pub fn shifted_matrix<G: Rng>(g: &mut G, n: usize, shift: f64) -> Matrix {
    &complex_matrix(g, n, n) + &Matrix::identity(n).scale(c64(shift, 0.0))
}

/// Case I instance. `r_rank < m` gives a rank-deficient starting block.
pub fn case_i<G: Rng>(
    g: &mut G,
    n0: usize,
    m: usize,
    l: usize,
    r_rank: usize,
) -> Result<CaseIOperator> {
    let m_blocks = (0..l).map(|_| complex_matrix(g, n0, n0)).collect();
    let c = (0..l).map(|_| nonzero_scalar(g)).collect();
    let sigma = complex_matrix(g, l, l);
    let r = low_rank_matrix(g, n0, m, r_rank.min(m));
    CaseIOperator::new(m_blocks, c, sigma, r)
}

/// Case II instance. `sizes[i]` is `n_i`; each `sigma_i` is zero with probability 1/2.
pub fn case_ii<G: Rng>(
    g: &mut G,
    n0: usize,
    m: usize,
    sizes: &[usize],
    r_rank: usize,
) -> Result<CaseIIOperator> {
    let c_blocks = sizes.iter().map(|&ni| complex_matrix(g, ni, n0)).collect();
    let m_blocks = sizes.iter().map(|&ni| complex_matrix(g, n0, ni)).collect();
    let sigma = (0..sizes.len())
        .map(|_| {
            if g.random_bool(0.5) {
                c64(0.0, 0.0)
            } else {
                scalar(g)
            }
        })
        .collect();
    let r = low_rank_matrix(g, n0, m, r_rank.min(m));
    CaseIIOperator::new(c_blocks, m_blocks, sigma, r)
}

/// Order-`l` system with `P_0` shifted so that `P(s0)` stays nonsingular for
/// small `|s0|`.
pub fn higher_order<G: Rng>(
    g: &mut G,
    n0: usize,
    l: usize,
    m: usize,
    p: usize,
) -> Result<HigherOrderSystem> {
    let shift = 2.0 * (n0 as f64).sqrt() + 1.0;
    let mut p_coeffs = vec![shifted_matrix(g, n0, shift)];
    p_coeffs.extend((1..=l).map(|_| complex_matrix(g, n0, n0)));
    let b = complex_matrix(g, n0, m);
    let l_coeffs = (0..l).map(|_| complex_matrix(g, p, n0)).collect();
    let d = complex_matrix(g, p, m);
    HigherOrderSystem::new(p_coeffs, b, l_coeffs, d)
}

/// Integro-DAE with an `n0 x nh` factorization of `P_{-1}`. `G` is shifted so
/// that it is nonsingular in both factorization modes.
pub fn integro_dae<G: Rng>(
    g: &mut G,
    n0: usize,
    nh: usize,
    m: usize,
    p: usize,
    factorization: Factorization,
) -> Result<IntegroDAESystem> {
    let shift = 2.0 * (n0 as f64).sqrt() + 1.0;
    let p1 = complex_matrix(g, n0, n0);
    let p0 = shifted_matrix(g, n0, shift);
    let f1 = complex_matrix(g, n0, nh);
    let f2 = complex_matrix(g, n0, nh);
    let gmat = shifted_matrix(g, nh, 2.0 * (nh as f64).sqrt() + 1.0);
    let b = complex_matrix(g, n0, m);
    let l = complex_matrix(g, p, n0);
    let d = complex_matrix(g, p, m);
    IntegroDAESystem::new(p1, p0, f1, f2, gmat, factorization, b, l, d)
}

/// Integro-DAE in trivial form `F_1 = F_2 = I`, `G = P_{-1}`.
pub fn integro_dae_trivial<G: Rng>(
    g: &mut G,
    n0: usize,
    m: usize,
    p: usize,
) -> Result<IntegroDAESystem> {
    let shift = 2.0 * (n0 as f64).sqrt() + 1.0;
    let p1 = complex_matrix(g, n0, n0);
    let p0 = shifted_matrix(g, n0, shift);
    let pm1 = complex_matrix(g, n0, n0);
    let b = complex_matrix(g, n0, m);
    let l = complex_matrix(g, p, n0);
    let d = complex_matrix(g, p, m);
    IntegroDAESystem::trivial(p1, p0, pm1, b, l, d)
}
