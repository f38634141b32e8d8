//! Library results against independent reference computations.

use blockkrylov::krylov::{deflated_krylov, orthonormal_basis};
use blockkrylov::linalg::relative_difference;
use blockkrylov::sample;
use blockkrylov::systems::eval_poly;
use blockkrylov::{
    assemble_case_i, assemble_case_ii, c64, leading_subspaces, linearize_higher_order,
    linearize_integro_dae, moments, reconstruct, structured_basis_case_i, structured_basis_case_ii,
    transfer_function, Error, Factorization, FirstOrderSystem, Lu, Matrix, Scalar, DEFAULT_TOL,
};

fn triple_loop(a: &Matrix, b: &Matrix) -> Matrix {
    let mut c = Matrix::zeros(a.nrows(), b.ncols());
    for i in 0..a.nrows() {
        for j in 0..b.ncols() {
            let mut acc = c64(0.0, 0.0);
            for k in 0..a.ncols() {
                acc += a[(i, k)] * b[(k, j)];
            }
            c[(i, j)] = acc;
        }
    }
    c
}

/// Rank by Gaussian elimination with complete pivoting on a copy.
fn elimination_rank(a: &Matrix, tol: f64) -> usize {
    let (rows, cols) = a.shape();
    let mut w: Vec<Vec<Scalar>> = (0..rows)
        .map(|i| (0..cols).map(|j| a[(i, j)]).collect())
        .collect();
    let scale = a.max_abs();
    let mut rank = 0;
    for step in 0..rows.min(cols) {
        let mut best = (0.0, step, step);
        for (i, row) in w.iter().enumerate().skip(step) {
            for (j, z) in row.iter().enumerate().skip(step) {
                if z.norm() > best.0 {
                    best = (z.norm(), i, j);
                }
            }
        }
        if best.0 <= tol * scale {
            break;
        }
        w.swap(step, best.1);
        for row in &mut w {
            row.swap(step, best.2);
        }
        let (top, bottom) = w.split_at_mut(step + 1);
        let prow = &top[step];
        for row in bottom {
            let f = row[step] / prow[step];
            for (x, v) in row[step..].iter_mut().zip(&prow[step..]) {
                *x -= f * v;
            }
        }
        rank += 1;
    }
    rank
}

#[test]
fn matmul_matches_triple_loop() {
    let mut g = sample::rng(11);
    for (r, k, c) in [(1, 1, 1), (3, 4, 2), (5, 1, 5), (2, 7, 3), (4, 0, 3)] {
        let a = sample::complex_matrix(&mut g, r, k);
        let b = sample::complex_matrix(&mut g, k, c);
        assert!(relative_difference(&(&a * &b), &triple_loop(&a, &b)) < 1e-15);
    }
}

#[test]
fn kron_matches_index_formula() {
    let mut g = sample::rng(12);
    let a = sample::complex_matrix(&mut g, 2, 3);
    let b = sample::complex_matrix(&mut g, 3, 2);
    let k = a.kron(&b);
    assert_eq!(k.shape(), (6, 6));
    for i in 0..2 {
        for j in 0..3 {
            for p in 0..3 {
                for q in 0..2 {
                    assert_eq!(k[(i * 3 + p, j * 2 + q)], a[(i, j)] * b[(p, q)]);
                }
            }
        }
    }
}

#[test]
fn lu_solves_and_detects_singularity() {
    let mut g = sample::rng(13);
    let a = sample::shifted_matrix(&mut g, 6, 4.0);
    let x = sample::complex_matrix(&mut g, 6, 2);
    let b = triple_loop(&a, &x);
    let solved = Lu::factor(&a).unwrap().solve(&b).unwrap();
    assert!(relative_difference(&solved, &x) < 1e-13);

    let low = sample::low_rank_matrix(&mut g, 5, 5, 3);
    assert!(matches!(Lu::factor(&low), Err(Error::Singular { .. })));
}

#[test]
fn eval_poly_matches_power_sum() {
    let mut g = sample::rng(14);
    for l in 1..=4 {
        let sys = sample::higher_order(&mut g, 3, l, 1, 1).unwrap();
        let s = sample::scalar(&mut g) * 2.0;
        let mut sum = Matrix::zeros(3, 3);
        for (i, p) in sys.p_coeffs().iter().enumerate() {
            sum = &sum + &p.scale(s.powi(i as i32));
        }
        assert!(relative_difference(&eval_poly(&sys, s), &sum) < 1e-14);
    }
}

/// `D + (Σ_i s^i L_i) P(s)^{-1} B` evaluated without the linearization.
#[test]
fn companion_preserves_transfer_function() {
    let mut g = sample::rng(15);
    for l in 1..=4 {
        let sys = sample::higher_order(&mut g, 3, l, 2, 2).unwrap();
        let fos = linearize_higher_order(&sys);
        assert_eq!(fos.dim(), 3 * l);
        for k in 0..3 {
            let s = c64(0.2 + 0.1 * k as f64, 0.3 * k as f64 - 0.2);
            let mut p_s = Matrix::zeros(3, 3);
            for (i, p) in sys.p_coeffs().iter().enumerate() {
                p_s = &p_s + &p.scale(s.powi(i as i32));
            }
            let mut l_s = Matrix::zeros(2, 3);
            for (i, li) in sys.l_coeffs().iter().enumerate() {
                l_s = &l_s + &li.scale(s.powi(i as i32));
            }
            let direct = sys.d() + &(&l_s * &Lu::factor(&p_s).unwrap().solve(sys.b()).unwrap());
            let via = transfer_function(&fos, s).unwrap();
            assert!(relative_difference(&via, &direct) < 1e-12, "l = {l}");
        }
    }
}

/// `D + L (s P_1 + P_0 + P_{-1} / s)^{-1} B` for all three factorization forms.
#[test]
fn integro_linearization_preserves_transfer_function() {
    let mut g = sample::rng(16);
    let systems = [
        sample::integro_dae(&mut g, 4, 2, 1, 2, Factorization::Product).unwrap(),
        sample::integro_dae(&mut g, 4, 3, 2, 1, Factorization::InverseProduct).unwrap(),
        sample::integro_dae_trivial(&mut g, 3, 2, 2).unwrap(),
    ];
    for sys in &systems {
        let fos = linearize_integro_dae(sys);
        let pm1 = sys.p_minus_one().unwrap();
        for k in 0..3 {
            let s = c64(0.4 + 0.2 * k as f64, 0.5 - 0.3 * k as f64);
            let y = &(&sys.p1().scale(s) + sys.p0()) + &pm1.scale(c64(1.0, 0.0) / s);
            let direct = sys.d() + &(sys.l() * &Lu::factor(&y).unwrap().solve(sys.b()).unwrap());
            let via = transfer_function(&fos, s).unwrap();
            assert!(relative_difference(&via, &direct) < 1e-12);
        }
    }
}

/// With `E = I` and `A = diag(a)` the moments are
/// `Σ_k l_k b_k (−1)^j / (s0 − a_k)^{j+1}`.
#[test]
fn moments_of_diagonal_system() {
    let a = [-1.0, -2.5, 0.5];
    let b = [1.0, 2.0, -1.0];
    let l = [0.5, -1.0, 3.0];
    let fos = FirstOrderSystem::new(
        Matrix::identity(3),
        Matrix::diagonal(&a.map(|x| c64(x, 0.0))),
        Matrix::from_real(3, 1, &b).unwrap(),
        Matrix::from_real(1, 3, &l).unwrap(),
        Matrix::zeros(1, 1),
    )
    .unwrap();
    let s0 = c64(1.5, 0.5);
    let t = moments(&fos, s0, 6).unwrap();
    for (j, tj) in t.iter().enumerate() {
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        let expected: Scalar = (0..3)
            .map(|k| c64(l[k] * b[k] * sign, 0.0) / (s0 - a[k]).powi(j as i32 + 1))
            .sum();
        assert!(
            (tj[(0, 0)] - expected).norm() <= 1e-13 * expected.norm().max(1.0),
            "j = {j}"
        );
    }
}

#[test]
fn deflated_dimension_matches_elimination_rank() {
    let mut g = sample::rng(17);
    for trial in 0..12 {
        let n = 5 + trial % 4;
        let m = 1 + trial % 3;
        // low-rank M bounds the Krylov dimension by rank(R) + rank(M)
        let mop = sample::low_rank_matrix(&mut g, n, n, 1 + trial % 3);
        let r = sample::low_rank_matrix(&mut g, n, m, 1 + trial % m);
        let basis = deflated_krylov(&mop, &r, DEFAULT_TOL, None).unwrap();
        let full = blockkrylov::block_krylov_matrix(&mop, &r, n).unwrap();
        assert_eq!(basis.n0(), elimination_rank(&full, 1e-9), "trial {trial}");
    }
}

#[test]
fn truncated_structured_bases_match_reference() {
    let mut g = sample::rng(18);
    for n_max in 1..=9 {
        let op = sample::case_i(&mut g, 4, 3, 3, 2).unwrap();
        let sb = structured_basis_case_i(&op, DEFAULT_TOL, Some(n_max)).unwrap();
        let (m, r) = assemble_case_i(&op);
        let reference = deflated_krylov(&m, &r, DEFAULT_TOL, Some(n_max)).unwrap();
        assert_eq!(sb.record, reference.record);
        assert_eq!(sb.n0(), n_max);
        assert!(relative_difference(&reconstruct(&sb, &op).unwrap(), &reference.matrix) < 1e-12);

        let op2 = sample::case_ii(&mut g, 3, 2, &[2, 1, 3], 2).unwrap();
        let sb2 = structured_basis_case_ii(&op2, DEFAULT_TOL, Some(n_max)).unwrap();
        let (m2, r2) = assemble_case_ii(&op2);
        let reference2 = deflated_krylov(&m2, &r2, DEFAULT_TOL, Some(n_max)).unwrap();
        assert_eq!(sb2.record, reference2.record);
        assert!(relative_difference(&reconstruct(&sb2, &op2).unwrap(), &reference2.matrix) < 1e-12);
    }
}

/// The first block row of the Case I basis is `W U^(1)` with `U^(1)` upper
/// triangular, so its leading `n` columns span the same space as `W_n`.
#[test]
fn leading_subspaces_span_first_block_row() {
    let mut g = sample::rng(19);
    let op = sample::case_i(&mut g, 5, 2, 3, 2).unwrap();
    let sb = structured_basis_case_i(&op, DEFAULT_TOL, None).unwrap();
    let v = reconstruct(&sb, &op).unwrap();
    for n in 1..=sb.n0() {
        let wn = leading_subspaces(&sb, n).unwrap();
        let top = v.block(0, 0, 5, n);
        let joint = Matrix::hstack(5, &[&wn, &top]).unwrap();
        assert_eq!(
            elimination_rank(&joint, 1e-9),
            elimination_rank(&wn, 1e-9),
            "n = {n}"
        );
    }
    assert!(matches!(
        leading_subspaces(&sb, 0),
        Err(Error::OutOfRange { .. })
    ));
    assert!(leading_subspaces(&sb, sb.n0() + 1).is_err());
}

#[test]
fn orthonormal_basis_spans_raw_krylov_columns() {
    let mut g = sample::rng(20);
    let mop = sample::complex_matrix(&mut g, 7, 7);
    let r = sample::complex_matrix(&mut g, 7, 2);
    let raw = deflated_krylov(&mop, &r, DEFAULT_TOL, Some(5)).unwrap();
    let orth = orthonormal_basis(&mop, &r, DEFAULT_TOL, Some(5)).unwrap();
    let q = &orth.matrix;
    let gram = &q.adjoint() * q;
    assert!(relative_difference(&gram, &Matrix::identity(5)) < 1e-14);
    let proj = q * &(&q.adjoint() * &raw.matrix);
    assert!(relative_difference(&proj, &raw.matrix) < 1e-13);
    assert_eq!(raw.record.block_widths, vec![2, 2, 1]);
}
