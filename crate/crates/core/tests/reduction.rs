//! Reduced models against direct evaluation of the full system.

use blockkrylov::linalg::relative_difference;
use blockkrylov::reduction::predicted_floor;
use blockkrylov::sample;
use blockkrylov::{
    c64, krylov_operators_direct, linearize_higher_order, moment_match_report, pade_type_reduce,
    transfer_function, Matrix, Scalar, DEFAULT_TOL,
};

/// `D + Σ_{j≤8} (−1)^j (s − s0)^j L M^j R`, built from explicit powers.
#[test]
fn transfer_function_matches_truncated_neumann_series() {
    let mut g = sample::rng(31);
    for _ in 0..3 {
        let fos = linearize_higher_order(&sample::higher_order(&mut g, 3, 2, 2, 2).unwrap());
        let s0 = c64(0.4, 0.2);
        let (m, r) = krylov_operators_direct(&fos, s0).unwrap();
        let radius = 0.1 / m.norm_fro();
        for k in 0..4 {
            let ds = Scalar::from_polar(radius, 1.3 * k as f64);
            let mut series = fos.d().clone();
            let mut power = r.clone();
            for j in 0..=8 {
                let coeff = (-ds).powi(j);
                series = &series + &(fos.l() * &power).scale(coeff);
                power = &m * &power;
            }
            let h = transfer_function(&fos, s0 + ds).unwrap();
            assert!(relative_difference(&series, &h) < 1e-6);
        }
    }
}

#[test]
fn single_column_reduction_matches_zeroth_moment() {
    let mut g = sample::rng(32);
    let fos = linearize_higher_order(&sample::higher_order(&mut g, 3, 2, 1, 1).unwrap());
    let rom = pade_type_reduce(&fos, c64(0.5, 0.0), 1, DEFAULT_TOL).unwrap();
    let rep = moment_match_report(&fos, &rom, 3, 1e-8).unwrap();
    assert!(rep.matched_count >= 1);
    assert_eq!(rep.predicted_floor, 1);
}

#[test]
fn second_order_two_input_reduction_floor() {
    let mut g = sample::rng(33);
    let fos = linearize_higher_order(&sample::higher_order(&mut g, 3, 2, 2, 1).unwrap());
    let rom = pade_type_reduce(&fos, c64(0.3, -0.1), 4, DEFAULT_TOL).unwrap();
    assert_eq!(rom.record().block_widths[..2], [2, 2]);
    let rep = moment_match_report(&fos, &rom, 5, 1e-8).unwrap();
    assert_eq!(rep.predicted_floor, 2);
    assert!(rep.matched_count >= 2);
}

#[test]
fn full_order_projection_matches_every_moment() {
    let mut g = sample::rng(34);
    let fos = linearize_higher_order(&sample::higher_order(&mut g, 2, 2, 1, 1).unwrap());
    let rom = pade_type_reduce(&fos, c64(0.5, 0.5), 4, DEFAULT_TOL).unwrap();
    let rep = moment_match_report(&fos, &rom, 6, 1e-8).unwrap();
    assert_eq!(rep.matched_count, 6);
    assert_eq!(rep.relative_errors.len(), 6);
    assert_eq!(predicted_floor(rom.record(), 4), 4);
}

#[test]
fn projected_matrices_are_bitwise_reproducible() {
    let mut g = sample::rng(35);
    let fos = linearize_higher_order(&sample::higher_order(&mut g, 3, 2, 1, 2).unwrap());
    let rom = pade_type_reduce(&fos, c64(0.2, 0.1), 3, DEFAULT_TOL).unwrap();
    let v = rom.projector();
    let vh = v.adjoint();
    let bits = |m: &Matrix| -> Vec<(u64, u64)> {
        m.as_slice()
            .iter()
            .map(|z| (z.re.to_bits(), z.im.to_bits()))
            .collect()
    };
    assert_eq!(bits(rom.system().e()), bits(&(&(&vh * fos.e()) * v)));
    assert_eq!(bits(rom.system().a()), bits(&(&(&vh * fos.a()) * v)));
    assert_eq!(bits(rom.system().b()), bits(&(&vh * fos.b())));
    assert_eq!(bits(rom.system().l()), bits(&(fos.l() * v)));
    assert!(relative_difference(&(&vh * v), &Matrix::identity(3)) < 1e-10);
}
