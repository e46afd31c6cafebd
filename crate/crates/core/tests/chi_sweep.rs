//! The Killing proportionality constant measured from structure constants,
//! on algebras large enough to exercise the dense tensor path. The unitary
//! value grows as 2n, the orthogonal as n - 2, the symplectic as 2n + 2.

use levylab_core::liealg::{build_basis, chi_coefficient, structure_constants, MatrixAlgebra};

fn measured_chi(algebra: MatrixAlgebra) -> f64 {
    let basis = build_basis(algebra).unwrap();
    let sc = structure_constants(&basis).unwrap();
    let report = chi_coefficient(&sc).unwrap();
    assert!(
        report.killing_diagonal_spread < 1e-8,
        "spread {}",
        report.killing_diagonal_spread
    );
    assert_eq!(report.ricci_bound, report.chi / 4.0);
    report.chi
}

#[test]
fn unitary_chi_grows_as_two_n() {
    let chi = measured_chi(MatrixAlgebra::SpecialUnitary(14));
    assert!((chi - 28.0).abs() < 1e-9, "chi {chi}");
}

#[test]
fn orthogonal_chi_grows_as_n_minus_two() {
    let chi = measured_chi(MatrixAlgebra::Orthogonal(20));
    assert!((chi - 18.0).abs() < 1e-9, "chi {chi}");
}

#[test]
fn symplectic_chi_grows_as_two_n_plus_two() {
    let chi = measured_chi(MatrixAlgebra::Symplectic(9));
    assert!((chi - 20.0).abs() < 1e-9, "chi {chi}");
}
