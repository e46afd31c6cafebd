//! Left invariance spot checks: multiplying samples by a fixed group element
//! must not change their distribution. Each check compares an entry statistic
//! of translated samples against fresh samples with a two-sample KS test.

use levylab_core::rng::RandomStream;
use levylab_core::sampling::{sample_orthogonal, sample_special_unitary, sample_symplectic};
use levylab_core::stats::ks_two_sample;

const DRAWS: usize = 4000;

#[test]
fn orthogonal_samples_are_left_invariant() {
    let g = sample_orthogonal(5, &mut RandomStream::new(900, 0).rng()).unwrap().matrix;
    let mut rng = RandomStream::new(900, 1).rng();
    let translated: Vec<f64> = (0..DRAWS)
        .map(|_| {
            let u = sample_orthogonal(5, &mut rng).unwrap().matrix;
            (&g * &u)[(0, 0)].re
        })
        .collect();
    let mut rng = RandomStream::new(900, 2).rng();
    let fresh: Vec<f64> = (0..DRAWS)
        .map(|_| sample_orthogonal(5, &mut rng).unwrap().matrix[(0, 0)].re)
        .collect();
    let ks = ks_two_sample(&translated, &fresh).unwrap();
    assert!(!ks.rejects_at(0.01), "KS statistic {}, p = {}", ks.statistic, ks.p_value);
}

#[test]
fn special_unitary_samples_are_left_invariant() {
    let g = sample_special_unitary(3, &mut RandomStream::new(901, 0).rng()).unwrap().matrix;
    let mut rng = RandomStream::new(901, 1).rng();
    let translated: Vec<f64> = (0..DRAWS)
        .map(|_| {
            let u = sample_special_unitary(3, &mut rng).unwrap().matrix;
            (&g * &u)[(0, 0)].norm_sqr()
        })
        .collect();
    let mut rng = RandomStream::new(901, 2).rng();
    let fresh: Vec<f64> = (0..DRAWS)
        .map(|_| sample_special_unitary(3, &mut rng).unwrap().matrix[(0, 0)].norm_sqr())
        .collect();
    let ks = ks_two_sample(&translated, &fresh).unwrap();
    assert!(!ks.rejects_at(0.01), "KS statistic {}, p = {}", ks.statistic, ks.p_value);
}

#[test]
fn symplectic_samples_are_left_invariant() {
    let g = sample_symplectic(2, &mut RandomStream::new(902, 0).rng()).unwrap().matrix;
    let mut rng = RandomStream::new(902, 1).rng();
    let translated: Vec<f64> = (0..DRAWS)
        .map(|_| {
            let u = sample_symplectic(2, &mut rng).unwrap().matrix;
            (&g * &u)[(0, 0)].norm_sqr()
        })
        .collect();
    let mut rng = RandomStream::new(902, 2).rng();
    let fresh: Vec<f64> = (0..DRAWS)
        .map(|_| sample_symplectic(2, &mut rng).unwrap().matrix[(0, 0)].norm_sqr())
        .collect();
    let ks = ks_two_sample(&translated, &fresh).unwrap();
    assert!(!ks.rejects_at(0.01), "KS statistic {}, p = {}", ks.statistic, ks.p_value);
}
