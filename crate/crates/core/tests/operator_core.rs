use proptest::prelude::*;
use steerkit_core::linalg::{self, Subsystem};
use steerkit_core::random;
use steerkit_core::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn kron_is_associative_and_multiplies_traces(seed in any::<u64>()) {
        let mut r = random::rng(seed);
        let a = random::ginibre(2, 2, &mut r);
        let b = random::ginibre(3, 3, &mut r);
        let d = random::ginibre(2, 2, &mut r);
        let left = linalg::kron(&linalg::kron(&a, &b), &d);
        let right = linalg::kron(&a, &linalg::kron(&b, &d));
        prop_assert!(linalg::dist(&left, &right) < 1e-12);
        let t = linalg::kron(&a, &b).trace();
        prop_assert!((t - a.trace() * b.trace()).norm() < 1e-10);
    }

    #[test]
    fn partial_trace_of_product(seed in any::<u64>(), da in 2usize..4, db in 2usize..4) {
        let mut r = random::rng(seed);
        let a = random::random_state(da, da, &mut r);
        let b = random::random_state(db, db, &mut r);
        let ab = linalg::kron(a.matrix(), b.matrix());
        let rb = linalg::partial_trace(&ab, (da, db), Subsystem::A).unwrap();
        let ra = linalg::partial_trace(&ab, (da, db), Subsystem::B).unwrap();
        prop_assert!(linalg::dist(&rb, b.matrix()) < 1e-12);
        prop_assert!(linalg::dist(&ra, a.matrix()) < 1e-12);
    }

    #[test]
    fn schmidt_coefficients_ignore_local_unitaries(seed in any::<u64>(), d in 2usize..4) {
        let mut r = random::rng(seed);
        let rho = random::random_state(d * d, 2, &mut r);
        let u = linalg::kron(&random::haar_unitary(d, &mut r), &random::haar_unitary(d, &mut r));
        let rotated = DensityMatrix::new(&u * rho.matrix() * u.adjoint()).unwrap();
        let s0 = operator_schmidt_coefficients(&rho, d).unwrap();
        let s1 = operator_schmidt_coefficients(&rotated, d).unwrap();
        for (x, y) in s0.iter().zip(&s1) {
            prop_assert!((x - y).abs() < 1e-10);
        }
    }

    #[test]
    fn bloch_round_trip(seed in any::<u64>()) {
        let mut r = random::rng(seed);
        let rho = random::random_state(4, 3, &mut r);
        let b = bloch_decompose(&rho).unwrap();
        prop_assert!(linalg::dist(&b.reconstruct(), rho.matrix()) < 1e-12);
    }

    #[test]
    fn assemblage_is_no_signalling(seed in any::<u64>(), m in 1usize..4) {
        let mut r = random::rng(seed);
        let rho = random::random_state(6, 3, &mut r);
        let povms = (0..m).map(|_| random::random_projective(2, &mut r)).collect();
        let ms = MeasurementSet::new(povms).unwrap();
        let asm = assemblage_from_state(&rho, &ms).unwrap();
        let rb = linalg::partial_trace(rho.matrix(), (2, 3), Subsystem::A).unwrap();
        for x in 0..asm.settings() {
            let mut sum = linalg::CMat::zeros(3, 3);
            for a in 0..asm.outcomes() {
                prop_assert!(linalg::min_eig(asm.member(x, a)) > -1e-12);
                sum += asm.member(x, a);
            }
            prop_assert!(linalg::dist(&sum, &rb) < 1e-12);
        }
    }
}

#[test]
fn swap_parties_is_an_involution() {
    let mut r = random::rng(5);
    let rho = random::random_state(6, 2, &mut r);
    let once = swap_parties(&rho, (2, 3)).unwrap();
    let twice = swap_parties(&once, (3, 2)).unwrap();
    assert!(linalg::dist(twice.matrix(), rho.matrix()) < 1e-14);
    let ra = reduced_state(&rho, (2, 3), Subsystem::B).unwrap();
    let rb_swapped = reduced_state(&once, (3, 2), Subsystem::A).unwrap();
    assert!(linalg::dist(ra.matrix(), rb_swapped.matrix()) < 1e-12);
}

#[test]
fn ppt_of_singlet() {
    assert!((min_eig_partial_transpose(&singlet(), (2, 2)).unwrap() + 0.5).abs() < 1e-12);
    let sep = werner(2, 1.0 / 3.0).unwrap();
    assert!(min_eig_partial_transpose(&sep, (2, 2)).unwrap().abs() < 1e-12);
}
