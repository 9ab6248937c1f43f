use proptest::prelude::*;
use steerkit_core::linalg::{self, c, CMat};
use steerkit_core::random;
use steerkit_core::*;

fn cfg() -> SdpConfig<'static> {
    SdpConfig::default()
}

fn asm_of(rho: &DensityMatrix, which: &str) -> Assemblage {
    assemblage_from_state(rho, &MeasurementSet::paulis(which).unwrap()).unwrap()
}

fn product_state() -> DensityMatrix {
    let mut r = random::rng(2);
    let a = random::random_state(2, 2, &mut r);
    let b = random::random_state(2, 2, &mut r);
    DensityMatrix::new(linalg::kron(a.matrix(), b.matrix())).unwrap()
}

#[test]
fn feasibility_examples() {
    let s = lhs_feasibility(&asm_of(&singlet(), "xz"), &cfg()).unwrap();
    assert!(s.steerable);
    let f = s.inequality().unwrap();
    assert!(f.evaluate(&asm_of(&singlet(), "xz")).unwrap() < 0.0);

    let p = lhs_feasibility(&asm_of(&product_state(), "xyz"), &cfg()).unwrap();
    assert!(!p.steerable);
    assert!(p.model().unwrap().max_deviation(&asm_of(&product_state(), "xyz")) < 1e-7);

    let w5 = lhs_feasibility(&asm_of(&werner(2, 0.5).unwrap(), "xyz"), &cfg()).unwrap();
    assert!(!w5.steerable);
    let w6 = lhs_feasibility(&asm_of(&werner(2, 0.6).unwrap(), "xyz"), &cfg()).unwrap();
    assert!(w6.steerable);
}

#[test]
fn certificate_invariants() {
    for which in ["xz", "xyz"] {
        let asm = asm_of(&werner(2, 0.9).unwrap(), which);
        let v = lhs_feasibility(&asm, &cfg()).unwrap();
        let f = v.inequality().unwrap();
        assert!(f.min_strategy_eig() > -1e-8);
        assert!(f.min_full_strategy_eig() > -1e-8);
        assert!((f.normalization() - 1.0).abs() < 1e-8);
        assert!((f.evaluate(&asm).unwrap() - v.mu).abs() < 1e-6);
        assert!((v.dual_objective - v.mu).abs() < 1e-6);
    }
}

#[test]
fn dual_inequality_is_valid_on_unsteerable_assemblages() {
    let f = dual_inequality(&asm_of(&singlet(), "xz"), &cfg()).unwrap();
    let mut r = random::rng(17);
    let ms = MeasurementSet::paulis("xz").unwrap();
    for _ in 0..50 {
        // separable states give unsteerable assemblages
        let mut m = CMat::zeros(4, 4);
        for _ in 0..3 {
            let a = random::random_state(2, 1, &mut r);
            let b = random::random_state(2, 1, &mut r);
            m += linalg::kron(a.matrix(), b.matrix()) * c(1.0 / 3.0, 0.0);
        }
        let sep = DensityMatrix::new(m).unwrap();
        let v = f.evaluate(&assemblage_from_state(&sep, &ms).unwrap()).unwrap();
        assert!(v >= -1e-8, "{v}");
    }
    let unsteer = dual_inequality(&asm_of(&werner(2, 0.3).unwrap(), "xz"), &cfg()).unwrap();
    assert!(unsteer.evaluate(&asm_of(&werner(2, 0.3).unwrap(), "xz")).unwrap() >= -1e-8);
}

#[test]
fn critical_alpha_examples() {
    let xz = critical_alpha(&singlet(), &MeasurementSet::paulis("xz").unwrap(), &cfg()).unwrap();
    assert!((xz.alpha - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-6);
    let xyz = critical_alpha(&singlet(), &MeasurementSet::paulis("xyz").unwrap(), &cfg()).unwrap();
    assert!((xyz.alpha - 1.0 / 3f64.sqrt()).abs() < 1e-6);
    let sep = critical_alpha(&product_state(), &MeasurementSet::paulis("xyz").unwrap(), &cfg()).unwrap();
    assert_eq!(sep.alpha, 1.0);
    assert!(sep.capped);
    let b = critical_alpha_bisect(&singlet(), &MeasurementSet::paulis("xz").unwrap(), 1e-4, &cfg()).unwrap();
    assert!((b - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-4);
}

#[test]
fn weight_is_monotone_and_vanishes_below_threshold() {
    let mut prev = -1.0;
    for k in 0..=10 {
        let eta = 0.5 + 0.05 * k as f64;
        let asm = asm_of(&werner(2, eta).unwrap(), "xz");
        let w = steering_weight(&asm, &cfg()).unwrap().weight;
        assert!(w >= prev - 1e-7);
        if eta <= std::f64::consts::FRAC_1_SQRT_2 - 1e-3 {
            assert!(w < 1e-6, "eta {eta} weight {w}");
        }
        prev = w;
    }
}

#[test]
fn robustness_matches_incompatibility_and_noise_cancels() {
    let asm = asm_of(&singlet(), "xz");
    let r = steering_robustness(&asm, &cfg()).unwrap();
    assert!(r.robustness > 0.0);
    let ir = incompatibility_robustness(&normalize_assemblage(&asm).unwrap(), &cfg()).unwrap();
    assert!((r.robustness - ir.robustness).abs() < 1e-6);
    // regression baseline: 3 − 2√2
    assert!((r.robustness - (3.0 - 2.0 * 2f64.sqrt())).abs() < 1e-6);

    let noise = Assemblage::new(r.noise.clone().unwrap()).unwrap();
    let t = r.robustness;
    let mixed = asm.mix(&noise, 1.0 / (1.0 + t)).unwrap();
    let again = steering_robustness(&mixed, &cfg()).unwrap();
    assert!(again.robustness < 1e-6);
    assert!(!lhs_feasibility(&mixed, &cfg()).unwrap().steerable);
}

#[test]
fn quantifiers_vanish_when_unsteerable() {
    let asm = asm_of(&werner(2, 0.4).unwrap(), "xyz");
    assert!(steering_weight(&asm, &cfg()).unwrap().weight < 1e-6);
    assert!(steering_robustness(&asm, &cfg()).unwrap().robustness < 1e-6);
}

fn random_pair(seed: u64) -> (Assemblage, Assemblage) {
    let mut r = random::rng(seed);
    let ms = random::random_qubit_set(2, &mut r);
    let a = assemblage_from_state(&random::random_state(4, 1, &mut r), &ms).unwrap();
    let b = assemblage_from_state(&random::random_state(4, 2, &mut r), &ms).unwrap();
    (a, b)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn verdicts_agree(seed in any::<u64>()) {
        let mut r = random::rng(seed);
        let rho = random::random_state(4, 2, &mut r);
        let asm = assemblage_from_state(&rho, &random::random_qubit_set(3, &mut r)).unwrap();
        let tol = 1e-6;
        let v = lhs_feasibility(&asm, &cfg()).unwrap();
        prop_assume!(v.mu.abs() > 1e-5);
        let w = steering_weight(&asm, &cfg()).unwrap().weight;
        let t = steering_robustness(&asm, &cfg()).unwrap().robustness;
        prop_assert_eq!(v.steerable, w > tol);
        prop_assert_eq!(v.steerable, t > tol);
        if let Some(m) = v.model() {
            prop_assert!(m.max_deviation(&asm) < 1e-7);
            prop_assert!(m.min_eig() > -1e-9);
        }
    }

    #[test]
    fn quantifiers_are_convex(seed in any::<u64>(), p in 0.0..1.0f64) {
        let (a, b) = random_pair(seed);
        let mix = a.mix(&b, p).unwrap();
        let w = |x: &Assemblage| steering_weight(x, &cfg()).unwrap().weight;
        let t = |x: &Assemblage| steering_robustness(x, &cfg()).unwrap().robustness;
        prop_assert!(w(&mix) <= p * w(&a) + (1.0 - p) * w(&b) + 1e-6);
        prop_assert!(t(&mix) <= p * t(&a) + (1.0 - p) * t(&b) + 1e-6);
    }

    #[test]
    fn quantifiers_ignore_labels(seed in any::<u64>()) {
        let (a, _) = random_pair(seed);
        let b = a.relabel(&[1, 0], &[vec![1, 0], vec![0, 1]]).unwrap();
        let v = |x: &Assemblage| lhs_feasibility(x, &cfg()).unwrap().mu;
        let w = |x: &Assemblage| steering_weight(x, &cfg()).unwrap().weight;
        let t = |x: &Assemblage| steering_robustness(x, &cfg()).unwrap().robustness;
        prop_assert!((v(&a) - v(&b)).abs() < 1e-8 * 100.0);
        prop_assert!((w(&a) - w(&b)).abs() < 1e-6);
        prop_assert!((t(&a) - t(&b)).abs() < 1e-6);
    }

    #[test]
    fn critical_alpha_filter_invariance(seed in any::<u64>()) {
        let mut r = random::rng(seed);
        let rho = random::random_state(4, 4, &mut r);
        let ms = random::random_qubit_set(2, &mut r);
        let a0 = critical_alpha_capped(&rho, &ms, 10.0, &cfg()).unwrap().alpha;
        // Bob filter F and Alice unitary U; Alice's measurements rotate with U
        let f = random::ginibre(2, 2, &mut r);
        let u = random::haar_unitary(2, &mut r);
        let big = linalg::kron(&u, &f);
        let m = &big * rho.matrix() * big.adjoint();
        let t = linalg::trace_re(&m);
        let filtered = DensityMatrix::new(m / c(t, 0.0)).unwrap();
        let rotated = MeasurementSet::new(
            ms.povms().iter().map(|p| Povm::from_matrices(
                p.effects().iter().map(|e| &u * e.matrix() * u.adjoint()).collect()
            ).unwrap()).collect()
        ).unwrap();
        let a1 = critical_alpha_capped(&filtered, &rotated, 10.0, &cfg()).unwrap().alpha;
        prop_assert!((a0 - a1).abs() < 1e-6, "{} vs {}", a0, a1);
    }
}
