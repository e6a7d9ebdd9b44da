use argmin_eig::linalg::{coercivity_gap, operator_bound};
use argmin_eig::oracle::{greedy_match_distance, reference_spectrum, smallest_singular_direction};
use argmin_eig::{random, Complex64, ComplexMatrix, ComplexVector, NormKind};
use proptest::prelude::*;
use rand::Rng;

fn norm_kind() -> impl Strategy<Value = NormKind> {
    prop_oneof![Just(NormKind::One), Just(NormKind::Two), Just(NormKind::Inf)]
}

proptest! {
    #[test]
    fn norm_axioms(seed in any::<u64>(), d in 1usize..=16, re in -10.0..10.0f64, im in -10.0..10.0f64, norm in norm_kind()) {
        let mut rng = random::rng(seed);
        let u = random::vector(&mut rng, d);
        let v = random::vector(&mut rng, d);
        let alpha = Complex64::new(re, im);

        let scaled = v.scale(alpha).norm(norm);
        let expected = alpha.norm() * v.norm(norm);
        prop_assert!((scaled - expected).abs() <= 1e-12 * expected.max(f64::MIN_POSITIVE));
        prop_assert!(u.add(&v).unwrap().norm(norm) <= u.norm(norm) + v.norm(norm) + 1e-12);
        prop_assert!(v.norm(norm) > 0.0);
        prop_assert_eq!(ComplexVector::zeros(d).norm(norm), 0.0);
    }

    #[test]
    fn single_entry_vectors_have_its_modulus_as_norm(d in 1usize..=8, at in 0usize..8, re in -3.0..3.0f64, im in -3.0..3.0f64) {
        let at = at % d;
        let mut entries = vec![Complex64::new(0.0, 0.0); d];
        entries[at] = Complex64::new(re, im);
        let v = ComplexVector::new(entries).unwrap();
        for norm in NormKind::ALL {
            prop_assert!((v.norm(norm) - Complex64::new(re, im).norm()).abs() <= 1e-15 * (1.0 + re.abs() + im.abs()));
        }
    }
}

#[test]
fn operator_bound_dominates_every_image() {
    for norm in NormKind::ALL {
        let mut rng = random::rng(11 + norm as u64);
        for _ in 0..1000 {
            let d = rng.random_range(1..=8);
            let t = random::matrix(&mut rng, d);
            let v = random::vector(&mut rng, d);
            let c = operator_bound(&t, norm).value();
            let lhs = t.apply(&v).unwrap().norm(norm);
            assert!(lhs <= c * v.norm(norm) * (1.0 + 1e-10), "{norm}: {lhs} > {c}·‖v‖");
        }
    }
}

#[test]
fn coercivity_holds_for_random_triples() {
    for norm in NormKind::ALL {
        let mut rng = random::rng(21 + norm as u64);
        for _ in 0..1000 {
            let d = rng.random_range(1..=8);
            let t = random::matrix(&mut rng, d);
            let bound = operator_bound(&t, norm);
            let v = random::vector(&mut rng, d);
            let lambda = random::scalar_in_disk(&mut rng, 3.0 * bound.value() + 1.0);
            let gap = coercivity_gap(&t, &v, lambda, norm, bound).unwrap();
            assert!(
                gap >= -1e-10 * (1.0 + lambda.norm()) * v.norm(norm),
                "{norm}: gap {gap}"
            );
        }
    }
}

fn inf_norm(a: &ComplexMatrix) -> f64 {
    operator_bound(a, NormKind::Inf).value()
}

#[test]
fn solve_backward_error() {
    let mut rng = random::rng(31);
    let mut tested = 0;
    while tested < 200 {
        let d = rng.random_range(1..=16);
        let a = random::matrix(&mut rng, d);
        let (_, smin) = smallest_singular_direction(&a).unwrap();
        // ‖A‖₂/σ_min with ‖A‖_F as the upper estimate of ‖A‖₂.
        if smin == 0.0 || a.frobenius_norm() / smin > 1e8 {
            continue;
        }
        tested += 1;
        let b = random::vector(&mut rng, d);
        let x = a.solve(&b).unwrap();
        let residual = a.apply(&x).unwrap().sub(&b).unwrap().norm(NormKind::Inf);
        assert!(residual <= 1e-9 * inf_norm(&a) * x.norm(NormKind::Inf));
    }
}

#[test]
fn lu_adjoint_solve_matches_adjoint_matrix() {
    let mut rng = random::rng(32);
    for d in 1..=10 {
        let a = random::matrix(&mut rng, d);
        let b = random::vector(&mut rng, d);
        let x = a.lu().unwrap().solve_adjoint(&b).unwrap();
        let r = a.adjoint().apply(&x).unwrap().sub(&b).unwrap().norm(NormKind::Two);
        assert!(r <= 1e-10 * (1.0 + x.norm(NormKind::Two)));
    }
}

#[test]
fn oracle_eigenvalues_are_near_singular_shifts() {
    let mut rng = random::rng(41);
    for _ in 0..60 {
        let d = rng.random_range(1..=16);
        let t = random::matrix(&mut rng, d);
        let spectrum = reference_spectrum(&t).unwrap();
        assert_eq!(spectrum.eigenvalues.len(), d);
        for &mu in &spectrum.eigenvalues {
            let (_, s) = smallest_singular_direction(&t.shifted(mu)).unwrap();
            assert!(s <= 1e-6 * (1.0 + t.frobenius_norm()), "σ_min(T − μI) = {s}");
        }
    }
}

#[test]
fn oracle_similarity_invariance() {
    let mut rng = random::rng(42);
    for _ in 0..40 {
        let d = rng.random_range(1..=12);
        let t = random::matrix(&mut rng, d);
        let u = random::unitary(&mut rng, d);
        let similar = u.matmul(&t).unwrap().matmul(&u.adjoint()).unwrap();
        let a = reference_spectrum(&t).unwrap();
        let b = reference_spectrum(&similar).unwrap();
        let distance = greedy_match_distance(&a.eigenvalues, &b.eigenvalues);
        assert!(distance <= 1e-6, "d = {d}: {distance}");
    }
}

#[test]
fn oracle_recovers_planted_normal_spectra() {
    let mut rng = random::rng(43);
    for d in [3, 5, 9, 16, 24] {
        let eigs: Vec<Complex64> = (0..d).map(|_| random::scalar_in_disk(&mut rng, 2.0)).collect();
        let t = random::normal_matrix(&mut rng, &eigs);
        let found = reference_spectrum(&t).unwrap();
        assert!(greedy_match_distance(&eigs, &found.eigenvalues) <= 1e-9);
    }
}
