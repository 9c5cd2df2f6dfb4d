use chanent::linalg::{c, kron, partial_trace, trace_norm, ComplexMatrix};
use chanent::rng;
use proptest::prelude::*;

fn ginibre(seed: u64, n: usize, m: usize) -> ComplexMatrix {
    rng::ginibre(&mut rng::seeded(seed), n, m)
}

fn max_abs(m: &ComplexMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn kron_is_associative(seed in any::<u64>(), a in 1usize..4, b in 1usize..4, d in 1usize..4) {
        let (x, y, z) = (ginibre(seed, a, b), ginibre(seed ^ 1, b, d), ginibre(seed ^ 2, d, a));
        let left = kron(&kron(&x, &y), &z);
        let right = kron(&x, &kron(&y, &z));
        prop_assert!(max_abs(&(left - right)) <= 1e-12);
    }

    #[test]
    fn partial_trace_of_kron_recovers_factors(seed in any::<u64>(), a in 1usize..4, b in 1usize..4) {
        let x = ginibre(seed, a, a);
        let y = ginibre(seed ^ 7, b, b);
        let xy = kron(&x, &y);
        let keep_a = partial_trace(&xy, &[a, b], &[0]).unwrap();
        let keep_b = partial_trace(&xy, &[a, b], &[1]).unwrap();
        prop_assert!(max_abs(&(keep_a - &x * y.trace())) <= 1e-10);
        prop_assert!(max_abs(&(keep_b - &y * x.trace())) <= 1e-10);
    }

    #[test]
    fn trace_norm_is_a_norm(seed in any::<u64>(), n in 1usize..6, s in -3.0f64..3.0, t in -3.0f64..3.0) {
        let x = ginibre(seed, n, n);
        let y = ginibre(seed ^ 3, n, n);
        prop_assert!(trace_norm(&(&x + &y)) <= trace_norm(&x) + trace_norm(&y) + 1e-10);
        let lambda = c(s, t);
        prop_assert!((trace_norm(&(&x * lambda)) - lambda.norm() * trace_norm(&x)).abs() <= 1e-10 * (1.0 + trace_norm(&x)));
    }
}

#[test]
fn fuchs_van_de_graaf_on_random_density_pairs() {
    let mut g = rng::seeded(99);
    for i in 0..100 {
        let n = 2 + i % 4;
        let rho = rng::mixed_state(&mut g, vec![n], 1 + i % n);
        let sigma = rng::mixed_state(&mut g, vec![n], 1 + (i / 2) % n);
        let f = rho.fidelity(&sigma).unwrap();
        let t = rho.trace_distance(&sigma);
        assert!(1.0 - f.sqrt() <= t + 1e-9, "pair {i}: F = {f}, T = {t}");
        assert!(t <= (1.0 - f).max(0.0).sqrt() + 1e-9, "pair {i}: F = {f}, T = {t}");
    }
}

#[test]
fn fidelity_is_squared_convention() {
    // |0> and |+> overlap with squared fidelity 1/2.
    let plus = nalgebra::DVector::from_vec(vec![c(1.0, 0.0), c(1.0, 0.0)]) * c(0.5f64.sqrt(), 0.0);
    let zero = nalgebra::DVector::from_vec(vec![c(1.0, 0.0), c(0.0, 0.0)]);
    let a = chanent::DensityOperator::pure(&plus, vec![2]).unwrap();
    let b = chanent::DensityOperator::pure(&zero, vec![2]).unwrap();
    assert!((a.fidelity(&b).unwrap() - 0.5).abs() < 1e-12);
}
