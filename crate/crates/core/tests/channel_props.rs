use chanent::channel::{
    isotropic_ppt_threshold, isotropic_state, maximally_entangled, operator_schmidt, random_channel,
    random_separable_channel, swap_channel, BipartiteChannel,
};
use chanent::linalg::{c, identity, kron, min_eigenvalue, partial_trace, partial_transpose, permute_subsystems, zeros, ComplexMatrix};
use chanent::{rng, DensityOperator};
use proptest::prelude::*;

fn max_abs(m: &ComplexMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn tp_defect(ch: &BipartiteChannel) -> f64 {
    let d = ch.dims();
    let marginal = partial_trace(ch.choi(), &d, &[0, 1]).unwrap();
    let din = d[0] * d[1];
    max_abs(&(marginal - identity(din) * c(1.0 / din as f64, 0.0)))
}

#[test]
fn swap_choi_is_twisted_product_of_max_entangled_states() {
    for k in 2..=3 {
        let phi = maximally_entangled(k).unwrap().into_matrix();
        // kron(Phi_{A0 B1}, Phi_{A1 B0}) reordered to (A0, B0, A1, B1).
        let twisted = permute_subsystems(&kron(&phi, &phi), &[k; 4], &[0, 3, 2, 1]).unwrap();
        assert!(max_abs(&(swap_channel(k).unwrap().choi() - twisted)) <= 1e-12, "k = {k}");
    }
}

#[test]
fn swap_exchanges_halves_of_two_max_entangled_pairs() {
    for k in 2..=3 {
        let phi = maximally_entangled(k).unwrap().into_matrix();
        // Phi_{A0 A'} (x) Phi_{B0 B'} on (A0, B0, A', B').
        let input = permute_subsystems(&kron(&phi, &phi), &[k; 4], &[0, 2, 1, 3]).unwrap();
        let input = DensityOperator::new(input, vec![k; 4]).unwrap();
        let out = swap_channel(k).unwrap().apply(&input).unwrap();
        // Phi_{A1 B'} (x) Phi_{B1 A'} reordered to (A1, B1, A', B').
        let expected = permute_subsystems(&kron(&phi, &phi), &[k; 4], &[0, 2, 3, 1]).unwrap();
        assert!(max_abs(&(out.matrix() - expected)) <= 1e-12, "k = {k}");
    }
}

#[test]
fn isotropic_boundary_sits_at_one_over_k() {
    for k in 2..=4 {
        let p = isotropic_ppt_threshold(k, 1e-12).unwrap();
        assert!((p - 1.0 / k as f64).abs() <= 1e-9, "k = {k}: threshold {p}");
        let at = isotropic_state(k, 1.0 / k as f64).unwrap();
        let min = min_eigenvalue(&partial_transpose(at.matrix(), &[k, k], &[1]).unwrap()).unwrap();
        assert!(min.abs() <= 1e-9, "k = {k}: min PT eigenvalue {min}");
    }
}

#[test]
fn random_channels_are_trace_preserving() {
    for seed in 0..100 {
        let dims = [1 + (seed as usize) % 2, 2, 2, 1 + (seed as usize / 2) % 2];
        let ch = random_channel(dims, seed).unwrap();
        assert!(tp_defect(&ch) <= 1e-9, "seed {seed}");
        assert!((ch.choi().trace().re - 1.0).abs() <= 1e-9);
    }
}

#[test]
fn random_separable_channels_are_ppt() {
    for seed in 0..100 {
        let ch = random_separable_channel([2, 2, 2, 2], seed, 1 + (seed as usize) % 4).unwrap();
        let flag = ch.is_ppt();
        assert!(flag.ppt, "seed {seed}: {}", flag.min_eigenvalue);
        assert!(ch.is_certified_separable());
        assert!(tp_defect(&ch) <= 1e-9);
    }
}

#[test]
fn max_entangled_overlap_with_product_states_is_at_most_half() {
    let phi = maximally_entangled(2).unwrap().into_matrix();
    let mut g = rng::seeded(5);
    let mut best = 0.0f64;
    for _ in 0..1000 {
        let a = rng::pure_state(&mut g, vec![2]).into_matrix();
        let b = rng::pure_state(&mut g, vec![2]).into_matrix();
        best = best.max(chanent::linalg::inner(&phi, &kron(&a, &b)));
    }
    assert!(best <= 0.5 + 1e-9, "{best}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn schmidt_coefficients_square_sum_to_dimension(seed in any::<u64>(), da in 1usize..4, db in 1usize..4) {
        let u = rng::unitary(&mut rng::seeded(seed), da * db);
        let terms = operator_schmidt(&u, da, db).unwrap();
        let sum: f64 = terms.iter().map(|t| t.coefficient * t.coefficient).sum();
        prop_assert!((sum - (da * db) as f64).abs() <= 1e-9);
        let mut rebuilt = zeros(da * db, da * db);
        for t in &terms {
            rebuilt += kron(&t.a, &t.b) * c(t.coefficient, 0.0);
        }
        prop_assert!(max_abs(&(rebuilt - &u)) <= 1e-9);
        prop_assert!(terms.windows(2).all(|w| w[0].coefficient >= w[1].coefficient));
    }

    #[test]
    fn ppt_flag_agrees_with_min_eigenvalue(seed in 0u64..10_000, w in 0.0f64..1.0) {
        let mixed = swap_channel(2).unwrap().mix(&random_separable_channel([2, 2, 2, 2], seed, 2).unwrap(), w).unwrap();
        let flag = mixed.is_ppt();
        prop_assert_eq!(flag.ppt, flag.min_eigenvalue >= -1e-9);
    }
}
