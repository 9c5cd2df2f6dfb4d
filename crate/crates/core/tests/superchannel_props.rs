use chanent::channel::{random_channel, random_input_state, random_separable_channel, swap_channel, BipartiteChannel};
use chanent::linalg::{c, eigh, hermitian_part, identity, partial_trace, spectral_map, ComplexMatrix};
use chanent::measures::{diamond_distance, standard_robustness, SolverSettings};
use chanent::superchannel::{
    catalyst_component, dilution_superchannel, distillation_superchannel, random_local_superchannel, snap,
    twirl_image_rank, twisted_twirl, Superchannel,
};
use chanent::rng;

fn max_abs(m: &ComplexMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn assert_valid(ch: &BipartiteChannel, what: &str) {
    let d = ch.dims();
    let din = d[0] * d[1];
    let marginal = partial_trace(ch.choi(), &d, &[0, 1]).unwrap();
    let tp = max_abs(&(marginal - identity(din) * c(1.0 / din as f64, 0.0)));
    assert!(tp <= 1e-8, "{what}: TP defect {tp}");
    let min = chanent::linalg::min_eigenvalue(ch.choi()).unwrap();
    assert!(min >= -1e-9, "{what}: min eigenvalue {min}");
}

/// Target, its standard-robustness decomposition and the swap size that
/// dilutes it.
fn dilution_for(seed: u64) -> (BipartiteChannel, Superchannel, usize) {
    let target = random_channel([2, 1, 1, 2], seed).unwrap();
    let rob = standard_robustness(&target, &SolverSettings::default()).unwrap();
    let k = snap((1.0 + rob.value).sqrt()).ceil().max(1.0) as usize;
    let mix = rob.mix.clone().unwrap_or_else(|| target.clone());
    let theta = dilution_superchannel(&target, &mix, rob.value, k).unwrap();
    (target, theta, k)
}

fn random_effect(dim: usize, seed: u64) -> ComplexMatrix {
    let mut g = rng::seeded(seed);
    let x = rng::ginibre(&mut g, dim, dim);
    let (vals, vecs) = eigh(&hermitian_part(&x));
    let (lo, hi) = (vals[0], vals[dim - 1]);
    spectral_map(&vals, &vecs, |l| (l - lo) / (hi - lo))
}

#[test]
fn constructions_map_random_channels_to_channels() {
    let (_, dilution, k) = dilution_for(1);
    let psi = random_input_state([2; 4], 2, 3);
    let distill = distillation_superchannel(&psi, &random_effect(8, 4), 2, [2; 4]).unwrap();
    let local = random_local_superchannel([2; 4], [2, 1, 2, 2], [2, 1], 5).unwrap();
    for seed in 0..100u64 {
        let e = random_channel([2; 4], 1000 + seed).unwrap();
        assert_valid(&distill.apply(&e).unwrap(), "distillation");
        assert_valid(&local.apply(&e).unwrap(), "local");
        assert_valid(&twisted_twirl(&e).unwrap(), "twirl");
        let ek = random_channel([k; 4], 2000 + seed).unwrap();
        assert_valid(&dilution.apply(&ek).unwrap(), "dilution");
    }
}

#[test]
fn dilution_reproduces_target_exactly() {
    for seed in 0..4 {
        let (target, theta, k) = dilution_for(10 + seed);
        let out = theta.apply(&swap_channel(k).unwrap()).unwrap();
        assert!(max_abs(&(out.choi() - target.choi())) <= 1e-9, "seed {seed}");
    }
}

#[test]
fn free_probes_hit_dilution_test_rarely() {
    for k in 2..=3 {
        let target = random_channel([1, 1, 1, 1], 0).unwrap();
        let theta = dilution_superchannel(&target, &target, 0.0, k).unwrap();
        for seed in 0..30 {
            let e = random_separable_channel([k; 4], seed, 1 + seed as usize % 3).unwrap();
            let p = theta.hit_probability(&e).unwrap().unwrap();
            assert!(p <= 1.0 / (k * k) as f64 + 1e-9, "k = {k}, seed {seed}: {p}");
        }
    }
}

#[test]
fn twirl_fixes_swap_is_idempotent_and_has_rank_four() {
    let f = swap_channel(2).unwrap();
    assert!(max_abs(&(twisted_twirl(&f).unwrap().choi() - f.choi())) <= 1e-12);
    for seed in 0..5 {
        let once = twisted_twirl(&random_channel([2; 4], seed).unwrap()).unwrap();
        let twice = twisted_twirl(&once).unwrap();
        assert!(max_abs(&(twice.choi() - once.choi())) <= 1e-12);
    }
    assert_eq!(twirl_image_rank(2, 2, 20, 7).unwrap(), 4);
    assert_eq!(twirl_image_rank(2, 3, 40, 8).unwrap(), 4);
}

#[test]
fn catalyst_weight_survives_small_perturbations() {
    let s = SolverSettings::default();
    let l = 2;
    for seed in 0..3u64 {
        let n = random_channel([2, 1, 1, 1], 40 + seed).unwrap();
        let exact = n.tensor(&swap_channel(l).unwrap());
        let (p, _) = catalyst_component(&exact, l).unwrap();
        assert!((p - 1.0).abs() <= 1e-9, "seed {seed}: exact weight {p}");
        for t in [0.02, 0.1, 0.3] {
            let noise = random_channel(exact.dims(), 50 + seed).unwrap();
            let m = exact.mix(&noise, 1.0 - t).unwrap();
            let eps = diamond_distance(&m, &exact, &s).unwrap().value.as_f64();
            let (p, _) = catalyst_component(&m, l).unwrap();
            assert!(p >= 1.0 - 2.0 * eps - 1e-9, "seed {seed}, t {t}: weight {p}, eps {eps}");
        }
    }
}

#[test]
fn pre_post_realization_matches_measure_and_prepare() {
    let (_, dilution, k) = dilution_for(20);
    let psi = random_input_state([2; 4], 3, 21);
    let distill = distillation_superchannel(&psi, &random_effect(12, 22), 2, [2; 4]).unwrap();
    for (theta, dim) in [(dilution, k), (distill, 2)] {
        let pp = theta.to_pre_post().unwrap();
        for seed in 0..5 {
            let e = random_channel([dim; 4], 300 + seed).unwrap();
            let diff = max_abs(&(theta.apply(&e).unwrap().choi() - pp.apply(&e).unwrap().choi()));
            assert!(diff <= 1e-9, "seed {seed}: {diff}");
        }
    }
}
