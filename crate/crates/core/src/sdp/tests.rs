use proptest::prelude::*;

use super::*;
use crate::linalg::{eigenvalues, partial_transpose};

fn unit(n: usize, i: usize, j: usize) -> SparseHermitian {
    SparseHermitian::symmetric_unit(n, i, j, c(if i == j { 1.0 } else { 0.5 }, 0.0))
}

fn min_trace_problem() -> HermitianSdp {
    let mut p = HermitianSdp::new(Sense::Minimize);
    let x = p.add_block("X", 2);
    p.set_objective(x, SparseHermitian::identity(2));
    p.add_constraint(vec![(x, unit(2, 0, 0))], 1.0);
    p
}

fn max_expectation_problem() -> HermitianSdp {
    let mut p = HermitianSdp::new(Sense::Maximize);
    let r = p.add_block("rho", 2);
    p.set_objective(r, SparseHermitian::from_triplets(2, vec![(0, 0, c(1.0, 0.0)), (1, 1, c(-1.0, 0.0))]));
    p.add_constraint(vec![(r, SparseHermitian::identity(2))], 1.0);
    p
}

/// max tr(Phi sigma) over PPT two-qubit density operators, written with an
/// explicit second block for the partial transpose.
fn ppt_overlap_problem() -> HermitianSdp {
    let mut p = HermitianSdp::new(Sense::Maximize);
    let s = p.add_block("sigma", 4);
    let t = p.add_block("sigma_pt", 4);
    let v = crate::linalg::max_entangled_vector(2);
    let phi = crate::linalg::outer(&v, &v) * c(0.5, 0.0);
    p.set_objective(s, SparseHermitian::from_dense(&phi));
    p.add_constraint(vec![(s, SparseHermitian::identity(4))], 1.0);
    // sigma^{T_B} - tau = 0, imposed against a Hermitian basis.
    for i in 0..4 {
        for j in i..4 {
            for (re, im) in [(1.0, 0.0), (0.0, 1.0)] {
                if i == j && im != 0.0 {
                    continue;
                }
                let h = SparseHermitian::symmetric_unit(4, i, j, c(re, im));
                let hpt = SparseHermitian::from_dense(&partial_transpose(&h.to_dense(), &[2, 2], &[1]).unwrap());
                p.add_constraint(vec![(s, hpt), (t, h.scale(-1.0))], 0.0);
            }
        }
    }
    p
}

#[test]
fn min_trace_with_fixed_corner() {
    let p = min_trace_problem();
    let sol = solve_default(&p).unwrap();
    assert_eq!(sol.status, SdpStatus::Optimal);
    assert!((sol.value - 1.0).abs() < 1e-6);
    assert!((sol.dual_value(&p) - 1.0).abs() < 1e-6);
    assert!(verify(&p, &sol, 1e-6).unwrap().ok());
}

#[test]
fn max_expectation_of_pauli_z() {
    let p = max_expectation_problem();
    let sol = solve_default(&p).unwrap();
    assert_eq!(sol.status, SdpStatus::Optimal);
    assert!((sol.value - 1.0).abs() < 1e-6);
    assert!((sol.primal[0][(0, 0)].re - 1.0).abs() < 1e-5);
}

#[test]
fn ppt_overlap_with_max_entangled_is_half() {
    let p = ppt_overlap_problem();
    let sol = solve_default(&p).unwrap();
    assert_eq!(sol.status, SdpStatus::Optimal);
    assert!((sol.value - 0.5).abs() < 1e-6, "value {}", sol.value);
}

#[test]
fn detects_infeasible_and_unbounded() {
    let mut p = HermitianSdp::new(Sense::Minimize);
    let x = p.add_block("X", 2);
    p.add_constraint(vec![(x, SparseHermitian::identity(2))], -1.0);
    assert_eq!(solve_default(&p).unwrap().status, SdpStatus::Infeasible);

    let mut q = HermitianSdp::new(Sense::Minimize);
    let x = q.add_block("X", 2);
    q.set_objective(x, unit(2, 0, 0).scale(-1.0));
    q.add_constraint(vec![(x, unit(2, 0, 1))], 0.0);
    assert_eq!(solve_default(&q).unwrap().status, SdpStatus::Unbounded);
}

#[test]
fn rejects_structurally_invalid_problems() {
    let mut p = HermitianSdp::new(Sense::Minimize);
    let x = p.add_block("X", 2);
    p.add_constraint(vec![(x, SparseHermitian::identity(3))], 1.0);
    assert!(matches!(solve_default(&p), Err(Error::Dimension(_))));

    let mut q = HermitianSdp::new(Sense::Minimize);
    let x = q.add_block("X", 2);
    q.add_constraint(vec![(x, SparseHermitian::from_triplets(2, vec![(0, 1, c(1.0, 0.0))]))], 1.0);
    assert!(matches!(solve_default(&q), Err(Error::NotHermitian(_))));

    let mut r = HermitianSdp::new(Sense::Minimize);
    let x = r.add_block("X", 2);
    r.add_constraint(vec![(x, SparseHermitian::zero(2))], 1.0);
    assert!(matches!(solve_default(&r), Err(Error::Invalid(_))));
}

#[test]
fn verify_flags_corruption() {
    let tol = DEFAULT_TOL;
    for p in [min_trace_problem(), max_expectation_problem()] {
        let sol = solve(&p, 1e-9, 200).unwrap();
        assert!(verify(&p, &sol, tol).unwrap().ok());

        let mut bad = sol.clone();
        bad.primal[0][(0, 0)] += c(0.1, 0.0);
        assert!(!verify(&p, &bad, tol).unwrap().primal_ok);

        let mut shifted = sol.clone();
        shifted.value += 10.0 * tol;
        assert!(!verify(&p, &shifted, tol).unwrap().gap_ok);
    }
}

#[test]
fn dump_round_trips() {
    for p in [min_trace_problem(), max_expectation_problem(), ppt_overlap_problem()] {
        let text = dump(&p);
        assert_eq!(parse_dump(&text).unwrap(), p);
    }
    assert!(parse_dump("chanent-sdp 2\n").is_err());
}

#[test]
fn solve_is_deterministic() {
    let p = ppt_overlap_problem();
    let a = solve_default(&p).unwrap();
    let b = solve_default(&p).unwrap();
    assert_eq!(a, b);
}

fn hermitian_from(vals: &[f64], n: usize) -> crate::linalg::ComplexMatrix {
    let mut m = crate::linalg::zeros(n, n);
    let mut k = 0;
    for i in 0..n {
        for j in i..n {
            if i == j {
                m[(i, i)] = c(vals[k], 0.0);
                k += 1;
            } else {
                m[(i, j)] = c(vals[k], vals[k + 1]);
                m[(j, i)] = c(vals[k], -vals[k + 1]);
                k += 2;
            }
        }
    }
    m
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    /// min <C, rho> over density operators is the smallest eigenvalue of C.
    #[test]
    fn min_expectation_matches_eigenvalue(vals in prop::collection::vec(-1.0f64..1.0, 9)) {
        let cm = hermitian_from(&vals, 3);
        let mut p = HermitianSdp::new(Sense::Minimize);
        let x = p.add_block("rho", 3);
        p.set_objective(x, SparseHermitian::from_dense(&cm));
        p.add_constraint(vec![(x, SparseHermitian::identity(3))], 1.0);
        let sol = solve_default(&p).unwrap();
        prop_assert_eq!(sol.status, SdpStatus::Optimal);
        prop_assert!((sol.value - eigenvalues(&cm)[0]).abs() < 1e-6);
        // Weak duality.
        prop_assert!(sol.dual_value(&p) <= sol.value + 1e-8);
    }
}
