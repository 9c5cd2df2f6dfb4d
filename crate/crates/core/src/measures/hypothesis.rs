//! Hypothesis-testing divergences.
//!
//! For a channel `N`, a probe `psi` on `(A0, B0, R)` and an effect `Q` on
//! `(A1, B1, R)`, write `rho_M = (M (x) id)(psi)`. The fixed-input quantity is
//!
//! ```text
//! E_H^eps(N; psi) = -log2 min_Q max_{M PPT} tr(Q rho_M)
//!                   over 0 <= Q <= I with tr(Q rho_N) >= 1 - eps.
//! ```
//!
//! The inner maximum is linear in the Choi matrix `J_M`, `tr(Q rho_M) =
//! tr(G(Q) J_M)`, and is replaced by its dual
//!
//! ```text
//! min tr(Y)/d  s.t.  Y (x) I - G(Q) - R^{T_B} >= 0,  R >= 0,
//! ```
//!
//! so the whole quantity is one SDP. [`eh_fixed_input_dual`] dualizes the
//! other way (over `Q`) and [`max_ppt_acceptance`] evaluates the inner
//! maximum directly; both serve as independent checks.

use nalgebra::DVector;

use super::lmi::{hermitian_basis, tp_family_basis, AffineExpr, Lmi};
use super::robustness::{accept, apply_to_state};
use super::{BoundKind, MeasureReport, ResidualSummary, SolverSettings, Value};
use crate::channel::{apply_choi_to_subsystems, choi_input_state, BipartiteChannel};
use crate::error::{Error, Result};
use crate::linalg::{
    c, eigh, hermitian_part, identity, inner, is_real, spectral_map, support_projector, zeros, ComplexMatrix,
    DensityOperator, C64,
};
use crate::rng;
use crate::sdp::SparseHermitian;

/// Optimal effect and value of the fixed-input hypothesis test.
#[derive(Debug, Clone)]
pub struct EhResult {
    /// `E_H^eps` in bits.
    pub value: Value,
    /// The optimal effect `Q` on `(A1, B1, R)`.
    pub effect: ComplexMatrix,
    /// `tr(Q rho_N)`.
    pub acceptance: f64,
    /// `max_{M PPT} tr(Q rho_M)`.
    pub free_acceptance: f64,
    pub psi: DensityOperator,
    pub report: MeasureReport,
}

fn check_eps(eps: f64) -> Result<()> {
    if !(0.0..1.0).contains(&eps) {
        return Err(Error::Invalid(format!("epsilon {eps} outside [0, 1)")));
    }
    Ok(())
}

/// `D_H^eps(rho || sigma) = -log2 min { tr(Q sigma) : 0 <= Q <= I, tr(Q rho) >= 1 - eps }`.
pub fn hypothesis_testing_divergence(
    rho: &DensityOperator,
    sigma: &DensityOperator,
    eps: f64,
    settings: &SolverSettings,
) -> Result<MeasureReport> {
    check_eps(eps)?;
    if rho.dim() != sigma.dim() {
        return Err(Error::Dimension("states differ in dimension".into()));
    }
    let report = |value, residuals| MeasureReport {
        name: "hypothesis_testing_divergence".into(),
        value,
        bound_kind: BoundKind::Exact,
        epsilon: Some(eps),
        residuals,
    };
    let (vals, vecs) = eigh(sigma.matrix());
    let top = vals.last().copied().unwrap_or(0.0);
    let kernel = spectral_map(&vals, &vecs, |l| if l > 1e-12 * top { 0.0 } else { 1.0 });
    if inner(&kernel, rho.matrix()) >= 1.0 - eps - 1e-12 {
        return Ok(report(Value::Infinite, ResidualSummary::closed_form()));
    }
    if eps == 0.0 {
        // tr(Q rho) = 1 forces Q = I on the support of rho.
        let p = support_projector(rho.matrix(), 1e-12);
        let v = inner(&p, sigma.matrix());
        return Ok(report(Value::Finite(-v.log2()), ResidualSummary::closed_form()));
    }
    let n = rho.dim();
    let real = is_real(rho.matrix()) && is_real(sigma.matrix());
    let mut lmi = Lmi::new();
    let q = lmi.variable(&zeros(n, n), &hermitian_basis(n, real));
    add_effect_blocks(&mut lmi, &q, rho.matrix(), eps);
    let (lin, cst) = q.inner_with(sigma.matrix());
    lmi.add_cost(&lin, cst, 1.0);
    let sol = lmi.solve(settings)?;
    let residuals = accept(&sol, settings, "hypothesis test")?;
    Ok(report(Value::Finite(-sol.value.max(1e-300).log2()), residuals))
}

/// `Q >= 0`, `I - Q >= 0` and `tr(Q rho) >= 1 - eps`.
fn add_effect_blocks(lmi: &mut Lmi, q: &AffineExpr, rho: &ComplexMatrix, eps: f64) {
    let n = q.dim;
    lmi.add_psd("Q", q.clone());
    lmi.add_psd("I-Q", AffineExpr::from_dense(&identity(n)).plus(q, -1.0));
    let (lin, cst) = q.inner_with(rho);
    let mut acc = AffineExpr::from_dense(&(identity(1) * c(cst - (1.0 - eps), 0.0)));
    for (v, w) in lin {
        acc.add_term(v, &SparseHermitian::identity(1), w);
    }
    lmi.add_psd("accept", acc);
}

/// The functional `G(Q)` with `tr(Q (M (x) id)(psi)) = tr(G(Q) J_M)`.
fn effect_functional(q: &AffineExpr, psi: &ComplexMatrix, d_in: usize, d_out: usize, r: usize) -> AffineExpr {
    let d = d_in as f64;
    q.map(d_in * d_out, |row, col, v, out| {
        let (b, s) = (row / r, row % r);
        let (a, rr) = (col / r, col % r);
        for i in 0..d_in {
            for j in 0..d_in {
                let w = psi[(i * r + rr, j * r + s)];
                if w.re != 0.0 || w.im != 0.0 {
                    out.push((j * d_out + b, i * d_out + a, v * w * d));
                }
            }
        }
    })
}

fn probe_split(n: &BipartiteChannel, psi: &DensityOperator) -> Result<usize> {
    let d = psi.dims();
    let dims = n.dims();
    if d.len() < 2 || d[0] != dims[0] || d[1] != dims[1] {
        return Err(Error::Dimension(format!("probe dims {d:?} do not start with ({}, {})", dims[0], dims[1])));
    }
    Ok(psi.dim() / n.d_in())
}

fn output_state(n: &BipartiteChannel, psi: &DensityOperator, r: usize) -> Result<ComplexMatrix> {
    let (out, _) = apply_choi_to_subsystems(n.choi(), n.d_in(), n.d_out(), psi.matrix(), &[n.d_in(), r], &[0])?;
    Ok(hermitian_part(&out))
}

/// `max tr(Q (M (x) id)(psi))` over PPT channels `M` with the given dims,
/// solved directly in `M`.
pub fn max_ppt_acceptance(
    dims: [usize; 4],
    psi: &DensityOperator,
    q: &ComplexMatrix,
    settings: &SolverSettings,
) -> Result<(f64, ResidualSummary)> {
    let (d_in, d_out) = (dims[0] * dims[1], dims[2] * dims[3]);
    let r = psi.dim() / d_in;
    if q.nrows() != d_out * r {
        return Err(Error::Dimension("effect does not act on the output of the probe".into()));
    }
    let g = effect_functional(&AffineExpr::from_dense(q), psi.matrix(), d_in, d_out, r).eval(&[]);
    let real = is_real(&g);
    let n = d_in * d_out;
    let mut lmi = Lmi::new();
    let basis: Vec<_> = tp_family_basis(1, d_in, d_out, real, true).into_iter().map(|mut b| b.remove(0).1).collect();
    let m = lmi.variable(&(identity(n) * c(1.0 / n as f64, 0.0)), &basis);
    lmi.add_psd("M", m.clone());
    lmi.add_psd("M^TB", m.partial_transpose(&dims, &[1, 3]));
    let (lin, cst) = m.inner_with(&hermitian_part(&g));
    lmi.add_cost(&lin, cst, -1.0);
    let sol = lmi.solve(settings)?;
    let residuals = accept(&sol, settings, "PPT acceptance")?;
    Ok((-sol.value, residuals))
}

fn eh_report(name: &str, v: f64, eps: f64, residuals: ResidualSummary, bound_kind: BoundKind) -> MeasureReport {
    MeasureReport {
        name: name.into(),
        value: Value::Finite(-v.max(1e-300).log2()),
        bound_kind,
        epsilon: Some(eps),
        residuals,
    }
}

fn kind_for(n: &BipartiteChannel) -> BoundKind {
    if n.is_certified_separable() {
        BoundKind::Exact
    } else {
        BoundKind::LowerBoundViaPpt
    }
}

/// `E_H^eps(N; psi)` against PPT channels for a fixed probe `psi` on `(A0, B0, R)`.
pub fn eh_fixed_input(n: &BipartiteChannel, psi: &DensityOperator, eps: f64, settings: &SolverSettings) -> Result<EhResult> {
    check_eps(eps)?;
    let r = probe_split(n, psi)?;
    let (d_in, d_out) = (n.d_in(), n.d_out());
    let rho_n = output_state(n, psi, r)?;
    let dims = n.dims();

    if eps == 0.0 {
        // The feasible effects are the support projector plus anything on
        // the kernel of rho_N, which only raises the inner maximum.
        let p = support_projector(&rho_n, 1e-10 * crate::linalg::max_eigenvalue(&rho_n));
        let (v, residuals) = max_ppt_acceptance(dims, psi, &p, settings)?;
        let acceptance = inner(&p, &rho_n);
        return Ok(EhResult {
            value: Value::Finite(-v.max(1e-300).log2()),
            effect: p,
            acceptance,
            free_acceptance: v,
            psi: psi.clone(),
            report: eh_report("eh_fixed_input", v, eps, residuals, kind_for(n)),
        });
    }

    let real = n.is_real() && is_real(psi.matrix());
    let dq = d_out * r;
    let nn = d_in * d_out;
    let mut lmi = Lmi::new();
    let q = lmi.variable(&zeros(dq, dq), &hermitian_basis(dq, real));
    let y = lmi.variable(&zeros(d_in, d_in), &hermitian_basis(d_in, real));
    let rr = lmi.variable(&zeros(nn, nn), &hermitian_basis(nn, real));
    add_effect_blocks(&mut lmi, &q, &rho_n, eps);
    let g = effect_functional(&q, psi.matrix(), d_in, d_out, r);
    let slack = y.kron_identity(d_out).plus(&g, -1.0).plus(&rr.partial_transpose(&dims, &[1, 3]), -1.0);
    lmi.add_psd("Y(x)I - G - R^TB", slack);
    lmi.add_psd("R", rr);
    let (lin, cst) = y.trace();
    lmi.add_cost(&lin, cst, 1.0 / d_in as f64);
    let sol = lmi.solve(settings)?;
    let residuals = accept(&sol, settings, "hypothesis-testing entanglement")?;
    let effect = hermitian_part(&q.eval(&sol.y));
    let v = sol.value;
    Ok(EhResult {
        value: Value::Finite(-v.max(1e-300).log2()),
        acceptance: inner(&effect, &rho_n),
        effect,
        free_acceptance: v,
        psi: psi.clone(),
        report: eh_report("eh_fixed_input", v, eps, residuals, kind_for(n)),
    })
}

/// The same quantity through the opposite dualization:
///
/// ```text
/// max_{M PPT, mu >= 0, Z >= 0} mu (1 - eps) - tr Z  s.t.  rho_M - mu rho_N + Z >= 0.
/// ```
pub fn eh_fixed_input_dual(
    n: &BipartiteChannel,
    psi: &DensityOperator,
    eps: f64,
    settings: &SolverSettings,
) -> Result<MeasureReport> {
    check_eps(eps)?;
    let r = probe_split(n, psi)?;
    let (d_in, d_out) = (n.d_in(), n.d_out());
    let dims = n.dims();
    let rho_n = output_state(n, psi, r)?;
    let real = n.is_real() && is_real(psi.matrix());
    let nn = d_in * d_out;
    let dq = d_out * r;
    let mut lmi = Lmi::new();
    let basis: Vec<_> = tp_family_basis(1, d_in, d_out, real, true).into_iter().map(|mut b| b.remove(0).1).collect();
    let m = lmi.variable(&(identity(nn) * c(1.0 / nn as f64, 0.0)), &basis);
    let mu = lmi.scalar();
    let z = lmi.variable(&zeros(dq, dq), &hermitian_basis(dq, real));
    lmi.add_psd("M", m.clone());
    lmi.add_psd("M^TB", m.partial_transpose(&dims, &[1, 3]));
    lmi.add_psd("Z", z.clone());
    let mut mu_block = AffineExpr::zero(1);
    mu_block.add_term(mu, &SparseHermitian::identity(1), 1.0);
    lmi.add_psd("mu", mu_block);
    let mut main = apply_to_state(&m, d_in, d_out, psi.matrix(), r).plus(&z, 1.0);
    main.add_term(mu, &SparseHermitian::from_dense(&rho_n), -1.0);
    lmi.add_psd("rho_M - mu rho_N + Z", main);
    let (lin, cst) = z.trace();
    lmi.add_cost(&lin, cst, 1.0);
    lmi.add_cost(&[(mu, 1.0 - eps)], 0.0, -1.0);
    let sol = lmi.solve(settings)?;
    let residuals = accept(&sol, settings, "hypothesis-testing entanglement (dual)")?;
    Ok(eh_report("eh_fixed_input_dual", -sol.value, eps, residuals, kind_for(n)))
}

fn normalized_probe(v: &DVector<C64>, dims: &[usize]) -> Result<DensityOperator> {
    DensityOperator::pure(v, dims.to_vec())
}

/// Heuristic outer maximization of `E_H^eps(N; psi)` over pure probes with a
/// reference as large as `A0 B0`: the maximally entangled probe plus
/// `restarts` random probes, each refined by a short random local search.
pub fn eh_maximize(
    n: &BipartiteChannel,
    eps: f64,
    restarts: usize,
    seed: u64,
    settings: &SolverSettings,
) -> Result<EhResult> {
    check_eps(eps)?;
    let dims = n.dims();
    let d = n.d_in();
    let pdims = vec![dims[0], dims[1], d];
    let mut best = eh_fixed_input(n, &choi_input_state(dims), eps, settings)?;
    let mut g = rng::seeded(seed);
    for _ in 0..restarts {
        let mut v = rng::pure_vector(&mut g, d * d);
        let mut cur = eh_fixed_input(n, &normalized_probe(&v, &pdims)?, eps, settings)?;
        let mut step = 0.3;
        for _ in 0..4 {
            let w = &v + rng::pure_vector(&mut g, d * d) * c(step, 0.0);
            let cand = eh_fixed_input(n, &normalized_probe(&w, &pdims)?, eps, settings)?;
            if cand.value.as_f64() > cur.value.as_f64() {
                v = w;
                cur = cand;
            } else {
                step *= 0.5;
            }
        }
        if cur.value.as_f64() > best.value.as_f64() {
            best = cur;
        }
    }
    best.report.name = "eh_maximize".into();
    best.report.bound_kind = BoundKind::Heuristic;
    Ok(best)
}

/// `max tr(Phi_k sigma)` over PPT states `sigma` on `k x k`.
pub fn max_overlap_ppt(k: usize, settings: &SolverSettings) -> Result<f64> {
    if k == 0 {
        return Err(Error::Dimension("k must be positive".into()));
    }
    let n = k * k;
    let phi = crate::channel::maximally_entangled(k)?.into_matrix();
    let mut lmi = Lmi::new();
    let basis: Vec<_> = tp_family_basis(1, 1, n, true, true).into_iter().map(|mut b| b.remove(0).1).collect();
    let sigma = lmi.variable(&(identity(n) * c(1.0 / n as f64, 0.0)), &basis);
    lmi.add_psd("sigma", sigma.clone());
    lmi.add_psd("sigma^TB", sigma.partial_transpose(&[k, k], &[1]));
    let (lin, cst) = sigma.inner_with(&phi);
    lmi.add_cost(&lin, cst, -1.0);
    let sol = lmi.solve(settings)?;
    accept(&sol, settings, "PPT overlap")?;
    Ok(-sol.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{maximally_entangled, random_channel, random_input_state, random_separable_channel, swap_channel};

    fn s() -> SolverSettings {
        SolverSettings::default()
    }

    #[test]
    fn divergence_closed_forms() {
        let phi = maximally_entangled(2).unwrap();
        let mixed = DensityOperator::maximally_mixed(vec![2, 2]);
        let v = hypothesis_testing_divergence(&phi, &mixed, 0.0, &s()).unwrap().value.as_f64();
        assert!((v - 2.0).abs() < 1e-12);
        assert!(hypothesis_testing_divergence(&phi, &phi, 0.0, &s()).unwrap().value.as_f64().abs() < 1e-12);
        let zero = DensityOperator::pure(&DVector::from_vec(vec![c(1.0, 0.0), c(0.0, 0.0)]), vec![2]).unwrap();
        let one = DensityOperator::pure(&DVector::from_vec(vec![c(0.0, 0.0), c(1.0, 0.0)]), vec![2]).unwrap();
        assert!(hypothesis_testing_divergence(&zero, &one, 0.3, &s()).unwrap().value.is_infinite());
        assert!(hypothesis_testing_divergence(&zero, &one, 1.0, &s()).is_err());
        // Q = (1 - eps) Phi is optimal against the maximally mixed state.
        let v = hypothesis_testing_divergence(&phi, &mixed, 0.2, &s()).unwrap().value.as_f64();
        assert!((v - (-(0.8f64 / 4.0).log2())).abs() < 1e-6, "{v}");
    }

    #[test]
    fn swap_with_max_entangled_probe_gives_two_bits() {
        let f = swap_channel(2).unwrap();
        let psi = choi_input_state(f.dims());
        let e = eh_fixed_input(&f, &psi, 0.0, &s()).unwrap();
        assert!((e.value.as_f64() - 2.0).abs() < 1e-6, "{:?}", e.value);
        assert!((max_overlap_ppt(2, &s()).unwrap() - 0.5).abs() < 1e-7);
    }

    #[test]
    fn dualizations_agree_and_direct_inner_check_matches() {
        for seed in 0..3 {
            let n = random_channel([2, 1, 2, 1], seed).unwrap();
            let psi = random_input_state(n.dims(), 2, 100 + seed);
            let eps = 0.1;
            let a = eh_fixed_input(&n, &psi, eps, &s()).unwrap();
            let b = eh_fixed_input_dual(&n, &psi, eps, &s()).unwrap();
            assert!((a.value.as_f64() - b.value.as_f64()).abs() < 1e-5, "{:?} vs {:?}", a.value, b.value);
            let (direct, _) = max_ppt_acceptance(n.dims(), &psi, &a.effect, &s()).unwrap();
            assert!((direct - a.free_acceptance).abs() < 1e-5);
            assert!(a.acceptance >= 1.0 - eps - 1e-6);
        }
    }

    #[test]
    fn free_channels_and_monotonicity_in_eps() {
        let sep = random_separable_channel([2, 1, 2, 1], 3, 2).unwrap();
        let psi = choi_input_state(sep.dims());
        assert!(eh_fixed_input(&sep, &psi, 0.0, &s()).unwrap().value.as_f64().abs() < 1e-6);
        let n = random_channel([2, 1, 2, 1], 8).unwrap();
        let e0 = eh_fixed_input(&n, &psi, 0.0, &s()).unwrap().value.as_f64();
        let e1 = eh_fixed_input(&n, &psi, 0.1, &s()).unwrap().value.as_f64();
        assert!(e1 >= e0 - 1e-6);
    }
}
