//! Generalized and standard robustness against PPT channels, their
//! logarithms, and smoothed variants.
//!
//! With `X = (1 + r) M` for a PPT channel `M`, both robustness programs are
//!
//! ```text
//! minimize tr X - 1   over X in the trace-preserving cone
//! subject to X - N >= 0, X^{T_B} >= 0,        (generalized)
//!            and additionally (X - N)^{T_B} >= 0  (standard)
//! ```
//!
//! The mixing channel `E = (X - N)/r` is then a channel by construction,
//! and PPT as well for the standard variant.

use serde::{Deserialize, Serialize};

use super::lmi::{hermitian_basis, tp_family_basis, AffineExpr, Lmi, LmiSolution, SlotBasis};
use super::structure::ChoiSpace;
use super::{dmax, BoundKind, MeasureReport, ResidualSummary, SolverSettings, Value};
use crate::channel::BipartiteChannel;
use crate::error::{Error, Result};
use crate::linalg::{c, identity, is_real, zeros, ComplexMatrix, DensityOperator};
use crate::sdp::{SdpStatus, SparseHermitian};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RobustnessKind {
    /// Mixing channel arbitrary.
    Generalized,
    /// Mixing channel PPT as well.
    Standard,
}

/// How the Choi matrix is represented inside the SDP.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Structure {
    /// Full matrix up to Choi dimension 81, then the twirl-reduced form if
    /// the channel is invariant under a catalyst twirl.
    Auto,
    Full,
    /// Twirl-reduced form for a catalyst of size `l`; the channel must be
    /// invariant to within `1e-10`.
    Twirled { l: usize },
}

/// Robustness `r` with the decomposition `N + r E = (1 + r) M`.
#[derive(Debug, Clone)]
pub struct Robustness {
    pub value: f64,
    /// The PPT channel `M = (N + r E)/(1 + r)`.
    pub free: BipartiteChannel,
    /// The mixing channel `E`, absent when `r` vanishes.
    pub mix: Option<BipartiteChannel>,
    pub report: MeasureReport,
}

/// Smoothed log-robustness `min_{N' in ball} log2(1 + R(N'))` with the
/// optimal `N'` and its decomposition.
#[derive(Debug, Clone)]
pub struct Smoothed {
    /// Log-robustness in bits.
    pub value: f64,
    /// Robustness `r` of the optimal channel in the ball.
    pub robustness: f64,
    pub target: BipartiteChannel,
    pub free: BipartiteChannel,
    pub mix: Option<BipartiteChannel>,
    pub report: MeasureReport,
}

/// Constraint set the smoothing channel `N'` ranges over.
enum Ball<'a> {
    Point,
    Diamond(f64),
    Liberal { phi: &'a DensityOperator, eps: f64 },
    /// Diamond ball on the `A B` factor of `N (x) F^L` in the twirled
    /// space; the catalyst block is held fixed.
    Catalyst(f64),
}

pub(crate) fn accept(sol: &LmiSolution, settings: &SolverSettings, what: &str) -> Result<ResidualSummary> {
    let summary = ResidualSummary::from_solver(sol.status, &sol.residuals);
    match sol.status {
        SdpStatus::Optimal => Ok(summary),
        SdpStatus::MaxIterations if sol.residuals.max() <= 100.0 * settings.tol => Ok(summary),
        _ => Err(Error::Solver(format!("{what}: status {:?}, residuals {:?}", sol.status, sol.residuals))),
    }
}

pub(crate) fn choose_space(n: &BipartiteChannel, structure: Structure) -> Result<ChoiSpace> {
    let dims = n.dims();
    match structure {
        Structure::Full => Ok(ChoiSpace::Full { dims }),
        Structure::Twirled { l } => {
            if l < 2 || dims.iter().any(|d| d % l != 0) {
                return Err(Error::Invalid(format!("catalyst size {l} does not divide dims {dims:?}")));
            }
            let space = ChoiSpace::Twirled { ab: dims.map(|d| d / l), l };
            let back = space.compose(&space.decompose(n.choi())?);
            let dev = (back - n.choi()).iter().map(|z| z.norm()).fold(0.0, f64::max);
            if dev > 1e-10 {
                return Err(Error::Invalid(format!("channel is not twirl invariant (deviation {dev:.2e})")));
            }
            Ok(space)
        }
        Structure::Auto => {
            let dim = n.choi().nrows();
            if dim <= 81 {
                return Ok(ChoiSpace::Full { dims });
            }
            if let Some(s) = ChoiSpace::detect_twirled(dims, n.choi(), 1e-10) {
                return Ok(s);
            }
            if dim <= 144 {
                Ok(ChoiSpace::Full { dims })
            } else {
                Err(Error::Invalid(format!(
                    "Choi dimension {dim} is too large for a dense SDP and the channel has no catalyst symmetry"
                )))
            }
        }
    }
}

/// Map `Delta -> (Delta (x) id_R)(phi)` for Choi matrices on `(in, out)`.
pub(crate) fn apply_to_state(m: &AffineExpr, d_in: usize, d_out: usize, phi: &ComplexMatrix, r: usize) -> AffineExpr {
    let scale = d_in as f64;
    m.map(d_out * r, |row, col, v, out| {
        let (i, a) = (row / d_out, row % d_out);
        let (j, b) = (col / d_out, col % d_out);
        for p in 0..r {
            for q in 0..r {
                let w = phi[(i * r + p, j * r + q)];
                if w.re != 0.0 || w.im != 0.0 {
                    out.push((a * r + p, b * r + q, v * w * scale));
                }
            }
        }
    })
}

/// Directions `D` of the traceless TP family with `(D (x) id)(phi) = 0`.
fn liberal_null_basis(dims: [usize; 4], phi: &ComplexMatrix, r: usize, real: bool) -> Vec<SlotBasis> {
    let (d_in, d_out) = (dims[0] * dims[1], dims[2] * dims[3]);
    let space = ChoiSpace::Full { dims };
    let basis = space.tp_basis(real, true);
    let images: Vec<ComplexMatrix> = basis
        .iter()
        .map(|b| {
            let e = AffineExpr::constant(b[0].1.clone());
            apply_to_state(&e, d_in, d_out, phi, r).eval(&[])
        })
        .collect();
    let dd = d_out * r;
    let k = basis.len();
    let rows = (2 * dd * dd).max(k);
    let m = nalgebra::DMatrix::<f64>::from_fn(rows, k, |row, col| {
        if row >= 2 * dd * dd {
            return 0.0;
        }
        let z = images[col][((row / 2) / dd, (row / 2) % dd)];
        if row % 2 == 0 {
            z.re
        } else {
            z.im
        }
    });
    let svd = m.svd(false, true);
    let vt = svd.v_t.expect("requested");
    let smax = svd.singular_values.max().max(1e-300);
    let mut out = Vec::new();
    for (idx, s) in svd.singular_values.iter().enumerate() {
        if *s > 1e-9 * smax {
            continue;
        }
        let mut acc = SparseHermitian::zero(d_in * d_out);
        for (col, b) in basis.iter().enumerate() {
            let w = vt[(idx, col)];
            if w.abs() > 1e-15 {
                acc = acc.add(&b[0].1, w);
            }
        }
        out.push(vec![(0, acc)]);
    }
    out
}

struct Raw {
    x: ComplexMatrix,
    nprime: ComplexMatrix,
    value: f64,
    summary: ResidualSummary,
}

fn solve_lr(n: &BipartiteChannel, kind: RobustnessKind, ball: Ball, space: ChoiSpace, settings: &SolverSettings) -> Result<Raw> {
    let real = n.is_real()
        && match &ball {
            Ball::Liberal { phi, .. } => is_real(phi.matrix()),
            _ => true,
        };
    let nparts = space.decompose(n.choi())?;
    let slots = space.slots();
    let bdim = nparts[0].nrows();
    let mut lmi = Lmi::new();
    let zero_bases: Vec<ComplexMatrix> = (0..slots).map(|_| zeros(bdim, bdim)).collect();
    let x = lmi.slot_variable(&zero_bases, &space.tp_basis(real, false));

    let point: Vec<AffineExpr> = nparts.iter().map(AffineExpr::from_dense).collect();
    let nprime: Vec<AffineExpr> = match &ball {
        Ball::Point | Ball::Diamond(0.0) | Ball::Catalyst(0.0) => point.clone(),
        Ball::Catalyst(_) => {
            if !matches!(space, ChoiSpace::Twirled { .. }) {
                return Err(Error::Invalid("catalyst smoothing needs the twirled Choi space".into()));
            }
            let bd = space.block_dims();
            lmi.slot_variable(&nparts, &tp_family_basis(1, bd[0] * bd[1], bd[2] * bd[3], real, true))
        }
        Ball::Diamond(_) => lmi.slot_variable(&nparts, &space.tp_basis(real, true)),
        Ball::Liberal { phi, eps } => {
            if !matches!(space, ChoiSpace::Full { .. }) {
                return Err(Error::Invalid("liberal smoothing needs the full Choi space".into()));
            }
            let r = phi.dim() / n.d_in();
            if *eps == 0.0 {
                let basis = liberal_null_basis(n.dims(), phi.matrix(), r, real);
                lmi.slot_variable(&nparts, &basis)
            } else {
                lmi.slot_variable(&nparts, &space.tp_basis(real, true))
            }
        }
    };
    for s in 0..slots {
        lmi.add_psd(format!("X-N[{s}]"), x[s].plus(&nprime[s], -1.0));
        if !nprime[s].terms.is_empty() {
            lmi.add_psd(format!("N'[{s}]"), nprime[s].clone());
        }
    }
    for (k, b) in space.ppt_blocks(&x).into_iter().enumerate() {
        lmi.add_psd(format!("X^TB[{k}]"), b);
    }
    if kind == RobustnessKind::Standard {
        let diff: Vec<AffineExpr> = x.iter().zip(&nprime).map(|(a, b)| a.plus(b, -1.0)).collect();
        for (k, b) in space.ppt_blocks(&diff).into_iter().enumerate() {
            lmi.add_psd(format!("(X-N)^TB[{k}]"), b);
        }
    }
    match &ball {
        Ball::Diamond(eps) if *eps > 0.0 => {
            let herm = hermitian_basis(bdim, real);
            let zb: Vec<SlotBasis> =
                (0..slots).flat_map(|s| herm.iter().map(move |m| vec![(s, m.clone())])).collect();
            let z = lmi.slot_variable(&zero_bases, &zb);
            let din = space.full_in_dim() as f64;
            for s in 0..slots {
                lmi.add_psd(format!("Z[{s}]"), z[s].clone());
                let delta = nprime[s].plus(&point[s], -1.0);
                lmi.add_psd(format!("Z-dN[{s}]"), z[s].plus(&delta, -din));
            }
            let marg = space.marginal(&z);
            let cap = AffineExpr::from_dense(&(identity(marg.dim) * c(eps * space.marginal_scale(), 0.0)));
            lmi.add_psd("ball", cap.plus(&marg, -1.0));
        }
        Ball::Catalyst(eps) if *eps > 0.0 => {
            let bd = space.block_dims();
            let z = lmi.variable(&zeros(bdim, bdim), &hermitian_basis(bdim, real));
            lmi.add_psd("Z", z.clone());
            lmi.add_psd("Z-dN", z.plus(&nprime[0].plus(&point[0], -1.0), -((bd[0] * bd[1]) as f64)));
            let marg = z.trace_out(bd[0] * bd[1], bd[2] * bd[3]);
            let cap = AffineExpr::from_dense(&(identity(marg.dim) * c(*eps, 0.0)));
            lmi.add_psd("ball", cap.plus(&marg, -1.0));
        }
        Ball::Liberal { phi, eps } if *eps > 0.0 => {
            let dims = n.dims();
            let (d_in, d_out) = (dims[0] * dims[1], dims[2] * dims[3]);
            let r = phi.dim() / d_in;
            let p = lmi.variable(&zeros(d_out * r, d_out * r), &hermitian_basis(d_out * r, real));
            let delta = nprime[0].plus(&point[0], -1.0);
            let image = apply_to_state(&delta, d_in, d_out, phi.matrix(), r);
            lmi.add_psd("P", p.clone());
            lmi.add_psd("P-image", p.plus(&image, -1.0));
            let (lin, cst) = p.trace();
            let mut budget = AffineExpr::from_dense(&(identity(1) * c(*eps - cst, 0.0)));
            for (v, w) in lin {
                budget.add_term(v, &SparseHermitian::identity(1), -w);
            }
            lmi.add_psd("budget", budget);
        }
        _ => {}
    }
    for e in &x {
        let (lin, cst) = e.trace();
        lmi.add_cost(&lin, cst, 1.0);
    }
    let sol = lmi.solve(settings)?;
    let summary = accept(&sol, settings, "robustness")?;
    let xparts: Vec<ComplexMatrix> = x.iter().map(|e| e.eval(&sol.y)).collect();
    let nparts_opt: Vec<ComplexMatrix> = nprime.iter().map(|e| e.eval(&sol.y)).collect();
    Ok(Raw { x: space.compose(&xparts), nprime: space.compose(&nparts_opt), value: sol.value, summary })
}

struct Decomposition {
    r: f64,
    target: BipartiteChannel,
    free: BipartiteChannel,
    mix: Option<BipartiteChannel>,
}

fn decompose(raw: &Raw, n: &BipartiteChannel, fixed_target: bool) -> Result<Decomposition> {
    let dims = n.dims();
    let r = (raw.value - 1.0).max(0.0);
    let defect = 1e-6;
    let target = if fixed_target { n.clone() } else { BipartiteChannel::from_choi_repaired(&raw.nprime, dims, defect)? };
    let free = BipartiteChannel::from_choi_repaired(&(&raw.x * c(1.0 / (1.0 + r), 0.0)), dims, defect)?;
    let mix = if r > 1e-7 {
        let e = (&raw.x - &raw.nprime) * c(1.0 / r, 0.0);
        Some(BipartiteChannel::from_choi_repaired(&e, dims, defect / r.min(1.0))?)
    } else {
        None
    };
    Ok(Decomposition { r, target, free, mix })
}

fn kind_bound(n: &BipartiteChannel) -> BoundKind {
    if n.is_certified_separable() {
        BoundKind::Exact
    } else {
        BoundKind::LowerBoundViaPpt
    }
}

/// Robustness of `n` of the given kind, with an explicit structure choice.
pub fn robustness_with(
    n: &BipartiteChannel,
    kind: RobustnessKind,
    structure: Structure,
    settings: &SolverSettings,
) -> Result<Robustness> {
    let space = choose_space(n, structure)?;
    let raw = solve_lr(n, kind, Ball::Point, space, settings)?;
    let d = decompose(&raw, n, true)?;
    let name = match kind {
        RobustnessKind::Generalized => "generalized_robustness",
        RobustnessKind::Standard => "standard_robustness",
    };
    let report = MeasureReport {
        name: name.into(),
        value: Value::Finite(d.r),
        bound_kind: kind_bound(n),
        epsilon: None,
        residuals: raw.summary,
    };
    Ok(Robustness { value: d.r, free: d.free, mix: d.mix, report })
}

/// Generalized robustness `R(N)` against PPT channels.
pub fn generalized_robustness(n: &BipartiteChannel, settings: &SolverSettings) -> Result<Robustness> {
    robustness_with(n, RobustnessKind::Generalized, Structure::Auto, settings)
}

/// Standard robustness `R_s(N)`: the mixing channel must be PPT too.
pub fn standard_robustness(n: &BipartiteChannel, settings: &SolverSettings) -> Result<Robustness> {
    robustness_with(n, RobustnessKind::Standard, Structure::Auto, settings)
}

/// `log2(1 + R(N))` in bits, generalized robustness.
pub fn log_robustness(n: &BipartiteChannel, settings: &SolverSettings) -> Result<MeasureReport> {
    let r = generalized_robustness(n, settings)?;
    Ok(MeasureReport {
        name: "log_robustness".into(),
        value: Value::Finite((1.0 + r.value).log2()),
        ..r.report
    })
}

fn smoothed(
    n: &BipartiteChannel,
    kind: RobustnessKind,
    ball: Ball,
    eps: f64,
    structure: Structure,
    settings: &SolverSettings,
    name: &str,
) -> Result<Smoothed> {
    if !(0.0..1.0).contains(&eps) {
        return Err(Error::Invalid(format!("smoothing parameter {eps} outside [0, 1)")));
    }
    let space = choose_space(n, structure)?;
    let fixed = matches!(ball, Ball::Point);
    let raw = solve_lr(n, kind, ball, space, settings)?;
    let d = decompose(&raw, n, fixed)?;
    let value = (1.0 + d.r).log2();
    let report = MeasureReport {
        name: name.into(),
        value: Value::Finite(value),
        bound_kind: kind_bound(n),
        epsilon: Some(eps),
        residuals: raw.summary,
    };
    Ok(Smoothed { value, robustness: d.r, target: d.target, free: d.free, mix: d.mix, report })
}

/// `min log2(1 + R(N'))` over channels with `(1/2)||N' - N||_diamond <= eps`.
/// At `eps = 0` the ball is the single point `N`.
pub fn smoothed_log_robustness(
    n: &BipartiteChannel,
    eps: f64,
    kind: RobustnessKind,
    structure: Structure,
    settings: &SolverSettings,
) -> Result<Smoothed> {
    let ball = if eps == 0.0 { Ball::Point } else { Ball::Diamond(eps) };
    let name = match kind {
        RobustnessKind::Generalized => "smoothed_log_robustness",
        RobustnessKind::Standard => "smoothed_standard_log_robustness",
    };
    smoothed(n, kind, ball, eps, structure, settings, name)
}

/// Smoothing over `{N' : (1/2)||(N' - N)(phi)||_1 <= eps}` for a fixed
/// input `phi` on `(A0, B0, R)`.
pub fn liberal_smoothed_log_robustness(
    n: &BipartiteChannel,
    phi: &DensityOperator,
    eps: f64,
    kind: RobustnessKind,
    settings: &SolverSettings,
) -> Result<Smoothed> {
    let d = phi.dims();
    if d.len() < 2 || d[0] != n.dims()[0] || d[1] != n.dims()[1] {
        return Err(Error::Dimension("probe state must live on (A0, B0, R)".into()));
    }
    smoothed(n, kind, Ball::Liberal { phi, eps }, eps, Structure::Full, settings, "liberal_smoothed_log_robustness")
}

/// `min log2(1 + R(N' (x) F^L))` over channels `N'` with
/// `(1/2)||N' - N||_diamond <= eps`, the catalyst `F^L` held fixed and the
/// robustness taken across `A C : B D`. Returns the smoothed quantity for
/// `N' (x) F^L` together with the optimal `N'`.
pub fn catalytic_smoothed_log_robustness(
    n: &BipartiteChannel,
    l: usize,
    eps: f64,
    settings: &SolverSettings,
) -> Result<(Smoothed, BipartiteChannel)> {
    if l < 2 {
        return Err(Error::Invalid(format!("catalyst size must be at least 2, got {l}")));
    }
    let full = n.tensor(&crate::channel::swap_choi(l));
    let out = smoothed(
        &full,
        RobustnessKind::Generalized,
        Ball::Catalyst(eps),
        eps,
        Structure::Twirled { l },
        settings,
        "catalytic_log_robustness",
    )?;
    let block = ChoiSpace::Twirled { ab: n.dims(), l }.decompose(out.target.choi())?.remove(0);
    let nprime = BipartiteChannel::from_choi_repaired(&block, n.dims(), 1e-6)?;
    Ok((out, nprime))
}

/// `log2 min_M 2^{D_max(N || M)}` over PPT channels, by bisection on the
/// max-divergence. An independent route to [`log_robustness`].
pub fn log_robustness_via_dmax(n: &BipartiteChannel, settings: &SolverSettings) -> Result<f64> {
    let dims = n.dims();
    let space = ChoiSpace::Full { dims };
    let dim = n.choi().nrows();
    let real = n.is_real();
    let basis = space.tp_basis(real, true);
    let base = identity(dim) * c(1.0 / dim as f64, 0.0);

    let probe = |lambda: f64| -> Result<(f64, ComplexMatrix)> {
        let mut lmi = Lmi::new();
        let m = lmi.slot_variable(std::slice::from_ref(&base), &basis).remove(0);
        let t = lmi.scalar();
        let mut gap = m.scaled(lambda).plus(&AffineExpr::from_dense(n.choi()), -1.0);
        gap.add_term(t, &SparseHermitian::identity(dim), -1.0);
        lmi.add_psd("lambda M - N - t", gap);
        lmi.add_psd("M", m.clone());
        lmi.add_psd("M^TB", m.partial_transpose(&dims, &[1, 3]));
        lmi.add_cost(&[(t, 1.0)], 0.0, -1.0);
        let sol = lmi.solve(settings)?;
        accept(&sol, settings, "dmax bisection")?;
        Ok((-sol.value, m.eval(&sol.y)))
    };

    let mut lo: f64 = 1.0;
    let mut hi = dim as f64 * crate::linalg::max_eigenvalue(n.choi());
    for _ in 0..80 {
        if hi - lo <= 1e-9 * hi {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let (t, m) = probe(mid)?;
        if t >= 0.0 {
            hi = mid;
            if let Ok(mch) = BipartiteChannel::from_choi_repaired(&m, dims, 1e-6) {
                if let Value::Finite(d) = dmax(n, &mch)? {
                    hi = hi.min(2f64.powf(d));
                }
            }
        } else {
            lo = mid;
        }
    }
    Ok(hi.log2())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{identity_channel, random_channel, random_separable_channel, swap_channel};

    fn s() -> SolverSettings {
        SolverSettings::default()
    }

    #[test]
    fn swap_two_has_robustness_three() {
        let f = swap_channel(2).unwrap();
        let g = generalized_robustness(&f, &s()).unwrap();
        let st = standard_robustness(&f, &s()).unwrap();
        assert!((g.value - 3.0).abs() < 1e-6, "{}", g.value);
        assert!((st.value - 3.0).abs() < 1e-6, "{}", st.value);
        let tw = robustness_with(&f, RobustnessKind::Standard, Structure::Twirled { l: 2 }, &s()).unwrap();
        assert!((tw.value - 3.0).abs() < 1e-6);
        assert!(st.mix.unwrap().is_ppt().ppt);
        assert!(st.free.is_ppt().ppt);
    }

    #[test]
    fn free_channels_have_zero_robustness() {
        let sep = random_separable_channel([2, 2, 2, 2], 7, 3).unwrap();
        assert!(generalized_robustness(&sep, &s()).unwrap().value < 1e-6);
        let id = identity_channel(2, 2).unwrap();
        assert!(standard_robustness(&id, &s()).unwrap().value < 1e-6);
    }

    #[test]
    fn standard_dominates_generalized_and_dmax_route_agrees() {
        for seed in 0..3 {
            let n = random_channel([2, 2, 2, 2], seed).unwrap();
            let g = generalized_robustness(&n, &s()).unwrap().value;
            let st = standard_robustness(&n, &s()).unwrap().value;
            assert!(st >= g - 1e-6);
            let via = log_robustness_via_dmax(&n, &s()).unwrap();
            assert!((via - (1.0 + g).log2()).abs() < 1e-5, "{via} vs {}", (1.0 + g).log2());
        }
    }

    #[test]
    fn smoothing_lowers_log_robustness() {
        let f = swap_channel(2).unwrap();
        let zero = smoothed_log_robustness(&f, 0.0, RobustnessKind::Generalized, Structure::Auto, &s()).unwrap();
        assert!((zero.value - 2.0).abs() < 1e-6);
        let sm = smoothed_log_robustness(&f, 0.1, RobustnessKind::Generalized, Structure::Auto, &s()).unwrap();
        assert!(sm.value < 2.0 - 1e-3);
        let d = crate::measures::diamond_distance(&sm.target, &f, &s()).unwrap();
        assert!(d.value.as_f64() <= 0.1 + 1e-5);
    }

    #[test]
    fn liberal_ball_at_zero_with_full_rank_probe_is_the_point() {
        let n = random_channel([2, 1, 2, 1], 11).unwrap();
        let phi = crate::channel::choi_input_state(n.dims());
        let lib = liberal_smoothed_log_robustness(&n, &phi, 0.0, RobustnessKind::Generalized, &s()).unwrap();
        let lr = log_robustness(&n, &s()).unwrap().value.as_f64();
        assert!((lib.value - lr).abs() < 1e-6);
    }

    #[test]
    fn catalytic_smoothing_of_swap() {
        let f = swap_channel(2).unwrap();
        let (zero, np) = catalytic_smoothed_log_robustness(&f, 2, 0.0, &s()).unwrap();
        assert!((zero.value - 4.0).abs() < 1e-6, "{}", zero.value);
        assert!((np.choi() - f.choi()).norm() < 1e-9);
        let (sm, np) = catalytic_smoothed_log_robustness(&f, 2, 0.1, &s()).unwrap();
        assert!(sm.value < 4.0 - 1e-3);
        let d = crate::measures::diamond_distance(&np, &f, &s()).unwrap();
        assert!(d.value.as_f64() <= 0.1 + 1e-5);
    }
}
