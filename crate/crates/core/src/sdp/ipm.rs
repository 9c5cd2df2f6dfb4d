//! Homogeneous self-dual interior point method for real block SDPs.
//!
//! Standard form `min <C,X> s.t. A(X) = b, X >= 0` with dual
//! `max b^T y s.t. C - A^*(y) = S >= 0`. The embedding variables are
//! `(X, y, S, tau, kappa)`; directions use Nesterov-Todd scaling and a
//! Mehrotra predictor-corrector. The Schur complement is factored with
//! faer's dense Cholesky.

use faer::linalg::solvers::Solve;
use nalgebra::{DMatrix, DVector};

use super::{residuals, HermitianSdp, Residuals, SdpSolution, SdpStatus, Sense};
use crate::error::Result;
use crate::linalg::{c, ComplexMatrix};

type Entries = Vec<(u32, u32, f64)>;

struct RealSdp {
    dims: Vec<usize>,
    c: Vec<DMatrix<f64>>,
    /// Per block: `(constraint index, entries)` sorted by constraint.
    a_by_block: Vec<Vec<(usize, Entries)>>,
    b: Vec<f64>,
}

impl RealSdp {
    fn m(&self) -> usize {
        self.b.len()
    }

    fn apply_a(&self, x: &[DMatrix<f64>]) -> Vec<f64> {
        let mut out = vec![0.0; self.m()];
        for (blk, list) in self.a_by_block.iter().enumerate() {
            let xb = &x[blk];
            for (i, ents) in list {
                out[*i] += ents.iter().map(|&(p, q, v)| v * xb[(p as usize, q as usize)]).sum::<f64>();
            }
        }
        out
    }

    fn apply_at(&self, y: &[f64]) -> Vec<DMatrix<f64>> {
        let mut out: Vec<DMatrix<f64>> = self.dims.iter().map(|&n| DMatrix::zeros(n, n)).collect();
        for (blk, list) in self.a_by_block.iter().enumerate() {
            for (i, ents) in list {
                let yi = y[*i];
                if yi != 0.0 {
                    for &(p, q, v) in ents {
                        out[blk][(p as usize, q as usize)] += v * yi;
                    }
                }
            }
        }
        out
    }
}

fn inner(a: &[DMatrix<f64>], b: &[DMatrix<f64>]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x.dot(y)).sum()
}

fn norm(a: &[DMatrix<f64>]) -> f64 {
    a.iter().map(|x| x.norm_squared()).sum::<f64>().sqrt()
}

fn vnorm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn sym(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

/// Per-block Nesterov-Todd scaling data.
struct Scaling {
    g: DMatrix<f64>,
    ginv: DMatrix<f64>,
    w: DMatrix<f64>,
    lambda: DVector<f64>,
}

fn nt_scaling(x: &DMatrix<f64>, s: &DMatrix<f64>) -> Option<Scaling> {
    let n = x.nrows();
    let lx = nalgebra::Cholesky::new(sym(x))?.l();
    let ls = nalgebra::Cholesky::new(sym(s))?.l();
    let prod = ls.transpose() * &lx;
    let svd = prod.svd(true, true);
    let u_t = svd.v_t?;
    let v = u_t.transpose();
    let d = svd.singular_values;
    if d.iter().any(|&x| !(x > 0.0) || !x.is_finite()) {
        return None;
    }
    let mut vd = &lx * &v;
    for j in 0..n {
        let f = 1.0 / d[j].sqrt();
        vd.column_mut(j).scale_mut(f);
    }
    let g = vd;
    let lx_inv = lx.solve_lower_triangular(&DMatrix::identity(n, n))?;
    let mut ginv = v.transpose() * lx_inv;
    for i in 0..n {
        let f = d[i].sqrt();
        ginv.row_mut(i).scale_mut(f);
    }
    let w = sym(&(&g * g.transpose()));
    Some(Scaling { g, ginv, w, lambda: d })
}

/// Largest `alpha` with `diag(lambda) + alpha * d >= 0` (capped at `cap`).
fn max_step(lambda: &DVector<f64>, d: &DMatrix<f64>, cap: f64) -> f64 {
    let n = lambda.len();
    let m = DMatrix::from_fn(n, n, |i, j| d[(i, j)] / (lambda[i] * lambda[j]).sqrt());
    let min = sym(&m).symmetric_eigenvalues().min();
    if min < 0.0 {
        (-1.0 / min).min(cap)
    } else {
        cap
    }
}

struct Iterate {
    x: Vec<DMatrix<f64>>,
    y: Vec<f64>,
    s: Vec<DMatrix<f64>>,
    tau: f64,
    kappa: f64,
}

struct Direction {
    dx: Vec<DMatrix<f64>>,
    dy: Vec<f64>,
    ds: Vec<DMatrix<f64>>,
    dtau: f64,
    dkappa: f64,
}

enum RealStatus {
    Optimal,
    PrimalInfeasible,
    DualInfeasible,
    MaxIter,
}

struct RealResult {
    status: RealStatus,
    x: Vec<DMatrix<f64>>,
    y: Vec<f64>,
    iterations: usize,
}

fn schur(p: &RealSdp, sc: &[Scaling]) -> faer::Mat<f64> {
    let m = p.m();
    let mut buf = vec![0.0f64; m * m];
    for (blk, list) in p.a_by_block.iter().enumerate() {
        let w = &sc[blk].w;
        let n = w.nrows();
        let mut t = DMatrix::<f64>::zeros(n, n);
        for (jpos, (j, ents_j)) in list.iter().enumerate() {
            t.fill(0.0);
            for &(p_, q_, v) in ents_j {
                t.ger(v, &w.column(p_ as usize), &w.column(q_ as usize), 1.0);
            }
            for (i, ents_i) in &list[jpos..] {
                let val: f64 = ents_i.iter().map(|&(p_, q_, v)| v * t[(p_ as usize, q_ as usize)]).sum();
                buf[*j * m + *i] += val;
            }
        }
    }
    faer::Mat::from_fn(m, m, |i, j| if i >= j { buf[j * m + i] } else { buf[i * m + j] })
}

struct Factor {
    llt: Option<faer::linalg::solvers::Llt<f64>>,
}

impl Factor {
    fn new(mut mat: faer::Mat<f64>) -> Option<Factor> {
        let m = mat.nrows();
        if m == 0 {
            return Some(Factor { llt: None });
        }
        let scale = (0..m).map(|i| mat[(i, i)].abs()).fold(0.0, f64::max).max(1e-300);
        let mut reg = 0.0;
        for _ in 0..8 {
            if let Ok(llt) = mat.llt(faer::Side::Lower) {
                return Some(Factor { llt: Some(llt) });
            }
            let next = if reg == 0.0 { 1e-14 * scale } else { reg * 100.0 };
            for i in 0..m {
                mat[(i, i)] += next - reg;
            }
            reg = next;
        }
        None
    }

    fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let Some(llt) = &self.llt else { return Vec::new() };
        let b = faer::Mat::from_fn(rhs.len(), 1, |i, _| rhs[i]);
        let x = llt.solve(&b);
        (0..rhs.len()).map(|i| x[(i, 0)]).collect()
    }
}

struct Newton<'a> {
    p: &'a RealSdp,
    sc: &'a [Scaling],
    factor: Factor,
    q: Vec<f64>,
    b_minus_u: Vec<f64>,
    c_w: f64,
}

impl<'a> Newton<'a> {
    fn new(p: &'a RealSdp, sc: &'a [Scaling]) -> Option<Self> {
        let factor = Factor::new(schur(p, sc))?;
        let wcw: Vec<DMatrix<f64>> = sc.iter().zip(&p.c).map(|(s, cb)| &s.w * cb * &s.w).collect();
        let u = p.apply_a(&wcw);
        let c_w = inner(&p.c, &wcw);
        let rhs: Vec<f64> = u.iter().zip(&p.b).map(|(a, b)| a + b).collect();
        let q = factor.solve(&rhs);
        let b_minus_u = p.b.iter().zip(&u).map(|(b, u)| b - u).collect();
        Some(Newton { p, sc, factor, q, b_minus_u, c_w })
    }

    #[allow(clippy::too_many_arguments)]
    fn direction(
        &self,
        it: &Iterate,
        eta: f64,
        rp: &[f64],
        rd: &[DMatrix<f64>],
        rg: f64,
        rc: &[DMatrix<f64>],
        rtau: f64,
    ) -> Direction {
        let p = self.p;
        let inner_term: Vec<DMatrix<f64>> = rc
            .iter()
            .zip(rd)
            .zip(self.sc)
            .map(|((r, d), s)| r - (&s.w * d * &s.w) * eta)
            .collect();
        let a_inner = p.apply_a(&inner_term);
        let rhs1: Vec<f64> = rp.iter().zip(&a_inner).map(|(r, a)| eta * r - a).collect();
        let pv = self.factor.solve(&rhs1);
        let num = eta * rg + inner(&p.c, &inner_term) + rtau / it.tau - dot(&self.b_minus_u, &pv);
        let den = dot(&self.b_minus_u, &self.q) + self.c_w + it.kappa / it.tau;
        let dtau = num / den;
        let dy: Vec<f64> = pv.iter().zip(&self.q).map(|(a, b)| a + dtau * b).collect();
        let aty = p.apply_at(&dy);
        let ds: Vec<DMatrix<f64>> =
            rd.iter().zip(&aty).zip(&p.c).map(|((r, a), cb)| sym(&(r * eta - a + cb * dtau))).collect();
        let dx: Vec<DMatrix<f64>> =
            rc.iter().zip(&ds).zip(self.sc).map(|((r, d), s)| sym(&(r - &s.w * d * &s.w))).collect();
        let dkappa = (rtau - it.kappa * dtau) / it.tau;
        Direction { dx, dy, ds, dtau, dkappa }
    }
}

fn step_length(it: &Iterate, sc: &[Scaling], d: &Direction) -> f64 {
    let mut alpha: f64 = 1e30;
    for (s, (dx, ds)) in sc.iter().zip(d.dx.iter().zip(&d.ds)) {
        let dxt = &s.ginv * dx * s.ginv.transpose();
        let dst = s.g.transpose() * ds * &s.g;
        alpha = max_step(&s.lambda, &dxt, alpha);
        alpha = max_step(&s.lambda, &dst, alpha);
    }
    if d.dtau < 0.0 {
        alpha = alpha.min(-it.tau / d.dtau);
    }
    if d.dkappa < 0.0 {
        alpha = alpha.min(-it.kappa / d.dkappa);
    }
    alpha
}

struct Scales {
    row: Vec<f64>,
    beta_b: f64,
    beta_c: f64,
}

fn scale_problem(p: &RealSdp) -> (RealSdp, Scales) {
    let m = p.m();
    let mut rn = vec![0.0f64; m];
    for list in &p.a_by_block {
        for (i, ents) in list {
            rn[*i] += ents.iter().map(|e| e.2 * e.2).sum::<f64>();
        }
    }
    let row: Vec<f64> = rn.iter().map(|&x| if x > 0.0 { x.sqrt() } else { 1.0 }).collect();
    let a_by_block = p
        .a_by_block
        .iter()
        .map(|list| {
            list.iter().map(|(i, ents)| (*i, ents.iter().map(|&(a, b, v)| (a, b, v / row[*i])).collect())).collect()
        })
        .collect();
    let b1: Vec<f64> = p.b.iter().zip(&row).map(|(b, r)| b / r).collect();
    let beta_b = vnorm(&b1).max(1.0);
    let beta_c = norm(&p.c).max(1.0);
    let scaled = RealSdp {
        dims: p.dims.clone(),
        c: p.c.iter().map(|m| m / beta_c).collect(),
        a_by_block,
        b: b1.iter().map(|b| b / beta_b).collect(),
    };
    (scaled, Scales { row, beta_b, beta_c })
}

fn unscale(it: &Iterate, sc: &Scales) -> (Vec<DMatrix<f64>>, Vec<f64>, Vec<DMatrix<f64>>) {
    let x = it.x.iter().map(|m| m * (sc.beta_b / it.tau)).collect();
    let y = it.y.iter().zip(&sc.row).map(|(y, r)| y * sc.beta_c / it.tau / r).collect();
    let s = it.s.iter().map(|m| m * (sc.beta_c / it.tau)).collect();
    (x, y, s)
}

fn real_residuals(p: &RealSdp, x: &[DMatrix<f64>], y: &[f64], s: &[DMatrix<f64>]) -> (f64, f64, f64, f64) {
    let ax = p.apply_a(x);
    let rp: Vec<f64> = ax.iter().zip(&p.b).map(|(a, b)| a - b).collect();
    let pres = vnorm(&rp) / (1.0 + vnorm(&p.b));
    let aty = p.apply_at(y);
    let rd: Vec<DMatrix<f64>> = p.c.iter().zip(&aty).zip(s).map(|((c, a), s)| c - a - s).collect();
    let dres = norm(&rd) / (1.0 + norm(&p.c));
    let pobj = inner(&p.c, x);
    let dobj = dot(&p.b, y);
    let gap = (pobj - dobj).abs() / (1.0 + pobj.abs() + dobj.abs());
    (pres, dres, gap, pobj - dobj)
}

/// Largest allowed `dual - primal` excess on return.
const WEAK_DUALITY_TOL: f64 = 1e-8;

/// Extra iterations spent after the residuals converge while the returned
/// pair still violates weak duality.
const POLISH_ITERS: usize = 10;

fn solve_real(orig: &RealSdp, tol: f64, max_iter: usize) -> RealResult {
    let (p, scales) = scale_problem(orig);
    let nu: f64 = p.dims.iter().sum::<usize>() as f64;
    let mut it = Iterate {
        x: p.dims.iter().map(|&n| DMatrix::identity(n, n)).collect(),
        y: vec![0.0; p.m()],
        s: p.dims.iter().map(|&n| DMatrix::identity(n, n)).collect(),
        tau: 1.0,
        kappa: 1.0,
    };
    let mut best: Option<(f64, Vec<DMatrix<f64>>, Vec<f64>)> = None;
    let mut converged: Option<(f64, Vec<DMatrix<f64>>, Vec<f64>, usize)> = None;
    let mut small_steps = 0;
    let mut iterations = 0;

    for iter in 0..=max_iter {
        iterations = iter;
        let (xu, yu, su) = unscale(&it, &scales);
        let (pres, dres, gap, signed_gap) = real_residuals(orig, &xu, &yu, &su);
        let merit = pres.max(dres).max(gap);
        if best.as_ref().is_none_or(|b| merit < b.0) {
            best = Some((merit, xu.clone(), yu.clone()));
        }
        if merit <= tol {
            if signed_gap >= -WEAK_DUALITY_TOL {
                return RealResult { status: RealStatus::Optimal, x: xu, y: yu, iterations };
            }
            // Converged but slightly dual infeasible: keep iterating for a
            // while, falling back to the best such pair.
            match &converged {
                Some((g, _, _, _)) if *g >= signed_gap => {}
                _ => converged = Some((signed_gap, xu.clone(), yu.clone(), iter)),
            }
            if converged.as_ref().is_some_and(|c| iter >= c.3 + POLISH_ITERS) {
                break;
            }
        }

        // Infeasibility certificates, read off the embedding directly.
        let by = dot(&p.b, &it.y);
        let cx = inner(&p.c, &it.x);
        if it.tau < 1e-2 * it.kappa {
            let aty = p.apply_at(&it.y);
            let ray: Vec<DMatrix<f64>> = aty.iter().zip(&it.s).map(|(a, s)| a + s).collect();
            if by > 0.0 && norm(&ray) <= tol * by {
                return RealResult { status: RealStatus::PrimalInfeasible, x: it.x.clone(), y: it.y.clone(), iterations };
            }
            if cx < 0.0 && vnorm(&p.apply_a(&it.x)) <= tol * (-cx) {
                return RealResult { status: RealStatus::DualInfeasible, x: it.x.clone(), y: it.y.clone(), iterations };
            }
        }
        if iter == max_iter {
            break;
        }

        let sc: Vec<Scaling> = match it.x.iter().zip(&it.s).map(|(x, s)| nt_scaling(x, s)).collect() {
            Some(v) => v,
            None => break,
        };
        let newton = match Newton::new(&p, &sc) {
            Some(n) => n,
            None => break,
        };
        let ax = p.apply_a(&it.x);
        let rp: Vec<f64> = p.b.iter().zip(&ax).map(|(b, a)| b * it.tau - a).collect();
        let aty = p.apply_at(&it.y);
        let rd: Vec<DMatrix<f64>> =
            p.c.iter().zip(&aty).zip(&it.s).map(|((c, a), s)| c * it.tau - a - s).collect();
        let rg = it.kappa - by + cx;
        let mu = (inner(&it.x, &it.s) + it.tau * it.kappa) / (nu + 1.0);

        let rc_aff: Vec<DMatrix<f64>> = it.x.iter().map(|x| -x).collect();
        let aff = newton.direction(&it, 1.0, &rp, &rd, rg, &rc_aff, -it.tau * it.kappa);
        let alpha_aff = step_length(&it, &sc, &aff).min(1.0);
        let mu_aff = {
            let xs: f64 = it
                .x
                .iter()
                .zip(&it.s)
                .zip(aff.dx.iter().zip(&aff.ds))
                .map(|((x, s), (dx, ds))| (x + dx * alpha_aff).dot(&(s + ds * alpha_aff)))
                .sum();
            (xs + (it.tau + alpha_aff * aff.dtau) * (it.kappa + alpha_aff * aff.dkappa)) / (nu + 1.0)
        };
        let sigma = (mu_aff / mu).clamp(0.0, 1.0).powi(3);

        let rc: Vec<DMatrix<f64>> = sc
            .iter()
            .zip(aff.dx.iter().zip(&aff.ds))
            .map(|(s, (dx, ds))| {
                let n = s.lambda.len();
                let dxt = &s.ginv * dx * s.ginv.transpose();
                let dst = s.g.transpose() * ds * &s.g;
                let prod = sym(&(&dxt * &dst));
                let r = DMatrix::from_fn(n, n, |i, j| {
                    let target = if i == j { sigma * mu - s.lambda[i] * s.lambda[i] } else { 0.0 };
                    2.0 * (target - prod[(i, j)]) / (s.lambda[i] + s.lambda[j])
                });
                sym(&(&s.g * r * s.g.transpose()))
            })
            .collect();
        let rtau = sigma * mu - it.tau * it.kappa - aff.dtau * aff.dkappa;
        let dir = newton.direction(&it, 1.0 - sigma, &rp, &rd, rg, &rc, rtau);
        let alpha = (0.99 * step_length(&it, &sc, &dir)).min(1.0);
        if alpha < 1e-10 {
            small_steps += 1;
            if small_steps > 3 {
                break;
            }
        }
        for (x, dx) in it.x.iter_mut().zip(&dir.dx) {
            *x = sym(&(&*x + dx * alpha));
        }
        for (s, ds) in it.s.iter_mut().zip(&dir.ds) {
            *s = sym(&(&*s + ds * alpha));
        }
        for (y, dy) in it.y.iter_mut().zip(&dir.dy) {
            *y += alpha * dy;
        }
        it.tau += alpha * dir.dtau;
        it.kappa += alpha * dir.dkappa;

        // Keep the embedding well scaled: the HSDE is homogeneous.
        let size = it.tau.max(it.kappa);
        if !(1e-8..=1e8).contains(&size) {
            let f = 1.0 / size;
            it.x.iter_mut().for_each(|m| *m *= f);
            it.s.iter_mut().for_each(|m| *m *= f);
            it.y.iter_mut().for_each(|v| *v *= f);
            it.tau *= f;
            it.kappa *= f;
        }
    }
    if let Some((_, x, y, _)) = converged {
        return RealResult { status: RealStatus::Optimal, x, y, iterations };
    }
    let (_, x, y) = best.expect("at least one iterate evaluated");
    RealResult { status: RealStatus::MaxIter, x, y, iterations }
}

/// Lower a Hermitian problem to real blocks, solve, and lift back.
pub(super) fn solve_hermitian(problem: &HermitianSdp, tol: f64, max_iter: usize) -> Result<SdpSolution> {
    let real = problem.is_real();
    let sign = match problem.sense {
        Sense::Minimize => 1.0,
        Sense::Maximize => -1.0,
    };
    let dims: Vec<usize> = problem.blocks.iter().map(|b| if real { b.dim } else { 2 * b.dim }).collect();
    let lower = |m: &super::SparseHermitian, n: usize| -> Entries {
        let mut out = Vec::with_capacity(m.nnz() * if real { 1 } else { 4 });
        for &(i, j, v) in m.entries() {
            let (i, j) = (i as u32, j as u32);
            if real {
                out.push((i, j, v.re));
            } else {
                let n = n as u32;
                if v.re != 0.0 {
                    out.push((i, j, 0.5 * v.re));
                    out.push((i + n, j + n, 0.5 * v.re));
                }
                if v.im != 0.0 {
                    out.push((i, j + n, -0.5 * v.im));
                    out.push((i + n, j, 0.5 * v.im));
                }
            }
        }
        out
    };
    let cmats: Vec<DMatrix<f64>> = problem
        .objective
        .iter()
        .zip(&problem.blocks)
        .zip(&dims)
        .map(|((m, b), &rd)| {
            let mut d = DMatrix::zeros(rd, rd);
            for (i, j, v) in lower(m, b.dim) {
                d[(i as usize, j as usize)] += sign * v;
            }
            d
        })
        .collect();
    let mut a_by_block: Vec<Vec<(usize, Entries)>> = vec![Vec::new(); problem.blocks.len()];
    let mut b = Vec::new();
    let mut kept = Vec::new();
    for (k, con) in problem.constraints.iter().enumerate() {
        if con.terms.iter().all(|(_, m)| m.nnz() == 0) {
            continue;
        }
        let idx = b.len();
        kept.push(k);
        b.push(con.rhs);
        for (blk, m) in &con.terms {
            if m.nnz() > 0 {
                a_by_block[*blk].push((idx, lower(m, problem.blocks[*blk].dim)));
            }
        }
    }
    // Merge repeated references to the same block within one constraint.
    for list in a_by_block.iter_mut() {
        let mut merged: Vec<(usize, Entries)> = Vec::with_capacity(list.len());
        for (i, e) in list.drain(..) {
            match merged.last_mut() {
                Some(last) if last.0 == i => last.1.extend(e),
                _ => merged.push((i, e)),
            }
        }
        *list = merged;
    }
    let rp = RealSdp { dims, c: cmats, a_by_block, b };
    let res = solve_real(&rp, tol, max_iter);

    let primal: Vec<ComplexMatrix> = res
        .x
        .iter()
        .zip(&problem.blocks)
        .map(|(x, blk)| {
            let n = blk.dim;
            if real {
                x.map(|v| c(v, 0.0))
            } else {
                ComplexMatrix::from_fn(n, n, |i, j| {
                    c(0.5 * (x[(i, j)] + x[(i + n, j + n)]), 0.5 * (x[(i + n, j)] - x[(i, j + n)]))
                })
            }
        })
        .map(|m| crate::linalg::hermitian_part(&m))
        .collect();
    let mut dual = vec![0.0; problem.constraints.len()];
    for (pos, &k) in kept.iter().enumerate() {
        dual[k] = sign * res.y[pos];
    }
    let (status, value) = match res.status {
        RealStatus::Optimal => (SdpStatus::Optimal, problem.objective_value(&primal)),
        RealStatus::MaxIter => (SdpStatus::MaxIterations, problem.objective_value(&primal)),
        RealStatus::PrimalInfeasible => (SdpStatus::Infeasible, sign * f64::INFINITY),
        RealStatus::DualInfeasible => (SdpStatus::Unbounded, -sign * f64::INFINITY),
    };
    let residuals = if value.is_finite() {
        residuals(problem, &primal, &dual, value)
    } else {
        Residuals { primal: f64::NAN, dual: f64::NAN, gap: f64::NAN }
    };
    Ok(SdpSolution { status, value, primal, dual, residuals, iterations: res.iterations })
}
