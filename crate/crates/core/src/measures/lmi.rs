//! Linear matrix inequalities in real variables, lowered to [`HermitianSdp`].
//!
//! Measures are naturally written as `min c^T y` subject to
//! `F_b0 + sum_i y_i F_bi >= 0` for a few blocks `b`. This is the dual of
//! the standard form handled by [`crate::sdp`]: with `C = F_0`,
//! `A_i = -F_i` and `b = -c` the solver's dual vector is exactly `y`.

use std::collections::BTreeMap;

use crate::error::Result;
use crate::linalg::{c, transposed_part, zeros, ComplexMatrix, C64};
use crate::sdp::{self, HermitianSdp, Residuals, SdpSolution, SdpStatus, Sense, SparseHermitian};

/// Affine Hermitian-matrix-valued function of the LMI variables.
#[derive(Debug, Clone)]
pub(crate) struct AffineExpr {
    pub dim: usize,
    pub constant: SparseHermitian,
    pub terms: BTreeMap<usize, SparseHermitian>,
}

impl AffineExpr {
    pub fn zero(dim: usize) -> Self {
        AffineExpr { dim, constant: SparseHermitian::zero(dim), terms: BTreeMap::new() }
    }

    pub fn constant(m: SparseHermitian) -> Self {
        AffineExpr { dim: m.dim(), constant: m, terms: BTreeMap::new() }
    }

    pub fn from_dense(m: &ComplexMatrix) -> Self {
        Self::constant(SparseHermitian::from_dense(m))
    }

    pub fn add_term(&mut self, var: usize, m: &SparseHermitian, s: f64) {
        let e = self.terms.entry(var).or_insert_with(|| SparseHermitian::zero(m.dim()));
        *e = e.add(m, s);
        if e.nnz() == 0 {
            self.terms.remove(&var);
        }
    }

    /// `self + s * other`.
    pub fn plus(&self, other: &AffineExpr, s: f64) -> AffineExpr {
        assert_eq!(self.dim, other.dim, "affine expressions of different size");
        let mut out = self.clone();
        out.constant = out.constant.add(&other.constant, s);
        for (v, m) in &other.terms {
            out.add_term(*v, m, s);
        }
        out
    }

    pub fn scaled(&self, s: f64) -> AffineExpr {
        AffineExpr {
            dim: self.dim,
            constant: self.constant.scale(s),
            terms: self.terms.iter().map(|(v, m)| (*v, m.scale(s))).collect(),
        }
    }

    /// Apply a linear map given entrywise.
    pub fn map(&self, dim: usize, f: impl Fn(usize, usize, C64, &mut Vec<(usize, usize, C64)>)) -> AffineExpr {
        let mut terms = BTreeMap::new();
        for (v, m) in &self.terms {
            let img = m.map_entries(dim, &f);
            if img.nnz() > 0 {
                terms.insert(*v, img);
            }
        }
        AffineExpr { dim, constant: self.constant.map_entries(dim, &f), terms }
    }

    pub fn partial_transpose(&self, dims: &[usize], systems: &[usize]) -> AffineExpr {
        let part = transposed_part(dims, systems);
        self.map(self.dim, |i, j, v, out| out.push((i - part[i] + part[j], j - part[j] + part[i], v)))
    }

    /// Trace out the second factor of `(d_keep, d_out)`.
    pub fn trace_out(&self, d_keep: usize, d_out: usize) -> AffineExpr {
        self.map(d_keep, |i, j, v, out| {
            if i % d_out == j % d_out {
                out.push((i / d_out, j / d_out, v));
            }
        })
    }

    /// `self (x) I_e`.
    pub fn kron_identity(&self, e: usize) -> AffineExpr {
        self.map(self.dim * e, |i, j, v, out| {
            for k in 0..e {
                out.push((i * e + k, j * e + k, v));
            }
        })
    }

    /// `tr(self)` as `(linear coefficients, constant)`.
    pub fn trace(&self) -> (Vec<(usize, f64)>, f64) {
        (self.terms.iter().map(|(v, m)| (*v, m.trace())).collect(), self.constant.trace())
    }

    /// `<H, self>` for a fixed Hermitian `H`.
    pub fn inner_with(&self, h: &ComplexMatrix) -> (Vec<(usize, f64)>, f64) {
        (self.terms.iter().map(|(v, m)| (*v, m.inner_dense(h))).collect(), self.constant.inner_dense(h))
    }

    pub fn eval(&self, y: &[f64]) -> ComplexMatrix {
        let mut m = self.constant.to_dense();
        for (v, t) in &self.terms {
            for &(i, j, val) in t.entries() {
                m[(i, j)] += val * y[*v];
            }
        }
        m
    }
}

/// `h (x) g` for sparse factors.
pub(crate) fn sparse_kron(h: &SparseHermitian, g: &SparseHermitian) -> SparseHermitian {
    let e = g.dim();
    let mut out = Vec::with_capacity(h.nnz() * g.nnz());
    for &(i, j, a) in h.entries() {
        for &(p, q, b) in g.entries() {
            out.push((i * e + p, j * e + q, a * b));
        }
    }
    SparseHermitian::from_triplets(h.dim() * e, out)
}

/// Basis of Hermitian (or real symmetric) `n x n` matrices.
pub(crate) fn hermitian_basis(n: usize, real: bool) -> Vec<SparseHermitian> {
    let mut b = Vec::new();
    for i in 0..n {
        b.push(SparseHermitian::symmetric_unit(n, i, i, c(1.0, 0.0)));
        for j in i + 1..n {
            b.push(SparseHermitian::symmetric_unit(n, i, j, c(1.0, 0.0)));
            if !real {
                b.push(SparseHermitian::symmetric_unit(n, i, j, c(0.0, 1.0)));
            }
        }
    }
    b
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Tag {
    Identity,
    Real,
    Imag,
}

/// Hermitian basis whose first element is the identity; the other
/// elements are traceless. Tags mark purely imaginary elements.
fn identity_led_basis(n: usize, real: bool) -> Vec<(Tag, SparseHermitian)> {
    let mut b = vec![(Tag::Identity, SparseHermitian::identity(n))];
    b.extend(traceless_basis(n, real));
    b
}

fn traceless_basis(n: usize, real: bool) -> Vec<(Tag, SparseHermitian)> {
    let mut b = Vec::new();
    for i in 0..n.saturating_sub(1) {
        b.push((
            Tag::Real,
            SparseHermitian::from_triplets(n, vec![(i, i, c(1.0, 0.0)), (n - 1, n - 1, c(-1.0, 0.0))]),
        ));
    }
    for i in 0..n {
        for j in i + 1..n {
            b.push((Tag::Real, SparseHermitian::symmetric_unit(n, i, j, c(1.0, 0.0))));
            if !real {
                b.push((Tag::Imag, SparseHermitian::symmetric_unit(n, i, j, c(0.0, 1.0))));
            }
        }
    }
    b
}

/// A basis element of a multi-slot variable: `(slot, matrix)` pairs.
pub(crate) type SlotBasis = Vec<(usize, SparseHermitian)>;

/// Basis for tuples `(X_0, .., X_{s-1})` of Hermitian matrices on
/// `(in, out)` whose summed input marginal `sum_s tr_out X_s` is a multiple
/// of the identity. With `traceless` that multiple is forced to zero.
/// With `real` only real symmetric elements are produced.
pub(crate) fn tp_family_basis(slots: usize, d_in: usize, d_out: usize, real: bool, traceless: bool) -> Vec<SlotBasis> {
    // Products of two imaginary elements are real, so the factors always
    // come from the complex bases and are filtered by parity.
    let in_basis = identity_led_basis(d_in, false);
    let out_traceless = traceless_basis(d_out, false);
    let anchor_out = SparseHermitian::symmetric_unit(d_out, 0, 0, c(1.0, 0.0));
    let mut basis = Vec::new();
    for s in 0..slots {
        for (th, h) in &in_basis {
            for (tg, g) in &out_traceless {
                // Mixed-parity products are Hermitian but not real.
                if real && (*th == Tag::Imag) != (*tg == Tag::Imag) {
                    continue;
                }
                basis.push(vec![(s, sparse_kron(h, g))]);
            }
        }
    }
    // Mass moved between slots keeps the summed marginal fixed.
    for s in 1..slots {
        for (th, h) in &in_basis {
            if real && *th == Tag::Imag {
                continue;
            }
            let m = sparse_kron(h, &anchor_out);
            basis.push(vec![(s, m.clone()), (0, m.scale(-1.0))]);
        }
    }
    if !traceless {
        basis.push(vec![(0, sparse_kron(&SparseHermitian::identity(d_in), &anchor_out))]);
    }
    basis
}

/// Builder for `min c^T y + c0` subject to named LMI blocks.
#[derive(Debug, Clone, Default)]
pub(crate) struct Lmi {
    nvars: usize,
    cost: Vec<f64>,
    cost_constant: f64,
    blocks: Vec<(String, AffineExpr)>,
}

/// Result of solving an [`Lmi`].
#[derive(Debug, Clone)]
pub(crate) struct LmiSolution {
    pub y: Vec<f64>,
    /// `c^T y + c0` at the returned `y`.
    pub value: f64,
    pub status: SdpStatus,
    pub residuals: Residuals,
    /// Multipliers of each block (the standard-form primal).
    pub multipliers: Vec<ComplexMatrix>,
}

impl Lmi {
    pub fn new() -> Self {
        Self::default()
    }

    /// Allocate a Hermitian variable `base + sum_k y_k B_k`.
    pub fn variable(&mut self, base: &ComplexMatrix, basis: &[SparseHermitian]) -> AffineExpr {
        let mut e = AffineExpr::from_dense(base);
        for b in basis {
            e.terms.insert(self.nvars, b.clone());
            self.nvars += 1;
            self.cost.push(0.0);
        }
        e
    }

    /// Allocate a multi-slot variable: one expression per slot.
    pub fn slot_variable(&mut self, bases: &[ComplexMatrix], basis: &[SlotBasis]) -> Vec<AffineExpr> {
        let mut exprs: Vec<AffineExpr> = bases.iter().map(AffineExpr::from_dense).collect();
        for elem in basis {
            let v = self.nvars;
            self.nvars += 1;
            self.cost.push(0.0);
            for (s, m) in elem {
                exprs[*s].add_term(v, m, 1.0);
            }
        }
        exprs
    }

    /// A single unconstrained scalar variable.
    pub fn scalar(&mut self) -> usize {
        self.nvars += 1;
        self.cost.push(0.0);
        self.nvars - 1
    }

    pub fn add_psd(&mut self, name: impl Into<String>, expr: AffineExpr) {
        self.blocks.push((name.into(), expr));
    }

    /// Add `s * (linear, constant)` to the objective.
    pub fn add_cost(&mut self, linear: &[(usize, f64)], constant: f64, s: f64) {
        for &(v, w) in linear {
            self.cost[v] += s * w;
        }
        self.cost_constant += s * constant;
    }

    pub fn to_sdp(&self) -> HermitianSdp {
        let mut p = HermitianSdp::new(Sense::Minimize);
        let mut per_var: Vec<Vec<(usize, SparseHermitian)>> = vec![Vec::new(); self.nvars];
        for (name, e) in &self.blocks {
            let b = p.add_block(name.clone(), e.dim);
            p.set_objective(b, e.constant.clone());
            for (v, m) in &e.terms {
                per_var[*v].push((b, m.scale(-1.0)));
            }
        }
        for (v, terms) in per_var.into_iter().enumerate() {
            p.add_constraint(terms, -self.cost[v]);
        }
        p
    }

    pub fn solve(&self, settings: &super::SolverSettings) -> Result<LmiSolution> {
        let p = self.to_sdp();
        let sol: SdpSolution = sdp::solve(&p, settings.tol, settings.max_iter)?;
        let y = sol.dual.clone();
        let value = self.cost_constant + self.cost.iter().zip(&y).map(|(a, b)| a * b).sum::<f64>();
        Ok(LmiSolution { y, value, status: sol.status, residuals: sol.residuals, multipliers: sol.primal })
    }
}

/// Dense matrix with a single `1` at `(i, j)`.
#[allow(dead_code)]
pub(crate) fn unit_matrix(n: usize, i: usize, j: usize) -> ComplexMatrix {
    let mut m = zeros(n, n);
    m[(i, j)] = c(1.0, 0.0);
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::partial_trace;

    fn rank_of(basis: &[SlotBasis], slots: usize, n: usize) -> usize {
        let rows = slots * n * n * 2;
        let m = nalgebra::DMatrix::<f64>::from_fn(rows, basis.len(), |r, col| {
            let (s, rem) = (r / (2 * n * n), r % (2 * n * n));
            let (k, part) = (rem / 2, rem % 2);
            let (i, j) = (k / n, k % n);
            basis[col]
                .iter()
                .filter(|(sl, _)| *sl == s)
                .map(|(_, mat)| mat.to_dense()[(i, j)])
                .map(|z| if part == 0 { z.re } else { z.im })
                .sum()
        });
        m.rank(1e-9)
    }

    #[test]
    fn tp_family_has_expected_dimension() {
        for (slots, di, dout) in [(1, 2, 2), (1, 3, 2), (4, 2, 2), (4, 1, 1)] {
            let n = di * dout;
            let full = tp_family_basis(slots, di, dout, false, false);
            let expect = slots * n * n - di * di + 1;
            assert_eq!(full.len(), expect);
            assert_eq!(rank_of(&full, slots, n), expect);
            let tl = tp_family_basis(slots, di, dout, false, true);
            assert_eq!(rank_of(&tl, slots, n), expect - 1);
            let real = tp_family_basis(slots, di, dout, true, false);
            assert_eq!(real.len(), slots * n * (n + 1) / 2 - di * (di + 1) / 2 + 1);
            for elem in full.iter().chain(&tl) {
                let mut marg = zeros(di, di);
                for (_, m) in elem {
                    marg += partial_trace(&m.to_dense(), &[di, dout], &[0]).unwrap();
                }
                let off = &marg - crate::linalg::identity(di) * (marg.trace() / c(di as f64, 0.0));
                assert!(off.norm() < 1e-12);
            }
            for elem in &tl {
                let t: f64 = elem.iter().map(|(_, m)| m.trace()).sum();
                assert!(t.abs() < 1e-12);
            }
        }
    }

    #[test]
    fn lmi_min_eigenvalue() {
        // min t s.t. t I - H >= 0 gives the largest eigenvalue of H.
        let h = ComplexMatrix::from_fn(3, 3, |i, j| c((i + j) as f64, i as f64 - j as f64));
        let mut lmi = Lmi::new();
        let t = lmi.scalar();
        let mut e = AffineExpr::from_dense(&(-&h));
        e.add_term(t, &SparseHermitian::identity(3), 1.0);
        lmi.add_psd("t-H", e);
        lmi.add_cost(&[(t, 1.0)], 0.0, 1.0);
        let sol = lmi.solve(&crate::measures::SolverSettings::default()).unwrap();
        assert!((sol.value - crate::linalg::max_eigenvalue(&h)).abs() < 1e-6);
    }
}
