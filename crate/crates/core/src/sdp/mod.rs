//! Semidefinite programs over blocks of Hermitian matrices.
//!
//! A [`HermitianSdp`] is given in standard primal form
//!
//! ```text
//! optimize   sum_b <C_b, X_b> + c0
//! subject to sum_b <A_ib, X_b> = b_i,   X_b >= 0
//! ```
//!
//! with `<A, X> = Re tr(A^dagger X)`. The dual returned in
//! [`SdpSolution::dual`] satisfies `C - sum_i y_i A_i >= 0` for
//! minimization and `sum_i y_i A_i - C >= 0` for maximization, so in both
//! cases the dual objective is `b^T y + c0`.
//!
//! [`solve`] lowers complex blocks to real symmetric blocks of twice the
//! size (blocks whose data are all real are kept real) and runs a
//! homogeneous self-dual interior point method with Nesterov-Todd scaling.
//! [`verify`] recomputes all residuals from scratch without trusting the
//! solver.

mod dump;
mod ipm;

pub use dump::{dump, parse_dump};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{c, eigenvalues, zeros, ComplexMatrix, C64};

/// Default relative tolerance for [`solve`].
pub const DEFAULT_TOL: f64 = 1e-7;
/// Default iteration cap for [`solve`].
pub const DEFAULT_MAX_ITER: usize = 200;

/// Sparse Hermitian matrix stored as sorted `(row, col, value)` triplets
/// covering both triangles.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseHermitian {
    dim: usize,
    entries: Vec<(usize, usize, C64)>,
}

impl SparseHermitian {
    pub fn zero(dim: usize) -> Self {
        SparseHermitian { dim, entries: Vec::new() }
    }

    pub fn identity(dim: usize) -> Self {
        SparseHermitian { dim, entries: (0..dim).map(|i| (i, i, c(1.0, 0.0))).collect() }
    }

    /// Sum duplicates and drop exact zeros. Does not check Hermiticity.
    pub fn from_triplets(dim: usize, mut entries: Vec<(usize, usize, C64)>) -> Self {
        entries.sort_by_key(|&(i, j, _)| (i, j));
        let mut merged: Vec<(usize, usize, C64)> = Vec::with_capacity(entries.len());
        for (i, j, v) in entries {
            match merged.last_mut() {
                Some(last) if last.0 == i && last.1 == j => last.2 += v,
                _ => merged.push((i, j, v)),
            }
        }
        merged.retain(|e| e.2.re != 0.0 || e.2.im != 0.0);
        SparseHermitian { dim, entries: merged }
    }

    /// `E_ij + E_ji` (or `E_ii`) scaled by `v`, and its Hermitian partner.
    pub fn symmetric_unit(dim: usize, i: usize, j: usize, v: C64) -> Self {
        if i == j {
            Self::from_triplets(dim, vec![(i, i, c(v.re, 0.0))])
        } else {
            Self::from_triplets(dim, vec![(i, j, v), (j, i, v.conj())])
        }
    }

    pub fn from_dense(m: &ComplexMatrix) -> Self {
        let mut e = Vec::new();
        for j in 0..m.ncols() {
            for i in 0..m.nrows() {
                let v = m[(i, j)];
                if v.re != 0.0 || v.im != 0.0 {
                    e.push((i, j, v));
                }
            }
        }
        Self::from_triplets(m.nrows(), e)
    }

    pub fn to_dense(&self) -> ComplexMatrix {
        let mut m = zeros(self.dim, self.dim);
        for &(i, j, v) in &self.entries {
            m[(i, j)] += v;
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[(usize, usize, C64)] {
        &self.entries
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn is_real(&self) -> bool {
        self.entries.iter().all(|e| e.2.im == 0.0)
    }

    pub fn scale(&self, s: f64) -> Self {
        SparseHermitian { dim: self.dim, entries: self.entries.iter().map(|&(i, j, v)| (i, j, v * s)).collect() }
    }

    pub fn add(&self, other: &SparseHermitian, s: f64) -> Self {
        let mut e = self.entries.clone();
        e.extend(other.entries.iter().map(|&(i, j, v)| (i, j, v * s)));
        Self::from_triplets(self.dim, e)
    }

    /// Map every entry through `f`, which pushes `(row, col, value)` images
    /// into an output dimension `dim`.
    pub fn map_entries(&self, dim: usize, mut f: impl FnMut(usize, usize, C64, &mut Vec<(usize, usize, C64)>)) -> Self {
        let mut out = Vec::with_capacity(self.entries.len());
        for &(i, j, v) in &self.entries {
            f(i, j, v, &mut out);
        }
        Self::from_triplets(dim, out)
    }

    /// `<self, X> = Re tr(self^dagger X)` for dense `X`.
    pub fn inner_dense(&self, x: &ComplexMatrix) -> f64 {
        self.entries.iter().map(|&(i, j, v)| (v.conj() * x[(i, j)]).re).sum()
    }

    pub fn trace(&self) -> f64 {
        self.entries.iter().filter(|e| e.0 == e.1).map(|e| e.2.re).sum()
    }

    pub fn frobenius(&self) -> f64 {
        self.entries.iter().map(|e| e.2.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest `|A_ij - conj(A_ji)|`.
    pub fn hermitian_deviation(&self) -> f64 {
        let mut dev = 0.0f64;
        for &(i, j, v) in &self.entries {
            let partner = self
                .entries
                .binary_search_by_key(&(j, i), |&(a, b, _)| (a, b))
                .map(|k| self.entries[k].2)
                .unwrap_or(c(0.0, 0.0));
            dev = dev.max((v - partner.conj()).norm());
        }
        dev
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sense {
    Minimize,
    Maximize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Block {
    pub name: String,
    pub dim: usize,
}

/// One affine equality `sum_b <coef_b, X_b> = rhs`.
#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub terms: Vec<(usize, SparseHermitian)>,
    pub rhs: f64,
}

/// A block Hermitian semidefinite program in standard primal form.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianSdp {
    pub sense: Sense,
    pub blocks: Vec<Block>,
    pub objective: Vec<SparseHermitian>,
    pub constant: f64,
    pub constraints: Vec<Constraint>,
}

impl HermitianSdp {
    pub fn new(sense: Sense) -> Self {
        HermitianSdp { sense, blocks: Vec::new(), objective: Vec::new(), constant: 0.0, constraints: Vec::new() }
    }

    /// Add a PSD block variable and return its index.
    pub fn add_block(&mut self, name: impl Into<String>, dim: usize) -> usize {
        self.blocks.push(Block { name: name.into(), dim });
        self.objective.push(SparseHermitian::zero(dim));
        self.blocks.len() - 1
    }

    pub fn set_objective(&mut self, block: usize, coef: SparseHermitian) {
        self.objective[block] = coef;
    }

    pub fn set_constant(&mut self, constant: f64) {
        self.constant = constant;
    }

    pub fn add_constraint(&mut self, terms: Vec<(usize, SparseHermitian)>, rhs: f64) {
        self.constraints.push(Constraint { terms, rhs });
    }

    pub fn block_index(&self, name: &str) -> Option<usize> {
        self.blocks.iter().position(|b| b.name == name)
    }

    /// Structural checks performed before any iteration.
    pub fn validate(&self) -> Result<()> {
        if self.blocks.is_empty() {
            return Err(Error::Invalid("problem has no blocks".into()));
        }
        for (b, blk) in self.blocks.iter().enumerate() {
            if blk.dim == 0 {
                return Err(Error::Invalid(format!("block '{}' has dimension 0", blk.name)));
            }
            check_coef(&self.objective[b], blk, "objective")?;
        }
        if !self.constant.is_finite() {
            return Err(Error::NonFinite);
        }
        for (k, con) in self.constraints.iter().enumerate() {
            if !con.rhs.is_finite() {
                return Err(Error::NonFinite);
            }
            for (b, coef) in &con.terms {
                let blk = self
                    .blocks
                    .get(*b)
                    .ok_or_else(|| Error::Invalid(format!("constraint {k} refers to missing block {b}")))?;
                check_coef(coef, blk, &format!("constraint {k}"))?;
            }
            if con.terms.iter().all(|(_, m)| m.nnz() == 0) && con.rhs != 0.0 {
                return Err(Error::Invalid(format!("constraint {k} is empty but has rhs {}", con.rhs)));
            }
        }
        Ok(())
    }

    /// `sum_i y_i A_i` for each block.
    pub fn adjoint_map(&self, y: &[f64]) -> Vec<ComplexMatrix> {
        let mut out: Vec<ComplexMatrix> = self.blocks.iter().map(|b| zeros(b.dim, b.dim)).collect();
        for (con, &yi) in self.constraints.iter().zip(y) {
            for (b, coef) in &con.terms {
                for &(i, j, v) in coef.entries() {
                    out[*b][(i, j)] += v * yi;
                }
            }
        }
        out
    }

    /// Constraint left-hand sides `sum_b <A_ib, X_b>`.
    pub fn constraint_values(&self, x: &[ComplexMatrix]) -> Vec<f64> {
        self.constraints
            .iter()
            .map(|con| con.terms.iter().map(|(b, coef)| coef.inner_dense(&x[*b])).sum())
            .collect()
    }

    /// Objective value at `x`, constant included.
    pub fn objective_value(&self, x: &[ComplexMatrix]) -> f64 {
        self.constant + self.objective.iter().zip(x).map(|(cf, xb)| cf.inner_dense(xb)).sum::<f64>()
    }

    pub fn is_real(&self) -> bool {
        self.objective.iter().all(|m| m.is_real())
            && self.constraints.iter().all(|con| con.terms.iter().all(|(_, m)| m.is_real()))
    }
}

fn check_coef(m: &SparseHermitian, blk: &Block, what: &str) -> Result<()> {
    if m.dim() != blk.dim {
        return Err(Error::Dimension(format!(
            "{what}: coefficient of size {} for block '{}' of size {}",
            m.dim(),
            blk.name,
            blk.dim
        )));
    }
    if m.entries().iter().any(|&(i, j, v)| i >= blk.dim || j >= blk.dim || !v.re.is_finite() || !v.im.is_finite()) {
        return Err(Error::Invalid(format!("{what}: entry out of range or non-finite")));
    }
    let dev = m.hermitian_deviation();
    if dev > 1e-12 * (1.0 + m.frobenius()) {
        return Err(Error::NotHermitian(dev));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SdpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    MaxIterations,
}

/// Relative residuals of a candidate solution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Residuals {
    /// `||A(X) - b|| / (1 + ||b||)` combined with any PSD violation of `X`.
    pub primal: f64,
    /// Most negative eigenvalue of the dual slack relative to `1 + ||C||`.
    pub dual: f64,
    /// Relative disagreement between reported value, primal and dual objectives.
    pub gap: f64,
}

impl Residuals {
    pub fn max(&self) -> f64 {
        self.primal.max(self.dual).max(self.gap)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SdpSolution {
    pub status: SdpStatus,
    /// Primal objective including the constant.
    pub value: f64,
    pub primal: Vec<ComplexMatrix>,
    pub dual: Vec<f64>,
    pub residuals: Residuals,
    pub iterations: usize,
}

impl SdpSolution {
    pub fn is_optimal(&self) -> bool {
        self.status == SdpStatus::Optimal
    }

    /// Dual objective `b^T y + c0`.
    pub fn dual_value(&self, problem: &HermitianSdp) -> f64 {
        problem.constant + problem.constraints.iter().zip(&self.dual).map(|(con, y)| con.rhs * y).sum::<f64>()
    }

    /// Dual slack `C - A^*(y)` (minimization) or `A^*(y) - C` (maximization).
    pub fn dual_slack(&self, problem: &HermitianSdp) -> Vec<ComplexMatrix> {
        let ay = problem.adjoint_map(&self.dual);
        ay.into_iter()
            .zip(&problem.objective)
            .map(|(a, cf)| {
                let cd = cf.to_dense();
                match problem.sense {
                    Sense::Minimize => cd - a,
                    Sense::Maximize => a - cd,
                }
            })
            .collect()
    }
}

/// Outcome of [`verify`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Verification {
    pub residuals: Residuals,
    pub primal_ok: bool,
    pub dual_ok: bool,
    pub gap_ok: bool,
}

impl Verification {
    pub fn ok(&self) -> bool {
        self.primal_ok && self.dual_ok && self.gap_ok
    }
}

/// Recompute residuals of `sol` against `problem` independently of the solver.
pub fn verify(problem: &HermitianSdp, sol: &SdpSolution, tol: f64) -> Result<Verification> {
    problem.validate()?;
    if sol.primal.len() != problem.blocks.len() || sol.dual.len() != problem.constraints.len() {
        return Err(Error::Dimension("solution does not match problem shape".into()));
    }
    let r = residuals(problem, &sol.primal, &sol.dual, sol.value);
    Ok(Verification { residuals: r, primal_ok: r.primal <= tol, dual_ok: r.dual <= tol, gap_ok: r.gap <= tol })
}

pub(crate) fn residuals(problem: &HermitianSdp, x: &[ComplexMatrix], y: &[f64], value: f64) -> Residuals {
    let ax = problem.constraint_values(x);
    let bnorm = problem.constraints.iter().map(|c| c.rhs * c.rhs).sum::<f64>().sqrt();
    let infeas = ax.iter().zip(&problem.constraints).map(|(a, c)| (a - c.rhs).powi(2)).sum::<f64>().sqrt();
    let xneg = x.iter().map(|m| (-eigenvalues(m)[0]).max(0.0)).fold(0.0, f64::max);
    let xscale = 1.0 + x.iter().map(|m| m.norm()).fold(0.0, f64::max);
    let primal = (infeas / (1.0 + bnorm)).max(xneg / xscale);

    let cnorm = problem.objective.iter().map(|m| m.frobenius().powi(2)).sum::<f64>().sqrt();
    let tmp = SdpSolution {
        status: SdpStatus::Optimal,
        value,
        primal: Vec::new(),
        dual: y.to_vec(),
        residuals: Residuals { primal: 0.0, dual: 0.0, gap: 0.0 },
        iterations: 0,
    };
    let sneg = tmp.dual_slack(problem).iter().map(|m| (-eigenvalues(m)[0]).max(0.0)).fold(0.0, f64::max);
    let dual = sneg / (1.0 + cnorm);

    let pobj = problem.objective_value(x);
    let dobj = tmp.dual_value(problem);
    let denom = 1.0 + pobj.abs() + dobj.abs();
    let gap = ((value - pobj).abs().max((pobj - dobj).abs()).max((value - dobj).abs())) / denom;
    Residuals { primal, dual, gap }
}

/// Solve `problem` to relative tolerance `tol`.
pub fn solve(problem: &HermitianSdp, tol: f64, max_iter: usize) -> Result<SdpSolution> {
    problem.validate()?;
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::Invalid(format!("tolerance {tol} must be positive")));
    }
    ipm::solve_hermitian(problem, tol, max_iter)
}

/// Solve with [`DEFAULT_TOL`] and [`DEFAULT_MAX_ITER`].
pub fn solve_default(problem: &HermitianSdp) -> Result<SdpSolution> {
    solve(problem, DEFAULT_TOL, DEFAULT_MAX_ITER)
}

#[cfg(test)]
mod tests;
