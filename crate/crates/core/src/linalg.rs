//! Dense complex linear algebra on tensor-product spaces.
//!
//! Matrices are `nalgebra::DMatrix<Complex<f64>>`. Subsystem orderings are
//! row-major: for dims `[d0, d1, ..]` the flat index is `i0 * d1 * .. + i1 * .. + ..`.

use std::sync::RwLock;

use nalgebra::{Complex, DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex<f64>;
pub type ComplexMatrix = DMatrix<C64>;

/// Validation tolerances shared by every constructor in the crate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Max entrywise deviation from Hermiticity.
    pub hermitian: f64,
    /// Allowed deviation of the trace from its target.
    pub trace: f64,
    /// Most negative eigenvalue accepted as PSD.
    pub psd: f64,
    /// Allowed deviation of a Choi input marginal from `I/d`.
    pub tp: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { hermitian: 1e-10, trace: 1e-10, psd: 1e-9, tp: 1e-9 }
    }
}

static TOLERANCES: RwLock<Tolerances> = RwLock::new(Tolerances {
    hermitian: 1e-10,
    trace: 1e-10,
    psd: 1e-9,
    tp: 1e-9,
});

/// Current global tolerances.
pub fn tolerances() -> Tolerances {
    *TOLERANCES.read().expect("tolerance lock poisoned")
}

/// Replace the global tolerances.
pub fn set_tolerances(t: Tolerances) {
    *TOLERANCES.write().expect("tolerance lock poisoned") = t;
}

pub fn c(re: f64, im: f64) -> C64 {
    Complex::new(re, im)
}

pub fn zeros(n: usize, m: usize) -> ComplexMatrix {
    DMatrix::zeros(n, m)
}

pub fn identity(n: usize) -> ComplexMatrix {
    DMatrix::identity(n, n)
}

pub fn from_real(m: &DMatrix<f64>) -> ComplexMatrix {
    m.map(|x| Complex::new(x, 0.0))
}

pub fn ensure_finite(m: &ComplexMatrix) -> Result<()> {
    if m.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite)
    }
}

/// Largest entrywise deviation `|m - m^dagger|`.
pub fn hermitian_deviation(m: &ComplexMatrix) -> f64 {
    if !m.is_square() {
        return f64::INFINITY;
    }
    let n = m.nrows();
    let mut dev = 0.0f64;
    for i in 0..n {
        for j in i..n {
            dev = dev.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    dev
}

pub fn hermitian_part(m: &ComplexMatrix) -> ComplexMatrix {
    (m + m.adjoint()) * c(0.5, 0.0)
}

pub fn is_real(m: &ComplexMatrix) -> bool {
    m.iter().all(|z| z.im == 0.0)
}

pub fn trace(m: &ComplexMatrix) -> C64 {
    m.trace()
}

/// Hilbert-Schmidt inner product `Re tr(a^dagger b)`.
pub fn inner(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.re * y.re + x.im * y.im).sum()
}

pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kronecker(b)
}

pub fn kron_all(ms: &[&ComplexMatrix]) -> ComplexMatrix {
    let mut out = identity(1);
    for m in ms {
        out = kron(&out, m);
    }
    out
}

fn check_dims(m: &ComplexMatrix, dims: &[usize]) -> Result<usize> {
    let n: usize = dims.iter().product();
    if !m.is_square() || m.nrows() != n {
        return Err(Error::Dimension(format!(
            "matrix {}x{} does not match subsystem dims {:?}",
            m.nrows(),
            m.ncols(),
            dims
        )));
    }
    Ok(n)
}

fn strides(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1; dims.len()];
    for k in (0..dims.len().saturating_sub(1)).rev() {
        s[k] = s[k + 1] * dims[k + 1];
    }
    s
}

/// Index map for a subsystem permutation: output subsystem `k` is input
/// subsystem `perm[k]`. Returns `map[out_index] = in_index`.
pub fn permutation_map(dims: &[usize], perm: &[usize]) -> Result<Vec<usize>> {
    let n = dims.len();
    let mut seen = vec![false; n];
    if perm.len() != n || perm.iter().any(|&p| p >= n || std::mem::replace(&mut seen[p], true)) {
        return Err(Error::Invalid(format!("{perm:?} is not a permutation of {n} subsystems")));
    }
    let in_strides = strides(dims);
    let out_dims: Vec<usize> = perm.iter().map(|&p| dims[p]).collect();
    let total: usize = dims.iter().product();
    let mut map = vec![0usize; total];
    let mut digits = vec![0usize; n];
    for slot in map.iter_mut() {
        *slot = digits.iter().zip(perm).map(|(&d, &p)| d * in_strides[p]).sum();
        for k in (0..n).rev() {
            digits[k] += 1;
            if digits[k] < out_dims[k] {
                break;
            }
            digits[k] = 0;
        }
    }
    Ok(map)
}

/// Reorder tensor factors: output subsystem `k` is input subsystem `perm[k]`.
pub fn permute_subsystems(m: &ComplexMatrix, dims: &[usize], perm: &[usize]) -> Result<ComplexMatrix> {
    let n = check_dims(m, dims)?;
    let map = permutation_map(dims, perm)?;
    Ok(DMatrix::from_fn(n, n, |i, j| m[(map[i], map[j])]))
}

/// Permute the entries of a vector in the same way as [`permute_subsystems`].
pub fn permute_vector(v: &DVector<C64>, dims: &[usize], perm: &[usize]) -> Result<DVector<C64>> {
    let map = permutation_map(dims, perm)?;
    if v.len() != map.len() {
        return Err(Error::Dimension("vector length does not match dims".into()));
    }
    Ok(DVector::from_fn(v.len(), |i, _| v[map[i]]))
}

/// Trace out every subsystem not listed in `keep`; kept factors stay in
/// the order given by `keep`.
pub fn partial_trace(m: &ComplexMatrix, dims: &[usize], keep: &[usize]) -> Result<ComplexMatrix> {
    check_dims(m, dims)?;
    let mut perm: Vec<usize> = keep.to_vec();
    perm.extend((0..dims.len()).filter(|k| !keep.contains(k)));
    let p = permute_subsystems(m, dims, &perm)?;
    let kd: usize = keep.iter().map(|&k| dims[k]).product();
    let td: usize = dims.iter().product::<usize>() / kd;
    Ok(DMatrix::from_fn(kd, kd, |i, j| {
        (0..td).map(|t| p[(i * td + t, j * td + t)]).sum()
    }))
}

/// Transpose the listed subsystems.
pub fn partial_transpose(m: &ComplexMatrix, dims: &[usize], systems: &[usize]) -> Result<ComplexMatrix> {
    let n = check_dims(m, dims)?;
    if systems.iter().any(|&s| s >= dims.len()) {
        return Err(Error::Invalid("subsystem index out of range".into()));
    }
    let part = transposed_part(dims, systems);
    Ok(DMatrix::from_fn(n, n, |i, j| {
        let ii = i - part[i] + part[j];
        let jj = j - part[j] + part[i];
        m[(ii, jj)]
    }))
}

/// For each flat index, the contribution of the listed subsystems' digits.
pub(crate) fn transposed_part(dims: &[usize], systems: &[usize]) -> Vec<usize> {
    let st = strides(dims);
    let n: usize = dims.iter().product();
    (0..n)
        .map(|i| systems.iter().map(|&s| (i / st[s]) % dims[s] * st[s]).sum())
        .collect()
}

fn to_faer(m: &ComplexMatrix) -> faer::Mat<C64> {
    let h = hermitian_part(m);
    faer::Mat::from_fn(h.nrows(), h.ncols(), |i, j| h[(i, j)])
}

/// Eigendecomposition of a Hermitian matrix, eigenvalues ascending.
///
/// Uses faer's Hermitian solver; nalgebra's complex routine can return NaN
/// on large, highly degenerate inputs.
pub fn eigh(m: &ComplexMatrix) -> (Vec<f64>, ComplexMatrix) {
    let n = m.nrows();
    let evd = to_faer(m).self_adjoint_eigen(faer::Side::Lower).expect("Hermitian eigendecomposition converges");
    let (u, s) = (evd.U(), evd.S());
    let vals = (0..n).map(|k| s[k].re).collect();
    let vecs = DMatrix::from_fn(n, n, |i, j| u[(i, j)]);
    (vals, vecs)
}

pub fn eigenvalues(m: &ComplexMatrix) -> Vec<f64> {
    let mut v = to_faer(m).self_adjoint_eigenvalues(faer::Side::Lower).expect("Hermitian eigenvalues converge");
    v.sort_by(f64::total_cmp);
    v
}

/// Smallest eigenvalue of a Hermitian matrix.
pub fn min_eigenvalue(m: &ComplexMatrix) -> Result<f64> {
    let dev = hermitian_deviation(m);
    if dev > tolerances().hermitian.max(1e-8 * (1.0 + m.norm())) {
        return Err(Error::NotHermitian(dev));
    }
    Ok(eigenvalues(m).first().copied().unwrap_or(0.0))
}

pub fn max_eigenvalue(m: &ComplexMatrix) -> f64 {
    eigenvalues(m).last().copied().unwrap_or(0.0)
}

/// Rebuild `V f(diag) V^dagger` from an eigendecomposition.
pub fn spectral_map(vals: &[f64], vecs: &ComplexMatrix, f: impl Fn(f64) -> f64) -> ComplexMatrix {
    let n = vecs.nrows();
    let mut scaled = vecs.clone();
    for (j, &l) in vals.iter().enumerate() {
        let s = f(l);
        for i in 0..n {
            scaled[(i, j)] *= s;
        }
    }
    scaled * vecs.adjoint()
}

/// Zero out negative eigenvalues.
pub fn psd_clamp(m: &ComplexMatrix) -> ComplexMatrix {
    let (vals, vecs) = eigh(m);
    spectral_map(&vals, &vecs, |l| l.max(0.0))
}

pub fn psd_sqrt(m: &ComplexMatrix) -> ComplexMatrix {
    let (vals, vecs) = eigh(m);
    spectral_map(&vals, &vecs, |l| l.max(0.0).sqrt())
}

/// Projector onto eigenvectors with eigenvalue above `cutoff`.
pub fn support_projector(m: &ComplexMatrix, cutoff: f64) -> ComplexMatrix {
    let (vals, vecs) = eigh(m);
    spectral_map(&vals, &vecs, |l| if l > cutoff { 1.0 } else { 0.0 })
}

/// Sum of singular values.
pub fn trace_norm(m: &ComplexMatrix) -> f64 {
    if m.is_square() && hermitian_deviation(m) <= 1e-12 * (1.0 + m.norm()) {
        eigenvalues(m).iter().map(|l| l.abs()).sum()
    } else {
        m.clone().singular_values().iter().sum()
    }
}

/// Squared fidelity `(tr sqrt(sqrt(rho) sigma sqrt(rho)))^2`.
pub fn fidelity(rho: &ComplexMatrix, sigma: &ComplexMatrix) -> Result<f64> {
    if rho.shape() != sigma.shape() || !rho.is_square() {
        return Err(Error::Dimension("fidelity arguments differ in shape".into()));
    }
    // Eigenvalues at roundoff level are zeroed before the square roots, which
    // would otherwise lift them to ~1e-8 and break tight pure-state cases.
    const CUTOFF: f64 = 1e-14;
    let root_of = |l: f64, scale: f64| if l > CUTOFF * scale { l.sqrt() } else { 0.0 };
    let (vals, vecs) = eigh(rho);
    let top = vals.iter().fold(1.0f64, |m, l| m.max(l.abs()));
    let s = spectral_map(&vals, &vecs, |l| root_of(l, top));
    let inner = &s * sigma * &s;
    let inner_vals = eigenvalues(&inner);
    let top = inner_vals.iter().fold(1.0f64, |m, l| m.max(l.abs()));
    let root: f64 = inner_vals.iter().map(|&l| root_of(l, top)).sum();
    Ok((root * root).clamp(0.0, 1.0))
}

/// Unnormalized maximally entangled vector `sum_i |ii>` on `k x k`.
pub fn max_entangled_vector(k: usize) -> DVector<C64> {
    DVector::from_fn(k * k, |i, _| if i / k == i % k { c(1.0, 0.0) } else { c(0.0, 0.0) })
}

pub fn outer(u: &DVector<C64>, v: &DVector<C64>) -> ComplexMatrix {
    u * v.adjoint()
}

/// A validated density operator with its tensor factor dimensions.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    matrix: ComplexMatrix,
    dims: Vec<usize>,
}

impl DensityOperator {
    /// Validate Hermiticity, unit trace and positivity against the global tolerances.
    pub fn new(matrix: ComplexMatrix, dims: Vec<usize>) -> Result<Self> {
        check_dims(&matrix, &dims)?;
        ensure_finite(&matrix)?;
        let tol = tolerances();
        let dev = hermitian_deviation(&matrix);
        if dev > tol.hermitian {
            return Err(Error::NotHermitian(dev));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > tol.trace || tr.im.abs() > tol.trace {
            return Err(Error::Trace(tr.re));
        }
        let min = eigenvalues(&matrix).first().copied().unwrap_or(0.0);
        if min < -tol.psd {
            return Err(Error::NotPsd(min));
        }
        Ok(DensityOperator { matrix: hermitian_part(&matrix), dims })
    }

    /// Pure state from an (unnormalized) vector.
    pub fn pure(v: &DVector<C64>, dims: Vec<usize>) -> Result<Self> {
        let n = v.norm();
        if n == 0.0 || !n.is_finite() {
            return Err(Error::Invalid("zero or non-finite state vector".into()));
        }
        let u = v / c(n, 0.0);
        DensityOperator::new(outer(&u, &u), dims)
    }

    pub fn maximally_mixed(dims: Vec<usize>) -> Self {
        let n: usize = dims.iter().product();
        DensityOperator { matrix: identity(n) * c(1.0 / n as f64, 0.0), dims }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn partial_trace(&self, keep: &[usize]) -> DensityOperator {
        let m = partial_trace(&self.matrix, &self.dims, keep).expect("dims validated at construction");
        DensityOperator { matrix: m, dims: keep.iter().map(|&k| self.dims[k]).collect() }
    }

    pub fn min_eigenvalue(&self) -> f64 {
        eigenvalues(&self.matrix)[0]
    }

    pub fn fidelity(&self, other: &DensityOperator) -> Result<f64> {
        fidelity(&self.matrix, &other.matrix)
    }

    pub fn trace_distance(&self, other: &DensityOperator) -> f64 {
        0.5 * trace_norm(&(&self.matrix - &other.matrix))
    }
}
