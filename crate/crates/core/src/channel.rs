//! Quantum channels represented by normalized Choi matrices.
//!
//! A [`Channel`] maps `d_in`- to `d_out`-dimensional systems; its Choi
//! matrix `(1/d_in) sum_ij |i><j| (x) N(|i><j|)` is ordered `(in, out)`.
//! A [`BipartiteChannel`] refines this to `A0 B0 -> A1 B1` with the Choi
//! matrix ordered `(A0, B0, A1, B1)`.

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    self, c, eigenvalues, hermitian_deviation, hermitian_part, identity, kron, outer, partial_trace,
    partial_transpose, permute_subsystems, spectral_map, tolerances, zeros, ComplexMatrix, DensityOperator,
};
use crate::rng;

/// Validate a normalized Choi matrix on `(in, out)` with `in = d_in`.
fn validate_choi(choi: &ComplexMatrix, d_in: usize, d_out: usize) -> Result<()> {
    let n = d_in * d_out;
    if !choi.is_square() || choi.nrows() != n {
        return Err(Error::Dimension(format!("Choi matrix must be {n}x{n}, got {}x{}", choi.nrows(), choi.ncols())));
    }
    linalg::ensure_finite(choi)?;
    let tol = tolerances();
    let dev = hermitian_deviation(choi);
    if dev > tol.hermitian {
        return Err(Error::NotHermitian(dev));
    }
    let min = eigenvalues(choi)[0];
    if min < -tol.psd {
        return Err(Error::NotPsd(min));
    }
    let marg = partial_trace(choi, &[d_in, d_out], &[0])?;
    let target = identity(d_in) * c(1.0 / d_in as f64, 0.0);
    let tp = (marg - target).iter().map(|z| z.norm()).fold(0.0, f64::max);
    if tp > tol.tp {
        return Err(Error::NotTracePreserving(tp));
    }
    Ok(())
}

/// Project a nearly valid Choi matrix onto valid ones. Negative eigenvalues
/// down to `-max_defect` are clipped, the input marginal is restored and any
/// negativity this introduces is removed by mixing with the completely
/// depolarizing channel.
pub(crate) fn repair_choi(choi: &ComplexMatrix, d_in: usize, d_out: usize, max_defect: f64) -> Result<ComplexMatrix> {
    let n = d_in * d_out;
    let h = hermitian_part(choi);
    let (vals, vecs) = linalg::eigh(&h);
    if vals[0] < -max_defect {
        return Err(Error::NotPsd(vals[0]));
    }
    let clipped = spectral_map(&vals, &vecs, |l| l.max(0.0));
    let marg = partial_trace(&clipped, &[d_in, d_out], &[0])?;
    let defect = identity(d_in) * c(1.0 / d_in as f64, 0.0) - marg;
    if defect.iter().map(|z| z.norm()).fold(0.0, f64::max) > max_defect * n as f64 + 1e-12 {
        return Err(Error::NotTracePreserving(defect.norm()));
    }
    let mut fixed = hermitian_part(&(clipped + kron(&defect, &(identity(d_out) * c(1.0 / d_out as f64, 0.0)))));
    let min = eigenvalues(&fixed)[0];
    if min < 0.0 {
        // (1-t) J + t I/n has min eigenvalue >= (1-t) min + t/n >= 0.
        let t = (-min) / (1.0 / n as f64 - min);
        fixed = fixed * c(1.0 - t, 0.0) + identity(n) * c(t / n as f64, 0.0);
    }
    Ok(fixed)
}

/// Normalized Choi matrix of the channel with the given Kraus operators.
fn choi_from_kraus(kraus: &[ComplexMatrix], d_in: usize, d_out: usize) -> Result<ComplexMatrix> {
    let mut choi = zeros(d_in * d_out, d_in * d_out);
    for k in kraus {
        if k.nrows() != d_out || k.ncols() != d_in {
            return Err(Error::Dimension(format!("Kraus operator must be {d_out}x{d_in}")));
        }
        let v = DVector::from_fn(d_in * d_out, |idx, _| k[(idx % d_out, idx / d_out)]);
        choi += outer(&v, &v);
    }
    Ok(choi * c(1.0 / d_in as f64, 0.0))
}

/// Apply a channel given by its normalized Choi matrix to the target
/// subsystems of a multipartite operator. Output subsystems come first
/// (as one factor of size `d_out`), followed by the untouched ones in order.
pub fn apply_choi_to_subsystems(
    choi: &ComplexMatrix,
    d_in: usize,
    d_out: usize,
    state: &ComplexMatrix,
    dims: &[usize],
    targets: &[usize],
) -> Result<(ComplexMatrix, Vec<usize>)> {
    let tin: usize = targets.iter().map(|&t| dims[t]).product();
    if tin != d_in {
        return Err(Error::Dimension(format!("target subsystems have dimension {tin}, channel input is {d_in}")));
    }
    let mut perm = targets.to_vec();
    let rest: Vec<usize> = (0..dims.len()).filter(|k| !targets.contains(k)).collect();
    perm.extend(&rest);
    let psi = permute_subsystems(state, dims, &perm)?;
    let r: usize = rest.iter().map(|&k| dims[k]).product();
    let mut out = zeros(d_out * r, d_out * r);
    let scale = d_in as f64;
    for i in 0..d_in {
        for j in 0..d_in {
            let block = choi.view((i * d_out, j * d_out), (d_out, d_out));
            if block.iter().all(|z| z.re == 0.0 && z.im == 0.0) {
                continue;
            }
            let pblock = psi.view((i * r, j * r), (r, r));
            if pblock.iter().all(|z| z.re == 0.0 && z.im == 0.0) {
                continue;
            }
            for a in 0..d_out {
                for b in 0..d_out {
                    let cab = block[(a, b)] * scale;
                    if cab.re == 0.0 && cab.im == 0.0 {
                        continue;
                    }
                    let mut dst = out.view_mut((a * r, b * r), (r, r));
                    dst.zip_apply(&pblock, |d, s| *d += cab * s);
                }
            }
        }
    }
    let mut out_dims = vec![d_out];
    out_dims.extend(rest.iter().map(|&k| dims[k]));
    Ok((out, out_dims))
}

/// A channel `d_in -> d_out`.
#[derive(Debug, Clone, PartialEq)]
pub struct Channel {
    choi: ComplexMatrix,
    d_in: usize,
    d_out: usize,
}

impl Channel {
    pub fn new(choi: ComplexMatrix, d_in: usize, d_out: usize) -> Result<Self> {
        validate_choi(&choi, d_in, d_out)?;
        Ok(Channel { choi: hermitian_part(&choi), d_in, d_out })
    }

    pub fn from_kraus(kraus: &[ComplexMatrix], d_in: usize, d_out: usize) -> Result<Self> {
        Channel::new(choi_from_kraus(kraus, d_in, d_out)?, d_in, d_out)
    }

    pub fn identity(d: usize) -> Self {
        Channel::from_kraus(&[identity(d)], d, d).expect("identity is a channel")
    }

    /// Random channel from a Haar isometry into `d_out * env`.
    pub fn random(d_in: usize, d_out: usize, env: usize, rng: &mut rng::Rng) -> Self {
        let env = env.max(d_in.div_ceil(d_out)).max(1);
        let v = rng::isometry(rng, d_out * env, d_in);
        let kraus: Vec<ComplexMatrix> =
            (0..env).map(|e| ComplexMatrix::from_fn(d_out, d_in, |o, i| v[(o * env + e, i)])).collect();
        Channel::new(hermitian_part(&choi_from_kraus(&kraus, d_in, d_out).unwrap()), d_in, d_out)
            .expect("Stinespring construction is a channel")
    }

    pub fn choi(&self) -> &ComplexMatrix {
        &self.choi
    }

    pub fn d_in(&self) -> usize {
        self.d_in
    }

    pub fn d_out(&self) -> usize {
        self.d_out
    }

    /// `self (x) other` with input `(in1, in2)` and output `(out1, out2)`.
    pub fn tensor(&self, other: &Channel) -> Channel {
        let k = kron(&self.choi, &other.choi);
        let dims = [self.d_in, self.d_out, other.d_in, other.d_out];
        let choi = permute_subsystems(&k, &dims, &[0, 2, 1, 3]).expect("dims consistent");
        Channel { choi, d_in: self.d_in * other.d_in, d_out: self.d_out * other.d_out }
    }

    /// Reorder input and output tensor factors. `in_perm[k]` names the old
    /// input factor that becomes factor `k`; likewise for outputs.
    pub fn permute(&self, in_dims: &[usize], in_perm: &[usize], out_dims: &[usize], out_perm: &[usize]) -> Result<Channel> {
        if in_dims.iter().product::<usize>() != self.d_in || out_dims.iter().product::<usize>() != self.d_out {
            return Err(Error::Dimension("factor dims do not match channel".into()));
        }
        let mut dims = in_dims.to_vec();
        dims.extend(out_dims);
        let mut perm = in_perm.to_vec();
        perm.extend(out_perm.iter().map(|&p| p + in_dims.len()));
        let choi = permute_subsystems(&self.choi, &dims, &perm)?;
        Ok(Channel { choi, d_in: self.d_in, d_out: self.d_out })
    }

    /// Apply to the target subsystems of `state`; see [`apply_choi_to_subsystems`].
    pub fn apply_to(&self, state: &ComplexMatrix, dims: &[usize], targets: &[usize]) -> Result<(ComplexMatrix, Vec<usize>)> {
        apply_choi_to_subsystems(&self.choi, self.d_in, self.d_out, state, dims, targets)
    }

    /// Convex mixture `sum_k p_k N_k`.
    pub fn mixture(parts: &[(f64, &Channel)]) -> Result<Channel> {
        let first = parts.first().ok_or_else(|| Error::Invalid("empty mixture".into()))?.1;
        let mut choi = zeros(first.choi.nrows(), first.choi.ncols());
        for (p, ch) in parts {
            if ch.d_in != first.d_in || ch.d_out != first.d_out {
                return Err(Error::Dimension("mixture of channels with different dims".into()));
            }
            choi += &ch.choi * c(*p, 0.0);
        }
        Channel::new(choi, first.d_in, first.d_out)
    }
}

/// Result of the PPT test on a Choi matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PptFlag {
    pub ppt: bool,
    pub min_eigenvalue: f64,
}

/// A channel `A0 B0 -> A1 B1` with Choi matrix ordered `(A0, B0, A1, B1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BipartiteChannel {
    choi: ComplexMatrix,
    dims: [usize; 4],
    certified_separable: bool,
}

impl BipartiteChannel {
    /// Validate and wrap a normalized Choi matrix.
    pub fn new(choi: ComplexMatrix, dims: [usize; 4]) -> Result<Self> {
        if dims.contains(&0) {
            return Err(Error::Dimension("subsystem dimensions must be positive".into()));
        }
        validate_choi(&choi, dims[0] * dims[1], dims[2] * dims[3])?;
        Ok(BipartiteChannel { choi: hermitian_part(&choi), dims, certified_separable: false })
    }

    /// Like [`BipartiteChannel::new`] but first projects small numerical
    /// defects (at most `max_defect`) away.
    pub fn from_choi_repaired(choi: &ComplexMatrix, dims: [usize; 4], max_defect: f64) -> Result<Self> {
        let fixed = repair_choi(choi, dims[0] * dims[1], dims[2] * dims[3], max_defect)?;
        BipartiteChannel::new(fixed, dims)
    }

    pub fn from_kraus(kraus: &[ComplexMatrix], dims: [usize; 4]) -> Result<Self> {
        BipartiteChannel::new(choi_from_kraus(kraus, dims[0] * dims[1], dims[2] * dims[3])?, dims)
    }

    pub fn from_unitary(u: &ComplexMatrix, dims: [usize; 4]) -> Result<Self> {
        BipartiteChannel::from_kraus(std::slice::from_ref(u), dims)
    }

    pub fn from_channel(ch: Channel, dims: [usize; 4]) -> Result<Self> {
        if ch.d_in != dims[0] * dims[1] || ch.d_out != dims[2] * dims[3] {
            return Err(Error::Dimension("channel dims do not factor as requested".into()));
        }
        Ok(BipartiteChannel { choi: ch.choi, dims, certified_separable: false })
    }

    /// Local product channel `N_A (x) N_B`.
    pub fn local_product(na: &Channel, nb: &Channel) -> Self {
        let t = na.tensor(nb);
        let ch = t
            .permute(&[na.d_in, nb.d_in], &[0, 1], &[na.d_out, nb.d_out], &[0, 1])
            .expect("dims consistent");
        BipartiteChannel { choi: ch.choi, dims: [na.d_in, nb.d_in, na.d_out, nb.d_out], certified_separable: true }
    }

    pub fn choi(&self) -> &ComplexMatrix {
        &self.choi
    }

    pub fn dims(&self) -> [usize; 4] {
        self.dims
    }

    pub fn d_in(&self) -> usize {
        self.dims[0] * self.dims[1]
    }

    pub fn d_out(&self) -> usize {
        self.dims[2] * self.dims[3]
    }

    /// True when produced by a construction that is separable by design.
    pub fn is_certified_separable(&self) -> bool {
        self.certified_separable
    }

    pub fn as_channel(&self) -> Channel {
        Channel { choi: self.choi.clone(), d_in: self.d_in(), d_out: self.d_out() }
    }

    pub fn is_real(&self) -> bool {
        linalg::is_real(&self.choi)
    }

    /// Apply to a state on `(A0, B0, R...)`; the result lives on `(A1, B1, R...)`.
    pub fn apply(&self, state: &DensityOperator) -> Result<DensityOperator> {
        let d = state.dims();
        if d.len() < 2 || d[0] != self.dims[0] || d[1] != self.dims[1] {
            return Err(Error::Dimension(format!("state dims {:?} do not start with ({}, {})", d, self.dims[0], self.dims[1])));
        }
        let (out, _) = apply_choi_to_subsystems(&self.choi, self.d_in(), self.d_out(), state.matrix(), d, &[0, 1])?;
        let mut dims = vec![self.dims[2], self.dims[3]];
        dims.extend(&d[2..]);
        DensityOperator::new(hermitian_part(&out), dims)
    }

    /// PPT test across the `A0 A1 : B0 B1` cut.
    pub fn is_ppt(&self) -> PptFlag {
        let pt = partial_transpose(&self.choi, &self.dims, &[1, 3]).expect("dims validated");
        let min = eigenvalues(&pt)[0];
        PptFlag { ppt: min >= -tolerances().psd, min_eigenvalue: min }
    }

    /// Channel with `A = (A_self, A_other)` and `B = (B_self, B_other)`.
    pub fn tensor(&self, other: &BipartiteChannel) -> BipartiteChannel {
        let k = kron(&self.choi, &other.choi);
        let mut dims8 = self.dims.to_vec();
        dims8.extend(other.dims);
        let choi = permute_subsystems(&k, &dims8, &[0, 4, 1, 5, 2, 6, 3, 7]).expect("dims consistent");
        let d = std::array::from_fn(|i| self.dims[i] * other.dims[i]);
        BipartiteChannel { choi, dims: d, certified_separable: self.certified_separable && other.certified_separable }
    }

    /// `p * self + (1 - p) * other`.
    pub fn mix(&self, other: &BipartiteChannel, p: f64) -> Result<BipartiteChannel> {
        if self.dims != other.dims {
            return Err(Error::Dimension("cannot mix channels with different dims".into()));
        }
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::Invalid(format!("mixing weight {p} outside [0, 1]")));
        }
        let choi = &self.choi * c(p, 0.0) + &other.choi * c(1.0 - p, 0.0);
        let mut out = BipartiteChannel::new(choi, self.dims)?;
        out.certified_separable = self.certified_separable && other.certified_separable;
        Ok(out)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&ChannelJson::from(self)).expect("plain data serializes")
    }

    /// Parse the JSON interchange format, validating every invariant.
    pub fn from_json(text: &str) -> Result<Self> {
        let j: ChannelJson = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        let n = j.dims.iter().product::<usize>();
        let shape_ok = j.choi_re.len() == n
            && j.choi_im.len() == n
            && j.choi_re.iter().chain(&j.choi_im).all(|row| row.len() == n);
        if !shape_ok {
            return Err(Error::Dimension(format!("Choi arrays must be {n}x{n} for dims {:?}", j.dims)));
        }
        let m = ComplexMatrix::from_fn(n, n, |i, k| c(j.choi_re[i][k], j.choi_im[i][k]));
        BipartiteChannel::new(m, j.dims)
    }

    pub(crate) fn with_certified_separable(mut self, flag: bool) -> Self {
        self.certified_separable = flag;
        self
    }
}

/// JSON interchange format for bipartite channels.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChannelJson {
    pub dims: [usize; 4],
    pub choi_re: Vec<Vec<f64>>,
    pub choi_im: Vec<Vec<f64>>,
}

impl From<&BipartiteChannel> for ChannelJson {
    fn from(ch: &BipartiteChannel) -> Self {
        let n = ch.choi.nrows();
        ChannelJson {
            dims: ch.dims,
            choi_re: (0..n).map(|i| (0..n).map(|k| ch.choi[(i, k)].re).collect()).collect(),
            choi_im: (0..n).map(|i| (0..n).map(|k| ch.choi[(i, k)].im).collect()).collect(),
        }
    }
}

/// The swap unitary on `k x k`, `|ij> -> |ji>`.
pub fn swap_unitary(k: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(k * k, k * k, |r, s| if r == (s % k) * k + s / k { c(1.0, 0.0) } else { c(0.0, 0.0) })
}

/// The channel sending `A0 -> B1` and `B0 -> A1`, defined for any `k >= 1`.
pub(crate) fn swap_choi(k: usize) -> BipartiteChannel {
    BipartiteChannel::from_unitary(&swap_unitary(k), [k, k, k, k]).expect("swap is unitary")
}

/// The `k`-dimensional swap channel, the unit of dynamic entanglement.
pub fn swap_channel(k: usize) -> Result<BipartiteChannel> {
    if k < 2 {
        return Err(Error::Invalid(format!("swap channel needs k >= 2, got {k}")));
    }
    Ok(swap_choi(k))
}

pub fn identity_channel(a: usize, b: usize) -> Result<BipartiteChannel> {
    if a == 0 || b == 0 {
        return Err(Error::Dimension("dimensions must be positive".into()));
    }
    BipartiteChannel::from_unitary(&identity(a * b), [a, b, a, b]).map(|c| c.with_certified_separable(true))
}

/// `rho -> (1 - p) rho + p tr(rho) I/d` on `A B`.
pub fn depolarizing_channel(a: usize, b: usize, p: f64) -> Result<BipartiteChannel> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Invalid(format!("depolarizing parameter {p} outside [0, 1]")));
    }
    let id = identity_channel(a, b)?;
    let d = (a * b) as f64;
    let full = BipartiteChannel::new(identity(a * b * a * b) * c(1.0 / (d * d), 0.0), [a, b, a, b])?;
    id.mix(&full, 1.0 - p)
}

/// Normalized maximally entangled state on `k x k`.
pub fn maximally_entangled(k: usize) -> Result<DensityOperator> {
    if k == 0 {
        return Err(Error::Dimension("k must be positive".into()));
    }
    DensityOperator::pure(&linalg::max_entangled_vector(k), vec![k, k])
}

/// `p Phi + (1 - p) (I - Phi)/(k^2 - 1)`.
pub fn isotropic_state(k: usize, p: f64) -> Result<DensityOperator> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Invalid(format!("isotropic weight {p} outside [0, 1]")));
    }
    let phi = maximally_entangled(k)?.into_matrix();
    if k == 1 {
        return DensityOperator::new(phi, vec![1, 1]);
    }
    let n = k * k;
    let rest = (identity(n) - &phi) * c((1.0 - p) / (n as f64 - 1.0), 0.0);
    DensityOperator::new(phi * c(p, 0.0) + rest, vec![k, k])
}

/// Weight `p` at which the smallest eigenvalue of the partial transpose of
/// [`isotropic_state`] changes sign, located by bisection to within `tol`.
pub fn isotropic_ppt_threshold(k: usize, tol: f64) -> Result<f64> {
    if k < 2 || !(tol > 0.0) {
        return Err(Error::Invalid(format!("need k >= 2 and a positive tolerance, got k = {k}, tol = {tol}")));
    }
    let min_pt = |p: f64| -> Result<f64> {
        let rho = isotropic_state(k, p)?;
        linalg::min_eigenvalue(&linalg::partial_transpose(rho.matrix(), &[k, k], &[1])?)
    };
    let (mut lo, mut hi) = (0.0, 1.0);
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if min_pt(mid)? >= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// One term `u_j A_j (x) B_j` of an operator Schmidt decomposition, with
/// `tr A_j^dagger A_k = tr B_j^dagger B_k = delta_jk`.
#[derive(Debug, Clone, PartialEq)]
pub struct SchmidtTerm {
    pub coefficient: f64,
    pub a: ComplexMatrix,
    pub b: ComplexMatrix,
}

/// Operator Schmidt decomposition of `u` on `A (x) B` via the SVD of its
/// realignment. Coefficients are non-negative and descending; terms below
/// `1e-12` are dropped.
pub fn operator_schmidt(u: &ComplexMatrix, da: usize, db: usize) -> Result<Vec<SchmidtTerm>> {
    if u.nrows() != da * db || u.ncols() != da * db {
        return Err(Error::Dimension(format!("operator is not on {da}x{db}")));
    }
    let realigned = ComplexMatrix::from_fn(da * da, db * db, |r, s| {
        let (a, a2) = (r / da, r % da);
        let (b, b2) = (s / db, s % db);
        u[(a * db + b, a2 * db + b2)]
    });
    let svd = realigned.svd(true, true);
    let (uu, vt) = (svd.u.expect("requested"), svd.v_t.expect("requested"));
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&x, &y| svd.singular_values[y].total_cmp(&svd.singular_values[x]));
    let mut terms = Vec::new();
    for k in order {
        let s = svd.singular_values[k];
        if s < 1e-12 {
            continue;
        }
        let a = ComplexMatrix::from_fn(da, da, |i, j| uu[(i * da + j, k)]);
        let b = ComplexMatrix::from_fn(db, db, |i, j| vt[(k, i * db + j)]);
        terms.push(SchmidtTerm { coefficient: s, a, b });
    }
    Ok(terms)
}

/// Haar-random channel via a Stinespring isometry with environment
/// dimension `|A1||B1|` (or larger if needed to cover the input).
pub fn random_channel(dims: [usize; 4], seed: u64) -> Result<BipartiteChannel> {
    if dims.contains(&0) {
        return Err(Error::Dimension("subsystem dimensions must be positive".into()));
    }
    let mut r = rng::seeded(seed);
    let ch = Channel::random(dims[0] * dims[1], dims[2] * dims[3], dims[2] * dims[3], &mut r);
    BipartiteChannel::from_channel(ch, dims)
}

/// Random convex mixture of `terms` product channels `N_A (x) N_B`,
/// separable by construction.
pub fn random_separable_channel(dims: [usize; 4], seed: u64, terms: usize) -> Result<BipartiteChannel> {
    if dims.contains(&0) || terms == 0 {
        return Err(Error::Invalid("dimensions and term count must be positive".into()));
    }
    let mut r = rng::seeded(seed);
    let weights = rng::simplex(&mut r, terms);
    let n = dims.iter().product();
    let mut choi = zeros(n, n);
    for w in weights {
        let na = Channel::random(dims[0], dims[2], dims[2], &mut r);
        let nb = Channel::random(dims[1], dims[3], dims[3], &mut r);
        choi += BipartiteChannel::local_product(&na, &nb).choi * c(w, 0.0);
    }
    Ok(BipartiteChannel::new(hermitian_part(&choi), dims)?.with_certified_separable(true))
}

/// Vector of a random pure state on `(A0, B0, R)`.
pub fn random_input_state(dims: [usize; 4], r: usize, seed: u64) -> DensityOperator {
    let mut g = rng::seeded(seed);
    rng::pure_state(&mut g, vec![dims[0], dims[1], r])
}

/// Normalized maximally entangled state between `A0 B0` and a reference of
/// the same size, ordered `(A0, B0, R)`.
pub fn choi_input_state(dims: [usize; 4]) -> DensityOperator {
    let d = dims[0] * dims[1];
    let v = linalg::max_entangled_vector(d);
    DensityOperator::pure(&v, vec![dims[0], dims[1], d]).expect("valid")
}
