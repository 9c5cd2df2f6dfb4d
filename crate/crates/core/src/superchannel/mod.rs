//! Superchannels: linear maps sending bipartite channels to bipartite
//! channels.
//!
//! Two forms are supported. [`Form::PrePost`] is the realization by a
//! pre-processing channel into the slot plus a memory, followed by a
//! post-processing channel. [`Form::MeasureAndPrepare`] estimates a
//! two-outcome test on the slot channel and prepares one of two output
//! channels:
//!
//! ```text
//! Theta[E] = p(E) hit + (1 - p(E)) miss.
//! ```
//!
//! Every measure-and-prepare superchannel converts to a pre/post one via
//! [`Superchannel::to_pre_post`].

mod certify;
mod constructions;
mod harness;
mod suites;
mod twirl;

pub use certify::{
    isotropic_seppsc, random_local_superchannel, seppsc_certify, IsotropicSeppsc, SeppscCertificate, Verdict,
};
pub use constructions::{
    catalytic_dilution, dilution_superchannel, distillation_superchannel, garbage_channel, Catalysis, CatalysisBounds,
};
pub use harness::{cost_bound_harness, distill_bound_harness, parity_k, snap, CostBounds, DistillBounds};
pub use suites::{
    growth_suite, monotonicity_suite, GrowthConfig, GrowthSummary, MonotonicityConfig, MonotonicitySummary, Tally,
    MONOTONE_TOL,
};
pub use twirl::{catalyst_component, twirl_catalyst, twirl_image_rank, twisted_twirl};

use serde::{Deserialize, Serialize};

use crate::channel::{apply_choi_to_subsystems, BipartiteChannel, Channel, ChannelJson};
use crate::error::{Error, Result};
use crate::linalg::{
    self, c, eigenvalues, hermitian_part, identity, kron, max_entangled_vector, outer, permute_subsystems,
    ComplexMatrix, DensityOperator,
};
use crate::rng;

/// Tolerance for `0 <= Q <= I` on effects.
const EFFECT_TOL: f64 = 1e-9;

/// The two-outcome test of a measure-and-prepare superchannel.
#[derive(Debug, Clone, PartialEq)]
pub enum Test {
    /// Effect on the slot's Choi space: `p(E) = tr(Q J^E)`.
    Choi { effect: ComplexMatrix },
    /// Probe state on `(A0, B0, R)` and effect on `(A1, B1, R)`:
    /// `p(E) = tr(Q (E (x) id_R)(psi))`.
    Probe { psi: DensityOperator, effect: ComplexMatrix },
}

#[derive(Debug, Clone, PartialEq)]
pub enum Form {
    /// `Theta[E] = post o (E (x) id_M) o pre` with `pre: in' -> slot_in (x) M`
    /// and `post: slot_out (x) M -> out'`.
    PrePost { pre: Channel, post: Channel, memory: usize },
    MeasureAndPrepare { test: Test, hit: BipartiteChannel, miss: BipartiteChannel },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Superchannel {
    form: Form,
    slot_dims: [usize; 4],
    out_dims: [usize; 4],
}

fn in_dim(d: [usize; 4]) -> usize {
    d[0] * d[1]
}

fn out_dim(d: [usize; 4]) -> usize {
    d[2] * d[3]
}

fn check_effect(q: &ComplexMatrix, dim: usize, what: &str) -> Result<()> {
    if q.nrows() != dim || q.ncols() != dim {
        return Err(Error::Dimension(format!("{what} must be {dim}x{dim}")));
    }
    linalg::ensure_finite(q)?;
    let dev = linalg::hermitian_deviation(q);
    if dev > 1e-10 {
        return Err(Error::NotHermitian(dev));
    }
    let ev = eigenvalues(q);
    let (lo, hi) = (ev[0], ev[dim - 1]);
    if lo < -EFFECT_TOL || hi > 1.0 + EFFECT_TOL {
        return Err(Error::Invalid(format!("{what} has spectrum [{lo:.3e}, {hi:.3e}], outside [0, 1]")));
    }
    Ok(())
}

impl Superchannel {
    /// Pre/post superchannel. `pre` maps `in(out_dims)` to
    /// `in(slot_dims) * memory`, `post` maps `out(slot_dims) * memory` to
    /// `out(out_dims)`.
    pub fn pre_post(pre: Channel, post: Channel, memory: usize, slot_dims: [usize; 4], out_dims: [usize; 4]) -> Result<Self> {
        if memory == 0 {
            return Err(Error::Dimension("memory dimension must be positive".into()));
        }
        if pre.d_in() != in_dim(out_dims) || pre.d_out() != in_dim(slot_dims) * memory {
            return Err(Error::Dimension(format!(
                "pre-processing must map {} -> {}, got {} -> {}",
                in_dim(out_dims),
                in_dim(slot_dims) * memory,
                pre.d_in(),
                pre.d_out()
            )));
        }
        if post.d_in() != out_dim(slot_dims) * memory || post.d_out() != out_dim(out_dims) {
            return Err(Error::Dimension(format!(
                "post-processing must map {} -> {}, got {} -> {}",
                out_dim(slot_dims) * memory,
                out_dim(out_dims),
                post.d_in(),
                post.d_out()
            )));
        }
        let theta = Superchannel { form: Form::PrePost { pre, post, memory }, slot_dims, out_dims };
        theta.spot_check()?;
        Ok(theta)
    }

    /// Measure-and-prepare superchannel with `0 <= Q <= I`.
    pub fn measure_and_prepare(
        test: Test,
        hit: BipartiteChannel,
        miss: BipartiteChannel,
        slot_dims: [usize; 4],
    ) -> Result<Self> {
        if hit.dims() != miss.dims() {
            return Err(Error::Dimension(format!("hit dims {:?} differ from miss dims {:?}", hit.dims(), miss.dims())));
        }
        match &test {
            Test::Choi { effect } => check_effect(effect, slot_dims.iter().product(), "Choi-space effect")?,
            Test::Probe { psi, effect } => {
                let d = psi.dims();
                if d.len() != 3 || d[0] != slot_dims[0] || d[1] != slot_dims[1] {
                    return Err(Error::Dimension(format!("probe dims {d:?} must be (A0, B0, R) for slot {slot_dims:?}")));
                }
                check_effect(effect, out_dim(slot_dims) * d[2], "probe effect")?;
            }
        }
        let out_dims = hit.dims();
        let theta = Superchannel { form: Form::MeasureAndPrepare { test, hit, miss }, slot_dims, out_dims };
        theta.spot_check()?;
        Ok(theta)
    }

    pub fn form(&self) -> &Form {
        &self.form
    }

    pub fn slot_dims(&self) -> [usize; 4] {
        self.slot_dims
    }

    pub fn out_dims(&self) -> [usize; 4] {
        self.out_dims
    }

    /// Apply to five random slot channels; each output must be a channel.
    fn spot_check(&self) -> Result<()> {
        for seed in 0..5 {
            let e = crate::channel::random_channel(self.slot_dims, 0x5eed_0000 + seed)?;
            self.apply(&e).map_err(|err| Error::Invalid(format!("superchannel output is not a channel: {err}")))?;
        }
        Ok(())
    }

    /// Probability of the `hit` outcome, for measure-and-prepare forms.
    pub fn hit_probability(&self, e: &BipartiteChannel) -> Result<Option<f64>> {
        match &self.form {
            Form::MeasureAndPrepare { test, .. } => Ok(Some(test_probability(test, e)?)),
            Form::PrePost { .. } => Ok(None),
        }
    }

    /// `Theta[E]`.
    pub fn apply(&self, e: &BipartiteChannel) -> Result<BipartiteChannel> {
        if e.dims() != self.slot_dims {
            return Err(Error::Dimension(format!("slot expects dims {:?}, got {:?}", self.slot_dims, e.dims())));
        }
        match &self.form {
            Form::MeasureAndPrepare { test, hit, miss } => {
                let p = test_probability(test, e)?.clamp(0.0, 1.0);
                hit.mix(miss, p)
            }
            Form::PrePost { pre, post, memory } => {
                let d = in_dim(self.out_dims);
                let (si, so) = (in_dim(self.slot_dims), out_dim(self.slot_dims));
                // Choi of the output: (id_ref (x) Theta[E])(Phi) with the
                // reference carried along as the last factor.
                let v = max_entangled_vector(d);
                let phi = outer(&v, &v) * c(1.0 / d as f64, 0.0);
                let (s1, _) = pre.apply_to(&phi, &[d, d], &[0])?;
                let (s2, _) = apply_choi_to_subsystems(e.choi(), si, so, &s1, &[si, *memory, d], &[0])?;
                let (s3, _) = post.apply_to(&s2, &[so, *memory, d], &[0, 1])?;
                let choi = permute_subsystems(&s3, &[out_dim(self.out_dims), d], &[1, 0])?;
                BipartiteChannel::from_choi_repaired(&hermitian_part(&choi), self.out_dims, 1e-9)
            }
        }
    }

    /// The probe `(pre (x) id_R)(psi)` seen by the slot when `psi` on
    /// `(A0', B0', R)` is fed to `Theta[E]`, ordered `(A0, B0, M R)` with
    /// `M` the memory. `None` for measure-and-prepare forms.
    pub fn preprocess_probe(&self, psi: &DensityOperator) -> Result<Option<DensityOperator>> {
        let Form::PrePost { pre, memory, .. } = &self.form else {
            return Ok(None);
        };
        let d = psi.dims();
        if d.len() != 3 || d[0] != self.out_dims[0] || d[1] != self.out_dims[1] {
            return Err(Error::Dimension(format!("probe dims {d:?} do not match (A0', B0', R)")));
        }
        let (m, _) = pre.apply_to(psi.matrix(), &[d[0] * d[1], d[2]], &[0])?;
        let dims = vec![self.slot_dims[0], self.slot_dims[1], memory * d[2]];
        Ok(Some(DensityOperator::new(hermitian_part(&m), dims)?))
    }

    /// Equivalent pre/post realization. The pre-processing prepares the
    /// probe in the slot and its reference, keeping the real input in
    /// memory; the post-processing measures the test and prepares `hit` or
    /// `miss` on the stored input.
    pub fn to_pre_post(&self) -> Result<Superchannel> {
        let (test, hit, miss) = match &self.form {
            Form::PrePost { .. } => return Ok(self.clone()),
            Form::MeasureAndPrepare { test, hit, miss } => (test, hit, miss),
        };
        let (psi, effect) = match test {
            Test::Probe { psi, effect } => (psi.matrix().clone(), effect.clone()),
            Test::Choi { effect } => {
                let si = in_dim(self.slot_dims);
                let so = out_dim(self.slot_dims);
                let v = max_entangled_vector(si);
                let phi = outer(&v, &v) * c(1.0 / si as f64, 0.0);
                // tr(Q J^E) = tr(Q' (E (x) id)(Phi)) with Q' the factor swap of Q.
                (phi, permute_subsystems(effect, &[si, so], &[1, 0])?)
            }
        };
        let d = in_dim(self.out_dims);
        let si = in_dim(self.slot_dims);
        let so = out_dim(self.slot_dims);
        let r = psi.nrows() / si;
        let memory = r * d;

        // pre(rho) = psi_{slot R} (x) rho_X.
        let v = max_entangled_vector(d);
        let phi_in = outer(&v, &v) * c(1.0 / d as f64, 0.0);
        let pre_choi = permute_subsystems(&kron(&phi_in, &psi), &[d, d, si * r], &[0, 2, 1])?;
        let pre = Channel::new(pre_choi, d, si * memory)?;

        // post = (tr(Q .) (x) hit) + (tr((I - Q) .) (x) miss) on (slot_out R, X).
        let m = so * r;
        let qt = effect.transpose();
        let rest = identity(m) - &qt;
        let post_choi = (kron(&qt, hit.choi()) + kron(&rest, miss.choi())) * c(1.0 / m as f64, 0.0);
        let post = Channel::new(hermitian_part(&post_choi), so * memory, out_dim(self.out_dims))?;
        Superchannel::pre_post(pre, post, memory, self.slot_dims, self.out_dims)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&SuperchannelJson::from(self)).expect("plain data serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let j: SuperchannelJson = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        j.into_superchannel()
    }
}

fn test_probability(test: &Test, e: &BipartiteChannel) -> Result<f64> {
    match test {
        Test::Choi { effect } => Ok(linalg::inner(effect, e.choi())),
        Test::Probe { psi, effect } => {
            let out = e.apply(psi)?;
            Ok(linalg::inner(effect, out.matrix()))
        }
    }
}

/// Random channel sampler shared by the submodules.
pub(crate) fn random_local(d_in: usize, d_out: usize, g: &mut rng::Rng) -> Channel {
    Channel::random(d_in, d_out, d_out, g)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct MatrixJson {
    re: Vec<Vec<f64>>,
    im: Vec<Vec<f64>>,
}

impl MatrixJson {
    fn from_matrix(m: &ComplexMatrix) -> Self {
        MatrixJson {
            re: (0..m.nrows()).map(|i| (0..m.ncols()).map(|k| m[(i, k)].re).collect()).collect(),
            im: (0..m.nrows()).map(|i| (0..m.ncols()).map(|k| m[(i, k)].im).collect()).collect(),
        }
    }

    fn to_matrix(&self) -> Result<ComplexMatrix> {
        let n = self.re.len();
        let cols = self.re.first().map_or(0, |r| r.len());
        if self.im.len() != n || self.re.iter().chain(&self.im).any(|r| r.len() != cols) {
            return Err(Error::Dimension("real and imaginary parts differ in shape".into()));
        }
        let m = ComplexMatrix::from_fn(n, cols, |i, k| c(self.re[i][k], self.im[i][k]));
        linalg::ensure_finite(&m)?;
        Ok(m)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct PlainChannelJson {
    d_in: usize,
    d_out: usize,
    choi: MatrixJson,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
enum TestJson {
    Choi { effect: MatrixJson },
    Probe { psi: MatrixJson, psi_dims: Vec<usize>, effect: MatrixJson },
}

/// Serialized superchannel; `form` is the discriminator.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "kebab-case")]
enum SuperchannelJson {
    PrePost {
        slot_dims: [usize; 4],
        out_dims: [usize; 4],
        memory: usize,
        pre: PlainChannelJson,
        post: PlainChannelJson,
    },
    MeasureAndPrepare {
        slot_dims: [usize; 4],
        test: TestJson,
        hit: ChannelJson,
        miss: ChannelJson,
    },
}

impl From<&Superchannel> for SuperchannelJson {
    fn from(s: &Superchannel) -> Self {
        let plain = |ch: &Channel| PlainChannelJson {
            d_in: ch.d_in(),
            d_out: ch.d_out(),
            choi: MatrixJson::from_matrix(ch.choi()),
        };
        match &s.form {
            Form::PrePost { pre, post, memory } => SuperchannelJson::PrePost {
                slot_dims: s.slot_dims,
                out_dims: s.out_dims,
                memory: *memory,
                pre: plain(pre),
                post: plain(post),
            },
            Form::MeasureAndPrepare { test, hit, miss } => SuperchannelJson::MeasureAndPrepare {
                slot_dims: s.slot_dims,
                test: match test {
                    Test::Choi { effect } => TestJson::Choi { effect: MatrixJson::from_matrix(effect) },
                    Test::Probe { psi, effect } => TestJson::Probe {
                        psi: MatrixJson::from_matrix(psi.matrix()),
                        psi_dims: psi.dims().to_vec(),
                        effect: MatrixJson::from_matrix(effect),
                    },
                },
                hit: ChannelJson::from(hit),
                miss: ChannelJson::from(miss),
            },
        }
    }
}

impl SuperchannelJson {
    fn into_superchannel(self) -> Result<Superchannel> {
        let channel = |j: ChannelJson| BipartiteChannel::from_json(&serde_json::to_string(&j).expect("serializes"));
        match self {
            SuperchannelJson::PrePost { slot_dims, out_dims, memory, pre, post } => {
                let pre = Channel::new(pre.choi.to_matrix()?, pre.d_in, pre.d_out)?;
                let post = Channel::new(post.choi.to_matrix()?, post.d_in, post.d_out)?;
                Superchannel::pre_post(pre, post, memory, slot_dims, out_dims)
            }
            SuperchannelJson::MeasureAndPrepare { slot_dims, test, hit, miss } => {
                let test = match test {
                    TestJson::Choi { effect } => Test::Choi { effect: effect.to_matrix()? },
                    TestJson::Probe { psi, psi_dims, effect } => Test::Probe {
                        psi: DensityOperator::new(psi.to_matrix()?, psi_dims)?,
                        effect: effect.to_matrix()?,
                    },
                };
                Superchannel::measure_and_prepare(test, channel(hit)?, channel(miss)?, slot_dims)
            }
        }
    }
}

/// Identity supermap on the given dims, with trivial memory.
pub fn identity_superchannel(dims: [usize; 4]) -> Result<Superchannel> {
    Superchannel::pre_post(Channel::identity(in_dim(dims)), Channel::identity(out_dim(dims)), 1, dims, dims)
}

/// Superchannel that ignores its slot and always outputs `ch`.
pub fn constant_superchannel(ch: &BipartiteChannel, slot_dims: [usize; 4]) -> Result<Superchannel> {
    let n: usize = slot_dims.iter().product();
    Superchannel::measure_and_prepare(Test::Choi { effect: identity(n) }, ch.clone(), ch.clone(), slot_dims)
}
