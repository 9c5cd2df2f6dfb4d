//! Closed-form robustness of bipartite unitaries whose operator Schmidt
//! factors are proportional to unitaries.

use serde::{Deserialize, Serialize};

use crate::channel::{operator_schmidt, SchmidtTerm};
use crate::error::{Error, Result};
use crate::linalg::{c, identity, ComplexMatrix};

/// Result of [`nielsen_unitary_robustness`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "status")]
pub enum NielsenOutcome {
    /// `(sum_j u_j)^2 / (|A||B|) - 1`, equal to both robustnesses.
    Value { value: f64 },
    /// The Schmidt factors are not proportional to unitaries.
    Inapplicable { reason: String },
}

impl NielsenOutcome {
    pub fn value(&self) -> Option<f64> {
        match self {
            NielsenOutcome::Value { value } => Some(*value),
            NielsenOutcome::Inapplicable { .. } => None,
        }
    }
}

const HYPOTHESIS_TOL: f64 = 1e-8;

fn is_scaled_unitary(m: &ComplexMatrix) -> bool {
    let d = m.nrows();
    let target = identity(d) * c(1.0 / d as f64, 0.0);
    (m * m.adjoint() - target).iter().all(|z| z.norm() <= HYPOTHESIS_TOL)
}

/// Orthonormal Weyl basis `U_kl / sqrt(d)` with
/// `U_kl = sum_s exp(2 pi i s l / d) |k + s><s|`.
fn weyl_basis(d: usize) -> Vec<ComplexMatrix> {
    let mut out = Vec::with_capacity(d * d);
    let norm = 1.0 / (d as f64).sqrt();
    for k in 0..d {
        for l in 0..d {
            let mut u = crate::linalg::zeros(d, d);
            for s in 0..d {
                let phase = 2.0 * std::f64::consts::PI * (s * l) as f64 / d as f64;
                u[((k + s) % d, s)] = c(phase.cos() * norm, phase.sin() * norm);
            }
            out.push(u);
        }
    }
    out
}

/// Re-express a block of equal Schmidt coefficients in the Weyl basis on
/// `A`. Only possible when the block spans the whole operator space of `A`.
fn rotate_block(block: &[SchmidtTerm]) -> Option<Vec<SchmidtTerm>> {
    let da = block[0].a.nrows();
    if block.len() != da * da {
        return None;
    }
    let coef = block[0].coefficient;
    let mut out = Vec::with_capacity(block.len());
    for w in weyl_basis(da) {
        // B~ = sum_j <W, A_j> B_j keeps sum_j A_j (x) B_j unchanged.
        let mut b = crate::linalg::zeros(block[0].b.nrows(), block[0].b.ncols());
        for t in block {
            let overlap = (w.adjoint() * &t.a).trace();
            b += &t.b * overlap;
        }
        out.push(SchmidtTerm { coefficient: coef, a: w, b });
    }
    Some(out)
}

/// Robustness of the unitary channel of `u` on `A (x) B`, when every operator
/// Schmidt factor satisfies `A_j A_j^dagger = I/|A|` and `B_j B_j^dagger = I/|B|`.
///
/// Degenerate Schmidt coefficients leave the factors defined only up to a
/// unitary mixing; a degenerate block spanning all operators on `A` is
/// rotated into the Weyl basis before the hypothesis is tested.
pub fn nielsen_unitary_robustness(u: &ComplexMatrix, da: usize, db: usize) -> Result<NielsenOutcome> {
    let n = da * db;
    if u.nrows() != n || u.ncols() != n {
        return Err(Error::Dimension(format!("operator is not on {da}x{db}")));
    }
    let dev = (u * u.adjoint() - identity(n)).iter().map(|z| z.norm()).fold(0.0, f64::max);
    if dev > 1e-9 {
        return Err(Error::Invalid(format!("operator is not unitary (deviation {dev:.2e})")));
    }
    let terms = operator_schmidt(u, da, db)?;
    let mut blocks: Vec<Vec<SchmidtTerm>> = Vec::new();
    for t in terms {
        match blocks.last_mut() {
            Some(b) if (b[0].coefficient - t.coefficient).abs() <= 1e-9 => b.push(t),
            _ => blocks.push(vec![t]),
        }
    }
    let mut sum = 0.0;
    for block in blocks {
        let ok = |b: &[SchmidtTerm]| b.iter().all(|t| is_scaled_unitary(&t.a) && is_scaled_unitary(&t.b));
        let fixed = if ok(&block) {
            block
        } else {
            match rotate_block(&block) {
                Some(r) if ok(&r) => r,
                _ => {
                    return Ok(NielsenOutcome::Inapplicable {
                        reason: format!(
                            "Schmidt factors for coefficient {:.6} are not proportional to unitaries",
                            block[0].coefficient
                        ),
                    })
                }
            }
        };
        sum += fixed.iter().map(|t| t.coefficient).sum::<f64>();
    }
    Ok(NielsenOutcome::Value { value: sum * sum / n as f64 - 1.0 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::swap_unitary;
    use crate::linalg::kron;
    use crate::rng;

    #[test]
    fn swap_values() {
        for k in 2..=3 {
            let v = nielsen_unitary_robustness(&swap_unitary(k), k, k).unwrap();
            assert!((v.value().unwrap() - (k * k - 1) as f64).abs() < 1e-10, "{v:?}");
        }
    }

    #[test]
    fn product_unitary_is_free_and_generic_is_inapplicable() {
        let mut g = rng::seeded(4);
        let (a, b) = (rng::unitary(&mut g, 2), rng::unitary(&mut g, 3));
        let v = nielsen_unitary_robustness(&kron(&a, &b), 2, 3).unwrap();
        assert!(v.value().unwrap().abs() < 1e-10);
        // Generic two-qubit unitaries have unitary (Pauli) Schmidt factors; qubit-qutrit ones do not.
        let generic = rng::unitary(&mut g, 6);
        assert!(matches!(nielsen_unitary_robustness(&generic, 2, 3).unwrap(), NielsenOutcome::Inapplicable { .. }));
        assert!(nielsen_unitary_robustness(&(identity(4) * c(2.0, 0.0)), 2, 2).is_err());
    }
}
