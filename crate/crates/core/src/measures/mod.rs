//! Entanglement measures for bipartite channels.
//!
//! Free channels are approximated from outside by PPT channels (Choi
//! matrix with positive partial transpose across `A0 A1 : B0 B1`), so
//! robustness and hypothesis-testing values computed here lower-bound their
//! separable counterparts. Each result carries a [`MeasureReport`] stating
//! which kind of bound it is.

mod diamond;
mod hypothesis;
mod inequalities;
pub(crate) mod lmi;
mod nielsen;
mod robustness;
pub(crate) mod structure;

pub use diamond::{choi_trace_distance, diamond_bounds, diamond_distance, dmax, DiamondBounds};
pub use hypothesis::{
    eh_fixed_input, eh_fixed_input_dual, eh_maximize, hypothesis_testing_divergence, max_overlap_ppt, max_ppt_acceptance,
    EhResult,
};
pub use inequalities::{
    choi_sandwich_check, fidelity_diamond_transfer_check, fuchs_van_de_graaf_slack, inequality_suite, InequalitySummary,
    SandwichCheck, TransferCheck, INEQUALITY_TOL,
};
pub use nielsen::{nielsen_unitary_robustness, NielsenOutcome};
pub use robustness::{
    catalytic_smoothed_log_robustness, generalized_robustness, liberal_smoothed_log_robustness, log_robustness, log_robustness_via_dmax,
    robustness_with, smoothed_log_robustness, standard_robustness, Robustness, RobustnessKind, Smoothed, Structure,
};

use serde::{Deserialize, Serialize};

use crate::sdp::{Residuals, SdpStatus, DEFAULT_MAX_ITER};

/// Solver tolerance and iteration cap used by every measure.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverSettings {
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for SolverSettings {
    fn default() -> Self {
        SolverSettings { tol: 1e-8, max_iter: DEFAULT_MAX_ITER }
    }
}

/// How a reported value relates to the quantity it names.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundKind {
    Exact,
    LowerBoundViaPpt,
    UpperBoundViaSampling,
    Heuristic,
}

/// A real value or `+infinity`, serialized as a number or the string `"+inf"`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Value {
    Finite(f64),
    Infinite,
}

impl Value {
    pub fn finite(&self) -> Option<f64> {
        match *self {
            Value::Finite(v) => Some(v),
            Value::Infinite => None,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Value::Infinite)
    }

    /// Numeric view with `+inf` mapped to `f64::INFINITY`, for comparisons.
    pub fn as_f64(&self) -> f64 {
        self.finite().unwrap_or(f64::INFINITY)
    }
}

impl Serialize for Value {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match *self {
            Value::Finite(v) => s.serialize_f64(v),
            Value::Infinite => s.serialize_str("+inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Value {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(v) => Ok(Value::Finite(v)),
            Raw::Str(s) if s == "+inf" => Ok(Value::Infinite),
            Raw::Str(s) => Err(serde::de::Error::custom(format!("unexpected value '{s}'"))),
        }
    }
}

/// Solver residuals attached to a report.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResidualSummary {
    pub status: SdpStatus,
    pub primal: f64,
    pub dual: f64,
    pub gap: f64,
}

impl ResidualSummary {
    pub fn closed_form() -> Self {
        ResidualSummary { status: SdpStatus::Optimal, primal: 0.0, dual: 0.0, gap: 0.0 }
    }

    pub(crate) fn from_solver(status: SdpStatus, r: &Residuals) -> Self {
        ResidualSummary { status, primal: r.primal, dual: r.dual, gap: r.gap }
    }

    /// Worst of two summaries.
    pub fn worst(&self, other: &ResidualSummary) -> ResidualSummary {
        let status = if self.status != SdpStatus::Optimal { self.status } else { other.status };
        ResidualSummary {
            status,
            primal: self.primal.max(other.primal),
            dual: self.dual.max(other.dual),
            gap: self.gap.max(other.gap),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasureReport {
    pub name: String,
    pub value: Value,
    pub bound_kind: BoundKind,
    pub epsilon: Option<f64>,
    pub residuals: ResidualSummary,
}

impl MeasureReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("plain data serializes")
    }
}

/// Round `x` to the nearest integer when it is within `1e-6`, so that
/// values such as `log2(4) = 1.9999999` do not fall to the wrong side of a
/// floor or ceiling.
pub fn snap(x: f64) -> f64 {
    let r = x.round();
    if (x - r).abs() <= 1e-6 {
        r
    } else {
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn infinite_value_serializes_as_marker() {
        let r = MeasureReport {
            name: "dmax".into(),
            value: Value::Infinite,
            bound_kind: BoundKind::Exact,
            epsilon: None,
            residuals: ResidualSummary::closed_form(),
        };
        let json = r.to_json();
        assert!(json.contains("\"+inf\""));
        let back: MeasureReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back, r);
        assert_eq!(snap(1.9999999), 2.0);
        assert_eq!(snap(1.99), 1.99);
    }
}
