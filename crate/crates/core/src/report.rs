//! Run reports: measure reports plus the context needed to read them.

use serde::{Deserialize, Serialize};

use crate::measures::{MeasureReport, SolverSettings};
use crate::VERSION;

/// One run of an experiment. Contains no timestamps or host data, so equal
/// inputs give byte-identical JSON.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunReport {
    pub version: String,
    pub command: String,
    pub settings: SolverSettings,
    pub seed: u64,
    pub parameters: serde_json::Value,
    pub reports: Vec<MeasureReport>,
    /// Command-specific structured output.
    pub details: serde_json::Value,
    /// Failed internal assertions; empty on success.
    pub failures: Vec<String>,
}

impl RunReport {
    pub fn new(command: &str, settings: SolverSettings, seed: u64, parameters: serde_json::Value) -> Self {
        RunReport {
            version: VERSION.to_string(),
            command: command.to_string(),
            settings,
            seed,
            parameters,
            reports: Vec::new(),
            details: serde_json::Value::Null,
            failures: Vec::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    /// Record `message` as a failure unless `ok`.
    pub fn check(&mut self, ok: bool, message: impl Into<String>) {
        if !ok {
            self.failures.push(message.into());
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data serializes")
    }

    /// Fixed-width table of the measure reports followed by the failures.
    pub fn to_table(&self) -> String {
        let mut out = format!(
            "chanent {} | {} | seed {} | tol {:e} | max_iter {}\n",
            self.version, self.command, self.seed, self.settings.tol, self.settings.max_iter
        );
        out.push_str(&format!(
            "{:<32} {:>16} {:<24} {:>8} {:>10}\n",
            "quantity", "value", "bound kind", "eps", "residual"
        ));
        for r in &self.reports {
            let value = match r.value.finite() {
                Some(v) => format!("{v:.9}"),
                None => "+inf".to_string(),
            };
            let kind = serde_json::to_value(r.bound_kind)
                .ok()
                .and_then(|v| v.as_str().map(str::to_string))
                .unwrap_or_default();
            let eps = r.epsilon.map(|e| format!("{e}")).unwrap_or_else(|| "-".into());
            let res = r.residuals.primal.max(r.residuals.dual).max(r.residuals.gap);
            out.push_str(&format!("{:<32} {:>16} {:<24} {:>8} {:>10.2e}\n", r.name, value, kind, eps, res));
        }
        let mut rows = Vec::new();
        flatten("", &self.details, &mut rows);
        for (k, v) in rows {
            out.push_str(&format!("{k:<48} {v}\n"));
        }
        if self.failures.is_empty() {
            out.push_str("status: ok\n");
        } else {
            for f in &self.failures {
                out.push_str(&format!("FAILED: {f}\n"));
            }
        }
        out
    }
}

/// Scalar leaves of `v` as `(path, value)`. Arrays of scalars or arrays
/// (matrix data) and nested `reports`, already listed above, are skipped.
fn flatten(prefix: &str, v: &serde_json::Value, out: &mut Vec<(String, String)>) {
    use serde_json::Value as J;
    let join = |k: &str| if prefix.is_empty() { k.to_string() } else { format!("{prefix}.{k}") };
    match v {
        J::Object(m) => {
            for (k, x) in m.iter().filter(|(k, _)| k.as_str() != "reports") {
                flatten(&join(k), x, out);
            }
        }
        J::Array(a) if a.iter().all(|x| x.is_object()) => {
            for (i, x) in a.iter().enumerate() {
                flatten(&join(&i.to_string()), x, out);
            }
        }
        J::Array(_) | J::Null => {}
        J::Number(n) => out.push((prefix.to_string(), n.to_string())),
        J::String(s) => out.push((prefix.to_string(), s.clone())),
        J::Bool(b) => out.push((prefix.to_string(), b.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::{BoundKind, ResidualSummary, Value};

    #[test]
    fn json_is_deterministic_and_table_lists_reports() {
        let mut r = RunReport::new("demo", SolverSettings::default(), 7, serde_json::json!({"k": 2}));
        r.reports.push(MeasureReport {
            name: "log_robustness".into(),
            value: Value::Finite(2.0),
            bound_kind: BoundKind::LowerBoundViaPpt,
            epsilon: None,
            residuals: ResidualSummary::closed_form(),
        });
        r.details = serde_json::json!({"rows": [{"x": 1.5}], "m": [[1, 2]]});
        assert_eq!(r.to_json(), r.clone().to_json());
        assert!(r.to_table().contains("rows.0.x"));
        assert!(!r.to_table().contains("m "));
        assert!(r.to_table().contains("lower-bound-via-ppt"));
        r.check(false, "bad");
        assert!(!r.passed());
        assert!(r.to_table().contains("FAILED: bad"));
    }
}
