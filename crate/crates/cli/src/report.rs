//! Pass/fail comparisons of empirical values against references.

use serde::Serialize;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Metric {
    pub name: String,
    pub empirical: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reference: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    pub pass: bool,
}

impl Metric {
    /// Passes iff `|empirical - reference| <= tolerance`.
    pub fn check(name: impl Into<String>, empirical: f64, reference: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            empirical,
            reference: Some(reference),
            tolerance: Some(tolerance),
            pass: (empirical - reference).abs() <= tolerance,
        }
    }

    /// A recorded value with nothing to compare against.
    pub fn info(name: impl Into<String>, value: f64) -> Self {
        Self {
            name: name.into(),
            empirical: value,
            reference: None,
            tolerance: None,
            pass: true,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct ComparisonReport {
    pub experiment: String,
    pub pass: bool,
    pub metrics: Vec<Metric>,
}

impl ComparisonReport {
    pub fn new(experiment: impl Into<String>) -> Self {
        Self {
            experiment: experiment.into(),
            pass: true,
            metrics: Vec::new(),
        }
    }

    pub fn push(&mut self, m: Metric) {
        self.pass &= m.pass;
        self.metrics.push(m);
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("report fields are plain values")
    }

    /// One line per metric for the terminal.
    pub fn summary(&self) -> String {
        let mut out = format!("experiment {}: {}\n", self.experiment, if self.pass { "pass" } else { "FAIL" });
        for m in &self.metrics {
            let detail = match (m.reference, m.tolerance) {
                (Some(r), Some(t)) => format!(" (reference {r}, tolerance {t}) {}", if m.pass { "pass" } else { "FAIL" }),
                _ => String::new(),
            };
            out.push_str(&format!("  {} = {}{detail}\n", m.name, m.empirical));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pass_follows_tolerance() {
        assert!(Metric::check("x", 1.01, 1.0, 0.02).pass);
        assert!(!Metric::check("x", 1.03, 1.0, 0.02).pass);
        assert!(!Metric::check("x", f64::NAN, 1.0, 0.02).pass);
        let mut r = ComparisonReport::new("t");
        r.push(Metric::info("n", 3.0));
        assert!(r.pass);
        r.push(Metric::check("ks", 0.2, 0.0, 0.05));
        assert!(!r.pass);
        let text = r.to_toml();
        assert!(text.contains("[[metrics]]") && text.contains("name = \"ks\""), "{text}");
    }
}
