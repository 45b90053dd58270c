use std::path::{Path, PathBuf};

use cxbody::membership::DictionaryConfig;
use cxbody::{BodySpec, Measure};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Experiment {
    Intersect,
    Membership,
    Approximate,
    Stability,
    Hyperplane,
    BpCompare,
    Sharpness,
    Busemann,
    Roundness,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::Intersect => "intersect",
            Experiment::Membership => "membership",
            Experiment::Approximate => "approximate",
            Experiment::Stability => "stability",
            Experiment::Hyperplane => "hyperplane",
            Experiment::BpCompare => "bp_compare",
            Experiment::Sharpness => "sharpness",
            Experiment::Busemann => "busemann",
            Experiment::Roundness => "roundness",
        }
    }
}

/// One experiment run, read from JSON.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    /// Complex dimension.
    pub n: usize,
    /// The body under study.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub body: Option<BodySpec>,
    /// Comparison body `L` for stability and bp_compare.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference: Option<BodySpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub measure: Option<Measure>,
    /// Section rule level.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub level: Option<usize>,
    /// Level of the rule on the full sphere.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub outer_level: Option<usize>,
    #[serde(default)]
    pub seed: u64,
    /// Overrides the experiment's pass/fail tolerance.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    /// Randomized trials; for stability, hyperplane and bp_compare, giving
    /// trials instead of a body selects the randomized suite.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trials: Option<usize>,
    /// Sample pairs for the convexity check.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    /// Atom budgets for approximate.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub budgets: Option<Vec<usize>>,
    /// Annulus parameters for sharpness.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub j_values: Option<Vec<u32>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dictionary: Option<DictionaryConfig>,
    /// Output directory.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let cfg: ExperimentConfig = serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        Self::from_json(&text).map_err(|e| match e {
            CliError::Config(m) => CliError::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    /// Checks that go beyond the schema.
    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |m: String| Err(CliError::Config(m));
        if self.n < 2 {
            return bad(format!("n must be at least 2, got {}", self.n));
        }
        let needs_body = matches!(
            self.experiment,
            Experiment::Intersect | Experiment::Membership | Experiment::Approximate | Experiment::Busemann | Experiment::Roundness
        );
        if needs_body && self.body.is_none() {
            return bad(format!("experiment {} needs a body", self.experiment.name()));
        }
        let suite = matches!(self.experiment, Experiment::Stability | Experiment::Hyperplane | Experiment::BpCompare);
        if suite && self.body.is_some() && self.trials.is_some() {
            return bad("give either a body or trials, not both".into());
        }
        if matches!(self.experiment, Experiment::Stability | Experiment::BpCompare) && self.body.is_some() && self.reference.is_none() {
            return bad(format!("experiment {} with a body needs a reference body", self.experiment.name()));
        }
        if let Some(t) = self.tolerance {
            if !(t >= 0.0 && t.is_finite()) {
                return bad(format!("tolerance must be finite and nonnegative, got {t}"));
            }
        }
        if let Some(b) = &self.budgets {
            if b.is_empty() || b.contains(&0) {
                return bad("budgets must be a nonempty list of positive integers".into());
            }
        }
        if let Some(j) = &self.j_values {
            if j.is_empty() {
                return bad("j_values must be nonempty".into());
            }
        }
        if let Some(m) = &self.measure {
            m.validate(self.n).map_err(|e| CliError::Config(format!("measure: {e}")))?;
        }
        for (name, spec) in [("body", &self.body), ("reference", &self.reference)] {
            if let Some(s) = spec {
                s.build(self.n).map_err(|e| CliError::Config(format!("{name}: {e}")))?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn missing_n_names_the_field_and_line() {
        let err = ExperimentConfig::from_json("{\n  \"experiment\": \"hyperplane\"\n}").unwrap_err().to_string();
        assert!(err.contains("missing field `n`"), "{err}");
        assert!(err.contains("line 3"), "{err}");
    }

    #[test]
    fn unknown_field_rejected() {
        let err = ExperimentConfig::from_json(r#"{"experiment": "hyperplane", "n": 2, "colour": 1}"#).unwrap_err().to_string();
        assert!(err.contains("unknown field `colour`"), "{err}");
    }

    #[test]
    fn body_required() {
        assert!(ExperimentConfig::from_json(r#"{"experiment": "intersect", "n": 2}"#).is_err());
        assert!(ExperimentConfig::from_json(r#"{"experiment": "intersect", "n": 2, "body": {"type": "ball", "radius": 1}}"#).is_ok());
    }

    #[test]
    fn bad_body_rejected() {
        let text = r#"{"experiment": "intersect", "n": 2, "body": {"type": "ellipsoid", "a": 1, "b": 2, "xi": [1, 0]}}"#;
        assert!(ExperimentConfig::from_json(text).is_err());
    }

    #[test]
    fn round_trip() {
        let text = r#"{"experiment": "sharpness", "n": 2, "j_values": [10, 50], "seed": 3}"#;
        let cfg = ExperimentConfig::from_json(text).unwrap();
        let back = ExperimentConfig::from_json(&serde_json::to_string(&cfg).unwrap()).unwrap();
        assert_eq!(cfg, back);
    }
}
