use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative probabilities of the five variation operators.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OperatorProbabilities {
    pub insertion: f64,
    pub deletion: f64,
    pub swap: f64,
    pub substitution: f64,
    pub crossover: f64,
}

impl Default for OperatorProbabilities {
    fn default() -> Self {
        Self {
            insertion: 0.30,
            deletion: 0.15,
            swap: 0.15,
            substitution: 0.15,
            crossover: 0.25,
        }
    }
}

impl OperatorProbabilities {
    pub fn as_array(&self) -> [f64; 5] {
        [
            self.insertion,
            self.deletion,
            self.swap,
            self.substitution,
            self.crossover,
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvolutionConfig {
    pub population_size: usize,
    pub max_iterations: usize,
    /// Share of the top-rank list cloned into every new generation.
    pub elite_fraction: f64,
    pub tournament_size: usize,
    pub operators: OperatorProbabilities,
    /// Largest admissible column overlap between two top-rank entries,
    /// measured as `|A ∩ B| / min(|A|, |B|)`.
    pub overlap_threshold: f64,
    pub top_rank_capacity: usize,
    /// Base of the crowding divisor `penalty_base ^ theta`.
    pub penalty_base: f64,
    pub rng_seed: u64,
    /// Minimum expected rows per bicluster; `None` derives it from the matrix.
    pub sigma: Option<usize>,
    /// Tolerance of the increasing rule (0 = strict).
    pub epsilon: f64,
    /// Fitness workers; 0 = one per CPU.
    pub threads: usize,
}

impl Default for EvolutionConfig {
    fn default() -> Self {
        Self {
            population_size: 400,
            max_iterations: 5_000,
            elite_fraction: 0.25,
            tournament_size: 4,
            operators: OperatorProbabilities::default(),
            overlap_threshold: 0.75,
            top_rank_capacity: 100,
            penalty_base: 1.2,
            rng_seed: 0,
            sigma: None,
            epsilon: 0.0,
            threads: 0,
        }
    }
}

impl EvolutionConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if self.population_size == 0 {
            return bad("population_size must be positive".into());
        }
        if !(self.elite_fraction > 0.0 && self.elite_fraction <= 1.0) {
            return bad(format!("elite_fraction {} not in (0, 1]", self.elite_fraction));
        }
        if self.tournament_size == 0 {
            return bad("tournament_size must be positive".into());
        }
        let probs = self.operators.as_array();
        if probs.iter().any(|p| !(*p >= 0.0) || !p.is_finite()) {
            return bad(format!("operator probabilities must be non-negative: {probs:?}"));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return bad(format!("operator probabilities sum to {total}, expected 1"));
        }
        if !(self.overlap_threshold > 0.0 && self.overlap_threshold <= 1.0) {
            return bad(format!(
                "overlap_threshold {} not in (0, 1]",
                self.overlap_threshold
            ));
        }
        if self.top_rank_capacity == 0 {
            return bad("top_rank_capacity must be positive".into());
        }
        if !(self.penalty_base > 1.0 && self.penalty_base.is_finite()) {
            return bad(format!("penalty_base {} must exceed 1", self.penalty_base));
        }
        if let Some(sigma) = self.sigma {
            if sigma < 2 {
                return bad(format!("sigma must be >= 2, got {sigma}"));
            }
        }
        if !(self.epsilon >= 0.0 && self.epsilon.is_finite()) {
            return bad(format!("epsilon {} must be non-negative", self.epsilon));
        }
        Ok(())
    }

    /// Parses either JSON or `key = value` lines (TOML). Missing keys keep
    /// their defaults.
    pub fn from_config_str(text: &str) -> Result<Self> {
        let trimmed = text.trim_start();
        let cfg: Self = if trimmed.starts_with('{') {
            serde_json::from_str(text)?
        } else {
            toml::from_str(text).map_err(|e| Error::InvalidConfig(e.to_string()))?
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_config_file(path: impl AsRef<std::path::Path>) -> Result<Self> {
        Self::from_config_str(&std::fs::read_to_string(path)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        let cfg = EvolutionConfig::default();
        cfg.validate().unwrap();
        assert_eq!(cfg.elite_fraction, 0.25);
        assert_eq!(cfg.penalty_base, 1.2);
    }

    #[test]
    fn probabilities_must_sum_to_one() {
        let mut cfg = EvolutionConfig::default();
        cfg.operators.crossover = 0.3;
        assert!(cfg.validate().is_err());
        cfg.operators.crossover = 0.25 + 1e-12;
        assert!(cfg.validate().is_ok());
    }

    #[test]
    fn parses_key_value_and_json() {
        let cfg = EvolutionConfig::from_config_str(
            "population_size = 50\noverlap_threshold = 0.5\n\n[operators]\ninsertion = 0.4\ndeletion = 0.05\n",
        )
        .unwrap();
        assert_eq!(cfg.population_size, 50);
        assert_eq!(cfg.overlap_threshold, 0.5);
        assert_eq!(cfg.operators.insertion, 0.4);
        assert_eq!(cfg.tournament_size, 4);

        let cfg = EvolutionConfig::from_config_str(r#"{"rng_seed": 9, "sigma": 6}"#).unwrap();
        assert_eq!(cfg.rng_seed, 9);
        assert_eq!(cfg.sigma, Some(6));

        assert!(EvolutionConfig::from_config_str("bogus_key = 1").is_err());
        assert!(EvolutionConfig::from_config_str("penalty_base = 1.0").is_err());
    }
}
