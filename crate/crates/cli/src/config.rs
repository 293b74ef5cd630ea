//! Experiment configuration (TOML).

use std::path::Path;

use anyhow::{bail, Context, Result};
use qbc_core::adversary::StrategySpec;
use qbc_core::optics::OpticsParams;
use qbc_core::protocol::{Bit, ProtocolParams};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

/// The complete default configuration, as printed by `--print-default-config`.
pub const DEFAULT_CONFIG: &str = include_str!("default_config.toml");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub master_seed: u64,
    pub trials: usize,
    pub output_path: String,
    pub optics: OpticsParams,
    pub protocol: ProtocolSection,
    pub strategy: StrategySpec,
    pub sweep: SweepSection,
    pub concealing: ConcealingSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProtocolSection {
    pub n_rounds: usize,
    pub alpha: f64,
    pub unveil_time_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSection {
    pub n_values: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConcealingSection {
    pub n_rounds: usize,
    pub trials: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            master_seed: 7,
            trials: 2000,
            output_path: "-".into(),
            optics: OpticsParams::default(),
            protocol: ProtocolSection::default(),
            strategy: StrategySpec::honest(Bit::One),
            sweep: SweepSection::default(),
            concealing: ConcealingSection::default(),
        }
    }
}

impl Default for ProtocolSection {
    fn default() -> Self {
        Self {
            n_rounds: 60,
            alpha: 0.01,
            unveil_time_s: 1.0,
        }
    }
}

impl Default for SweepSection {
    fn default() -> Self {
        Self {
            n_values: vec![12, 24, 36, 48],
        }
    }
}

impl Default for ConcealingSection {
    fn default() -> Self {
        Self {
            n_rounds: 8,
            trials: 10_000,
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).context("malformed configuration")?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::from_toml(&text).with_context(|| format!("in {}", path.display()))
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            bail!("trials must be at least 1");
        }
        if self.concealing.trials == 0 {
            bail!("concealing.trials must be at least 1");
        }
        if !self.sweep.n_values.windows(2).all(|w| w[0] < w[1]) {
            bail!(
                "sweep.n_values must be strictly increasing, got {:?}",
                self.sweep.n_values
            );
        }
        if self.protocol.unveil_time_s.is_nan() || self.protocol.unveil_time_s < 0.0 {
            bail!("protocol.unveil_time_s must be non-negative");
        }
        self.protocol_params().validate()?;
        self.strategy.validate()?;
        Ok(())
    }

    pub fn protocol_params(&self) -> ProtocolParams {
        ProtocolParams {
            n_rounds: self.protocol.n_rounds,
            alpha: self.protocol.alpha,
            optics: self.optics,
            master_seed: self.master_seed,
        }
    }

    /// SHA-256 of the canonical TOML form, as lowercase hex.
    pub fn sha256(&self) -> String {
        let text = toml::to_string(self).expect("configuration serializes");
        Sha256::digest(text.as_bytes())
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }

    /// Comment line stamped on every CSV output.
    pub fn stamp(&self) -> String {
        format!("# seed={} config_sha256={}", self.master_seed, self.sha256())
    }
}

/// Parse a strategy label such as `honest-1`, `guess-slit-posterior` or `no-detection-0.5`.
pub fn parse_strategy(label: &str) -> Result<StrategySpec> {
    use qbc_core::adversary::{GuessMode, StrategyKind};
    let spec = match label {
        "honest-0" => StrategySpec::honest(Bit::Zero),
        "honest-1" => StrategySpec::honest(Bit::One),
        "fabricate-screen" => StrategySpec::fabricate_screen(),
        "fabricate-screen-blind" => StrategySpec::new(StrategyKind::FabricateScreen { blind: true }),
        "guess-slit" => StrategySpec::guess_slit(GuessMode::Uniform),
        "guess-slit-posterior" => StrategySpec::guess_slit(GuessMode::Posterior),
        other => match other.strip_prefix("no-detection-") {
            Some(p) => StrategySpec::no_detection(
                p.parse()
                    .with_context(|| format!("bad announce probability in {other:?}"))?,
            ),
            None => bail!(
                "unknown strategy {other:?} (expected honest-0, honest-1, fabricate-screen, \
                 fabricate-screen-blind, guess-slit, guess-slit-posterior or no-detection-<p>)"
            ),
        },
    };
    spec.validate()?;
    Ok(spec)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn embedded_default_matches_code_default() {
        assert_eq!(
            ExperimentConfig::from_toml(DEFAULT_CONFIG).unwrap(),
            ExperimentConfig::default()
        );
    }

    #[test]
    fn partial_files_keep_defaults() {
        let cfg = ExperimentConfig::from_toml("master_seed = 3\n[protocol]\nn_rounds = 5\n").unwrap();
        assert_eq!(cfg.master_seed, 3);
        assert_eq!(cfg.protocol.n_rounds, 5);
        assert_eq!(cfg.protocol.alpha, 0.01);
        assert_eq!(cfg.optics, OpticsParams::default());
    }

    #[test]
    fn bad_configs_are_rejected() {
        for text in [
            "bogus = 1",
            "[optics]\nwavelength_m = -1.0",
            "[sweep]\nn_values = [24, 12]",
            "[protocol]\nalpha = 1.5",
            "trials = 0",
            "[strategy]\nkind = \"no-detection\"\nannounce_prob = 2.0",
        ] {
            assert!(ExperimentConfig::from_toml(text).is_err(), "{text}");
        }
    }

    #[test]
    fn hash_tracks_content() {
        let a = ExperimentConfig::default();
        let b = ExperimentConfig {
            master_seed: 8,
            ..a.clone()
        };
        assert_eq!(a.sha256(), ExperimentConfig::default().sha256());
        assert_ne!(a.sha256(), b.sha256());
        assert_eq!(a.sha256().len(), 64);
    }

    #[test]
    fn strategy_labels_round_trip() {
        for label in [
            "honest-0",
            "honest-1",
            "fabricate-screen",
            "fabricate-screen-blind",
            "guess-slit",
            "guess-slit-posterior",
            "no-detection-0.5",
        ] {
            assert_eq!(parse_strategy(label).unwrap().label(), label);
        }
        assert!(parse_strategy("no-detection-7").is_err());
        assert!(parse_strategy("psychic").is_err());
    }
}
