//! The `key = value` experiment configuration schema.
//!
//! Keys mirror the [`PinnConfig`] field paths (dotted for nested structs) so
//! that the same names work in config files and as `--<key> <value>` command
//! line overrides. The full schema:
//!
//! ```text
//! preset                      reference | desk   (applied first; optional)
//! seed                        u64
//! hidden_layers               usize ≥ 1
//! width                       usize ≥ 1
//! activation                  tanh | relu | identity
//! nu                          f64 > 0
//! x_domain.lo  x_domain.hi    f64
//! t_domain.lo  t_domain.hi    f64
//! n_interior n_initial n_boundary   usize ≥ 1
//! optimizer.kind              adam | sgd
//! optimizer.rate              f64 > 0
//! optimizer.rate_final        f64 > 0
//! optimizer.steps             u32
//! optimizer.batch             u32 ≥ 1
//! optimizer.weight_decay      f64 ≥ 0
//! optimizer.phase2_steps      u32
//! optimizer.phase2_rate       f64 > 0
//! optimizer.phase2_rate_final f64 > 0
//! optimizer.phase2_decay      f64 ≥ 0
//! optimizer.phase2_cap        f64 > 0
//! loss_weights.residual loss_weights.ic loss_weights.bc   f64 ≥ 0
//! ```
//!
//! Config files hold one `key = value` pair per line; `#` starts a comment;
//! blank lines are ignored.

use pinnspect_core::net::Activation;
use pinnspect_core::pinn::{OptimizerKind, PinnConfig};

use crate::errors::{config_error, CliError, Result};

/// Default seed when neither the preset argument nor a `seed` key gives one.
pub const DEFAULT_SEED: u64 = 42;

fn bad(key: &str, detail: impl std::fmt::Display) -> CliError {
    CliError::BadConfig {
        key: key.to_string(),
        detail: detail.to_string(),
    }
}

/// Parse the text of a config file into ordered `(key, value)` pairs.
pub fn parse_config_text(text: &str) -> Result<Vec<(String, String)>> {
    let mut pairs = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = match raw.split_once('#') {
            Some((before, _)) => before,
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| {
            CliError::Usage(format!(
                "config line {}: expected `key = value`, got `{}`",
                lineno + 1,
                line
            ))
        })?;
        pairs.push((k.trim().to_string(), v.trim().to_string()));
    }
    Ok(pairs)
}

/// Incremental builder: preset base, then key applications in order.
pub struct ConfigBuilder {
    config: PinnConfig,
}

impl ConfigBuilder {
    /// Start from a named preset.
    pub fn from_preset(name: &str, seed: u64) -> Result<Self> {
        let config = match name {
            "reference" => PinnConfig::reference(seed),
            "desk" => PinnConfig::desk(seed),
            other => {
                return Err(bad(
                    "preset",
                    format!("unknown preset `{other}` (expected reference | desk)"),
                ))
            }
        };
        Ok(ConfigBuilder { config })
    }

    /// Apply `(key, value)` pairs: any `preset` key first, the rest in order.
    pub fn from_pairs(pairs: &[(String, String)], default_preset: &str) -> Result<Self> {
        let mut presets = pairs.iter().filter(|(k, _)| k == "preset");
        let preset = match (presets.next(), presets.next()) {
            (_, Some(_)) => return Err(bad("preset", "given more than once")),
            (Some((_, v)), None) => v.as_str(),
            (None, None) => default_preset,
        };
        let mut builder = ConfigBuilder::from_preset(preset, DEFAULT_SEED)?;
        for (k, v) in pairs.iter().filter(|(k, _)| k != "preset") {
            builder.apply(k, v)?;
        }
        Ok(builder)
    }

    fn parse<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
        value
            .parse::<T>()
            .map_err(|_| bad(key, format!("cannot parse `{value}`")))
    }

    /// Apply one key. Unknown keys are rejected by name.
    pub fn apply(&mut self, key: &str, value: &str) -> Result<()> {
        let c = &mut self.config;
        match key {
            "seed" => c.seed = Self::parse(key, value)?,
            "hidden_layers" => c.hidden_layers = Self::parse(key, value)?,
            "width" => c.width = Self::parse(key, value)?,
            "activation" => c.activation = Activation::parse(value).map_err(config_error)?,
            "nu" => c.nu = Self::parse(key, value)?,
            "x_domain.lo" => c.x_domain.0 = Self::parse(key, value)?,
            "x_domain.hi" => c.x_domain.1 = Self::parse(key, value)?,
            "t_domain.lo" => c.t_domain.0 = Self::parse(key, value)?,
            "t_domain.hi" => c.t_domain.1 = Self::parse(key, value)?,
            "n_interior" => c.n_interior = Self::parse(key, value)?,
            "n_initial" => c.n_initial = Self::parse(key, value)?,
            "n_boundary" => c.n_boundary = Self::parse(key, value)?,
            "optimizer.kind" => {
                c.optimizer.kind = match value {
                    "adam" => OptimizerKind::Adam,
                    "sgd" => OptimizerKind::Sgd,
                    other => return Err(bad(key, format!("unknown optimizer `{other}`"))),
                }
            }
            "optimizer.rate" => c.optimizer.rate = Self::parse(key, value)?,
            "optimizer.rate_final" => c.optimizer.rate_final = Self::parse(key, value)?,
            "optimizer.steps" => c.optimizer.steps = Self::parse(key, value)?,
            "optimizer.batch" => c.optimizer.batch = Self::parse(key, value)?,
            "optimizer.weight_decay" => c.optimizer.weight_decay = Self::parse(key, value)?,
            "optimizer.phase2_steps" => c.optimizer.phase2_steps = Self::parse(key, value)?,
            "optimizer.phase2_rate" => c.optimizer.phase2_rate = Self::parse(key, value)?,
            "optimizer.phase2_rate_final" => {
                c.optimizer.phase2_rate_final = Self::parse(key, value)?
            }
            "optimizer.phase2_decay" => c.optimizer.phase2_decay = Self::parse(key, value)?,
            "optimizer.phase2_cap" => c.optimizer.phase2_cap = Self::parse(key, value)?,
            "loss_weights.residual" => c.loss_weights.residual = Self::parse(key, value)?,
            "loss_weights.ic" => c.loss_weights.ic = Self::parse(key, value)?,
            "loss_weights.bc" => c.loss_weights.bc = Self::parse(key, value)?,
            other => return Err(bad(other, "unknown configuration key")),
        }
        Ok(())
    }

    /// Validate and return the final configuration.
    pub fn finish(self) -> Result<PinnConfig> {
        self.config.validate().map_err(config_error)?;
        Ok(self.config)
    }
}

/// Canonical text encoding of a configuration (key-sorted JSON); the digest
/// in dump headers and manifests is the SHA-256 of this string.
pub fn canonical_config(config: &PinnConfig) -> String {
    // serde_json emits struct fields in declaration order, which is stable
    // for a fixed crate version; the config digest therefore identifies
    // (schema version, values).
    serde_json::to_string(config).expect("PinnConfig serialization cannot fail")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_text_round_trip() {
        let text = "# comment\npreset = desk\nseed = 7\n\noptimizer.rate = 1e-3 # inline\n";
        let pairs = parse_config_text(text).unwrap();
        assert_eq!(
            pairs,
            vec![
                ("preset".to_string(), "desk".to_string()),
                ("seed".to_string(), "7".to_string()),
                ("optimizer.rate".to_string(), "1e-3".to_string()),
            ]
        );
        let config = ConfigBuilder::from_pairs(&pairs, "reference")
            .unwrap()
            .finish()
            .unwrap();
        assert_eq!(config.seed, 7);
        assert_eq!(config.hidden_layers, 4); // desk preset
        assert_eq!(config.optimizer.rate, 1e-3);
    }

    #[test]
    fn unknown_key_is_named() {
        let mut b = ConfigBuilder::from_preset("desk", 1).unwrap();
        match b.apply("optimizer.momentum", "0.9") {
            Err(CliError::BadConfig { key, .. }) => assert_eq!(key, "optimizer.momentum"),
            other => panic!("expected BadConfig, got {other:?}"),
        }
    }

    #[test]
    fn core_validation_propagates_key() {
        let mut b = ConfigBuilder::from_preset("desk", 1).unwrap();
        b.apply("nu", "-1").unwrap();
        match b.finish() {
            Err(CliError::BadConfig { key, .. }) => assert_eq!(key, "nu"),
            other => panic!("expected BadConfig, got {other:?}"),
        }
    }

    #[test]
    fn duplicate_preset_rejected() {
        let pairs = vec![
            ("preset".to_string(), "desk".to_string()),
            ("preset".to_string(), "reference".to_string()),
        ];
        assert!(ConfigBuilder::from_pairs(&pairs, "reference").is_err());
    }
}
