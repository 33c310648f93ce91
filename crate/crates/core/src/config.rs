//! Scenario configuration: defaults, presets, file loading, env overrides
//! and validation.
//!
//! Config files are TOML with one key per parameter. A file may name a
//! `preset`; explicit keys then override the preset's numbers, but may not
//! contradict the preset's feature toggles. Every key can also be overridden
//! through an environment variable `LLOYDS_SIM_<KEY>` (key upper-cased).

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::ConfigError;

pub const ENV_PREFIX: &str = "LLOYDS_SIM_";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum TopologyKind {
    Circular,
    Graph,
    #[default]
    Random,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Preset {
    Scenario1,
    Scenario2,
    Scenario3,
    Scenario4,
}

impl Preset {
    pub fn parse(name: &str) -> Result<Self, ConfigError> {
        match name.trim().to_ascii_lowercase().as_str() {
            "scenario1" | "1" => Ok(Preset::Scenario1),
            "scenario2" | "2" => Ok(Preset::Scenario2),
            "scenario3" | "3" => Ok(Preset::Scenario3),
            "scenario4" | "4" => Ok(Preset::Scenario4),
            _ => Err(ConfigError::UnknownPreset(name.to_string())),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Preset::Scenario1 => "scenario1",
            Preset::Scenario2 => "scenario2",
            Preset::Scenario3 => "scenario3",
            Preset::Scenario4 => "scenario4",
        }
    }

    pub fn features(self) -> Features {
        let base = Features {
            attritional: true,
            catastrophe: false,
            premium_em: true,
            var_em: false,
            lead_follow: false,
            markup: false,
        };
        match self {
            Preset::Scenario1 => base,
            Preset::Scenario2 => Features {
                catastrophe: true,
                ..base
            },
            Preset::Scenario3 => Features {
                catastrophe: true,
                premium_em: false,
                var_em: true,
                ..base
            },
            Preset::Scenario4 => Features {
                lead_follow: true,
                ..base
            },
        }
    }
}

/// Switchable model components.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Features {
    pub attritional: bool,
    pub catastrophe: bool,
    pub premium_em: bool,
    pub var_em: bool,
    pub lead_follow: bool,
    pub markup: bool,
}

impl Default for Features {
    fn default() -> Self {
        Preset::Scenario1.features()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScenarioConfig {
    pub preset: Option<Preset>,
    pub horizon_years: u32,
    pub num_syndicates: usize,
    pub num_brokers: usize,
    pub seeds: Vec<u64>,
    pub features: Features,

    // broker and network
    pub risks_per_day: f64,
    pub num_peril_regions: usize,
    pub risk_limit: f64,
    pub lead_top_k: usize,
    pub follow_top_k: usize,
    pub topology: TopologyKind,
    pub lead_consolidation_offset: u32,
    pub lead_selection_offset: u32,
    pub follow_consolidation_offset: u32,
    pub follow_selection_offset: u32,

    // attritional losses
    pub yearly_claim_frequency: f64,
    pub gamma_cov: f64,
    pub gamma_mean: f64,

    // catastrophe losses
    pub mean_cat_events_per_year: f64,
    pub pareto_shape: f64,
    pub min_cat_damage_fraction: f64,
    /// Upper truncation of the damage draw, as a multiple of the minimum.
    pub cat_truncation_multiple: f64,

    // syndicate
    pub initial_capital: f64,
    pub default_lead_line_size: f64,
    pub default_follow_line_size: f64,

    // actuarial pricing
    pub internal_experience_weight: f64,
    pub loss_recency_weight: f64,
    pub volatility_weight: f64,
    pub initial_claim_frequency: f64,
    pub initial_claim_severity: f64,

    // underwriter markup
    pub underwriter_recency_weight: f64,
    pub markup_gain: f64,
    pub markup_target_win_rate: f64,

    // dividend
    pub profit_fraction: f64,

    // VaR exposure management
    pub var_exceedance_probability: f64,
    pub var_safety_factor: f64,
    pub var_simulations: usize,

    // premium exposure management
    pub premium_reserve_ratio: f64,
    pub min_capital_reserve_ratio: f64,
    pub max_scaling_factor: f64,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig {
            preset: None,
            horizon_years: 50,
            num_syndicates: 5,
            num_brokers: 25,
            seeds: (0..10).collect(),
            features: Features::default(),

            risks_per_day: 0.06,
            num_peril_regions: 10,
            risk_limit: 10_000_000.0,
            lead_top_k: 2,
            follow_top_k: 5,
            topology: TopologyKind::Random,
            lead_consolidation_offset: 3,
            lead_selection_offset: 5,
            follow_consolidation_offset: 8,
            follow_selection_offset: 10,

            yearly_claim_frequency: 0.1,
            gamma_cov: 1.0,
            gamma_mean: 3_000_000.0,

            mean_cat_events_per_year: 0.05,
            pareto_shape: 5.0,
            min_cat_damage_fraction: 0.25,
            cat_truncation_multiple: 10.0,

            initial_capital: 10_000_000.0,
            default_lead_line_size: 0.5,
            default_follow_line_size: 0.1,

            internal_experience_weight: 0.5,
            loss_recency_weight: 0.2,
            volatility_weight: 0.0,
            initial_claim_frequency: 0.1,
            initial_claim_severity: 3_000_000.0,

            underwriter_recency_weight: 0.2,
            markup_gain: 1.0,
            markup_target_win_rate: 0.5,

            profit_fraction: 0.4,

            var_exceedance_probability: 0.05,
            var_safety_factor: 1.0,
            var_simulations: 100_000,

            premium_reserve_ratio: 0.5,
            min_capital_reserve_ratio: 1.0,
            max_scaling_factor: 1.0,
        }
    }
}

impl ScenarioConfig {
    pub fn preset(preset: Preset) -> Self {
        let mut cfg = ScenarioConfig {
            preset: Some(preset),
            features: preset.features(),
            ..ScenarioConfig::default()
        };
        if !cfg.features.lead_follow {
            cfg.follow_top_k = 0;
        }
        // The scenario experiments run without dividend venting.
        cfg.profit_fraction = 0.0;
        cfg
    }

    /// Follow requests only go out when lead/follow syndication is on.
    pub fn effective_follow_top_k(&self) -> usize {
        if self.features.lead_follow {
            self.follow_top_k
        } else {
            0
        }
    }

    pub fn horizon_days(&self) -> u32 {
        self.horizon_years * crate::des::DAYS_PER_YEAR
    }

    pub fn from_toml_str(text: &str) -> Result<Self, ConfigError> {
        let table: toml::Table = text.parse().map_err(|e: toml::de::Error| ConfigError::Parse(e.to_string()))?;
        Self::from_table(table, None)
    }

    /// Loads a config file, applies `LLOYDS_SIM_*` overrides and an optional
    /// preset given out of band (e.g. on the command line).
    pub fn load(path: &Path, cli_preset: Option<Preset>) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let mut table: toml::Table = text
            .parse()
            .map_err(|e: toml::de::Error| ConfigError::Parse(e.to_string()))?;
        apply_env_overrides(&mut table, std::env::vars())?;
        Self::from_table(table, cli_preset)
    }

    /// Preset (or defaults) plus environment overrides, without a file.
    pub fn from_env(preset: Option<Preset>) -> Result<Self, ConfigError> {
        let mut table = toml::Table::new();
        apply_env_overrides(&mut table, std::env::vars())?;
        Self::from_table(table, preset)
    }

    pub fn from_table(mut table: toml::Table, cli_preset: Option<Preset>) -> Result<Self, ConfigError> {
        let file_preset = match table.remove("preset") {
            Some(toml::Value::String(s)) => Some(Preset::parse(&s)?),
            Some(other) => return Err(ConfigError::Parse(format!("preset must be a string, got {other}"))),
            None => None,
        };
        let preset = match (file_preset, cli_preset) {
            (Some(a), Some(b)) if a != b => {
                return Err(ConfigError::PresetConflict {
                    preset: b.name().into(),
                    field: "preset",
                    expected: b.name().into(),
                    found: a.name().into(),
                })
            }
            (a, b) => a.or(b),
        };

        let base = match preset {
            Some(p) => ScenarioConfig::preset(p),
            None => ScenarioConfig::default(),
        };
        let mut merged = match toml::Table::try_from(&base) {
            Ok(t) => t,
            Err(e) => return Err(ConfigError::Parse(e.to_string())),
        };

        if let (Some(p), Some(toml::Value::Table(overrides))) = (preset, table.get("features")) {
            check_feature_conflicts(p, overrides)?;
        }

        for (key, value) in table {
            match (merged.get_mut(&key), value) {
                (Some(toml::Value::Table(dst)), toml::Value::Table(src)) => {
                    for (k, v) in src {
                        dst.insert(k, v);
                    }
                }
                (_, value) => {
                    merged.insert(key, value);
                }
            }
        }

        let cfg: ScenarioConfig = merged
            .try_into()
            .map_err(|e: toml::de::Error| ConfigError::Parse(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config is always serializable")
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        fn range(field: &'static str, value: f64, ok: bool, reason: &'static str) -> Result<(), ConfigError> {
            if ok && value.is_finite() {
                Ok(())
            } else {
                Err(ConfigError::Range {
                    field,
                    value: value.to_string(),
                    reason,
                })
            }
        }
        let unit = |f: &'static str, v: f64| range(f, v, (0.0..=1.0).contains(&v), "must lie in [0, 1]");
        let positive = |f: &'static str, v: f64| range(f, v, v > 0.0, "must be positive");
        let non_negative = |f: &'static str, v: f64| range(f, v, v >= 0.0, "must be non-negative");

        range("horizon_years", self.horizon_years as f64, self.horizon_years >= 1, "must be at least 1")?;
        range("num_brokers", self.num_brokers as f64, self.num_brokers >= 1, "must be at least 1")?;
        range("num_peril_regions", self.num_peril_regions as f64, self.num_peril_regions >= 1, "must be at least 1")?;
        range("lead_top_k", self.lead_top_k as f64, self.lead_top_k >= 1, "must be at least 1")?;
        if self.seeds.is_empty() {
            return Err(ConfigError::Range {
                field: "seeds",
                value: "[]".into(),
                reason: "at least one seed is required",
            });
        }
        let offsets = [
            self.lead_consolidation_offset,
            self.lead_selection_offset,
            self.follow_consolidation_offset,
            self.follow_selection_offset,
        ];
        if offsets[0] == 0 || offsets.windows(2).any(|w| w[0] >= w[1]) {
            return Err(ConfigError::Range {
                field: "lead_consolidation_offset",
                value: format!("{offsets:?}"),
                reason: "deadline offsets must be positive and strictly increasing",
            });
        }
        if self.follow_selection_offset >= crate::des::DAYS_PER_YEAR {
            return Err(ConfigError::Range {
                field: "follow_selection_offset",
                value: self.follow_selection_offset.to_string(),
                reason: "quotes must settle within the policy term",
            });
        }

        non_negative("risks_per_day", self.risks_per_day)?;
        positive("risk_limit", self.risk_limit)?;
        non_negative("yearly_claim_frequency", self.yearly_claim_frequency)?;
        positive("gamma_cov", self.gamma_cov)?;
        positive("gamma_mean", self.gamma_mean)?;
        non_negative("mean_cat_events_per_year", self.mean_cat_events_per_year)?;
        range("pareto_shape", self.pareto_shape, self.pareto_shape > 1.0, "must exceed 1")?;
        range(
            "min_cat_damage_fraction",
            self.min_cat_damage_fraction,
            self.min_cat_damage_fraction > 0.0 && self.min_cat_damage_fraction <= 1.0,
            "must lie in (0, 1]",
        )?;
        range(
            "cat_truncation_multiple",
            self.cat_truncation_multiple,
            self.cat_truncation_multiple > 1.0,
            "must exceed 1",
        )?;
        positive("initial_capital", self.initial_capital)?;
        range(
            "default_lead_line_size",
            self.default_lead_line_size,
            self.default_lead_line_size > 0.0 && self.default_lead_line_size <= 1.0,
            "must lie in (0, 1]",
        )?;
        range(
            "default_follow_line_size",
            self.default_follow_line_size,
            self.default_follow_line_size > 0.0 && self.default_follow_line_size <= 1.0,
            "must lie in (0, 1]",
        )?;
        unit("internal_experience_weight", self.internal_experience_weight)?;
        range(
            "loss_recency_weight",
            self.loss_recency_weight,
            self.loss_recency_weight > 0.0 && self.loss_recency_weight <= 1.0,
            "must lie in (0, 1]",
        )?;
        non_negative("volatility_weight", self.volatility_weight)?;
        non_negative("initial_claim_frequency", self.initial_claim_frequency)?;
        non_negative("initial_claim_severity", self.initial_claim_severity)?;
        unit("underwriter_recency_weight", self.underwriter_recency_weight)?;
        non_negative("markup_gain", self.markup_gain)?;
        unit("markup_target_win_rate", self.markup_target_win_rate)?;
        unit("profit_fraction", self.profit_fraction)?;
        range(
            "var_exceedance_probability",
            self.var_exceedance_probability,
            self.var_exceedance_probability > 0.0 && self.var_exceedance_probability < 1.0,
            "must lie in (0, 1)",
        )?;
        non_negative("var_safety_factor", self.var_safety_factor)?;
        if self.var_simulations < 1000 {
            return Err(ConfigError::Range {
                field: "var_simulations",
                value: self.var_simulations.to_string(),
                reason: "at least 1000 samples are required",
            });
        }
        non_negative("premium_reserve_ratio", self.premium_reserve_ratio)?;
        non_negative("min_capital_reserve_ratio", self.min_capital_reserve_ratio)?;
        range("max_scaling_factor", self.max_scaling_factor, self.max_scaling_factor >= 1.0, "must be at least 1")?;
        Ok(())
    }
}

fn check_feature_conflicts(preset: Preset, overrides: &toml::Table) -> Result<(), ConfigError> {
    let f = preset.features();
    let fixed: [(&'static str, bool); 6] = [
        ("attritional", f.attritional),
        ("catastrophe", f.catastrophe),
        ("premium_em", f.premium_em),
        ("var_em", f.var_em),
        ("lead_follow", f.lead_follow),
        ("markup", f.markup),
    ];
    for (name, expected) in fixed {
        if let Some(value) = overrides.get(name) {
            if value.as_bool() != Some(expected) {
                return Err(ConfigError::PresetConflict {
                    preset: preset.name().into(),
                    field: name,
                    expected: expected.to_string(),
                    found: value.to_string(),
                });
            }
        }
    }
    Ok(())
}

/// Overlays `LLOYDS_SIM_<KEY>` variables onto a parsed config table.
/// Feature toggles use `LLOYDS_SIM_FEATURES_<NAME>`.
pub fn apply_env_overrides<I>(table: &mut toml::Table, vars: I) -> Result<(), ConfigError>
where
    I: IntoIterator<Item = (String, String)>,
{
    let defaults = toml::Table::try_from(ScenarioConfig::default()).expect("serializable");
    let mut vars: Vec<(String, String)> = vars
        .into_iter()
        .filter(|(k, _)| k.starts_with(ENV_PREFIX))
        .collect();
    vars.sort();
    for (var, raw) in vars {
        let key = var[ENV_PREFIX.len()..].to_ascii_lowercase();
        let value = parse_env_value(&raw);
        if let Some(feature) = key.strip_prefix("features_") {
            let Some(b) = value.as_bool() else {
                return Err(ConfigError::Env { var, value: raw });
            };
            let entry = table
                .entry("features")
                .or_insert_with(|| toml::Value::Table(toml::Table::new()));
            if let toml::Value::Table(t) = entry {
                t.insert(feature.to_string(), toml::Value::Boolean(b));
            }
        } else if key == "preset" || defaults.contains_key(&key) {
            table.insert(key, value);
        } else {
            return Err(ConfigError::UnknownEnvKey(var));
        }
    }
    Ok(())
}

fn parse_env_value(raw: &str) -> toml::Value {
    let doc = format!("v = {raw}");
    match doc.parse::<toml::Table>() {
        Ok(mut t) => t.remove("v").unwrap_or_else(|| toml::Value::String(raw.to_string())),
        Err(_) => toml::Value::String(raw.to_string()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_defaults() {
        let c = ScenarioConfig::default();
        assert_eq!(c.risks_per_day, 0.06);
        assert_eq!(c.num_peril_regions, 10);
        assert_eq!(c.risk_limit, 10_000_000.0);
        assert_eq!(c.lead_top_k, 2);
        assert_eq!(c.follow_top_k, 5);
        assert_eq!(c.yearly_claim_frequency, 0.1);
        assert_eq!(c.gamma_cov, 1.0);
        assert_eq!(c.gamma_mean, 3_000_000.0);
        assert_eq!(c.mean_cat_events_per_year, 0.05);
        assert_eq!(c.pareto_shape, 5.0);
        assert_eq!(c.min_cat_damage_fraction, 0.25);
        assert_eq!(c.initial_capital, 10_000_000.0);
        assert_eq!(c.default_lead_line_size, 0.5);
        assert_eq!(c.default_follow_line_size, 0.1);
        assert_eq!(c.internal_experience_weight, 0.5);
        assert_eq!(c.loss_recency_weight, 0.2);
        assert_eq!(c.volatility_weight, 0.0);
        assert_eq!(c.underwriter_recency_weight, 0.2);
        assert_eq!(c.profit_fraction, 0.4);
        assert_eq!(c.var_exceedance_probability, 0.05);
        assert_eq!(c.var_safety_factor, 1.0);
        assert_eq!(c.premium_reserve_ratio, 0.5);
        assert_eq!(c.min_capital_reserve_ratio, 1.0);
        assert_eq!(c.max_scaling_factor, 1.0);
        assert_eq!(c.horizon_years, 50);
        assert_eq!((c.num_syndicates, c.num_brokers), (5, 25));
    }

    #[test]
    fn scenario2_preset_toggles() {
        let c = ScenarioConfig::from_toml_str("preset = \"scenario2\"").unwrap();
        assert!(c.features.catastrophe);
        assert!(!c.features.var_em);
        assert!(c.features.premium_em);
        assert_eq!(c.mean_cat_events_per_year, 0.05);
    }

    #[test]
    fn scenario4_preset_toggles() {
        let c = ScenarioConfig::from_toml_str("preset = \"scenario4\"").unwrap();
        assert_eq!(c.follow_top_k, 5);
        assert!(c.features.lead_follow);
        assert!(!c.features.catastrophe);
        assert_eq!(c.default_lead_line_size, 0.5);
        assert_eq!(c.profit_fraction, 0.0);
    }

    #[test]
    fn negative_volatility_weight_rejected() {
        let err = ScenarioConfig::from_toml_str("volatility_weight = -1.0").unwrap_err();
        assert!(matches!(err, ConfigError::Range { field: "volatility_weight", .. }), "{err}");
    }

    #[test]
    fn unknown_key_rejected() {
        let err = ScenarioConfig::from_toml_str("risk_per_day = 0.1").unwrap_err();
        assert!(matches!(err, ConfigError::Parse(_)), "{err}");
    }

    #[test]
    fn preset_toggle_conflict_rejected() {
        let text = "preset = \"scenario1\"\n[features]\ncatastrophe = true\n";
        let err = ScenarioConfig::from_toml_str(text).unwrap_err();
        assert!(matches!(err, ConfigError::PresetConflict { field: "catastrophe", .. }), "{err}");
    }

    #[test]
    fn preset_numeric_override_allowed() {
        let c = ScenarioConfig::from_toml_str("preset = \"scenario3\"\nvar_safety_factor = 2.0").unwrap();
        assert_eq!(c.var_safety_factor, 2.0);
        assert!(c.features.var_em);
    }

    #[test]
    fn file_and_cli_presets_must_agree() {
        let table: toml::Table = "preset = \"scenario2\"".parse().unwrap();
        let err = ScenarioConfig::from_table(table, Some(Preset::Scenario3)).unwrap_err();
        assert!(matches!(err, ConfigError::PresetConflict { field: "preset", .. }));
    }

    #[test]
    fn env_overrides_apply() {
        let mut table = toml::Table::new();
        let vars = vec![
            ("LLOYDS_SIM_RISKS_PER_DAY".to_string(), "0.1".to_string()),
            ("LLOYDS_SIM_FEATURES_MARKUP".to_string(), "true".to_string()),
            ("LLOYDS_SIM_TOPOLOGY".to_string(), "graph".to_string()),
            ("PATH".to_string(), "/bin".to_string()),
        ];
        apply_env_overrides(&mut table, vars).unwrap();
        let c = ScenarioConfig::from_table(table, None).unwrap();
        assert_eq!(c.risks_per_day, 0.1);
        assert!(c.features.markup);
        assert_eq!(c.topology, TopologyKind::Graph);
    }

    #[test]
    fn unknown_env_key_rejected() {
        let mut table = toml::Table::new();
        let vars = vec![("LLOYDS_SIM_NOPE".to_string(), "1".to_string())];
        assert!(matches!(
            apply_env_overrides(&mut table, vars),
            Err(ConfigError::UnknownEnvKey(v)) if v == "LLOYDS_SIM_NOPE"
        ));
    }

    #[test]
    fn round_trips_through_toml() {
        let c = ScenarioConfig::preset(Preset::Scenario3);
        let back = ScenarioConfig::from_toml_str(&c.to_toml_string()).unwrap();
        assert_eq!(c, back);
    }
}
