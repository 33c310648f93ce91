use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum DesError {
    #[error("event {kind} scheduled for day {at} but the clock is already at day {now}")]
    ScheduledInPast { now: u32, at: u32, kind: String },
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("cannot parse config: {0}")]
    Parse(String),
    #[error("unknown preset `{0}` (expected scenario1..scenario4)")]
    UnknownPreset(String),
    #[error("preset `{preset}` fixes `{field}` = {expected}, but the config sets {found}")]
    PresetConflict {
        preset: String,
        field: &'static str,
        expected: String,
        found: String,
    },
    #[error("`{field}` = {value} is out of range: {reason}")]
    Range {
        field: &'static str,
        value: String,
        reason: &'static str,
    },
    #[error("environment override {var} is not a valid value: {value}")]
    Env { var: String, value: String },
    #[error("environment override {0} does not name a config key")]
    UnknownEnvKey(String),
}

#[derive(Debug, Error)]
pub enum SimError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Des(#[from] DesError),
    #[error("output error at {path}: {source}")]
    Output {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("serialization failed: {0}")]
    Serialize(#[from] serde_json::Error),
}
