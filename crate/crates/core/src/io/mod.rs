//! Run configuration, binary state snapshots, and CSV time series.

mod config;
mod series;
mod snapshot;

use std::path::PathBuf;

pub use config::{
    load_config, DiagConfig, IntegratorConfig, RadialParams, RunConfig, StepModeKind, SyncParams,
};
pub use series::{
    fmt_value, CsvSeries, ENERGY_HEADER, MONITOR_HEADER, RADIAL_HEADER, HEAT_HEADER, SCALING_HEADER,
    SHELL_HEADER, SYNC_HEADER,
};
pub use snapshot::{
    decode_snapshot, encode_snapshot, read_snapshot, write_snapshot, SNAPSHOT_MAGIC, SNAPSHOT_VERSION,
};

#[derive(Debug, thiserror::Error)]
pub enum IoError {
    #[error("invalid configuration:\n  {}", .0.join("\n  "))]
    Config(Vec<String>),

    #[error("bad snapshot magic: expected {expected:?}")]
    BadMagic { expected: &'static str },

    #[error("unsupported snapshot version {found} (expected {expected})")]
    UnsupportedVersion { found: u32, expected: u32 },

    #[error("snapshot truncated at byte {offset}: need {needed} more bytes")]
    Truncated { offset: usize, needed: usize },

    #[error("non-finite value {value} at byte {offset}")]
    NonFinite { offset: usize, value: f64 },

    #[error("{len} trailing bytes after snapshot payload at byte {offset}")]
    TrailingBytes { offset: usize, len: usize },

    #[error("snapshot header: {0}")]
    Header(#[from] crate::Error),

    #[error("{path}: {source}")]
    File {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl IoError {
    pub(crate) fn file(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        IoError::File {
            path: path.into(),
            source,
        }
    }
}
