//! Experiment orchestration: JSON configs, rate-comparison tables,
//! limit-law checks and report files.

mod config;
mod experiment;
mod limit;
mod report;
mod theory;

pub use config::{
    read_config, write_config, ExperimentConfig, IndexFamily, ModelKind, RowModel, SamplerKind, SpeedTag,
    SummandFamily, Theory, TheoryRate,
};
pub use experiment::{config_hash, rate_curve_experiment, RateReport, RateRow, ReportMetadata, RowStatus};
pub use limit::{ks_statistic, laplace_cdf, limit_law_check, normal_cdf, LimitLawResult, Reference};
pub use report::{format_float, metadata_path, write_rate_table, write_report, write_rows, CSV_COLUMNS};
pub use theory::{scale_mean, speed, theoretical_rate};
