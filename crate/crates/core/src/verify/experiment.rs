use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::config::{ExperimentConfig, RowModel, SamplerKind};
use super::theory::{speed, theoretical_rate};
use crate::error::{Error, Result};
use crate::models::POISSON_INVERSION_CUTOFF;
use crate::montecarlo::{estimate_martingale_tail, estimate_tail_plain, estimate_tail_tilted, TailEstimate};
use crate::rng::{derive_seed, Sampling};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RowStatus {
    Ok,
    /// Tilt infeasible; the plain estimator was used instead.
    PlainFallback,
    ZeroHits,
    Failed,
}

impl RowStatus {
    pub fn name(&self) -> &'static str {
        match self {
            RowStatus::Ok => "ok",
            RowStatus::PlainFallback => "plain_fallback",
            RowStatus::ZeroHits => "zero_hits",
            RowStatus::Failed => "failed",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateRow {
    pub scale_param: f64,
    pub t: f64,
    pub method: String,
    pub theta: f64,
    pub p_hat: Option<f64>,
    pub std_error: Option<f64>,
    pub samples: u64,
    pub speed: f64,
    pub empirical_rate: Option<f64>,
    pub theoretical_rate: Option<f64>,
    pub relative_error: Option<f64>,
    pub status: RowStatus,
    /// Error text for failed rows.
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportMetadata {
    pub config_sha256: String,
    pub crate_version: String,
    pub wall_time_seconds: f64,
    pub rows: usize,
    pub failed_rows: usize,
    pub speed_tag: Option<super::config::SpeedTag>,
    pub theory_rate: Option<super::config::TheoryRate>,
    pub beta: Option<f64>,
    pub poisson_inversion_cutoff: f64,
    /// Tolerance bands used with these reports are empirically calibrated,
    /// not derived from convergence rates.
    pub calibrated_tolerance_bands: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateReport {
    pub rows: Vec<RateRow>,
    pub metadata: ReportMetadata,
}

impl RateReport {
    pub fn any_failed(&self) -> bool {
        self.metadata.failed_rows > 0
    }
}

/// Hex SHA-256 of the canonical JSON form of the config.
pub fn config_hash(config: &ExperimentConfig) -> String {
    use sha2::{Digest, Sha256};
    let json = serde_json::to_string(config).expect("config serializes");
    Sha256::digest(json.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
}

fn estimate(
    config: &ExperimentConfig,
    model: &RowModel,
    t: f64,
    speed: f64,
    sampling: &Sampling,
) -> Result<(TailEstimate, bool)> {
    match model {
        RowModel::RandomSum(spec) => match config.sampler {
            SamplerKind::Plain => Ok((estimate_tail_plain(spec, t, sampling)?.with_speed(speed), false)),
            SamplerKind::Tilted => match estimate_tail_tilted(spec, t, sampling) {
                Ok(e) => Ok((e.with_speed(speed), false)),
                Err(Error::InfeasibleTilt { .. }) => {
                    Ok((estimate_tail_plain(spec, t, sampling)?.with_speed(speed), true))
                }
                Err(e) => Err(e),
            },
        },
        RowModel::Martingale(m) => {
            let a_n = speed.sqrt();
            Ok((estimate_martingale_tail(m, a_n, t, sampling)?, false))
        }
    }
}

/// One row per `(scale_param, t)`, in that order. Row `i` samples with seed
/// `derive_seed(config.seed, i)`; estimator errors are kept in the row.
pub fn rate_curve_experiment(config: &ExperimentConfig, threads: Option<usize>) -> Result<RateReport> {
    config.validate()?;
    let start = Instant::now();
    let summand = config.summand_model()?;
    let theory: Vec<Option<f64>> = config
        .t_grid
        .iter()
        .map(|&t| {
            let th = config.theory?;
            theoretical_rate(th.rate, &summand, config.index, t).ok()
        })
        .collect();

    let mut params = config.scale_parameters()?;
    params.sort_by(f64::total_cmp);
    let mut ts: Vec<(usize, f64)> = config.t_grid.iter().copied().enumerate().collect();
    ts.sort_by(|a, b| a.1.total_cmp(&b.1));

    let mut rows = Vec::with_capacity(params.len() * ts.len());
    for &param in &params {
        let model = config.row_model(param)?;
        let spd = speed(config, param)?;
        for &(ti, t) in &ts {
            let seed = derive_seed(config.seed, rows.len() as u64);
            let mut sampling = Sampling::new(config.n_samples, seed);
            sampling.threads = threads;
            let theo = theory[ti];
            let row = match estimate(config, &model, t, spd, &sampling) {
                Ok((est, fallback)) => {
                    let status = if est.zero_hits {
                        RowStatus::ZeroHits
                    } else if fallback {
                        RowStatus::PlainFallback
                    } else {
                        RowStatus::Ok
                    };
                    let relative_error = match (est.empirical_rate, theo) {
                        (Some(e), Some(th)) if th != 0.0 => Some((e - th).abs() / th.abs()),
                        _ => None,
                    };
                    RateRow {
                        scale_param: param,
                        t,
                        method: est.method.name().into(),
                        theta: est.method.theta(),
                        p_hat: Some(est.p_hat),
                        std_error: Some(est.std_error),
                        samples: est.samples,
                        speed: spd,
                        empirical_rate: est.empirical_rate,
                        theoretical_rate: theo,
                        relative_error,
                        status,
                        message: String::new(),
                    }
                }
                Err(e) => RateRow {
                    scale_param: param,
                    t,
                    method: match config.sampler {
                        SamplerKind::Plain => "plain".into(),
                        SamplerKind::Tilted => "tilted".into(),
                    },
                    theta: f64::NAN,
                    p_hat: None,
                    std_error: None,
                    samples: 0,
                    speed: spd,
                    empirical_rate: None,
                    theoretical_rate: theo,
                    relative_error: None,
                    status: RowStatus::Failed,
                    message: e.to_string(),
                },
            };
            rows.push(row);
        }
    }
    let failed_rows = rows.iter().filter(|r| r.status == RowStatus::Failed).count();
    let metadata = ReportMetadata {
        config_sha256: config_hash(config),
        crate_version: env!("CARGO_PKG_VERSION").into(),
        wall_time_seconds: start.elapsed().as_secs_f64(),
        rows: rows.len(),
        failed_rows,
        speed_tag: config.theory.map(|th| th.speed),
        theory_rate: config.theory.map(|th| th.rate),
        beta: config.beta(),
        poisson_inversion_cutoff: POISSON_INVERSION_CUTOFF,
        calibrated_tolerance_bands: true,
    };
    Ok(RateReport { rows, metadata })
}
