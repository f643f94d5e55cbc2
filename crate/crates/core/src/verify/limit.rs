use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;

use crate::error::{Error, Result};
use crate::models::{IndexModel, RandomSumSpec};
use crate::rng::{run_blocks, Sampling};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Reference {
    /// Standard normal.
    Normal,
    /// `Laplace(0, 1/sqrt 2)`, unit variance.
    Laplace,
}

impl Reference {
    pub fn for_index(index: &IndexModel) -> Self {
        match index {
            IndexModel::Geometric { .. } => Reference::Laplace,
            _ => Reference::Normal,
        }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        match self {
            Reference::Normal => normal_cdf(x),
            Reference::Laplace => laplace_cdf(x, 0.0, std::f64::consts::FRAC_1_SQRT_2),
        }
    }
}

pub fn normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x * std::f64::consts::FRAC_1_SQRT_2)
}

/// CDF of the density `exp(-|x - a| / b) / 2b`.
pub fn laplace_cdf(x: f64, a: f64, b: f64) -> f64 {
    let z = (x - a) / b;
    if z < 0.0 {
        0.5 * z.exp()
    } else {
        1.0 - 0.5 * (-z).exp()
    }
}

/// One-sample Kolmogorov-Smirnov distance `sup |F_N - F|`.
pub fn ks_statistic<F: Fn(f64) -> f64>(samples: &[f64], cdf: F) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::Domain("KS statistic of an empty sample".into()));
    }
    let mut xs = samples.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    Ok(xs.iter().enumerate().fold(0.0f64, |d, (i, &x)| {
        let f = cdf(x);
        let i = i as f64;
        d.max((i + 1.0) / n - f).max(f - i / n)
    }))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitLawResult {
    pub ks: f64,
    pub reference: Reference,
    pub samples: u64,
}

/// Draws `Z_{k,0}` and measures its KS distance to the limit law of the
/// index family.
pub fn limit_law_check(spec: &RandomSumSpec, sampling: &Sampling) -> Result<LimitLawResult> {
    spec.validate()?;
    if spec.alpha != 0.0 {
        return Err(Error::InvalidModel(format!("limit-law checks need alpha = 0, got {}", spec.alpha)));
    }
    if sampling.n_samples == 0 {
        return Err(Error::InsufficientSamples { needed: 1, got: 0 });
    }
    let zs: Vec<f64> = run_blocks(sampling, |len, rng| (0..len).map(|_| spec.sample(rng).z).collect::<Vec<_>>())
        .into_iter()
        .flatten()
        .collect();
    let reference = Reference::for_index(&spec.index);
    Ok(LimitLawResult { ks: ks_statistic(&zs, |x| reference.cdf(x))?, reference, samples: sampling.n_samples })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::SummandModel;

    #[test]
    fn ks_examples() {
        assert_eq!(ks_statistic(&[0.0], normal_cdf).unwrap(), 0.5);
        let n = 50;
        let q: Vec<f64> = (1..=n).map(|i| (i as f64 - 0.5) / n as f64).collect();
        // uniform reference evaluated at its own quantiles
        let d = ks_statistic(&q, |x: f64| x.clamp(0.0, 1.0)).unwrap();
        assert!((d - 0.5 / n as f64).abs() < 1e-15);
        let d = ks_statistic(&[-5.0, -4.0], |x: f64| if x < 0.0 { 0.0 } else { x.min(1.0) }).unwrap();
        assert_eq!(d, 1.0);
        assert!(ks_statistic(&[], normal_cdf).is_err());
    }

    #[test]
    fn laplace_has_unit_variance_scale() {
        let b = std::f64::consts::FRAC_1_SQRT_2;
        assert_eq!(laplace_cdf(0.0, 0.0, b), 0.5);
        assert!((laplace_cdf(b, 0.0, b) - (1.0 - 0.5 / std::f64::consts::E)).abs() < 1e-15);
    }

    #[test]
    fn exact_law_is_within_sampling_band() {
        let spec =
            RandomSumSpec::standardized(SummandModel::standard_gaussian(), IndexModel::Deterministic { n: 1 }, 0.0)
                .unwrap();
        let n = 20_000;
        let r = limit_law_check(&spec, &Sampling::new(n, 3)).unwrap();
        assert_eq!(r.reference, Reference::Normal);
        assert!(r.ks < 1.36 / (n as f64).sqrt(), "{}", r.ks);
        assert!(limit_law_check(&spec.with_alpha(0.1).unwrap(), &Sampling::new(n, 3)).is_err());
    }
}
