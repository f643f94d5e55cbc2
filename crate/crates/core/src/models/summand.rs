use rand::Rng;
use rand_distr::{Binomial, Distribution, Gamma, StandardNormal};
use serde::{Deserialize, Serialize};

use super::Cgf;
use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::series::Series;

/// Law of the i.i.d. summands `X_i`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "law")]
pub enum SummandModel {
    Gaussian {
        mean: f64,
        variance: f64,
    },
    /// Values `+1` and `-1` with probability one half each.
    Rademacher,
    /// `Exp(1) - 1`: centered, unit variance, CGF finite only for `t < 1`.
    ShiftedExponential,
}

impl SummandModel {
    pub fn standard_gaussian() -> Self {
        SummandModel::Gaussian { mean: 0.0, variance: 1.0 }
    }

    pub fn name(&self) -> &'static str {
        match self {
            SummandModel::Gaussian { .. } => "gaussian",
            SummandModel::Rademacher => "rademacher",
            SummandModel::ShiftedExponential => "shifted_exponential",
        }
    }

    pub fn validate(&self) -> Result<()> {
        if let SummandModel::Gaussian { mean, variance } = *self {
            if !mean.is_finite() || !(variance > 0.0 && variance.is_finite()) {
                return Err(Error::InvalidModel(format!(
                    "gaussian summand needs finite mean and positive variance, got ({mean}, {variance})"
                )));
            }
        }
        Ok(())
    }

    /// Mean zero and variance one.
    pub fn is_standardized(&self) -> bool {
        (self.mean()).abs() < 1e-12 && (self.variance() - 1.0).abs() < 1e-12
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.sample_tilted(0.0, rng)
    }

    /// One draw from the exponentially tilted law `dP_theta ∝ e^{theta x} dP`.
    pub fn sample_tilted<R: Rng + ?Sized>(&self, theta: f64, rng: &mut R) -> f64 {
        match *self {
            SummandModel::Gaussian { mean, variance } => {
                let z: f64 = rng.sample(StandardNormal);
                mean + variance * theta + variance.sqrt() * z
            }
            SummandModel::Rademacher => {
                let up = 1.0 / (1.0 + (-2.0 * theta).exp());
                if rng.random::<f64>() < up {
                    1.0
                } else {
                    -1.0
                }
            }
            SummandModel::ShiftedExponential => {
                let e: f64 = rng.sample(rand_distr::Exp1);
                e / (1.0 - theta) - 1.0
            }
        }
    }

    /// Sum of `n` independent theta-tilted draws.
    ///
    /// Each catalog law is closed under convolution, so the sum is drawn
    /// directly: a single normal, a binomial count of `+1`s, or a gamma
    /// variate. The law is identical to adding `n` draws of
    /// [`sample_tilted`](Self::sample_tilted).
    pub fn sample_sum<R: Rng + ?Sized>(&self, n: u64, theta: f64, rng: &mut R) -> f64 {
        if n == 0 {
            return 0.0;
        }
        let nf = n as f64;
        match *self {
            SummandModel::Gaussian { mean, variance } => {
                let z: f64 = rng.sample(StandardNormal);
                nf * (mean + variance * theta) + (nf * variance).sqrt() * z
            }
            SummandModel::Rademacher => {
                let up = 1.0 / (1.0 + (-2.0 * theta).exp());
                let ups = Binomial::new(n, up).expect("probability in [0,1]").sample(rng) as f64;
                2.0 * ups - nf
            }
            SummandModel::ShiftedExponential => {
                let g = Gamma::new(nf, 1.0 / (1.0 - theta)).expect("positive shape and scale");
                g.sample(rng) - nf
            }
        }
    }

    /// Raw moment `E[X^j]`, from the exponential of the CGF series.
    pub fn raw_moment(&self, j: usize) -> f64 {
        let mgf = self.cgf_series(&Series::variable(1.0)).expect("origin is in every domain").exp();
        mgf.derivative(j)
    }
}

impl Cgf for SummandModel {
    fn cgf(&self, t: f64) -> Result<f64> {
        self.check_domain(t)?;
        Ok(match *self {
            SummandModel::Gaussian { mean, variance } => mean * t + 0.5 * variance * t * t,
            SummandModel::Rademacher => {
                let a = t.abs();
                a + (-2.0 * a).exp().ln_1p() - std::f64::consts::LN_2
            }
            SummandModel::ShiftedExponential => -t - (-t).ln_1p(),
        })
    }

    fn cgf_prime(&self, t: f64) -> Result<f64> {
        self.check_domain(t)?;
        Ok(match *self {
            SummandModel::Gaussian { mean, variance } => mean + variance * t,
            SummandModel::Rademacher => t.tanh(),
            SummandModel::ShiftedExponential => t / (1.0 - t),
        })
    }

    fn cgf_second(&self, t: f64) -> Result<f64> {
        self.check_domain(t)?;
        Ok(match *self {
            SummandModel::Gaussian { variance, .. } => variance,
            SummandModel::Rademacher => {
                let c = t.cosh();
                1.0 / (c * c)
            }
            SummandModel::ShiftedExponential => 1.0 / ((1.0 - t) * (1.0 - t)),
        })
    }

    fn cgf_series(&self, arg: &Series) -> Result<Series> {
        self.check_domain(arg.value())?;
        Ok(match *self {
            SummandModel::Gaussian { mean, variance } => arg.scale(mean) + (*arg * *arg).scale(0.5 * variance),
            SummandModel::Rademacher => arg.cosh().ln(),
            SummandModel::ShiftedExponential => -*arg - (Series::constant(1.0) - *arg).ln(),
        })
    }

    fn cgf_domain(&self) -> Interval {
        match self {
            SummandModel::ShiftedExponential => Interval::open(f64::NEG_INFINITY, 1.0),
            _ => Interval::real_line(),
        }
    }

    fn mean(&self) -> f64 {
        match *self {
            SummandModel::Gaussian { mean, .. } => mean,
            _ => 0.0,
        }
    }

    fn variance(&self) -> f64 {
        match *self {
            SummandModel::Gaussian { variance, .. } => variance,
            _ => 1.0,
        }
    }

    fn derivative_range(&self) -> Interval {
        match self {
            SummandModel::Gaussian { .. } => Interval::real_line(),
            SummandModel::Rademacher => Interval::closed(-1.0, 1.0),
            SummandModel::ShiftedExponential => Interval::open(-1.0, f64::INFINITY),
        }
    }
}
