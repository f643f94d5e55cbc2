use rand::Rng;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use super::Cgf;
use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::series::Series;

/// Poisson draws use sequential inversion up to this mean and
/// transformed rejection (PTRS) above it.
pub const POISSON_INVERSION_CUTOFF: f64 = 30.0;

/// Law of the summation index `nu`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "law")]
pub enum IndexModel {
    Poisson {
        lambda: f64,
    },
    /// Support `{1, 2, ...}`, `P(nu = k) = p (1-p)^{k-1}`, mean `1/p`.
    Geometric {
        p: f64,
    },
    Deterministic {
        n: u64,
    },
}

impl IndexModel {
    pub fn name(&self) -> &'static str {
        match self {
            IndexModel::Poisson { .. } => "poisson",
            IndexModel::Geometric { .. } => "geometric",
            IndexModel::Deterministic { .. } => "deterministic",
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            IndexModel::Poisson { lambda } if !(lambda > 0.0 && lambda.is_finite()) => {
                Err(Error::InvalidModel(format!("poisson lambda must be positive, got {lambda}")))
            }
            IndexModel::Geometric { p } if !(p > 0.0 && p < 1.0) => {
                Err(Error::InvalidModel(format!("geometric p must lie in (0, 1), got {p}")))
            }
            IndexModel::Deterministic { n: 0 } => {
                Err(Error::InvalidModel("deterministic index must be a positive integer".into()))
            }
            _ => Ok(()),
        }
    }

    /// The family parameter: `lambda`, `p` or `n`.
    pub fn parameter(&self) -> f64 {
        match *self {
            IndexModel::Poisson { lambda } => lambda,
            IndexModel::Geometric { p } => p,
            IndexModel::Deterministic { n } => n as f64,
        }
    }

    /// Same family with a different parameter.
    pub fn with_parameter(&self, value: f64) -> Result<IndexModel> {
        let m = match self {
            IndexModel::Poisson { .. } => IndexModel::Poisson { lambda: value },
            IndexModel::Geometric { .. } => IndexModel::Geometric { p: value },
            IndexModel::Deterministic { .. } => {
                if value.fract() != 0.0 || value < 1.0 {
                    return Err(Error::InvalidModel(format!(
                        "deterministic index needs a positive integer, got {value}"
                    )));
                }
                IndexModel::Deterministic { n: value as u64 }
            }
        };
        m.validate()?;
        Ok(m)
    }

    /// Same family with mean `mu`.
    pub fn with_mean(&self, mu: f64) -> Result<IndexModel> {
        match self {
            IndexModel::Geometric { .. } => self.with_parameter(1.0 / mu),
            _ => self.with_parameter(mu),
        }
    }

    /// `Lambda_nu(s) / mu`, evaluated without forming `mu` explicitly.
    pub fn cgf_per_mean(&self, s: f64) -> Result<f64> {
        self.check_domain(s)?;
        Ok(match *self {
            IndexModel::Poisson { .. } => s.exp_m1(),
            IndexModel::Geometric { p } => p * self.cgf(s)?,
            IndexModel::Deterministic { .. } => s,
        })
    }

    fn log_q(p: f64) -> f64 {
        (-p).ln_1p()
    }

    pub fn pmf(&self, k: u64) -> f64 {
        match *self {
            IndexModel::Poisson { lambda } => {
                let kf = k as f64;
                (kf * lambda.ln() - lambda - ln_gamma(kf + 1.0)).exp()
            }
            IndexModel::Geometric { p } => {
                if k == 0 {
                    0.0
                } else {
                    p * ((k - 1) as f64 * Self::log_q(p)).exp()
                }
            }
            IndexModel::Deterministic { n } => {
                if k == n {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }

    /// Smallest `k` with `P(nu <= k) >= prob`. For Poisson the pmf is
    /// accumulated; once past the mode, the scan also stops when the
    /// remaining mass is below rounding of the running sum.
    pub fn quantile(&self, prob: f64) -> u64 {
        match *self {
            IndexModel::Deterministic { n } => n,
            IndexModel::Geometric { p } => {
                if prob <= p {
                    return 1;
                }
                ((-prob).ln_1p() / Self::log_q(p)).ceil().max(1.0) as u64
            }
            IndexModel::Poisson { lambda } => {
                let mut acc = 0.0;
                let mut k = 0u64;
                loop {
                    let pk = self.pmf(k);
                    acc += pk;
                    if acc >= prob || (k as f64 > lambda && pk < f64::EPSILON * (1.0 - prob)) {
                        return k;
                    }
                    k += 1;
                }
            }
        }
    }

    /// Index law reweighted by `e^{n s} / E e^{s nu}`. Each family stays in
    /// its family: Poisson scales its mean by `e^s`, Geometric multiplies
    /// its failure probability `1 - p` by `e^s`.
    pub fn tilted(&self, s: f64) -> Result<IndexModel> {
        self.check_domain(s)?;
        Ok(match *self {
            IndexModel::Poisson { lambda } => IndexModel::Poisson { lambda: lambda * s.exp() },
            IndexModel::Geometric { p } => IndexModel::Geometric { p: -(Self::log_q(p) + s).exp_m1() },
            d @ IndexModel::Deterministic { .. } => d,
        })
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        match *self {
            IndexModel::Poisson { lambda } => sample_poisson(lambda, rng),
            IndexModel::Geometric { p } => {
                // inverse CDF on U in (0, 1]
                let u = 1.0 - rng.random::<f64>();
                (u.ln() / Self::log_q(p)).floor() as u64 + 1
            }
            IndexModel::Deterministic { n } => n,
        }
    }
}

fn sample_poisson<R: Rng + ?Sized>(lambda: f64, rng: &mut R) -> u64 {
    if lambda <= POISSON_INVERSION_CUTOFF {
        let u: f64 = rng.random();
        let mut k = 0u64;
        let mut p = (-lambda).exp();
        let mut cdf = p;
        while u > cdf {
            k += 1;
            p *= lambda / k as f64;
            cdf += p;
            if p == 0.0 && cdf < u {
                // rounding left the cdf short of u; the remaining mass is negligible
                break;
            }
        }
        return k;
    }
    // Hörmann (1993), transformed rejection with squeeze
    let slam = lambda.sqrt();
    let loglam = lambda.ln();
    let b = 0.931 + 2.53 * slam;
    let a = -0.059 + 0.02483 * b;
    let inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    let vr = 0.9277 - 3.6224 / (b - 2.0);
    loop {
        let u = rng.random::<f64>() - 0.5;
        let v: f64 = rng.random();
        let us = 0.5 - u.abs();
        let k = ((2.0 * a / us + b) * u + lambda + 0.43).floor();
        if us >= 0.07 && v <= vr {
            return k as u64;
        }
        if k < 0.0 || (us < 0.013 && v > us) {
            continue;
        }
        let lhs = v.ln() + inv_alpha.ln() - (a / (us * us) + b).ln();
        let rhs = -lambda + k * loglam - ln_gamma(k + 1.0);
        if lhs <= rhs {
            return k as u64;
        }
    }
}

impl Cgf for IndexModel {
    fn cgf(&self, t: f64) -> Result<f64> {
        self.check_domain(t)?;
        Ok(match *self {
            IndexModel::Poisson { lambda } => lambda * t.exp_m1(),
            IndexModel::Geometric { p } => t + p.ln() - (-(t + Self::log_q(p)).exp_m1()).ln(),
            IndexModel::Deterministic { n } => n as f64 * t,
        })
    }

    fn cgf_prime(&self, t: f64) -> Result<f64> {
        self.check_domain(t)?;
        Ok(match *self {
            IndexModel::Poisson { lambda } => lambda * t.exp(),
            IndexModel::Geometric { p } => 1.0 / (-(t + Self::log_q(p)).exp_m1()),
            IndexModel::Deterministic { n } => n as f64,
        })
    }

    fn cgf_second(&self, t: f64) -> Result<f64> {
        self.check_domain(t)?;
        Ok(match *self {
            IndexModel::Poisson { lambda } => lambda * t.exp(),
            IndexModel::Geometric { p } => {
                let qe = (t + Self::log_q(p)).exp();
                let d = -(t + Self::log_q(p)).exp_m1();
                qe / (d * d)
            }
            IndexModel::Deterministic { .. } => 0.0,
        })
    }

    fn cgf_series(&self, arg: &Series) -> Result<Series> {
        self.check_domain(arg.value())?;
        Ok(match *self {
            IndexModel::Poisson { lambda } => arg.exp().add_const(-1.0).scale(lambda),
            IndexModel::Geometric { p } => {
                let q = 1.0 - p;
                *arg + Series::constant(p.ln()) - (Series::constant(1.0) - arg.exp().scale(q)).ln()
            }
            IndexModel::Deterministic { n } => arg.scale(n as f64),
        })
    }

    fn cgf_domain(&self) -> Interval {
        match *self {
            IndexModel::Geometric { p } => Interval::open(f64::NEG_INFINITY, -Self::log_q(p)),
            _ => Interval::real_line(),
        }
    }

    fn mean(&self) -> f64 {
        match *self {
            IndexModel::Poisson { lambda } => lambda,
            IndexModel::Geometric { p } => 1.0 / p,
            IndexModel::Deterministic { n } => n as f64,
        }
    }

    fn variance(&self) -> f64 {
        match *self {
            IndexModel::Poisson { lambda } => lambda,
            IndexModel::Geometric { p } => (1.0 - p) / (p * p),
            IndexModel::Deterministic { .. } => 0.0,
        }
    }

    fn derivative_range(&self) -> Interval {
        match *self {
            IndexModel::Poisson { .. } => Interval { lo: 0.0, hi: f64::INFINITY, lo_closed: true, hi_closed: false },
            IndexModel::Geometric { .. } => Interval { lo: 1.0, hi: f64::INFINITY, lo_closed: true, hi_closed: false },
            IndexModel::Deterministic { n } => Interval::point(n as f64),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;

    #[test]
    fn poisson_cgf_vanishes_at_origin() {
        assert_eq!(IndexModel::Poisson { lambda: 3.0 }.cgf(0.0).unwrap(), 0.0);
    }

    #[test]
    fn geometric_mean_is_reciprocal_p() {
        let g = IndexModel::Geometric { p: 0.2 };
        assert_eq!(g.mean(), 5.0);
        assert!((g.cgf_prime(0.0).unwrap() - 5.0).abs() < 1e-12);
        assert_eq!(g.pmf(0), 0.0);
        assert!((g.pmf(1) - 0.2).abs() < 1e-15);
    }

    #[test]
    fn geometric_domain_error() {
        let g = IndexModel::Geometric { p: 0.5 };
        assert!(g.cgf(0.69).is_ok());
        assert!(matches!(g.cgf(0.7), Err(Error::Domain(_))));
    }

    #[test]
    fn pmf_truncated_at_extreme_quantile_sums_to_one() {
        for m in [
            IndexModel::Poisson { lambda: 3.0 },
            IndexModel::Poisson { lambda: 250.0 },
            IndexModel::Geometric { p: 0.3 },
            IndexModel::Geometric { p: 0.01 },
            IndexModel::Deterministic { n: 4 },
        ] {
            let k = m.quantile(1.0 - 1e-13);
            let total: f64 = (0..=k).map(|j| m.pmf(j)).sum();
            assert!((total - 1.0).abs() < 1e-12, "{m:?}: {total}");
        }
    }

    #[test]
    fn tilted_geometric_stays_geometric() {
        let g = IndexModel::Geometric { p: 0.1 };
        let s = 0.05;
        let IndexModel::Geometric { p } = g.tilted(s).unwrap() else { panic!() };
        assert!(((1.0 - p) - 0.9 * s.exp()).abs() < 1e-14);
        assert!(g.tilted(0.2).is_err());
    }

    #[test]
    fn geometric_sampler_support_starts_at_one() {
        let mut rng = stream(1, 0);
        let g = IndexModel::Geometric { p: 0.9 };
        assert!((0..10_000).all(|_| g.sample(&mut rng) >= 1));
    }

    #[test]
    fn validation() {
        assert!(IndexModel::Poisson { lambda: 0.0 }.validate().is_err());
        assert!(IndexModel::Geometric { p: 1.0 }.validate().is_err());
        assert!(IndexModel::Deterministic { n: 0 }.validate().is_err());
        assert!(IndexModel::Deterministic { n: 3 }.with_parameter(2.5).is_err());
    }
}
