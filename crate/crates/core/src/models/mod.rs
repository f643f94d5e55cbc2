//! Probability models: summand laws, summation-index laws, the scaled
//! random sum built from them, and a bounded-difference martingale.
//!
//! All models are immutable values. Samplers take the caller's stream, so
//! a model can be shared freely between workers.

mod index;
mod martingale;
mod summand;

pub use index::{IndexModel, POISSON_INVERSION_CUTOFF};
pub use martingale::{MartingaleModel, StepLaw, TerminalSampler};
pub use summand::SummandModel;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::series::Series;

/// Closed-form cumulant generating function `t -> log E e^{tX}`.
pub trait Cgf {
    fn cgf(&self, t: f64) -> Result<f64>;
    fn cgf_prime(&self, t: f64) -> Result<f64>;
    fn cgf_second(&self, t: f64) -> Result<f64>;
    /// The CGF composed with a power series whose constant term lies in the
    /// domain.
    fn cgf_series(&self, arg: &Series) -> Result<Series>;
    /// Open interval on which the CGF is finite.
    fn cgf_domain(&self) -> Interval;
    fn mean(&self) -> f64;
    fn variance(&self) -> f64;
    /// Closure of the range of the CGF derivative; a closed end means the
    /// Cramér rate stays finite there.
    fn derivative_range(&self) -> Interval;

    fn check_domain(&self, t: f64) -> Result<()> {
        let d = self.cgf_domain();
        if d.contains(t) {
            Ok(())
        } else {
            Err(Error::Domain(format!("cgf argument {t} outside ({}, {})", d.lo, d.hi)))
        }
    }
}

/// Either kind of model, where a rate function needs a CGF.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CgfModel {
    Summand(SummandModel),
    Index(IndexModel),
}

impl From<SummandModel> for CgfModel {
    fn from(m: SummandModel) -> Self {
        CgfModel::Summand(m)
    }
}

impl From<IndexModel> for CgfModel {
    fn from(m: IndexModel) -> Self {
        CgfModel::Index(m)
    }
}

macro_rules! delegate {
    ($self:ident, $m:ident => $e:expr) => {
        match $self {
            CgfModel::Summand($m) => $e,
            CgfModel::Index($m) => $e,
        }
    };
}

impl Cgf for CgfModel {
    fn cgf(&self, t: f64) -> Result<f64> {
        delegate!(self, m => m.cgf(t))
    }
    fn cgf_prime(&self, t: f64) -> Result<f64> {
        delegate!(self, m => m.cgf_prime(t))
    }
    fn cgf_second(&self, t: f64) -> Result<f64> {
        delegate!(self, m => m.cgf_second(t))
    }
    fn cgf_series(&self, arg: &Series) -> Result<Series> {
        delegate!(self, m => m.cgf_series(arg))
    }
    fn cgf_domain(&self) -> Interval {
        delegate!(self, m => m.cgf_domain())
    }
    fn mean(&self) -> f64 {
        delegate!(self, m => m.mean())
    }
    fn variance(&self) -> f64 {
        delegate!(self, m => m.variance())
    }
    fn derivative_range(&self) -> Interval {
        delegate!(self, m => m.derivative_range())
    }
}

/// How the raw sum `S_nu` is turned into `Z`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scaling {
    /// `Z = S_nu / mu^{1/2 + alpha}`; summands must be centered with unit variance.
    #[default]
    Standardized,
    /// `Z = (S_nu - a mu) / (c^2 mu + a^2 gamma^2)^{1/2 + alpha}`.
    BlackwellGirshick,
}

/// `Z_{k, alpha}`: a random sum of i.i.d. summands with an independent index.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RandomSumSpec {
    pub summand: SummandModel,
    pub index: IndexModel,
    pub alpha: f64,
    #[serde(default)]
    pub scaling: Scaling,
}

/// One realisation of a random sum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RandomSumDraw {
    pub nu: u64,
    pub s: f64,
    pub z: f64,
}

impl RandomSumSpec {
    pub fn new(summand: SummandModel, index: IndexModel, alpha: f64, scaling: Scaling) -> Result<Self> {
        let spec = RandomSumSpec { summand, index, alpha, scaling };
        spec.validate()?;
        Ok(spec)
    }

    pub fn standardized(summand: SummandModel, index: IndexModel, alpha: f64) -> Result<Self> {
        Self::new(summand, index, alpha, Scaling::Standardized)
    }

    pub fn validate(&self) -> Result<()> {
        self.summand.validate()?;
        self.index.validate()?;
        if !(0.0..=0.5).contains(&self.alpha) {
            return Err(Error::InvalidModel(format!("alpha must lie in [0, 1/2], got {}", self.alpha)));
        }
        match self.scaling {
            Scaling::Standardized if !self.summand.is_standardized() => {
                Err(Error::InvalidModel("standardized scaling requires summands with mean 0 and variance 1".into()))
            }
            Scaling::BlackwellGirshick if !(self.blackwell_girshick_variance() > 0.0) => {
                Err(Error::InvalidModel("Blackwell-Girshick variance must be positive".into()))
            }
            _ => Ok(()),
        }
    }

    pub fn with_index(&self, index: IndexModel) -> Result<Self> {
        Self::new(self.summand, index, self.alpha, self.scaling)
    }

    pub fn with_alpha(&self, alpha: f64) -> Result<Self> {
        Self::new(self.summand, self.index, alpha, self.scaling)
    }

    /// `c^2 mu + a^2 gamma^2`, the variance of `S_nu`.
    pub fn blackwell_girshick_variance(&self) -> f64 {
        let a = self.summand.mean();
        self.summand.variance() * self.index.mean() + a * a * self.index.variance()
    }

    pub fn center(&self) -> f64 {
        match self.scaling {
            Scaling::Standardized => 0.0,
            Scaling::BlackwellGirshick => self.summand.mean() * self.index.mean(),
        }
    }

    pub fn denominator(&self) -> f64 {
        let base = match self.scaling {
            Scaling::Standardized => self.index.mean(),
            Scaling::BlackwellGirshick => self.blackwell_girshick_variance(),
        };
        base.powf(0.5 + self.alpha)
    }

    pub fn scale(&self, s: f64) -> f64 {
        (s - self.center()) / self.denominator()
    }

    /// Raw-sum level corresponding to `Z = t`.
    pub fn sum_threshold(&self, t: f64) -> f64 {
        self.center() + t * self.denominator()
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> RandomSumDraw {
        let nu = self.index.sample(rng);
        let s = self.summand.sample_sum(nu, 0.0, rng);
        RandomSumDraw { nu, s, z: self.scale(s) }
    }
}

/// Draws `(nu, S_nu, Z)` from the stream.
pub fn sample_random_sum<R: Rng + ?Sized>(spec: &RandomSumSpec, rng: &mut R) -> RandomSumDraw {
    spec.sample(rng)
}

/// Partial sums of one martingale path.
pub fn sample_martingale_path<R: Rng + ?Sized>(model: &MartingaleModel, rng: &mut R) -> Vec<f64> {
    model.sample_path(rng)
}
