use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::{Cgf, IndexModel, MartingaleModel, RandomSumSpec, Scaling, SummandModel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    #[default]
    RandomSum,
    Martingale,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IndexFamily {
    Poisson,
    Geometric,
    Deterministic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SummandFamily {
    #[default]
    Gaussian,
    Rademacher,
    ShiftedExponential,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SamplerKind {
    #[default]
    Plain,
    Tilted,
}

/// Which closed-form or variational rate the empirical rates are compared to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TheoryRate {
    /// `t^2 / 2`.
    Quadratic,
    /// `inf_s [t^2/2s + s]`, i.e. `sqrt(2) t`.
    GeometricMdp,
    /// Outer conjugate of `Γ` with the Poisson entropy as index rate.
    PoissonLdp,
    /// `inf_s [s K(t/s) + I(s)]` with `K` the summand Cramér rate and `I`
    /// the index rate.
    CramerComposition,
}

impl TheoryRate {
    pub const ALL: [TheoryRate; 4] =
        [TheoryRate::Quadratic, TheoryRate::GeometricMdp, TheoryRate::PoissonLdp, TheoryRate::CramerComposition];

    pub fn name(&self) -> &'static str {
        match self {
            TheoryRate::Quadratic => "quadratic",
            TheoryRate::GeometricMdp => "geometric_mdp",
            TheoryRate::PoissonLdp => "poisson_ldp",
            TheoryRate::CramerComposition => "cramer_composition",
        }
    }
}

/// How the speed is computed from the scale parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpeedTag {
    /// `a_n^2` with `a_n = n^alpha` (deterministic index or martingale).
    ANSquared,
    MuTo2alpha,
    /// `mu^gamma`; needs `gamma` in `(0, 2 alpha]`.
    MuToGamma,
    /// `p^{-alpha}`, geometric index only.
    PToMinusAlpha,
    MuK,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Theory {
    pub rate: TheoryRate,
    pub speed: SpeedTag,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
}

fn default_t_grid() -> Vec<f64> {
    vec![1.0]
}

fn default_n_samples() -> u64 {
    100_000
}

fn is_default<T: Default + PartialEq>(v: &T) -> bool {
    *v == T::default()
}

/// Flat JSON experiment description.
///
/// Random sums name an index family with its parameter (`lambda`, `p` or
/// `n`) and a summand law; martingales give `delta` and the length `n`.
/// `scale_sequence` lists index parameters (or martingale lengths) to sweep;
/// when empty the single configured parameter is used.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default, skip_serializing_if = "is_default")]
    pub model: ModelKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub index: Option<IndexFamily>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub summand: Option<SummandFamily>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub summand_mean: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub summand_variance: Option<f64>,
    #[serde(default, skip_serializing_if = "is_default")]
    pub scaling: Scaling,
    pub alpha: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub scale_sequence: Vec<f64>,
    #[serde(default = "default_t_grid")]
    pub t_grid: Vec<f64>,
    #[serde(default)]
    pub sampler: SamplerKind,
    #[serde(default = "default_n_samples")]
    pub n_samples: u64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theory: Option<Theory>,
}

/// The model a single report row runs on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RowModel {
    RandomSum(RandomSumSpec),
    Martingale(MartingaleModel),
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let config: ExperimentConfig = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            Error::config(if path == "." { String::new() } else { path }, e.inner().to_string())
        })?;
        config.validate()?;
        Ok(config)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn summand_model(&self) -> Result<SummandModel> {
        let family = self.summand.unwrap_or_default();
        let m = match family {
            SummandFamily::Gaussian => SummandModel::Gaussian {
                mean: self.summand_mean.unwrap_or(0.0),
                variance: self.summand_variance.unwrap_or(1.0),
            },
            _ if self.summand_mean.is_some() || self.summand_variance.is_some() => {
                return Err(Error::config("summand_mean", "only gaussian summands take a mean and variance"));
            }
            SummandFamily::Rademacher => SummandModel::Rademacher,
            SummandFamily::ShiftedExponential => SummandModel::ShiftedExponential,
        };
        m.validate().map_err(|e| Error::config("summand", e.to_string()))?;
        Ok(m)
    }

    /// The configured index parameter (`lambda`, `p`, `n`, or martingale length).
    pub fn base_parameter(&self) -> Result<f64> {
        let (name, value) = match (self.model, self.index) {
            (ModelKind::Martingale, _) => ("n", self.n.map(|n| n as f64)),
            (ModelKind::RandomSum, Some(IndexFamily::Poisson)) => ("lambda", self.lambda),
            (ModelKind::RandomSum, Some(IndexFamily::Geometric)) => ("p", self.p),
            (ModelKind::RandomSum, Some(IndexFamily::Deterministic)) => ("n", self.n.map(|n| n as f64)),
            (ModelKind::RandomSum, None) => {
                return Err(Error::config("index", "random-sum configs need an index family"))
            }
        };
        match value {
            Some(v) => Ok(v),
            None if !self.scale_sequence.is_empty() => Ok(self.scale_sequence[0]),
            None => Err(Error::config(name, "missing parameter and no scale_sequence given")),
        }
    }

    /// Parameters swept by the experiment.
    pub fn scale_parameters(&self) -> Result<Vec<f64>> {
        if self.scale_sequence.is_empty() {
            Ok(vec![self.base_parameter()?])
        } else {
            Ok(self.scale_sequence.clone())
        }
    }

    pub fn index_model(&self, param: f64) -> Result<IndexModel> {
        let m = match self.index {
            Some(IndexFamily::Poisson) => IndexModel::Poisson { lambda: param },
            Some(IndexFamily::Geometric) => IndexModel::Geometric { p: param },
            Some(IndexFamily::Deterministic) => IndexModel::Deterministic { n: 1 }.with_parameter(param)?,
            None => return Err(Error::config("index", "random-sum configs need an index family")),
        };
        m.validate()?;
        Ok(m)
    }

    pub fn row_model(&self, param: f64) -> Result<RowModel> {
        match self.model {
            ModelKind::RandomSum => Ok(RowModel::RandomSum(RandomSumSpec::new(
                self.summand_model()?,
                self.index_model(param)?,
                self.alpha,
                self.scaling,
            )?)),
            ModelKind::Martingale => {
                if param.fract() != 0.0 || param < 1.0 {
                    return Err(Error::InvalidModel(format!(
                        "martingale length must be a positive integer, got {param}"
                    )));
                }
                Ok(RowModel::Martingale(MartingaleModel::new(self.delta.unwrap_or(f64::NAN), param as u64)?))
            }
        }
    }

    /// `1 + 2 alpha - gamma` for speed tag `mu_to_gamma`.
    pub fn beta(&self) -> Option<f64> {
        let th = self.theory?;
        match (th.speed, th.gamma) {
            (SpeedTag::MuToGamma, Some(g)) => Some(1.0 + 2.0 * self.alpha - g),
            _ => None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=0.5).contains(&self.alpha) {
            return Err(Error::config("alpha", format!("alpha must lie in [0, 1/2], got {}", self.alpha)));
        }
        if self.t_grid.is_empty() || self.t_grid.iter().any(|t| !t.is_finite()) {
            return Err(Error::config("t_grid", "t_grid must be a non-empty list of finite numbers"));
        }
        if self.n_samples < crate::montecarlo::MIN_SAMPLES {
            return Err(Error::config(
                "n_samples",
                format!("n_samples must be at least {}, got {}", crate::montecarlo::MIN_SAMPLES, self.n_samples),
            ));
        }
        match self.model {
            ModelKind::RandomSum => self.validate_random_sum()?,
            ModelKind::Martingale => self.validate_martingale()?,
        }
        for (i, &param) in self.scale_parameters()?.iter().enumerate() {
            self.row_model(param).map_err(|e| {
                let path =
                    if self.scale_sequence.is_empty() { "index".to_string() } else { format!("scale_sequence[{i}]") };
                match e {
                    Error::Config { .. } => e,
                    other => Error::config(path, other.to_string()),
                }
            })?;
        }
        if let Some(theory) = &self.theory {
            self.validate_theory(theory)?;
        }
        Ok(())
    }

    fn validate_random_sum(&self) -> Result<()> {
        let Some(index) = self.index else {
            return Err(Error::config("index", "random-sum configs need an index family"));
        };
        if self.delta.is_some() {
            return Err(Error::config("delta", "delta applies to martingale configs only"));
        }
        let fields = [("lambda", self.lambda.is_some()), ("p", self.p.is_some()), ("n", self.n.is_some())];
        let expected = match index {
            IndexFamily::Poisson => "lambda",
            IndexFamily::Geometric => "p",
            IndexFamily::Deterministic => "n",
        };
        for (name, present) in fields {
            if present && name != expected {
                return Err(Error::config(
                    name,
                    format!("`{name}` does not apply to a {index:?} index").to_lowercase(),
                ));
            }
        }
        self.summand_model()?;
        Ok(())
    }

    fn validate_martingale(&self) -> Result<()> {
        for (name, present) in [
            ("index", self.index.is_some()),
            ("lambda", self.lambda.is_some()),
            ("p", self.p.is_some()),
            ("summand", self.summand.is_some()),
            ("summand_mean", self.summand_mean.is_some()),
            ("summand_variance", self.summand_variance.is_some()),
        ] {
            if present {
                return Err(Error::config(name, format!("`{name}` does not apply to martingale configs")));
            }
        }
        if self.sampler == SamplerKind::Tilted {
            return Err(Error::config("sampler", "martingale tails are estimated by plain sampling only"));
        }
        match self.delta {
            None => Err(Error::config("delta", "martingale configs need delta")),
            Some(d) => MartingaleModel::new(d, 1).map(|_| ()).map_err(|e| Error::config("delta", e.to_string())),
        }
    }

    fn validate_theory(&self, theory: &Theory) -> Result<()> {
        let fail = |path: &str, msg: String| Err(Error::config(format!("theory.{path}"), msg));
        let index = self.index;
        let martingale = self.model == ModelKind::Martingale;
        match theory.speed {
            SpeedTag::ANSquared if !(martingale || index == Some(IndexFamily::Deterministic)) => {
                return fail("speed", "a_n_squared needs a deterministic index or a martingale".into());
            }
            SpeedTag::PToMinusAlpha if index != Some(IndexFamily::Geometric) || martingale => {
                return fail("speed", "p_to_minus_alpha applies to geometric indices only".into());
            }
            SpeedTag::MuToGamma => match theory.gamma {
                None => return fail("gamma", "mu_to_gamma needs gamma".into()),
                Some(g) if !(g > 0.0 && g <= 2.0 * self.alpha) => {
                    return fail(
                        "gamma",
                        format!("gamma must lie in (0, 2 alpha] = (0, {}], got {g}", 2.0 * self.alpha),
                    );
                }
                _ => {}
            },
            SpeedTag::MuK if self.alpha != 0.5 => {
                return fail("speed", "mu_k is the large-deviation speed and needs alpha = 1/2".into());
            }
            _ => {}
        }
        if theory.gamma.is_some() && theory.speed != SpeedTag::MuToGamma {
            return fail("gamma", "gamma is only used by the mu_to_gamma speed".into());
        }
        if martingale && theory.rate != TheoryRate::Quadratic {
            return fail("rate", "martingale configs compare against the quadratic rate".into());
        }
        let full_line = || self.summand_model().map(|m| m.cgf_domain().hi == f64::INFINITY).unwrap_or(false);
        match theory.rate {
            TheoryRate::GeometricMdp if index != Some(IndexFamily::Geometric) => {
                fail("rate", "geometric_mdp needs a geometric index".into())
            }
            TheoryRate::PoissonLdp if index != Some(IndexFamily::Poisson) || self.alpha != 0.5 || !full_line() => fail(
                "rate",
                "poisson_ldp needs a poisson index, alpha = 1/2 and a summand CGF finite on the whole line".into(),
            ),
            TheoryRate::CramerComposition
                if !matches!(index, Some(IndexFamily::Poisson | IndexFamily::Deterministic)) || !full_line() =>
            {
                fail("rate", "cramer_composition needs a poisson or deterministic index and a summand CGF finite on the whole line".into())
            }
            _ => Ok(()),
        }
    }
}

pub fn read_config(path: &Path) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    ExperimentConfig::from_json(&text).map_err(|e| match e {
        Error::Config { path: field, message } => Error::config(field, format!("{message} (in {})", path.display())),
        other => other,
    })
}

pub fn write_config(config: &ExperimentConfig, path: &Path) -> Result<()> {
    std::fs::write(path, config.to_json() + "\n").map_err(|e| Error::io(path, e))
}
