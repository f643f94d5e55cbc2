use super::config::{ExperimentConfig, IndexFamily, ModelKind, SpeedTag, TheoryRate};
use crate::error::{Error, Result};
use crate::models::{Cgf, SummandModel};
use crate::rates::{inf_projection_quadratic, inf_projection_scaled, ldp_rate_via_gamma, LogGrid, RateFunction};

/// Theoretical rate at level `t`. Depends only on the rate tag, the summand
/// law and the index family, never on the scale parameter or the seed.
pub fn theoretical_rate(rate: TheoryRate, summand: &SummandModel, index: Option<IndexFamily>, t: f64) -> Result<f64> {
    let grid = LogGrid::default();
    match rate {
        TheoryRate::Quadratic => Ok(RateFunction::Quadratic.eval(t)),
        TheoryRate::GeometricMdp => Ok(inf_projection_quadratic(&RateFunction::Linear, t, &grid)?.value),
        TheoryRate::PoissonLdp => ldp_rate_via_gamma(summand, &RateFunction::PoissonEntropy, t),
        TheoryRate::CramerComposition => {
            let index_rate = match index {
                Some(IndexFamily::Poisson) => RateFunction::PoissonEntropy,
                Some(IndexFamily::Deterministic) => RateFunction::Indicator { at: 1.0 },
                _ => {
                    return Err(Error::InvalidModel("cramer_composition needs a poisson or deterministic index".into()))
                }
            };
            Ok(inf_projection_scaled(&RateFunction::cramer(*summand), &index_rate, t, &grid)?.value)
        }
    }
}

/// Speed at scale parameter `param` (`lambda`, `p`, `n`, or martingale length).
///
/// Without a theory block the speed is `mu^{2 alpha}` (`n^{2 alpha}` for
/// martingales).
pub fn speed(config: &ExperimentConfig, param: f64) -> Result<f64> {
    let alpha = config.alpha;
    let mu = match (config.model, config.index) {
        (ModelKind::Martingale, _) => param,
        (_, Some(IndexFamily::Geometric)) => 1.0 / param,
        _ => param,
    };
    let tag = config.theory.map(|th| th.speed).unwrap_or(SpeedTag::MuTo2alpha);
    Ok(match tag {
        SpeedTag::ANSquared | SpeedTag::MuTo2alpha => mu.powf(2.0 * alpha),
        SpeedTag::MuToGamma => {
            let gamma =
                config.theory.and_then(|th| th.gamma).ok_or_else(|| Error::config("theory.gamma", "missing"))?;
            mu.powf(gamma)
        }
        SpeedTag::PToMinusAlpha => param.powf(-alpha),
        SpeedTag::MuK => mu,
    })
}

/// Mean of the index for a random-sum config, `n` for a martingale.
pub fn scale_mean(config: &ExperimentConfig, param: f64) -> Result<f64> {
    match config.model {
        ModelKind::Martingale => Ok(param),
        ModelKind::RandomSum => Ok(config.index_model(param)?.mean()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g() -> SummandModel {
        SummandModel::standard_gaussian()
    }

    #[test]
    fn closed_form_rows() {
        let sqrt2 = std::f64::consts::SQRT_2;
        let v = theoretical_rate(TheoryRate::GeometricMdp, &g(), Some(IndexFamily::Geometric), 1.0).unwrap();
        assert!((v - sqrt2).abs() < 1e-8);
        assert_eq!(theoretical_rate(TheoryRate::Quadratic, &g(), None, 3.0).unwrap(), 4.5);
        let y = 0.5f64.exp();
        let v = theoretical_rate(TheoryRate::PoissonLdp, &g(), Some(IndexFamily::Poisson), y).unwrap();
        assert!((v - 1.0).abs() < 1e-8, "{v}");
    }

    #[test]
    fn cramer_composition_with_fixed_index_is_cramer() {
        let r = SummandModel::Rademacher;
        let v = theoretical_rate(TheoryRate::CramerComposition, &r, Some(IndexFamily::Deterministic), 0.5).unwrap();
        let want = 0.5 * (1.5 * 1.5f64.ln() + 0.5 * 0.5f64.ln());
        assert!((v - want).abs() < 1e-9, "{v} vs {want}");
    }

    #[test]
    fn speeds() {
        let c = ExperimentConfig::from_json(
            r#"{"index": "geometric", "p": 0.0001, "alpha": 0.25,
                "theory": {"rate": "geometric_mdp", "speed": "p_to_minus_alpha"}}"#,
        )
        .unwrap();
        assert!((speed(&c, 1e-4).unwrap() - 10.0).abs() < 1e-12);
        let c = ExperimentConfig::from_json(r#"{"index": "poisson", "lambda": 100, "alpha": 0.25}"#).unwrap();
        assert!((speed(&c, 100.0).unwrap() - 10.0).abs() < 1e-12);
    }
}
