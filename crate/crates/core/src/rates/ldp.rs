use super::conjugate::{legendre_fenchel, DEFAULT_LAMBDA_WINDOW};
use super::optimize::{logspace, maximize, Ends};
use super::projection::LogGrid;
use super::{FnConvex, RateFunction};
use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::models::{Cgf, IndexModel, SummandModel};

/// `Γ(λ) = sup_{x >= 0} [Λ_X(λ) x - I(x)]`, the conjugate of `I` at
/// `Λ_X(λ)` restricted to the support of the index ratio.
pub fn gamma_sup(summand: &SummandModel, rate: &RateFunction, lambda: f64) -> Result<f64> {
    let c = summand.cgf(lambda)?;
    sup_nonnegative(rate, c, &LogGrid::default())
}

fn sup_nonnegative(rate: &RateFunction, c: f64, grid: &LogGrid) -> Result<f64> {
    let dom = rate.effective_domain();
    let mut points = vec![0.0];
    points.extend(logspace(grid.lo, grid.hi, grid.points));
    for (end, closed) in [(dom.lo, dom.lo_closed), (dom.hi, dom.hi_closed)] {
        if closed && end > grid.lo && end < grid.hi {
            points.push(end);
        }
    }
    points.sort_by(f64::total_cmp);
    points.dedup();
    let objective = |x: f64| {
        let i = rate.eval(x);
        if i == f64::INFINITY {
            f64::NEG_INFINITY
        } else {
            c * x - i
        }
    };
    let ends = Ends { lo_artificial: false, hi_artificial: dom.hi > grid.hi };
    Ok(maximize(objective, &points, ends)?.value)
}

/// `J(y) = sup_λ [λ y - Γ(λ)]` over the default λ window. Values of λ where
/// the inner supremum diverges are excluded from the outer search.
pub fn ldp_rate_via_gamma(summand: &SummandModel, rate: &RateFunction, y: f64) -> Result<f64> {
    let gamma =
        FnConvex::new(Interval::real_line(), |lambda: f64| gamma_sup(summand, rate, lambda).unwrap_or(f64::INFINITY));
    let window = Interval::closed(DEFAULT_LAMBDA_WINDOW.0, DEFAULT_LAMBDA_WINDOW.1);
    legendre_fenchel(&gamma, y, window)
}

/// `(1/μ) Λ_ν(γ Λ_X(t))` for each mean in `mus`, with the index family
/// rescaled to mean μ. Entries whose argument leaves the index CGF domain
/// carry a domain error.
pub fn varadhan_condition_probe(
    summand: &SummandModel,
    index: &IndexModel,
    t: f64,
    gamma: f64,
    mus: &[f64],
) -> Result<Vec<Result<f64>>> {
    if !(gamma > 1.0) {
        return Err(Error::Domain(format!("moment exponent gamma must exceed 1, got {gamma}")));
    }
    let s = gamma * summand.cgf(t)?;
    Ok(mus.iter().map(|&mu| index.with_mean(mu)?.cgf_per_mean(s)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma_of_gaussian_poisson() {
        let g = SummandModel::standard_gaussian();
        let v = gamma_sup(&g, &RateFunction::PoissonEntropy, 1.0).unwrap();
        assert!((v - (0.5f64.exp() - 1.0)).abs() < 1e-12);
        assert!(gamma_sup(&g, &RateFunction::PoissonEntropy, 0.0).unwrap().abs() < 1e-15);
    }

    #[test]
    fn gamma_diverges_for_linear_rate_with_steep_slope() {
        let g = SummandModel::standard_gaussian();
        // Λ_X(2) = 2 > 1 = slope of I
        assert!(matches!(gamma_sup(&g, &RateFunction::Linear, 2.0), Err(Error::Divergence { .. })));
        assert_eq!(gamma_sup(&g, &RateFunction::Linear, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn ldp_rate_at_unit_tilt() {
        let g = SummandModel::standard_gaussian();
        let y = 0.5f64.exp();
        let j = ldp_rate_via_gamma(&g, &RateFunction::PoissonEntropy, y).unwrap();
        assert!((j - 1.0).abs() < 1e-9, "{j}");
        assert!(ldp_rate_via_gamma(&g, &RateFunction::PoissonEntropy, 0.0).unwrap().abs() < 1e-12);
    }

    #[test]
    fn varadhan_probe_entries() {
        let g = SummandModel::standard_gaussian();
        let pois = IndexModel::Poisson { lambda: 1.0 };
        let e1 = std::f64::consts::E - 1.0;
        for v in varadhan_condition_probe(&g, &pois, 1.0, 2.0, &[1.0, 10.0, 1e4]).unwrap() {
            assert!((v.unwrap() - e1).abs() < 1e-14);
        }
        for v in varadhan_condition_probe(&g, &pois, 0.0, 2.0, &[5.0, 50.0]).unwrap() {
            assert_eq!(v.unwrap(), 0.0);
        }
        let geo = IndexModel::Geometric { p: 0.5 };
        for v in varadhan_condition_probe(&g, &geo, 2.0, 1.5, &[2.0]).unwrap() {
            assert!(matches!(v, Err(Error::Domain(_))));
        }
        assert!(varadhan_condition_probe(&g, &pois, 1.0, 1.0, &[1.0]).is_err());
    }
}
