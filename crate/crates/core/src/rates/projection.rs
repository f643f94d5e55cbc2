use super::optimize::{logspace, minimize, Ends};
use super::RateFunction;
use crate::error::{Error, Result};

/// Log-spaced scan grid for the mixing variable `s > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogGrid {
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
}

impl Default for LogGrid {
    fn default() -> Self {
        LogGrid { lo: 1e-4, hi: 1e4, points: 4097 }
    }
}

impl LogGrid {
    pub fn validate(&self) -> Result<()> {
        if !(self.lo > 0.0 && self.hi > self.lo && self.hi.is_finite() && self.points >= 3) {
            return Err(Error::Domain(format!(
                "invalid s grid [{}, {}] with {} points",
                self.lo, self.hi, self.points
            )));
        }
        Ok(())
    }
}

/// Value and location of an infimum over `s`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Projection {
    pub value: f64,
    pub argmin: f64,
}

/// `inf_{s > 0} [y^2 / (2s) + I(s)]`.
pub fn inf_projection_quadratic(rate: &RateFunction, y: f64, grid: &LogGrid) -> Result<Projection> {
    let half_y2 = 0.5 * y * y;
    project(rate, grid, y == 0.0, |s| if s == 0.0 { 0.0 } else { half_y2 / s })
}

/// `inf_{s > 0} [s K(y / s) + I(s)]`.
pub fn inf_projection_scaled(k: &RateFunction, rate: &RateFunction, y: f64, grid: &LogGrid) -> Result<Projection> {
    let k0 = k.eval(0.0);
    let at_zero = y == 0.0 && k0.is_finite();
    project(rate, grid, at_zero, |s| if s == 0.0 { 0.0 } else { s * k.eval(y / s) })
}

/// Minimizes `cost(s) + I(s)` over `s > 0`. When `cost` extends continuously
/// to `s = 0` with value 0 (`include_zero`), the point `s = 0` joins the
/// search as a natural end.
fn project<C: Fn(f64) -> f64>(rate: &RateFunction, grid: &LogGrid, include_zero: bool, cost: C) -> Result<Projection> {
    grid.validate()?;
    let dom = rate.effective_domain();
    let h = |s: f64| {
        let i = rate.eval(s);
        if i == f64::INFINITY {
            return f64::INFINITY;
        }
        let c = cost(s);
        if c == f64::INFINITY {
            f64::INFINITY
        } else {
            c + i
        }
    };
    if dom.is_point() {
        let s = dom.lo;
        if s > 0.0 || (s == 0.0 && include_zero) {
            return Ok(Projection { value: h(s), argmin: s });
        }
        return Err(Error::Domain(format!("rate is supported at {s}, outside s > 0")));
    }

    let mut points = Vec::with_capacity(grid.points + 3);
    if include_zero && dom.contains(0.0) {
        points.push(0.0);
    }
    points.extend(logspace(grid.lo, grid.hi, grid.points));
    // Closed finite domain ends inside the grid are candidate optima.
    for (end, closed) in [(dom.lo, dom.lo_closed), (dom.hi, dom.hi_closed)] {
        if closed && end > grid.lo && end < grid.hi {
            points.push(end);
        }
    }
    points.sort_by(f64::total_cmp);
    points.dedup();

    let ends = Ends { lo_artificial: points[0] > 0.0 && dom.lo < points[0], hi_artificial: dom.hi > grid.hi };
    let opt = minimize(h, &points, ends)?;
    if opt.value == f64::INFINITY {
        return Err(Error::Domain("objective is +inf on the whole s grid".into()));
    }
    Ok(Projection { value: opt.value, argmin: opt.x })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::SummandModel;

    const SQRT2: f64 = std::f64::consts::SQRT_2;

    #[test]
    fn geometric_projection_is_sqrt2_y() {
        let g = LogGrid::default();
        let p = inf_projection_quadratic(&RateFunction::Linear, 2.0, &g).unwrap();
        assert!((p.value - 2.0 * SQRT2).abs() < 1e-8);
        assert!((p.argmin - SQRT2).abs() < 1e-5);
    }

    #[test]
    fn indicator_recovers_gaussian_rate() {
        let g = LogGrid::default();
        let p = inf_projection_quadratic(&RateFunction::Indicator { at: 1.0 }, 3.0, &g).unwrap();
        assert_eq!(p, Projection { value: 4.5, argmin: 1.0 });
    }

    #[test]
    fn y_zero_gives_zero() {
        let g = LogGrid::default();
        for rate in [RateFunction::Linear, RateFunction::PoissonEntropy] {
            let p = inf_projection_quadratic(&rate, 0.0, &g).unwrap();
            assert!(p.value.abs() < 1e-15, "{rate:?}");
        }
    }

    #[test]
    fn scaled_reductions() {
        let g = LogGrid::default();
        let ind = RateFunction::Indicator { at: 1.0 };
        let v = inf_projection_scaled(&RateFunction::Quadratic, &ind, 2.0, &g).unwrap();
        assert_eq!(v.value, 2.0);
        let k = RateFunction::cramer(SummandModel::Rademacher);
        assert_eq!(inf_projection_scaled(&k, &ind, 0.0, &g).unwrap().value, 0.0);
    }

    #[test]
    fn divergence_at_grid_boundary() {
        let rate = RateFunction::Quadratic;
        let g = LogGrid { lo: 1e-4, hi: 10.0, points: 257 };
        // y^2/2s + s^2/2 has interior optimum; shrink the grid to cut it off.
        let g2 = LogGrid { lo: 1e-4, hi: 0.5, points: 257 };
        assert!(inf_projection_quadratic(&rate, 2.0, &g).is_ok());
        assert!(matches!(inf_projection_quadratic(&rate, 2.0, &g2), Err(Error::Divergence { side: "upper", .. })));
    }
}
