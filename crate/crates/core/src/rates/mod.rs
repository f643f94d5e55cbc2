//! Rate functions and the variational formulas built on them.
//!
//! `+∞` is represented by `f64::INFINITY`; every routine checks for it
//! explicitly before doing arithmetic.

mod conjugate;
mod ldp;
pub mod optimize;
mod projection;

pub use conjugate::{cramer_rate, legendre_fenchel, DEFAULT_LAMBDA_WINDOW, SCAN_POINTS};
pub use ldp::{gamma_sup, ldp_rate_via_gamma, varadhan_condition_probe};
pub use projection::{inf_projection_quadratic, inf_projection_scaled, LogGrid, Projection};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::models::{Cgf, CgfModel};

/// Anything that can be conjugated: a convex function with a known
/// effective domain, returning `+∞` outside it.
pub trait ConvexFn {
    fn value(&self, x: f64) -> f64;
    fn domain(&self) -> Interval;
}

/// A closure with an explicit effective domain.
pub struct FnConvex<F> {
    pub f: F,
    pub domain: Interval,
}

impl<F: Fn(f64) -> f64> FnConvex<F> {
    pub fn new(domain: Interval, f: F) -> Self {
        FnConvex { f, domain }
    }
}

impl<F: Fn(f64) -> f64> ConvexFn for FnConvex<F> {
    fn value(&self, x: f64) -> f64 {
        if self.domain.contains(x) {
            (self.f)(x)
        } else {
            f64::INFINITY
        }
    }
    fn domain(&self) -> Interval {
        self.domain
    }
}

/// The CGF of a model as a convex function.
pub struct CgfFn<'a, M: Cgf + ?Sized>(pub &'a M);

impl<M: Cgf + ?Sized> ConvexFn for CgfFn<'_, M> {
    fn value(&self, x: f64) -> f64 {
        self.0.cgf(x).unwrap_or(f64::INFINITY)
    }
    fn domain(&self) -> Interval {
        self.0.cgf_domain()
    }
}

/// Function values on a strictly increasing grid, linearly interpolated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table {
    grid: Vec<f64>,
    values: Vec<f64>,
    convex: bool,
}

impl Table {
    pub fn new(grid: Vec<f64>, values: Vec<f64>, convex: bool) -> Result<Self> {
        if grid.len() < 2 || grid.len() != values.len() {
            return Err(Error::InvalidModel("tabulated rate needs matching grid and values of length >= 2".into()));
        }
        if grid.windows(2).any(|w| !(w[1] > w[0])) || grid.iter().any(|g| !g.is_finite()) {
            return Err(Error::InvalidModel("tabulated grid must be finite and strictly increasing".into()));
        }
        if values.iter().any(|v| v.is_nan()) {
            return Err(Error::InvalidModel("tabulated values must not be NaN".into()));
        }
        let table = Table { grid, values, convex };
        if convex {
            if let Some(i) = table.convexity_violation() {
                return Err(Error::InvalidModel(format!("tabulated rate flagged convex fails at grid index {i}")));
            }
        }
        Ok(table)
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn is_convex(&self) -> bool {
        self.convex
    }

    /// First interior index whose divided second difference is below `-1e-9`.
    pub fn convexity_violation(&self) -> Option<usize> {
        (1..self.grid.len() - 1).find(|&i| {
            let (x0, x1, x2) = (self.grid[i - 1], self.grid[i], self.grid[i + 1]);
            let (y0, y1, y2) = (self.values[i - 1], self.values[i], self.values[i + 1]);
            if !(y0.is_finite() && y1.is_finite() && y2.is_finite()) {
                return false;
            }
            let d2 = ((y2 - y1) / (x2 - x1) - (y1 - y0) / (x1 - x0)) / (0.5 * (x2 - x0));
            d2 < -1e-9
        })
    }

    pub fn eval(&self, x: f64) -> f64 {
        let n = self.grid.len();
        if !(x >= self.grid[0] && x <= self.grid[n - 1]) {
            return f64::INFINITY;
        }
        let i = self.grid.partition_point(|&g| g <= x).clamp(1, n - 1);
        let (x0, x1) = (self.grid[i - 1], self.grid[i]);
        let (y0, y1) = (self.values[i - 1], self.values[i]);
        if x == x1 {
            return y1;
        }
        if x == x0 {
            return y0;
        }
        if !(y0.is_finite() && y1.is_finite()) {
            return f64::INFINITY;
        }
        y0 + (y1 - y0) * (x - x0) / (x1 - x0)
    }
}

/// A convex rate function, from the closed-form catalog or a table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum RateFunction {
    /// `x^2 / 2`.
    Quadratic,
    /// `x` on `x >= 0`.
    Linear,
    /// `1 - x + x log x` on `x >= 0`.
    PoissonEntropy,
    /// `0` at `at`, `+∞` elsewhere.
    Indicator {
        at: f64,
    },
    /// Cramér transform of a model's CGF.
    CramerConjugate {
        model: CgfModel,
    },
    Tabulated {
        table: Table,
    },
}

impl RateFunction {
    pub fn cramer(model: impl Into<CgfModel>) -> Self {
        RateFunction::CramerConjugate { model: model.into() }
    }

    pub fn tabulated(grid: Vec<f64>, values: Vec<f64>, convex: bool) -> Result<Self> {
        Ok(RateFunction::Tabulated { table: Table::new(grid, values, convex)? })
    }

    pub fn eval(&self, x: f64) -> f64 {
        if x.is_nan() {
            return f64::INFINITY;
        }
        match self {
            RateFunction::Quadratic => 0.5 * x * x,
            RateFunction::Linear => {
                if x >= 0.0 {
                    x
                } else {
                    f64::INFINITY
                }
            }
            RateFunction::PoissonEntropy => {
                if x > 0.0 {
                    1.0 - x + x * x.ln()
                } else if x == 0.0 {
                    1.0
                } else {
                    f64::INFINITY
                }
            }
            RateFunction::Indicator { at } => {
                if x == *at {
                    0.0
                } else {
                    f64::INFINITY
                }
            }
            RateFunction::CramerConjugate { model } => {
                if model.variance() > 0.0 {
                    cramer_rate(model, x).unwrap_or(f64::INFINITY)
                } else if x == model.mean() {
                    0.0
                } else {
                    f64::INFINITY
                }
            }
            RateFunction::Tabulated { table } => table.eval(x),
        }
    }

    pub fn effective_domain(&self) -> Interval {
        match self {
            RateFunction::Quadratic => Interval::real_line(),
            RateFunction::Linear | RateFunction::PoissonEntropy => Interval::closed(0.0, f64::INFINITY),
            RateFunction::Indicator { at } => Interval::point(*at),
            RateFunction::CramerConjugate { model } => {
                if model.variance() > 0.0 {
                    model.derivative_range()
                } else {
                    Interval::point(model.mean())
                }
            }
            RateFunction::Tabulated { table } => {
                let finite: Vec<f64> =
                    table.grid.iter().zip(&table.values).filter(|(_, v)| v.is_finite()).map(|(g, _)| *g).collect();
                match (finite.first(), finite.last()) {
                    (Some(&lo), Some(&hi)) => Interval::closed(lo, hi),
                    _ => Interval::open(0.0, 0.0),
                }
            }
        }
    }

    /// Point where the rate vanishes (the smallest table minimizer for
    /// tabulated rates).
    pub fn minimizer(&self) -> f64 {
        match self {
            RateFunction::Quadratic | RateFunction::Linear => 0.0,
            RateFunction::PoissonEntropy => 1.0,
            RateFunction::Indicator { at } => *at,
            RateFunction::CramerConjugate { model } => model.mean(),
            RateFunction::Tabulated { table } => {
                let mut best = 0;
                for (i, v) in table.values.iter().enumerate() {
                    if *v < table.values[best] {
                        best = i;
                    }
                }
                table.grid[best]
            }
        }
    }
}

impl ConvexFn for RateFunction {
    fn value(&self, x: f64) -> f64 {
        self.eval(x)
    }
    fn domain(&self) -> Interval {
        self.effective_domain()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{IndexModel, SummandModel};

    #[test]
    fn catalog_minimizers_are_zeros() {
        let rates = [
            RateFunction::Quadratic,
            RateFunction::Linear,
            RateFunction::PoissonEntropy,
            RateFunction::Indicator { at: 1.0 },
            RateFunction::cramer(SummandModel::Rademacher),
            RateFunction::cramer(IndexModel::Geometric { p: 0.3 }),
        ];
        for r in &rates {
            let m = r.minimizer();
            assert!(r.eval(m).abs() < 1e-12, "{r:?}");
            assert!(r.eval(m + 0.1) > 0.0 && r.eval(m - 0.1) > 0.0, "{r:?}");
        }
    }

    #[test]
    fn outside_domain_is_infinite() {
        assert_eq!(RateFunction::Linear.eval(-1e-12), f64::INFINITY);
        assert_eq!(RateFunction::PoissonEntropy.eval(-1.0), f64::INFINITY);
        assert_eq!(RateFunction::PoissonEntropy.eval(0.0), 1.0);
        assert_eq!(RateFunction::cramer(SummandModel::Rademacher).eval(1.5), f64::INFINITY);
    }

    #[test]
    fn table_interpolates_and_checks_convexity() {
        let t = RateFunction::tabulated(vec![-1.0, 0.0, 2.0], vec![1.0, 0.0, 4.0], true).unwrap();
        assert_eq!(t.eval(1.0), 2.0);
        assert_eq!(t.eval(-0.5), 0.5);
        assert_eq!(t.eval(2.5), f64::INFINITY);
        assert_eq!(t.minimizer(), 0.0);
        assert!(RateFunction::tabulated(vec![0.0, 1.0, 2.0], vec![0.0, 1.0, 1.5], true).is_err());
        assert!(RateFunction::tabulated(vec![0.0, 1.0, 2.0], vec![0.0, 1.0, 1.5], false).is_ok());
        assert!(RateFunction::tabulated(vec![0.0, 0.0], vec![0.0, 1.0], false).is_err());
    }

    #[test]
    fn serde_round_trip() {
        let r = RateFunction::cramer(IndexModel::Poisson { lambda: 2.0 });
        let s = serde_json::to_string(&r).unwrap();
        assert_eq!(serde_json::from_str::<RateFunction>(&s).unwrap(), r);
    }
}
