//! Coarse grid scan followed by golden-section refinement.
//!
//! The objectives handled here are concave (maximization) or convex
//! (minimization) but may be non-smooth or take infinite values outside an
//! effective domain, so no derivatives are used. The scan locates the best
//! grid point (the first one on ties); the neighbouring grid points then
//! bracket the optimum of a unimodal function.

use crate::error::{Error, Result};

/// Absolute tolerance of the golden-section stage.
pub const GOLDEN_TOL: f64 = 1e-9;

const INV_PHI: f64 = 0.618_033_988_749_894_9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Optimum {
    pub x: f64,
    pub value: f64,
}

/// Which grid ends are artificial truncations of the true search space.
/// An optimum sitting on an artificial end, with the objective still
/// improving towards it, is reported as divergence.
#[derive(Debug, Clone, Copy)]
pub struct Ends {
    pub lo_artificial: bool,
    pub hi_artificial: bool,
}

fn sanitize(v: f64) -> f64 {
    if v.is_nan() {
        f64::NEG_INFINITY
    } else {
        v
    }
}

pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let step = (hi - lo) / (n - 1) as f64;
    (0..n).map(|i| if i + 1 == n { hi } else { lo + step * i as f64 }).collect()
}

pub fn logspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    let step = (b - a) / (n - 1) as f64;
    (0..n)
        .map(|i| match i {
            0 => lo,
            _ if i + 1 == n => hi,
            _ => (a + step * i as f64).exp(),
        })
        .collect()
}

/// Maximizes a concave `g` over the span of `grid` (sorted ascending).
pub fn maximize<G: Fn(f64) -> f64>(g: G, grid: &[f64], ends: Ends) -> Result<Optimum> {
    let g = |x: f64| sanitize(g(x));
    let values: Vec<f64> = grid.iter().map(|&x| g(x)).collect();
    let mut best = 0;
    for (i, v) in values.iter().enumerate() {
        if *v > values[best] {
            best = i;
        }
    }
    if values[best] == f64::NEG_INFINITY {
        return Err(Error::Domain("objective is infinite on the whole search grid".into()));
    }
    if values[best] == f64::INFINITY {
        return Err(Error::Unbounded);
    }
    let last = grid.len() - 1;
    let improving = |edge: usize, inner: usize| {
        let (ve, vi) = (values[edge], values[inner]);
        ve > vi && ve - vi > 1e-12 * ve.abs().max(1.0)
    };
    if grid.len() > 1 {
        if best == last && ends.hi_artificial && improving(last, last - 1) {
            return Err(Error::Divergence { side: "upper", at: grid[last] });
        }
        if best == 0 && ends.lo_artificial && improving(0, 1) {
            return Err(Error::Divergence { side: "lower", at: grid[0] });
        }
    }
    let a = grid[best.saturating_sub(1)];
    let b = grid[(best + 1).min(last)];
    let refined = golden_max(&g, a, b);
    Ok(if refined.value > values[best] { refined } else { Optimum { x: grid[best], value: values[best] } })
}

/// Minimizes a convex `h`; same contract as [`maximize`].
pub fn minimize<H: Fn(f64) -> f64>(h: H, grid: &[f64], ends: Ends) -> Result<Optimum> {
    let opt = maximize(|x| -h(x), grid, ends)?;
    Ok(Optimum { x: opt.x, value: -opt.value })
}

fn golden_max<G: Fn(f64) -> f64>(g: &G, mut a: f64, mut b: f64) -> Optimum {
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut gc, mut gd) = (g(c), g(d));
    let mut iterations = 0;
    while b - a > GOLDEN_TOL.max(4.0 * f64::EPSILON * a.abs().max(b.abs())) && iterations < 200 {
        if gc >= gd {
            b = d;
            d = c;
            gd = gc;
            c = b - INV_PHI * (b - a);
            gc = g(c);
        } else {
            a = c;
            c = d;
            gc = gd;
            d = a + INV_PHI * (b - a);
            gd = g(d);
        }
        iterations += 1;
    }
    if gc >= gd {
        Optimum { x: c, value: gc }
    } else {
        Optimum { x: d, value: gd }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const FREE: Ends = Ends { lo_artificial: true, hi_artificial: true };

    #[test]
    fn finds_interior_maximum() {
        let grid = linspace(-5.0, 5.0, 257);
        let opt = maximize(|x| -(x - 1.234_567).powi(2), &grid, FREE).unwrap();
        assert!((opt.x - 1.234_567).abs() < 1e-8);
        assert!(opt.value.abs() < 1e-15);
    }

    #[test]
    fn kink_is_located() {
        let grid = linspace(-3.0, 3.0, 257);
        let opt = minimize(|x: f64| (x - 0.3).abs(), &grid, FREE).unwrap();
        assert!((opt.x - 0.3).abs() < 1e-9);
    }

    #[test]
    fn boundary_improvement_is_divergence() {
        let grid = linspace(0.0, 1.0, 11);
        let err = maximize(|x| x, &grid, FREE).unwrap_err();
        assert_eq!(err, Error::Divergence { side: "upper", at: 1.0 });
        let ok = maximize(|x| x, &grid, Ends { lo_artificial: true, hi_artificial: false }).unwrap();
        assert_eq!(ok.x, 1.0);
    }

    #[test]
    fn infinite_values_outside_domain_are_skipped() {
        let grid = linspace(-2.0, 2.0, 9);
        let opt = minimize(|x| if x < 0.5 { f64::INFINITY } else { x * x }, &grid, FREE).unwrap();
        assert!((opt.x - 0.5).abs() < 1e-9);
    }

    #[test]
    fn logspace_hits_endpoints_exactly() {
        let g = logspace(1e-4, 1e4, 4097);
        assert_eq!(g[0], 1e-4);
        assert_eq!(g[4096], 1e4);
        assert!(g.windows(2).all(|w| w[1] > w[0]));
    }
}
