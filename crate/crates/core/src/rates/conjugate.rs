use super::optimize::{linspace, maximize, Ends};
use super::ConvexFn;
use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::models::Cgf;

/// Coarse-scan resolution for conjugates.
pub const SCAN_POINTS: usize = 257;

/// Default λ window for conjugates over the real line.
pub const DEFAULT_LAMBDA_WINDOW: (f64, f64) = (-50.0, 50.0);

/// `sup_{λ in search} [λ x - f(λ)]`.
///
/// A search end is treated as a truncation when `f` is still finite beyond
/// it; if the objective keeps increasing towards such an end the supremum is
/// reported as unbounded.
pub fn legendre_fenchel<F: ConvexFn + ?Sized>(f: &F, x: f64, search: Interval) -> Result<f64> {
    if !(search.lo.is_finite() && search.hi.is_finite() && search.lo < search.hi) {
        return Err(Error::Domain(format!(
            "search interval [{}, {}] must be finite and non-empty",
            search.lo, search.hi
        )));
    }
    let dom = f.domain();
    let ends = Ends { lo_artificial: dom.lo < search.lo, hi_artificial: dom.hi > search.hi };
    let grid = linspace(search.lo, search.hi, SCAN_POINTS);
    let objective = |lambda: f64| {
        let v = f.value(lambda);
        if v == f64::INFINITY {
            f64::NEG_INFINITY
        } else {
            lambda * x - v
        }
    };
    match maximize(objective, &grid, ends) {
        Ok(opt) => Ok(opt.value),
        Err(Error::Divergence { .. }) => Err(Error::Unbounded),
        Err(Error::Domain(_)) => Err(Error::Domain("function is +inf on the whole search interval".into())),
        Err(e) => Err(e),
    }
}

/// Cramér transform `sup_λ [λ x - Λ(λ)]` of a model's CGF.
///
/// Solves `Λ'(λ) = x` by safeguarded Newton inside a bracket; returns `+∞`
/// outside the closure of the range of `Λ'`, and the limiting value at a
/// closed end of that range (e.g. `log 2` for Rademacher at `±1`).
pub fn cramer_rate<M: Cgf + ?Sized>(model: &M, x: f64) -> Result<f64> {
    if !(model.variance() > 0.0) {
        return Err(Error::Domain("Cramér transform of a degenerate model".into()));
    }
    if x.is_nan() {
        return Err(Error::Domain("Cramér transform at NaN".into()));
    }
    let range = model.derivative_range();
    if !range.contains(x) {
        return Ok(f64::INFINITY);
    }
    let mean = model.mean();
    if x == mean {
        return Ok(0.0);
    }
    if x == range.lo || x == range.hi {
        return boundary_limit(model, x);
    }
    let dom = model.cgf_domain();
    let up = x > mean;
    let phi = |l: f64| model.cgf_prime(l).map(|d| d - x);

    // Expand away from 0 until Λ' crosses x.
    let mut inner = 0.0;
    let mut outer = None;
    let edge = if up { dom.hi } else { dom.lo };
    for k in 0..1100 {
        let cand = if edge.is_finite() {
            edge * (1.0 - 0.5f64.powi(k + 1))
        } else {
            let mag = 2f64.powi(k);
            if up {
                mag
            } else {
                -mag
            }
        };
        if !cand.is_finite() || cand == inner {
            break;
        }
        let v = phi(cand)?;
        if (up && v >= 0.0) || (!up && v <= 0.0) {
            outer = Some(cand);
            break;
        }
        inner = cand;
    }
    let Some(outer) = outer else {
        // Λ' never reaches x numerically; the objective is monotone in λ,
        // so its value at the last probe is the best available bound.
        return Ok((inner * x - model.cgf(inner)?).max(0.0));
    };
    let (mut a, mut b) = if up { (inner, outer) } else { (outer, inner) };
    let mut lambda = 0.5 * (a + b);
    for _ in 0..300 {
        let v = phi(lambda)?;
        if v.abs() <= 1e-15 * x.abs().max(1.0) {
            break;
        }
        if v > 0.0 {
            b = lambda;
        } else {
            a = lambda;
        }
        let d2 = model.cgf_second(lambda)?;
        let newton = lambda - v / d2;
        lambda = if d2 > 0.0 && newton >= a && newton <= b { newton } else { 0.5 * (a + b) };
        if b - a <= 4.0 * f64::EPSILON * lambda.abs().max(1e-300) {
            break;
        }
    }
    Ok((lambda * x - model.cgf(lambda)?).max(0.0))
}

fn boundary_limit<M: Cgf + ?Sized>(model: &M, x: f64) -> Result<f64> {
    // At a closed end of the derivative range the supremum is approached as
    // λ runs to the matching end of the CGF domain; the objective is
    // monotone along the way.
    let dom = model.cgf_domain();
    let towards_hi = x > model.mean();
    let edge = if towards_hi { dom.hi } else { dom.lo };
    let lambda = if edge.is_finite() {
        edge
    } else if towards_hi {
        1024.0
    } else {
        -1024.0
    };
    let lambda = if edge.is_finite() { lambda - lambda.signum() * 1e-12 } else { lambda };
    Ok((lambda * x - model.cgf(lambda)?).max(0.0))
}
