//! Analytic and empirical cumulants and the cumulant-type conditions used
//! to establish moderate deviations for random sums.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::{Cgf, RandomSumSpec, Scaling};
use crate::series::{factorial, Series, MAX_ORDER};

/// Highest order for which k-statistics are provided.
pub const MAX_EMPIRICAL_ORDER: usize = 6;

/// Ratios up to `1 + RATIO_SLACK` count as satisfying a bound.
pub const RATIO_SLACK: f64 = 1e-12;

const CHUNK: usize = 1 << 16;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum CumulantSource {
    Analytic,
    Empirical { sample_count: usize, standard_errors: BTreeMap<usize, f64> },
}

/// Cumulants `Γ_j` keyed by order `j >= 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CumulantSequence {
    pub values: BTreeMap<usize, f64>,
    pub source: CumulantSource,
}

impl CumulantSequence {
    pub fn get(&self, order: usize) -> Option<f64> {
        self.values.get(&order).copied()
    }

    pub fn standard_error(&self, order: usize) -> Option<f64> {
        match &self.source {
            CumulantSource::Empirical { standard_errors, .. } => standard_errors.get(&order).copied(),
            CumulantSource::Analytic => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Condition {
    Bernstein,
    Statulevicius,
    IndexCumulant,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Margin {
    pub bound: f64,
    pub value: f64,
    pub ratio: f64,
}

impl Margin {
    fn new(bound: f64, value: f64) -> Self {
        let ratio = if value == 0.0 {
            0.0
        } else if bound == 0.0 {
            f64::INFINITY
        } else {
            value / bound
        };
        Margin { bound, value, ratio }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub condition: Condition,
    pub pass: bool,
    pub per_order_margin: BTreeMap<usize, Margin>,
    /// Largest feasible `Δ`, or smallest feasible `K_1` / `K_2`.
    pub fitted_constant: f64,
}

impl ConditionReport {
    fn new(condition: Condition, per_order_margin: BTreeMap<usize, Margin>, fitted_constant: f64) -> Self {
        let pass = per_order_margin.values().all(|m| m.ratio <= 1.0 + RATIO_SLACK);
        ConditionReport { condition, pass, per_order_margin, fitted_constant }
    }
}

fn check_order(max_order: usize, max: usize) -> Result<()> {
    if max_order > max {
        return Err(Error::OrderTooHigh { order: max_order, max });
    }
    if max_order == 0 {
        return Err(Error::Domain("cumulant order must be at least 1".into()));
    }
    Ok(())
}

fn from_series(series: &Series, max_order: usize) -> CumulantSequence {
    let values = (1..=max_order).map(|j| (j, series.derivative(j))).collect();
    CumulantSequence { values, source: CumulantSource::Analytic }
}

/// Cumulants `Γ_1..Γ_max_order` from the Taylor coefficients of the CGF.
pub fn analytic_cumulants<M: Cgf + ?Sized>(model: &M, max_order: usize) -> Result<CumulantSequence> {
    check_order(max_order, MAX_ORDER)?;
    Ok(from_series(&model.cgf_series(&Series::variable(1.0))?, max_order))
}

/// Cumulants of `Z_{k,0} = S_nu / sqrt(mu)` from `t -> Λ_ν(Λ_X(t / sqrt(mu)))`.
pub fn random_sum_cumulants(spec: &RandomSumSpec, max_order: usize) -> Result<CumulantSequence> {
    check_order(max_order, MAX_ORDER)?;
    spec.validate()?;
    if spec.scaling != Scaling::Standardized || spec.alpha != 0.0 {
        return Err(Error::InvalidModel("random-sum cumulants need standardized scaling with alpha = 0".into()));
    }
    let inner = spec.summand.cgf_series(&Series::variable(1.0 / spec.index.mean().sqrt()))?;
    Ok(from_series(&spec.index.cgf_series(&inner)?, max_order))
}

/// `k_2..k_6` from central moments `m[r] = S_r / n` of a sample of size `n`.
fn k_from_central(n: f64, m: &[f64; 7]) -> [f64; 7] {
    let mut k = [0.0; 7];
    k[2] = n * m[2] / (n - 1.0);
    k[3] = n * n * m[3] / ((n - 1.0) * (n - 2.0));
    k[4] = n * n * ((n + 1.0) * m[4] - 3.0 * (n - 1.0) * m[2] * m[2]) / ((n - 1.0) * (n - 2.0) * (n - 3.0));
    k[5] = n.powi(3) * ((n + 5.0) * m[5] - 10.0 * (n - 1.0) * m[2] * m[3])
        / ((n - 1.0) * (n - 2.0) * (n - 3.0) * (n - 4.0));
    k[6] = n
        * n
        * ((n + 1.0) * (n * n + 15.0 * n - 4.0) * m[6]
            - 15.0 * (n - 1.0) * (n - 1.0) * (n + 4.0) * m[2] * m[4]
            - 10.0 * (n - 1.0) * (n * n - n + 4.0) * m[3] * m[3]
            + 30.0 * n * (n - 1.0) * (n - 2.0) * m[2].powi(3))
        / ((n - 1.0) * (n - 2.0) * (n - 3.0) * (n - 4.0) * (n - 5.0));
    k
}

/// Blockwise sums reduced in block order, so the result does not depend on
/// the number of workers.
fn ordered_sum<const N: usize, F>(len: usize, f: F) -> [f64; N]
where
    F: Fn(usize) -> [f64; N] + Sync,
{
    let blocks: Vec<[f64; N]> = (0..len.div_ceil(CHUNK))
        .into_par_iter()
        .map(|b| {
            let mut acc = [0.0; N];
            for i in b * CHUNK..((b + 1) * CHUNK).min(len) {
                let v = f(i);
                for (a, x) in acc.iter_mut().zip(v) {
                    *a += x;
                }
            }
            acc
        })
        .collect();
    let mut total = [0.0; N];
    for blk in blocks {
        for (t, x) in total.iter_mut().zip(blk) {
            *t += x;
        }
    }
    total
}

fn binomial(r: usize, q: usize) -> f64 {
    factorial(r) / (factorial(q) * factorial(r - q))
}

/// Unbiased k-statistics `k_1..k_max_order` with jackknife standard errors.
///
/// Each leave-one-out estimate is obtained in constant time by re-centering
/// the central power sums binomially, so the jackknife is `O(n)` overall.
/// Standard errors for orders that need more than `n - 1` points are NaN.
pub fn k_statistics(samples: &[f64], max_order: usize) -> Result<CumulantSequence> {
    check_order(max_order, MAX_EMPIRICAL_ORDER)?;
    let len = samples.len();
    let needed = max_order.max(2);
    if len < needed {
        return Err(Error::InsufficientSamples { needed, got: len });
    }
    let n = len as f64;
    let mean = ordered_sum::<1, _>(len, |i| [samples[i]])[0] / n;
    let sums = ordered_sum::<7, _>(len, |i| {
        let y = samples[i] - mean;
        let mut p = [0.0; 7];
        let mut acc = 1.0;
        for v in p.iter_mut() {
            *v = acc;
            acc *= y;
        }
        p
    });
    let central = |s: &[f64; 7], count: f64| {
        let mut m = [0.0; 7];
        #[allow(clippy::needless_range_loop)]
        for r in 2..7 {
            m[r] = s[r] / count;
        }
        m
    };
    let mut full = k_from_central(n, &central(&sums, n));
    full[1] = mean;

    let leave_one_out = |i: usize| -> [f64; 7] {
        let y = samples[i] - mean;
        // shift of the mean when sample i is dropped
        let d = -y / (n - 1.0);
        let mut s = [0.0; 7];
        #[allow(clippy::needless_range_loop)]
        for r in 2..7 {
            // sum over all points of (y_k - d)^r, then drop point i
            let mut total = 0.0;
            for q in 0..=r {
                let sq = if q == 0 { n } else { sums[q] };
                total += binomial(r, q) * (-d).powi((r - q) as i32) * sq;
            }
            s[r] = total - (y - d).powi(r as i32);
        }
        let mut k = k_from_central(n - 1.0, &central(&s, n - 1.0));
        k[1] = mean + d;
        k
    };
    let dev = ordered_sum::<14, _>(len, |i| {
        let k = leave_one_out(i);
        let mut out = [0.0; 14];
        for j in 1..7 {
            let e = k[j] - full[j];
            out[j] = e;
            out[7 + j] = e * e;
        }
        out
    });

    let mut values = BTreeMap::new();
    let mut standard_errors = BTreeMap::new();
    for j in 1..=max_order {
        values.insert(j, full[j]);
        let se = if len > j.max(2) {
            let mean_dev = dev[j] / n;
            let ss = (dev[7 + j] - n * mean_dev * mean_dev).max(0.0);
            ((n - 1.0) / n * ss).sqrt()
        } else {
            f64::NAN
        };
        standard_errors.insert(j, se);
    }
    Ok(CumulantSequence { values, source: CumulantSource::Empirical { sample_count: len, standard_errors } })
}

/// `|m_j| <= j! K_1^{j-2} c^2` for every supplied order `j >= 3`.
pub fn bernstein_check(moments: &BTreeMap<usize, f64>, c2: f64, k1: f64) -> ConditionReport {
    let mut margins = BTreeMap::new();
    let mut fitted: f64 = 0.0;
    for (&j, &m) in moments.range(3..) {
        let bound = factorial(j) * k1.powi(j as i32 - 2) * c2;
        margins.insert(j, Margin::new(bound, m.abs()));
        fitted = fitted.max((m.abs() / (factorial(j) * c2)).powf(1.0 / (j as f64 - 2.0)));
    }
    ConditionReport::new(Condition::Bernstein, margins, fitted)
}

/// `|Γ_j(ν)| <= j! K_2^{j-1} μ` for `j = 1..max_order`; the fitted `K_2` uses
/// orders `j >= 2` (order 1 holds with equality for every `K_2`).
pub fn index_cumulant_check<M: Cgf + ?Sized>(index: &M, k2: f64, max_order: usize) -> Result<ConditionReport> {
    let cumulants = analytic_cumulants(index, max_order)?;
    let mu = index.mean();
    let mut margins = BTreeMap::new();
    let mut fitted: f64 = 0.0;
    for (&j, &g) in &cumulants.values {
        let bound = factorial(j) * k2.powi(j as i32 - 1) * mu;
        margins.insert(j, Margin::new(bound, g.abs()));
        if j >= 2 {
            fitted = fitted.max((g.abs() / (factorial(j) * mu)).powf(1.0 / (j as f64 - 1.0)));
        }
    }
    Ok(ConditionReport::new(Condition::IndexCumulant, margins, fitted))
}

/// `|Γ_j| <= (j!)^{1+γ} / Δ^{j-2}` for every order `j >= 3` in the sequence.
/// The fitted constant is the largest feasible `Δ` (`+∞` if all those
/// cumulants vanish).
pub fn statulevicius_check(seq: &CumulantSequence, gamma: f64, delta: f64) -> ConditionReport {
    let mut margins = BTreeMap::new();
    let mut fitted = f64::INFINITY;
    for (&j, &g) in seq.values.range(3..) {
        let jf = factorial(j).powf(1.0 + gamma);
        margins.insert(j, Margin::new(jf / delta.powi(j as i32 - 2), g.abs()));
        if g != 0.0 {
            fitted = fitted.min((jf / g.abs()).powf(1.0 / (j as f64 - 2.0)));
        }
    }
    ConditionReport::new(Condition::Statulevicius, margins, fitted)
}

/// `Δ^{1/(1+2γ)}`: moderate-deviation scales `a_n` must be of smaller order.
pub fn mdp_speed_threshold(gamma: f64, delta: f64) -> Result<f64> {
    if !(delta > 0.0) || !(gamma >= 0.0) {
        return Err(Error::Domain(format!("need delta > 0 and gamma >= 0, got ({delta}, {gamma})")));
    }
    Ok(delta.powf(1.0 / (1.0 + 2.0 * gamma)))
}
