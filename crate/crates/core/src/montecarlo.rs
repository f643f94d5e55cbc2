//! Plain and exponentially tilted tail estimators.
//!
//! Under the tilt `θ` the index law is reweighted by `e^{n Λ_X(θ)}` and each
//! summand by `e^{θ x}`; the joint likelihood ratio of a draw with raw sum
//! `S` is `e^{-θ S + ψ(θ)}` with `ψ(θ) = Λ_ν(Λ_X(θ))`. All three catalog
//! index families stay in their family under this reweighting.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::{Cgf, IndexModel, MartingaleModel, RandomSumSpec};
use crate::rng::{run_blocks, Sampling};

/// Smallest sample count accepted by the estimators.
pub const MIN_SAMPLES: u64 = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Method {
    Plain,
    Tilted { theta: f64 },
}

impl Method {
    pub fn name(&self) -> &'static str {
        match self {
            Method::Plain => "plain",
            Method::Tilted { .. } => "tilted",
        }
    }

    pub fn theta(&self) -> f64 {
        match self {
            Method::Plain => 0.0,
            Method::Tilted { theta } => *theta,
        }
    }
}

/// Estimate of `P(Z >= t)` and the rate it implies.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailEstimate {
    pub p_hat: f64,
    pub std_error: f64,
    pub samples: u64,
    pub method: Method,
    pub threshold: f64,
    pub speed: f64,
    /// `-log(p_hat) / speed`; absent when `p_hat = 0`.
    pub empirical_rate: Option<f64>,
    /// No sample hit the event.
    pub zero_hits: bool,
    /// `p_hat ± 3 std_error` leaves `[0, 1]`; [`TailEstimate::ci3`] clamps.
    pub ci_clamped: bool,
}

impl TailEstimate {
    fn new(p_hat: f64, std_error: f64, samples: u64, method: Method, threshold: f64, zero_hits: bool) -> Self {
        let ci_clamped = p_hat - 3.0 * std_error < 0.0 || p_hat + 3.0 * std_error > 1.0;
        TailEstimate {
            p_hat,
            std_error,
            samples,
            method,
            threshold,
            speed: 1.0,
            empirical_rate: empirical_rate(p_hat, 1.0).ok(),
            zero_hits,
            ci_clamped,
        }
    }

    pub fn with_speed(mut self, speed: f64) -> Self {
        self.speed = speed;
        self.empirical_rate = empirical_rate(self.p_hat, speed).ok();
        self
    }

    /// `p_hat ± 3 std_error` clamped to `[0, 1]`.
    pub fn ci3(&self) -> (f64, f64) {
        ((self.p_hat - 3.0 * self.std_error).max(0.0), (self.p_hat + 3.0 * self.std_error).min(1.0))
    }

    pub fn relative_error(&self) -> f64 {
        self.std_error / self.p_hat
    }
}

/// `-log(p_hat) / speed`.
pub fn empirical_rate(p_hat: f64, speed: f64) -> Result<f64> {
    if !(p_hat > 0.0) {
        return Err(Error::UndefinedRate(p_hat));
    }
    if p_hat > 1.0 || !(speed > 0.0) {
        return Err(Error::Domain(format!("need p_hat in (0, 1] and speed > 0, got ({p_hat}, {speed})")));
    }
    Ok(-p_hat.ln() / speed)
}

/// Root of `ψ'(θ) = target` for the compound CGF of the raw sum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TiltSolution {
    pub theta: f64,
    pub psi: f64,
    pub psi_prime: f64,
    pub iterations: u32,
}

struct Compound<'a>(&'a RandomSumSpec);

impl Compound<'_> {
    fn psi(&self, theta: f64) -> Result<f64> {
        self.0.index.cgf(self.0.summand.cgf(theta)?)
    }

    fn psi_prime(&self, theta: f64) -> Result<f64> {
        let u = self.0.summand.cgf(theta)?;
        Ok(self.0.index.cgf_prime(u)? * self.0.summand.cgf_prime(theta)?)
    }

    fn psi_second(&self, theta: f64) -> Result<f64> {
        let u = self.0.summand.cgf(theta)?;
        let d1 = self.0.summand.cgf_prime(theta)?;
        Ok(self.0.index.cgf_second(u)? * d1 * d1 + self.0.index.cgf_prime(u)? * self.0.summand.cgf_second(theta)?)
    }

    /// `ψ'(θ)` if `θ` lies in the joint domain.
    fn slope(&self, theta: f64) -> Option<f64> {
        self.psi_prime(theta).ok().filter(|v| v.is_finite())
    }
}

/// Solves `ψ'(θ) = target_sum` with `θ >= 0`. Targets at or below the mean
/// of the raw sum give `θ = 0`.
pub fn solve_tilt(spec: &RandomSumSpec, target_sum: f64) -> Result<TiltSolution> {
    let c = Compound(spec);
    let at_zero = c.psi_prime(0.0)?;
    if !(target_sum > at_zero) {
        return Ok(TiltSolution { theta: 0.0, psi: 0.0, psi_prime: at_zero, iterations: 0 });
    }
    let infeasible = |boundary: f64| Error::InfeasibleTilt { target: target_sum, boundary };

    // Bracket: grow θ while feasible, bisect towards the domain edge once a
    // probe leaves it.
    let mut lo = 0.0;
    let mut hi = None;
    let mut probe = 0.25;
    let mut edge = f64::INFINITY;
    let mut iterations = 0u32;
    while hi.is_none() {
        iterations += 1;
        if iterations > 2000 || probe > 1e8 {
            return Err(infeasible(lo));
        }
        match c.slope(probe) {
            Some(v) if v >= target_sum => hi = Some(probe),
            Some(_) => {
                lo = probe;
                probe = if edge.is_finite() { 0.5 * (probe + edge) } else { 2.0 * probe };
            }
            None => {
                edge = probe;
                let next = 0.5 * (lo + edge);
                if next <= lo || next >= edge {
                    return Err(infeasible(lo));
                }
                probe = next;
            }
        }
    }
    let (mut a, mut b) = (lo, hi.expect("bracket found"));
    let mut theta = b;
    let tol = 1e-13 * target_sum;
    for _ in 0..200 {
        iterations += 1;
        let v = c.psi_prime(theta)? - target_sum;
        if v.abs() <= tol {
            break;
        }
        if v > 0.0 {
            b = theta;
        } else {
            a = theta;
        }
        let d2 = c.psi_second(theta)?;
        let newton = theta - v / d2;
        theta = if d2 > 0.0 && newton >= a && newton <= b { newton } else { 0.5 * (a + b) };
        if b - a <= 4.0 * f64::EPSILON * theta.abs() {
            break;
        }
    }
    let psi_prime = c.psi_prime(theta)?;
    if (psi_prime - target_sum).abs() > 1e-9 * target_sum {
        return Err(infeasible(theta));
    }
    Ok(TiltSolution { theta, psi: c.psi(theta)?, psi_prime, iterations })
}

/// Draws `(Z, weight)` under the joint tilt.
#[derive(Debug, Clone, Copy)]
pub struct TiltedSampler {
    spec: RandomSumSpec,
    index: IndexModel,
    theta: f64,
    psi: f64,
}

impl TiltedSampler {
    pub fn new(spec: &RandomSumSpec, theta: f64) -> Result<Self> {
        let u = spec.summand.cgf(theta)?;
        Ok(TiltedSampler { spec: *spec, index: spec.index.tilted(u)?, theta, psi: spec.index.cgf(u)? })
    }

    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> (f64, f64) {
        let nu = self.index.sample(rng);
        let s = self.spec.summand.sample_sum(nu, self.theta, rng);
        (self.spec.scale(s), (self.psi - self.theta * s).exp())
    }
}

fn check_samples(sampling: &Sampling) -> Result<()> {
    if sampling.n_samples < MIN_SAMPLES {
        return Err(Error::InsufficientSamples { needed: MIN_SAMPLES as usize, got: sampling.n_samples as usize });
    }
    Ok(())
}

fn from_hits(hits: u64, n: u64, threshold: f64) -> TailEstimate {
    let nf = n as f64;
    let p = hits as f64 / nf;
    TailEstimate::new(p, (p * (1.0 - p) / nf).sqrt(), n, Method::Plain, threshold, hits == 0)
}

/// Frequency of `{Z >= t}` with a binomial standard error.
pub fn estimate_tail_plain(spec: &RandomSumSpec, t: f64, sampling: &Sampling) -> Result<TailEstimate> {
    spec.validate()?;
    check_samples(sampling)?;
    let hits: u64 =
        run_blocks(sampling, |len, rng| (0..len).filter(|_| spec.sample(rng).z >= t).count() as u64).into_iter().sum();
    Ok(from_hits(hits, sampling.n_samples, t))
}

/// Importance-sampling estimate of `P(Z >= t)` under the tilt centering the
/// raw sum at the threshold. Falls back to the plain estimator when the
/// threshold is at or below the mean.
pub fn estimate_tail_tilted(spec: &RandomSumSpec, t: f64, sampling: &Sampling) -> Result<TailEstimate> {
    spec.validate()?;
    check_samples(sampling)?;
    let tilt = solve_tilt(spec, spec.sum_threshold(t))?;
    if tilt.theta == 0.0 {
        return estimate_tail_plain(spec, t, sampling);
    }
    let sampler = TiltedSampler::new(spec, tilt.theta)?;
    let blocks = run_blocks(sampling, |len, rng| {
        let (mut sum, mut sum_sq, mut hits) = (0.0, 0.0, 0u64);
        for _ in 0..len {
            let (z, w) = sampler.draw(rng);
            if z >= t {
                sum += w;
                sum_sq += w * w;
                hits += 1;
            }
        }
        (sum, sum_sq, hits)
    });
    let (mut sum, mut sum_sq, mut hits) = (0.0, 0.0, 0u64);
    for (s, s2, h) in blocks {
        sum += s;
        sum_sq += s2;
        hits += h;
    }
    let n = sampling.n_samples as f64;
    let p = sum / n;
    let var = ((sum_sq / n - p * p) / n).max(0.0);
    Ok(TailEstimate::new(p, var.sqrt(), sampling.n_samples, Method::Tilted { theta: tilt.theta }, t, hits == 0))
}

/// Frequency of `{S_n >= t a_n sqrt(n)}` for the martingale, at speed `a_n^2`.
pub fn estimate_martingale_tail(
    model: &MartingaleModel,
    a_n: f64,
    t: f64,
    sampling: &Sampling,
) -> Result<TailEstimate> {
    model.validate()?;
    check_samples(sampling)?;
    if !(a_n >= 1.0) {
        return Err(Error::Domain(format!("martingale scale a_n must be at least 1, got {a_n}")));
    }
    let level = t * a_n * (model.n as f64).sqrt();
    let sampler = model.terminal_sampler();
    let hits: u64 = run_blocks(sampling, |len, rng| (0..len).filter(|_| sampler.sample(rng) >= level).count() as u64)
        .into_iter()
        .sum();
    Ok(from_hits(hits, sampling.n_samples, t).with_speed(a_n * a_n))
}
