use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Two-point martingale with state-dependent jumps.
///
/// Given the current partial sum `S`, the next difference is `b` with
/// probability `1/(1+b^2)` and `-1/b` otherwise, where
/// `b = 1 + delta * sign(S)` and `sign(0) = +1`. Each difference has
/// conditional mean 0 and conditional variance 1, and is bounded by
/// `max(1 + delta, 1/(1 - delta))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MartingaleModel {
    pub delta: f64,
    pub n: u64,
}

/// Jump law in one regime: up value `b` with probability `p_up`, otherwise `-1/b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepLaw {
    pub b: f64,
    pub p_up: f64,
}

impl StepLaw {
    pub fn new(b: f64) -> Self {
        StepLaw { b, p_up: 1.0 / (1.0 + b * b) }
    }

    pub fn up(&self) -> f64 {
        self.b
    }

    pub fn down(&self) -> f64 {
        -1.0 / self.b
    }

    pub fn conditional_mean(&self) -> f64 {
        self.p_up * self.up() + (1.0 - self.p_up) * self.down()
    }

    pub fn conditional_variance(&self) -> f64 {
        self.p_up * self.up() * self.up() + (1.0 - self.p_up) * self.down() * self.down()
    }
}

impl MartingaleModel {
    pub fn new(delta: f64, n: u64) -> Result<Self> {
        let m = MartingaleModel { delta, n };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..1.0).contains(&self.delta) {
            return Err(Error::InvalidModel(format!("martingale delta must lie in [0, 1), got {}", self.delta)));
        }
        if self.n == 0 {
            return Err(Error::InvalidModel("martingale length must be positive".into()));
        }
        Ok(())
    }

    pub fn step_law(&self, partial_sum: f64) -> StepLaw {
        let sign = if partial_sum >= 0.0 { 1.0 } else { -1.0 };
        StepLaw::new(1.0 + self.delta * sign)
    }

    pub fn difference_bound(&self) -> f64 {
        (1.0 + self.delta).max(1.0 / (1.0 - self.delta))
    }

    /// Partial sums `S_1, ..., S_n`, one difference at a time.
    pub fn sample_path<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        let mut s = 0.0;
        (0..self.n)
            .map(|_| {
                let law = self.step_law(s);
                s += if rng.random::<f64>() < law.p_up { law.up() } else { law.down() };
                s
            })
            .collect()
    }

    /// Terminal value `S_n` with the same law as the last entry of
    /// [`sample_path`](Self::sample_path). Builds a [`TerminalSampler`] per
    /// call; reuse one for many paths.
    pub fn sample_terminal<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.terminal_sampler().sample(rng)
    }

    pub fn terminal_sampler(&self) -> TerminalSampler {
        TerminalSampler {
            model: *self,
            regimes: [self.step_law(0.0), self.step_law(-1.0)].map(|law| (law, BinomialTable::new(law.p_up))),
        }
    }
}

/// Largest batch served from a precomputed table; longer batches are split.
const TABLE_TRIALS: usize = 256;

/// Cumulative distribution functions of `Bin(k, p)` for `k <= TABLE_TRIALS`,
/// sampled by inversion.
#[derive(Debug, Clone)]
struct BinomialTable {
    cdf: Vec<Vec<f64>>,
}

impl BinomialTable {
    fn new(p: f64) -> Self {
        let q = 1.0 - p;
        let cdf = (0..=TABLE_TRIALS)
            .map(|k| {
                let mut pmf = q.powi(k as i32);
                let mut acc = 0.0;
                let mut row = Vec::with_capacity(k + 1);
                for j in 0..=k {
                    acc += pmf;
                    row.push(acc);
                    pmf *= (k - j) as f64 / (j + 1) as f64 * p / q;
                }
                row
            })
            .collect();
        BinomialTable { cdf }
    }

    fn sample<R: Rng + ?Sized>(&self, mut k: u64, rng: &mut R) -> u64 {
        let mut total = 0;
        while k > 0 {
            let m = k.min(TABLE_TRIALS as u64);
            let row = &self.cdf[m as usize];
            let u: f64 = rng.random();
            total += (row.partition_point(|&c| c <= u) as u64).min(m);
            k -= m;
        }
        total
    }
}

/// Reusable sampler of `S_n` for one model.
///
/// While the walk is far enough from zero that no sequence of `k` jumps can
/// change the sign of `S`, those `k` jumps are i.i.d. two-point variables
/// and the number of up-jumps is binomial, so the whole batch is drawn at
/// once.
#[derive(Debug, Clone)]
pub struct TerminalSampler {
    model: MartingaleModel,
    regimes: [(StepLaw, BinomialTable); 2],
}

impl TerminalSampler {
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let mut s = 0.0f64;
        let mut remaining = self.model.n;
        while remaining > 0 {
            let (law, table) = &self.regimes[usize::from(s < 0.0)];
            // Truncating casts stand in for floor/ceil on non-negative values.
            let k = if s >= 0.0 {
                // all-down batch must keep S >= 0
                (s * law.b) as u64
            } else {
                // all-up batch must keep S < 0
                let x = -s / law.b;
                let c = x as u64;
                if c as f64 == x {
                    c.saturating_sub(1)
                } else {
                    c
                }
            }
            .min(remaining);
            if k <= 1 {
                s += if rng.random::<f64>() < law.p_up { law.up() } else { law.down() };
                remaining -= 1;
            } else {
                let ups = table.sample(k, rng);
                s += ups as f64 * law.up() + (k - ups) as f64 * law.down();
                remaining -= k;
            }
        }
        s
    }
}
