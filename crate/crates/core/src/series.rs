//! Truncated Taylor series arithmetic.
//!
//! Cumulants are derivatives of a cumulant generating function at the
//! origin. Rather than differencing the closed forms numerically, every CGF
//! in the catalog is also evaluated on a [`Series`], which propagates the
//! full Taylor expansion through `exp`, `ln` and the field operations. The
//! j-th cumulant is then `j! * coeff[j]`, exact up to rounding.

use std::ops::{Add, Mul, Neg, Sub};

/// Highest Taylor order carried by a [`Series`].
pub const MAX_ORDER: usize = 8;

/// Truncated power series `sum_{k <= MAX_ORDER} c_k t^k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Series {
    c: [f64; MAX_ORDER + 1],
}

impl Series {
    pub fn constant(value: f64) -> Self {
        let mut c = [0.0; MAX_ORDER + 1];
        c[0] = value;
        Series { c }
    }

    /// The identity series `t` scaled by `slope`, expanded around zero.
    pub fn variable(slope: f64) -> Self {
        let mut c = [0.0; MAX_ORDER + 1];
        c[1] = slope;
        Series { c }
    }

    pub fn from_coeffs(coeffs: &[f64]) -> Self {
        let mut c = [0.0; MAX_ORDER + 1];
        for (dst, src) in c.iter_mut().zip(coeffs) {
            *dst = *src;
        }
        Series { c }
    }

    pub fn coeff(&self, k: usize) -> f64 {
        self.c[k]
    }

    pub fn value(&self) -> f64 {
        self.c[0]
    }

    /// k-th derivative at the expansion point.
    pub fn derivative(&self, k: usize) -> f64 {
        self.c[k] * factorial(k)
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut out = *self;
        out.c.iter_mut().for_each(|x| *x *= s);
        out
    }

    pub fn add_const(&self, s: f64) -> Self {
        let mut out = *self;
        out.c[0] += s;
        out
    }

    pub fn exp(&self) -> Self {
        let mut b = [0.0; MAX_ORDER + 1];
        b[0] = self.c[0].exp();
        for k in 1..=MAX_ORDER {
            let acc: f64 = (1..=k).map(|j| j as f64 * self.c[j] * b[k - j]).sum();
            b[k] = acc / k as f64;
        }
        Series { c: b }
    }

    /// Natural logarithm; the constant term must be positive.
    pub fn ln(&self) -> Self {
        let a0 = self.c[0];
        let mut b = [0.0; MAX_ORDER + 1];
        b[0] = a0.ln();
        for k in 1..=MAX_ORDER {
            let acc: f64 = (1..k).map(|j| j as f64 * b[j] * self.c[k - j]).sum();
            b[k] = (self.c[k] - acc / k as f64) / a0;
        }
        Series { c: b }
    }

    pub fn cosh(&self) -> Self {
        (self.exp() + (-*self).exp()).scale(0.5)
    }
}

impl Add for Series {
    type Output = Series;
    fn add(mut self, rhs: Series) -> Series {
        self.c.iter_mut().zip(rhs.c).for_each(|(a, b)| *a += b);
        self
    }
}

impl Sub for Series {
    type Output = Series;
    fn sub(mut self, rhs: Series) -> Series {
        self.c.iter_mut().zip(rhs.c).for_each(|(a, b)| *a -= b);
        self
    }
}

impl Neg for Series {
    type Output = Series;
    fn neg(self) -> Series {
        self.scale(-1.0)
    }
}

impl Mul for Series {
    type Output = Series;
    fn mul(self, rhs: Series) -> Series {
        let mut c = [0.0; MAX_ORDER + 1];
        for (i, a) in self.c.iter().enumerate() {
            for (j, b) in rhs.c.iter().enumerate().take(MAX_ORDER + 1 - i) {
                c[i + j] += a * b;
            }
        }
        Series { c }
    }
}

pub fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}
