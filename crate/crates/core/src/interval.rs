use serde::{Deserialize, Serialize};

/// Real interval with optionally infinite ends and per-end closedness.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
    #[serde(default)]
    pub lo_closed: bool,
    #[serde(default)]
    pub hi_closed: bool,
}

impl Interval {
    pub fn closed(lo: f64, hi: f64) -> Self {
        Interval { lo, hi, lo_closed: lo.is_finite(), hi_closed: hi.is_finite() }
    }

    pub fn open(lo: f64, hi: f64) -> Self {
        Interval { lo, hi, lo_closed: false, hi_closed: false }
    }

    pub fn real_line() -> Self {
        Interval::open(f64::NEG_INFINITY, f64::INFINITY)
    }

    pub fn point(x: f64) -> Self {
        Interval::closed(x, x)
    }

    pub fn contains(&self, x: f64) -> bool {
        let above = if self.lo_closed { x >= self.lo } else { x > self.lo };
        let below = if self.hi_closed { x <= self.hi } else { x < self.hi };
        above && below
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi && self.lo_closed && self.hi_closed
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    /// Intersection, keeping the tighter end on each side.
    pub fn intersect(&self, other: &Interval) -> Interval {
        let (lo, lo_closed) = if self.lo > other.lo {
            (self.lo, self.lo_closed)
        } else if other.lo > self.lo {
            (other.lo, other.lo_closed)
        } else {
            (self.lo, self.lo_closed && other.lo_closed)
        };
        let (hi, hi_closed) = if self.hi < other.hi {
            (self.hi, self.hi_closed)
        } else if other.hi < self.hi {
            (other.hi, other.hi_closed)
        } else {
            (self.hi, self.hi_closed && other.hi_closed)
        };
        Interval { lo, hi, lo_closed, hi_closed }
    }

    pub fn is_empty(&self) -> bool {
        self.lo > self.hi || (self.lo == self.hi && !(self.lo_closed && self.hi_closed))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn membership_respects_closedness() {
        let i = Interval { lo: 0.0, hi: 1.0, lo_closed: true, hi_closed: false };
        assert!(i.contains(0.0));
        assert!(!i.contains(1.0));
        assert!(Interval::real_line().contains(1e300));
        assert!(Interval::point(2.0).is_point());
    }

    #[test]
    fn intersection_takes_tighter_ends() {
        let a = Interval::closed(0.0, 10.0);
        let b = Interval::open(1.0, f64::INFINITY);
        let c = a.intersect(&b);
        assert_eq!(c, Interval { lo: 1.0, hi: 10.0, lo_closed: false, hi_closed: true });
        assert!(Interval::closed(2.0, 1.0).is_empty());
    }
}
