//! Rigorous enclosures for square tails `sum_{k >= m} a_k^2` of a family.
//!
//! Each family carries one [`TailStrategy`]; numerics refuses to build an
//! `A*A` compression for a family without one.

use std::fmt::Debug;

use serde::Serialize;

use crate::scalar::{rational_to_f64, Rational};
use crate::sequences::EntryFn;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TailMethod {
    ClosedForm,
    IntegralTest,
    GeometricRatio,
}

/// Lower and upper bound on a nonnegative series remainder.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TailEnclosure {
    pub lower: f64,
    pub upper: f64,
}

impl TailEnclosure {
    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lower + self.upper)
    }

    pub fn radius(&self) -> f64 {
        0.5 * (self.upper - self.lower)
    }
}

pub trait TailStrategy: Send + Sync + Debug {
    fn method(&self) -> TailMethod;

    /// Enclosure of `sum_{k >= start} a_k^2`.
    fn square_tail(&self, start: usize) -> TailEnclosure;
}

const REL: f64 = 8.0 * f64::EPSILON;

fn widen(lower: f64, upper: f64) -> TailEnclosure {
    TailEnclosure {
        lower: (lower * (1.0 - REL)).max(0.0),
        upper: upper * (1.0 + REL),
    }
}

/// `a_k^2 = scale * ratio^k`, summed in closed form.
#[derive(Debug, Clone)]
pub struct GeometricClosedForm {
    pub scale: Rational,
    pub ratio: Rational,
}

impl TailStrategy for GeometricClosedForm {
    fn method(&self) -> TailMethod {
        TailMethod::ClosedForm
    }

    fn square_tail(&self, start: usize) -> TailEnclosure {
        let s = rational_to_f64(&self.scale);
        let t = rational_to_f64(&self.ratio);
        let v = s * t.powf(start as f64) / (1.0 - t);
        widen(v, v)
    }
}

/// Integral test for a decreasing `g(k) = a_k^2`: with `G(x) = int_x^inf g`,
/// `G(m) <= sum_{k >= m} g(k) <= G(m - 1)`. Valid from `from` on.
pub struct IntegralTest {
    pub antiderivative_tail: Box<dyn Fn(f64) -> f64 + Send + Sync>,
    pub term: EntryFn,
    pub from: usize,
}

impl Debug for IntegralTest {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("IntegralTest").field("from", &self.from).finish()
    }
}

impl TailStrategy for IntegralTest {
    fn method(&self) -> TailMethod {
        TailMethod::IntegralTest
    }

    fn square_tail(&self, start: usize) -> TailEnclosure {
        let g = &self.antiderivative_tail;
        if start > self.from {
            widen(g(start as f64), g(start as f64 - 1.0))
        } else {
            // first term explicitly, integral bound for the rest
            let a = rational_to_f64(&(self.term)(start));
            let rest_lo = g(start as f64 + 1.0);
            let rest_hi = g(start as f64);
            widen(a * a + rest_lo, a * a + rest_hi)
        }
    }
}

/// `a_{k+1}^2 <= ratio * a_k^2` for every `k >= from`, so the tail sits in
/// `[a_m^2, a_m^2 / (1 - ratio)]`.
pub struct GeometricRatio {
    pub term: EntryFn,
    pub ratio: Rational,
    pub from: usize,
}

impl Debug for GeometricRatio {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("GeometricRatio")
            .field("ratio", &self.ratio.to_string())
            .field("from", &self.from)
            .finish()
    }
}

impl TailStrategy for GeometricRatio {
    fn method(&self) -> TailMethod {
        TailMethod::GeometricRatio
    }

    fn square_tail(&self, start: usize) -> TailEnclosure {
        let mut lead = 0.0;
        let mut m = start;
        while m < self.from {
            let a = rational_to_f64(&(self.term)(m));
            lead += a * a;
            m += 1;
        }
        let a = rational_to_f64(&(self.term)(m));
        let t = rational_to_f64(&self.ratio);
        widen(lead + a * a, lead + a * a / (1.0 - t))
    }
}
