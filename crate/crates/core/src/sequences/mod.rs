//! Sequence families: the coefficients `a_i`, `c_j` of factorable matrices
//! and the weights `w_n` of unilateral weighted shifts.

mod catalog;
mod registry;
mod spec;

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::tails::TailStrategy;
use crate::scalar::{serde_rational, Rational};

pub use catalog::catalog_builders;
pub use registry::{FamilyBuilder, FamilyRegistry, ParamSpec, CATALOG_ENV};
pub use spec::{FamilySpec, RuleSpec, SequenceSpec};

/// Index -> exact value. Pure, so families can be shared across threads.
pub type EntryFn = Arc<dyn Fn(usize) -> Rational + Send + Sync>;

pub type Params = BTreeMap<String, Rational>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FamilyKind {
    Factorable,
    Shift,
}

/// Global bounds `q_lower <= q_k <= q_upper`, `p_lower <= p_k <= p_upper` on
/// the interrupter diagonals of a family, used to lift finite scans to
/// statements about every index.
#[derive(Debug, Clone, PartialEq, Serialize, serde::Deserialize)]
pub struct DeclaredBounds {
    #[serde(with = "serde_rational")]
    pub q_lower: Rational,
    #[serde(with = "serde_rational")]
    pub q_upper: Rational,
    #[serde(with = "serde_rational")]
    pub p_lower: Rational,
    #[serde(with = "serde_rational")]
    pub p_upper: Rational,
}

/// Coefficients of a lower-triangular factorable matrix `m_ij = a_i c_j`
/// (`j <= i`).
#[derive(Clone)]
pub struct SequenceFamily {
    pub name: String,
    a: EntryFn,
    c: EntryFn,
    terraced: bool,
    pub params: Params,
    pub declared_bounds: Option<DeclaredBounds>,
    /// Asserts `a_k / c_k` decreases strictly to zero.
    pub rho_limit_zero: bool,
    square_tail: Option<Arc<dyn TailStrategy>>,
    pair_closed_form: Option<(EntryFn, EntryFn)>,
}

impl fmt::Debug for SequenceFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SequenceFamily")
            .field("name", &self.name)
            .field("params", &self.params)
            .field("terraced", &self.terraced)
            .field("rho_limit_zero", &self.rho_limit_zero)
            .finish()
    }
}

impl SequenceFamily {
    pub fn new(name: impl Into<String>, a: EntryFn, c: EntryFn) -> Self {
        Self {
            name: name.into(),
            a,
            c,
            terraced: false,
            params: Params::new(),
            declared_bounds: None,
            rho_limit_zero: false,
            square_tail: None,
            pair_closed_form: None,
        }
    }

    /// A terraced family: `c_j = 1` for every `j`.
    pub fn terraced(name: impl Into<String>, a: EntryFn) -> Self {
        let mut fam = Self::new(name, a, Arc::new(|_| Rational::one()));
        fam.terraced = true;
        fam
    }

    pub fn with_params(mut self, params: Params) -> Self {
        self.params = params;
        self
    }

    pub fn with_bounds(mut self, bounds: DeclaredBounds) -> Self {
        self.declared_bounds = Some(bounds);
        self
    }

    pub fn with_rho_limit_zero(mut self, flag: bool) -> Self {
        self.rho_limit_zero = flag;
        self
    }

    pub fn with_square_tail(mut self, tail: Arc<dyn TailStrategy>) -> Self {
        self.square_tail = Some(tail);
        self
    }

    /// Closed forms `(q, p)` for the ratio-built interrupter pair. They must
    /// agree with the generic formulas; they only skip the big-number
    /// normalizations those need.
    pub fn with_pair_closed_form(mut self, q: EntryFn, p: EntryFn) -> Self {
        self.pair_closed_form = Some((q, p));
        self
    }

    pub fn pair_closed_form(&self) -> Option<&(EntryFn, EntryFn)> {
        self.pair_closed_form.as_ref()
    }

    pub fn a(&self, i: usize) -> Rational {
        (self.a)(i)
    }

    pub fn c(&self, j: usize) -> Rational {
        if self.terraced {
            Rational::one()
        } else {
            (self.c)(j)
        }
    }

    pub fn a_fn(&self) -> EntryFn {
        self.a.clone()
    }

    pub fn c_fn(&self) -> EntryFn {
        self.c.clone()
    }

    pub fn is_terraced(&self) -> bool {
        self.terraced
    }

    pub fn square_tail(&self) -> Option<&Arc<dyn TailStrategy>> {
        self.square_tail.as_ref()
    }

    /// Ratio `a_k / c_k`.
    pub fn rho(&self, k: usize) -> Rational {
        self.a(k) / self.c(k)
    }

    /// `rho_k - rho_{k+1}`, the common numerator of both interrupter formulas.
    pub fn rho_gap(&self, k: usize) -> Rational {
        self.rho(k) - self.rho(k + 1)
    }

    /// Checks `a_i, c_i > 0` and, when `rho_limit_zero` is set, strict
    /// decrease of `rho` on `0..=upto`.
    pub fn validate(&self, upto: usize) -> Result<()> {
        let mut prev: Option<Rational> = None;
        for k in 0..=upto {
            let a = self.a(k);
            if !a.is_positive() {
                return Err(Error::NonPositiveEntry {
                    what: "a",
                    index: k,
                    value: a.to_string(),
                });
            }
            let c = self.c(k);
            if !c.is_positive() {
                return Err(Error::NonPositiveEntry {
                    what: "c",
                    index: k,
                    value: c.to_string(),
                });
            }
            if self.rho_limit_zero {
                let rho = a / c;
                if let Some(p) = &prev {
                    if rho >= *p {
                        return Err(Error::RhoNotDecreasing { index: k - 1 });
                    }
                }
                prev = Some(rho);
            }
        }
        Ok(())
    }

    /// First `k < upto` with `rho_k <= rho_{k+1}`, if any.
    pub fn first_rho_violation(&self, upto: usize) -> Option<usize> {
        let mut prev = self.rho(0);
        for k in 0..upto {
            let next = self.rho(k + 1);
            if next >= prev {
                return Some(k);
            }
            prev = next;
        }
        None
    }
}

/// What is known about `sup_k |w_k / w_{k+1}|` from the closed form.
#[derive(Debug, Clone, PartialEq)]
pub enum RatioBehavior {
    Bounded(Rational),
    Unbounded,
    Unknown,
}

/// Weights of the unilateral shift `W e_n = w_n e_{n+1}`.
#[derive(Clone)]
pub struct WeightSequence {
    pub name: String,
    w: EntryFn,
    /// Length of the zero prefix `w_0 = ... = w_{len-1} = 0`, when the family
    /// is of that shape.
    pub zero_prefix_len: Option<usize>,
    pub ratio_behavior: RatioBehavior,
    pub params: Params,
}

impl fmt::Debug for WeightSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("WeightSequence")
            .field("name", &self.name)
            .field("zero_prefix_len", &self.zero_prefix_len)
            .field("ratio_behavior", &self.ratio_behavior)
            .finish()
    }
}

impl WeightSequence {
    pub fn new(name: impl Into<String>, w: EntryFn) -> Self {
        Self {
            name: name.into(),
            w,
            zero_prefix_len: None,
            ratio_behavior: RatioBehavior::Unknown,
            params: Params::new(),
        }
    }

    /// Weights from a finite list, repeated periodically.
    pub fn periodic(name: impl Into<String>, values: Vec<Rational>) -> Self {
        assert!(!values.is_empty(), "periodic weights need at least one value");
        let values = Arc::new(values);
        Self::new(name, Arc::new(move |n| values[n % values.len()].clone()))
    }

    pub fn with_zero_prefix(mut self, len: usize) -> Self {
        self.zero_prefix_len = Some(len);
        self
    }

    pub fn with_ratio_behavior(mut self, behavior: RatioBehavior) -> Self {
        self.ratio_behavior = behavior;
        self
    }

    pub fn w(&self, n: usize) -> Rational {
        (self.w)(n)
    }

    pub fn w_fn(&self) -> EntryFn {
        self.w.clone()
    }

    /// First zero weight among `w_0..w_{n-1}`.
    pub fn first_zero(&self, n: usize) -> Option<usize> {
        (0..n).find(|&i| self.w(i).is_zero())
    }

    pub fn is_injective_to(&self, n: usize) -> bool {
        self.first_zero(n).is_none()
    }
}

/// Either kind of catalog entry.
#[derive(Debug, Clone)]
pub enum Family {
    Factorable(SequenceFamily),
    Shift(WeightSequence),
}

impl Family {
    pub fn name(&self) -> &str {
        match self {
            Family::Factorable(f) => &f.name,
            Family::Shift(w) => &w.name,
        }
    }

    pub fn kind(&self) -> FamilyKind {
        match self {
            Family::Factorable(_) => FamilyKind::Factorable,
            Family::Shift(_) => FamilyKind::Shift,
        }
    }

    pub fn into_factorable(self) -> Result<SequenceFamily> {
        match self {
            Family::Factorable(f) => Ok(f),
            Family::Shift(w) => Err(Error::NotFactorable(w.name)),
        }
    }

    pub fn into_shift(self) -> Result<WeightSequence> {
        match self {
            Family::Shift(w) => Ok(w),
            Family::Factorable(f) => Err(Error::NotShift(f.name)),
        }
    }
}

/// Builds a catalog factorable family by name.
pub fn make_family(name: &str, params: &Params) -> Result<SequenceFamily> {
    FamilyRegistry::with_catalog().build(name, params)?.into_factorable()
}

/// Builds a catalog weighted shift by name.
pub fn make_shift(name: &str, params: &Params) -> Result<WeightSequence> {
    FamilyRegistry::with_catalog().build(name, params)?.into_shift()
}

/// `a_k / c_k`.
pub fn rho(fam: &SequenceFamily, k: usize) -> Rational {
    fam.rho(k)
}

/// Fibonacci numbers `f_0 = 0`, `f_1 = 1`, by fast doubling.
pub fn fibonacci(n: usize) -> BigUint {
    fib_pair(n).0
}

// (f_n, f_{n+1})
fn fib_pair(n: usize) -> (BigUint, BigUint) {
    if n == 0 {
        return (BigUint::zero(), BigUint::one());
    }
    let (a, b) = fib_pair(n / 2);
    let two_b = &b << 1usize;
    let c = &a * (&two_b - &a);
    let d = &a * &a + &b * &b;
    if n.is_multiple_of(2) {
        (c, d)
    } else {
        let e = &c + &d;
        (d, e)
    }
}
