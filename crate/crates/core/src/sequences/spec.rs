//! JSON family specs:
//!
//! ```json
//! {"name": "my-cesaro", "kind": "factorable",
//!  "a": {"type": "closed-form", "rule": "reciprocal-linear", "offset": "$k"},
//!  "params": {"k": "1/2"}, "rho_limit_zero": true}
//! ```
//!
//! Value strings are rationals (`"p/q"`) or `"$name"` references into
//! `params`. Tables list a finite prefix and continue with a closed-form
//! `tail` (evaluated at the absolute index) or repeat periodically.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::tails::{GeometricClosedForm, IntegralTest, TailStrategy};
use crate::scalar::{int, parse_rational, pow, rational_to_f64, Rational};

use super::registry::{FamilyBuilder, FamilyRegistry, ParamSpec};
use super::{DeclaredBounds, EntryFn, Family, FamilyKind, Params, RatioBehavior, SequenceFamily, WeightSequence};

/// Prefix on which user families are checked for positivity and
/// monotonicity of `a_k / c_k`.
pub const VALIDATE_UPTO: usize = 256;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilySpec {
    pub name: String,
    pub kind: FamilyKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<SequenceSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<SequenceSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub w: Option<SequenceSpec>,
    #[serde(default)]
    pub params: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub declared_bounds: Option<DeclaredBounds>,
    #[serde(default)]
    pub rho_limit_zero: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub zero_prefix_len: Option<usize>,
    /// `"p/q"` for a known bound on `|w_k / w_{k+1}|`, or `"unbounded"`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ratio_bound: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum SequenceSpec {
    ClosedForm(RuleSpec),
    Table {
        values: Vec<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        tail: Option<RuleSpec>,
        #[serde(default)]
        periodic: bool,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "kebab-case")]
pub enum RuleSpec {
    /// `value`
    Constant { value: String },
    /// `scale / (offset + i)`
    ReciprocalLinear {
        #[serde(default = "one_str")]
        scale: String,
        offset: String,
    },
    /// `scale * ratio^i`
    Geometric {
        #[serde(default = "one_str")]
        scale: String,
        ratio: String,
    },
    /// The same coordinate of a built-in family, built with this spec's
    /// params.
    Catalog { family: String },
}

fn one_str() -> String {
    "1".into()
}

#[derive(Clone, Copy)]
enum Coord {
    A,
    C,
    W,
}

fn resolve(s: &str, params: &Params) -> Result<Rational> {
    match s.trim().strip_prefix('$') {
        Some(name) => params
            .get(name)
            .cloned()
            .ok_or_else(|| Error::FamilySpec(format!("unknown parameter reference ${name}"))),
        None => parse_rational(s),
    }
}

impl RuleSpec {
    fn entry_fn(&self, coord: Coord, params: &Params) -> Result<EntryFn> {
        Ok(match self {
            RuleSpec::Constant { value } => {
                let v = resolve(value, params)?;
                Arc::new(move |_| v.clone())
            }
            RuleSpec::ReciprocalLinear { scale, offset } => {
                let s = resolve(scale, params)?;
                let o = resolve(offset, params)?;
                if o <= Rational::zero() {
                    return Err(Error::FamilySpec("reciprocal-linear needs offset > 0".into()));
                }
                Arc::new(move |i| s.clone() / (o.clone() + int(i as i64)))
            }
            RuleSpec::Geometric { scale, ratio } => {
                let s = resolve(scale, params)?;
                let r = resolve(ratio, params)?;
                if r.is_zero() {
                    return Err(Error::FamilySpec("geometric ratio must be nonzero".into()));
                }
                Arc::new(move |i| s.clone() * pow(&r, i as i64))
            }
            RuleSpec::Catalog { family } => {
                let built = FamilyRegistry::with_catalog().build(family, params)?;
                match (coord, built) {
                    (Coord::A, Family::Factorable(f)) => f.a_fn(),
                    (Coord::C, Family::Factorable(f)) => {
                        if f.is_terraced() {
                            Arc::new(|_| Rational::one())
                        } else {
                            f.c_fn()
                        }
                    }
                    (Coord::W, Family::Shift(w)) => w.w_fn(),
                    _ => {
                        return Err(Error::FamilySpec(format!(
                            "catalog family {family} has no such coordinate"
                        )))
                    }
                }
            }
        })
    }

    /// Square-tail strategy for `a_i` given by this rule alone.
    fn square_tail(&self, params: &Params, term: EntryFn) -> Option<Arc<dyn TailStrategy>> {
        match self {
            RuleSpec::Geometric { scale, ratio } => {
                let s = resolve(scale, params).ok()?;
                let r = resolve(ratio, params).ok()?;
                let r2 = r.clone() * r;
                (r2 < int(1)).then(|| {
                    Arc::new(GeometricClosedForm {
                        scale: s.clone() * s,
                        ratio: r2,
                    }) as Arc<dyn TailStrategy>
                })
            }
            RuleSpec::ReciprocalLinear { scale, offset } => {
                let s = rational_to_f64(&resolve(scale, params).ok()?);
                let o = rational_to_f64(&resolve(offset, params).ok()?);
                Some(Arc::new(IntegralTest {
                    antiderivative_tail: Box::new(move |x| s * s / (x + o)),
                    term,
                    from: 0,
                }))
            }
            _ => None,
        }
    }
}

impl SequenceSpec {
    fn entry_fn(&self, coord: Coord, params: &Params) -> Result<EntryFn> {
        match self {
            SequenceSpec::ClosedForm(rule) => rule.entry_fn(coord, params),
            SequenceSpec::Table { values, tail, periodic } => {
                let values: Vec<Rational> = values.iter().map(|v| resolve(v, params)).collect::<Result<_>>()?;
                let values = Arc::new(values);
                match (tail, *periodic) {
                    (Some(_), true) => Err(Error::FamilySpec(
                        "table cannot be both periodic and have a tail".into(),
                    )),
                    (None, true) => {
                        if values.is_empty() {
                            return Err(Error::FamilySpec("periodic table is empty".into()));
                        }
                        Ok(Arc::new(move |i| values[i % values.len()].clone()))
                    }
                    (Some(rule), false) => {
                        let tail = rule.entry_fn(coord, params)?;
                        Ok(Arc::new(move |i| match values.get(i) {
                            Some(v) => v.clone(),
                            None => tail(i),
                        }))
                    }
                    (None, false) => Err(Error::FamilySpec("table needs a tail rule or periodic = true".into())),
                }
            }
        }
    }
}

impl FamilySpec {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::FamilySpec(e.to_string()))
    }

    fn resolved_params(&self, overrides: &Params) -> Result<Params> {
        let mut params = Params::new();
        for (k, v) in &self.params {
            params.insert(k.clone(), parse_rational(v)?);
        }
        for (k, v) in overrides {
            params.insert(k.clone(), v.clone());
        }
        Ok(params)
    }

    pub fn build(&self, overrides: &Params) -> Result<Family> {
        let params = self.resolved_params(overrides)?;
        match self.kind {
            FamilyKind::Factorable => {
                let a_spec = self
                    .a
                    .as_ref()
                    .ok_or_else(|| Error::FamilySpec("factorable family needs \"a\"".into()))?;
                let a = a_spec.entry_fn(Coord::A, &params)?;
                let mut fam = match &self.c {
                    Some(c) => SequenceFamily::new(&self.name, a.clone(), c.entry_fn(Coord::C, &params)?),
                    None => SequenceFamily::terraced(&self.name, a.clone()),
                };
                fam = fam.with_params(params.clone()).with_rho_limit_zero(self.rho_limit_zero);
                if let Some(b) = &self.declared_bounds {
                    fam = fam.with_bounds(b.clone());
                }
                if let SequenceSpec::ClosedForm(rule) = a_spec {
                    if let Some(t) = rule.square_tail(&params, a) {
                        fam = fam.with_square_tail(t);
                    }
                }
                fam.validate(VALIDATE_UPTO)?;
                Ok(Family::Factorable(fam))
            }
            FamilyKind::Shift => {
                let w_spec = self
                    .w
                    .as_ref()
                    .ok_or_else(|| Error::FamilySpec("shift family needs \"w\"".into()))?;
                let mut w = WeightSequence::new(&self.name, w_spec.entry_fn(Coord::W, &params)?);
                w.params = params;
                if let Some(len) = self.zero_prefix_len {
                    w = w.with_zero_prefix(len);
                }
                w = w.with_ratio_behavior(match self.ratio_bound.as_deref() {
                    None => RatioBehavior::Unknown,
                    Some("unbounded") => RatioBehavior::Unbounded,
                    Some(b) => RatioBehavior::Bounded(parse_rational(b)?),
                });
                Ok(Family::Shift(w))
            }
        }
    }

    pub fn into_builder(self) -> JsonFamilyBuilder {
        JsonFamilyBuilder { spec: self }
    }
}

/// Registry adapter for a family defined in JSON.
pub struct JsonFamilyBuilder {
    spec: FamilySpec,
}

impl FamilyBuilder for JsonFamilyBuilder {
    fn name(&self) -> &str {
        &self.spec.name
    }

    fn kind(&self) -> FamilyKind {
        self.spec.kind
    }

    fn description(&self) -> &str {
        "user family (JSON spec)"
    }

    fn params(&self) -> Vec<ParamSpec> {
        self.spec
            .params
            .iter()
            .map(|(k, v)| ParamSpec {
                name: k.clone(),
                default: parse_rational(v).ok(),
                range: "user",
            })
            .collect()
    }

    fn build(&self, params: &Params) -> Result<Family> {
        self.spec.build(params)
    }
}
