//! Built-in commands. Each one resolves its inputs, calls the owning module
//! and shapes the result; no mathematics lives here.

use std::sync::Arc;

use serde_json::{json, Value};

use super::{Command, Context};
use crate::certificates::{
    check_explicit_deltas, corollary5_certify, shift_posinormal_conditions, theorem5_certify, theorem6_with_limits,
    Claim, WindowTail,
};
use crate::dominance::dominance_quantity;
use crate::error::{Error, Result};
use crate::interrupters::{
    pair_collapse, prop3_pair, prop5_pair, verify_factorization_identity, verify_shift_identity,
    verify_shifted_identity,
};
use crate::matrix::{DiagonalOperator, TruncatedOperator};
use crate::numerics::{gamma_estimate_with, psd_check_with, CommutatorParts, OperatorSource, PsdVerdict};
use crate::scalar::{int, parse_rational, Rational};
use crate::sequences::{Family, FamilyKind};
use crate::shifts::classify_shift;

/// Default tail start for compressions.
pub const DEFAULT_TAIL_START: usize = 1 << 16;

pub fn builtin_commands() -> Vec<Arc<dyn Command>> {
    vec![
        Arc::new(FamiliesList),
        Arc::new(VerifyIdentity),
        Arc::new(Certify),
        Arc::new(DeltaSearch),
        Arc::new(Theorem5),
        Arc::new(ShiftClassify),
        Arc::new(FalsifyHyponormal),
        Arc::new(Gamma),
        Arc::new(Dominance),
        Arc::new(ShiftedIdentity),
    ]
}

fn to_value<T: serde::Serialize>(x: &T) -> Result<Value> {
    Ok(serde_json::to_value(x)?)
}

fn parse_claim(s: Option<&str>) -> Result<Claim> {
    match s.unwrap_or("posinormal") {
        "posinormal" => Ok(Claim::Posinormal),
        "coposinormal" => Ok(Claim::Coposinormal),
        "hyponormal" => Ok(Claim::Hyponormal),
        other => Err(Error::Config(format!(
            "unknown claim {other:?} (posinormal, coposinormal, hyponormal)"
        ))),
    }
}

fn operator_source(ctx: &Context<'_>) -> Result<OperatorSource> {
    Ok(match ctx.resolve_family()? {
        Family::Factorable(f) => OperatorSource::Factorable(f),
        Family::Shift(w) => OperatorSource::Shift(w),
    })
}

fn parts(ctx: &Context<'_>, n: usize) -> Result<CommutatorParts> {
    let k = ctx.config.tail_start.unwrap_or(DEFAULT_TAIL_START).max(n);
    CommutatorParts::new(&operator_source(ctx)?, n, k)
}

struct FamiliesList;

impl Command for FamiliesList {
    fn name(&self) -> &'static str {
        "families list"
    }
    fn summary(&self) -> &'static str {
        "list registered families and their parameters"
    }
    fn run(&self, ctx: &Context<'_>) -> Result<Value> {
        let rows: Vec<Value> = ctx
            .registry
            .builders()
            .map(|b| {
                let params: Vec<Value> = b
                    .params()
                    .into_iter()
                    .map(|p| {
                        json!({
                            "name": p.name,
                            "default": p.default.map(|d| d.to_string()),
                            "range": p.range,
                        })
                    })
                    .collect();
                json!({
                    "name": b.name(),
                    "kind": match b.kind() {
                        FamilyKind::Factorable => "factorable",
                        FamilyKind::Shift => "shift",
                    },
                    "description": b.description(),
                    "params": params,
                })
            })
            .collect();
        Ok(Value::Array(rows))
    }
}

struct VerifyIdentity;

impl Command for VerifyIdentity {
    fn name(&self) -> &'static str {
        "verify identity"
    }
    fn summary(&self) -> &'static str {
        "check MQM* = M*PM (factorable) or WQW* = W*PW (shift) exactly"
    }
    fn run(&self, ctx: &Context<'_>) -> Result<Value> {
        let n = ctx.config.n.unwrap_or(32);
        match ctx.resolve_family()? {
            Family::Factorable(f) => {
                let pair = prop5_pair(&f)?;
                let rep = verify_factorization_identity(&f, &pair, n)?;
                Ok(json!({ "pair_source": pair.source, "identity": to_value(&rep)? }))
            }
            Family::Shift(w) => {
                let p0 = ctx.config.p0.clone().unwrap_or_else(|| int(1));
                let pair = prop3_pair(&w, &p0)?;
                let rep = verify_shift_identity(&w, &pair, n)?;
                Ok(json!({ "pair_source": pair.source, "identity": to_value(&rep)? }))
            }
        }
    }
}

struct Certify;

impl Command for Certify {
    fn name(&self) -> &'static str {
        "certify"
    }
    fn summary(&self) -> &'static str {
        "diagonal certificate delta1 Q >= I >= delta2 P, or the shift zero-prefix conditions"
    }
    fn run(&self, ctx: &Context<'_>) -> Result<Value> {
        let cfg = ctx.config;
        let n = cfg.n.unwrap_or(64);
        let cert = match ctx.resolve_family()? {
            Family::Factorable(f) => {
                let claim = parse_claim(cfg.claim.as_deref())?;
                let pair = prop5_pair(&f)?;
                match (&cfg.delta1, &cfg.delta2) {
                    (Some(d1), Some(d2)) => check_explicit_deltas(&pair, claim, d1, d2, n),
                    (None, None) => corollary5_certify(&pair, claim, n, f.declared_bounds.as_ref())?,
                    _ => return Err(Error::Config("give both --delta1 and --delta2, or neither".into())),
                }
            }
            Family::Shift(w) => {
                if !matches!(cfg.claim.as_deref(), None | Some("posinormal")) {
                    return Err(Error::Config("shift certificates decide posinormality only".into()));
                }
                let n_zero = cfg
                    .n_zero
                    .unwrap_or_else(|| w.zero_prefix_len.map_or(-1, |l| l as i64 - 1));
                shift_posinormal_conditions(&w, n_zero, n)?
            }
        };
        to_value(&cert)
    }
}

struct DeltaSearch;

impl Command for DeltaSearch {
    fn name(&self) -> &'static str {
        "delta-search"
    }
    fn summary(&self) -> &'static str {
        "exact interval of delta with delta q_k >= 1 >= delta p_k"
    }
    fn run(&self, ctx: &Context<'_>) -> Result<Value> {
        let f = ctx.resolve_family()?.into_factorable()?;
        let iv = theorem6_with_limits(&f, ctx.config.k_max.unwrap_or(256))?;
        let cert = iv.certificate();
        Ok(json!({
            "feasible": iv.feasible,
            "delta": if iv.feasible { iv.lower.value.as_ref().map(|v| v.to_string()) } else { None },
            "verdict": cert.verdict,
            "interval": to_value(&iv)?,
        }))
    }
}

struct Theorem5;

impl Command for Theorem5 {
    fn name(&self) -> &'static str {
        "theorem5"
    }
    fn summary(&self) -> &'static str {
        "check Q >= D >= P >= 0 entrywise for a diagonal D"
    }
    fn run(&self, ctx: &Context<'_>) -> Result<Value> {
        let cfg = ctx.config;
        let f = ctx.resolve_family()?.into_factorable()?;
        let Some(last) = cfg.d_prefix.last() else {
            return Err(Error::Config("theorem5 needs --d with at least one entry".into()));
        };
        let tail = cfg.d_tail.clone().unwrap_or_else(|| last.clone());
        let d = DiagonalOperator::from_prefix("D", cfg.d_prefix.clone(), tail.clone());
        let n = cfg.n.unwrap_or(cfg.d_prefix.len()).max(cfg.d_prefix.len());
        let pair = prop5_pair(&f)?;
        let window = f
            .declared_bounds
            .as_ref()
            .map(|b| WindowTail::from_declared(b, tail.clone()));
        let cert = theorem5_certify(&pair.q, &pair.p, &d, n, window.as_ref());
        Ok(json!({ "d_tail": tail.to_string(), "certificate": to_value(&cert)? }))
    }
}

struct ShiftClassify;

impl Command for ShiftClassify {
    fn name(&self) -> &'static str {
        "shift classify"
    }
    fn summary(&self) -> &'static str {
        "injectivity, supraposinormality and posinormality of a weighted shift"
    }
    fn run(&self, ctx: &Context<'_>) -> Result<Value> {
        let w = ctx.resolve_family()?.into_shift()?;
        to_value(&classify_shift(&w, ctx.config.n.unwrap_or(64))?)
    }
}

struct FalsifyHyponormal;

impl Command for FalsifyHyponormal {
    fn name(&self) -> &'static str {
        "falsify hyponormal"
    }
    fn summary(&self) -> &'static str {
        "minimum eigenvalue of gamma^2 A*A - AA* on leading blocks up to n"
    }
    fn float_capable(&self) -> bool {
        true
    }
    fn run(&self, ctx: &Context<'_>) -> Result<Value> {
        let cfg = ctx.config;
        let n = cfg.n.unwrap_or(64);
        let gamma = cfg.gamma.unwrap_or(1.0);
        let all = parts(ctx, n)?;
        let mut sizes: Vec<usize> = std::iter::successors(Some(1usize), |m| Some(m * 2))
            .take_while(|&m| m < n)
            .collect();
        sizes.push(n);
        let mut rows = Vec::new();
        let mut falsified_at = None;
        for m in sizes {
            let (mat, tb) = all.leading(m)?.at(gamma);
            let rep = psd_check_with(&mat, tb.spectral_error, cfg.slack_factor)?;
            if rep.verdict == PsdVerdict::Falsified && falsified_at.is_none() {
                falsified_at = Some(m);
            }
            rows.push(json!({
                "n": m,
                "lambda_min": rep.lambda_min,
                "error_bound": rep.error_bound,
                "slack": rep.slack,
                "verdict": rep.verdict,
            }));
        }
        let (_, tail) = all.at(gamma);
        Ok(json!({
            "gamma": gamma,
            "verdict": if falsified_at.is_some() { "falsified" } else { "consistent" },
            "falsified_at": falsified_at,
            "tail": to_value(&tail)?,
            "rows": rows,
        }))
    }
}

struct Gamma;

impl Command for Gamma {
    fn name(&self) -> &'static str {
        "gamma"
    }
    fn summary(&self) -> &'static str {
        "smallest gamma with gamma^2 A*A - AA* consistent on the compression"
    }
    fn float_capable(&self) -> bool {
        true
    }
    fn run(&self, ctx: &Context<'_>) -> Result<Value> {
        let est = gamma_estimate_with(&parts(ctx, ctx.config.n.unwrap_or(32))?, ctx.config.slack_factor)?;
        let mut v = to_value(&est)?;
        v["unbounded"] = Value::Bool(est.gamma.is_none());
        Ok(v)
    }
}

struct Dominance;

impl Command for Dominance {
    fn name(&self) -> &'static str {
        "dominance"
    }
    fn summary(&self) -> &'static str {
        "the dominance quantity for n = 3..N"
    }
    fn run(&self, ctx: &Context<'_>) -> Result<Value> {
        let f = ctx.resolve_family()?.into_factorable()?;
        let n = ctx.config.n.unwrap_or(10);
        if n < 3 {
            return Err(Error::IndexTooSmall { index: n, min: 3 });
        }
        let rows = (3..=n)
            .map(|m| {
                let r = dominance_quantity(&f, m)?;
                Ok(json!({
                    "n": m,
                    "value": r.value.to_string(),
                    "exceeds_one": r.exceeds_one,
                    "verdict": r.verdict(),
                }))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Value::Array(rows))
    }
}

struct ShiftedIdentity;

fn rational_of(v: &Value) -> Result<Rational> {
    match v {
        Value::String(s) => parse_rational(s),
        Value::Number(x) => parse_rational(&x.to_string()),
        other => Err(Error::Config(format!(
            "expected a number or \"p/q\" string, got {other}"
        ))),
    }
}

fn rational_list(v: &Value, what: &str) -> Result<Vec<Rational>> {
    v.as_array()
        .ok_or_else(|| Error::Config(format!("\"{what}\" must be an array")))?
        .iter()
        .map(rational_of)
        .collect()
}

/// `{"a": [[...], ...], "q": [...], "p": [...]}`.
fn load_instance(path: &std::path::Path) -> Result<(TruncatedOperator<Rational>, DiagonalOperator, DiagonalOperator)> {
    let v: Value = serde_json::from_str(&std::fs::read_to_string(path)?)?;
    let rows = v["a"]
        .as_array()
        .ok_or_else(|| Error::Config("\"a\" must be an array of rows".into()))?
        .iter()
        .map(|r| rational_list(r, "a"))
        .collect::<Result<Vec<_>>>()?;
    let a = TruncatedOperator::from_rows(rows)?;
    let n = a.n();
    let diag = |key: &str| -> Result<DiagonalOperator> {
        let d = rational_list(&v[key], key)?;
        if d.len() != n {
            return Err(Error::Dimension(format!(
                "\"{key}\" has {} entries, matrix is {n} x {n}",
                d.len()
            )));
        }
        Ok(DiagonalOperator::from_prefix(key.to_uppercase(), d, int(1)))
    };
    Ok((a, diag("q")?, diag("p")?))
}

impl Command for ShiftedIdentity {
    fn name(&self) -> &'static str {
        "shifted-identity"
    }
    fn summary(&self) -> &'static str {
        "identity for A - r with the same pair, and what two values of r force"
    }
    fn run(&self, ctx: &Context<'_>) -> Result<Value> {
        let cfg = ctx.config;
        let path = cfg
            .matrix
            .as_ref()
            .ok_or_else(|| Error::Config("shifted-identity needs --matrix FILE".into()))?;
        if cfg.r.is_empty() {
            return Err(Error::Config("shifted-identity needs at least one --r".into()));
        }
        let (a, q, p) = load_instance(path)?;
        let reports = cfg
            .r
            .iter()
            .map(|r| to_value(&verify_shifted_identity(&a, &q, &p, r)?))
            .collect::<Result<Vec<_>>>()?;
        let mut distinct: Vec<&Rational> = Vec::new();
        for r in cfg.r.iter().filter(|r| **r != int(0)) {
            if !distinct.contains(&r) {
                distinct.push(r);
            }
        }
        let collapse = match distinct.as_slice() {
            [r1, r2, ..] => Some(to_value(&pair_collapse(&a, &q, &p, r1, r2)?)?),
            _ => None,
        };
        Ok(json!({ "n": a.n(), "reports": reports, "collapse": collapse }))
    }
}
