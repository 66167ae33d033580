//! Diagonal-inequality certificates.
//!
//! Every check here is an exact comparison of rational diagonal entries.
//! A scan over indices `< n` proves a statement only up to `n`
//! ([`Verdict::CertifiedToN`]); lifting it to every index
//! ([`Verdict::Certified`]) requires bounds declared by the family, which
//! are themselves checked on the scanned range.

use std::fmt;

use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::interrupters::{prop5_pair, InterrupterPair};
use crate::matrix::DiagonalOperator;
use crate::scalar::{int, Rational};
use crate::sequences::{DeclaredBounds, RatioBehavior, SequenceFamily, WeightSequence};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Claim {
    Posinormal,
    Hyponormal,
    Coposinormal,
    Supraposinormal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Certified,
    #[serde(rename = "certified-to-N")]
    CertifiedToN,
    Falsified,
    Infeasible,
    Inconclusive,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Verdict::Certified => "certified",
            Verdict::CertifiedToN => "certified-to-N",
            Verdict::Falsified => "falsified",
            Verdict::Infeasible => "infeasible",
            Verdict::Inconclusive => "inconclusive",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Relation {
    #[serde(rename = ">=")]
    Ge,
    #[serde(rename = ">")]
    Gt,
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = "<")]
    Lt,
}

impl Relation {
    pub fn holds(self, lhs: &Rational, rhs: &Rational) -> bool {
        match self {
            Relation::Ge => lhs >= rhs,
            Relation::Gt => lhs > rhs,
            Relation::Le => lhs <= rhs,
            Relation::Lt => lhs < rhs,
        }
    }

    fn between(lhs: &Rational, rhs: &Rational) -> Self {
        if lhs >= rhs {
            Relation::Ge
        } else {
            Relation::Lt
        }
    }
}

/// One exact inequality `lhs relation rhs` at an index. Rows are always
/// recorded in the direction that holds.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Evidence {
    pub index: usize,
    pub inequality: String,
    #[serde(with = "crate::scalar::serde_rational")]
    pub lhs: Rational,
    pub relation: Relation,
    #[serde(with = "crate::scalar::serde_rational")]
    pub rhs: Rational,
}

impl Evidence {
    fn new(index: usize, inequality: impl Into<String>, lhs: Rational, relation: Relation, rhs: Rational) -> Self {
        Self {
            index,
            inequality: inequality.into(),
            lhs,
            relation,
            rhs,
        }
    }

    pub fn holds(&self) -> bool {
        self.relation.holds(&self.lhs, &self.rhs)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Certificate {
    pub claim: Claim,
    pub verdict: Verdict,
    #[serde(with = "crate::scalar::serde_rational::option")]
    pub delta1: Option<Rational>,
    #[serde(with = "crate::scalar::serde_rational::option")]
    pub delta2: Option<Rational>,
    pub evidence: Vec<Evidence>,
    pub n_checked: usize,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl Certificate {
    fn new(claim: Claim, verdict: Verdict, n_checked: usize) -> Self {
        Self {
            claim,
            verdict,
            delta1: None,
            delta2: None,
            evidence: Vec::new(),
            n_checked,
            notes: Vec::new(),
        }
    }

    pub fn is_certified(&self) -> bool {
        matches!(self.verdict, Verdict::Certified | Verdict::CertifiedToN)
    }
}

fn entries(d: &DiagonalOperator, range: std::ops::Range<usize>) -> Vec<Rational> {
    range.into_par_iter().map(|k| d.entry(k)).collect()
}

/// First index of the minimum (or maximum with `max = true`).
fn extremum(v: &[Rational], max: bool) -> Option<(usize, Rational)> {
    let mut best: Option<(usize, &Rational)> = None;
    for (i, x) in v.iter().enumerate() {
        let better = match best {
            None => true,
            Some((_, b)) => (max && x > b) || (!max && x < b),
        };
        if better {
            best = Some((i, x));
        }
    }
    best.map(|(i, x)| (i, x.clone()))
}

fn swapped_bounds(b: &DeclaredBounds) -> DeclaredBounds {
    DeclaredBounds {
        q_lower: b.p_lower.clone(),
        q_upper: b.p_upper.clone(),
        p_lower: b.q_lower.clone(),
        p_upper: b.q_upper.clone(),
    }
}

/// First index in `[0, n)` where a declared bound fails.
fn declared_bound_violation(q: &[Rational], p: &[Rational], b: &DeclaredBounds) -> Option<Evidence> {
    for (k, (qk, pk)) in q.iter().zip(p).enumerate() {
        if qk < &b.q_lower {
            return Some(Evidence::new(
                k,
                "q_k < q_lower",
                qk.clone(),
                Relation::Lt,
                b.q_lower.clone(),
            ));
        }
        if qk > &b.q_upper {
            return Some(Evidence::new(
                k,
                "q_k > q_upper",
                qk.clone(),
                Relation::Gt,
                b.q_upper.clone(),
            ));
        }
        if pk < &b.p_lower {
            return Some(Evidence::new(
                k,
                "p_k < p_lower",
                pk.clone(),
                Relation::Lt,
                b.p_lower.clone(),
            ));
        }
        if pk > &b.p_upper {
            return Some(Evidence::new(
                k,
                "p_k > p_upper",
                pk.clone(),
                Relation::Gt,
                b.p_upper.clone(),
            ));
        }
    }
    None
}

/// Certifies `delta1 Q >= I >= delta2 P >= 0` with the extremal choice
/// `delta1 = 1/min q_k`, `delta2 = 1/max p_k`.
///
/// `Coposinormal` reads the pair as `(P, Q)`. `Hyponormal` additionally
/// needs `delta1 <= delta2`; otherwise the verdict is inconclusive (the
/// extremal choice is the best diagonal witness, not a disproof). With
/// `bounds` (in the orientation of `pair`) that hold on `[0, n)`, the deltas
/// come from the bounds and the verdict is lifted to `Certified`.
pub fn corollary5_certify(
    pair: &InterrupterPair,
    claim: Claim,
    n: usize,
    bounds: Option<&DeclaredBounds>,
) -> Result<Certificate> {
    if n == 0 {
        return Err(Error::Dimension("certificate needs n >= 1".into()));
    }
    let (pair, bounds) = match claim {
        Claim::Coposinormal => (pair.swapped(), bounds.map(swapped_bounds)),
        Claim::Posinormal | Claim::Hyponormal => (pair.clone(), bounds.cloned()),
        Claim::Supraposinormal => {
            return Err(Error::Config(
                "diagonal certificates decide posinormal, coposinormal or hyponormal".into(),
            ))
        }
    };
    let q = entries(&pair.q, 0..n);
    let p = entries(&pair.p, 0..n);
    if let Some(k) = q.iter().position(|x| !x.is_positive()) {
        return Err(if q[k].is_zero() {
            Error::ZeroDiagonal { what: "q", index: k }
        } else {
            Error::NegativeDiagonal {
                index: k,
                value: q[k].to_string(),
            }
        });
    }
    if let Some(k) = p.iter().position(|x| x.is_negative()) {
        return Err(Error::NegativeDiagonal {
            index: k,
            value: p[k].to_string(),
        });
    }

    let mut cert = Certificate::new(claim, Verdict::CertifiedToN, n);
    let (kq, q_min) = extremum(&q, false).expect("n >= 1");
    let (kp, p_max) = extremum(&p, true).expect("n >= 1");
    let mut delta1 = q_min.recip();
    let mut delta2 = (!p_max.is_zero()).then(|| p_max.recip());
    cert.evidence.push(Evidence::new(
        kq,
        "delta1 * q_k >= 1",
        delta1.clone() * q[kq].clone(),
        Relation::Ge,
        int(1),
    ));
    if let Some(d2) = &delta2 {
        cert.evidence.push(Evidence::new(
            kp,
            "1 >= delta2 * p_k",
            int(1),
            Relation::Ge,
            d2.clone() * p[kp].clone(),
        ));
    }

    if let Some(b) = &bounds {
        match declared_bound_violation(&q, &p, b) {
            Some(row) => {
                cert.notes.push(format!(
                    "declared bound fails at index {}; not lifted past n",
                    row.index
                ));
                cert.evidence.push(row);
            }
            None if b.q_lower.is_positive() && !b.p_upper.is_negative() => {
                delta1 = b.q_lower.recip();
                delta2 = (!b.p_upper.is_zero()).then(|| b.p_upper.recip());
                cert.evidence.push(Evidence::new(
                    n,
                    "delta1 * q_lower >= 1",
                    delta1.clone() * b.q_lower.clone(),
                    Relation::Ge,
                    int(1),
                ));
                if let Some(d2) = &delta2 {
                    cert.evidence.push(Evidence::new(
                        n,
                        "1 >= delta2 * p_upper",
                        int(1),
                        Relation::Ge,
                        d2.clone() * b.p_upper.clone(),
                    ));
                }
                cert.verdict = Verdict::Certified;
            }
            None => cert
                .notes
                .push("declared bounds do not give a strict lower bound on q".into()),
        }
    }

    if claim == Claim::Hyponormal {
        if let Some(d2) = &delta2 {
            if &delta1 > d2 {
                cert.verdict = Verdict::Inconclusive;
                cert.evidence.push(Evidence::new(
                    0,
                    "delta1 > delta2",
                    delta1.clone(),
                    Relation::Gt,
                    d2.clone(),
                ));
                cert.notes
                    .push("extremal deltas do not satisfy delta1 <= delta2".into());
            }
        }
    }
    cert.delta1 = Some(delta1);
    cert.delta2 = delta2;
    Ok(cert)
}

/// Checks `delta1 q_k >= 1 >= delta2 p_k` for a given pair of constants on
/// `[0, n)`. A failure is reported as inconclusive with the failing row: it
/// refutes the constants, not the claim.
pub fn check_explicit_deltas(
    pair: &InterrupterPair,
    claim: Claim,
    delta1: &Rational,
    delta2: &Rational,
    n: usize,
) -> Certificate {
    let pair = if claim == Claim::Coposinormal {
        pair.swapped()
    } else {
        pair.clone()
    };
    // compare against 1/delta so that passing rows need no products
    let q_floor = delta1.is_positive().then(|| delta1.recip());
    let p_ceil = delta2.is_positive().then(|| delta2.recip());
    let rows: Vec<Option<Evidence>> = (0..n)
        .into_par_iter()
        .map(|k| {
            let qk = pair.q.entry(k);
            if q_floor.as_ref().is_none_or(|f| &qk < f) {
                let lhs = delta1.clone() * qk;
                if lhs < Rational::one() {
                    return Some(Evidence::new(k, "delta1 * q_k < 1", lhs, Relation::Lt, int(1)));
                }
            }
            let pk = pair.p.entry(k);
            if pk.is_negative() || p_ceil.as_ref().is_none_or(|c| &pk > c) {
                let rhs = delta2.clone() * pk;
                if rhs > Rational::one() {
                    return Some(Evidence::new(k, "1 < delta2 * p_k", int(1), Relation::Lt, rhs));
                }
                if rhs.is_negative() {
                    return Some(Evidence::new(k, "delta2 * p_k < 0", rhs, Relation::Lt, int(0)));
                }
            }
            None
        })
        .collect();
    let mut cert = Certificate::new(claim, Verdict::CertifiedToN, n);
    cert.delta1 = Some(delta1.clone());
    cert.delta2 = Some(delta2.clone());
    if let Some(row) = rows.into_iter().flatten().next() {
        cert.verdict = Verdict::Inconclusive;
        cert.evidence.push(row);
    } else if claim == Claim::Hyponormal && delta1 > delta2 {
        cert.verdict = Verdict::Inconclusive;
        cert.evidence.push(Evidence::new(
            0,
            "delta1 > delta2",
            delta1.clone(),
            Relation::Gt,
            delta2.clone(),
        ));
    }
    cert
}

/// Bounds valid for every index `k >= n`, used to lift a window check.
#[derive(Debug, Clone, PartialEq)]
pub struct WindowTail {
    pub q_lower: Rational,
    pub d_lower: Rational,
    pub d_upper: Rational,
    pub p_upper: Rational,
}

impl WindowTail {
    /// Family bounds on `Q`, `P` and a constant tail `d_k = t`.
    pub fn from_declared(b: &DeclaredBounds, t: Rational) -> Self {
        Self {
            q_lower: b.q_lower.clone(),
            d_lower: t.clone(),
            d_upper: t,
            p_upper: b.p_upper.clone(),
        }
    }
}

/// Checks `q_k >= d_k >= p_k >= 0` on `[0, n)`: the diagonal `D` for which
/// `sqrt(D) M sqrt(D)` stays hyponormal. The verdict is lifted to
/// `Certified` when `tail` closes the gap beyond `n` and its bounds hold on
/// the confirmation range `[n, 2n)`.
pub fn theorem5_certify(
    q: &DiagonalOperator,
    p: &DiagonalOperator,
    d: &DiagonalOperator,
    n: usize,
    tail: Option<&WindowTail>,
) -> Certificate {
    let rows: Vec<Option<Evidence>> = (0..n)
        .into_par_iter()
        .map(|k| {
            let (qk, dk, pk) = (q.entry(k), d.entry(k), p.entry(k));
            if qk < dk {
                Some(Evidence::new(k, "q_k < d_k", qk, Relation::Lt, dk))
            } else if dk < pk {
                Some(Evidence::new(k, "d_k < p_k", dk, Relation::Lt, pk))
            } else if pk.is_negative() {
                Some(Evidence::new(k, "p_k < 0", pk, Relation::Lt, int(0)))
            } else {
                None
            }
        })
        .collect();
    let mut cert = Certificate::new(Claim::Hyponormal, Verdict::CertifiedToN, n);
    if let Some(row) = rows.into_iter().flatten().next() {
        cert.verdict = Verdict::Falsified;
        cert.notes.push(format!("window fails at index {}", row.index));
        cert.evidence.push(row);
        return cert;
    }
    cert.evidence.push(Evidence::new(
        n,
        "entrywise q_k >= d_k >= p_k >= 0 for k < n",
        int(n as i64),
        Relation::Ge,
        int(n as i64),
    ));
    let Some(t) = tail else {
        return cert;
    };
    let ordered =
        t.q_lower >= t.d_upper && t.d_upper >= t.d_lower && t.d_lower >= t.p_upper && !t.p_upper.is_negative();
    let confirmed = (n..2 * n).into_par_iter().all(|k| {
        let dk = d.entry(k);
        q.entry(k) >= t.q_lower && p.entry(k) <= t.p_upper && dk >= t.d_lower && dk <= t.d_upper
    });
    if ordered && confirmed {
        cert.verdict = Verdict::Certified;
        cert.evidence.push(Evidence::new(
            n,
            "q_lower >= d_upper",
            t.q_lower.clone(),
            Relation::Ge,
            t.d_upper.clone(),
        ));
        cert.evidence.push(Evidence::new(
            n,
            "d_lower >= p_upper",
            t.d_lower.clone(),
            Relation::Ge,
            t.p_upper.clone(),
        ));
    } else {
        cert.notes.push("tail bounds do not lift the window past n".into());
    }
    cert
}

/// An endpoint of a delta interval with the constraint index that set it.
#[derive(Debug, Clone, PartialEq)]
pub struct Endpoint {
    /// `None` is `+infinity`.
    pub value: Option<Rational>,
    pub index: Option<usize>,
    /// Which quantity produced the bound, e.g. `c0*a0`, `1/q[3]`, `1/p[2]`.
    pub term: String,
}

impl Serialize for Endpoint {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("Endpoint", 3)?;
        let v = self
            .value
            .as_ref()
            .map(|v| v.to_string())
            .unwrap_or_else(|| "inf".into());
        st.serialize_field("value", &v)?;
        st.serialize_field("index", &self.index)?;
        st.serialize_field("term", &self.term)?;
        st.end()
    }
}

impl Endpoint {
    fn infinite() -> Self {
        Self {
            value: None,
            index: None,
            term: "none".into(),
        }
    }

    fn le(&self, other: &Endpoint) -> bool {
        match (&self.value, &other.value) {
            (_, None) => true,
            (None, Some(_)) => false,
            (Some(a), Some(b)) => a <= b,
        }
    }
}

/// The first constraint index at which the running lower bound exceeded the
/// running upper bound.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Conflict {
    pub lower: Endpoint,
    pub upper: Endpoint,
}

/// Running intersection of the per-index delta constraints.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeltaInterval {
    pub lower: Endpoint,
    pub upper: Endpoint,
    pub feasible: bool,
    pub k_max: usize,
    pub first_conflict: Option<Conflict>,
    /// Declared family bounds were intersected in, extending the result to
    /// every index.
    pub limits_applied: bool,
    /// `max p_k` over the scan; reported only, never required.
    #[serde(with = "crate::scalar::serde_rational")]
    pub p_sup: Rational,
}

impl DeltaInterval {
    /// The certificate this interval amounts to, with `delta1 = delta2` the
    /// lower endpoint when feasible.
    pub fn certificate(&self) -> Certificate {
        let verdict = match (self.feasible, self.limits_applied) {
            (true, true) => Verdict::Certified,
            (true, false) => Verdict::CertifiedToN,
            (false, _) => Verdict::Infeasible,
        };
        let mut cert = Certificate::new(Claim::Hyponormal, verdict, self.k_max + 1);
        if let (Some(lo), Some(hi)) = (&self.lower.value, &self.upper.value) {
            let relation = Relation::between(hi, lo);
            cert.evidence.push(Evidence::new(
                self.lower.index.unwrap_or(0),
                "upper vs lower",
                hi.clone(),
                relation,
                lo.clone(),
            ));
        }
        if self.feasible {
            cert.delta1 = self.lower.value.clone();
            cert.delta2 = self.lower.value.clone();
        }
        cert
    }
}

/// Lower and upper delta constraints for constraint index `k`:
/// `delta >= 1/q_{k+1} = c_{k+1} a_k a_{k+1} / (c_k (rho_k - rho_{k+1}))`
/// (with `delta >= c_0 a_0` at `k = 0`) and
/// `delta <= 1/p_k = a_k^2 / (rho_k - rho_{k+1})`.
fn delta_constraints(fam: &SequenceFamily, k: usize) -> (Rational, Rational) {
    let gap = fam.rho_gap(k);
    let (ak, ak1) = (fam.a(k), fam.a(k + 1));
    let lower = fam.c(k + 1) * ak.clone() * ak1 / (fam.c(k) * gap.clone());
    let upper = ak.clone() * ak / gap;
    (lower, upper)
}

/// Scans constraints `k = 0..=k_max`. Lower bounds are taken by first
/// strict maximum, upper bounds by first strict minimum; endpoints are
/// closed, so a point interval is feasible.
pub fn theorem6_delta_search(fam: &SequenceFamily, k_max: usize) -> Result<DeltaInterval> {
    if let Some(index) = fam.first_rho_violation(k_max + 1) {
        return Err(Error::RhoNotDecreasing { index });
    }
    let bounds: Vec<(Rational, Rational)> = (0..=k_max).into_par_iter().map(|k| delta_constraints(fam, k)).collect();

    let mut lower = Endpoint {
        value: Some(fam.c(0) * fam.a(0)),
        index: Some(0),
        term: "c0*a0".into(),
    };
    let mut upper = Endpoint::infinite();
    let mut first_conflict = None;
    for (k, (lo, hi)) in bounds.into_iter().enumerate() {
        if lower.value.as_ref().is_none_or(|v| &lo > v) {
            lower = Endpoint {
                value: Some(lo),
                index: Some(k),
                term: format!("1/q[{}]", k + 1),
            };
        }
        if upper.value.as_ref().is_none_or(|v| &hi < v) {
            upper = Endpoint {
                value: Some(hi),
                index: Some(k),
                term: format!("1/p[{k}]"),
            };
        }
        if first_conflict.is_none() && !lower.le(&upper) {
            first_conflict = Some(Conflict {
                lower: lower.clone(),
                upper: upper.clone(),
            });
        }
    }
    let p_sup = upper.value.as_ref().map(|u| u.recip()).unwrap_or_else(Rational::zero);
    Ok(DeltaInterval {
        feasible: lower.le(&upper),
        lower,
        upper,
        k_max,
        first_conflict,
        limits_applied: false,
        p_sup,
    })
}

/// [`theorem6_delta_search`] followed by intersection with the declared
/// limits `delta >= 1/q_lower`, `delta <= 1/p_upper`, which cover every
/// index at once. The declared bounds are checked against the ratio-built
/// pair on `[0, k_max]` first.
pub fn theorem6_with_limits(fam: &SequenceFamily, k_max: usize) -> Result<DeltaInterval> {
    let mut out = theorem6_delta_search(fam, k_max)?;
    let Some(b) = &fam.declared_bounds else {
        return Ok(out);
    };
    if !b.q_lower.is_positive() || !b.p_upper.is_positive() {
        return Ok(out);
    }
    let pair = prop5_pair(fam)?;
    let q = entries(&pair.q, 0..k_max + 1);
    let p = entries(&pair.p, 0..k_max + 1);
    if declared_bound_violation(&q, &p, b).is_some() {
        return Ok(out);
    }
    let lo = b.q_lower.recip();
    if out.lower.value.as_ref().is_none_or(|v| &lo > v) {
        out.lower = Endpoint {
            value: Some(lo),
            index: None,
            term: "1/q_lower".into(),
        };
    }
    let hi = b.p_upper.recip();
    if out.upper.value.as_ref().is_none_or(|v| &hi < v) {
        out.upper = Endpoint {
            value: Some(hi),
            index: None,
            term: "1/p_upper".into(),
        };
    }
    out.feasible = out.lower.le(&out.upper);
    out.limits_applied = true;
    Ok(out)
}

/// Checks the zero-prefix shape `w_k = 0` for `k <= n_zero`, `w_k != 0`
/// after, and the running sup of `|w_k / w_{k+1}|` over
/// `n_zero < k <= k_max`. `n_zero = -1` is the empty prefix.
///
/// A closed-form ratio bound on the weights lifts the verdict to
/// `Certified`; a closed-form unbounded ratio falsifies posinormality when
/// the shift is injective. No interrupter is built for the noninjective
/// case: the conditions themselves are the certificate.
pub fn shift_posinormal_conditions(w: &WeightSequence, n_zero: i64, k_max: usize) -> Result<Certificate> {
    if n_zero < -1 {
        return Err(Error::Config("n_zero must be >= -1".into()));
    }
    let start = (n_zero + 1) as usize;
    let mut cert = Certificate::new(Claim::Posinormal, Verdict::CertifiedToN, k_max + 1);
    if let Some(k) = (0..start).find(|&k| !w.w(k).is_zero()) {
        cert.verdict = Verdict::Inconclusive;
        cert.evidence.push(Evidence::new(
            k,
            "|w_k| > 0 inside the zero prefix",
            w.w(k).abs(),
            Relation::Gt,
            int(0),
        ));
        cert.notes.push("zero pattern does not have the prefix shape".into());
        return Ok(cert);
    }
    if k_max < start {
        return Err(Error::IndexTooSmall {
            index: k_max,
            min: start,
        });
    }
    if let Some(index) = (start..=k_max + 1).find(|&k| w.w(k).is_zero()) {
        return Err(Error::ZeroWeightAfterPrefix { index });
    }
    let ratios: Vec<Rational> = (start..=k_max)
        .into_par_iter()
        .map(|k| (w.w(k) / w.w(k + 1)).abs())
        .collect();
    let (i, sup) = extremum(&ratios, true).expect("nonempty range");
    cert.evidence.push(Evidence::new(
        start + i,
        "running sup of |w_k / w_(k+1)|",
        sup.clone(),
        Relation::Le,
        sup.clone(),
    ));
    let mid = (start + k_max) / 2;
    if start + i > mid && mid > start {
        cert.notes
            .push(format!("running sup still growing: attained at k = {}", start + i));
    }
    cert.delta1 = Some(sup.clone());
    match &w.ratio_behavior {
        RatioBehavior::Bounded(b) if &sup <= b => {
            cert.verdict = Verdict::Certified;
            cert.evidence.push(Evidence::new(
                start + i,
                "sup <= declared ratio bound",
                sup,
                Relation::Le,
                b.clone(),
            ));
        }
        RatioBehavior::Bounded(b) => {
            cert.verdict = Verdict::Inconclusive;
            cert.notes.push(format!("declared ratio bound {b} is exceeded"));
        }
        RatioBehavior::Unbounded if n_zero == -1 => {
            cert.verdict = Verdict::Falsified;
            cert.notes
                .push("ratio |w_k / w_(k+1)| is unbounded in closed form".into());
        }
        RatioBehavior::Unbounded => {
            cert.verdict = Verdict::Inconclusive;
            cert.notes.push("ratio unbounded; conditions fail".into());
        }
        RatioBehavior::Unknown => {}
    }
    Ok(cert)
}
