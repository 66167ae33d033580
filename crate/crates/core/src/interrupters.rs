//! Interrupter pairs `(Q, P)` with `AQA* = A*PA`, and exact checks of the
//! identities they satisfy.
//!
//! For a factorable `M` the product `M*PM` involves infinite column sums
//! `sum_{k >= max(i,j)} a_k^2 p_k`. A naive `n x n` truncation drops those
//! tails, so the check uses the explicit entries below `n` plus a tail rule
//! for `k >= n`. For the ratio-built pair the rule is the telescoped value
//! `sum_{k >= m} a_k^2 p_k = a_m / c_m`, which holds because
//! `a_k^2 p_k = rho_k - rho_{k+1}` and `rho_k -> 0`.

use std::fmt;
use std::sync::Arc;

use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::{build_factorable, build_shift, DiagonalOperator, Positivity, TruncatedOperator};
use crate::scalar::{int, Rational};
use crate::sequences::{EntryFn, SequenceFamily, WeightSequence};

/// Indices scanned when a construction needs a hypothesis on the whole
/// sequence (strict decrease of `rho`, nonvanishing weights).
pub const HYPOTHESIS_SCAN: usize = 256;

/// Where a pair came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PairSource {
    /// `Q = diag{k, 1, 1, ...}`, `P = diag{(k+i)/(k+i+1)}` for `C_k`.
    CesaroClosedForm,
    /// `Q = diag{|w_1|^2, ...}`, `P = diag{p_0, 0, |w_0|^2, ...}`.
    ShiftWeights,
    /// Ratio formulas for factorable matrices with `a_k/c_k` decreasing to 0.
    FactorableRatio,
    User,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum DenseRangeSide {
    Q,
    P,
    Both,
}

#[derive(Clone)]
pub struct InterrupterPair {
    pub q: DiagonalOperator,
    pub p: DiagonalOperator,
    pub source: PairSource,
    pub dense_range_side: DenseRangeSide,
    /// `m -> sum_{k >= m} a_k^2 p_k` for the family the pair belongs to.
    pub weighted_p_tail: Option<EntryFn>,
}

impl fmt::Debug for InterrupterPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("InterrupterPair")
            .field("q", &self.q)
            .field("p", &self.p)
            .field("source", &self.source)
            .finish()
    }
}

impl InterrupterPair {
    pub fn user(q: DiagonalOperator, p: DiagonalOperator) -> Self {
        let dense_range_side = match (q.positivity, p.positivity) {
            (Positivity::Strict, Positivity::Strict) => DenseRangeSide::Both,
            (Positivity::Strict, _) => DenseRangeSide::Q,
            _ => DenseRangeSide::P,
        };
        Self {
            q,
            p,
            source: PairSource::User,
            dense_range_side,
            weighted_p_tail: None,
        }
    }

    pub fn with_weighted_p_tail(mut self, tail: EntryFn) -> Self {
        self.weighted_p_tail = Some(tail);
        self
    }

    /// `(P, Q)`: the pair read for the adjoint.
    pub fn swapped(&self) -> Self {
        Self {
            q: self.p.clone(),
            p: self.q.clone(),
            source: self.source,
            dense_range_side: match self.dense_range_side {
                DenseRangeSide::Q => DenseRangeSide::P,
                DenseRangeSide::P => DenseRangeSide::Q,
                DenseRangeSide::Both => DenseRangeSide::Both,
            },
            weighted_p_tail: None,
        }
    }

    /// Copy with `q_i` replaced; keeps the tail rule (which only reads `P`).
    pub fn with_q_entry(&self, i: usize, v: Rational) -> Self {
        let mut out = self.clone();
        out.q = self.q.with_override(i, v);
        out.source = PairSource::User;
        out
    }

    /// Copy with `p_i` replaced. The tail rule is kept, so `i` must lie inside
    /// the window later checked.
    pub fn with_p_entry(&self, i: usize, v: Rational) -> Self {
        let mut out = self.clone();
        out.p = self.p.with_override(i, v);
        out.source = PairSource::User;
        out
    }
}

/// `Q = diag{k, 1, 1, ...}`, `P = diag{(k+i)/(k+i+1)}` for `C_k`, with the
/// telescoped tail `sum_{i >= m} p_i/(k+i)^2 = 1/(k+m)`.
pub fn cesaro_pair(k: &Rational) -> InterrupterPair {
    let kq = k.clone();
    let kp = k.clone();
    let kt = k.clone();
    InterrupterPair {
        q: DiagonalOperator::new(
            "Q",
            Arc::new(move |i| if i == 0 { kq.clone() } else { Rational::one() }),
            Positivity::Strict,
        ),
        p: DiagonalOperator::new(
            "P",
            Arc::new(move |i| {
                let x = kp.clone() + int(i as i64);
                x.clone() / (x + int(1))
            }),
            Positivity::Strict,
        ),
        source: PairSource::CesaroClosedForm,
        dense_range_side: DenseRangeSide::Both,
        weighted_p_tail: Some(Arc::new(move |m| (kt.clone() + int(m as i64)).recip())),
    }
}

/// Ratio-built pair of a factorable family:
///
/// `p_k = (c_{k+1} a_k - c_k a_{k+1}) / (c_k c_{k+1} a_k^2)`,
/// `q_0 = 1/(c_0 a_0)`,
/// `q_{k+1} = (c_{k+1} a_k - c_k a_{k+1}) / (c_{k+1}^2 a_k a_{k+1})`.
///
/// Requires `rho_limit_zero`; strict decrease is checked on
/// [`HYPOTHESIS_SCAN`] indices.
pub fn prop5_pair(fam: &SequenceFamily) -> Result<InterrupterPair> {
    if !fam.rho_limit_zero {
        return Err(Error::TailUnavailable(format!(
            "family {} does not assert a_k/c_k decreasing to 0",
            fam.name
        )));
    }
    fam.validate(HYPOTHESIS_SCAN)?;
    let (q, p): (EntryFn, EntryFn) = match fam.pair_closed_form() {
        Some((q, p)) => (q.clone(), p.clone()),
        None => {
            let fp = fam.clone();
            let fq = fam.clone();
            (Arc::new(move |i| ratio_q(&fq, i)), Arc::new(move |k| ratio_p(&fp, k)))
        }
    };
    let ft = fam.clone();
    Ok(InterrupterPair {
        q: DiagonalOperator::new("Q", q, Positivity::Strict),
        p: DiagonalOperator::new("P", p, Positivity::Strict),
        source: PairSource::FactorableRatio,
        dense_range_side: DenseRangeSide::Both,
        weighted_p_tail: Some(Arc::new(move |m| ft.rho(m))),
    })
}

fn cross_gap(fam: &SequenceFamily, k: usize) -> (Rational, Rational, Rational, Rational, Rational) {
    let (ak, ak1, ck, ck1) = (fam.a(k), fam.a(k + 1), fam.c(k), fam.c(k + 1));
    let gap = ck1.clone() * ak.clone() - ck.clone() * ak1.clone();
    (gap, ak, ak1, ck, ck1)
}

fn ratio_p(fam: &SequenceFamily, k: usize) -> Rational {
    let (gap, ak, _, ck, ck1) = cross_gap(fam, k);
    gap / (ck * ck1 * ak.clone() * ak)
}

fn ratio_q(fam: &SequenceFamily, i: usize) -> Rational {
    if i == 0 {
        return (fam.c(0) * fam.a(0)).recip();
    }
    let (gap, ak, ak1, _, ck1) = cross_gap(fam, i - 1);
    gap / (ck1.clone() * ck1 * ak * ak1)
}

/// `Q = diag{|w_1|^2, |w_2|^2, ...}`, `P = diag{p_0, 0, |w_0|^2, |w_1|^2, ...}`.
/// Nonvanishing weights are checked on [`HYPOTHESIS_SCAN`] indices.
pub fn prop3_pair(w: &WeightSequence, p0: &Rational) -> Result<InterrupterPair> {
    if *p0 <= Rational::zero() {
        return Err(Error::NonPositiveEntry {
            what: "p0",
            index: 0,
            value: p0.to_string(),
        });
    }
    if let Some(index) = w.first_zero(HYPOTHESIS_SCAN) {
        return Err(Error::NonPositiveEntry {
            what: "|w|",
            index,
            value: "0".into(),
        });
    }
    let wq = w.w_fn();
    let wp = w.w_fn();
    let p0 = p0.clone();
    Ok(InterrupterPair {
        q: DiagonalOperator::new(
            "Q",
            Arc::new(move |n| {
                let x = wq(n + 1);
                x.clone() * x
            }),
            Positivity::Strict,
        ),
        p: DiagonalOperator::new(
            "P",
            Arc::new(move |n| match n {
                0 => p0.clone(),
                1 => Rational::zero(),
                _ => {
                    let x = wp(n - 2);
                    x.clone() * x
                }
            }),
            Positivity::Semidefinite,
        ),
        source: PairSource::ShiftWeights,
        dense_range_side: DenseRangeSide::Q,
        weighted_p_tail: None,
    })
}

/// The symmetric matrix `G(i, j) = c_{min(i,j)} a_{max(i,j)}` that both
/// `MQM*` and `M*PM` equal for the ratio-built pair.
pub fn gram_matrix(fam: &SequenceFamily, n: usize) -> TruncatedOperator<Rational> {
    let a: Vec<_> = (0..n).map(|i| fam.a(i)).collect();
    let c: Vec<_> = (0..n).map(|j| fam.c(j)).collect();
    TruncatedOperator::from_fn(n, |i, j| c[i.min(j)].clone() * a[i.max(j)].clone())
        .with_provenance(format!("G[{}]_{n}", fam.name))
}

/// Values at the first failing entry.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Mismatch {
    pub lhs_value: String,
    pub rhs_value: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expected: Option<String>,
}

/// Outcome of an exact identity check. `lhs`/`rhs` name the two sides;
/// `first_failure` is the lexicographically smallest failing entry.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentityReport {
    pub pass: bool,
    pub first_failure: Option<(usize, usize)>,
    pub lhs: String,
    pub rhs: String,
    pub n: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mismatch: Option<Mismatch>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

impl IdentityReport {
    fn compare(
        lhs_name: &str,
        rhs_name: &str,
        lhs: &TruncatedOperator<Rational>,
        rhs: &TruncatedOperator<Rational>,
    ) -> Self {
        let first_failure = lhs.first_difference(rhs, 0.0);
        Self {
            pass: first_failure.is_none(),
            first_failure,
            lhs: lhs_name.into(),
            rhs: rhs_name.into(),
            n: lhs.n(),
            mismatch: first_failure.map(|(i, j)| Mismatch {
                lhs_value: lhs.get(i, j).to_string(),
                rhs_value: rhs.get(i, j).to_string(),
                expected: None,
            }),
            warnings: Vec::new(),
        }
    }
}

/// Both sides of the factorable identity on the leading `n x n` window:
/// `(MQM*)(i,j) = a_i a_j sum_{k <= min} c_k^2 q_k` and
/// `(M*PM)(i,j) = c_i c_j (sum_{max <= k < n} a_k^2 p_k + tail(n))`.
pub fn factorization_sides(
    fam: &SequenceFamily,
    pair: &InterrupterPair,
    n: usize,
) -> Result<(TruncatedOperator<Rational>, TruncatedOperator<Rational>)> {
    let tail = pair
        .weighted_p_tail
        .as_ref()
        .ok_or_else(|| Error::TailUnavailable("pair has no tail rule for sum_{k >= n} a_k^2 p_k".into()))?;
    if n == 0 {
        return Err(Error::Dimension("identity check needs n >= 1".into()));
    }
    let a: Vec<_> = (0..n).map(|i| fam.a(i)).collect();
    let c: Vec<_> = (0..n).map(|j| fam.c(j)).collect();

    let mut q_prefix = Vec::with_capacity(n);
    let mut acc = Rational::zero();
    for k in 0..n {
        acc += c[k].clone() * c[k].clone() * pair.q.entry(k);
        q_prefix.push(acc.clone());
    }
    let mut p_suffix = vec![Rational::zero(); n];
    let mut acc = tail(n);
    for k in (0..n).rev() {
        acc += a[k].clone() * a[k].clone() * pair.p.entry(k);
        p_suffix[k] = acc.clone();
    }
    let mqm = TruncatedOperator::from_fn(n, |i, j| a[i].clone() * a[j].clone() * q_prefix[i.min(j)].clone())
        .with_provenance("MQM*");
    let mpm = TruncatedOperator::from_fn(n, |i, j| c[i].clone() * c[j].clone() * p_suffix[i.max(j)].clone())
        .with_provenance("M*PM");
    Ok((mqm, mpm))
}

/// Checks `MQM* = G = M*PM` exactly on the `n x n` window, `G` the Gram
/// matrix. Also reports the running sup of both diagonals and warns when it
/// is still growing over the second half of the window.
pub fn verify_factorization_identity(fam: &SequenceFamily, pair: &InterrupterPair, n: usize) -> Result<IdentityReport> {
    let (mqm, mpm) = factorization_sides(fam, pair, n)?;
    let gram = gram_matrix(fam, n);
    let f1 = mqm.first_difference(&gram, 0.0);
    let f2 = mpm.first_difference(&gram, 0.0);
    let first_failure = match (f1, f2) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, y) => x.or(y),
    };
    let mut warnings = Vec::new();
    for (name, d) in [("Q", &pair.q), ("P", &pair.p)] {
        if n >= 4 {
            let half = d.sup_upto(n / 2);
            let full = d.sup_upto(n);
            if full > half {
                warnings.push(format!(
                    "sup of {name} still growing on [{}, {n}): {} -> {}",
                    n / 2,
                    half.map(|x| x.to_string()).unwrap_or_default(),
                    full.map(|x| x.to_string()).unwrap_or_default()
                ));
            }
        }
    }
    Ok(IdentityReport {
        pass: first_failure.is_none(),
        first_failure,
        lhs: "MQM*".into(),
        rhs: "M*PM".into(),
        n,
        mismatch: first_failure.map(|(i, j)| Mismatch {
            lhs_value: mqm.get(i, j).to_string(),
            rhs_value: mpm.get(i, j).to_string(),
            expected: Some(gram.get(i, j).to_string()),
        }),
        warnings,
    })
}

/// Checks `WQW* = W*PW` on the leading `(n-1) x (n-1)` block of the `n x n`
/// truncation; the last row and column see the boundary of the window.
pub fn verify_shift_identity(w: &WeightSequence, pair: &InterrupterPair, n: usize) -> Result<IdentityReport> {
    let wm = build_shift(w, n)?;
    let wa = wm.adjoint();
    let q = pair.q.to_matrix(n);
    let p = pair.p.to_matrix(n);
    let lhs = wm.multiply(&q)?.multiply(&wa)?.compression(n - 1)?;
    let rhs = wa.multiply(&p)?.multiply(&wm)?.compression(n - 1)?;
    Ok(IdentityReport::compare("WQW*", "W*PW", &lhs, &rhs))
}

/// Checks `AQA* = A*PA` for a finite matrix.
pub fn verify_pair_identity(
    a: &TruncatedOperator<Rational>,
    q: &DiagonalOperator,
    p: &DiagonalOperator,
) -> Result<IdentityReport> {
    let n = a.n();
    let aa = a.adjoint();
    let lhs = a.multiply(&q.to_matrix(n))?.multiply(&aa)?;
    let rhs = aa.multiply(&p.to_matrix(n))?.multiply(a)?;
    Ok(IdentityReport::compare("AQA*", "A*PA", &lhs, &rhs))
}

/// A finite section of a factorable family together with a pair satisfying
/// `M_n Q M_n* = M_n* P M_n` exactly: the last `p` entry absorbs the tail,
/// `p_{n-1} = rho_{n-1} / a_{n-1}^2`.
pub fn finite_section_instance(
    fam: &SequenceFamily,
    n: usize,
) -> Result<(TruncatedOperator<Rational>, DiagonalOperator, DiagonalOperator)> {
    let pair = prop5_pair(fam)?;
    let m = build_factorable(fam, n)?;
    let q = DiagonalOperator::from_prefix("Q_n", pair.q.entries(n), Rational::one());
    let mut p = pair.p.entries(n);
    let last = fam.a(n - 1);
    p[n - 1] = fam.rho(n - 1) / (last.clone() * last);
    Ok((m, q, DiagonalOperator::from_prefix("P_n", p, Rational::one())))
}

/// `sum_{k <= m} c_k^2 q_k`; equals `c_m / a_m` for the ratio-built pair.
pub fn weighted_q_prefix(fam: &SequenceFamily, pair: &InterrupterPair, m: usize) -> Rational {
    (0..=m).map(|k| fam.c(k) * fam.c(k) * pair.q.entry(k)).sum()
}

/// `sum_{k = m}^{upto} a_k^2 p_k`; equals `rho_m - rho_{upto+1}` for the
/// ratio-built pair.
pub fn weighted_p_partial(fam: &SequenceFamily, pair: &InterrupterPair, m: usize, upto: usize) -> Rational {
    (m..=upto).map(|k| fam.a(k) * fam.a(k) * pair.p.entry(k)).sum()
}

/// Finite check of the shifted identity for `A - r`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShiftedIdentityReport {
    #[serde(with = "crate::scalar::serde_rational")]
    pub r: Rational,
    pub n: usize,
    /// `AQA* = A*PA`
    pub base_holds: bool,
    /// `(A-r)Q(A-r)* = (A-r)*P(A-r)`
    pub shifted_holds: bool,
    /// `PA + A*P + rQ = QA* + AQ + rP`
    pub reduced_holds: bool,
    /// The expansion `S(r) = B - r[(AQ + QA*) - (A*P + PA)] + r^2 (Q - P)`
    /// held entrywise.
    pub expansion_holds: bool,
    /// With the base identity and `r != 0`: shifted holds iff reduced holds.
    pub equivalence_holds: bool,
    pub shifted: IdentityReport,
}

struct ShiftedParts {
    base: TruncatedOperator<Rational>,
    shifted: (TruncatedOperator<Rational>, TruncatedOperator<Rational>),
    cross: TruncatedOperator<Rational>,
    q_minus_p: TruncatedOperator<Rational>,
    reduced_residual: TruncatedOperator<Rational>,
}

fn shifted_parts(
    a: &TruncatedOperator<Rational>,
    q: &TruncatedOperator<Rational>,
    p: &TruncatedOperator<Rational>,
    r: &Rational,
) -> Result<ShiftedParts> {
    let aa = a.adjoint();
    let base = a.multiply(q)?.multiply(&aa)?.sub(&aa.multiply(p)?.multiply(a)?)?;
    let ar = a.shift_by(r);
    let ara = ar.adjoint();
    let shifted = (ar.multiply(q)?.multiply(&ara)?, ara.multiply(p)?.multiply(&ar)?);
    let cross = a
        .multiply(q)?
        .add(&q.multiply(&aa)?)?
        .sub(&aa.multiply(p)?.add(&p.multiply(a)?)?)?;
    let q_minus_p = q.sub(p)?;
    // PA + A*P + rQ - (QA* + AQ + rP) = -cross + r (Q - P)
    let reduced_residual = p
        .multiply(a)?
        .add(&aa.multiply(p)?)?
        .add(&q.scale(r))?
        .sub(&q.multiply(&aa)?.add(&a.multiply(q)?)?.add(&p.scale(r))?)?;
    Ok(ShiftedParts {
        base,
        shifted,
        cross,
        q_minus_p,
        reduced_residual,
    })
}

/// Checks the identity for `A - r` with the same pair, the algebraic
/// expansion that relates it to the unshifted one, and the equivalence with
/// the reduced linear identity when the unshifted identity holds.
pub fn verify_shifted_identity(
    a: &TruncatedOperator<Rational>,
    q: &DiagonalOperator,
    p: &DiagonalOperator,
    r: &Rational,
) -> Result<ShiftedIdentityReport> {
    let n = a.n();
    let (qm, pm) = (q.to_matrix(n), p.to_matrix(n));
    let parts = shifted_parts(a, &qm, &pm, r)?;
    let s = parts.shifted.0.sub(&parts.shifted.1)?;
    let expansion = parts
        .base
        .sub(&parts.cross.scale(r))?
        .add(&parts.q_minus_p.scale(&(r.clone() * r.clone())))?;
    let zero = TruncatedOperator::<Rational>::zeros(n);
    let base_holds = parts.base == zero;
    let shifted_holds = s == zero;
    let reduced_holds = parts.reduced_residual == zero;
    let equivalence_holds = !base_holds || r.is_zero() || shifted_holds == reduced_holds;
    Ok(ShiftedIdentityReport {
        r: r.clone(),
        n,
        base_holds,
        shifted_holds,
        reduced_holds,
        expansion_holds: s == expansion,
        equivalence_holds,
        shifted: IdentityReport::compare("(A-r)Q(A-r)*", "(A-r)*P(A-r)", &parts.shifted.0, &parts.shifted.1),
    })
}

/// What two shifted checks at `r1 != r2` (both nonzero) say about the pair.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "outcome", rename_all = "kebab-case")]
pub enum PairCollapse {
    /// Identity held at 0, `r1` and `r2`, and indeed `Q = P`.
    QEqualsP,
    /// Identity failed at one of the three points; nothing follows.
    NotAllPass { failing: Vec<String> },
    /// Passing at `r1` and `r2` forces `(r1 - r2)(Q - P) = 0`, yet `q_i != p_i`.
    Contradiction { index: usize },
}

/// Replays the collapse argument: subtracting the reduced identities at
/// `r1` and `r2` leaves `(r1 - r2)(Q - P) = 0`.
pub fn pair_collapse(
    a: &TruncatedOperator<Rational>,
    q: &DiagonalOperator,
    p: &DiagonalOperator,
    r1: &Rational,
    r2: &Rational,
) -> Result<PairCollapse> {
    if r1 == r2 || r1.is_zero() || r2.is_zero() {
        return Err(Error::Config("need distinct nonzero r1, r2".into()));
    }
    let n = a.n();
    let rep1 = verify_shifted_identity(a, q, p, r1)?;
    let rep2 = verify_shifted_identity(a, q, p, r2)?;
    let mut failing = Vec::new();
    if !rep1.base_holds {
        failing.push("0".to_string());
    }
    for rep in [&rep1, &rep2] {
        if !rep.shifted_holds {
            failing.push(rep.r.to_string());
        }
    }
    if !failing.is_empty() {
        return Ok(PairCollapse::NotAllPass { failing });
    }
    Ok(collapse_from_assumed_pass(q, p, n))
}

/// Conclusion drawn from two reduced identities assumed to hold at distinct
/// `r`: `Q = P` on the window, or the first index contradicting it.
pub fn collapse_from_assumed_pass(q: &DiagonalOperator, p: &DiagonalOperator, n: usize) -> PairCollapse {
    match (0..n).find(|&i| q.entry(i) != p.entry(i)) {
        None => PairCollapse::QEqualsP,
        Some(index) => PairCollapse::Contradiction { index },
    }
}

/// `R(r1) - R(r2)` for the reduced residuals; equals `(r1 - r2)(Q - P)`.
pub fn reduced_residual_difference(
    a: &TruncatedOperator<Rational>,
    q: &DiagonalOperator,
    p: &DiagonalOperator,
    r1: &Rational,
    r2: &Rational,
) -> Result<TruncatedOperator<Rational>> {
    let n = a.n();
    let (qm, pm) = (q.to_matrix(n), p.to_matrix(n));
    let x = shifted_parts(a, &qm, &pm, r1)?.reduced_residual;
    let y = shifted_parts(a, &qm, &pm, r2)?.reduced_residual;
    x.sub(&y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::ratio;
    use crate::sequences::{make_family, make_shift, Params};

    fn fam(name: &str, kv: Option<(&str, Rational)>) -> SequenceFamily {
        let params: Params = kv.map(|(k, v)| [(k.to_string(), v)].into()).unwrap_or_default();
        make_family(name, &params).unwrap()
    }

    #[test]
    fn ratio_pair_matches_cesaro_closed_form() {
        for k in [ratio(1, 2), int(1), int(2), ratio(7, 3)] {
            let f = fam("cesaro", Some(("k", k.clone())));
            let pair = prop5_pair(&f).unwrap();
            let closed = cesaro_pair(&k);
            for i in 0..64 {
                assert_eq!(pair.q.entry(i), closed.q.entry(i), "q_{i} k={k}");
                assert_eq!(pair.p.entry(i), closed.p.entry(i), "p_{i} k={k}");
            }
        }
    }

    #[test]
    fn fibonacci_q_values() {
        let pair = prop5_pair(&fam("fibonacci", None)).unwrap();
        assert_eq!(pair.q.entry(0), int(1));
        assert_eq!(pair.q.entry(1), int(1));
        assert_eq!(pair.q.entry(2), ratio(11, 8));
    }

    #[test]
    fn q_cesaro_q_values() {
        let pair = prop5_pair(&fam("q-cesaro", Some(("q", int(2))))).unwrap();
        let got: Vec<_> = (0..3).map(|i| pair.q.entry(i)).collect();
        assert_eq!(got, vec![int(1), ratio(5, 4), ratio(11, 8)]);
    }

    #[test]
    fn ratio_pair_requires_flag_and_monotone_rho() {
        let mut f = fam("cesaro", Some(("k", int(1))));
        f.rho_limit_zero = false;
        assert!(prop5_pair(&f).is_err());
        let rising = SequenceFamily::terraced("rising", Arc::new(|i| int(i as i64 + 1))).with_rho_limit_zero(true);
        assert!(matches!(prop5_pair(&rising), Err(Error::RhoNotDecreasing { index: 0 })));
    }

    #[test]
    fn shift_pairs() {
        let one = make_shift("shift-unweighted", &Params::new()).unwrap();
        let pair = prop3_pair(&one, &int(1)).unwrap();
        assert!((0..10).all(|i| pair.q.entry(i) == int(1)));
        let p: Vec<_> = (0..4).map(|i| pair.p.entry(i)).collect();
        assert_eq!(p, vec![int(1), int(0), int(1), int(1)]);

        let harmonic = make_shift("shift-harmonic-odd", &Params::new()).unwrap();
        let pair = prop3_pair(&harmonic, &int(1)).unwrap();
        let q: Vec<_> = (0..3).map(|i| pair.q.entry(i)).collect();
        assert_eq!(q, vec![int(1), int(1), ratio(1, 4)]);

        let w0_two = WeightSequence::new("w", Arc::new(|n| if n == 0 { int(2) } else { int(1) }));
        let pair = prop3_pair(&w0_two, &int(3)).unwrap();
        let p: Vec<_> = (0..3).map(|i| pair.p.entry(i)).collect();
        assert_eq!(p, vec![int(3), int(0), int(4)]);

        let alternating = make_shift("shift-alternating-zero", &Params::new()).unwrap();
        assert!(prop3_pair(&alternating, &int(1)).is_err());
        assert!(prop3_pair(&one, &int(0)).is_err());
    }

    #[test]
    fn gram_entries() {
        let g = gram_matrix(&fam("cesaro", Some(("k", int(1)))), 2);
        assert_eq!(g.row(0), &[int(1), ratio(1, 2)]);
        assert_eq!(g.row(1), &[ratio(1, 2), ratio(1, 2)]);
        let t = fam("toeplitz", Some(("r", ratio(1, 2))));
        assert_eq!(*gram_matrix(&t, 3).get(0, 2), ratio(1, 4));
        let one = gram_matrix(&t, 1);
        assert_eq!(*one.get(0, 0), t.c(0) * t.a(0));
    }

    #[test]
    fn cesaro_identity_passes_and_corruption_fails() {
        let f = fam("cesaro", Some(("k", int(1))));
        let pair = prop5_pair(&f).unwrap();
        let rep = verify_factorization_identity(&f, &pair, 32).unwrap();
        assert!(rep.pass, "{rep:?}");
        let bad = pair.with_p_entry(0, pair.p.entry(0) + int(1));
        let rep = verify_factorization_identity(&f, &bad, 4).unwrap();
        assert!(!rep.pass);
        assert_eq!(rep.first_failure, Some((0, 0)));
        // closed-form pair with its own tail rule agrees
        let rep = verify_factorization_identity(&f, &cesaro_pair(&int(1)), 16).unwrap();
        assert!(rep.pass);
    }

    #[test]
    fn user_pair_without_tail_is_rejected() {
        let f = fam("cesaro", Some(("k", int(1))));
        let pair = InterrupterPair::user(DiagonalOperator::identity(), DiagonalOperator::identity());
        assert!(matches!(
            verify_factorization_identity(&f, &pair, 4),
            Err(Error::TailUnavailable(_))
        ));
    }

    #[test]
    fn telescoping_partial_sums() {
        for (name, kv) in [
            ("cesaro", Some(("k", ratio(1, 2)))),
            ("fibonacci", None),
            ("toeplitz", Some(("r", ratio(3, 4)))),
            ("q-cesaro", Some(("q", ratio(1, 3)))),
        ] {
            let f = fam(name, kv);
            let pair = prop5_pair(&f).unwrap();
            for upto in [0usize, 5, 20] {
                for m in 0..=upto {
                    assert_eq!(weighted_p_partial(&f, &pair, m, upto), f.rho(m) - f.rho(upto + 1));
                }
            }
        }
    }

    #[test]
    fn shift_identity_on_catalog_shifts() {
        let zero_head = make_shift("shift-zero-head", &Params::new()).unwrap();
        let pair = InterrupterPair::user(
            DiagonalOperator::identity(),
            DiagonalOperator::from_prefix("P", vec![int(1), int(0), int(0)], int(1)),
        );
        let rep = verify_shift_identity(&zero_head, &pair, 8).unwrap();
        assert!(rep.pass, "{rep:?}");
        let one = make_shift("shift-unweighted", &Params::new()).unwrap();
        assert!(
            verify_shift_identity(&one, &prop3_pair(&one, &int(1)).unwrap(), 8)
                .unwrap()
                .pass
        );
    }

    #[test]
    fn closed_form_pair_matches_ratio_formulas() {
        let f = fam("fibonacci", None);
        let pair = prop5_pair(&f).unwrap();
        for k in 0..128 {
            assert_eq!(pair.q.entry(k), ratio_q(&f, k), "q_{k}");
            assert_eq!(pair.p.entry(k), ratio_p(&f, k), "p_{k}");
        }
    }

    #[test]
    fn finite_section_instance_is_exact() {
        let f = fam("fibonacci", None);
        let (m, q, p) = finite_section_instance(&f, 6).unwrap();
        assert!(verify_pair_identity(&m, &q, &p).unwrap().pass);
    }

    #[test]
    fn normal_matrix_shifted_identity() {
        let a = TruncatedOperator::from_rows(vec![vec![int(1), int(2)], vec![int(2), int(-1)]]).unwrap();
        let id = DiagonalOperator::identity();
        for r in [ratio(1, 2), int(3), int(-2)] {
            let rep = verify_shifted_identity(&a, &id, &id, &r).unwrap();
            assert!(rep.base_holds && rep.shifted_holds && rep.reduced_holds);
            assert!(rep.expansion_holds && rep.equivalence_holds);
        }
        assert_eq!(
            pair_collapse(&a, &id, &id, &int(1), &int(2)).unwrap(),
            PairCollapse::QEqualsP
        );
    }

    #[test]
    fn collapse_detects_contradiction() {
        let f = fam("cesaro", Some(("k", int(2))));
        let (m, q, p) = finite_section_instance(&f, 4).unwrap();
        let out = pair_collapse(&m, &q, &p, &int(1), &int(-1)).unwrap();
        assert!(matches!(out, PairCollapse::NotAllPass { .. }));
        assert_eq!(
            collapse_from_assumed_pass(&q, &p, 4),
            PairCollapse::Contradiction { index: 0 }
        );
        let diff = reduced_residual_difference(&m, &q, &p, &int(1), &int(-1)).unwrap();
        let want = q.to_matrix(4).sub(&p.to_matrix(4)).unwrap().scale(&int(2));
        assert_eq!(diff, want);
        assert!(pair_collapse(&m, &q, &p, &int(1), &int(1)).is_err());
    }
}
