//! Classification of unilateral weighted shifts `W e_n = w_n e_{n+1}` at a
//! finite truncation.
//!
//! For a shift both kernels are spanned by basis vectors:
//! `Ker W = span{e_m : w_m = 0}` and
//! `Ker W* = span{e_0} + span{e_m : w_{m-1} = 0}`, so kernel inclusions are
//! decided exactly on the weights.

use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::certificates::{shift_posinormal_conditions, Verdict};
use crate::error::Result;
use crate::matrix::{rank_of_rows, TruncatedOperator};
use crate::scalar::Rational;
use crate::sequences::{RatioBehavior, WeightSequence};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Supraposinormal {
    Yes,
    No,
    YesViaConditions,
    Unknown,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ShiftVerdict {
    /// A closed-form ratio bound covers every index.
    Certified,
    #[serde(rename = "certified-to-N")]
    CertifiedToN,
    Falsified,
    Unknown,
}

/// A basis vector in one kernel and not the other.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct KernelEvidence {
    pub basis: usize,
    pub in_ker_w: bool,
    pub in_ker_w_adjoint: bool,
    pub shows: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShiftClassification {
    pub n: usize,
    pub injective: bool,
    pub supraposinormal: Supraposinormal,
    pub posinormal: ShiftVerdict,
    pub coposinormal_falsified: bool,
    pub kernel_evidence: Vec<KernelEvidence>,
    #[serde(with = "crate::scalar::serde_rational::option")]
    pub ratio_sup: Option<Rational>,
    /// The running sup was attained in the second half of the window.
    pub ratio_growing: bool,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl ShiftClassification {
    pub fn verdicts(&self) -> (bool, Supraposinormal, ShiftVerdict, bool) {
        (
            self.injective,
            self.supraposinormal,
            self.posinormal,
            self.coposinormal_falsified,
        )
    }
}

/// `e_m` with `w_m = 0`, `w_{m-1} != 0`: in `Ker W`, not in `Ker W*`.
fn ker_w_escape(w: &[Rational]) -> Option<usize> {
    (1..w.len()).find(|&m| w[m].is_zero() && !w[m - 1].is_zero())
}

/// `e_j` with `W* e_j = 0` and `w_j != 0`: in `Ker W*`, not in `Ker W`.
fn ker_adjoint_escape(w: &[Rational]) -> Option<usize> {
    (0..w.len()).find(|&j| (j == 0 || w[j - 1].is_zero()) && !w[j].is_zero())
}

/// Classifies the shift from `w_0..w_{n-1}`.
pub fn classify_shift(w: &WeightSequence, n: usize) -> Result<ShiftClassification> {
    let weights: Vec<Rational> = (0..n.max(2)).map(|k| w.w(k)).collect();
    let n = weights.len();
    let first_zero = weights.iter().position(Zero::is_zero);
    let mut out = ShiftClassification {
        n,
        injective: first_zero.is_none(),
        supraposinormal: Supraposinormal::Unknown,
        posinormal: ShiftVerdict::Unknown,
        coposinormal_falsified: false,
        kernel_evidence: Vec::new(),
        ratio_sup: None,
        ratio_growing: false,
        notes: Vec::new(),
    };

    let escape_w = ker_w_escape(&weights);
    let escape_adj = ker_adjoint_escape(&weights);
    if let Some(m) = escape_w {
        out.kernel_evidence.push(KernelEvidence {
            basis: m,
            in_ker_w: true,
            in_ker_w_adjoint: false,
            shows: "Ker W not in Ker W*".into(),
        });
    }
    if let Some(j) = escape_adj {
        out.kernel_evidence.push(KernelEvidence {
            basis: j,
            in_ker_w: false,
            in_ker_w_adjoint: true,
            shows: "Ker W* not in Ker W".into(),
        });
        out.coposinormal_falsified = true;
    }

    if out.injective {
        out.supraposinormal = Supraposinormal::Yes;
        let ratios: Vec<Rational> = (0..n - 1)
            .map(|k| (weights[k].clone() / weights[k + 1].clone()).abs())
            .collect();
        let (arg, sup) = ratios
            .iter()
            .enumerate()
            .fold((0, &ratios[0]), |best, (i, r)| if r > best.1 { (i, r) } else { best });
        out.ratio_growing = arg >= ratios.len() / 2 && ratios.len() > 1;
        out.posinormal = match &w.ratio_behavior {
            RatioBehavior::Bounded(b) if sup <= b => ShiftVerdict::Certified,
            RatioBehavior::Unbounded => ShiftVerdict::Falsified,
            _ => ShiftVerdict::CertifiedToN,
        };
        if out.posinormal == ShiftVerdict::Falsified {
            out.notes.push("ratio |w_k / w_(k+1)| unbounded in closed form".into());
        } else if out.ratio_growing {
            out.notes.push(format!("running ratio sup still growing at k = {arg}"));
        }
        out.ratio_sup = Some(sup.clone());
        return Ok(out);
    }

    if escape_w.is_some() && escape_adj.is_some() {
        out.supraposinormal = Supraposinormal::No;
        out.posinormal = ShiftVerdict::Falsified;
        out.notes.push("neither kernel inclusion holds".into());
        return Ok(out);
    }

    // Zeros form a prefix w_0 = ... = w_{n_zero} = 0 inside the window.
    let n_zero = weights.iter().take_while(|x| x.is_zero()).count() as i64 - 1;
    if escape_w.is_none() && (n_zero as usize) + 2 < n {
        let cert = shift_posinormal_conditions(w, n_zero, n - 2)?;
        out.ratio_sup = cert.delta1.clone();
        out.posinormal = match cert.verdict {
            Verdict::Certified => ShiftVerdict::Certified,
            Verdict::CertifiedToN => ShiftVerdict::CertifiedToN,
            _ => ShiftVerdict::Unknown,
        };
        if matches!(out.posinormal, ShiftVerdict::Certified | ShiftVerdict::CertifiedToN) {
            out.supraposinormal = Supraposinormal::YesViaConditions;
            out.notes
                .push("posinormal by the zero-prefix conditions; no explicit interrupter built".into());
        }
        out.notes.extend(cert.notes);
    }
    Ok(out)
}

/// Kernel inclusions of a finite matrix, decided exactly.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct KernelReport {
    pub n: usize,
    /// Basis vectors `e_j` (`j < window`) tested.
    pub window: usize,
    pub basis_in_ker_a: Vec<usize>,
    pub basis_in_ker_adjoint: Vec<usize>,
    /// `Ker A ⊂ Ker A*` on `span{e_j : j < window}`.
    pub ker_a_in_ker_adjoint: bool,
    pub ker_adjoint_in_ker_a: bool,
    /// Basis vectors in `Ker A` but not `Ker A*`, and conversely.
    pub witnesses_a_not_adjoint: Vec<usize>,
    pub witnesses_adjoint_not_a: Vec<usize>,
}

/// Basis membership of both kernels and subspace inclusion by rank:
/// on `V = span{e_j : j < window}`, `Ker(A|V) ⊂ Ker(B|V)` iff
/// `rank(A|V) = rank([A|V; B|V])`. A window smaller than `n` keeps
/// truncation boundary columns out of the test.
pub fn kernel_witness(a: &TruncatedOperator<Rational>, window: Option<usize>) -> KernelReport {
    let n = a.n();
    let window = window.unwrap_or(n).min(n);
    let adj = a.adjoint();
    let cols = |m: &TruncatedOperator<Rational>| -> Vec<Vec<Rational>> {
        (0..n).map(|i| m.row(i)[..window].to_vec()).collect()
    };
    let (ra, rb) = (cols(a), cols(&adj));
    let zero_col = |rows: &[Vec<Rational>], j: usize| rows.iter().all(|r| r[j].is_zero());
    let in_a: Vec<usize> = (0..window).filter(|&j| zero_col(&ra, j)).collect();
    let in_b: Vec<usize> = (0..window).filter(|&j| zero_col(&rb, j)).collect();
    let rank_a = rank_of_rows(ra.clone());
    let rank_b = rank_of_rows(rb.clone());
    let rank_ab = rank_of_rows(ra.iter().chain(&rb).cloned().collect());
    KernelReport {
        n,
        window,
        witnesses_a_not_adjoint: in_a.iter().copied().filter(|j| !in_b.contains(j)).collect(),
        witnesses_adjoint_not_a: in_b.iter().copied().filter(|j| !in_a.contains(j)).collect(),
        basis_in_ker_a: in_a,
        basis_in_ker_adjoint: in_b,
        ker_a_in_ker_adjoint: rank_a == rank_ab,
        ker_adjoint_in_ker_a: rank_b == rank_ab,
    }
}
