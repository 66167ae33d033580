//! Floating-point falsification and cross-checks.
//!
//! Numerics never proves positivity. A negative eigenvalue below the error
//! budget falsifies; anything else is reported as consistent.

pub mod compression;
pub mod psd;
pub mod tails;

use nalgebra::DMatrix;
use serde::Serialize;

pub use compression::{commutator_compression, CommutatorParts, OperatorSource, TailBound};
pub use psd::{psd_check, psd_check_with, PsdReport, PsdVerdict, SLACK_FACTOR};

use crate::error::{Error, Result};
use crate::interrupters::{verify_pair_identity, verify_shift_identity, InterrupterPair};
use crate::matrix::{sandwich, DiagonalOperator};
use crate::scalar::rational_to_f64;

/// Relative bisection tolerance for [`gamma_estimate`].
pub const GAMMA_TOLERANCE: f64 = 1e-9;
const GAMMA_CAP: f64 = (1u64 << 40) as f64;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GammaEstimate {
    pub n: usize,
    /// Smallest `gamma` found consistent; `None` when even `2^40` is falsified.
    pub gamma: Option<f64>,
    /// Largest `gamma` found falsified: every `gamma` at or below it fails on
    /// the compression, so it is a lower bound for any posinormality constant.
    pub certified_lower: f64,
    pub iterations: usize,
}

/// Whether `gamma^2 A*A - AA*` survives [`psd_check`] on the parts.
pub fn consistent_at(parts: &CommutatorParts, gamma: f64, slack_factor: f64) -> Result<bool> {
    let (m, tb) = parts.at(gamma);
    Ok(psd_check_with(&m, tb.spectral_error, slack_factor)?.verdict == PsdVerdict::Consistent)
}

/// Bisection for the smallest consistent `gamma` on the `n x n`
/// compression. A bracket that straddles 1 within tolerance reports exactly
/// 1, the hyponormal boundary.
pub fn gamma_estimate(src: &OperatorSource, n: usize, k: usize) -> Result<GammaEstimate> {
    gamma_estimate_with(&CommutatorParts::new(src, n, k)?, SLACK_FACTOR)
}

pub fn gamma_estimate_with(parts: &CommutatorParts, slack_factor: f64) -> Result<GammaEstimate> {
    let mut out = GammaEstimate {
        n: parts.n,
        gamma: Some(0.0),
        certified_lower: 0.0,
        iterations: 0,
    };
    if consistent_at(parts, 0.0, slack_factor)? {
        return Ok(out);
    }
    if singular_escape(parts, slack_factor) {
        out.gamma = None;
        return Ok(out);
    }
    let (mut lo, mut hi) = (0.0, 1.0);
    while !consistent_at(parts, hi, slack_factor)? {
        out.iterations += 1;
        lo = hi;
        hi *= 2.0;
        if hi > GAMMA_CAP {
            out.gamma = None;
            out.certified_lower = lo;
            return Ok(out);
        }
    }
    while hi - lo > GAMMA_TOLERANCE * hi {
        out.iterations += 1;
        let mid = 0.5 * (lo + hi);
        if consistent_at(parts, mid, slack_factor)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    if lo < 1.0 && (hi - 1.0).abs() <= GAMMA_TOLERANCE && consistent_at(parts, 1.0, slack_factor)? {
        hi = 1.0;
    }
    out.gamma = Some(hi);
    out.certified_lower = lo;
    Ok(out)
}

/// A numerically null direction `u` of `A*A` with `u* AA* u` clearly
/// positive: no `gamma` can work.
fn singular_escape(parts: &CommutatorParts, slack_factor: f64) -> bool {
    let (ata, aat, ata_err, aat_err) = parts.raw();
    let n = parts.n as f64;
    let null_tol = slack_factor * n * ata.amax() + ata_err.norm();
    let pos_tol = slack_factor * n * aat.amax() + aat_err.norm();
    let eig = ata.clone().symmetric_eigen();
    eig.eigenvalues.iter().enumerate().any(|(i, &v)| {
        let u = eig.eigenvectors.column(i);
        v <= null_tol && (u.transpose() * aat * u)[(0, 0)] > pos_tol
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormalReport {
    pub n: usize,
    /// `max |(B*B - BB*)_ij|` for `B = sqrt(P) A sqrt(P)`.
    pub max_commutator: f64,
    pub budget: f64,
    pub pass: bool,
    /// `APA* = A*PA` held exactly on the window.
    pub pair_verified: bool,
}

/// Checks that `sqrt(P) A sqrt(P)` is normal on the window. Shifts are
/// handled exactly (the sandwich is again a weighted shift); finite matrices
/// in floating point against a rounding budget.
pub fn check_normal_sandwich(src: &OperatorSource, p: &DiagonalOperator, n: usize) -> Result<NormalReport> {
    match src {
        OperatorSource::Finite(a) => {
            let a = a.compression(n.min(a.n()))?;
            let n = a.n();
            let pair_verified = verify_pair_identity(&a, p, p)?.pass;
            let b = sandwich(p, &a.to_float())?;
            let bm = DMatrix::from_fn(n, n, |i, j| *b.get(i, j));
            let comm = bm.transpose() * &bm - &bm * bm.transpose();
            let babs = bm.abs();
            let mag = babs.transpose() * &babs + &babs * babs.transpose();
            let factor = (n as f64 + 12.0) * f64::EPSILON * 1.01;
            let budget = (0..n * n)
                .map(|idx| factor * mag[idx] + f64::EPSILON * comm[idx].abs())
                .fold(0.0, f64::max);
            let max_commutator = comm.amax();
            Ok(NormalReport {
                n,
                max_commutator,
                budget,
                pass: max_commutator <= budget,
                pair_verified,
            })
        }
        OperatorSource::Shift(w) => {
            // B e_j = sqrt(p_j p_{j+1}) w_j e_{j+1}; B*B - BB* is diagonal
            // with entries v_j - v_{j-1}, v_j = p_j p_{j+1} |w_j|^2.
            let v: Vec<_> = (0..n).map(|j| p.entry(j) * p.entry(j + 1) * w.w(j) * w.w(j)).collect();
            let max_commutator = (0..n)
                .map(|j| {
                    let prev = if j == 0 { Default::default() } else { v[j - 1].clone() };
                    rational_to_f64(&(v[j].clone() - prev)).abs()
                })
                .fold(0.0, f64::max);
            let pair = InterrupterPair::user(p.clone(), p.clone());
            let pair_verified = n >= 2 && verify_shift_identity(w, &pair, n + 1)?.pass;
            Ok(NormalReport {
                n,
                max_commutator,
                budget: 0.0,
                pass: max_commutator == 0.0,
                pair_verified,
            })
        }
        OperatorSource::Factorable(f) => Err(Error::TailUnavailable(format!(
            "normality of the sandwich is only checked for shifts and finite matrices, not {}",
            f.name
        ))),
    }
}
