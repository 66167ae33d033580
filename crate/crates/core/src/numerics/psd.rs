//! Positive semidefiniteness of a symmetric float matrix, decided against
//! an explicit error budget.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::TruncatedOperator;

/// Default slack factor: the threshold gets `2^-30 * n * max|m_ij|`.
pub const SLACK_FACTOR: f64 = 1.0 / (1u64 << 30) as f64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PsdVerdict {
    /// A direction with `x* M x < -(error + slack)`.
    Falsified,
    Consistent,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PsdReport {
    pub n: usize,
    pub lambda_min: f64,
    pub error_bound: f64,
    pub slack: f64,
    pub verdict: PsdVerdict,
    /// Unit eigenvector for `lambda_min`.
    pub witness: Vec<f64>,
}

pub fn psd_check(m: &TruncatedOperator<f64>, error_bound: f64) -> Result<PsdReport> {
    psd_check_with(m, error_bound, SLACK_FACTOR)
}

pub fn psd_check_with(m: &TruncatedOperator<f64>, error_bound: f64, slack_factor: f64) -> Result<PsdReport> {
    let n = m.n();
    if n == 0 {
        return Err(Error::Dimension("psd check of an empty matrix".into()));
    }
    if !(error_bound >= 0.0 && slack_factor >= 0.0) {
        return Err(Error::Config("error bound and slack must be >= 0".into()));
    }
    if (0..n).any(|i| m.row(i).iter().any(|x| !x.is_finite())) {
        return Err(Error::Eigen("matrix has non-finite entries".into()));
    }
    if !m.is_symmetric(0.0) {
        return Err(Error::Eigen("matrix is not symmetric".into()));
    }
    let dm = DMatrix::from_fn(n, n, |i, j| *m.get(i, j));
    let eig = dm.symmetric_eigen();
    let (idx, lambda_min) = eig
        .eigenvalues
        .iter()
        .copied()
        .enumerate()
        .fold((0, f64::INFINITY), |b, (i, v)| if v < b.1 { (i, v) } else { b });
    if !lambda_min.is_finite() {
        return Err(Error::Eigen("eigensolver returned a non-finite value".into()));
    }
    let slack = slack_factor * n as f64 * m.max_abs();
    let mut witness: Vec<f64> = eig.eigenvectors.column(idx).iter().copied().collect();
    // fix the sign so the report is reproducible
    if let Some(first) = witness.iter().find(|x| x.abs() > 1e-12) {
        if *first < 0.0 {
            witness.iter_mut().for_each(|x| *x = -*x);
        }
    }
    Ok(PsdReport {
        n,
        lambda_min,
        error_bound,
        slack,
        verdict: if lambda_min < -(error_bound + slack) {
            PsdVerdict::Falsified
        } else {
            PsdVerdict::Consistent
        },
        witness,
    })
}
