//! Compressions of `gamma^2 A*A - AA*` with entrywise error bounds.
//!
//! For a factorable `A`, `(AA*)_ij = a_i a_j sum_{k <= min(i,j)} c_k^2` is a
//! finite exact sum, while `(A*A)_ij = c_i c_j S_{max(i,j)}` with
//! `S_m = sum_{k >= m} a_k^2` needs a partial sum to `K` plus a rigorous tail
//! enclosure. Every rounding and tail width is accumulated into an entry
//! error matrix whose Frobenius norm bounds the spectral perturbation.

use nalgebra::DMatrix;
use num_traits::{Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;

use super::tails::TailMethod;
use crate::error::{Error, Result};
use crate::matrix::TruncatedOperator;
use crate::scalar::{rational_to_f64, Rational};
use crate::sequences::{SequenceFamily, WeightSequence};

const EPS: f64 = f64::EPSILON;

/// What the compression is built from.
#[derive(Debug, Clone)]
pub enum OperatorSource {
    Factorable(SequenceFamily),
    Shift(WeightSequence),
    Finite(TruncatedOperator<Rational>),
}

impl OperatorSource {
    pub fn name(&self) -> String {
        match self {
            OperatorSource::Factorable(f) => f.name.clone(),
            OperatorSource::Shift(w) => w.name.clone(),
            OperatorSource::Finite(a) => a.provenance.clone(),
        }
    }
}

/// Tail and rounding budget of a compression.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TailBound {
    /// Index `K` where the explicit partial sum stops.
    pub start: usize,
    /// Upper bound on `c_i c_j sum_{k >= K} a_k^2` over the window.
    pub bound: f64,
    pub method: Option<TailMethod>,
    /// Largest entrywise error of the compression.
    pub entry_error: f64,
    /// Bound on the spectral-norm error (Frobenius norm of the entry errors).
    pub spectral_error: f64,
}

/// `A*A` and `AA*` on an `n x n` window with their entry error matrices,
/// so that every `gamma` reuses the same sums.
#[derive(Debug, Clone)]
pub struct CommutatorParts {
    pub n: usize,
    ata: DMatrix<f64>,
    aat: DMatrix<f64>,
    ata_err: DMatrix<f64>,
    aat_err: DMatrix<f64>,
    tail_start: usize,
    tail_bound: f64,
    method: Option<TailMethod>,
}

/// Neumaier compensated sum.
fn compensated_sum(xs: impl Iterator<Item = f64>) -> f64 {
    let (mut s, mut c) = (0.0f64, 0.0f64);
    for x in xs {
        let t = s + x;
        if s.abs() >= x.abs() {
            c += (s - t) + x;
        } else {
            c += (x - t) + s;
        }
        s = t;
    }
    s + c
}

fn rounded(m: &TruncatedOperator<Rational>) -> (DMatrix<f64>, DMatrix<f64>) {
    let n = m.n();
    let v = DMatrix::from_fn(n, n, |i, j| rational_to_f64(m.get(i, j)));
    let e = v.map(|x| x.abs() * EPS);
    (v, e)
}

impl CommutatorParts {
    pub fn new(src: &OperatorSource, n: usize, k: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Dimension("compression needs n >= 1".into()));
        }
        match src {
            OperatorSource::Factorable(f) => Self::factorable(f, n, k),
            OperatorSource::Shift(w) => Ok(Self::shift(w, n)),
            OperatorSource::Finite(a) => Self::finite(a, n),
        }
    }

    fn factorable(fam: &SequenceFamily, n: usize, k: usize) -> Result<Self> {
        if k < n {
            return Err(Error::Config(format!("tail start K = {k} must be >= n = {n}")));
        }
        let strategy = fam
            .square_tail()
            .ok_or_else(|| Error::TailUnavailable(format!("family {} has no tail method for sum a_k^2", fam.name)))?;
        let a: Vec<Rational> = (0..n).map(|i| fam.a(i)).collect();
        let c: Vec<Rational> = (0..n).map(|j| fam.c(j)).collect();

        // AA*: exact rational prefix sums, then one rounding per entry.
        let mut c_prefix = Vec::with_capacity(n);
        let mut acc = Rational::zero();
        for cj in &c {
            acc += cj.clone() * cj.clone();
            c_prefix.push(acc.clone());
        }
        let aat_exact = TruncatedOperator::from_fn(n, |i, j| a[i].clone() * a[j].clone() * c_prefix[i.min(j)].clone());
        let (aat, aat_err) = rounded(&aat_exact);

        // S_n = sum_{n <= k < K} a_k^2 + tail(K), summed small to large in
        // ordered parallel chunks.
        let a_fn = fam.a_fn();
        let chunk = 4096;
        let starts: Vec<usize> = (n..k).step_by(chunk).collect();
        let partials: Vec<(f64, f64)> = starts
            .par_iter()
            .map(|&s| {
                let e = (s + chunk).min(k);
                let terms: Vec<f64> = (s..e)
                    .rev()
                    .map(|i| {
                        let x = rational_to_f64(&a_fn(i));
                        x * x
                    })
                    .collect();
                let abs: f64 = terms.iter().sum();
                (compensated_sum(terms.into_iter()), abs)
            })
            .collect();
        let tail = strategy.square_tail(k);
        let mid_sum = compensated_sum(partials.iter().rev().map(|p| p.0));
        let mid_abs: f64 = partials.iter().map(|p| p.1).sum();
        let mut s = vec![0.0; n + 1];
        let mut s_err = vec![0.0; n + 1];
        s[n] = mid_sum + tail.midpoint();
        // three roundings per term, compensated summation, tail width
        s_err[n] = 6.0 * EPS * (mid_abs + tail.upper) + tail.radius();
        let a_sq: Vec<f64> = a.iter().map(|x| rational_to_f64(&(x.clone() * x.clone()))).collect();
        for m in (0..n).rev() {
            s[m] = s[m + 1] + a_sq[m];
            s_err[m] = s_err[m + 1] + 2.0 * EPS * s[m].abs();
        }
        let cf: Vec<f64> = c.iter().map(rational_to_f64).collect();
        let ata = DMatrix::from_fn(n, n, |i, j| cf[i] * cf[j] * s[i.max(j)]);
        let ata_err = DMatrix::from_fn(n, n, |i, j| {
            let w = (cf[i] * cf[j]).abs();
            w * s_err[i.max(j)] + 4.0 * EPS * w * s[i.max(j)].abs()
        });
        let cmax = cf.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        Ok(Self {
            n,
            ata,
            aat,
            ata_err,
            aat_err,
            tail_start: k,
            tail_bound: cmax * cmax * tail.upper,
            method: Some(strategy.method()),
        })
    }

    /// `W*W = diag{|w_j|^2}`, `WW* = diag{0, |w_0|^2, ...}`; exact before
    /// rounding, no tails.
    fn shift(w: &WeightSequence, n: usize) -> Self {
        let sq: Vec<Rational> = (0..n).map(|j| w.w(j).abs() * w.w(j).abs()).collect();
        let ata = TruncatedOperator::from_fn(n, |i, j| if i == j { sq[i].clone() } else { Rational::zero() });
        let aat = TruncatedOperator::from_fn(n, |i, j| {
            if i == j && i > 0 {
                sq[i - 1].clone()
            } else {
                Rational::zero()
            }
        });
        let (ata, ata_err) = rounded(&ata);
        let (aat, aat_err) = rounded(&aat);
        Self {
            n,
            ata,
            aat,
            ata_err,
            aat_err,
            tail_start: n,
            tail_bound: 0.0,
            method: None,
        }
    }

    fn finite(a: &TruncatedOperator<Rational>, n: usize) -> Result<Self> {
        let a = a.compression(n)?;
        let adj = a.adjoint();
        let (ata, ata_err) = rounded(&adj.multiply(&a)?);
        let (aat, aat_err) = rounded(&a.multiply(&adj)?);
        Ok(Self {
            n,
            ata,
            aat,
            ata_err,
            aat_err,
            tail_start: n,
            tail_bound: 0.0,
            method: None,
        })
    }

    /// Rounded `A*A`, `AA*` and their entry error matrices.
    pub(crate) fn raw(&self) -> (&DMatrix<f64>, &DMatrix<f64>, &DMatrix<f64>, &DMatrix<f64>) {
        (&self.ata, &self.aat, &self.ata_err, &self.aat_err)
    }

    /// The leading `m x m` block; compressions of compressions.
    pub fn leading(&self, m: usize) -> Result<Self> {
        if m == 0 || m > self.n {
            return Err(Error::Dimension(format!("leading block {m} of {}", self.n)));
        }
        let cut = |x: &DMatrix<f64>| x.view((0, 0), (m, m)).into_owned();
        Ok(Self {
            n: m,
            ata: cut(&self.ata),
            aat: cut(&self.aat),
            ata_err: cut(&self.ata_err),
            aat_err: cut(&self.aat_err),
            ..self.clone()
        })
    }

    /// `gamma^2 A*A - AA*` with its error bounds.
    pub fn at(&self, gamma: f64) -> (TruncatedOperator<f64>, TailBound) {
        let g2 = gamma * gamma;
        let m = &self.ata * g2 - &self.aat;
        let err = DMatrix::from_fn(self.n, self.n, |i, j| {
            g2 * self.ata_err[(i, j)] * (1.0 + 2.0 * EPS)
                + self.aat_err[(i, j)]
                + 2.0 * EPS * (g2 * self.ata[(i, j)].abs() + m[(i, j)].abs())
        });
        // symmetrize exactly: both triangles are computed from the same sums
        let op = TruncatedOperator::from_fn(self.n, |i, j| m[(i.min(j), i.max(j))])
            .with_provenance(format!("{gamma}^2 A*A - AA*"));
        let bound = TailBound {
            start: self.tail_start,
            bound: self.tail_bound,
            method: self.method,
            entry_error: err.max(),
            spectral_error: err.norm(),
        };
        (op, bound)
    }
}

/// The `n x n` compression of `gamma^2 A*A - AA*`, partial sums of `a_k^2`
/// up to `K` and a tail enclosure beyond.
pub fn commutator_compression(
    src: &OperatorSource,
    gamma: f64,
    n: usize,
    k: usize,
) -> Result<(TruncatedOperator<f64>, TailBound)> {
    Ok(CommutatorParts::new(src, n, k)?.at(gamma))
}
