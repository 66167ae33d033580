//! Dense truncated operators (leading `n x n` sections of infinite matrices)
//! and diagonal operators given by generators.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::scalar::{rational_to_f64, Backend, Rational, Scalar};
use crate::sequences::{EntryFn, SequenceFamily, WeightSequence};

/// Row-major `n x n` matrix. Equality ignores provenance.
#[derive(Clone)]
pub struct TruncatedOperator<T: Scalar> {
    n: usize,
    entries: Vec<T>,
    pub provenance: String,
}

impl<T: Scalar> PartialEq for TruncatedOperator<T> {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.entries == other.entries
    }
}

impl<T: Scalar> fmt::Debug for TruncatedOperator<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "TruncatedOperator({}x{}, {})", self.n, self.n, self.provenance)?;
        for i in 0..self.n {
            writeln!(f, "  {:?}", self.row(i))?;
        }
        Ok(())
    }
}

impl<T: Scalar> TruncatedOperator<T> {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            entries: vec![T::zero(); n * n],
            provenance: "zeros".into(),
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, |i, j| if i == j { T::one() } else { T::zero() }).with_provenance("identity")
    }

    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> T) -> Self {
        let mut entries = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                entries.push(f(i, j));
            }
        }
        Self {
            n,
            entries,
            provenance: String::new(),
        }
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::Dimension(format!(
                "rows of a {n}-row matrix must have length {n}"
            )));
        }
        Ok(Self {
            n,
            entries: rows.into_iter().flatten().collect(),
            provenance: "rows".into(),
        })
    }

    /// Diagonal matrix with the given entries.
    pub fn diagonal(d: &[T]) -> Self {
        Self::from_fn(d.len(), |i, j| if i == j { d[i].clone() } else { T::zero() }).with_provenance("diagonal")
    }

    pub fn with_provenance(mut self, p: impl Into<String>) -> Self {
        self.provenance = p.into();
        self
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn backend(&self) -> Backend {
        T::BACKEND
    }

    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.entries[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.entries[i * self.n + j] = v;
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.entries[i * self.n..(i + 1) * self.n]
    }

    /// Conjugate transpose (all scalars are real).
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.n, |i, j| self.get(j, i).clone()).with_provenance(format!("({})*", self.provenance))
    }

    pub fn multiply(&self, other: &Self) -> Result<Self> {
        check_same(self, other, "multiply")?;
        let n = self.n;
        let rows: Vec<Vec<T>> = (0..n)
            .into_par_iter()
            .map(|i| {
                let mut out = vec![T::zero(); n];
                for k in 0..n {
                    let a = self.get(i, k);
                    if a.is_negligible(0.0) {
                        continue;
                    }
                    for (j, o) in out.iter_mut().enumerate() {
                        let b = other.get(k, j);
                        if !b.is_negligible(0.0) {
                            *o = o.clone() + a.clone() * b.clone();
                        }
                    }
                }
                out
            })
            .collect();
        Ok(Self {
            n,
            entries: rows.into_iter().flatten().collect(),
            provenance: format!("{} . {}", self.provenance, other.provenance),
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        check_same(self, other, "add")?;
        Ok(self.zip(other, |a, b| a.clone() + b.clone()))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        check_same(self, other, "sub")?;
        Ok(self.zip(other, |a, b| a.clone() - b.clone()))
    }

    pub fn scale(&self, s: &T) -> Self {
        Self {
            n: self.n,
            entries: self.entries.iter().map(|x| s.clone() * x.clone()).collect(),
            provenance: self.provenance.clone(),
        }
    }

    /// `A - r I`.
    pub fn shift_by(&self, r: &T) -> Self {
        let mut out = self.clone();
        for i in 0..self.n {
            let v = out.get(i, i).clone() - r.clone();
            out.set(i, i, v);
        }
        out
    }

    fn zip(&self, other: &Self, f: impl Fn(&T, &T) -> T) -> Self {
        Self {
            n: self.n,
            entries: self.entries.iter().zip(&other.entries).map(|(a, b)| f(a, b)).collect(),
            provenance: self.provenance.clone(),
        }
    }

    /// Leading `m x m` corner.
    pub fn compression(&self, m: usize) -> Result<Self> {
        if m > self.n {
            return Err(Error::Dimension(format!(
                "cannot compress {}x{} to {m}",
                self.n, self.n
            )));
        }
        Ok(Self::from_fn(m, |i, j| self.get(i, j).clone())
            .with_provenance(format!("P_{m} ({}) P_{m}", self.provenance)))
    }

    pub fn is_lower_triangular(&self) -> bool {
        (0..self.n).all(|i| (i + 1..self.n).all(|j| self.get(i, j).is_negligible(0.0)))
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        (0..self.n).all(|i| (0..i).all(|j| (self.get(i, j).clone() - self.get(j, i).clone()).is_negligible(tol)))
    }

    /// First lexicographic `(i, j)` where the matrices differ by more than `tol`.
    pub fn first_difference(&self, other: &Self, tol: f64) -> Option<(usize, usize)> {
        if self.n != other.n {
            return Some((0, 0));
        }
        (0..self.n)
            .flat_map(|i| (0..self.n).map(move |j| (i, j)))
            .find(|&(i, j)| !(self.get(i, j).clone() - other.get(i, j).clone()).is_negligible(tol))
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|x| x.to_f64().abs()).fold(0.0, f64::max)
    }

    pub fn to_float(&self) -> TruncatedOperator<f64> {
        TruncatedOperator {
            n: self.n,
            entries: self.entries.iter().map(Scalar::to_f64).collect(),
            provenance: self.provenance.clone(),
        }
    }

    /// `D A` for diagonal `D` given by its entries.
    pub fn scale_rows(&self, d: &[T]) -> Self {
        Self::from_fn(self.n, |i, j| d[i].clone() * self.get(i, j).clone()).with_provenance(self.provenance.clone())
    }

    /// `A D` for diagonal `D` given by its entries.
    pub fn scale_cols(&self, d: &[T]) -> Self {
        Self::from_fn(self.n, |i, j| self.get(i, j).clone() * d[j].clone()).with_provenance(self.provenance.clone())
    }
}

impl TruncatedOperator<Rational> {
    pub fn from_f64_rows(rows: &[Vec<f64>]) -> Option<Self> {
        let rows = rows
            .iter()
            .map(|r| r.iter().map(|&x| Rational::from_float(x)).collect::<Option<Vec<_>>>())
            .collect::<Option<Vec<_>>>()?;
        Self::from_rows(rows).ok()
    }

    /// Rank by exact Gaussian elimination.
    pub fn rank(&self) -> usize {
        rank_of_rows((0..self.n).map(|i| self.row(i).to_vec()).collect())
    }
}

/// Rank of an arbitrary (possibly non-square) rational matrix.
pub fn rank_of_rows(mut rows: Vec<Vec<Rational>>) -> usize {
    let cols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..cols {
        let Some(pivot) = (rank..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(rank, pivot);
        let p = rows[rank][col].clone();
        for r in rank + 1..rows.len() {
            if rows[r][col].is_zero() {
                continue;
            }
            let factor = rows[r][col].clone() / p.clone();
            for c in col..cols {
                let v = rows[rank][c].clone() * factor.clone();
                rows[r][c] = rows[r][c].clone() - v;
            }
        }
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    rank
}

fn check_same<T: Scalar>(a: &TruncatedOperator<T>, b: &TruncatedOperator<T>, op: &str) -> Result<()> {
    if a.n != b.n {
        return Err(Error::Dimension(format!("{op}: {} vs {}", a.n, b.n)));
    }
    Ok(())
}

/// Lower-triangular `m_ij = a_i c_j` for `j <= i`.
pub fn build_factorable(fam: &SequenceFamily, n: usize) -> Result<TruncatedOperator<Rational>> {
    if n == 0 {
        return Err(Error::Dimension("factorable truncation needs n >= 1".into()));
    }
    let a: Vec<_> = (0..n).map(|i| fam.a(i)).collect();
    let c: Vec<_> = (0..n).map(|j| fam.c(j)).collect();
    Ok(TruncatedOperator::from_fn(n, |i, j| {
        if j <= i {
            a[i].clone() * c[j].clone()
        } else {
            Rational::zero()
        }
    })
    .with_provenance(format!("M[{}]_{n}", fam.name)))
}

/// Truncated shift: `entry(i+1, i) = w_i`.
pub fn build_shift(w: &WeightSequence, n: usize) -> Result<TruncatedOperator<Rational>> {
    if n < 2 {
        return Err(Error::Dimension("shift truncation needs n >= 2".into()));
    }
    let mut m = TruncatedOperator::zeros(n).with_provenance(format!("W[{}]_{n}", w.name));
    for i in 0..n - 1 {
        m.set(i + 1, i, w.w(i));
    }
    Ok(m)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Positivity {
    Strict,
    Semidefinite,
}

/// Diagonal operator `diag{d_0, d_1, ...}` with exact entries.
#[derive(Clone)]
pub struct DiagonalOperator {
    diag: EntryFn,
    overrides: BTreeMap<usize, Rational>,
    pub positivity: Positivity,
    pub label: String,
}

impl fmt::Debug for DiagonalOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let head: Vec<String> = (0..4).map(|i| self.entry(i).to_string()).collect();
        write!(f, "{}: diag{{{}, ...}}", self.label, head.join(", "))
    }
}

impl DiagonalOperator {
    pub fn new(label: impl Into<String>, diag: EntryFn, positivity: Positivity) -> Self {
        Self {
            diag,
            overrides: BTreeMap::new(),
            positivity,
            label: label.into(),
        }
    }

    pub fn constant(label: impl Into<String>, v: Rational) -> Self {
        let positivity = if v.is_positive() {
            Positivity::Strict
        } else {
            Positivity::Semidefinite
        };
        Self::new(label, Arc::new(move |_| v.clone()), positivity)
    }

    pub fn identity() -> Self {
        Self::constant("I", Rational::one())
    }

    /// Explicit leading entries, then `tail` from index `prefix.len()` on.
    pub fn from_prefix(label: impl Into<String>, prefix: Vec<Rational>, tail: Rational) -> Self {
        let strict = prefix.iter().chain(std::iter::once(&tail)).all(Signed::is_positive);
        let prefix = Arc::new(prefix);
        Self::new(
            label,
            Arc::new(move |i| prefix.get(i).cloned().unwrap_or_else(|| tail.clone())),
            if strict {
                Positivity::Strict
            } else {
                Positivity::Semidefinite
            },
        )
    }

    pub fn entry(&self, i: usize) -> Rational {
        match self.overrides.get(&i) {
            Some(v) => v.clone(),
            None => (self.diag)(i),
        }
    }

    pub fn entries(&self, n: usize) -> Vec<Rational> {
        (0..n).map(|i| self.entry(i)).collect()
    }

    /// Copy with a single entry replaced.
    pub fn with_override(&self, i: usize, v: Rational) -> Self {
        let mut out = self.clone();
        out.overrides.insert(i, v);
        out.label = format!("{}[{i} overridden]", self.label);
        out
    }

    /// Checks nonnegativity (strict positivity in strict mode) on `0..n`.
    pub fn check(&self, n: usize) -> Result<()> {
        for i in 0..n {
            let v = self.entry(i);
            if v.is_negative() {
                return Err(Error::NegativeDiagonal {
                    index: i,
                    value: v.to_string(),
                });
            }
            if self.positivity == Positivity::Strict && v.is_zero() {
                return Err(Error::ZeroDiagonal {
                    what: "strict diagonal",
                    index: i,
                });
            }
        }
        Ok(())
    }

    pub fn to_matrix(&self, n: usize) -> TruncatedOperator<Rational> {
        TruncatedOperator::diagonal(&self.entries(n)).with_provenance(self.label.clone())
    }

    /// Largest entry on `0..n`.
    pub fn sup_upto(&self, n: usize) -> Option<Rational> {
        (0..n).map(|i| self.entry(i)).max()
    }
}

fn nonnegative_entries(d: &DiagonalOperator, n: usize) -> Result<Vec<Rational>> {
    let entries = d.entries(n);
    if let Some((index, v)) = entries.iter().enumerate().find(|(_, v)| v.is_negative()) {
        return Err(Error::NegativeDiagonal {
            index,
            value: v.to_string(),
        });
    }
    Ok(entries)
}

/// `sqrt(D) A sqrt(D)` in floating point: `entry(i, j) = sqrt(d_i d_j) A(i, j)`.
pub fn sandwich(d: &DiagonalOperator, a: &TruncatedOperator<f64>) -> Result<TruncatedOperator<f64>> {
    let n = a.n();
    let entries = nonnegative_entries(d, n)?;
    let roots: Vec<f64> = entries.iter().map(|x| rational_to_f64(x).sqrt()).collect();
    Ok(a.scale_rows(&roots)
        .scale_cols(&roots)
        .with_provenance(format!("sqrt({}) {} sqrt({})", d.label, a.provenance, d.label)))
}

/// Exact squares of the sandwich entries, `d_i d_j A(i, j)^2`, for equality
/// tests that must not go through irrational square roots.
pub fn sandwich_squared(d: &DiagonalOperator, a: &TruncatedOperator<Rational>) -> Result<TruncatedOperator<Rational>> {
    let n = a.n();
    let entries = nonnegative_entries(d, n)?;
    Ok(TruncatedOperator::from_fn(n, |i, j| {
        let x = a.get(i, j);
        entries[i].clone() * entries[j].clone() * x.clone() * x.clone()
    }))
}
