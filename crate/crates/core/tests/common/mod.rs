//! Instance generators shared by the integration tests.

#![allow(dead_code)]

use std::sync::Arc;

use posinorm::interrupters::finite_section_instance;
use posinorm::matrix::{DiagonalOperator, TruncatedOperator};
use posinorm::scalar::{int, ratio};
use posinorm::sequences::{make_family, Params, SequenceFamily};
use posinorm::Rational;
use rand::Rng;

pub fn family(name: &str, kv: &[(&str, Rational)]) -> SequenceFamily {
    let params: Params = kv.iter().map(|(k, v)| (k.to_string(), v.clone())).collect();
    make_family(name, &params).unwrap()
}

/// Every catalog factorable family at the parameters used throughout.
pub fn catalog_families() -> Vec<SequenceFamily> {
    vec![
        family("cesaro", &[("k", ratio(1, 2))]),
        family("cesaro", &[("k", int(1))]),
        family("cesaro", &[("k", int(2))]),
        family("cesaro", &[("k", ratio(7, 3))]),
        family("fibonacci", &[]),
        family("q-cesaro", &[("q", int(2))]),
        family("q-cesaro", &[("q", ratio(3, 2))]),
        family("q-cesaro", &[("q", ratio(1, 2))]),
        family("q-cesaro", &[("q", ratio(1, 3))]),
        family("toeplitz", &[("r", ratio(1, 2))]),
        family("toeplitz", &[("r", ratio(3, 4))]),
        family("rhaly-counterexample", &[]),
    ]
}

/// Nonzero rational with numerator and denominator in `1..=bound`.
pub fn nonzero_rational<R: Rng>(rng: &mut R, bound: i64) -> Rational {
    let v = ratio(rng.gen_range(1..=bound), rng.gen_range(1..=bound));
    if rng.gen_bool(0.5) {
        -v
    } else {
        v
    }
}

pub fn positive_rational<R: Rng>(rng: &mut R, bound: i64) -> Rational {
    ratio(rng.gen_range(1..=bound), rng.gen_range(1..=bound))
}

/// Random terraced-or-factorable family whose ratio `a_k/c_k` decreases
/// strictly to 0: random ratios on `0..=len`, then `rho_len / (k - len + 1)`.
pub fn random_family<R: Rng>(rng: &mut R, len: usize) -> SequenceFamily {
    let mut rho = vec![positive_rational(rng, 6) + int(1)];
    for _ in 0..len {
        let last = rho.last().unwrap().clone();
        rho.push(last * ratio(rng.gen_range(1..=5), 6));
    }
    let c: Vec<Rational> = (0..=len).map(|_| positive_rational(rng, 5)).collect();
    let (rho, c) = (Arc::new(rho), Arc::new(c));
    let (rho2, c2) = (rho.clone(), c.clone());
    let a = Arc::new(move |i: usize| {
        if i <= len {
            rho[i].clone() * c[i].clone()
        } else {
            rho[len].clone() / int((i - len + 1) as i64)
        }
    });
    let c = Arc::new(move |j: usize| if j <= len { c2[j].clone() } else { int(1) });
    let _ = rho2;
    SequenceFamily::new("random", a, c).with_rho_limit_zero(true)
}

/// A 4x4 instance with `AQA* = A*PA` exactly and `Q != P`: a finite section
/// of a random factorable family whose last `p` absorbs the tail.
pub fn section_instance<R: Rng>(rng: &mut R) -> (TruncatedOperator<Rational>, DiagonalOperator, DiagonalOperator) {
    let fam = random_family(rng, 5);
    finite_section_instance(&fam, 4).unwrap()
}

/// `A = S^-1 N S^-1` with `N` normal and `Q = P = S^2`, so `AQA* = A*QA`.
/// `symmetric` picks `N` symmetric; otherwise `N = alpha I + K`, `K` skew.
pub fn normal_instance<R: Rng>(
    rng: &mut R,
    symmetric: bool,
) -> (TruncatedOperator<Rational>, DiagonalOperator, DiagonalOperator) {
    let n = 4;
    let s: Vec<Rational> = (0..n).map(|_| positive_rational(rng, 4)).collect();
    let mut nm = TruncatedOperator::<Rational>::zeros(n);
    let alpha = nonzero_rational(rng, 5);
    for i in 0..n {
        for j in i..n {
            let x = nonzero_rational(rng, 5);
            if symmetric {
                nm.set(i, j, x.clone());
                nm.set(j, i, x);
            } else if i == j {
                nm.set(i, i, alpha.clone());
            } else {
                nm.set(i, j, x.clone());
                nm.set(j, i, -x);
            }
        }
    }
    let a = TruncatedOperator::from_fn(n, |i, j| nm.get(i, j).clone() / (s[i].clone() * s[j].clone()));
    let sq: Vec<Rational> = s.iter().map(|x| x.clone() * x.clone()).collect();
    let q = DiagonalOperator::from_prefix("Q", sq.clone(), int(1));
    let p = DiagonalOperator::from_prefix("P", sq, int(1));
    (a, q, p)
}
