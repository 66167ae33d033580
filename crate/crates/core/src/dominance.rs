//! The scalar `c_n a_1 prod_{j=2}^{n-1} (c_0 a_0 - c_j a_j) / (c_0 a_0)^n`.
//!
//! A value above 1 is reported as falsifying dominance under the external
//! criterion this quantity comes from; the criterion itself is not
//! re-implemented.

use num_traits::One;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::{pow, Rational};
use crate::sequences::SequenceFamily;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DominanceReport {
    pub n: usize,
    #[serde(with = "crate::scalar::serde_rational")]
    pub value: Rational,
    pub exceeds_one: bool,
    /// `c_n a_1` followed by `c_0 a_0 - c_j a_j` for `j = 2..n-1`.
    #[serde(skip)]
    pub factors: Vec<Rational>,
    #[serde(skip)]
    pub denominator: Rational,
}

impl DominanceReport {
    pub fn recompute(&self) -> Rational {
        self.factors.iter().fold(Rational::one(), |acc, f| acc * f) / self.denominator.clone()
    }

    pub fn verdict(&self) -> &'static str {
        if self.exceeds_one {
            "dominance falsified per the cited criterion"
        } else {
            "no conclusion"
        }
    }
}

pub fn dominance_quantity(fam: &SequenceFamily, n: usize) -> Result<DominanceReport> {
    if n < 3 {
        return Err(Error::IndexTooSmall { index: n, min: 3 });
    }
    let base = fam.c(0) * fam.a(0);
    let mut factors = vec![fam.c(n) * fam.a(1)];
    factors.extend((2..n).map(|j| base.clone() - fam.c(j) * fam.a(j)));
    let denominator = pow(&base, n as i64);
    let value = factors.iter().fold(Rational::one(), |acc, f| acc * f) / denominator.clone();
    Ok(DominanceReport {
        n,
        exceeds_one: value > Rational::one(),
        value,
        factors,
        denominator,
    })
}
