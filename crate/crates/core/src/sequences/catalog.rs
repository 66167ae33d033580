//! The built-in families.

use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::numerics::tails::{GeometricClosedForm, GeometricRatio, IntegralTest};
use crate::scalar::{from_bigint, int, pow, ratio, Rational};

use super::registry::{FamilyBuilder, ParamSpec};
use super::{fibonacci, DeclaredBounds, Family, FamilyKind, Params, RatioBehavior, SequenceFamily, WeightSequence};

pub fn catalog_builders() -> Vec<Arc<dyn FamilyBuilder>> {
    vec![
        Arc::new(Cesaro),
        Arc::new(Fibonacci),
        Arc::new(Toeplitz),
        Arc::new(QCesaro),
        Arc::new(TerracedCounterexample),
        Arc::new(UnweightedShift),
        Arc::new(ShiftZeroHead),
        Arc::new(ShiftAlternatingZero),
        Arc::new(ShiftHarmonicOdd),
    ]
}

fn param(family: &str, params: &Params, spec: &ParamSpec) -> Result<Rational> {
    params
        .get(&spec.name)
        .cloned()
        .or_else(|| spec.default.clone())
        .ok_or_else(|| Error::MissingParam {
            family: family.into(),
            param: spec.name.clone(),
        })
}

fn out_of_range(family: &str, param: &str, reason: &str) -> Error {
    Error::ParamOutOfRange {
        family: family.into(),
        param: param.into(),
        reason: reason.into(),
    }
}

fn bounds(q_lower: Rational, q_upper: Rational, p_lower: Rational, p_upper: Rational) -> DeclaredBounds {
    DeclaredBounds {
        q_lower,
        q_upper,
        p_lower,
        p_upper,
    }
}

fn one_param(name: &'static str, default: Option<Rational>, range: &'static str) -> Vec<ParamSpec> {
    vec![ParamSpec {
        name: name.to_string(),
        default,
        range,
    }]
}

/// Generalized Cesaro matrix `C_k`: terraced with `a_i = 1/(k+i)`.
struct Cesaro;

impl FamilyBuilder for Cesaro {
    fn name(&self) -> &str {
        "cesaro"
    }
    fn kind(&self) -> FamilyKind {
        FamilyKind::Factorable
    }
    fn description(&self) -> &str {
        "generalized Cesaro C_k: a_i = 1/(k+i), c_j = 1"
    }
    fn params(&self) -> Vec<ParamSpec> {
        one_param("k", Some(int(1)), "k > 0")
    }
    fn build(&self, params: &Params) -> Result<Family> {
        let k = param(self.name(), params, &self.params()[0])?;
        if !k.is_positive() {
            return Err(out_of_range(self.name(), "k", "need k > 0"));
        }
        let kk = k.clone();
        let a = Arc::new(move |i: usize| (kk.clone() + int(i as i64)).recip());
        let kf = crate::scalar::rational_to_f64(&k);
        let tail = IntegralTest {
            antiderivative_tail: Box::new(move |x| 1.0 / (x + kf)),
            term: a.clone(),
            from: 0,
        };
        let one = int(1);
        let b = bounds(
            k.clone().min(one.clone()),
            k.clone().max(one.clone()),
            k.clone() / (k.clone() + one.clone()),
            one,
        );
        Ok(Family::Factorable(
            SequenceFamily::terraced(self.name(), a)
                .with_params([("k".to_string(), k)].into())
                .with_bounds(b)
                .with_rho_limit_zero(true)
                .with_square_tail(Arc::new(tail)),
        ))
    }
}

/// Fibonacci matrix: `a_i = 1/(f_{i+1} f_{i+2})`, `c_j = f_{j+1}^2`.
struct Fibonacci;

impl FamilyBuilder for Fibonacci {
    fn name(&self) -> &str {
        "fibonacci"
    }
    fn kind(&self) -> FamilyKind {
        FamilyKind::Factorable
    }
    fn description(&self) -> &str {
        "Fibonacci matrix: a_i = 1/(f_{i+1} f_{i+2}), c_j = f_{j+1}^2"
    }
    fn build(&self, _params: &Params) -> Result<Family> {
        let a = Arc::new(|i: usize| from_bigint((fibonacci(i + 1) * fibonacci(i + 2)).into()).recip());
        let c = Arc::new(|j: usize| {
            let f = fibonacci(j + 1);
            from_bigint((&f * &f).into())
        });
        // a_{k+1}/a_k = f_{k+1}/f_{k+3} <= 1/2
        let tail = GeometricRatio {
            term: a.clone(),
            ratio: ratio(1, 4),
            from: 0,
        };
        Ok(Family::Factorable(
            SequenceFamily::new(self.name(), a, c)
                .with_pair_closed_form(Arc::new(fibonacci_q), Arc::new(fibonacci_p))
                .with_bounds(bounds(int(1), int(2), ratio(1, 2), int(4)))
                .with_rho_limit_zero(true)
                .with_square_tail(Arc::new(tail)),
        ))
    }
}

fn fib_int(n: usize) -> BigInt {
    fibonacci(n).into()
}

// Consecutive Fibonacci numbers are coprime and so are f_n, f_{n+2}; both
// fractions below are therefore already in lowest terms.

/// `q_n = (f_{n+1}^2 f_{n+2} - f_n^3) / f_{n+1}^3`.
fn fibonacci_q(n: usize) -> Rational {
    let (f0, f1) = (fib_int(n), fib_int(n + 1));
    let f2 = &f0 + &f1;
    let den = &f1 * &f1 * &f1;
    Rational::new_raw(&f1 * &f1 * f2 - &f0 * &f0 * &f0, den)
}

/// `p_n = (f_{n+2}^2 f_{n+3} - f_{n+1}^3) / (f_{n+1} f_{n+2} f_{n+3})`.
fn fibonacci_p(n: usize) -> Rational {
    let (f1, f2) = (fib_int(n + 1), fib_int(n + 2));
    let f3 = &f1 + &f2;
    let num = &f2 * &f2 * &f3 - &f1 * &f1 * &f1;
    Rational::new_raw(num, f1 * f2 * f3)
}

/// Toeplitz factorable matrix `a_i = r^i`, `c_j = r^{-j}`.
struct Toeplitz;

impl FamilyBuilder for Toeplitz {
    fn name(&self) -> &str {
        "toeplitz"
    }
    fn kind(&self) -> FamilyKind {
        FamilyKind::Factorable
    }
    fn description(&self) -> &str {
        "Toeplitz factorable matrix: a_i = r^i, c_j = r^-j"
    }
    fn params(&self) -> Vec<ParamSpec> {
        one_param("r", None, "0 < r < 1")
    }
    fn build(&self, params: &Params) -> Result<Family> {
        let r = param(self.name(), params, &self.params()[0])?;
        if !r.is_positive() || r >= int(1) {
            return Err(out_of_range(self.name(), "r", "need 0 < r < 1"));
        }
        let (ra, rc) = (r.clone(), r.clone());
        let a = Arc::new(move |i: usize| pow(&ra, i as i64));
        let c = Arc::new(move |j: usize| pow(&rc, -(j as i64)));
        let r2 = r.clone() * r.clone();
        let gap = int(1) - r2.clone();
        let tail = GeometricClosedForm {
            scale: int(1),
            ratio: r2,
        };
        Ok(Family::Factorable(
            SequenceFamily::new(self.name(), a, c)
                .with_params([("r".to_string(), r)].into())
                .with_bounds(bounds(gap.clone(), int(1), gap.clone(), gap))
                .with_rho_limit_zero(true)
                .with_square_tail(Arc::new(tail)),
        ))
    }
}

/// q-Cesaro matrices, with the `q > 1` and `0 < q < 1` forms selected by `q`.
/// `a_i` for `q = s/t` in lowest terms. Both branches reduce to
/// `x^i / h_i` with `h_i = sum_{j <= i} s^j t^(i-j)` and `x = t` for `q > 1`,
/// `x = s` for `q < 1`; `x^i` and `h_i` are coprime.
fn q_cesaro_a(q: &Rational, i: usize) -> Rational {
    let (s, t) = (q.numer(), q.denom());
    let e = i as u32;
    let h = (s.pow(e + 1) - t.pow(e + 1)) / (s - t);
    let x = if q > &Rational::one() { t } else { s };
    Rational::new_raw(x.pow(e), h)
}

struct QCesaro;

impl FamilyBuilder for QCesaro {
    fn name(&self) -> &str {
        "q-cesaro"
    }
    fn kind(&self) -> FamilyKind {
        FamilyKind::Factorable
    }
    fn description(&self) -> &str {
        "q-Cesaro: a_i = (q-1)/(q^{i+1}-1), c_j = q^j for q > 1; a_i = (1-q)q^i/(1-q^{i+1}), c_j = q^-j for 0 < q < 1"
    }
    fn params(&self) -> Vec<ParamSpec> {
        one_param("q", None, "q > 0, q != 1")
    }
    fn build(&self, params: &Params) -> Result<Family> {
        let q = param(self.name(), params, &self.params()[0])?;
        let one = int(1);
        if !q.is_positive() || q == one {
            return Err(out_of_range(self.name(), "q", "need q > 0 and q != 1"));
        }
        let fam = if q > one {
            let (qa, qc) = (q.clone(), q.clone());
            let a = Arc::new(move |i: usize| q_cesaro_a(&qa, i));
            let c = Arc::new(move |j: usize| pow(&qc, j as i64));
            let tail = GeometricRatio {
                term: a.clone(),
                ratio: pow(&q, -2),
                from: 0,
            };
            let qp1 = q.clone() + one.clone();
            SequenceFamily::new(self.name(), a, c)
                .with_bounds(bounds(one, qp1.clone(), qp1.recip(), int(2)))
                .with_square_tail(Arc::new(tail))
        } else {
            let (qa, qc) = (q.clone(), q.clone());
            let a = Arc::new(move |i: usize| q_cesaro_a(&qa, i));
            let c = Arc::new(move |j: usize| pow(&qc, -(j as i64)));
            let tail = GeometricRatio {
                term: a.clone(),
                ratio: pow(&q, 2),
                from: 0,
            };
            let qp1 = q.clone() + one.clone();
            SequenceFamily::new(self.name(), a, c)
                .with_bounds(bounds(one, qp1.clone() / q.clone(), q.clone() / qp1, int(2)))
                .with_square_tail(Arc::new(tail))
        };
        Ok(Family::Factorable(
            fam.with_params([("q".to_string(), q)].into()).with_rho_limit_zero(true),
        ))
    }
}

/// Terraced `a_i = (i+3)/(i+2)^2`: hyponormal, yet no single delta satisfies
/// the two-sided ratio constraints.
struct TerracedCounterexample;

impl FamilyBuilder for TerracedCounterexample {
    fn name(&self) -> &str {
        "rhaly-counterexample"
    }
    fn kind(&self) -> FamilyKind {
        FamilyKind::Factorable
    }
    fn description(&self) -> &str {
        "terraced a_i = (i+3)/(i+2)^2, c_j = 1"
    }
    fn build(&self, _params: &Params) -> Result<Family> {
        let a = Arc::new(|i: usize| {
            let i = i as i64;
            ratio(i + 3, (i + 2) * (i + 2))
        });
        // (x+3)^2/(x+2)^4 = 1/(x+2)^2 + 2/(x+2)^3 + 1/(x+2)^4
        let tail = IntegralTest {
            antiderivative_tail: Box::new(|x| {
                let y = x + 2.0;
                1.0 / y + 1.0 / (y * y) + 1.0 / (3.0 * y * y * y)
            }),
            term: a.clone(),
            from: 0,
        };
        Ok(Family::Factorable(
            SequenceFamily::terraced(self.name(), a)
                .with_rho_limit_zero(true)
                .with_square_tail(Arc::new(tail)),
        ))
    }
}

/// `w_n = 1`.
struct UnweightedShift;

impl FamilyBuilder for UnweightedShift {
    fn name(&self) -> &str {
        "shift-unweighted"
    }
    fn kind(&self) -> FamilyKind {
        FamilyKind::Shift
    }
    fn description(&self) -> &str {
        "unilateral shift, w_n = 1"
    }
    fn build(&self, _params: &Params) -> Result<Family> {
        Ok(Family::Shift(
            WeightSequence::new(self.name(), Arc::new(|_| Rational::one()))
                .with_ratio_behavior(RatioBehavior::Bounded(int(1))),
        ))
    }
}

/// `w_0 = 0`, `w_n = 1` for `n >= 1`.
struct ShiftZeroHead;

impl FamilyBuilder for ShiftZeroHead {
    fn name(&self) -> &str {
        "shift-zero-head"
    }
    fn kind(&self) -> FamilyKind {
        FamilyKind::Shift
    }
    fn description(&self) -> &str {
        "w_0 = 0, w_n = 1 for n >= 1 (noninjective, posinormal)"
    }
    fn build(&self, _params: &Params) -> Result<Family> {
        let w = Arc::new(|n: usize| if n == 0 { Rational::zero() } else { Rational::one() });
        Ok(Family::Shift(
            WeightSequence::new(self.name(), w)
                .with_zero_prefix(1)
                .with_ratio_behavior(RatioBehavior::Bounded(int(1))),
        ))
    }
}

/// `w_{2n} = 1`, `w_{2n+1} = 0`.
struct ShiftAlternatingZero;

impl FamilyBuilder for ShiftAlternatingZero {
    fn name(&self) -> &str {
        "shift-alternating-zero"
    }
    fn kind(&self) -> FamilyKind {
        FamilyKind::Shift
    }
    fn description(&self) -> &str {
        "w_2n = 1, w_2n+1 = 0 (not supraposinormal)"
    }
    fn build(&self, _params: &Params) -> Result<Family> {
        Ok(Family::Shift(WeightSequence::periodic(
            self.name(),
            vec![int(1), int(0)],
        )))
    }
}

/// `w_{2n} = 1`, and odd weights `1, 1/2, 1/3, ...`, i.e.
/// `w_{2n+1} = 1/(n+1)`.
struct ShiftHarmonicOdd;

impl FamilyBuilder for ShiftHarmonicOdd {
    fn name(&self) -> &str {
        "shift-harmonic-odd"
    }
    fn kind(&self) -> FamilyKind {
        FamilyKind::Shift
    }
    fn description(&self) -> &str {
        "w_2n = 1, w_2n+1 = 1/(n+1) (supraposinormal, neither posinormal nor coposinormal)"
    }
    fn build(&self, _params: &Params) -> Result<Family> {
        let w = Arc::new(|n: usize| {
            if n.is_multiple_of(2) {
                Rational::one()
            } else {
                ratio(1, (n / 2) as i64 + 1)
            }
        });
        // w_2n / w_2n+1 = n + 1
        Ok(Family::Shift(
            WeightSequence::new(self.name(), w).with_ratio_behavior(RatioBehavior::Unbounded),
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sequences::{make_family, make_shift, FamilyRegistry};

    fn p(k: &str, v: Rational) -> Params {
        [(k.to_string(), v)].into()
    }

    #[test]
    fn cesaro_entries() {
        let f = make_family("cesaro", &p("k", int(1))).unwrap();
        assert_eq!(f.a(0), int(1));
        assert_eq!(f.a(1), ratio(1, 2));
        assert_eq!(f.a(2), ratio(1, 3));
        assert_eq!(f.c(5), int(1));
        assert_eq!(f.rho(4), ratio(1, 5));
    }

    #[test]
    fn fibonacci_entries() {
        let f = make_family("fibonacci", &Params::new()).unwrap();
        assert_eq!(f.a(0), int(1));
        assert_eq!(f.c(0), int(1));
        assert_eq!(f.c(0) * f.a(0), int(1));
        assert_eq!(f.a(1), ratio(1, 2));
        assert_eq!(f.c(1), int(1));
        // f_3 = 2, f_4 = 3: rho_2 = 1/(f_3^3 f_4)
        assert_eq!(f.rho(2), ratio(1, 24));
    }

    #[test]
    fn toeplitz_entries() {
        let f = make_family("toeplitz", &p("r", ratio(1, 2))).unwrap();
        assert_eq!(f.a(3), ratio(1, 8));
        assert_eq!(f.c(3), int(8));
        assert_eq!(f.rho(3), ratio(1, 64));
        for k in 0..20 {
            assert_eq!(f.rho(k), pow(&ratio(1, 4), k as i64));
        }
    }

    #[test]
    fn q_cesaro_forms() {
        let f = make_family("q-cesaro", &p("q", int(2))).unwrap();
        assert_eq!(f.a(0), int(1));
        assert_eq!(f.a(1), ratio(1, 3));
        assert_eq!(f.c(2), int(4));
        let g = make_family("q-cesaro", &p("q", ratio(1, 2))).unwrap();
        assert_eq!(g.a(0), int(1));
        assert_eq!(g.a(1), ratio(1, 3)); // (1/2)(1/2)/(3/4)
        assert_eq!(g.c(2), int(4));
        for q in [ratio(3, 2), ratio(2, 5), int(3)] {
            let f = make_family("q-cesaro", &p("q", q.clone())).unwrap();
            for i in 0..40 {
                let qi = pow(&q, i + 1);
                let direct = (q.clone() - int(1)) / (qi - int(1));
                let expected = if q > int(1) { direct } else { direct * pow(&q, i) };
                assert_eq!(f.a(i as usize), expected, "q = {q}, i = {i}");
            }
        }
    }

    #[test]
    fn pow_stays_in_lowest_terms() {
        assert_eq!(pow(&ratio(-2, 3), 3), ratio(-8, 27));
        assert_eq!(pow(&ratio(-2, 3), -3), ratio(-27, 8));
        assert_eq!(pow(&ratio(-2, 3), -3).denom(), &num_bigint::BigInt::from(8));
        assert_eq!(pow(&ratio(5, 7), 0), int(1));
    }

    #[test]
    fn parameter_range_errors() {
        assert!(matches!(
            make_family("q-cesaro", &p("q", int(1))),
            Err(Error::ParamOutOfRange { .. })
        ));
        assert!(make_family("cesaro", &p("k", int(0))).is_err());
        assert!(make_family("toeplitz", &p("r", int(1))).is_err());
        assert!(matches!(
            make_family("toeplitz", &Params::new()),
            Err(Error::MissingParam { .. })
        ));
        assert!(matches!(
            make_family("nope", &Params::new()),
            Err(Error::UnknownFamily(_))
        ));
        assert!(make_family("cesaro", &p("zz", int(1))).is_err());
        assert!(matches!(
            make_family("shift-zero-head", &Params::new()),
            Err(Error::NotFactorable(_))
        ));
    }

    #[test]
    fn shift_weights() {
        let w = make_shift("shift-harmonic-odd", &Params::new()).unwrap();
        let got: Vec<_> = (0..6).map(|n| w.w(n)).collect();
        assert_eq!(got, vec![int(1), int(1), int(1), ratio(1, 2), int(1), ratio(1, 3)]);
        let e1 = make_shift("shift-zero-head", &Params::new()).unwrap();
        assert_eq!(e1.first_zero(10), Some(0));
    }

    #[test]
    fn catalog_families_validate() {
        let reg = FamilyRegistry::with_catalog();
        let cases: Vec<(&str, Params)> = vec![
            ("cesaro", p("k", ratio(1, 2))),
            ("cesaro", p("k", int(1))),
            ("cesaro", p("k", ratio(7, 3))),
            ("fibonacci", Params::new()),
            ("toeplitz", p("r", ratio(3, 4))),
            ("q-cesaro", p("q", ratio(3, 2))),
            ("q-cesaro", p("q", ratio(1, 3))),
            ("rhaly-counterexample", Params::new()),
        ];
        for (name, params) in cases {
            let f = reg.build(name, &params).unwrap().into_factorable().unwrap();
            f.validate(300).unwrap();
        }
    }
}
