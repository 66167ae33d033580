//! Invariants over random and catalog instances.

mod common;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use posinorm::certificates::{
    corollary5_certify, shift_posinormal_conditions, theorem5_certify, theorem6_delta_search, Claim, Verdict,
};
use posinorm::dominance::dominance_quantity;
use posinorm::interrupters::{
    cesaro_pair, finite_section_instance, prop3_pair, prop5_pair, verify_pair_identity, verify_shift_identity,
    weighted_p_partial, InterrupterPair,
};
use posinorm::matrix::{build_factorable, build_shift, DiagonalOperator, TruncatedOperator};
use posinorm::numerics::compression::{CommutatorParts, OperatorSource};
use posinorm::numerics::gamma_estimate_with;
use posinorm::numerics::psd::{psd_check, PsdVerdict};
use posinorm::scalar::{format_rational, int, parse_rational, ratio, rational_to_f64};
use posinorm::sequences::{make_family, make_shift, Params, SequenceFamily, WeightSequence};
use posinorm::shifts::{classify_shift, kernel_witness};
use posinorm::Rational;
use proptest::prelude::*;

use common::{catalog_families, family};

fn rational() -> impl Strategy<Value = Rational> {
    (-40i64..=40, 1i64..=12).prop_map(|(p, q)| ratio(p, q))
}

fn positive_rational() -> impl Strategy<Value = Rational> {
    (1i64..=20, 1i64..=12).prop_map(|(p, q)| ratio(p, q))
}

fn square(n: usize) -> impl Strategy<Value = TruncatedOperator<Rational>> {
    prop::collection::vec(rational(), n * n)
        .prop_map(move |v| TruncatedOperator::from_fn(n, |i, j| v[i * n + j].clone()))
}

fn matrix_pair() -> impl Strategy<Value = (TruncatedOperator<Rational>, TruncatedOperator<Rational>)> {
    (1usize..=16).prop_flat_map(|n| (square(n), square(n)))
}

fn factorable_catalog() -> Vec<SequenceFamily> {
    catalog_families()
}

/// `rho_k > rho_{k+1}` by cross multiplication of the integer parts, which
/// avoids normalizing products of large fractions.
fn rho_strictly_decreases(a0: &Rational, c0: &Rational, a1: &Rational, c1: &Rational) -> bool {
    // a0 / c0 > a1 / c1 with every denominator positive and c0, c1 > 0
    let lhs: BigInt = a0.numer() * a1.denom() * c1.numer() * c0.denom();
    let rhs: BigInt = a1.numer() * a0.denom() * c0.numer() * c1.denom();
    lhs > rhs
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn adjoint_reverses_products((a, b) in matrix_pair()) {
        let ab = a.multiply(&b).unwrap();
        prop_assert_eq!(ab.adjoint(), b.adjoint().multiply(&a.adjoint()).unwrap());
    }

    #[test]
    fn scalar_field_laws(x in rational(), y in rational(), z in rational()) {
        prop_assert_eq!((x.clone() + y.clone()) + z.clone(), x.clone() + (y.clone() + z.clone()));
        prop_assert_eq!((x.clone() * y.clone()) * z.clone(), x.clone() * (y.clone() * z.clone()));
        prop_assert_eq!(x.clone() * (y.clone() + z.clone()), x.clone() * y + x * z);
    }

    #[test]
    fn rational_text_round_trips(x in rational()) {
        let text = format_rational(&x);
        prop_assert!(!text.ends_with("/1"));
        prop_assert_eq!(parse_rational(&text).unwrap(), x);
    }

    #[test]
    fn truncations_are_consistent(idx in 0usize..12, n in 1usize..=24, m in 1usize..=24) {
        let fam = &factorable_catalog()[idx];
        let (small, big) = (n.min(m), n.max(m));
        let full = build_factorable(fam, big).unwrap();
        prop_assert_eq!(full.compression(small).unwrap(), build_factorable(fam, small).unwrap());
        prop_assert!(full.is_lower_triangular());
    }

    #[test]
    fn ratio_pair_matches_closed_form_for_any_k(p in 1i64..=30, q in 1i64..=12) {
        let k = ratio(p, q);
        let built = prop5_pair(&family("cesaro", &[("k", k.clone())])).unwrap();
        let closed = cesaro_pair(&k);
        for i in 0..64 {
            prop_assert_eq!(built.q.entry(i), closed.q.entry(i));
            prop_assert_eq!(built.p.entry(i), closed.p.entry(i));
        }
    }

    #[test]
    fn partial_telescope(idx in 0usize..12, m in 0usize..=64, len in 0usize..=64) {
        let fam = &factorable_catalog()[idx];
        let pair = prop5_pair(fam).unwrap();
        let upto = (m + len).min(64);
        prop_assert_eq!(weighted_p_partial(fam, &pair, m, upto), fam.rho(m) - fam.rho(upto + 1));
    }

    #[test]
    fn scaling_preserves_the_pair_identity(idx in 0usize..12, alpha in rational()) {
        prop_assume!(!alpha.is_zero());
        let (m, q, p) = finite_section_instance(&factorable_catalog()[idx], 16).unwrap();
        prop_assert!(verify_pair_identity(&m.scale(&alpha), &q, &p).unwrap().pass);
    }

    #[test]
    fn adjoint_swaps_the_pair(idx in 0usize..12, j in 0usize..16, bump in rational()) {
        let (m, q, p) = finite_section_instance(&factorable_catalog()[idx], 16).unwrap();
        let q = if bump.is_zero() { q } else { q.with_override(j, q.entry(j) + bump) };
        let direct = verify_pair_identity(&m, &q, &p).unwrap().pass;
        let swapped = verify_pair_identity(&m.adjoint(), &p, &q).unwrap().pass;
        prop_assert_eq!(direct, swapped);
    }

    #[test]
    fn window_evidence_holds(
        d in prop::collection::vec(0i64..=1200, 8),
        n in 1usize..=8,
    ) {
        let pair = cesaro_pair(&int(2));
        let prefix: Vec<Rational> = d.iter().map(|&x| ratio(x, 600)).collect();
        let diag = DiagonalOperator::from_prefix("D", prefix.clone(), int(1));
        let cert = theorem5_certify(&pair.q, &pair.p, &diag, n, None);
        for e in &cert.evidence {
            prop_assert!(e.holds(), "{:?}", e);
        }
        let inside = (0..n).all(|i| pair.p.entry(i) <= prefix[i] && prefix[i] <= pair.q.entry(i));
        prop_assert_eq!(cert.verdict == Verdict::Falsified, !inside);
    }

    #[test]
    fn shift_identity_holds_for_injective_weights(w in prop::collection::vec(positive_rational(), 1..=6), p0 in positive_rational()) {
        let shift = WeightSequence::periodic("w", w);
        let pair = prop3_pair(&shift, &p0).unwrap();
        prop_assert!(verify_shift_identity(&shift, &pair, 24).unwrap().pass);
    }

    #[test]
    fn shift_classification_is_stable_under_doubling(
        w in prop::collection::vec((0u8..4, positive_rational()), 1..=5),
        n in 12usize..=24,
    ) {
        let values: Vec<Rational> = w.into_iter().map(|(z, v)| if z == 0 { Rational::zero() } else { v }).collect();
        let shift = WeightSequence::periodic("w", values);
        let small = classify_shift(&shift, n).unwrap();
        let big = classify_shift(&shift, 2 * n).unwrap();
        prop_assert_eq!(small.injective, big.injective);
        prop_assert_eq!(small.supraposinormal, big.supraposinormal);
        prop_assert_eq!(small.coposinormal_falsified, big.coposinormal_falsified);
        prop_assert_eq!(&small.ratio_sup, &big.ratio_sup);
    }

    #[test]
    fn kernel_evidence_matches_exact_kernels(
        w in prop::collection::vec((0u8..3, positive_rational()), 1..=4),
    ) {
        let values: Vec<Rational> = w.into_iter().map(|(z, v)| if z == 0 { Rational::zero() } else { v }).collect();
        let shift = WeightSequence::periodic("w", values);
        let n = 16;
        let class = classify_shift(&shift, n).unwrap();
        let report = kernel_witness(&build_shift(&shift, n).unwrap(), Some(n - 1));
        for e in class.kernel_evidence.iter().filter(|e| e.basis < n - 1) {
            prop_assert_eq!(e.in_ker_w, report.basis_in_ker_a.contains(&e.basis));
            prop_assert_eq!(e.in_ker_w_adjoint, report.basis_in_ker_adjoint.contains(&e.basis));
        }
    }

    #[test]
    fn bounded_ratio_makes_the_commutator_consistent(w in prop::collection::vec(positive_rational(), 1..=5)) {
        let shift = WeightSequence::periodic("w", w);
        let n = 20;
        let class = classify_shift(&shift, n).unwrap();
        let b = rational_to_f64(class.ratio_sup.as_ref().unwrap());
        let parts = CommutatorParts::new(&OperatorSource::Shift(shift), n, n).unwrap();
        let (m, tb) = parts.at(b);
        prop_assert_eq!(psd_check(&m, tb.spectral_error).unwrap().verdict, PsdVerdict::Consistent);
    }

    #[test]
    fn float_verdict_agrees_with_exact_shift_sign(
        w in prop::collection::vec(positive_rational(), 1..=5),
        g in prop::sample::select(vec![(1i64, 2i64), (1, 1), (3, 2), (2, 1)]),
    ) {
        let shift = WeightSequence::periodic("w", w);
        let n = 12;
        let gamma = ratio(g.0, g.1);
        let g2 = gamma.clone() * gamma.clone();
        let exact_min = (0..n)
            .map(|k| {
                let prev = if k == 0 { Rational::zero() } else { shift.w(k - 1) * shift.w(k - 1) };
                g2.clone() * shift.w(k) * shift.w(k) - prev
            })
            .min()
            .unwrap();
        let parts = CommutatorParts::new(&OperatorSource::Shift(shift), n, n).unwrap();
        let (m, tb) = parts.at(rational_to_f64(&gamma));
        let verdict = psd_check(&m, tb.spectral_error).unwrap().verdict;
        if !exact_min.is_negative() {
            prop_assert_eq!(verdict, PsdVerdict::Consistent);
        } else if exact_min < ratio(-1, 1_000_000) {
            prop_assert_eq!(verdict, PsdVerdict::Falsified);
        }
    }
}

#[test]
fn weighted_q_prefix_telescopes() {
    for fam in factorable_catalog() {
        let pair = prop5_pair(&fam).unwrap();
        let mut acc = Rational::zero();
        for m in 0..=256 {
            acc += fam.c(m) * fam.c(m) * pair.q.entry(m);
            assert_eq!(acc, fam.c(m) / fam.a(m), "{} at m = {m}", fam.name);
        }
    }
}

#[test]
fn rho_gaps_stay_positive() {
    for fam in factorable_catalog().into_iter().filter(|f| f.rho_limit_zero) {
        let (mut a0, mut c0) = (fam.a(0), fam.c(0));
        for k in 0..10_000 {
            let (a1, c1) = (fam.a(k + 1), fam.c(k + 1));
            assert!(rho_strictly_decreases(&a0, &c0, &a1, &c1), "{} at k = {k}", fam.name);
            (a0, c0) = (a1, c1);
        }
    }
}

#[test]
fn delta_interval_shrinks_as_k_max_grows() {
    for fam in factorable_catalog() {
        let mut prev: Option<(Option<Rational>, Option<Rational>)> = None;
        for k_max in [4, 8, 16, 32, 64, 128, 256, 512] {
            let iv = theorem6_delta_search(&fam, k_max).unwrap();
            let (lo, hi) = (iv.lower.value.clone(), iv.upper.value.clone());
            if let Some((plo, phi)) = &prev {
                assert!(lo >= *plo, "{} lower fell at {k_max}", fam.name);
                if let (Some(h), Some(ph)) = (&hi, phi) {
                    assert!(h <= ph, "{} upper rose at {k_max}", fam.name);
                }
            }
            prev = Some((lo, hi));
        }
    }
}

#[test]
fn feasible_delta_satisfies_every_constraint() {
    let k_max = 128;
    for fam in factorable_catalog() {
        let iv = theorem6_delta_search(&fam, k_max).unwrap();
        if !iv.feasible {
            continue;
        }
        let delta = iv.lower.value.clone().unwrap();
        let pair = prop5_pair(&fam).unwrap();
        for k in 0..=k_max {
            assert!(delta.clone() * pair.q.entry(k) >= int(1), "{} q_{k}", fam.name);
            assert!(delta.clone() * pair.p.entry(k) <= int(1), "{} p_{k}", fam.name);
        }
    }
}

#[test]
fn certificate_evidence_always_holds() {
    for fam in factorable_catalog() {
        let pair = prop5_pair(&fam).unwrap();
        for claim in [Claim::Posinormal, Claim::Coposinormal, Claim::Hyponormal] {
            let cert = corollary5_certify(&pair, claim, 64, fam.declared_bounds.as_ref()).unwrap();
            assert!(cert.evidence.iter().all(|e| e.holds()), "{} {claim:?}", fam.name);
        }
        let cert = theorem6_delta_search(&fam, 64).unwrap().certificate();
        assert!(cert.evidence.iter().all(|e| e.holds()), "{} delta search", fam.name);
    }
    for name in [
        "shift-unweighted",
        "shift-zero-head",
        "shift-alternating-zero",
        "shift-harmonic-odd",
    ] {
        let w = make_shift(name, &Params::new()).unwrap();
        for n_zero in [-1, 0, 1] {
            if let Ok(cert) = shift_posinormal_conditions(&w, n_zero, 64) {
                assert!(cert.evidence.iter().all(|e| e.holds()), "{name} n_zero = {n_zero}");
            }
        }
    }
}

#[test]
fn certified_hyponormal_families_pass_the_numeric_check() {
    let mut checked = 0;
    for fam in factorable_catalog() {
        let pair = prop5_pair(&fam).unwrap();
        let cert = corollary5_certify(&pair, Claim::Hyponormal, 256, fam.declared_bounds.as_ref()).unwrap();
        if cert.verdict != Verdict::Certified {
            continue;
        }
        let parts = CommutatorParts::new(&OperatorSource::Factorable(fam.clone()), 64, 1 << 14).unwrap();
        for n in [8, 16, 32, 64] {
            let (m, tb) = parts.leading(n).unwrap().at(1.0);
            let rep = psd_check(&m, tb.spectral_error).unwrap();
            assert_eq!(rep.verdict, PsdVerdict::Consistent, "{} at n = {n}", fam.name);
        }
        checked += 1;
    }
    assert!(checked > 0);
}

#[test]
fn falsification_persists_as_the_window_grows() {
    for k in [ratio(1, 2), ratio(1, 3), ratio(3, 4)] {
        let src = OperatorSource::Factorable(family("cesaro", &[("k", k.clone())]));
        let parts = CommutatorParts::new(&src, 64, 1 << 14).unwrap();
        let mut seen = false;
        for n in 1..=64 {
            let (m, tb) = parts.leading(n).unwrap().at(1.0);
            let falsified = psd_check(&m, tb.spectral_error).unwrap().verdict == PsdVerdict::Falsified;
            assert!(!seen || falsified, "k = {k} flipped back at n = {n}");
            seen |= falsified;
        }
        assert!(seen, "k = {k} never falsified");
    }
}

#[test]
fn gamma_estimate_is_monotone_in_n() {
    let sources = [
        OperatorSource::Factorable(family("cesaro", &[("k", ratio(1, 2))])),
        OperatorSource::Factorable(family("toeplitz", &[("r", ratio(1, 2))])),
        OperatorSource::Factorable(family("fibonacci", &[])),
        OperatorSource::Shift(make_shift("shift-harmonic-odd", &Params::new()).unwrap()),
    ];
    for src in &sources {
        let parts = CommutatorParts::new(src, 32, 1 << 14).unwrap();
        let mut prev = 0.0f64;
        for n in [2, 4, 8, 16, 32] {
            let g = gamma_estimate_with(&parts.leading(n).unwrap(), posinorm::numerics::psd::SLACK_FACTOR)
                .unwrap()
                .gamma
                .unwrap_or(f64::INFINITY);
            assert!(g >= prev * (1.0 - 1e-6), "{} at n = {n}: {g} < {prev}", src.name());
            prev = g;
        }
    }
}

#[test]
fn fibonacci_ratios_bracket_the_golden_ratio() {
    let fib = make_family("fibonacci", &Params::new()).unwrap();
    let below_phi = |x: &Rational| x.clone() * x.clone() < x.clone() + int(1);
    let mut last_odd: Option<Rational> = None;
    let mut last_even: Option<Rational> = None;
    for n in 3..=40 {
        let v = dominance_quantity(&fib, n).unwrap().value;
        if n % 2 == 1 {
            assert!(below_phi(&v), "n = {n}");
            assert!(last_odd.as_ref().is_none_or(|p| &v > p));
            last_odd = Some(v);
        } else {
            assert!(!below_phi(&v), "n = {n}");
            assert!(last_even.as_ref().is_none_or(|p| &v < p));
            last_even = Some(v);
        }
    }
}

#[test]
fn dominance_recompute_matches() {
    for fam in factorable_catalog() {
        for n in 3..=20 {
            let rep = dominance_quantity(&fam, n).unwrap();
            assert_eq!(rep.recompute(), rep.value, "{} at n = {n}", fam.name);
            assert_eq!(rep.exceeds_one, rep.value > int(1));
        }
    }
}

#[test]
fn ratio_pairs_are_positive_on_the_scan() {
    for fam in factorable_catalog() {
        let pair: InterrupterPair = prop5_pair(&fam).unwrap();
        pair.q.check(256).unwrap();
        pair.p.check(256).unwrap();
    }
}

/// With `Q = P` the shifted residual is `-r [(A - A*)Q - Q(A - A*)]`, so
/// the identity survives every shift exactly when `A - A*` commutes with `Q`.
#[test]
fn equal_pair_shifts_iff_skew_part_commutes() {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
    let mut seen = [0usize; 2];
    for t in 0..60 {
        let (a, q, p) = common::normal_instance(&mut rng, t % 2 == 0);
        let n = a.n();
        let skew = a.sub(&a.adjoint()).unwrap();
        let qm = q.to_matrix(n);
        let commutes = skew.multiply(&qm).unwrap() == qm.multiply(&skew).unwrap();
        for r in [ratio(1, 2), int(-3), ratio(7, 5)] {
            let rep = posinorm::interrupters::verify_shifted_identity(&a, &q, &p, &r).unwrap();
            assert!(
                rep.base_holds && rep.expansion_holds && rep.equivalence_holds,
                "instance {t}"
            );
            assert_eq!(rep.shifted_holds, commutes, "instance {t}, r = {r}");
        }
        seen[commutes as usize] += 1;
    }
    assert!(seen[0] > 0 && seen[1] > 0, "{seen:?}");
}
