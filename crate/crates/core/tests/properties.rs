use harmsum::exact::{harmonic_exact, BigRational, Session};
use harmsum::sums::{Engine, Family, SumSpec};
use harmsum::symexpr::{
    form_from_json, normalize, parse_form, render, ClosedForm, Format, HarmonicMonomial, Polynomial, RawExpr,
    RationalFunction,
};
use num_traits::{One, Zero};
use proptest::prelude::*;

fn coeff() -> impl Strategy<Value = RationalFunction> {
    // denominators n + c with c >= 1 never vanish for n >= 0
    (prop::collection::vec(-5i64..=5, 1..=3), prop::option::of(1i64..=3)).prop_map(|(num, shift)| {
        let den = shift.map_or_else(Polynomial::one, |c| Polynomial::linear(1, c));
        RationalFunction::new(Polynomial::from_i64(&num), den).unwrap()
    })
}

/// Forms of harmonic degree at most one, so any product stays representable.
fn small_form() -> impl Strategy<Value = ClosedForm> {
    prop::collection::vec((prop::option::of(1u32..=3), coeff()), 0..=3).prop_map(|terms| {
        terms.into_iter().fold(ClosedForm::zero(), |acc, (order, c)| {
            let mono = order.map_or_else(HarmonicMonomial::unit, HarmonicMonomial::single);
            acc.add(&ClosedForm::term(mono, c))
        })
    })
}

fn raw_leaf() -> impl Strategy<Value = RawExpr> {
    prop_oneof![
        (-4i64..=4, -4i64..=4).prop_map(|(a, b)| RawExpr::poly(Polynomial::linear(a, b))),
        (-3i64..=3, 0u8..=1).prop_map(|(order, shift)| RawExpr::Harmonic { order, shift }),
    ]
}

fn harmonic_weight(e: &RawExpr) -> usize {
    match e {
        RawExpr::Rational(_) => 0,
        RawExpr::Harmonic { order, .. } => usize::from(*order > 0),
        RawExpr::Sum(v) => v.iter().map(harmonic_weight).max().unwrap_or(0),
        RawExpr::Product(v) => v.iter().map(harmonic_weight).sum(),
        RawExpr::Scale(_, inner) => harmonic_weight(inner),
    }
}

fn raw_expr() -> impl Strategy<Value = RawExpr> {
    raw_leaf()
        .prop_recursive(3, 16, 3, |inner| {
            prop_oneof![
                prop::collection::vec(inner.clone(), 1..=3).prop_map(RawExpr::Sum),
                prop::collection::vec(inner.clone(), 1..=2).prop_map(RawExpr::Product),
                (-3i64..=3, 1i64..=3, inner)
                    .prop_map(|(a, b, e)| e.scaled(BigRational::new(a.into(), b.into()))),
            ]
        })
        .prop_filter("harmonic degree <= 2", |e| harmonic_weight(e) <= 2)
}

/// Value of a raw tree at `n`, straight from the definitions.
fn eval_raw(e: &RawExpr, n: u64) -> BigRational {
    match e {
        RawExpr::Rational(rf) => rf.eval(&BigRational::from_integer(n.into())).unwrap(),
        RawExpr::Harmonic { order, shift } => harmonic_exact(n + *shift as u64, *order),
        RawExpr::Sum(v) => v.iter().map(|x| eval_raw(x, n)).fold(BigRational::zero(), |a, b| a + b),
        RawExpr::Product(v) => v.iter().map(|x| eval_raw(x, n)).fold(BigRational::one(), |a, b| a * b),
        RawExpr::Scale(c, inner) => c * eval_raw(inner, n),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn evaluation_is_a_ring_homomorphism(a in small_form(), b in small_form(), n in 0u64..=20) {
        let (va, vb) = (a.evaluate(n).unwrap(), b.evaluate(n).unwrap());
        prop_assert_eq!(a.add(&b).evaluate(n).unwrap(), &va + &vb);
        prop_assert_eq!(a.sub(&b).evaluate(n).unwrap(), &va - &vb);
        prop_assert_eq!(a.mul(&b).unwrap().evaluate(n).unwrap(), va * vb);
    }

    #[test]
    fn normalize_preserves_value(e in raw_expr(), n in 0u64..=12) {
        let mut session = Session::new();
        let form = normalize(&e, &mut session).unwrap();
        prop_assert_eq!(form.evaluate(n).unwrap(), eval_raw(&e, n));
    }

    #[test]
    fn normalize_is_idempotent(e in raw_expr()) {
        let mut session = Session::new();
        let once = normalize(&e, &mut session).unwrap();
        let twice = normalize(&RawExpr::from(&once), &mut session).unwrap();
        prop_assert_eq!(once, twice);
    }

    #[test]
    fn render_parse_round_trip(a in small_form(), b in small_form()) {
        let form = a.mul(&b).unwrap();
        let mut session = Session::new();
        for format in [Format::Plain, Format::Latex] {
            let text = render(&form, format);
            prop_assert_eq!(&parse_form(&text, &mut session).unwrap(), &form, "{}", text);
        }
        prop_assert_eq!(form_from_json(&render(&form, Format::Json)).unwrap(), form);
    }
}

fn all_specs() -> Vec<SumSpec> {
    let mut specs: Vec<SumSpec> = (0..=6).flat_map(|p| [SumSpec::power(p), SumSpec::r(p), SumSpec::s(p), SumSpec::t(p)]).collect();
    specs.extend((0..=4).flat_map(|p| (1..=3).map(move |m| SumSpec::f(p, m))));
    specs.extend([Family::ClassicA, Family::ClassicB, Family::ClassicC, Family::ClassicD].map(SumSpec::classic));
    specs
}

#[test]
fn synthesized_forms_round_trip_through_every_format() {
    let mut engine = Engine::new();
    let mut session = Session::new();
    for spec in all_specs() {
        let form = engine.synthesize(&spec).unwrap();
        for format in [Format::Plain, Format::Latex] {
            let text = render(&form, format);
            assert_eq!(parse_form(&text, &mut session).unwrap(), form, "{spec}: {text}");
        }
        assert_eq!(form_from_json(&render(&form, Format::Json)).unwrap(), form, "{spec}");
    }
}

#[test]
fn synthesis_is_deterministic_across_engines() {
    let mut warm = Engine::new();
    let specs = all_specs();
    // warm engine visits in reverse so its memo tables fill in a different order
    let warm_out: Vec<String> = specs
        .iter()
        .rev()
        .map(|s| render(&warm.synthesize(s).unwrap(), Format::Plain))
        .collect::<Vec<_>>()
        .into_iter()
        .rev()
        .collect();
    for (spec, want) in specs.iter().zip(warm_out) {
        let got = render(&Engine::new().synthesize(spec).unwrap(), Format::Plain);
        assert_eq!(got, want, "{spec}");
    }
}
