//! Unnormalized expression trees and their reduction to [`ClosedForm`].

use super::form::ClosedForm;
use super::poly::Polynomial;
use super::ratfunc::RationalFunction;
use super::SymError;
use crate::exact::{BigRational, Session};

#[derive(Clone, Debug, PartialEq)]
pub enum RawExpr {
    Rational(RationalFunction),
    /// `H_{n+shift}^{(order)}`; any integer order, `shift` is 0 or 1.
    Harmonic { order: i64, shift: u8 },
    Sum(Vec<RawExpr>),
    Product(Vec<RawExpr>),
    Scale(BigRational, Box<RawExpr>),
}

impl RawExpr {
    pub fn poly(p: Polynomial) -> Self {
        Self::Rational(RationalFunction::from_poly(p))
    }

    pub fn int(v: i64) -> Self {
        Self::poly(Polynomial::from_i64(&[v]))
    }

    /// `H_n^{(order)}`.
    pub fn h_n(order: i64) -> Self {
        Self::Harmonic { order, shift: 0 }
    }

    /// `H_{n+1}^{(order)}`.
    pub fn h_n1(order: i64) -> Self {
        Self::Harmonic { order, shift: 1 }
    }

    pub fn neg(self) -> Self {
        Self::Scale(BigRational::from_integer((-1).into()), Box::new(self))
    }

    pub fn scaled(self, c: BigRational) -> Self {
        Self::Scale(c, Box::new(self))
    }

    pub fn times(self, other: RawExpr) -> Self {
        Self::Product(vec![self, other])
    }

    pub fn plus(self, other: RawExpr) -> Self {
        Self::Sum(vec![self, other])
    }

    pub fn minus(self, other: RawExpr) -> Self {
        Self::Sum(vec![self, other.neg()])
    }
}

impl From<&ClosedForm> for RawExpr {
    fn from(form: &ClosedForm) -> Self {
        RawExpr::Sum(
            form.terms()
                .map(|(mono, coeff)| {
                    let mut factors = vec![RawExpr::Rational(coeff.clone())];
                    factors.extend(mono.orders().iter().map(|&m| RawExpr::h_n1(m as i64)));
                    RawExpr::Product(factors)
                })
                .collect(),
        )
    }
}

/// Reduces `expr` to canonical form: nonpositive orders become Faulhaber
/// polynomials, `H_n^{(m)}` is rewritten as `H_{n+1}^{(m)} - (n+1)^{-m}`.
pub fn normalize(expr: &RawExpr, session: &mut Session) -> Result<ClosedForm, SymError> {
    match expr {
        RawExpr::Rational(c) => Ok(ClosedForm::rational(c.clone())),
        RawExpr::Harmonic { order, shift } => harmonic_leaf(*order, *shift, session),
        RawExpr::Sum(items) => items.iter().try_fold(ClosedForm::zero(), |acc, e| {
            Ok(acc.add(&normalize(e, session)?))
        }),
        RawExpr::Product(items) => items.iter().try_fold(ClosedForm::one(), |acc, e| {
            acc.mul(&normalize(e, session)?)
        }),
        RawExpr::Scale(c, inner) => Ok(normalize(inner, session)?.scale_rational(c)),
    }
}

fn harmonic_leaf(order: i64, shift: u8, session: &mut Session) -> Result<ClosedForm, SymError> {
    if shift > 1 {
        return Err(SymError::UnsupportedShift(shift));
    }
    if order <= 0 {
        let p = Polynomial::power_sum(order.unsigned_abs() as u32, session);
        let p = if shift == 1 { p.translate(1) } else { p };
        return Ok(ClosedForm::polynomial(p));
    }
    let order = u32::try_from(order).map_err(|_| SymError::OrderTooLarge(order))?;
    let symbol = ClosedForm::harmonic(order);
    if shift == 1 {
        return Ok(symbol);
    }
    let correction = RationalFunction::new(Polynomial::one(), Polynomial::linear(1, 1).pow(order))
        .expect("nonzero denominator");
    Ok(symbol.sub(&ClosedForm::rational(correction)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symexpr::form::HarmonicMonomial;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn poly(c: &[i64]) -> RationalFunction {
        RationalFunction::from_poly(Polynomial::from_i64(c))
    }

    #[test]
    fn negative_order_expands_to_faulhaber() {
        let mut s = Session::new();
        let f = normalize(&RawExpr::h_n(-1), &mut s).unwrap();
        let expected = Polynomial::from_coeffs(vec![rat(0, 1), rat(1, 2), rat(1, 2)]);
        assert_eq!(f, ClosedForm::polynomial(expected));
    }

    #[test]
    fn shift_rewrite_of_h_n() {
        let mut s = Session::new();
        let f = normalize(&RawExpr::h_n(1), &mut s).unwrap();
        let expected = ClosedForm::harmonic(1).add(&ClosedForm::rational(
            RationalFunction::new(Polynomial::from_i64(&[-1]), Polynomial::linear(1, 1)).unwrap(),
        ));
        assert_eq!(f, expected);
    }

    #[test]
    fn convolution_base_expansion() {
        let mut s = Session::new();
        let h = RawExpr::h_n1(1);
        let inner = RawExpr::Sum(vec![
            h.clone().minus(RawExpr::int(1)).times(h.minus(RawExpr::int(1))),
            RawExpr::h_n1(2).neg(),
            RawExpr::int(1),
        ]);
        let expr = RawExpr::poly(Polynomial::linear(1, 1)).times(inner);
        let f = normalize(&expr, &mut s).unwrap();
        assert_eq!(f.coeff(&HarmonicMonomial::pair(1, 1)), Some(&poly(&[1, 1])));
        assert_eq!(f.coeff(&HarmonicMonomial::single(1)), Some(&poly(&[-2, -2])));
        assert_eq!(f.coeff(&HarmonicMonomial::single(2)), Some(&poly(&[-1, -1])));
        assert_eq!(f.coeff(&HarmonicMonomial::unit()), Some(&poly(&[2, 2])));
        assert_eq!(f.len(), 4);
    }

    #[test]
    fn h_n_squared_has_genuine_denominators() {
        let mut s = Session::new();
        let f = normalize(&RawExpr::h_n(1).times(RawExpr::h_n(1)), &mut s).unwrap();
        assert!(!f.has_polynomial_coefficients());
        for n in 0..10 {
            let h = crate::exact::harmonic_exact(n, 1);
            assert_eq!(f.evaluate(n).unwrap(), &h * &h);
        }
    }

    #[test]
    fn degree_overflow_is_an_error() {
        let mut s = Session::new();
        let cube = RawExpr::Product(vec![RawExpr::h_n(1), RawExpr::h_n1(2), RawExpr::h_n(3)]);
        assert!(matches!(normalize(&cube, &mut s), Err(SymError::DegreeOverflow { .. })));
        // nonpositive orders are polynomials and do not count toward degree
        let ok = RawExpr::Product(vec![RawExpr::h_n(-2), RawExpr::h_n1(1), RawExpr::h_n(0), RawExpr::h_n1(1)]);
        assert!(normalize(&ok, &mut s).is_ok());
    }

    #[test]
    fn normalize_is_idempotent_on_embedding() {
        let mut s = Session::new();
        let expr = RawExpr::h_n(-3)
            .times(RawExpr::h_n(1).times(RawExpr::h_n(2)))
            .plus(RawExpr::h_n(2).scaled(rat(3, 7)));
        let once = normalize(&expr, &mut s).unwrap();
        let twice = normalize(&RawExpr::from(&once), &mut s).unwrap();
        assert_eq!(once, twice);
    }
}
