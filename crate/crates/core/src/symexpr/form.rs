//! Canonical closed forms: rational-function combinations of products of at
//! most two generalized harmonic numbers, all taken at argument `n + 1`.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_traits::Zero;

use super::poly::Polynomial;
use super::ratfunc::RationalFunction;
use super::SymError;
use crate::exact::{harmonic_exact, BigRational};

/// Highest harmonic degree a monomial may carry.
pub const MAX_HARMONIC_DEGREE: usize = 2;

/// Sorted multiset of harmonic orders (each `>= 1`), at most two entries.
///
/// `{}` is the constant monomial, `{1}` is `H_{n+1}`, `{1, 2}` is
/// `H_{n+1} H_{n+1}^{(2)}`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct HarmonicMonomial {
    orders: Vec<u32>,
}

impl HarmonicMonomial {
    pub fn unit() -> Self {
        Self { orders: Vec::new() }
    }

    pub fn single(order: u32) -> Self {
        Self::new(vec![order]).expect("single order")
    }

    pub fn pair(a: u32, b: u32) -> Self {
        Self::new(vec![a, b]).expect("pair of orders")
    }

    /// `None` if there are more than two orders or any order is zero.
    pub fn new(mut orders: Vec<u32>) -> Option<Self> {
        if orders.len() > MAX_HARMONIC_DEGREE || orders.contains(&0) {
            return None;
        }
        orders.sort_unstable();
        Some(Self { orders })
    }

    pub fn orders(&self) -> &[u32] {
        &self.orders
    }

    pub fn degree(&self) -> usize {
        self.orders.len()
    }

    pub fn is_unit(&self) -> bool {
        self.orders.is_empty()
    }

    fn product(&self, other: &Self) -> Result<Self, SymError> {
        let degree = self.degree() + other.degree();
        if degree > MAX_HARMONIC_DEGREE {
            return Err(SymError::DegreeOverflow { degree });
        }
        let mut orders = self.orders.clone();
        orders.extend_from_slice(&other.orders);
        Ok(Self::new(orders).expect("degree checked"))
    }
}

/// Degree descending, then orders lexicographically.
impl Ord for HarmonicMonomial {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .degree()
            .cmp(&self.degree())
            .then_with(|| self.orders.cmp(&other.orders))
    }
}

impl PartialOrd for HarmonicMonomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for HarmonicMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.orders)
    }
}

/// Finite map from harmonic monomials to nonzero rational-function
/// coefficients. Two canonical forms are equal iff their maps are equal.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct ClosedForm {
    terms: BTreeMap<HarmonicMonomial, RationalFunction>,
}

impl ClosedForm {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::rational(RationalFunction::one())
    }

    pub fn rational(c: RationalFunction) -> Self {
        Self::term(HarmonicMonomial::unit(), c)
    }

    pub fn polynomial(p: Polynomial) -> Self {
        Self::rational(RationalFunction::from_poly(p))
    }

    pub fn term(mono: HarmonicMonomial, coeff: RationalFunction) -> Self {
        let mut out = Self::zero();
        out.accumulate(mono, coeff);
        out
    }

    /// `H_{n+1}^{(order)}`.
    pub fn harmonic(order: u32) -> Self {
        Self::term(HarmonicMonomial::single(order), RationalFunction::one())
    }

    pub fn terms(&self) -> impl Iterator<Item = (&HarmonicMonomial, &RationalFunction)> {
        self.terms.iter()
    }

    pub fn coeff(&self, mono: &HarmonicMonomial) -> Option<&RationalFunction> {
        self.terms.get(mono)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Largest monomial degree present; 0 for the zero form.
    pub fn harmonic_degree(&self) -> usize {
        self.terms.keys().map(HarmonicMonomial::degree).max().unwrap_or(0)
    }

    /// The form as a pure rational function, if it has no harmonic terms.
    pub fn as_rational(&self) -> Option<RationalFunction> {
        match self.terms.len() {
            0 => Some(RationalFunction::zero()),
            1 => self.terms.get(&HarmonicMonomial::unit()).cloned(),
            _ => None,
        }
    }

    /// Every coefficient has denominator 1.
    pub fn has_polynomial_coefficients(&self) -> bool {
        self.terms.values().all(RationalFunction::is_polynomial)
    }

    /// Distinct harmonic orders used anywhere in the form.
    pub fn orders_used(&self) -> BTreeSet<u32> {
        self.terms.keys().flat_map(|m| m.orders().iter().copied()).collect()
    }

    fn accumulate(&mut self, mono: HarmonicMonomial, coeff: RationalFunction) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.remove(&mono) {
            Some(existing) => {
                let sum = &existing + &coeff;
                if !sum.is_zero() {
                    self.terms.insert(mono, sum);
                }
            }
            None => {
                self.terms.insert(mono, coeff);
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.accumulate(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        Self {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }

    /// Multiplies every coefficient by `c`.
    pub fn scale(&self, c: &RationalFunction) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self {
            terms: self.terms.iter().map(|(m, a)| (m.clone(), a * c)).collect(),
        }
    }

    pub fn scale_rational(&self, c: &BigRational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self {
            terms: self.terms.iter().map(|(m, a)| (m.clone(), a.scale(c))).collect(),
        }
    }

    /// Distributed product. Fails if any pair of monomials would exceed
    /// harmonic degree 2.
    pub fn mul(&self, other: &Self) -> Result<Self, SymError> {
        let mut out = Self::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.accumulate(ma.product(mb)?, ca * cb);
            }
        }
        Ok(out)
    }

    /// Exact value at `n`, substituting `H_{n+1}^{(m)}` for each symbol.
    pub fn evaluate(&self, n: u64) -> Result<BigRational, SymError> {
        let mut ops = 0;
        self.evaluate_counted(n, &mut ops)
    }

    /// As [`ClosedForm::evaluate`], also counting rational operations.
    pub fn evaluate_counted(&self, n: u64, ops: &mut u64) -> Result<BigRational, SymError> {
        let harmonics: BTreeMap<u32, BigRational> = self
            .orders_used()
            .into_iter()
            .map(|m| {
                *ops += n + 1;
                (m, harmonic_exact(n + 1, m as i64))
            })
            .collect();
        let x = BigRational::from_integer(BigInt::from(n));
        let mut total = BigRational::zero();
        for (mono, coeff) in &self.terms {
            let mut value = coeff
                .eval_counted(&x, ops)
                .ok_or(SymError::PoleAtN { n })?;
            for m in mono.orders() {
                value *= &harmonics[m];
                *ops += 1;
            }
            total += value;
            *ops += 1;
        }
        Ok(total)
    }
}

impl fmt::Debug for ClosedForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.terms.iter()).finish()
    }
}
