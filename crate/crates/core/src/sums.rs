//! Closed-form synthesis for the supported sum families.
//!
//! | family     | sum                                   |
//! |------------|---------------------------------------|
//! | `Power`    | `sum_{k=1}^n k^p`                     |
//! | `F`        | `sum_{k=0}^n k^p H_k^{(m)}`           |
//! | `R`        | `sum_{k=0}^n k^p H_k H_{n-k}`         |
//! | `S`        | `sum_{k=0}^n k^p H_k^2`               |
//! | `T`        | `sum_{k=0}^n k^p H_{n-k}^2`           |
//! | `ClassicA` | `sum_{k=1}^n H_k / k`                 |
//! | `ClassicB` | `sum_{k=0}^n H_k / (k+1)`             |
//! | `ClassicC` | `sum_{k=1}^n H_{n-k} / k`             |
//! | `ClassicD` | `sum_{k=0}^n H_{n-k} / (k+1)`         |

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exact::{binomial, BigRational, Session};
use crate::symexpr::{normalize, ClosedForm, Polynomial, RationalFunction, RawExpr, SymError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Family {
    Power,
    F,
    R,
    S,
    T,
    ClassicA,
    ClassicB,
    ClassicC,
    ClassicD,
}

impl Family {
    pub const ALL: [Family; 9] = [
        Family::Power,
        Family::F,
        Family::R,
        Family::S,
        Family::T,
        Family::ClassicA,
        Family::ClassicB,
        Family::ClassicC,
        Family::ClassicD,
    ];

    pub fn is_classic(self) -> bool {
        matches!(self, Family::ClassicA | Family::ClassicB | Family::ClassicC | Family::ClassicD)
    }

    /// Smallest `n` at which the sum is defined by direct summation.
    pub fn min_n(self) -> u64 {
        match self {
            Family::ClassicA | Family::ClassicC => 1,
            _ => 0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Family::Power => "Power",
            Family::F => "F",
            Family::R => "R",
            Family::S => "S",
            Family::T => "T",
            Family::ClassicA => "ClassicA",
            Family::ClassicB => "ClassicB",
            Family::ClassicC => "ClassicC",
            Family::ClassicD => "ClassicD",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = SumError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Family::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| SumError::UnsupportedFamily(s.to_string()))
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SumError {
    #[error("unsupported family `{0}` (expected Power, F, R, S, T, ClassicA..ClassicD)")]
    UnsupportedFamily(String),
    #[error("invalid sum spec: {0}")]
    InvalidSpec(String),
    #[error(transparent)]
    Algebra(#[from] SymError),
}

/// Which sum to build: a family, the power `p` of `k`, and the harmonic
/// order `m` (family `F` only).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SumSpec {
    pub family: Family,
    pub p: u32,
    pub m: Option<u32>,
}

impl SumSpec {
    pub fn new(family: Family, p: u32, m: Option<u32>) -> Result<Self, SumError> {
        let spec = Self { family, p, m };
        spec.validate()?;
        Ok(spec)
    }

    pub fn power(p: u32) -> Self {
        Self { family: Family::Power, p, m: None }
    }

    pub fn f(p: u32, m: u32) -> Self {
        Self { family: Family::F, p, m: Some(m) }
    }

    pub fn r(p: u32) -> Self {
        Self { family: Family::R, p, m: None }
    }

    pub fn s(p: u32) -> Self {
        Self { family: Family::S, p, m: None }
    }

    pub fn t(p: u32) -> Self {
        Self { family: Family::T, p, m: None }
    }

    pub fn classic(family: Family) -> Self {
        assert!(family.is_classic(), "{family} is not a classic identity");
        Self { family, p: 0, m: None }
    }

    pub fn validate(&self) -> Result<(), SumError> {
        match (self.family, self.m) {
            (Family::F, None) => Err(SumError::InvalidSpec("family F needs an order m >= 1".into())),
            (Family::F, Some(0)) => Err(SumError::InvalidSpec("order m must be >= 1".into())),
            (Family::F, Some(_)) => Ok(()),
            (f, Some(_)) => Err(SumError::InvalidSpec(format!("family {f} takes no order m"))),
            (f, None) if f.is_classic() && self.p != 0 => {
                Err(SumError::InvalidSpec(format!("family {f} takes no power p")))
            }
            _ => Ok(()),
        }
    }

    /// A canonical input expression for this sum, in the CLI grammar.
    pub fn to_expr(&self) -> String {
        let kp = match self.p {
            0 => String::new(),
            1 => "k * ".to_string(),
            p => format!("k^{p} * "),
        };
        match self.family {
            Family::Power => match self.p {
                0 => "sum(k^0, k=1..n)".to_string(),
                1 => "sum(k, k=1..n)".to_string(),
                p => format!("sum(k^{p}, k=1..n)"),
            },
            Family::F => match self.m.unwrap_or(1) {
                1 => format!("sum({kp}H(k), k=0..n)"),
                m => format!("sum({kp}H(k,{m}), k=0..n)"),
            },
            Family::R => format!("sum({kp}H(k) * H(n-k), k=0..n)"),
            Family::S => format!("sum({kp}H(k)^2, k=0..n)"),
            Family::T => format!("sum({kp}H(n-k)^2, k=0..n)"),
            Family::ClassicA => "sum(1/k * H(k), k=1..n)".to_string(),
            Family::ClassicB => "sum(1/(k+1) * H(k), k=0..n)".to_string(),
            Family::ClassicC => "sum(1/k * H(n-k), k=1..n)".to_string(),
            Family::ClassicD => "sum(1/(k+1) * H(n-k), k=0..n)".to_string(),
        }
    }
}

impl fmt::Display for SumSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.family, self.m) {
            (fam, _) if fam.is_classic() => write!(f, "{fam}"),
            (fam, Some(m)) => write!(f, "{fam}(p={}, m={m})", self.p),
            (fam, None) => write!(f, "{fam}(p={})", self.p),
        }
    }
}

/// Memoizing closed-form synthesizer. Stored entries are canonical and
/// never replaced.
#[derive(Debug, Default)]
pub struct Engine {
    session: Session,
    faulhaber: HashMap<u32, ClosedForm>,
    master: HashMap<(u32, u32), ClosedForm>,
    conv: HashMap<u32, ClosedForm>,
    square: HashMap<u32, ClosedForm>,
}

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn binom(a: u32, b: u32) -> BigRational {
    BigRational::from_integer(binomial(a as u64, b as i64))
}

/// `(n+1)^e` as a rational-function coefficient.
fn n_plus_one_pow(e: u32) -> RationalFunction {
    RationalFunction::from_poly(Polynomial::linear(1, 1).pow(e))
}

impl Engine {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn session(&mut self) -> &mut Session {
        &mut self.session
    }

    pub fn normalize(&mut self, expr: &RawExpr) -> Result<ClosedForm, SymError> {
        normalize(expr, &mut self.session)
    }

    pub fn synthesize(&mut self, spec: &SumSpec) -> Result<ClosedForm, SumError> {
        spec.validate()?;
        Ok(match spec.family {
            Family::Power => self.faulhaber_closed(spec.p),
            Family::F => self.power_harmonic_sum(spec.p, spec.m.expect("validated"))?,
            Family::R => self.conv_power_sum(spec.p)?,
            Family::S => self.square_power_sum(spec.p)?,
            Family::T => self.reversed_square_power_sum(spec.p)?,
            f => self.classic_identity(f)?,
        })
    }

    /// `H_n^{(-p)} = sum_{k=1}^n k^p` as a polynomial form.
    pub fn faulhaber_closed(&mut self, p: u32) -> ClosedForm {
        if let Some(f) = self.faulhaber.get(&p) {
            return f.clone();
        }
        let form = ClosedForm::polynomial(Polynomial::power_sum(p, &mut self.session));
        self.faulhaber.insert(p, form.clone());
        form
    }

    /// `F(n, p, m) = sum_{k=0}^n k^p H_k^{(m)}`:
    ///
    /// ```text
    /// H_n^{(-p)} H_n^{(m)} + H_n^{(m-p)}
    ///   - 1/(p+1) sum_{k=1}^{p+1} C(p+1, k) B^+_{p-k+1} H_n^{(m-k)}
    /// ```
    pub fn power_harmonic_sum(&mut self, p: u32, m: u32) -> Result<ClosedForm, SumError> {
        if m == 0 {
            return Err(SumError::InvalidSpec("order m must be >= 1".into()));
        }
        if let Some(f) = self.master.get(&(p, m)) {
            return Ok(f.clone());
        }
        let (pi, mi) = (p as i64, m as i64);
        let mut tail = Vec::new();
        for k in 1..=p + 1 {
            let b = self.session.bernoulli_plus((p + 1 - k) as usize);
            if b.is_zero() {
                continue;
            }
            tail.push(RawExpr::h_n(mi - k as i64).scaled(binom(p + 1, k) * b));
        }
        let expr = RawExpr::Sum(vec![
            RawExpr::h_n(-pi).times(RawExpr::h_n(mi)),
            RawExpr::h_n(mi - pi),
            RawExpr::Sum(tail).scaled(-rat(1, pi + 1)),
        ]);
        let form = self.normalize(&expr)?;
        self.master.insert((p, m), form.clone());
        Ok(form)
    }

    pub fn classic_identity(&mut self, which: Family) -> Result<ClosedForm, SumError> {
        let h2 = |shift: u8| {
            RawExpr::Harmonic { order: 1, shift }.times(RawExpr::Harmonic { order: 1, shift })
        };
        let h_2 = |shift: u8| RawExpr::Harmonic { order: 2, shift };
        let expr = match which {
            Family::ClassicA => h2(0).plus(h_2(0)).scaled(rat(1, 2)),
            Family::ClassicB => h2(1).minus(h_2(1)).scaled(rat(1, 2)),
            Family::ClassicC => h2(0).minus(h_2(0)),
            Family::ClassicD => h2(1).minus(h_2(1)),
            other => return Err(SumError::UnsupportedFamily(format!("{other} is not a classic identity"))),
        };
        Ok(self.normalize(&expr)?)
    }

    /// `R(n, p) = sum_{k=0}^n k^p H_k H_{n-k}`.
    pub fn conv_power_sum(&mut self, p: u32) -> Result<ClosedForm, SumError> {
        if let Some(f) = self.conv.get(&p) {
            return Ok(f.clone());
        }
        let form = if p == 0 {
            // (n+1)[(H_{n+1} - 1)^2 - H_{n+1}^{(2)} + 1]
            let h = || RawExpr::h_n1(1).minus(RawExpr::int(1));
            let inner = RawExpr::Sum(vec![h().times(h()), RawExpr::h_n1(2).neg(), RawExpr::int(1)]);
            self.normalize(&RawExpr::poly(Polynomial::linear(1, 1)).times(inner))?
        } else {
            let n = RationalFunction::from_poly(Polynomial::var());
            let lead = ClosedForm::harmonic(1).scale(&(&n * &n_plus_one_pow(p))).neg();
            let mut acc = lead;
            for k in 0..p {
                let c = binom(p, k);
                let pk = (p - k) as i64;
                let w_r = &n - &RationalFunction::constant(rat(k as i64, pk + 1));
                let sign = if k % 2 == 0 { 1 } else { -1 };
                let w_f = &RationalFunction::one()
                    + &n_plus_one_pow(p - k - 1).scale(&rat(sign * pk, p as i64));
                let w_h = rat(pk, p as i64);
                let r_k = self.conv_power_sum(k)?;
                let f_k = self.power_harmonic_sum(k + 1, 1)?;
                let h_k = self.faulhaber_closed(k + 1);
                let bracket = r_k
                    .scale(&w_r)
                    .add(&f_k.scale(&w_f))
                    .add(&h_k.scale_rational(&w_h));
                acc = acc.add(&bracket.scale_rational(&c));
            }
            acc.scale_rational(&rat(1, p as i64 + 1))
        };
        self.conv.insert(p, form.clone());
        Ok(form)
    }

    /// `S(n, p) = sum_{k=0}^n k^p H_k^2`.
    pub fn square_power_sum(&mut self, p: u32) -> Result<ClosedForm, SumError> {
        if let Some(f) = self.square.get(&p) {
            return Ok(f.clone());
        }
        let form = if p == 0 {
            // (n+1) H_{n+1}^2 - (2n+3) H_{n+1} + 2(n+1)
            let expr = RawExpr::Sum(vec![
                RawExpr::poly(Polynomial::linear(1, 1)).times(RawExpr::h_n1(1).times(RawExpr::h_n1(1))),
                RawExpr::poly(Polynomial::linear(2, 3)).times(RawExpr::h_n1(1)).neg(),
                RawExpr::poly(Polynomial::linear(2, 2)),
            ]);
            self.normalize(&expr)?
        } else {
            // (n+1)[(n+1)^p (H^2 - H) - H + 1] with H = H_{n+1}
            let h = ClosedForm::harmonic(1);
            let hh = h.mul(&h)?;
            let lead = hh
                .sub(&h)
                .scale(&n_plus_one_pow(p))
                .sub(&h)
                .add(&ClosedForm::one())
                .scale(&n_plus_one_pow(1));
            let mut correction = ClosedForm::zero();
            for k in 0..p {
                let c = binom(p, k);
                let pk = (p - k) as i64;
                let w_s = rat(1, 1) + rat(k as i64, pk + 1);
                let w_f = rat(pk, k as i64 + 1) - rat(1, 1);
                let w_h = rat(pk, p as i64);
                let s_k = self.square_power_sum(k)?;
                let f_k = self.power_harmonic_sum(k + 1, 1)?;
                let h_k = self.faulhaber_closed(k + 1);
                let bracket = s_k
                    .scale_rational(&w_s)
                    .add(&f_k.scale_rational(&w_f))
                    .sub(&h_k.scale_rational(&w_h));
                correction = correction.add(&bracket.scale_rational(&c));
            }
            lead.sub(&correction).scale_rational(&rat(1, p as i64 + 1))
        };
        self.square.insert(p, form.clone());
        Ok(form)
    }

    /// `T(n, p) = sum_{k=0}^n k^p H_{n-k}^2
    ///          = sum_{k=0}^p (-1)^k C(p, k) n^{p-k} S(n, k)`.
    pub fn reversed_square_power_sum(&mut self, p: u32) -> Result<ClosedForm, SumError> {
        let mut acc = ClosedForm::zero();
        for k in 0..=p {
            let sign = if k % 2 == 0 { 1 } else { -1 };
            let weight = RationalFunction::from_poly(Polynomial::var().pow(p - k))
                .scale(&(binom(p, k) * rat(sign, 1)));
            acc = acc.add(&self.square_power_sum(k)?.scale(&weight));
        }
        Ok(acc)
    }

    /// Number of memoized entries across all tables.
    pub fn memo_len(&self) -> usize {
        self.faulhaber.len() + self.master.len() + self.conv.len() + self.square.len()
    }
}
