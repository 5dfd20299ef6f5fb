//! Brute-force reference values and whole-range verification.
//!
//! Nothing here goes through a closed form: sums are accumulated term by
//! term from a running table of harmonic numbers.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::exact::BigRational;
use crate::sums::{Engine, Family, SumError, SumSpec};
use crate::symexpr::{ClosedForm, SymError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("{family} is only defined for n >= {min}, got n = {n}")]
    Domain { family: Family, n: u64, min: u64 },
    #[error("index {index} outside the sequence range {start}..={end}")]
    Index { index: i64, start: i64, end: i64 },
    #[error("summation bounds out of order: a = {a} > b = {b}")]
    Bounds { a: i64, b: i64 },
    #[error(transparent)]
    Sum(#[from] SumError),
    #[error(transparent)]
    Algebra(#[from] SymError),
}

/// Numerators of `H_j^{(m)}`, `j = 0..=len-1`, over the shared denominator
/// `lcm(1..len-1)^m`. Keeping everything integral until the very end
/// avoids a gcd per term, which dominates at large `n`.
fn harmonic_table(len: u64, m: u32, ops: &mut u64) -> (Vec<BigInt>, BigInt) {
    let lcm = (1..len).fold(BigInt::one(), |acc, j| acc.lcm(&BigInt::from(j)));
    let den = lcm.pow(m);
    let mut table = Vec::with_capacity(len as usize);
    let mut acc = BigInt::zero();
    table.push(acc.clone());
    for j in 1..len {
        acc += &den / BigInt::from(j).pow(m);
        *ops += 1;
        table.push(acc.clone());
    }
    (table, den)
}

fn kpow(k: u64, p: u32) -> BigInt {
    // 0^0 = 1
    BigInt::from(k).pow(p)
}

/// Exact left-hand side of `spec` at `n`, by direct summation.
pub fn direct_sum(spec: &SumSpec, n: u64) -> Result<BigRational, OracleError> {
    let mut ops = 0;
    direct_sum_counted(spec, n, &mut ops)
}

/// As [`direct_sum`], also counting rational operations.
pub fn direct_sum_counted(spec: &SumSpec, n: u64, ops: &mut u64) -> Result<BigRational, OracleError> {
    spec.validate()?;
    let family = spec.family;
    if n < family.min_n() {
        return Err(OracleError::Domain { family, n, min: family.min_n() });
    }
    let p = spec.p;
    let (h, hden) = match family {
        Family::Power => (Vec::new(), BigInt::one()),
        Family::F => harmonic_table(n + 1, spec.m.expect("validated"), ops),
        _ => harmonic_table(n + 1, 1, ops),
    };
    let h = |j: u64| &h[j as usize];
    let mut total = BigInt::zero();
    let mut add = |term: BigInt, cost: u64| {
        total += term;
        *ops += cost + 1;
    };
    let den = match family {
        Family::Power => {
            for k in 1..=n {
                add(kpow(k, p), 1);
            }
            BigInt::one()
        }
        Family::F => {
            for k in 0..=n {
                add(kpow(k, p) * h(k), 2);
            }
            hden
        }
        Family::R => {
            for k in 0..=n {
                add(kpow(k, p) * h(k) * h(n - k), 3);
            }
            &hden * &hden
        }
        Family::S | Family::T => {
            for k in 0..=n {
                let hk = if family == Family::S { h(k) } else { h(n - k) };
                add(kpow(k, p) * hk * hk, 3);
            }
            &hden * &hden
        }
        Family::ClassicA | Family::ClassicB | Family::ClassicC | Family::ClassicD => {
            let (start, offset) = match family {
                Family::ClassicA | Family::ClassicC => (1, 0),
                _ => (0, 1),
            };
            let reversed = matches!(family, Family::ClassicC | Family::ClassicD);
            // weights 1/(k+offset) over lcm(1..=n+1)
            let wden = (1..=n + 1).fold(BigInt::one(), |acc, j| acc.lcm(&BigInt::from(j)));
            for k in start..=n {
                let weight = &wden / BigInt::from(k + offset);
                let hv = if reversed { h(n - k) } else { h(k) };
                add(weight * hv, 2);
            }
            wden * hden
        }
    };
    Ok(BigRational::new(total, den))
}

/// The first `n` at which closed form and direct sum disagree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mismatch {
    pub n: u64,
    pub expected: BigRational,
    pub got: BigRational,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerifyReport {
    pub spec: SumSpec,
    /// Inclusive range actually checked; empty when `n_max` is below the
    /// family's first admissible `n`.
    pub n_range: (u64, u64),
    pub first_failure: Option<Mismatch>,
}

impl VerifyReport {
    pub fn status(&self) -> Status {
        if self.first_failure.is_none() {
            Status::Pass
        } else {
            Status::Fail
        }
    }

    pub fn passed(&self) -> bool {
        self.status() == Status::Pass
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (lo, hi) = self.n_range;
        match &self.first_failure {
            None => write!(f, "PASS {} n={lo}..{hi}", self.spec.to_expr()),
            Some(m) => write!(
                f,
                "FAIL {} n={lo}..{hi}: first mismatch at n={}: expected {}, got {}",
                self.spec.to_expr(),
                m.n,
                m.expected,
                m.got
            ),
        }
    }
}

/// Synthesizes `spec` and checks it against [`direct_sum`] for every
/// admissible `n <= n_max`.
pub fn verify(engine: &mut Engine, spec: &SumSpec, n_max: u64) -> Result<VerifyReport, OracleError> {
    let form = engine.synthesize(spec)?;
    verify_form(spec, &form, n_max)
}

/// Checks a given closed form against [`direct_sum`], stopping at the first
/// mismatch.
pub fn verify_form(spec: &SumSpec, form: &ClosedForm, n_max: u64) -> Result<VerifyReport, OracleError> {
    let lo = spec.family.min_n();
    let mut report = VerifyReport {
        spec: *spec,
        n_range: (lo, n_max),
        first_failure: None,
    };
    for n in lo..=n_max {
        let expected = direct_sum(spec, n)?;
        let got = form.evaluate(n)?;
        if expected != got {
            report.first_failure = Some(Mismatch { n, expected, got });
            break;
        }
    }
    Ok(report)
}

/// A finite sequence indexed from `start`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sequence {
    pub start: i64,
    pub values: Vec<BigRational>,
}

impl Sequence {
    pub fn new(start: i64, values: Vec<BigRational>) -> Self {
        Self { start, values }
    }

    pub fn end(&self) -> i64 {
        self.start + self.values.len() as i64 - 1
    }

    pub fn get(&self, index: i64) -> Result<&BigRational, OracleError> {
        usize::try_from(index - self.start)
            .ok()
            .and_then(|i| self.values.get(i))
            .ok_or(OracleError::Index {
                index,
                start: self.start,
                end: self.end(),
            })
    }
}

/// Checks `sum_{k=a}^{b-1} x_k y_k = s_{b-1} y_b - sum_{k=a}^{b-1} s_k (y_{k+1} - y_k)`
/// with `s_k = sum_{i=a}^k x_i`.
pub fn summation_by_parts_check(x: &Sequence, y: &Sequence, a: i64, b: i64) -> Result<bool, OracleError> {
    if a > b {
        return Err(OracleError::Bounds { a, b });
    }
    y.get(b)?;
    let mut lhs = BigRational::zero();
    let mut partial = BigRational::zero();
    let mut correction = BigRational::zero();
    for k in a..b {
        let xk = x.get(k)?;
        let yk = y.get(k)?;
        lhs += xk * yk;
        partial += xk;
        correction += &partial * (y.get(k + 1)? - yk);
    }
    // partial is s_{b-1} (empty sum when a = b)
    let rhs = &partial * y.get(b)? - correction;
    Ok(lhs == rhs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::harmonic_exact;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn direct_sum_examples() {
        assert_eq!(direct_sum(&SumSpec::r(0), 3).unwrap(), rat(3, 1));
        assert_eq!(direct_sum(&SumSpec::s(0), 0).unwrap(), rat(0, 1));
        assert_eq!(direct_sum(&SumSpec::s(0), 2).unwrap(), rat(13, 4));
        assert_eq!(direct_sum(&SumSpec::classic(Family::ClassicA), 3).unwrap(), rat(85, 36));
        assert_eq!(direct_sum(&SumSpec::classic(Family::ClassicC), 3).unwrap(), rat(2, 1));
        assert_eq!(direct_sum(&SumSpec::t(1), 1).unwrap(), rat(0, 1));
        assert_eq!(direct_sum(&SumSpec::f(1, 1), 3).unwrap(), rat(19, 2));
        assert_eq!(direct_sum(&SumSpec::power(10), 2).unwrap(), rat(1025, 1));
    }

    #[test]
    fn domain_errors() {
        for fam in [Family::ClassicA, Family::ClassicC] {
            assert_eq!(
                direct_sum(&SumSpec::classic(fam), 0),
                Err(OracleError::Domain { family: fam, n: 0, min: 1 })
            );
        }
        assert!(direct_sum(&SumSpec::classic(Family::ClassicB), 0).is_ok());
    }

    #[test]
    fn harmonic_table_agrees_with_harmonic_exact() {
        let mut ops = 0;
        for m in 1..4 {
            let (t, den) = harmonic_table(30, m, &mut ops);
            for (j, v) in t.iter().enumerate() {
                let got = BigRational::new(v.clone(), den.clone());
                assert_eq!(got, harmonic_exact(j as u64, m as i64));
            }
        }
    }

    #[test]
    fn convolution_is_symmetric() {
        for n in 0..=40u64 {
            let reversed: BigRational = (0..=n)
                .map(|k| harmonic_exact(n - k, 1) * harmonic_exact(k, 1))
                .sum();
            assert_eq!(direct_sum(&SumSpec::r(0), n).unwrap(), reversed);
        }
    }

    #[test]
    fn reversal_readings_agree() {
        for p in 0..=5u32 {
            for n in 0..=40u64 {
                let other: BigRational = (0..=n)
                    .map(|k| {
                        let h = harmonic_exact(k, 1);
                        BigRational::from_integer(kpow(n - k, p)) * &h * &h
                    })
                    .sum();
                assert_eq!(direct_sum(&SumSpec::t(p), n).unwrap(), other, "p={p} n={n}");
            }
        }
    }

    #[test]
    fn verify_examples() {
        let mut e = Engine::new();
        assert!(verify(&mut e, &SumSpec::t(5), 30).unwrap().passed());
        assert!(verify(&mut e, &SumSpec::power(10), 100).unwrap().passed());
        let r = verify(&mut e, &SumSpec::r(0), 0).unwrap();
        assert!(r.passed());
        assert_eq!(r.n_range, (0, 0));
    }

    #[test]
    fn verify_reports_first_mismatch() {
        let mut e = Engine::new();
        let spec = SumSpec::s(1);
        let corrupted = e.synthesize(&spec).unwrap().add(&ClosedForm::polynomial(
            crate::symexpr::Polynomial::var().pow(3),
        ));
        let report = verify_form(&spec, &corrupted, 20).unwrap();
        assert_eq!(report.status(), Status::Fail);
        let m = report.first_failure.unwrap();
        assert_eq!(m.n, 1);
        assert_eq!(&m.got - &m.expected, rat(1, 1));
    }

    #[test]
    fn by_parts_examples() {
        let ones = Sequence::new(0, vec![rat(1, 1); 4]);
        assert!(summation_by_parts_check(&ones, &ones, 0, 3).unwrap());
        let h = Sequence::new(0, (0..=10).map(|k| harmonic_exact(k, 1)).collect());
        assert!(summation_by_parts_check(&h, &h, 0, 10).unwrap());
        assert!(summation_by_parts_check(&h, &h, 4, 4).unwrap());
    }

    #[test]
    fn by_parts_errors() {
        let short = Sequence::new(0, vec![rat(1, 1); 3]);
        assert!(matches!(
            summation_by_parts_check(&short, &short, 0, 3),
            Err(OracleError::Index { index: 3, .. })
        ));
        assert!(matches!(
            summation_by_parts_check(&short, &short, 2, 1),
            Err(OracleError::Bounds { .. })
        ));
        let shifted = Sequence::new(-2, vec![rat(1, 1); 6]);
        assert!(summation_by_parts_check(&shifted, &shifted, -2, 3).unwrap());
    }
}
