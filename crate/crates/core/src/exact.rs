//! Exact scalar arithmetic: binomials, Bernoulli numbers (plus convention),
//! generalized harmonic numbers and the Stirling cycle number `[n, 2]`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

pub use num_bigint::BigInt as BigInteger;
pub use num_rational::BigRational;

/// Binomial coefficient `C(a, b)`, zero outside `0 <= b <= a`.
pub fn binomial(a: u64, b: i64) -> BigInt {
    if b < 0 || b as u64 > a {
        return BigInt::zero();
    }
    let b = (b as u64).min(a - b as u64);
    let mut acc = BigInt::one();
    for i in 0..b {
        acc *= a - i;
        acc /= i + 1;
    }
    acc
}

/// Generalized harmonic number `H_n^{(m)} = sum_{k=1}^n k^{-m}`.
///
/// Negative orders give power sums, so `harmonic_exact(n, -p)` is the
/// plain sum of `k^p`.
pub fn harmonic_exact(n: u64, m: i64) -> BigRational {
    if m <= 0 {
        let p = m.unsigned_abs() as u32;
        let sum: BigInt = (1..=n).map(|k| BigInt::from(k).pow(p)).sum();
        return BigRational::from_integer(sum);
    }
    // Sum over the common denominator lcm(1..n)^m, reduce once.
    let lcm = (2..=n).fold(BigInt::one(), |acc, k| acc.lcm(&BigInt::from(k)));
    let den = lcm.pow(m as u32);
    let num: BigInt = (1..=n).map(|k| &den / BigInt::from(k).pow(m as u32)).sum();
    BigRational::new(num, den)
}

/// Unsigned Stirling number of the first kind `[n, 2]`, i.e. `(n-1)! H_{n-1}`
/// for `n > 0` and `0` for `n = 0`.
pub fn stirling_cycle2(n: u64) -> BigInt {
    if n == 0 {
        return BigInt::zero();
    }
    // [n,2] = (n-1)[n-1,2] + (n-2)!
    let mut cycles = BigInt::zero();
    let mut fact = BigInt::one(); // (j-2)! at step j
    for j in 2..=n {
        fact *= j.saturating_sub(2).max(1);
        cycles = cycles * (j - 1) + &fact;
    }
    cycles
}

/// Session-local caches for Bernoulli numbers and factorials.
///
/// Tables are append-only; entries never change once computed.
#[derive(Debug, Clone)]
pub struct Session {
    bernoulli: Vec<BigRational>,
    factorial: Vec<BigInt>,
}

impl Default for Session {
    fn default() -> Self {
        Self::new()
    }
}

impl Session {
    pub fn new() -> Self {
        Self {
            bernoulli: vec![BigRational::one()],
            factorial: vec![BigInt::one()],
        }
    }

    /// Bernoulli number with `B_1^+ = +1/2`, i.e. `(-1)^k B_k`.
    ///
    /// Extends the table through `sum_{j=0}^{m} C(m+1, j) B_j^+ = m + 1`.
    pub fn bernoulli_plus(&mut self, k: usize) -> BigRational {
        while self.bernoulli.len() <= k {
            let m = self.bernoulli.len();
            let mut rest = BigRational::zero();
            for (j, b) in self.bernoulli.iter().enumerate() {
                if !b.is_zero() {
                    rest += b * BigRational::from_integer(binomial(m as u64 + 1, j as i64));
                }
            }
            let mp1 = BigRational::from_integer(BigInt::from(m + 1));
            // C(m+1, m) = m+1
            let next = (&mp1 - rest) / &mp1;
            self.bernoulli.push(next);
        }
        self.bernoulli[k].clone()
    }

    pub fn factorial(&mut self, n: usize) -> BigInt {
        while self.factorial.len() <= n {
            let i = self.factorial.len();
            let next = &self.factorial[i - 1] * BigInt::from(i);
            self.factorial.push(next);
        }
        self.factorial[n].clone()
    }

    /// Number of cached Bernoulli entries.
    pub fn bernoulli_cached(&self) -> usize {
        self.bernoulli.len()
    }
}


#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    /// Akiyama-Tanigawa; yields B_n with B_1 = +1/2 directly.
    fn akiyama_tanigawa(n: usize) -> BigRational {
        let mut a: Vec<BigRational> = (0..=n).map(|m| rat(1, m as i64 + 1)).collect();
        for m in 0..=n {
            a[m] = rat(1, m as i64 + 1);
            for j in (1..=m).rev() {
                a[j - 1] = BigRational::from_integer(BigInt::from(j)) * (&a[j - 1] - &a[j]);
            }
        }
        a[0].clone()
    }

    #[test]
    fn binomial_values() {
        assert_eq!(binomial(5, 2), BigInt::from(10));
        assert_eq!(binomial(7, 0), BigInt::from(1));
        assert_eq!(binomial(4, 6), BigInt::from(0));
        assert_eq!(binomial(4, -1), BigInt::from(0));
        assert_eq!(binomial(60, 30), "118264581564861424".parse::<BigInt>().unwrap());
    }

    #[test]
    fn bernoulli_values() {
        let mut s = Session::new();
        assert_eq!(s.bernoulli_plus(0), rat(1, 1));
        assert_eq!(s.bernoulli_plus(1), rat(1, 2));
        assert_eq!(s.bernoulli_plus(4), rat(-1, 30));
        assert_eq!(s.bernoulli_plus(3), rat(0, 1));
        assert_eq!(s.bernoulli_plus(12), rat(-691, 2730));
    }

    #[test]
    fn bernoulli_matches_akiyama_tanigawa() {
        let mut s = Session::new();
        for k in 0..=20 {
            assert_eq!(s.bernoulli_plus(k), akiyama_tanigawa(k), "k={k}");
        }
    }

    #[test]
    fn bernoulli_recurrence_and_odd_zeros() {
        let mut s = Session::new();
        for m in 0..=12usize {
            let total: BigRational = (0..=m)
                .map(|j| BigRational::from_integer(binomial(m as u64 + 1, j as i64)) * s.bernoulli_plus(j))
                .sum();
            assert_eq!(total, rat(m as i64 + 1, 1));
        }
        for k in (3..=15).step_by(2) {
            assert!(s.bernoulli_plus(k).is_zero());
        }
    }

    #[test]
    fn bernoulli_cache_is_append_only() {
        let mut s = Session::new();
        let b6 = s.bernoulli_plus(6);
        assert_eq!(s.bernoulli_cached(), 7);
        s.bernoulli_plus(2);
        assert_eq!(s.bernoulli_cached(), 7);
        s.bernoulli_plus(10);
        assert_eq!(s.bernoulli_plus(6), b6);
    }

    #[test]
    fn harmonic_values() {
        assert_eq!(harmonic_exact(0, 5), rat(0, 1));
        assert_eq!(harmonic_exact(3, 1), rat(11, 6));
        assert_eq!(harmonic_exact(4, 2), rat(205, 144));
        assert_eq!(harmonic_exact(3, -1), rat(6, 1));
        assert_eq!(harmonic_exact(5, 0), rat(5, 1));
    }

    #[test]
    fn harmonic_step_property() {
        for m in -5i64..=5 {
            let mut prev = harmonic_exact(0, m);
            for n in 1..=200u64 {
                let cur = harmonic_exact(n, m);
                let step = BigRational::from_integer(n.into()).pow(-m as i32);
                assert_eq!(&cur - &prev, step, "n={n} m={m}");
                prev = cur;
            }
        }
    }

    #[test]
    fn stirling_values() {
        assert_eq!(stirling_cycle2(0), BigInt::from(0));
        assert_eq!(stirling_cycle2(1), BigInt::from(0));
        assert_eq!(stirling_cycle2(2), BigInt::from(1));
        assert_eq!(stirling_cycle2(3), BigInt::from(3));
        assert_eq!(stirling_cycle2(4), BigInt::from(11));
        let mut s = Session::new();
        for n in 1..=20u64 {
            let expected =
                BigRational::from_integer(s.factorial(n as usize - 1)) * harmonic_exact(n - 1, 1);
            assert!(expected.is_integer());
            assert_eq!(BigRational::from_integer(stirling_cycle2(n)), expected, "n={n}");
        }
    }

    #[test]
    fn factorial_cache() {
        let mut s = Session::new();
        assert_eq!(s.factorial(0), BigInt::from(1));
        assert_eq!(s.factorial(10), BigInt::from(3_628_800));
        assert_eq!(s.factorial(5), BigInt::from(120));
    }
}
