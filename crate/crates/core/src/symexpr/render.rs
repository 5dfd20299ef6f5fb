//! Plain-text, LaTeX and JSON rendering of closed forms.
//!
//! Each coefficient is printed as a rational constant times a product of
//! integer polynomial factors. Linear factors with rational roots are split
//! out; whatever remains is printed as one factor.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::form::{ClosedForm, HarmonicMonomial};
use super::poly::Polynomial;
use super::ratfunc::RationalFunction;
use crate::exact::BigRational;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Plain,
    Latex,
    Json,
}

impl FromStr for Format {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "plain" => Ok(Format::Plain),
            "latex" => Ok(Format::Latex),
            "json" => Ok(Format::Json),
            other => Err(format!("unknown format `{other}` (expected plain, latex or json)")),
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Plain => "plain",
            Format::Latex => "latex",
            Format::Json => "json",
        })
    }
}

pub fn render(form: &ClosedForm, format: Format) -> String {
    match format {
        Format::Plain => render_terms(form, Style::Plain),
        Format::Latex => render_terms(form, Style::Latex),
        Format::Json => serde_json::to_string(&to_json(form)).expect("json serialization"),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct JsonForm {
    pub terms: Vec<JsonTerm>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct JsonTerm {
    pub orders: Vec<u32>,
    pub num: Vec<String>,
    pub den: Vec<String>,
}

pub fn to_json(form: &ClosedForm) -> JsonForm {
    let coeffs = |p: &Polynomial| p.coeffs().iter().map(|c| c.to_string()).collect();
    JsonForm {
        terms: form
            .terms()
            .map(|(mono, c)| JsonTerm {
                orders: mono.orders().to_vec(),
                num: coeffs(c.numer()),
                den: coeffs(c.denom()),
            })
            .collect(),
    }
}

/// Rebuilds a form from its JSON rendering.
pub fn form_from_json(text: &str) -> Result<ClosedForm, String> {
    let json: JsonForm = serde_json::from_str(text).map_err(|e| e.to_string())?;
    let parse_poly = |cs: &[String]| -> Result<Polynomial, String> {
        cs.iter()
            .map(|c| BigRational::from_str(c).map_err(|e| format!("bad rational `{c}`: {e}")))
            .collect::<Result<Vec<_>, _>>()
            .map(Polynomial::from_coeffs)
    };
    let mut out = ClosedForm::zero();
    for term in &json.terms {
        let mono = HarmonicMonomial::new(term.orders.clone())
            .ok_or_else(|| format!("invalid orders {:?}", term.orders))?;
        let coeff = RationalFunction::new(parse_poly(&term.num)?, parse_poly(&term.den)?)
            .ok_or("zero denominator")?;
        out = out.add(&ClosedForm::term(mono, coeff));
    }
    Ok(out)
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Style {
    Plain,
    Latex,
}

fn render_terms(form: &ClosedForm, style: Style) -> String {
    if form.is_zero() {
        return "0".to_string();
    }
    let mut out = String::new();
    for (i, (mono, coeff)) in form.terms().enumerate() {
        let (negative, body) = render_term(mono, coeff, style);
        match (i, negative) {
            (0, true) => out.push('-'),
            (0, false) => {}
            (_, true) => out.push_str(" - "),
            (_, false) => out.push_str(" + "),
        }
        out.push_str(&body);
    }
    out
}

fn render_term(mono: &HarmonicMonomial, coeff: &RationalFunction, style: Style) -> (bool, String) {
    let (num_content, num_prim) = coeff.numer().primitive_part();
    let (den_content, den_prim) = coeff.denom().primitive_part();
    let scalar = num_content / den_content;
    let negative = scalar.is_negative();
    let scalar = scalar.abs();

    let num_factors = factor_strings(&num_prim, style);
    let den_factors = factor_strings(&den_prim, style);
    let mono_str = monomial_string(mono, style);

    let body = match style {
        Style::Plain => {
            let mut lead: Vec<String> = Vec::new();
            if !scalar.is_one() {
                lead.push(scalar.to_string());
            }
            lead.extend(num_factors);
            let mut s = if den_factors.is_empty() {
                lead.join("*")
            } else {
                let top = if lead.is_empty() { "1".to_string() } else { lead.join("*") };
                let bottom = if den_factors.len() == 1 {
                    den_factors[0].clone()
                } else {
                    format!("({})", den_factors.join("*"))
                };
                format!("{top}/{bottom}")
            };
            if let Some(m) = mono_str {
                if !s.is_empty() {
                    s.push('*');
                }
                s.push_str(&m);
            }
            if s.is_empty() {
                s.push('1');
            }
            s
        }
        Style::Latex => {
            let mut parts: Vec<String> = Vec::new();
            if !scalar.is_one() {
                parts.push(latex_rational(&scalar));
            }
            if den_factors.is_empty() {
                parts.extend(num_factors);
            } else {
                let top = if num_factors.is_empty() { "1".to_string() } else { num_factors.join(" ") };
                parts.push(format!("\\frac{{{top}}}{{{}}}", den_factors.join(" ")));
            }
            parts.extend(mono_str);
            if parts.is_empty() {
                parts.push("1".to_string());
            }
            parts.join(" ")
        }
    };
    (negative, body)
}

fn latex_rational(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("\\frac{{{}}}{{{}}}", r.numer(), r.denom())
    }
}

fn monomial_string(mono: &HarmonicMonomial, style: Style) -> Option<String> {
    let symbol = |m: u32| match (style, m) {
        (Style::Plain, 1) => "H(n+1)".to_string(),
        (Style::Plain, m) => format!("H(n+1,{m})"),
        (Style::Latex, 1) => "H_{n+1}".to_string(),
        (Style::Latex, m) => format!("H_{{n+1}}^{{({m})}}"),
    };
    match mono.orders() {
        [] => None,
        [a] => Some(symbol(*a)),
        [a, b] if a == b => Some(match (style, a) {
            (Style::Plain, _) => format!("{}^2", symbol(*a)),
            (Style::Latex, 1) => "H_{n+1}^{2}".to_string(),
            (Style::Latex, _) => format!("({})^{{2}}", symbol(*a)),
        }),
        [a, b] => Some(match style {
            Style::Plain => format!("{}*{}", symbol(*a), symbol(*b)),
            Style::Latex => format!("{} {}", symbol(*a), symbol(*b)),
        }),
        _ => unreachable!("monomial degree is capped at 2"),
    }
}

/// Factor strings for a primitive integer polynomial (positive leading
/// coefficient). Constants render as nothing.
fn factor_strings(prim: &[BigInt], style: Style) -> Vec<String> {
    factor_integer_poly(prim)
        .into_iter()
        .map(|(f, mult)| {
            let body = poly_string(&f, style);
            let is_monomial = f.len() == 2 && f[0].is_zero() && f[1].is_one();
            let base = if is_monomial { body } else { format!("({body})") };
            match (mult, style) {
                (1, _) => base,
                (k, Style::Plain) => format!("{base}^{k}"),
                (k, Style::Latex) => format!("{base}^{{{k}}}"),
            }
        })
        .collect()
}

fn poly_string(coeffs: &[BigInt], style: Style) -> String {
    let mut out = String::new();
    for (i, c) in coeffs.iter().enumerate().rev() {
        if c.is_zero() {
            continue;
        }
        let first = out.is_empty();
        if c.is_negative() {
            out.push('-');
        } else if !first {
            out.push('+');
        }
        let a = c.abs();
        let var = match (i, style) {
            (0, _) => String::new(),
            (1, _) => "n".to_string(),
            (k, Style::Plain) => format!("n^{k}"),
            (k, Style::Latex) => format!("n^{{{k}}}"),
        };
        if var.is_empty() {
            out.push_str(&a.to_string());
        } else if a.is_one() {
            out.push_str(&var);
        } else if style == Style::Plain {
            out.push_str(&format!("{a}*{var}"));
        } else {
            out.push_str(&format!("{a}{var}"));
        }
    }
    out
}

/// Splits a primitive integer polynomial into powers of `n`, linear factors
/// with rational roots, and one leftover factor. Constant factors are
/// dropped. Output is sorted by (degree, coefficients high to low).
fn factor_integer_poly(prim: &[BigInt]) -> Vec<(Vec<BigInt>, u32)> {
    let mut factors: BTreeMap<(usize, Vec<BigInt>), u32> = BTreeMap::new();
    let mut rest: Vec<BigInt> = prim.to_vec();
    let zeros = rest.iter().take_while(|c| c.is_zero()).count();
    if zeros > 0 {
        rest.drain(..zeros);
        *factors.entry(linear_key(&BigInt::zero(), &BigInt::one())).or_default() += zeros as u32;
    }
    if rest.len() > 2 {
        let candidates = root_candidates(&rest[0], rest.last().unwrap());
        for (a, b) in candidates {
            while rest.len() > 1 && eval_scaled(&rest, &a, &b).is_zero() {
                rest = divide_linear(&rest, &a, &b);
                *factors.entry(linear_key(&-a.clone(), &b)).or_default() += 1;
            }
        }
    }
    if rest.len() > 1 {
        let key = (rest.len() - 1, rest.iter().rev().cloned().collect());
        *factors.entry(key).or_default() += 1;
    }
    factors
        .into_iter()
        .map(|((_, high_to_low), m)| (high_to_low.into_iter().rev().collect(), m))
        .collect()
}

/// Key for `b*n + c`.
fn linear_key(c: &BigInt, b: &BigInt) -> (usize, Vec<BigInt>) {
    (1, vec![b.clone(), c.clone()])
}

/// `b^d * p(a/b)`, an integer.
fn eval_scaled(p: &[BigInt], a: &BigInt, b: &BigInt) -> BigInt {
    let d = p.len() - 1;
    let mut acc = BigInt::zero();
    let mut apow = BigInt::one();
    for (i, c) in p.iter().enumerate() {
        acc += c * &apow * num_traits::pow(b.clone(), d - i);
        apow *= a;
    }
    acc
}

/// Exact division of `p` by `b*n - a` (root `a/b`).
fn divide_linear(p: &[BigInt], a: &BigInt, b: &BigInt) -> Vec<BigInt> {
    // Synthetic division from the top: q_{i-1} = (p_i + a*q_i) / b
    let d = p.len() - 1;
    let mut q = vec![BigInt::zero(); d];
    let mut carry = BigInt::zero();
    for i in (1..=d).rev() {
        let coeff = &p[i] + &carry;
        debug_assert!(coeff.is_multiple_of(b));
        let qi = coeff / b;
        carry = a * &qi;
        q[i - 1] = qi;
    }
    q
}

/// Candidate rational roots `a/b` in lowest terms with `b > 0`, ordered by
/// denominator, then |numerator|, positive first.
fn root_candidates(constant: &BigInt, leading: &BigInt) -> Vec<(BigInt, BigInt)> {
    let nums = divisors(constant);
    let dens = divisors(leading);
    let mut out = Vec::new();
    for b in &dens {
        for a in &nums {
            if !a.gcd(b).is_one() {
                continue;
            }
            out.push((a.clone(), b.clone()));
            out.push((-a.clone(), b.clone()));
        }
    }
    out
}

/// Positive divisors of `|x|`. Exhaustive when `|x| <= 10^12`; for larger
/// values only divisors with a cofactor search bound of 10^6 are returned.
fn divisors(x: &BigInt) -> Vec<BigInt> {
    let x = x.abs();
    if x.is_zero() {
        return Vec::new();
    }
    let mut small = Vec::new();
    let mut large = Vec::new();
    if let Some(v) = x.to_u128() {
        let mut d: u128 = 1;
        while d * d <= v && d <= 1_000_000 {
            if v % d == 0 {
                small.push(BigInt::from(d));
                if d * d != v {
                    large.push(BigInt::from(v / d));
                }
            }
            d += 1;
        }
    } else {
        for d in 1u32..=10_000 {
            let db = BigInt::from(d);
            if (&x % &db).is_zero() {
                large.push(&x / &db);
                small.push(db);
            }
        }
    }
    large.reverse();
    small.extend(large);
    small.dedup();
    small
}
