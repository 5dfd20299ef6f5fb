//! Reader for closed-form expressions in `n`, accepting both the plain and
//! the LaTeX renderings.
//!
//! Plain: `1/6*n*(n+1)*(2*n+1)*H(n+1,2) - H(n)^2 + H(n,-3)`.
//! LaTeX: `\frac{1}{6} n (n+1) (2n+1) H_{n+1}^{(2)} - H_{n}^{2}`.
//! Juxtaposition multiplies. Division is only allowed by harmonic-free
//! factors. Harmonic arguments are `n` or `n+1`; orders may be negative.

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use thiserror::Error;

use super::form::ClosedForm;
use super::poly::Polynomial;
use super::raw::{normalize, RawExpr};
use super::SymError;
use crate::exact::{BigRational, Session};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormParseError {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error(transparent)]
    Algebra(#[from] SymError),
}

/// Parses and normalizes a closed-form expression.
pub fn parse_form(text: &str, session: &mut Session) -> Result<ClosedForm, FormParseError> {
    let raw = parse_raw(text, session)?;
    Ok(normalize(&raw, session)?)
}

pub fn parse_raw(text: &str, session: &mut Session) -> Result<RawExpr, FormParseError> {
    let tokens = lex(text)?;
    let mut parser = Parser {
        tokens,
        pos: 0,
        end: text.len(),
        session,
    };
    let expr = parser.expr()?;
    if let Some(t) = parser.tokens.get(parser.pos) {
        return Err(syntax(t.offset, format!("unexpected {:?}", t.kind)));
    }
    Ok(expr)
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Num(BigInt),
    N,
    H,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    LBrace,
    RBrace,
    Comma,
    Underscore,
    Frac,
}

#[derive(Debug, Clone)]
struct Token {
    kind: Tok,
    offset: usize,
}

fn syntax(offset: usize, message: impl Into<String>) -> FormParseError {
    FormParseError::Syntax {
        offset,
        message: message.into(),
    }
}

fn lex(text: &str) -> Result<Vec<Token>, FormParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let single = match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'+' => Some(Tok::Plus),
            b'-' => Some(Tok::Minus),
            b'*' => Some(Tok::Star),
            b'/' => Some(Tok::Slash),
            b'^' => Some(Tok::Caret),
            b'(' => Some(Tok::LParen),
            b')' => Some(Tok::RParen),
            b'{' => Some(Tok::LBrace),
            b'}' => Some(Tok::RBrace),
            b',' => Some(Tok::Comma),
            b'_' => Some(Tok::Underscore),
            b'n' => Some(Tok::N),
            b'H' => Some(Tok::H),
            _ => None,
        };
        if let Some(kind) = single {
            out.push(Token { kind, offset: start });
            i += 1;
            continue;
        }
        if c.is_ascii_digit() {
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            let value: BigInt = text[start..i].parse().expect("digits");
            out.push(Token {
                kind: Tok::Num(value),
                offset: start,
            });
            continue;
        }
        if c == b'\\' {
            i += 1;
            while i < bytes.len() && bytes[i].is_ascii_alphabetic() {
                i += 1;
            }
            match &text[start + 1..i] {
                "frac" | "dfrac" => out.push(Token {
                    kind: Tok::Frac,
                    offset: start,
                }),
                "cdot" | "times" => out.push(Token {
                    kind: Tok::Star,
                    offset: start,
                }),
                "left" | "right" => {}
                "" if i < bytes.len() && matches!(bytes[i], b',' | b';' | b' ') => i += 1,
                other => return Err(syntax(start, format!("unknown command `\\{other}`"))),
            }
            continue;
        }
        let ch = text[start..].chars().next().unwrap();
        return Err(syntax(start, format!("unexpected character `{ch}`")));
    }
    Ok(out)
}

struct Parser<'a> {
    tokens: Vec<Token>,
    pos: usize,
    end: usize,
    session: &'a mut Session,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.pos).map(|t| &t.kind)
    }

    fn peek_at(&self, k: usize) -> Option<&Tok> {
        self.tokens.get(self.pos + k).map(|t| &t.kind)
    }

    fn offset(&self) -> usize {
        self.tokens.get(self.pos).map_or(self.end, |t| t.offset)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.tokens.get(self.pos).map(|t| t.kind.clone());
        self.pos += 1;
        t
    }

    fn expect(&mut self, want: Tok) -> Result<(), FormParseError> {
        let at = self.offset();
        match self.bump() {
            Some(t) if t == want => Ok(()),
            Some(t) => Err(syntax(at, format!("expected {want:?}, found {t:?}"))),
            None => Err(syntax(at, format!("expected {want:?}, found end of input"))),
        }
    }

    fn expr(&mut self) -> Result<RawExpr, FormParseError> {
        let mut items = Vec::new();
        let mut negate = match self.peek() {
            Some(Tok::Minus) => {
                self.bump();
                true
            }
            Some(Tok::Plus) => {
                self.bump();
                false
            }
            _ => false,
        };
        loop {
            let t = self.term()?;
            items.push(if negate { t.neg() } else { t });
            negate = match self.peek() {
                Some(Tok::Plus) => false,
                Some(Tok::Minus) => true,
                _ => break,
            };
            self.bump();
        }
        Ok(if items.len() == 1 { items.pop().unwrap() } else { RawExpr::Sum(items) })
    }

    fn term(&mut self) -> Result<RawExpr, FormParseError> {
        let mut factors = vec![self.power()?];
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.bump();
                    factors.push(self.power()?);
                }
                Some(Tok::Slash) => {
                    self.bump();
                    let at = self.offset();
                    let divisor = self.power()?;
                    factors.push(self.reciprocal(&divisor, at)?);
                }
                Some(Tok::Num(_) | Tok::N | Tok::H | Tok::LParen | Tok::LBrace | Tok::Frac) => {
                    factors.push(self.power()?);
                }
                _ => break,
            }
        }
        Ok(if factors.len() == 1 { factors.pop().unwrap() } else { RawExpr::Product(factors) })
    }

    fn reciprocal(&mut self, divisor: &RawExpr, at: usize) -> Result<RawExpr, FormParseError> {
        let form = normalize(divisor, self.session)?;
        let rf = form
            .as_rational()
            .ok_or_else(|| syntax(at, "division by a harmonic expression"))?;
        let inv = rf.recip().ok_or_else(|| syntax(at, "division by zero"))?;
        Ok(RawExpr::Rational(inv))
    }

    fn power(&mut self) -> Result<RawExpr, FormParseError> {
        let base = self.primary()?;
        if self.peek() != Some(&Tok::Caret) {
            return Ok(base);
        }
        self.bump();
        let e = self.exponent()?;
        Ok(match e {
            0 => RawExpr::int(1),
            1 => base,
            e => RawExpr::Product(vec![base; e as usize]),
        })
    }

    fn exponent(&mut self) -> Result<u32, FormParseError> {
        let braced = self.peek() == Some(&Tok::LBrace);
        if braced {
            self.bump();
        }
        let e = self.small_int()?;
        if braced {
            self.expect(Tok::RBrace)?;
        }
        u32::try_from(e)
            .ok()
            .filter(|&e| e <= 64)
            .ok_or_else(|| syntax(self.offset(), "exponent must be between 0 and 64"))
    }

    fn small_int(&mut self) -> Result<i64, FormParseError> {
        let at = self.offset();
        match self.bump() {
            Some(Tok::Num(v)) => v.to_i64().ok_or_else(|| syntax(at, "integer too large")),
            _ => Err(syntax(at, "expected an integer")),
        }
    }

    fn signed_int(&mut self) -> Result<i64, FormParseError> {
        if self.peek() == Some(&Tok::Minus) {
            self.bump();
            return Ok(-self.small_int()?);
        }
        self.small_int()
    }

    fn primary(&mut self) -> Result<RawExpr, FormParseError> {
        let at = self.offset();
        match self.bump() {
            Some(Tok::Num(v)) => Ok(RawExpr::poly(Polynomial::constant(BigRational::from_integer(v)))),
            Some(Tok::N) => Ok(RawExpr::poly(Polynomial::var())),
            Some(Tok::LParen) => {
                let e = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(e)
            }
            Some(Tok::LBrace) => {
                let e = self.expr()?;
                self.expect(Tok::RBrace)?;
                Ok(e)
            }
            Some(Tok::Frac) => {
                self.expect(Tok::LBrace)?;
                let top = self.expr()?;
                self.expect(Tok::RBrace)?;
                self.expect(Tok::LBrace)?;
                let at = self.offset();
                let bottom = self.expr()?;
                self.expect(Tok::RBrace)?;
                Ok(RawExpr::Product(vec![top, self.reciprocal(&bottom, at)?]))
            }
            Some(Tok::H) => self.harmonic(),
            Some(t) => Err(syntax(at, format!("unexpected {t:?}"))),
            None => Err(syntax(at, "unexpected end of input")),
        }
    }

    fn harmonic(&mut self) -> Result<RawExpr, FormParseError> {
        match self.peek() {
            Some(Tok::LParen) => {
                self.bump();
                let shift = self.argument()?;
                let order = if self.peek() == Some(&Tok::Comma) {
                    self.bump();
                    self.signed_int()?
                } else {
                    1
                };
                self.expect(Tok::RParen)?;
                Ok(RawExpr::Harmonic { order, shift })
            }
            Some(Tok::Underscore) => {
                self.bump();
                let shift = if self.peek() == Some(&Tok::LBrace) {
                    self.bump();
                    let s = self.argument()?;
                    self.expect(Tok::RBrace)?;
                    s
                } else {
                    self.expect(Tok::N)?;
                    0
                };
                // ^{(m)} is an order; any other ^ is a power handled by the caller.
                let order = if self.peek() == Some(&Tok::Caret)
                    && self.peek_at(1) == Some(&Tok::LBrace)
                    && self.peek_at(2) == Some(&Tok::LParen)
                {
                    self.bump();
                    self.bump();
                    self.bump();
                    let m = self.signed_int()?;
                    self.expect(Tok::RParen)?;
                    self.expect(Tok::RBrace)?;
                    m
                } else {
                    1
                };
                Ok(RawExpr::Harmonic { order, shift })
            }
            _ => Err(syntax(self.offset(), "expected `(` or `_` after H")),
        }
    }

    /// `n` or `n+1`, returning the shift.
    fn argument(&mut self) -> Result<u8, FormParseError> {
        self.expect(Tok::N)?;
        if self.peek() != Some(&Tok::Plus) {
            return Ok(0);
        }
        self.bump();
        let at = self.offset();
        match self.bump() {
            Some(Tok::Num(v)) if v == BigInt::from(1) => Ok(1),
            Some(Tok::Num(v)) if v.is_zero() => Ok(0),
            _ => Err(syntax(at, "harmonic argument must be n or n+1")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::harmonic_exact;
    use crate::symexpr::render::{render, Format};

    fn parse(text: &str) -> ClosedForm {
        parse_form(text, &mut Session::new()).unwrap()
    }

    #[test]
    fn plain_and_latex_agree() {
        let a = parse("1/6*n*(n+1)*(2*n+1)*H(n+1,2) - H(n)^2 + H(n,-3)");
        let b = parse("\\frac{1}{6} n (n+1) (2n+1) H_{n+1}^{(2)} - H_{n}^{2} + H_n^{(-3)}");
        assert_eq!(a, b);
    }

    #[test]
    fn evaluates_like_the_text_says() {
        let f = parse("(n+1)*((H(n+1)-1)^2 - H(n+1,2) + 1)");
        assert_eq!(f.evaluate(3).unwrap(), BigRational::from_integer(3.into()));
        let g = parse("1/2*(H(n)^2 + H(n,2))");
        for n in 0..8 {
            let h = harmonic_exact(n, 1);
            let expected = (&h * &h + harmonic_exact(n, 2)) / BigRational::from_integer(2.into());
            assert_eq!(g.evaluate(n).unwrap(), expected);
        }
    }

    #[test]
    fn rejects_malformed_input() {
        let mut s = Session::new();
        assert!(matches!(parse_form("1 +", &mut s), Err(FormParseError::Syntax { offset: 3, .. })));
        assert!(matches!(parse_form("H(n+2)", &mut s), Err(FormParseError::Syntax { .. })));
        assert!(matches!(parse_form("1/H(n)", &mut s), Err(FormParseError::Syntax { .. })));
        assert!(matches!(parse_form("1/(n-n)", &mut s), Err(FormParseError::Syntax { .. })));
        assert!(matches!(parse_form("\\sqrt{n}", &mut s), Err(FormParseError::Syntax { offset: 0, .. })));
        assert!(matches!(
            parse_form("H(n)^3", &mut s),
            Err(FormParseError::Algebra(SymError::DegreeOverflow { .. }))
        ));
    }

    #[test]
    fn render_round_trip_small() {
        let f = parse("n^2/(n+1)^2*H(n+1)*H(n+1,3) - 7/3*H(n+1,2)^2 + (2*n-1)/(n*(n+2)) - 5");
        for fmt in [Format::Plain, Format::Latex] {
            assert_eq!(parse(&render(&f, fmt)), f, "{fmt}");
        }
    }
}
