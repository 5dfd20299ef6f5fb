//! The `harmsum` command line: sum-expression parsing and subcommands.
//!
//! Sum expressions follow
//!
//! ```text
//! sum      := "sum" "(" term "," range ")"
//! term     := factor { "*" factor }
//! factor   := "k" ["^" INT] | "1/k" | "1/(k+1)" | harm ["^" INT]
//! harm     := "H(" arg ["," INT] ")"
//! arg      := "k" | "n-k"
//! range    := "k=0..n" | "k=1..n"
//! ```
//!
//! and are matched onto one of the families in [`crate::sums`].

use std::fmt::Write as _;
use std::time::Instant;

use clap::{Parser, Subcommand};
use num_traits::ToPrimitive;
use serde_json::json;
use thiserror::Error;

use crate::exact::BigRational;
use crate::oracle::{direct_sum_counted, verify_form, OracleError};
use crate::sums::{Engine, Family, SumError, SumSpec};
use crate::symexpr::render::to_json;
use crate::symexpr::{render, ClosedForm, Format};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_SYNTAX: i32 = 2;
pub const EXIT_UNSUPPORTED: i32 = 3;

const SUPPORTED_SHAPES: &str = "supported sums: k^p (k=1..n, or k=0..n with p >= 1); \
k^p * H(k,m); k^p * H(k) * H(n-k); k^p * H(k)^2; k^p * H(n-k)^2; \
1/k * H(k) and 1/k * H(n-k) with k=1..n; 1/(k+1) * H(k) and 1/(k+1) * H(n-k) with k=0..n";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpecParseError {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unsupported sum: {reason}; {SUPPORTED_SHAPES}")]
    Unsupported { reason: String },
}

impl SpecParseError {
    pub fn exit_code(&self) -> i32 {
        match self {
            SpecParseError::Syntax { .. } => EXIT_SYNTAX,
            SpecParseError::Unsupported { .. } => EXIT_UNSUPPORTED,
        }
    }
}

fn unsupported(reason: impl Into<String>) -> SpecParseError {
    SpecParseError::Unsupported { reason: reason.into() }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Weight {
    /// `1/k`
    Reciprocal,
    /// `1/(k+1)`
    ReciprocalShifted,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum HarmonicArg {
    K,
    NMinusK,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HarmonicFactor {
    pub arg: HarmonicArg,
    pub order: u32,
    pub power: u32,
}

/// Parsed summand before family matching.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SumExprAst {
    pub k_power: u32,
    pub weights: Vec<Weight>,
    pub harmonics: Vec<HarmonicFactor>,
    /// 0 or 1.
    pub range_start: u8,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Word(String),
    Int(u64),
    LParen,
    RParen,
    Comma,
    Star,
    Caret,
    Slash,
    Plus,
    Minus,
    Eq,
    DotDot,
}

fn syntax(offset: usize, message: impl Into<String>) -> SpecParseError {
    SpecParseError::Syntax { offset, message: message.into() }
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, SpecParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let start = i;
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        if c.is_ascii_alphabetic() {
            while i < bytes.len() && bytes[i].is_ascii_alphabetic() {
                i += 1;
            }
            out.push((Tok::Word(text[start..i].to_string()), start));
            continue;
        }
        if c.is_ascii_digit() {
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            let v = text[start..i]
                .parse()
                .map_err(|_| syntax(start, "integer too large"))?;
            out.push((Tok::Int(v), start));
            continue;
        }
        let tok = match c {
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b',' => Tok::Comma,
            b'*' => Tok::Star,
            b'^' => Tok::Caret,
            b'/' => Tok::Slash,
            b'+' => Tok::Plus,
            b'-' => Tok::Minus,
            b'=' => Tok::Eq,
            b'.' if bytes.get(i + 1) == Some(&b'.') => {
                i += 1;
                Tok::DotDot
            }
            _ => {
                let ch = text[start..].chars().next().unwrap();
                return Err(syntax(start, format!("unexpected character `{ch}`")));
            }
        };
        i += 1;
        out.push((tok, start));
    }
    Ok(out)
}

struct SpecParser {
    tokens: Vec<(Tok, usize)>,
    pos: usize,
    end: usize,
}

impl SpecParser {
    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.pos).map(|(t, _)| t)
    }

    fn offset(&self) -> usize {
        self.tokens.get(self.pos).map_or(self.end, |(_, o)| *o)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.peek().cloned();
        self.pos += 1;
        t
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<(), SpecParseError> {
        let at = self.offset();
        match self.next() {
            Some(t) if t == want => Ok(()),
            _ => Err(syntax(at, format!("expected {what}"))),
        }
    }

    fn word(&mut self, w: &str) -> Result<(), SpecParseError> {
        self.expect(Tok::Word(w.to_string()), &format!("`{w}`"))
    }

    fn int(&mut self) -> Result<u64, SpecParseError> {
        let at = self.offset();
        match self.next() {
            Some(Tok::Int(v)) => Ok(v),
            _ => Err(syntax(at, "expected an integer")),
        }
    }

    fn small_int(&mut self) -> Result<u32, SpecParseError> {
        let at = self.offset();
        let v = self.int()?;
        u32::try_from(v).map_err(|_| syntax(at, "integer too large"))
    }

    fn sum(&mut self) -> Result<SumExprAst, SpecParseError> {
        self.word("sum")?;
        self.expect(Tok::LParen, "`(`")?;
        let mut ast = SumExprAst::default();
        self.factor(&mut ast)?;
        while self.peek() == Some(&Tok::Star) {
            self.next();
            self.factor(&mut ast)?;
        }
        self.expect(Tok::Comma, "`,` before the range")?;
        ast.range_start = self.range()?;
        self.expect(Tok::RParen, "`)`")?;
        if self.pos < self.tokens.len() {
            return Err(syntax(self.offset(), "trailing input after `)`"));
        }
        Ok(ast)
    }

    fn factor(&mut self, ast: &mut SumExprAst) -> Result<(), SpecParseError> {
        let at = self.offset();
        match self.next() {
            Some(Tok::Word(w)) if w == "k" => {
                let e = if self.peek() == Some(&Tok::Caret) {
                    self.next();
                    self.small_int()?
                } else {
                    1
                };
                ast.k_power = ast
                    .k_power
                    .checked_add(e)
                    .ok_or_else(|| syntax(at, "exponent too large"))?;
            }
            Some(Tok::Int(1)) => {
                self.expect(Tok::Slash, "`/` after 1")?;
                let w = match self.next() {
                    Some(Tok::Word(w)) if w == "k" => Weight::Reciprocal,
                    Some(Tok::LParen) => {
                        self.word("k")?;
                        self.expect(Tok::Plus, "`+`")?;
                        let one_at = self.offset();
                        if self.int()? != 1 {
                            return Err(syntax(one_at, "expected `1/(k+1)`"));
                        }
                        self.expect(Tok::RParen, "`)`")?;
                        Weight::ReciprocalShifted
                    }
                    _ => return Err(syntax(at, "expected `1/k` or `1/(k+1)`")),
                };
                ast.weights.push(w);
            }
            Some(Tok::Word(w)) if w == "H" => {
                self.expect(Tok::LParen, "`(` after H")?;
                let arg_at = self.offset();
                let arg = match self.next() {
                    Some(Tok::Word(w)) if w == "k" => HarmonicArg::K,
                    Some(Tok::Word(w)) if w == "n" => {
                        self.expect(Tok::Minus, "`-` in `n-k`")?;
                        self.word("k")?;
                        HarmonicArg::NMinusK
                    }
                    _ => return Err(syntax(arg_at, "harmonic argument must be `k` or `n-k`")),
                };
                let order = if self.peek() == Some(&Tok::Comma) {
                    self.next();
                    self.small_int()?
                } else {
                    1
                };
                self.expect(Tok::RParen, "`)`")?;
                let power = if self.peek() == Some(&Tok::Caret) {
                    self.next();
                    self.small_int()?
                } else {
                    1
                };
                ast.harmonics.push(HarmonicFactor { arg, order, power });
            }
            _ => return Err(syntax(at, "expected a factor: k, k^INT, 1/k, 1/(k+1) or H(...)")),
        }
        Ok(())
    }

    fn range(&mut self) -> Result<u8, SpecParseError> {
        self.word("k")?;
        self.expect(Tok::Eq, "`=`")?;
        let at = self.offset();
        let start = match self.int()? {
            0 => 0,
            1 => 1,
            _ => return Err(syntax(at, "range must start at 0 or 1")),
        };
        self.expect(Tok::DotDot, "`..`")?;
        self.word("n")?;
        Ok(start)
    }
}

pub fn parse_sum_ast(text: &str) -> Result<SumExprAst, SpecParseError> {
    let tokens = lex(text)?;
    let mut p = SpecParser { tokens, pos: 0, end: text.len() };
    p.sum()
}

/// Parses a sum expression and matches it onto a supported family.
pub fn parse_sum_spec(text: &str) -> Result<SumSpec, SpecParseError> {
    classify(&parse_sum_ast(text)?)
}

fn classify(ast: &SumExprAst) -> Result<SumSpec, SpecParseError> {
    use HarmonicArg::{NMinusK, K};
    if ast.weights.len() > 1 {
        return Err(unsupported("at most one reciprocal weight is allowed"));
    }
    let mut harms: Vec<(HarmonicArg, u32)> = Vec::new();
    for h in &ast.harmonics {
        for _ in 0..h.power.min(3) {
            harms.push((h.arg, h.order));
        }
    }
    let degree: u64 = ast.harmonics.iter().map(|h| h.power as u64).sum();
    if degree > 2 {
        return Err(unsupported(format!("harmonic degree {degree} exceeds 2")));
    }
    harms.sort();
    let p = ast.k_power;
    let from_one = ast.range_start == 1;
    let weight = ast.weights.first().copied();
    let spec = match (weight, harms.as_slice()) {
        (None, []) => {
            if p == 0 && !from_one {
                return Err(unsupported("k^0 summed from k=0 includes a k=0 term; use k=1..n"));
            }
            SumSpec::power(p)
        }
        (None, [(K, 0)]) => return Err(unsupported("harmonic order must be >= 1")),
        (None, [(K, m)]) => SumSpec::f(p, *m),
        (None, [(K, 1), (NMinusK, 1)]) => SumSpec::r(p),
        (None, [(K, 1), (K, 1)]) => SumSpec::s(p),
        (None, [(NMinusK, 1), (NMinusK, 1)]) => {
            if p == 0 && from_one {
                return Err(unsupported("H(n-k)^2 summed from k=1 drops the k=0 term; use k=0..n"));
            }
            SumSpec::t(p)
        }
        (Some(w), [(arg, 1)]) => {
            if p != 0 {
                return Err(unsupported("reciprocal weights cannot be combined with powers of k"));
            }
            let family = match (w, arg, from_one) {
                (Weight::Reciprocal, K, true) => Family::ClassicA,
                (Weight::ReciprocalShifted, K, false) => Family::ClassicB,
                (Weight::Reciprocal, NMinusK, true) => Family::ClassicC,
                (Weight::ReciprocalShifted, NMinusK, false) => Family::ClassicD,
                (Weight::Reciprocal, _, false) => {
                    return Err(unsupported("1/k requires the range k=1..n"))
                }
                (Weight::ReciprocalShifted, _, true) => {
                    return Err(unsupported("1/(k+1) requires the range k=0..n"))
                }
            };
            SumSpec::classic(family)
        }
        _ => return Err(unsupported("summand does not match a supported family")),
    };
    Ok(spec)
}

/// LaTeX left-hand side for a spec.
pub fn spec_latex(spec: &SumSpec) -> String {
    let kp = match spec.p {
        0 => String::new(),
        1 => "k ".to_string(),
        p => format!("k^{{{p}}} "),
    };
    match spec.family {
        Family::Power => format!("\\sum_{{k=1}}^{{n}} k^{{{}}}", spec.p),
        Family::F => match spec.m.unwrap_or(1) {
            1 => format!("\\sum_{{k=0}}^{{n}} {kp}H_k"),
            m => format!("\\sum_{{k=0}}^{{n}} {kp}H_k^{{({m})}}"),
        },
        Family::R => format!("\\sum_{{k=0}}^{{n}} {kp}H_k H_{{n-k}}"),
        Family::S => format!("\\sum_{{k=0}}^{{n}} {kp}H_k^{{2}}"),
        Family::T => format!("\\sum_{{k=0}}^{{n}} {kp}H_{{n-k}}^{{2}}"),
        Family::ClassicA => "\\sum_{k=1}^{n} \\frac{1}{k} H_k".to_string(),
        Family::ClassicB => "\\sum_{k=0}^{n} \\frac{1}{k+1} H_k".to_string(),
        Family::ClassicC => "\\sum_{k=1}^{n} \\frac{1}{k} H_{n-k}".to_string(),
        Family::ClassicD => "\\sum_{k=0}^{n} \\frac{1}{k+1} H_{n-k}".to_string(),
    }
}

#[derive(Debug, Parser)]
#[command(name = "harmsum", version, about = "Exact closed forms for harmonic number sums")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the closed form of a sum expression.
    ClosedForm {
        expr: String,
        #[arg(long, default_value = "plain")]
        format: Format,
    },
    /// Evaluate a sum exactly at one n.
    Eval {
        expr: String,
        #[arg(long)]
        n: u64,
    },
    /// Check the closed form against direct summation for n up to --max-n.
    Verify {
        expr: String,
        #[arg(long, default_value_t = 40)]
        max_n: u64,
        /// Adds 1 to the closed form before checking.
        #[arg(long, hide = true)]
        corrupt: bool,
    },
    /// Print the closed forms for p = 0..=max-p.
    Table {
        #[arg(long)]
        family: String,
        #[arg(long, default_value_t = 5)]
        max_p: u32,
        #[arg(long, default_value_t = 1)]
        m: u32,
        #[arg(long, default_value = "plain")]
        format: Format,
    },
    /// Compare direct summation with closed-form evaluation.
    Bench {
        #[arg(long)]
        family: String,
        #[arg(long, default_value_t = 0)]
        p: u32,
        #[arg(long)]
        m: Option<u32>,
        #[arg(long)]
        n: u64,
    },
}

/// Captured result of one CLI invocation.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Self { code: EXIT_OK, stdout, stderr: String::new() }
    }

    fn err(code: i32, message: impl std::fmt::Display) -> Self {
        Self { code, stdout: String::new(), stderr: format!("harmsum: {message}\n") }
    }
}

/// Runs the CLI on `args` (including the program name).
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                Outcome { code: EXIT_SYNTAX, stdout: String::new(), stderr: text }
            } else {
                Outcome::ok(text)
            };
        }
    };
    let mut engine = Engine::new();
    match cli.command {
        Command::ClosedForm { expr, format } => cmd_closed_form(&mut engine, &expr, format),
        Command::Eval { expr, n } => cmd_eval(&mut engine, &expr, n),
        Command::Verify { expr, max_n, corrupt } => cmd_verify(&mut engine, &expr, max_n, corrupt),
        Command::Table { family, max_p, m, format } => cmd_table(&mut engine, &family, max_p, m, format),
        Command::Bench { family, p, m, n } => cmd_bench(&mut engine, &family, p, m, n),
    }
}

fn parse_or_exit(expr: &str) -> Result<SumSpec, Outcome> {
    parse_sum_spec(expr).map_err(|e| Outcome::err(e.exit_code(), e))
}

fn synth(engine: &mut Engine, spec: &SumSpec) -> Result<ClosedForm, Outcome> {
    engine.synthesize(spec).map_err(|e| Outcome::err(EXIT_FAIL, e))
}

fn entry_json(spec: &SumSpec, form: &ClosedForm) -> serde_json::Value {
    json!({ "spec": spec, "closedForm": to_json(form) })
}

pub fn cmd_closed_form(engine: &mut Engine, expr: &str, format: Format) -> Outcome {
    let result = parse_or_exit(expr).and_then(|spec| {
        let form = synth(engine, &spec)?;
        Ok(match format {
            Format::Json => {
                let v = entry_json(&spec, &form);
                format!("{}\n", serde_json::to_string_pretty(&v).expect("json"))
            }
            f => format!("{}\n", render(&form, f)),
        })
    });
    result.map_or_else(|o| o, Outcome::ok)
}

pub fn cmd_eval(engine: &mut Engine, expr: &str, n: u64) -> Outcome {
    let result = parse_or_exit(expr).and_then(|spec| {
        let min = spec.family.min_n();
        if n < min {
            let e = OracleError::Domain { family: spec.family, n, min };
            return Err(Outcome::err(EXIT_FAIL, e));
        }
        let form = synth(engine, &spec)?;
        let value = form.evaluate(n).map_err(|e| Outcome::err(EXIT_FAIL, e))?;
        Ok(format!("{value}\n"))
    });
    result.map_or_else(|o| o, Outcome::ok)
}

pub fn cmd_verify(engine: &mut Engine, expr: &str, max_n: u64, corrupt: bool) -> Outcome {
    let spec = match parse_or_exit(expr) {
        Ok(s) => s,
        Err(o) => return o,
    };
    let mut form = match synth(engine, &spec) {
        Ok(f) => f,
        Err(o) => return o,
    };
    if corrupt {
        form = form.add(&ClosedForm::one());
    }
    match verify_form(&spec, &form, max_n) {
        Ok(report) => Outcome {
            code: if report.passed() { EXIT_OK } else { EXIT_FAIL },
            stdout: format!("{report}\n"),
            stderr: String::new(),
        },
        Err(e) => Outcome::err(EXIT_FAIL, e),
    }
}

fn family_arg(name: &str) -> Result<Family, Outcome> {
    name.parse::<Family>().map_err(|e| Outcome::err(EXIT_UNSUPPORTED, e))
}

fn table_specs(family: Family, max_p: u32, m: u32) -> Vec<SumSpec> {
    match family {
        f if f.is_classic() => vec![SumSpec::classic(f)],
        Family::F => (0..=max_p).map(|p| SumSpec::f(p, m)).collect(),
        f => (0..=max_p).map(|p| SumSpec { family: f, p, m: None }).collect(),
    }
}

pub fn cmd_table(engine: &mut Engine, family: &str, max_p: u32, m: u32, format: Format) -> Outcome {
    let family = match family_arg(family) {
        Ok(f) => f,
        Err(o) => return o,
    };
    if family == Family::F && m == 0 {
        return Outcome::err(EXIT_UNSUPPORTED, SumError::InvalidSpec("order m must be >= 1".into()));
    }
    let mut rows = Vec::new();
    for spec in table_specs(family, max_p, m) {
        match synth(engine, &spec) {
            Ok(form) => rows.push((spec, form)),
            Err(o) => return o,
        }
    }
    let mut out = String::new();
    match format {
        Format::Json => {
            let v: Vec<_> = rows.iter().map(|(s, f)| entry_json(s, f)).collect();
            out = format!("{}\n", serde_json::to_string_pretty(&v).expect("json"));
        }
        Format::Plain => {
            for (spec, form) in &rows {
                writeln!(out, "{} = {}", spec.to_expr(), render(form, Format::Plain)).unwrap();
            }
        }
        Format::Latex => {
            for (spec, form) in &rows {
                writeln!(out, "{} = {}", spec_latex(spec), render(form, Format::Latex)).unwrap();
            }
        }
    }
    Outcome::ok(out)
}

pub fn cmd_bench(engine: &mut Engine, family: &str, p: u32, m: Option<u32>, n: u64) -> Outcome {
    let family = match family_arg(family) {
        Ok(f) => f,
        Err(o) => return o,
    };
    let spec = SumSpec {
        family,
        p: if family.is_classic() { 0 } else { p },
        m: if family == Family::F { Some(m.unwrap_or(1)) } else { None },
    };
    if let Err(e) = spec.validate() {
        return Outcome::err(EXIT_UNSUPPORTED, e);
    }
    let t0 = Instant::now();
    let mut direct_ops = 0;
    let direct = match direct_sum_counted(&spec, n, &mut direct_ops) {
        Ok(v) => v,
        Err(e) => return Outcome::err(EXIT_FAIL, e),
    };
    let t_direct = t0.elapsed();
    let t1 = Instant::now();
    let form = match synth(engine, &spec) {
        Ok(f) => f,
        Err(o) => return o,
    };
    let t_synth = t1.elapsed();
    let t2 = Instant::now();
    let mut closed_ops = 0;
    let closed = match form.evaluate_counted(n, &mut closed_ops) {
        Ok(v) => v,
        Err(e) => return Outcome::err(EXIT_FAIL, e),
    };
    let t_eval = t2.elapsed();
    let equal = direct == closed;
    let mut stdout = String::new();
    writeln!(stdout, "sum: {} at n={n}", spec.to_expr()).unwrap();
    writeln!(stdout, "value: {}", summarize(&direct)).unwrap();
    writeln!(stdout, "direct sum ops: {direct_ops}").unwrap();
    writeln!(stdout, "closed form ops: {closed_ops}").unwrap();
    writeln!(stdout, "equal: {}", if equal { "yes" } else { "no" }).unwrap();
    let stderr = format!(
        "timing: direct {:.3} ms, synthesis {:.3} ms, closed-form evaluation {:.3} ms\n",
        t_direct.as_secs_f64() * 1e3,
        t_synth.as_secs_f64() * 1e3,
        t_eval.as_secs_f64() * 1e3
    );
    Outcome { code: if equal { EXIT_OK } else { EXIT_FAIL }, stdout, stderr }
}

/// Exact value when short, otherwise digit counts of numerator and
/// denominator plus a decimal approximation.
fn summarize(v: &BigRational) -> String {
    let text = v.to_string();
    if text.len() <= 80 {
        return text;
    }
    let approx = approx_decimal(v);
    format!(
        "{approx} (numerator {} digits, denominator {} digits)",
        v.numer().to_string().trim_start_matches('-').len(),
        v.denom().to_string().len()
    )
}

fn approx_decimal(v: &BigRational) -> String {
    // 12 significant digits via integer scaling
    let num = v.numer().to_string().trim_start_matches('-').len() as i64;
    let den = v.denom().to_string().len() as i64;
    let shift = 12 - (num - den);
    let scaled = if shift >= 0 {
        v * BigRational::from_integer(num_traits::pow(10.into(), shift as usize))
    } else {
        v / BigRational::from_integer(num_traits::pow(10.into(), (-shift) as usize))
    };
    let mantissa = scaled.round().to_integer().to_f64().unwrap_or(f64::NAN);
    format!("{:.6e}", mantissa * 10f64.powi(-(shift as i32)))
}
