//! The expression language for functions on a time scale.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := '-' unary | factor
//! factor := base ('^' number)?
//! base   := number | 't' | 'i' | '(' expr ')'
//!         | 'exp(' expr ')' | 'sin(' expr ')' | 'cos(' expr ')'
//!         | 'hk(' int ')' | 'ets(' complex ')' | 'etsinv(' complex ')'
//!         | 'chi(' number ',' number ')' | 'ind(' number ')'
//! ```
//!
//! The exponent after `^` and the arguments of `chi` and `ind` may carry a
//! sign. Complex literals are written `a+bi` without spaces.

use std::fmt;

use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExprError {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown function `{name}` at byte {offset}")]
    UnknownFunction { name: String, offset: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Exp,
    Sin,
    Cos,
}

impl Func {
    fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Sin => "sin",
            Func::Cos => "cos",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    T,
    I,
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, f64),
    Call(Func, Box<Expr>),
    /// `h_n(t, s)`.
    Hk(u32),
    /// `e_c(t, s)`.
    Ets(Complex64),
    /// `e_{(-)c}(t, s)`.
    EtsInv(Complex64),
    /// Indicator of `[a, b)`.
    Chi(f64, f64),
    /// Indicator of the point `a`; carries no mass where `a` is right-dense.
    Ind(f64),
}

impl Expr {
    /// Largest monomial order used.
    pub fn max_hk(&self) -> Option<u32> {
        let mut best = None;
        self.visit(&mut |e| {
            if let Expr::Hk(n) = e {
                best = Some(best.map_or(*n, |b: u32| b.max(*n)));
            }
        });
        best
    }

    /// Endpoints of every `chi` and the location of every `ind`.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut out = Vec::new();
        self.visit(&mut |e| match e {
            Expr::Chi(a, b) => out.extend([*a, *b]),
            Expr::Ind(a) => out.push(*a),
            _ => {}
        });
        out
    }

    fn visit(&self, f: &mut impl FnMut(&Expr)) {
        f(self);
        match self {
            Expr::Neg(a) | Expr::Pow(a, _) | Expr::Call(_, a) => a.visit(f),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.visit(f);
                b.visit(f);
            }
            _ => {}
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Add(..) | Expr::Sub(..) => 1,
            Expr::Mul(..) | Expr::Div(..) => 2,
            Expr::Neg(_) => 3,
            Expr::Pow(..) => 4,
            _ => 5,
        }
    }
}

/// Writes `a+bi`, `a-bi` or a plain real.
pub fn format_complex(z: Complex64) -> String {
    if z.im == 0.0 {
        return format!("{}", z.re);
    }
    let sign = if z.im.is_sign_negative() { '-' } else { '+' };
    format!("{}{sign}{}i", z.re, z.im.abs())
}

/// Reads `a`, `bi`, `a+bi` or `a-bi`; `i` alone means one.
pub fn parse_complex(text: &str) -> Option<Complex64> {
    let text = text.trim();
    if text.is_empty() || text.contains(char::is_whitespace) {
        return None;
    }
    let Some(body) = text.strip_suffix('i') else {
        return finite(text).map(|re| Complex64::new(re, 0.0));
    };
    // split at the last sign that is not part of an exponent or the leading sign
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| matches!(bytes[k], b'+' | b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(k) => (finite(&body[..k])?, imaginary(&body[k..])?),
        None => (0.0, imaginary(body)?),
    };
    Some(Complex64::new(re, im))
}

fn imaginary(text: &str) -> Option<f64> {
    match text {
        "" | "+" => Some(1.0),
        "-" => Some(-1.0),
        _ => finite(text),
    }
}

fn finite(text: &str) -> Option<f64> {
    text.parse::<f64>().ok().filter(|v| v.is_finite())
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let wrap = |f: &mut fmt::Formatter<'_>, e: &Expr, parens: bool| {
            if parens {
                write!(f, "({e})")
            } else {
                write!(f, "{e}")
            }
        };
        let prec = self.precedence();
        match self {
            Expr::Num(v) => write!(f, "{v}"),
            Expr::T => f.write_str("t"),
            Expr::I => f.write_str("i"),
            Expr::Neg(a) => {
                f.write_str("-")?;
                wrap(f, a, a.precedence() < 3)
            }
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                let op = match self {
                    Expr::Add(..) => '+',
                    Expr::Sub(..) => '-',
                    Expr::Mul(..) => '*',
                    _ => '/',
                };
                wrap(f, a, a.precedence() < prec)?;
                write!(f, "{op}")?;
                wrap(f, b, b.precedence() <= prec)
            }
            Expr::Pow(a, p) => {
                wrap(f, a, a.precedence() < 5)?;
                write!(f, "^{p}")
            }
            Expr::Call(func, a) => write!(f, "{}({a})", func.name()),
            Expr::Hk(n) => write!(f, "hk({n})"),
            Expr::Ets(c) => write!(f, "ets({})", format_complex(*c)),
            Expr::EtsInv(c) => write!(f, "etsinv({})", format_complex(*c)),
            Expr::Chi(a, b) => write!(f, "chi({a},{b})"),
            Expr::Ind(a) => write!(f, "ind({a})"),
        }
    }
}

pub fn parse_expr(text: &str) -> Result<Expr, ExprError> {
    let mut p = Parser { src: text, pos: 0 };
    p.skip_ws();
    if p.pos == text.len() {
        return Err(p.error("empty expression"));
    }
    let e = p.expr()?;
    p.skip_ws();
    if p.pos != text.len() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(e)
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, message: &str) -> ExprError {
        ExprError::Syntax { offset: self.pos, message: message.to_string() }
    }

    fn rest(&self) -> &str {
        &self.src[self.pos..]
    }

    fn peek(&self) -> Option<u8> {
        self.src.as_bytes().get(self.pos).copied()
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(|b| b.is_ascii_whitespace()) {
            self.pos += 1;
        }
    }

    fn eat(&mut self, c: u8) -> bool {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<(), ExprError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.error(&format!("expected `{}`", c as char)))
        }
    }

    fn expr(&mut self) -> Result<Expr, ExprError> {
        let mut left = self.term()?;
        loop {
            if self.eat(b'+') {
                left = Expr::Add(Box::new(left), Box::new(self.term()?));
            } else if self.eat(b'-') {
                left = Expr::Sub(Box::new(left), Box::new(self.term()?));
            } else {
                return Ok(left);
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ExprError> {
        let mut left = self.unary()?;
        loop {
            if self.eat(b'*') {
                left = Expr::Mul(Box::new(left), Box::new(self.unary()?));
            } else if self.eat(b'/') {
                left = Expr::Div(Box::new(left), Box::new(self.unary()?));
            } else {
                return Ok(left);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, ExprError> {
        if self.eat(b'-') {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.factor()
    }

    fn factor(&mut self) -> Result<Expr, ExprError> {
        let base = self.base()?;
        if self.eat(b'^') {
            let p = self.signed_number()?;
            return Ok(Expr::Pow(Box::new(base), p));
        }
        Ok(base)
    }

    fn base(&mut self) -> Result<Expr, ExprError> {
        self.skip_ws();
        let start = self.pos;
        match self.peek() {
            None => Err(self.error("unexpected end of input")),
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(b')')?;
                Ok(e)
            }
            Some(b) if b.is_ascii_digit() || b == b'.' => Ok(Expr::Num(self.number()?)),
            Some(b) if b.is_ascii_alphabetic() => {
                let len = self.rest().bytes().take_while(u8::is_ascii_alphanumeric).count();
                let name = &self.src[start..start + len];
                self.pos += len;
                match name {
                    "t" => return Ok(Expr::T),
                    "i" => return Ok(Expr::I),
                    _ => {}
                }
                let known = ["exp", "sin", "cos", "hk", "ets", "etsinv", "chi", "ind"];
                if !known.contains(&name) {
                    return Err(ExprError::UnknownFunction { name: name.to_string(), offset: start });
                }
                self.expect(b'(')?;
                let e = match name {
                    "exp" | "sin" | "cos" => {
                        let func = match name {
                            "exp" => Func::Exp,
                            "sin" => Func::Sin,
                            _ => Func::Cos,
                        };
                        Expr::Call(func, Box::new(self.expr()?))
                    }
                    "hk" => Expr::Hk(self.integer()?),
                    "ets" => Expr::Ets(self.complex()?),
                    "etsinv" => Expr::EtsInv(self.complex()?),
                    "chi" => {
                        let a = self.signed_number()?;
                        self.expect(b',')?;
                        Expr::Chi(a, self.signed_number()?)
                    }
                    _ => Expr::Ind(self.signed_number()?),
                };
                self.expect(b')')?;
                Ok(e)
            }
            Some(_) => Err(self.error("expected a number, `t`, `i`, a function or `(`")),
        }
    }

    /// Unsigned decimal literal with an optional exponent.
    fn number(&mut self) -> Result<f64, ExprError> {
        self.skip_ws();
        let start = self.pos;
        let bytes = self.src.as_bytes();
        let mut end = start;
        while end < bytes.len() && (bytes[end].is_ascii_digit() || bytes[end] == b'.') {
            end += 1;
        }
        if end < bytes.len() && matches!(bytes[end], b'e' | b'E') {
            let mut k = end + 1;
            if k < bytes.len() && matches!(bytes[k], b'+' | b'-') {
                k += 1;
            }
            if k < bytes.len() && bytes[k].is_ascii_digit() {
                while k < bytes.len() && bytes[k].is_ascii_digit() {
                    k += 1;
                }
                end = k;
            }
        }
        match finite(&self.src[start..end]) {
            Some(v) if end > start => {
                self.pos = end;
                Ok(v)
            }
            _ => Err(self.error("malformed number")),
        }
    }

    fn signed_number(&mut self) -> Result<f64, ExprError> {
        if self.eat(b'-') {
            return Ok(-self.number()?);
        }
        self.eat(b'+');
        self.number()
    }

    fn integer(&mut self) -> Result<u32, ExprError> {
        self.skip_ws();
        let len = self.rest().bytes().take_while(u8::is_ascii_digit).count();
        let digits = &self.src[self.pos..self.pos + len];
        let n = digits.parse::<u32>().map_err(|_| self.error("expected a nonnegative integer"))?;
        self.pos += len;
        Ok(n)
    }

    fn complex(&mut self) -> Result<Complex64, ExprError> {
        self.skip_ws();
        let len = self.rest().find(')').ok_or_else(|| self.error("expected `)`"))?;
        let literal = &self.src[self.pos..self.pos + len];
        let z = parse_complex(literal).ok_or_else(|| self.error("malformed complex literal"))?;
        self.pos += len;
        Ok(z)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn precedence_and_associativity() {
        let e = parse_expr("1-2-3").unwrap();
        assert_eq!(e.to_string(), "1-2-3");
        assert!(matches!(e, Expr::Sub(ref a, _) if matches!(**a, Expr::Sub(..))));
        assert_eq!(parse_expr("1-(2-3)").unwrap().to_string(), "1-(2-3)");
        assert_eq!(parse_expr("-t^2").unwrap(), Expr::Neg(Box::new(Expr::Pow(Box::new(Expr::T), 2.0))));
        assert_eq!(parse_expr("2*t^-1").unwrap().to_string(), "2*t^-1");
        assert_eq!(parse_expr(" ( t ) ").unwrap(), Expr::T);
    }

    #[test]
    fn structural_examples() {
        assert_eq!(parse_expr("1").unwrap(), Expr::Num(1.0));
        assert_eq!(
            parse_expr("ets(2)*t").unwrap(),
            Expr::Mul(Box::new(Expr::Ets(Complex64::new(2.0, 0.0))), Box::new(Expr::T))
        );
        assert_eq!(
            parse_expr("hk(2)+chi(0,3)").unwrap(),
            Expr::Add(Box::new(Expr::Hk(2)), Box::new(Expr::Chi(0.0, 3.0)))
        );
        assert_eq!(parse_expr("etsinv(1-2i)").unwrap(), Expr::EtsInv(Complex64::new(1.0, -2.0)));
    }

    #[test]
    fn errors_carry_offsets() {
        assert_eq!(
            parse_expr("1 + foo(2)"),
            Err(ExprError::UnknownFunction { name: "foo".into(), offset: 4 })
        );
        assert!(matches!(parse_expr("1 +"), Err(ExprError::Syntax { offset: 3, .. })));
        assert!(matches!(parse_expr(""), Err(ExprError::Syntax { offset: 0, .. })));
        assert!(matches!(parse_expr("(t"), Err(ExprError::Syntax { offset: 2, .. })));
        assert!(matches!(parse_expr("2t"), Err(ExprError::Syntax { offset: 1, .. })));
        assert!(parse_expr("hk(-1)").is_err());
        assert!(parse_expr("ets(1 + i)").is_err());
    }

    #[test]
    fn complex_literals() {
        assert_eq!(parse_complex("1+2i"), Some(Complex64::new(1.0, 2.0)));
        assert_eq!(parse_complex("-1.5e-3-2i"), Some(Complex64::new(-1.5e-3, -2.0)));
        assert_eq!(parse_complex("-i"), Some(Complex64::new(0.0, -1.0)));
        assert_eq!(parse_complex("3i"), Some(Complex64::new(0.0, 3.0)));
        assert_eq!(parse_complex("2e+1"), Some(Complex64::new(20.0, 0.0)));
        assert_eq!(parse_complex("1 + 2i"), None);
        assert_eq!(parse_complex("nan"), None);
        for z in [Complex64::new(1.0, -0.5), Complex64::new(-2.0, 0.0), Complex64::new(0.0, 1e-9)] {
            assert_eq!(parse_complex(&format_complex(z)), Some(z));
        }
    }
}
