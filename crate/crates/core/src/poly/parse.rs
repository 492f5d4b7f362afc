//! Text grammar for polynomials.
//!
//! ```text
//! expr   = term { ("+" | "-") term } ;
//! term   = unary { "*" unary } ;
//! unary  = ("+" | "-") unary | power ;
//! power  = atom [ "^" integer ] ;
//! atom   = integer [ "/" integer ] | name | "(" expr ")" ;
//! name   = letter { letter | digit | "_" } ;
//! ```
//!
//! Multiplication is always explicit. `-x^2` parses as `-(x^2)`.

use num_bigint::BigInt;
use num_traits::Zero;

use super::{Polynomial, Scalar, Vars};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(BigInt),
    Name(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

fn tokenize(text: &str) -> Result<Vec<(usize, Tok)>> {
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let (pos, c) = chars[i];
        match c {
            c if c.is_whitespace() => {
                i += 1;
            }
            '0'..='9' => {
                let start = i;
                while i < chars.len() && chars[i].1.is_ascii_digit() {
                    i += 1;
                }
                let digits: String = chars[start..i].iter().map(|(_, c)| c).collect();
                let value = digits.parse::<BigInt>().map_err(|e| Error::Parse { pos, msg: e.to_string() })?;
                out.push((pos, Tok::Int(value)));
            }
            c if c.is_alphabetic() => {
                let start = i;
                while i < chars.len() && (chars[i].1.is_alphanumeric() || chars[i].1 == '_') {
                    i += 1;
                }
                out.push((pos, Tok::Name(chars[start..i].iter().map(|(_, c)| c).collect())));
            }
            _ => {
                let tok = match c {
                    '+' => Tok::Plus,
                    '-' => Tok::Minus,
                    '*' => Tok::Star,
                    '/' => Tok::Slash,
                    '^' => Tok::Caret,
                    '(' => Tok::LParen,
                    ')' => Tok::RParen,
                    other => {
                        return Err(Error::Parse { pos, msg: format!("unexpected character `{other}`") });
                    }
                };
                out.push((pos, tok));
                i += 1;
            }
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    at: usize,
    end: usize,
    vars: &'a Vars,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|(_, t)| t)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.at).map(|(p, _)| *p).unwrap_or(self.end)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Parse { pos: self.pos(), msg: msg.into() })
    }

    fn expr(&mut self) -> Result<Polynomial> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.at += 1;
                    acc = &acc + &self.term()?;
                }
                Some(Tok::Minus) => {
                    self.at += 1;
                    acc = &acc - &self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Polynomial> {
        let mut acc = self.unary()?;
        while let Some(Tok::Star) = self.peek() {
            self.at += 1;
            acc = &acc * &self.unary()?;
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Polynomial> {
        match self.peek() {
            Some(Tok::Minus) => {
                self.at += 1;
                Ok(-&self.unary()?)
            }
            Some(Tok::Plus) => {
                self.at += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Polynomial> {
        let base = self.atom()?;
        if let Some(Tok::Caret) = self.peek() {
            self.at += 1;
            let e = match self.peek() {
                Some(Tok::Int(n)) => n.clone(),
                _ => return self.err("expected a non-negative integer exponent"),
            };
            let e: u32 = match u32::try_from(&e) {
                Ok(e) => e,
                Err(_) => return self.err("exponent too large"),
            };
            self.at += 1;
            return Ok(base.pow(e));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Polynomial> {
        match self.peek().cloned() {
            Some(Tok::Int(n)) => {
                self.at += 1;
                if let Some(Tok::Slash) = self.peek() {
                    self.at += 1;
                    let d = match self.peek() {
                        Some(Tok::Int(d)) => d.clone(),
                        _ => return self.err("expected an integer denominator"),
                    };
                    if d.is_zero() {
                        return self.err("zero denominator");
                    }
                    self.at += 1;
                    return Ok(Polynomial::constant(self.vars, Scalar::new(n, d)));
                }
                Ok(Polynomial::constant(self.vars, Scalar::from_integer(n)))
            }
            Some(Tok::Name(name)) => {
                let pos = self.pos();
                self.at += 1;
                Polynomial::var(self.vars, &name).map_err(|_| Error::UnknownVariableAt { name, pos })
            }
            Some(Tok::LParen) => {
                self.at += 1;
                let inner = self.expr()?;
                match self.peek() {
                    Some(Tok::RParen) => {
                        self.at += 1;
                        Ok(inner)
                    }
                    _ => self.err("expected `)`"),
                }
            }
            Some(_) => self.err("expected a number, variable or `(`"),
            None => self.err("unexpected end of input"),
        }
    }
}

/// Parse `text` as a polynomial over `vars`.
pub fn parse_polynomial(text: &str, vars: &Vars) -> Result<Polynomial> {
    let toks = tokenize(text)?;
    let mut p = Parser { toks, at: 0, end: text.len(), vars };
    if p.peek().is_none() {
        return p.err("empty expression");
    }
    let out = p.expr()?;
    if p.peek().is_some() {
        return p.err("unexpected trailing input");
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{vars, Monomial};

    fn q(n: i64) -> Scalar {
        Scalar::from_integer(n.into())
    }

    #[test]
    fn cusp_parses_to_two_terms() {
        let v = vars(&["x", "y"]);
        let p = parse_polynomial("y^2 - x^3", &v).unwrap();
        let expected = Polynomial::from_terms(
            &v,
            [(Monomial::new(vec![0, 2]), q(1)), (Monomial::new(vec![3, 0]), q(-1))],
        );
        assert_eq!(p, expected);
    }

    #[test]
    fn zero_literal() {
        let v = vars(&["x"]);
        assert!(parse_polynomial("0", &v).unwrap().is_zero());
    }

    #[test]
    fn binomial_square_expands() {
        let v = vars(&["x", "y"]);
        let p = parse_polynomial("(x+y)^2", &v).unwrap();
        let expected = parse_polynomial("x^2 + 2*x*y + y^2", &v).unwrap();
        assert_eq!(p, expected);
        assert_eq!(p.num_terms(), 3);
    }

    #[test]
    fn rational_literals_and_unary_minus() {
        let v = vars(&["x"]);
        let p = parse_polynomial("-3/6*x^2 + 1/2", &v).unwrap();
        assert_eq!(p.to_string(), "-1/2*x^2 + 1/2");
        assert_eq!(parse_polynomial("-x^2", &v).unwrap().to_string(), "-x^2");
    }

    #[test]
    fn unknown_variable_reports_position() {
        let v = vars(&["x", "y"]);
        match parse_polynomial("x + 2*z", &v) {
            Err(Error::UnknownVariableAt { name, pos }) => {
                assert_eq!(name, "z");
                assert_eq!(pos, 6);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn syntax_errors_report_position() {
        let v = vars(&["x"]);
        match parse_polynomial("x + * 2", &v) {
            Err(Error::Parse { pos, .. }) => assert_eq!(pos, 4),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(parse_polynomial("(x + 1", &v), Err(Error::Parse { .. })));
        assert!(matches!(parse_polynomial("2x", &v), Err(Error::Parse { .. })));
        assert!(matches!(parse_polynomial("x/2", &v), Err(Error::Parse { .. })));
        assert!(matches!(parse_polynomial("", &v), Err(Error::Parse { .. })));
    }

    #[test]
    fn display_round_trips() {
        let v = vars(&["x", "y", "z"]);
        for text in ["y^2 - x^3", "3/4*x*y - 2*z + 7", "(x - y)^3*(z + 1)", "0", "-1"] {
            let p = parse_polynomial(text, &v).unwrap();
            assert_eq!(parse_polynomial(&p.to_string(), &v).unwrap(), p, "{text}");
        }
    }
}
