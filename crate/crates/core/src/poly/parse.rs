//! Polynomial literals: `expr := term (('+'|'-') term)*`,
//! `term := unary (('*' unary) | ('/' unary))*`, `unary := '-' unary | power`,
//! `power := atom ('^' uint)?`, `atom := number | ident | '(' expr ')'`.
//! Division is only allowed by nonzero constants. Numbers may be integers or
//! finite decimals; both are read exactly.

use std::sync::Arc;

use num_traits::{One, Zero};

use super::{MultiPoly, Registry};
use crate::error::{Error, Result};
use crate::scalar::{parse_rational, Rational};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(Rational),
    Ident(String),
    Op(char),
}

fn tokenize(text: &str) -> Result<Vec<(usize, Tok)>> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < bytes.len() && ((bytes[i] as char).is_ascii_digit() || bytes[i] == b'.') {
                i += 1;
            }
            if i < bytes.len() && matches!(bytes[i], b'e' | b'E') {
                return Err(Error::Parse {
                    pos: i,
                    msg: "exponent notation is not an exact rational literal".into(),
                });
            }
            let lit = &text[start..i];
            let r = parse_rational(lit).ok_or_else(|| Error::Parse {
                pos: start,
                msg: format!("bad numeric literal {lit:?}"),
            })?;
            out.push((start, Tok::Num(r)));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < bytes.len()
                && ((bytes[i] as char).is_ascii_alphanumeric() || bytes[i] == b'_')
            {
                i += 1;
            }
            out.push((start, Tok::Ident(text[start..i].to_string())));
        } else if "+-*/^()".contains(c) {
            out.push((i, Tok::Op(c)));
            i += 1;
        } else {
            return Err(Error::Parse {
                pos: i,
                msg: format!("unexpected character {c:?}"),
            });
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    reg: &'a Arc<Registry>,
    end: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.1)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map(|t| t.0).unwrap_or(self.end)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Parse {
            pos: self.offset(),
            msg: msg.into(),
        })
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Op(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<MultiPoly<Rational>> {
        let mut acc = self.term()?;
        loop {
            if self.eat('+') {
                let t = self.term()?;
                acc += &t;
            } else if self.eat('-') {
                let t = self.term()?;
                acc -= &t;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<MultiPoly<Rational>> {
        let mut acc = self.unary()?;
        loop {
            if self.eat('*') {
                let u = self.unary()?;
                acc = &acc * &u;
            } else if self.eat('/') {
                let at = self.offset();
                let u = self.unary()?;
                match u.as_constant() {
                    Some(c) if !c.is_zero() => acc = acc.scale(&(Rational::one() / c)),
                    _ => {
                        return Err(Error::Parse {
                            pos: at,
                            msg: "division is only allowed by a nonzero constant".into(),
                        })
                    }
                }
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<MultiPoly<Rational>> {
        if self.eat('-') {
            return Ok(-self.unary()?);
        }
        if self.eat('+') {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<MultiPoly<Rational>> {
        let base = self.atom()?;
        if self.eat('^') {
            match self.peek().cloned() {
                Some(Tok::Num(r)) if r.is_integer() && r >= Rational::zero() => {
                    self.pos += 1;
                    let k: u32 = r
                        .to_integer()
                        .try_into()
                        .or_else(|_| self.err("exponent too large"))?;
                    Ok(base.pow(k))
                }
                _ => self.err("expected a nonnegative integer exponent"),
            }
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<MultiPoly<Rational>> {
        match self.peek().cloned() {
            Some(Tok::Num(r)) => {
                self.pos += 1;
                Ok(MultiPoly::constant(self.reg, r))
            }
            Some(Tok::Ident(name)) => match self.reg.index_of(&name) {
                Some(i) => {
                    self.pos += 1;
                    Ok(MultiPoly::var(self.reg, i))
                }
                None => self.err(format!("unknown variable {name:?}")),
            },
            Some(Tok::Op('(')) => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(')') {
                    return self.err("expected ')'");
                }
                Ok(e)
            }
            Some(t) => self.err(format!("unexpected token {t:?}")),
            None => self.err("unexpected end of input"),
        }
    }
}

/// Parses a polynomial over the given registry.
pub fn parse_poly(text: &str, reg: &Arc<Registry>) -> Result<MultiPoly<Rational>> {
    let toks = tokenize(text)?;
    let mut p = Parser {
        toks,
        pos: 0,
        reg,
        end: text.len(),
    };
    let e = p.expr()?;
    if p.pos != p.toks.len() {
        return p.err("trailing input");
    }
    Ok(e)
}

/// Identifiers occurring in a literal, in natural order (`x2` before `x10`).
pub fn identifiers(text: &str) -> Result<Vec<String>> {
    let mut names: Vec<String> = tokenize(text)?
        .into_iter()
        .filter_map(|(_, t)| match t {
            Tok::Ident(s) => Some(s),
            _ => None,
        })
        .collect();
    names.sort_by_key(|a| natural_key(a));
    names.dedup();
    Ok(names)
}

fn natural_key(s: &str) -> (String, u64, String) {
    let split = s.find(|c: char| c.is_ascii_digit()).unwrap_or(s.len());
    let (head, tail) = s.split_at(split);
    let digits: String = tail.chars().take_while(|c| c.is_ascii_digit()).collect();
    let rest = tail[digits.len()..].to_string();
    (head.to_string(), digits.parse().unwrap_or(0), rest)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    #[test]
    fn parses_and_prints_canonically() {
        let reg = Registry::ambient(2, "x");
        let p = parse_poly("x1^2*x2 - 3/2*x2 + (x1+1)^2 - 1", &reg).unwrap();
        assert_eq!(p.to_string(), "x1^2*x2 + x1^2 + 2*x1 - 3/2*x2");
        let q = parse_poly(&p.to_string(), &reg).unwrap();
        assert_eq!(p, q);
    }

    #[test]
    fn decimals_are_exact() {
        let reg = Registry::ambient(1, "t");
        let p = parse_poly("0.25*t1", &reg).unwrap();
        assert_eq!(p.coefficient(&[1]), rat(1, 4));
    }

    #[test]
    fn rejects_bad_input() {
        let reg = Registry::ambient(1, "x");
        assert!(parse_poly("x1/x1", &reg).is_err());
        assert!(parse_poly("y", &reg).is_err());
        assert!(parse_poly("1e5", &reg).is_err());
        assert!(parse_poly("x1^-1", &reg).is_err());
        assert!(parse_poly("(x1", &reg).is_err());
    }

    #[test]
    fn natural_identifier_order() {
        assert_eq!(identifiers("x10 + x2*x1").unwrap(), vec!["x1", "x2", "x10"]);
    }
}
