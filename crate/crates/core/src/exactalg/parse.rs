//! Recursive-descent parser for rational expressions in `z`.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := ('-' | '+') unary | power
//! power  := atom ('^' '-'? integer)?
//! atom   := integer | 'z' | '(' expr ')'
//! ```

use num_bigint::BigInt;
use num_traits::ToPrimitive;

use super::{Rat, RationalFunction};
use crate::error::{Error, Result};

const MAX_EXPONENT: i64 = 256;

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

fn err(pos: usize, msg: impl Into<String>) -> Error {
    Error::Parse { pos, msg: msg.into() }
}

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<RationalFunction> {
        let mut acc = self.term()?;
        while let Some(c @ (b'+' | b'-')) = self.peek() {
            self.pos += 1;
            let rhs = self.term()?;
            acc = if c == b'+' { &acc + &rhs } else { &acc - &rhs };
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<RationalFunction> {
        let mut acc = self.unary()?;
        while let Some(c @ (b'*' | b'/')) = self.peek() {
            let at = self.pos;
            self.pos += 1;
            let rhs = self.unary()?;
            if c == b'*' {
                acc = &acc * &rhs;
            } else {
                if rhs.is_zero() {
                    return Err(err(at, "division by zero"));
                }
                acc = &acc / &rhs;
            }
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<RationalFunction> {
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                Ok(-self.unary()?)
            }
            Some(b'+') => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<RationalFunction> {
        let base = self.atom()?;
        if self.peek() != Some(b'^') {
            return Ok(base);
        }
        self.pos += 1;
        let neg = if self.peek() == Some(b'-') {
            self.pos += 1;
            true
        } else {
            false
        };
        let at = self.pos;
        let n = self
            .integer()?
            .to_i64()
            .filter(|n| *n <= MAX_EXPONENT)
            .ok_or_else(|| err(at, format!("exponent larger than {MAX_EXPONENT}")))?;
        let mut out = RationalFunction::one();
        for _ in 0..n {
            out = &out * &base;
        }
        if neg {
            out = out.inv().map_err(|_| err(at, "negative power of zero"))?;
        }
        Ok(out)
    }

    fn integer(&mut self) -> Result<BigInt> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(err(start, "expected integer"));
        }
        let s = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        Ok(s.parse().unwrap())
    }

    fn atom(&mut self) -> Result<RationalFunction> {
        match self.peek() {
            Some(b'z') => {
                self.pos += 1;
                Ok(RationalFunction::x())
            }
            Some(b'(') => {
                let open = self.pos;
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(err(self.pos, format!("unclosed parenthesis opened at byte {open}")));
                }
                self.pos += 1;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => {
                let n = self.integer()?;
                Ok(RationalFunction::constant(Rat::from_integer(n)))
            }
            Some(c) => Err(err(self.pos, format!("unexpected character {:?}", c as char))),
            None => Err(err(self.pos, "unexpected end of input")),
        }
    }
}

pub fn parse_rational_function(s: &str) -> Result<RationalFunction> {
    let mut p = Parser { src: s.as_bytes(), pos: 0 };
    if p.peek().is_none() {
        return Err(err(0, "empty expression"));
    }
    let out = p.expr()?;
    if let Some(c) = p.peek() {
        return Err(err(p.pos, format!("trailing input starting with {:?}", c as char)));
    }
    Ok(out)
}

impl std::str::FromStr for RationalFunction {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        parse_rational_function(s)
    }
}
