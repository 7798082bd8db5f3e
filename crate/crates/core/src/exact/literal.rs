//! Scalar literals: rationals (`"3/4"`, `"-0.5"`) and polynomial expressions
//! in a declared field symbol (`"1 + 2*t"`, `"(t - 1)^2/3"`).

use std::sync::Arc;

use super::field::NumberField;
use super::rat::parse_rat;
use super::scalar::Scalar;
use super::ExactError;

pub fn parse_scalar(src: &str, field: Option<&Arc<NumberField>>) -> Result<Scalar, ExactError> {
    let mut p = Parser { src, pos: 0, field };
    let v = p.expr()?;
    p.skip_ws();
    if p.pos != src.len() {
        return Err(p.error("trailing input"));
    }
    Ok(v)
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
    field: Option<&'a Arc<NumberField>>,
}

impl Parser<'_> {
    fn error(&self, what: &str) -> ExactError {
        ExactError::Parse(format!("{what} at byte {} in {:?}", self.pos, self.src))
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(char::is_whitespace) {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn eat(&mut self, c: char) -> bool {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Scalar, ExactError> {
        let mut acc = self.term()?;
        loop {
            if self.eat('+') {
                acc = acc.checked_add(&self.term()?)?;
            } else if self.eat('-') {
                acc = acc.checked_sub(&self.term()?)?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Scalar, ExactError> {
        let mut acc = self.unary()?;
        loop {
            if self.eat('*') {
                acc = acc.checked_mul(&self.unary()?)?;
            } else if self.eat('/') {
                acc = acc.checked_div(&self.unary()?)?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<Scalar, ExactError> {
        if self.eat('-') {
            return Ok(-self.unary()?);
        }
        if self.eat('+') {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Scalar, ExactError> {
        let base = self.atom()?;
        if self.eat('^') {
            self.skip_ws();
            let start = self.pos;
            while self.peek().is_some_and(|c| c.is_ascii_digit()) {
                self.pos += 1;
            }
            let e: u32 = self.src[start..self.pos].parse().map_err(|_| self.error("expected exponent"))?;
            return Ok(base.pow(e));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Scalar, ExactError> {
        self.skip_ws();
        if self.eat('(') {
            let v = self.expr()?;
            if !self.eat(')') {
                return Err(self.error("expected ')'"));
            }
            return Ok(v);
        }
        let start = self.pos;
        match self.peek() {
            Some(c) if c.is_ascii_digit() || c == '.' => {
                while self.peek().is_some_and(|c| c.is_ascii_digit() || c == '.') {
                    self.pos += 1;
                }
                Ok(Scalar::Rat(parse_rat(&self.src[start..self.pos])?))
            }
            Some(c) if c.is_alphabetic() || c == '_' => {
                while self.peek().is_some_and(|c| c.is_alphanumeric() || c == '_') {
                    self.pos += self.peek().unwrap().len_utf8();
                }
                let name = &self.src[start..self.pos];
                match self.field {
                    Some(f) if f.symbol() == name => Ok(Scalar::generator(f)),
                    _ => Err(ExactError::Parse(format!("unknown symbol {name:?} in {:?}", self.src))),
                }
            }
            _ => Err(self.error("expected number, symbol or '('")),
        }
    }
}
