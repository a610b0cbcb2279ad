//! Recursive-descent parser for law expressions.

use crate::law::{LawError, LawExpr};

pub(crate) struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    pub(crate) fn new(text: &'a str) -> Self {
        Parser { src: text.as_bytes(), pos: 0 }
    }

    fn err(&self, message: impl Into<String>) -> LawError {
        LawError::Syntax { position: self.pos, message: message.into() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expect(&mut self, c: u8) -> Result<(), LawError> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(format!("expected '{}'", c as char)))
        }
    }

    pub(crate) fn finish(mut self, expr: LawExpr) -> Result<LawExpr, LawError> {
        match self.peek() {
            None => Ok(expr),
            Some(c) => Err(self.err(format!("unexpected '{}'", c as char))),
        }
    }

    fn starts_atom(&mut self) -> bool {
        matches!(self.peek(), Some(b'x' | b'[' | b'(' | b'c'))
    }

    pub(crate) fn product(&mut self) -> Result<LawExpr, LawError> {
        let mut acc = self.power()?;
        loop {
            if self.peek() == Some(b'*') {
                self.pos += 1;
            } else if !self.starts_atom() {
                return Ok(acc);
            }
            let rhs = self.power()?;
            acc = LawExpr::Mul(Box::new(acc), Box::new(rhs));
        }
    }

    fn power(&mut self) -> Result<LawExpr, LawError> {
        let mut base = self.atom()?;
        while self.peek() == Some(b'^') {
            self.pos += 1;
            let n = self.exponent()?;
            base = if n == -1 { LawExpr::Inv(Box::new(base)) } else { LawExpr::Pow(Box::new(base), n) };
        }
        Ok(base)
    }

    fn exponent(&mut self) -> Result<i64, LawError> {
        self.skip_ws();
        let start = self.pos;
        let negative = self.src.get(self.pos) == Some(&b'-');
        if negative {
            self.pos += 1;
        }
        let digits_start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if digits_start == self.pos {
            self.pos = start;
            return Err(self.err("exponent must be an integer; write conj(A,B) for conjugation"));
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
        text.parse().map_err(|_| LawError::Syntax { position: start, message: "exponent out of range".into() })
    }

    fn atom(&mut self) -> Result<LawExpr, LawError> {
        match self.peek() {
            Some(b'x') => self.variable(),
            Some(b'(') => {
                self.pos += 1;
                let e = self.product()?;
                self.expect(b')')?;
                Ok(e)
            }
            Some(b'[') => {
                self.pos += 1;
                let mut acc = self.product()?;
                self.expect(b',')?;
                loop {
                    let rhs = self.product()?;
                    acc = LawExpr::Comm(Box::new(acc), Box::new(rhs));
                    match self.peek() {
                        Some(b',') => self.pos += 1,
                        Some(b']') => {
                            self.pos += 1;
                            return Ok(acc);
                        }
                        _ => return Err(self.err("expected ',' or ']'")),
                    }
                }
            }
            Some(b'c') => {
                if !self.src[self.pos..].starts_with(b"conj") {
                    return Err(self.err("unknown identifier"));
                }
                self.pos += 4;
                self.expect(b'(')?;
                let a = self.product()?;
                self.expect(b',')?;
                let b = self.product()?;
                self.expect(b')')?;
                Ok(LawExpr::Conj(Box::new(a), Box::new(b)))
            }
            Some(b'1') => Err(self.err("the trivial word is not a law")),
            Some(c) => Err(self.err(format!("unexpected '{}'", c as char))),
            None => Err(self.err("unexpected end of input")),
        }
    }

    fn variable(&mut self) -> Result<LawExpr, LawError> {
        let start = self.pos;
        self.pos += 1;
        let digits = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if digits == self.pos {
            return Err(LawError::Syntax { position: start, message: "variable needs an index, as in x1".into() });
        }
        let text = std::str::from_utf8(&self.src[digits..self.pos]).expect("ascii");
        match text.parse::<u32>() {
            Ok(i) if i >= 1 => Ok(LawExpr::Var(i)),
            _ => Err(LawError::Syntax { position: start, message: format!("invalid variable index {text}") }),
        }
    }
}
