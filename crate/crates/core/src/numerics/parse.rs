//! Parser for univariate polynomials written like `10*n^2 - 6*n + 1`.
//!
//! Grammar (whitespace ignored):
//!
//! ```text
//! poly   := sign? term (("+" | "-") sign? term)*
//! term   := factor ("*" factor)*
//! factor := integer ("/" integer)? | var ("^" integer)?
//! ```
//!
//! Errors carry the character position in the original text, offset by
//! `base` so callers embedding a polynomial in a larger string can report
//! absolute positions.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::poly::QPoly;
use super::rational::Q;
use crate::error::{Error, Result};

pub(crate) struct Cursor {
    chars: Vec<(usize, char)>,
    i: usize,
    len: usize,
    base: usize,
}

impl Cursor {
    pub(crate) fn new(src: &str, base: usize) -> Self {
        let chars: Vec<(usize, char)> = src.chars().enumerate().filter(|(_, c)| !c.is_whitespace()).collect();
        let len = src.chars().count();
        Cursor { chars, i: 0, len, base }
    }

    pub(crate) fn pos(&self) -> usize {
        self.base + self.chars.get(self.i).map_or(self.len, |c| c.0)
    }

    pub(crate) fn peek(&self) -> Option<char> {
        self.chars.get(self.i).map(|c| c.1)
    }

    pub(crate) fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.i += 1;
            true
        } else {
            false
        }
    }

    pub(crate) fn at_end(&self) -> bool {
        self.i >= self.chars.len()
    }

    pub(crate) fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Parse { pos: self.pos(), msg: msg.into() })
    }

    pub(crate) fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            self.err(format!("expected '{c}'"))
        }
    }

    pub(crate) fn integer(&mut self) -> Result<BigInt> {
        let neg = self.eat('-');
        let mut s = String::new();
        while let Some(c) = self.peek().filter(char::is_ascii_digit) {
            s.push(c);
            self.i += 1;
        }
        if s.is_empty() {
            return self.err("expected digits");
        }
        let v: BigInt = s.parse().expect("digits");
        Ok(if neg { -v } else { v })
    }

    pub(crate) fn small_integer(&mut self) -> Result<i64> {
        let at = self.pos();
        let v = self.integer()?;
        i64::try_from(v).map_err(|_| Error::Parse { pos: at, msg: "exponent out of range".into() })
    }

    /// Unsigned rational `p` or `p/q`.
    pub(crate) fn rational(&mut self) -> Result<Q> {
        let n = self.integer()?;
        if self.eat('/') {
            let at = self.pos();
            let d = self.integer()?;
            if d.is_zero() {
                return Err(Error::Parse { pos: at, msg: "zero denominator".into() });
            }
            Ok(Q::new(n, d))
        } else {
            Ok(Q::from_integer(n))
        }
    }

    /// Parse a polynomial in `var`, stopping at the first character that
    /// cannot continue it.
    pub(crate) fn poly(&mut self, var: char) -> Result<QPoly> {
        let mut acc = QPoly::zero();
        let mut sign = Q::one();
        if self.eat('-') {
            sign = -sign;
        } else {
            self.eat('+');
        }
        loop {
            let t = self.term(var)?;
            acc = &acc + &t.scale(&sign);
            sign = match self.peek() {
                Some('+') => Q::one(),
                Some('-') => -Q::one(),
                _ => break,
            };
            self.i += 1;
            // allow "+ -3" as printed by the renderer
            if self.eat('-') {
                sign = -sign;
            }
        }
        Ok(acc)
    }

    fn term(&mut self, var: char) -> Result<QPoly> {
        let mut acc = self.factor(var)?;
        while self.eat('*') {
            acc = &acc * &self.factor(var)?;
        }
        Ok(acc)
    }

    fn factor(&mut self, var: char) -> Result<QPoly> {
        match self.peek() {
            Some(c) if c == var => {
                self.i += 1;
                let e = if self.eat('^') {
                    let at = self.pos();
                    let e = self.small_integer()?;
                    if e < 0 {
                        return Err(Error::Parse { pos: at, msg: "negative exponent".into() });
                    }
                    e as usize
                } else {
                    1
                };
                Ok(QPoly::x().pow(e))
            }
            Some(c) if c.is_ascii_digit() => Ok(QPoly::constant(self.rational()?)),
            Some(c) => self.err(format!("unexpected '{c}'")),
            None => self.err("unexpected end of input"),
        }
    }
}

/// Parse a whole string as a polynomial in `var`.
pub fn parse_poly(text: &str, var: char) -> Result<QPoly> {
    let mut cur = Cursor::new(text, 0);
    if cur.at_end() {
        return cur.err("empty polynomial");
    }
    let p = cur.poly(var)?;
    if !cur.at_end() {
        return cur.err(format!("unexpected '{}'", cur.peek().unwrap_or(' ')));
    }
    Ok(p)
}
