use num_rational::Rational64;
use num_traits::{CheckedAdd, CheckedMul, One, Zero};

use super::field::PolyVectorField;
use crate::error::Error;

/// A rejected field text. Positions count characters from 0.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("at position {position}: expected {expected}, found {found}")]
    Syntax {
        position: usize,
        expected: String,
        found: String,
    },
    #[error("at position {position}: number too large")]
    Overflow { position: usize },
    #[error("at position {position}: unknown variable {name} for n = {n}")]
    UnknownVariable {
        position: usize,
        name: String,
        n: usize,
    },
    #[error("at position {position}: unknown component {name} for n = {n}")]
    UnknownComponent {
        position: usize,
        name: String,
        n: usize,
    },
}

type PResult<T> = std::result::Result<T, ParseError>;

/// Parses the text form of a field on `ℝⁿ` (grammar in the module docs).
pub fn parse_field(text: &str, n: usize) -> Result<PolyVectorField, Error> {
    let mut field = PolyVectorField::zero(n)?;
    let mut p = Parser {
        chars: text.chars().collect(),
        pos: 0,
        n,
    };
    p.field(&mut field)?;
    Ok(field)
}

struct Parser {
    chars: Vec<char>,
    pos: usize,
    n: usize,
}

fn is_sign(c: char) -> bool {
    matches!(c, '+' | '-' | '−')
}

impl Parser {
    fn skip_ws(&mut self) {
        while self.chars.get(self.pos).is_some_and(|c| c.is_whitespace()) {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    /// Next character without skipping whitespace.
    fn peek_raw(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn found(&self) -> String {
        match self.chars.get(self.pos) {
            Some(c) => format!("{c:?}"),
            None => "end of input".to_string(),
        }
    }

    fn error<T>(&self, expected: &str) -> PResult<T> {
        Err(ParseError::Syntax {
            position: self.pos,
            expected: expected.to_string(),
            found: self.found(),
        })
    }

    fn expect(&mut self, c: char) -> PResult<()> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            self.error(&format!("{c:?}"))
        }
    }

    fn expect_raw(&mut self, s: &str) -> PResult<()> {
        for c in s.chars() {
            if self.peek_raw() != Some(c) {
                return self.error(&format!("{s:?}"));
            }
            self.pos += 1;
        }
        Ok(())
    }

    fn sign(&mut self) -> Option<i64> {
        match self.peek() {
            Some('+') => {
                self.pos += 1;
                Some(1)
            }
            Some('-' | '−') => {
                self.pos += 1;
                Some(-1)
            }
            _ => None,
        }
    }

    fn field(&mut self, out: &mut PolyVectorField) -> PResult<()> {
        let start = self.pos;
        if self.peek() == Some('0') {
            let save = self.pos;
            self.pos += 1;
            if self.peek().is_none() {
                return Ok(());
            }
            self.pos = save;
        }
        let mut sign = self.sign().unwrap_or(1);
        loop {
            self.term(sign, out)?;
            match self.peek() {
                None => break,
                Some(c) if is_sign(c) => sign = self.sign().expect("sign"),
                Some(_) => return self.error("'+', '-' or end of input"),
            }
        }
        debug_assert!(self.pos > start);
        Ok(())
    }

    fn term(&mut self, sign: i64, out: &mut PolyVectorField) -> PResult<()> {
        let mut coeff = Rational64::from_integer(sign);
        let mut a = vec![0u32; self.n - 1];
        let mut b = Rational64::zero();
        loop {
            let next = self.peek();
            let at = self.pos;
            match next {
                Some('d') => {
                    let component = self.deriv()?;
                    out.add_term(component, coeff, a, b)
                        .map_err(|_| ParseError::Overflow { position: at })?;
                    return Ok(());
                }
                Some('x') | Some('y') => self.var(&mut a, &mut b)?,
                Some(c) if c.is_ascii_digit() || c == '(' => {
                    let c = self.coeff()?;
                    coeff = coeff
                        .checked_mul(&c)
                        .ok_or(ParseError::Overflow { position: at })?;
                }
                _ => return self.error("a coefficient, a variable or d/dx<i>, d/dy"),
            }
            if self.peek() == Some('*') {
                self.pos += 1;
            }
        }
    }

    fn digits(&mut self) -> PResult<(i64, usize)> {
        let start = self.pos;
        let mut value: i64 = 0;
        while let Some(c) = self.peek_raw().filter(char::is_ascii_digit) {
            value = value
                .checked_mul(10)
                .and_then(|v| v.checked_add(c.to_digit(10).expect("digit") as i64))
                .ok_or(ParseError::Overflow { position: start })?;
            self.pos += 1;
        }
        if self.pos == start {
            return self.error("a digit");
        }
        Ok((value, self.pos - start))
    }

    /// `digits [ "." digits ] [ "/" digits ]`.
    fn number(&mut self) -> PResult<Rational64> {
        self.skip_ws();
        let start = self.pos;
        let overflow = ParseError::Overflow { position: start };
        let (int, _) = self.digits()?;
        let mut value = Rational64::from_integer(int);
        if self.peek_raw() == Some('.') {
            self.pos += 1;
            let (frac, len) = self.digits()?;
            let scale = 10i64
                .checked_pow(len as u32)
                .ok_or_else(|| overflow.clone())?;
            value = value
                .checked_add(&Rational64::new(frac, scale))
                .ok_or_else(|| overflow.clone())?;
        }
        if self.peek() == Some('/') {
            self.pos += 1;
            self.skip_ws();
            let at = self.pos;
            let (den, _) = self.digits()?;
            if den == 0 {
                self.pos = at;
                return self.error("a non-zero denominator");
            }
            value = value
                .checked_mul(&Rational64::new(1, den))
                .ok_or(overflow)?;
        }
        Ok(value)
    }

    fn coeff(&mut self) -> PResult<Rational64> {
        if self.peek() == Some('(') {
            self.pos += 1;
            let s = self.sign().unwrap_or(1);
            let v = self.number()?;
            self.expect(')')?;
            Ok(v * s)
        } else {
            self.number()
        }
    }

    fn var(&mut self, a: &mut [u32], b: &mut Rational64) -> PResult<()> {
        let c = self.peek().expect("variable");
        let start = self.pos;
        self.pos += 1;
        if c == 'x' {
            let (i, _) = self.digits()?;
            let name = format!("x{i}");
            if i < 1 || i as usize > self.n - 1 {
                return Err(ParseError::UnknownVariable {
                    position: start,
                    name,
                    n: self.n,
                });
            }
            let e = self.exponent()?;
            if !e.is_integer() || *e.numer() < 0 {
                return Err(ParseError::Syntax {
                    position: start,
                    expected: format!("a non-negative integer exponent for {name}"),
                    found: e.to_string(),
                });
            }
            let e = u32::try_from(*e.numer()).map_err(|_| ParseError::Overflow { position: start })?;
            let slot = &mut a[i as usize - 1];
            *slot = slot
                .checked_add(e)
                .ok_or(ParseError::Overflow { position: start })?;
        } else {
            let e = self.exponent()?;
            *b = b
                .checked_add(&e)
                .ok_or(ParseError::Overflow { position: start })?;
        }
        Ok(())
    }

    /// Optional `^` exponent; 1 when absent.
    fn exponent(&mut self) -> PResult<Rational64> {
        if self.peek() != Some('^') {
            return Ok(Rational64::one());
        }
        self.pos += 1;
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let s = self.sign().unwrap_or(1);
                self.skip_ws();
                let (num, _) = self.digits()?;
                let mut v = Rational64::from_integer(num);
                if self.peek() == Some('/') {
                    self.pos += 1;
                    self.skip_ws();
                    let at = self.pos;
                    let (den, _) = self.digits()?;
                    if den == 0 {
                        self.pos = at;
                        return self.error("a non-zero denominator");
                    }
                    v = Rational64::new(num, den);
                }
                self.expect(')')?;
                Ok(v * s)
            }
            Some('-' | '−') => {
                self.pos += 1;
                self.skip_ws();
                let (v, _) = self.digits()?;
                Ok(Rational64::from_integer(-v))
            }
            Some(c) if c.is_ascii_digit() => {
                let (v, _) = self.digits()?;
                Ok(Rational64::from_integer(v))
            }
            _ => self.error("an exponent"),
        }
    }

    /// `d/dx<i>` or `d/dy`, returning the component index.
    fn deriv(&mut self) -> PResult<usize> {
        let start = self.pos;
        self.expect_raw("d/d")?;
        match self.peek_raw() {
            Some('y') => {
                self.pos += 1;
                Ok(self.n)
            }
            Some('x') => {
                self.pos += 1;
                let (i, _) = self.digits()?;
                if i < 1 || i as usize > self.n - 1 {
                    return Err(ParseError::UnknownComponent {
                        position: start,
                        name: format!("d/dx{i}"),
                        n: self.n,
                    });
                }
                Ok(i as usize)
            }
            _ => self.error("'x' or 'y'"),
        }
    }
}
