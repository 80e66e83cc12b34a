//! Recursive-descent parsers for the two expression languages of the CLI.
//!
//! Weyl context: `D` (d/dz), `z`, rationals, `+ - * ^`, juxtaposition as
//! composition, parentheses and `[A,B]` commutators.
//!
//! Jets context: `p3`, `t2`, rationals, `+ - * ^`, parentheses, and operator
//! application `Dx(e)`, `Dt2(e)`, `T(e)`, `V(m,j)(e)`; an operator may carry a
//! power, as in `T^2(p0)`.

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::jets::{apply_T, apply_V, d_t, total_x, JetExpression, JetWindow};
use crate::rings::Rational;
use crate::weyl::WeylElement;

struct Cursor<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn new(src: &'a str) -> Result<Self> {
        let c = Cursor { src, pos: 0 };
        if src.trim().is_empty() {
            return Err(c.syntax(0, "empty expression"));
        }
        Ok(c)
    }

    fn syntax(&self, offset: usize, message: &str) -> Error {
        Error::Syntax {
            offset,
            message: message.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.src[self.pos..].chars().next() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.src[self.pos..].chars().next()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            let found = self.describe_here();
            Err(self.syntax(self.pos, &format!("expected '{c}', found {found}")))
        }
    }

    fn describe_here(&mut self) -> String {
        match self.peek() {
            Some(c) => format!("'{c}'"),
            None => "end of input".to_string(),
        }
    }

    fn finish(&mut self) -> Result<()> {
        match self.peek() {
            None => Ok(()),
            Some(c) => Err(self.syntax(self.pos, &format!("unexpected '{c}'"))),
        }
    }

    fn uint(&mut self) -> Result<u32> {
        self.skip_ws();
        let start = self.pos;
        let digits = self.src[start..].chars().take_while(char::is_ascii_digit).count();
        if digits == 0 {
            let found = self.describe_here();
            return Err(self.syntax(start, &format!("expected integer, found {found}")));
        }
        self.pos += digits;
        self.src[start..self.pos]
            .parse()
            .map_err(|_| self.syntax(start, "integer out of range"))
    }

    /// `n` or `n/m`.
    fn rational(&mut self) -> Result<Rational> {
        self.skip_ws();
        let start = self.pos;
        let digits = self.src[start..].chars().take_while(char::is_ascii_digit).count();
        self.pos += digits;
        let num: BigInt = self.src[start..self.pos].parse().expect("digits");
        if self.eat('/') {
            let ds = self.pos;
            self.skip_ws();
            let dstart = self.pos;
            let dd = self.src[dstart..].chars().take_while(char::is_ascii_digit).count();
            if dd == 0 {
                return Err(self.syntax(ds, "expected denominator"));
            }
            self.pos += dd;
            let den: BigInt = self.src[dstart..self.pos].parse().expect("digits");
            if den == BigInt::from(0) {
                return Err(self.syntax(dstart, "zero denominator"));
            }
            return Ok(Rational::from_big(num, den));
        }
        Ok(Rational::from_big(num, BigInt::from(1)))
    }

    fn ident(&mut self) -> (usize, &'a str) {
        self.skip_ws();
        let start = self.pos;
        let len: usize = self.src[start..]
            .chars()
            .take_while(|c| c.is_ascii_alphanumeric() || *c == '_')
            .map(char::len_utf8)
            .sum();
        self.pos += len;
        (start, &self.src[start..self.pos])
    }
}

/// Parses a Weyl-algebra expression.
pub fn parse_weyl(src: &str) -> Result<WeylElement> {
    let mut c = Cursor::new(src)?;
    let e = weyl_sum(&mut c)?;
    c.finish()?;
    Ok(e)
}

fn weyl_sum(c: &mut Cursor) -> Result<WeylElement> {
    let mut acc = if c.eat('-') {
        weyl_product(c)?.scale(&Rational::from(-1))
    } else {
        c.eat('+');
        weyl_product(c)?
    };
    loop {
        if c.eat('+') {
            acc = acc.add(&weyl_product(c)?);
        } else if c.eat('-') {
            acc = acc.sub(&weyl_product(c)?);
        } else {
            return Ok(acc);
        }
    }
}

fn starts_weyl_factor(ch: Option<char>) -> bool {
    matches!(ch, Some('D' | 'z' | '(' | '[')) || ch.is_some_and(|c| c.is_ascii_digit())
}

fn weyl_product(c: &mut Cursor) -> Result<WeylElement> {
    let mut acc = weyl_power(c)?;
    loop {
        if c.eat('*') {
            acc = acc.compose(&weyl_power(c)?);
        } else if starts_weyl_factor(c.peek()) {
            acc = acc.compose(&weyl_power(c)?);
        } else {
            return Ok(acc);
        }
    }
}

fn weyl_power(c: &mut Cursor) -> Result<WeylElement> {
    let base = weyl_atom(c)?;
    if c.eat('^') {
        let n = c.uint()?;
        return Ok(base.pow(n));
    }
    Ok(base)
}

fn weyl_atom(c: &mut Cursor) -> Result<WeylElement> {
    match c.peek() {
        Some('D') => {
            c.pos += 1;
            Ok(WeylElement::d())
        }
        Some('z') => {
            c.pos += 1;
            Ok(WeylElement::z())
        }
        Some('(') => {
            c.pos += 1;
            let e = weyl_sum(c)?;
            c.expect(')')?;
            Ok(e)
        }
        Some('[') => {
            c.pos += 1;
            let a = weyl_sum(c)?;
            c.expect(',')?;
            let b = weyl_sum(c)?;
            c.expect(']')?;
            Ok(a.commutator(&b))
        }
        Some(ch) if ch.is_ascii_digit() => Ok(WeylElement::scalar(c.rational()?)),
        Some(ch) if ch.is_alphabetic() => {
            let (start, name) = c.ident();
            Err(Error::UnknownSymbol {
                offset: start,
                symbol: name.to_string(),
            })
        }
        _ => {
            let found = c.describe_here();
            Err(c.syntax(c.pos, &format!("expected operand, found {found}")))
        }
    }
}

/// Parses a jet expression, evaluating operator applications inside `window`.
pub fn parse_jets(src: &str, window: JetWindow) -> Result<JetExpression> {
    let mut c = Cursor::new(src)?;
    let e = jet_sum(&mut c, window)?;
    c.finish()?;
    Ok(e)
}

fn jet_sum(c: &mut Cursor, w: JetWindow) -> Result<JetExpression> {
    let mut acc = if c.eat('-') {
        jet_product(c, w)?.scale(&Rational::from(-1))
    } else {
        c.eat('+');
        jet_product(c, w)?
    };
    loop {
        if c.eat('+') {
            acc = acc.add(&jet_product(c, w)?);
        } else if c.eat('-') {
            acc = acc.sub(&jet_product(c, w)?);
        } else {
            return Ok(acc);
        }
    }
}

fn jet_product(c: &mut Cursor, w: JetWindow) -> Result<JetExpression> {
    let mut acc = jet_power(c, w)?;
    while c.eat('*') {
        acc = acc.mul(&jet_power(c, w)?);
    }
    Ok(acc)
}

fn jet_power(c: &mut Cursor, w: JetWindow) -> Result<JetExpression> {
    let base = jet_atom(c, w)?;
    if c.eat('^') {
        let n = c.uint()?;
        let mut acc = JetExpression::constant(Rational::one(), w);
        for _ in 0..n {
            acc = acc.mul(&base);
        }
        return Ok(acc);
    }
    Ok(base)
}

enum JetOperator {
    X,
    Flow(u32),
    T,
    V(u32, u32),
}

impl JetOperator {
    fn apply(&self, e: &JetExpression) -> Result<JetExpression> {
        match *self {
            JetOperator::X => total_x(e),
            JetOperator::Flow(i) => d_t(i, e),
            JetOperator::T => apply_T(e),
            JetOperator::V(m, j) => apply_V(m, j, e),
        }
    }
}

fn index_suffix(c: &Cursor, start: usize, name: &str, prefix: &str) -> Result<Option<u32>> {
    let Some(rest) = name.strip_prefix(prefix) else { return Ok(None) };
    if rest.is_empty() || !rest.chars().all(|ch| ch.is_ascii_digit()) {
        return Ok(None);
    }
    rest.parse()
        .map(Some)
        .map_err(|_| c.syntax(start + prefix.len(), "index out of range"))
}

fn jet_atom(c: &mut Cursor, w: JetWindow) -> Result<JetExpression> {
    match c.peek() {
        Some('(') => {
            c.pos += 1;
            let e = jet_sum(c, w)?;
            c.expect(')')?;
            Ok(e)
        }
        Some(ch) if ch.is_ascii_digit() => Ok(JetExpression::constant(c.rational()?, w)),
        Some(ch) if ch.is_alphabetic() => {
            let (start, name) = c.ident();
            if let Some(j) = index_suffix(c, start, name, "p")? {
                return JetExpression::p(j, w);
            }
            if let Some(k) = index_suffix(c, start, name, "t")? {
                return JetExpression::t(k, w);
            }
            let op = match name {
                "Dx" => JetOperator::X,
                "T" => JetOperator::T,
                "V" => {
                    c.expect('(')?;
                    let m = c.uint()?;
                    c.expect(',')?;
                    let j = c.uint()?;
                    c.expect(')')?;
                    JetOperator::V(m, j)
                }
                _ => match index_suffix(c, start, name, "Dt")? {
                    Some(i) if i >= 1 => JetOperator::Flow(i),
                    _ => {
                        return Err(Error::UnknownSymbol {
                            offset: start,
                            symbol: name.to_string(),
                        })
                    }
                },
            };
            let times = if c.eat('^') { c.uint()? } else { 1 };
            c.expect('(')?;
            let mut e = jet_sum(c, w)?;
            c.expect(')')?;
            for _ in 0..times {
                e = op.apply(&e)?;
            }
            Ok(e)
        }
        _ => {
            let found = c.describe_here();
            Err(c.syntax(c.pos, &format!("expected operand, found {found}")))
        }
    }
}
