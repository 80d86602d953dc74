//! Text syntax for stochastic regular expressions.
//!
//! ```text
//! expr    := term ('+' term)*
//! term    := [NUMBER ':'] concat
//! concat  := postfix+
//! postfix := primary ('*' '[' NUMBER ']')*
//! primary := LETTER | '"' chars '"' | '(' ')' | '(' expr ')'
//! NUMBER  := INT '/' INT | INT | decimal
//! ```
//!
//! Sums of several terms need a weight on every term, and the weights must
//! add up to 1. Concatenation nests to the right. The printer flattens nested
//! choices into one weighted sum, so `print(parse(print(r))) == print(r)`.

use crate::error::{Error, Result};
use crate::numerics::{format_scalar, parse_rational, Rational, Scalar};

use super::{Sre, SreNode};

pub fn print_sre<S: Scalar>(r: &Sre<S>) -> String {
    let mut out = String::new();
    expr(r, &mut out);
    out
}

fn expr<S: Scalar>(r: &Sre<S>, out: &mut String) {
    if !matches!(r.node(), SreNode::Choice { .. }) {
        concat(r, out);
        return;
    }
    let mut weight = S::one();
    let mut node = r;
    let mut first = true;
    loop {
        let (w, term, next) = match node.node() {
            SreNode::Choice { alpha, left, right } => {
                (weight.clone() * alpha, left, Some((S::one() - alpha, right)))
            }
            _ => (weight.clone(), node, None),
        };
        if !first {
            out.push_str(" + ");
        }
        first = false;
        out.push_str(&format_scalar(&w));
        out.push(':');
        if matches!(term.node(), SreNode::Choice { .. }) {
            parenthesised(term, out);
        } else {
            concat(term, out);
        }
        match next {
            Some((rest, right)) => {
                weight = weight * &rest;
                node = right;
            }
            None => break,
        }
    }
}

fn concat<S: Scalar>(r: &Sre<S>, out: &mut String) {
    match r.node() {
        SreNode::Concat(l, rest) => {
            match l.node() {
                SreNode::Concat(..) | SreNode::Choice { .. } => parenthesised(l, out),
                _ => atom(l, out),
            }
            match rest.node() {
                SreNode::Choice { .. } => parenthesised(rest, out),
                _ => concat(rest, out),
            }
        }
        _ => atom(r, out),
    }
}

fn atom<S: Scalar>(r: &Sre<S>, out: &mut String) {
    match r.node() {
        SreNode::Empty => out.push_str("()"),
        SreNode::Dirac(s) => symbol(s, out),
        SreNode::Star { body, alpha } => {
            parenthesised(body, out);
            out.push_str("*[");
            out.push_str(&format_scalar(alpha));
            out.push(']');
        }
        SreNode::Choice { .. } | SreNode::Concat(..) => parenthesised(r, out),
    }
}

fn parenthesised<S: Scalar>(r: &Sre<S>, out: &mut String) {
    out.push('(');
    expr(r, out);
    out.push(')');
}

fn symbol(s: &str, out: &mut String) {
    let mut chars = s.chars();
    match (chars.next(), chars.next()) {
        (Some(c), None) if c.is_alphabetic() => out.push(c),
        _ => {
            out.push('"');
            for c in s.chars() {
                if c == '"' || c == '\\' {
                    out.push('\\');
                }
                out.push(c);
            }
            out.push('"');
        }
    }
}

/// Parse the text syntax. The result is not validated; see [`Sre::validate`].
pub fn parse_sre<S: Scalar>(text: &str) -> Result<Sre<S>> {
    let mut p = Parser {
        text,
        chars: text.char_indices().collect(),
        pos: 0,
    };
    let r = p.expr()?;
    p.skip_ws();
    if p.pos < p.chars.len() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(r.map_params(&|v: &Rational| S::from_rational(v)))
}

struct Parser<'a> {
    text: &'a str,
    chars: Vec<(usize, char)>,
    pos: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).map(|&(_, c)| c)
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(char::is_whitespace) {
            self.pos += 1;
        }
    }

    fn error(&self, message: &str) -> Error {
        let offset = self.chars.get(self.pos).map_or(self.text.len(), |&(o, _)| o);
        let before = &self.text[..offset];
        let line = before.matches('\n').count() + 1;
        let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
        Error::Parse {
            line,
            column,
            message: message.to_string(),
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(&format!("expected '{c}'")))
        }
    }

    fn expr(&mut self) -> Result<Sre<Rational>> {
        let mut terms = vec![self.term()?];
        loop {
            self.skip_ws();
            if self.peek() != Some('+') {
                break;
            }
            self.pos += 1;
            terms.push(self.term()?);
        }
        let start = self.pos;
        if terms.len() == 1 {
            let (w, r) = terms.pop().expect("one term");
            return match w {
                Some((w, _)) if w != Rational::one() => Err(self.error("a single term must have weight 1")),
                _ => Ok(r),
            };
        }
        let mut weighted = Vec::with_capacity(terms.len());
        let mut decimal = false;
        for (w, r) in terms {
            let Some((w, is_decimal)) = w else {
                self.pos = start;
                return Err(self.error("every term of a sum needs a weight"));
            };
            if !w.is_positive() {
                return Err(self.error("weights must be positive"));
            }
            decimal |= is_decimal;
            weighted.push((w, r));
        }
        let total = weighted.iter().fold(Rational::zero(), |acc, (w, _)| acc + w);
        let close = if decimal {
            (total.clone() - Rational::one()).abs_value().to_f64() <= 1e-9
        } else {
            total == Rational::one()
        };
        if !close {
            return Err(self.error(&format!("weights sum to {total}, not 1")));
        }
        let (mut tail, mut acc) = weighted.pop().expect("several terms");
        while let Some((w, r)) = weighted.pop() {
            let sum = w.clone() + &tail;
            acc = Sre::choice(w / &sum, r, acc);
            tail = sum;
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<(Option<(Rational, bool)>, Sre<Rational>)> {
        self.skip_ws();
        let weight = if self.peek().is_some_and(|c| c.is_ascii_digit() || c == '.') {
            let w = self.number()?;
            self.expect(':')?;
            Some(w)
        } else {
            None
        };
        Ok((weight, self.concat()?))
    }

    fn number(&mut self) -> Result<(Rational, bool)> {
        self.skip_ws();
        let start = self.pos;
        while self
            .peek()
            .is_some_and(|c| c.is_ascii_digit() || matches!(c, '/' | '.' | 'e' | 'E' | '-'))
        {
            self.pos += 1;
        }
        let raw: String = self.chars[start..self.pos].iter().map(|&(_, c)| c).collect();
        match parse_rational(&raw) {
            Some(v) => Ok((v, !raw.contains('/') && raw.contains(['.', 'e', 'E']))),
            None => {
                self.pos = start;
                Err(self.error(&format!("invalid number {raw:?}")))
            }
        }
    }

    fn concat(&mut self) -> Result<Sre<Rational>> {
        let mut parts = Vec::new();
        loop {
            self.skip_ws();
            match self.peek() {
                None | Some('+') | Some(')') => break,
                _ => parts.push(self.postfix()?),
            }
        }
        if parts.is_empty() {
            return Err(self.error("expected an expression"));
        }
        let mut acc = parts.pop().expect("nonempty");
        while let Some(p) = parts.pop() {
            acc = Sre::concat(p, acc);
        }
        Ok(acc)
    }

    fn postfix(&mut self) -> Result<Sre<Rational>> {
        let mut r = self.primary()?;
        loop {
            self.skip_ws();
            if self.peek() != Some('*') {
                return Ok(r);
            }
            self.pos += 1;
            self.expect('[')?;
            let (alpha, _) = self.number()?;
            self.expect(']')?;
            r = Sre::star(r, alpha);
        }
    }

    fn primary(&mut self) -> Result<Sre<Rational>> {
        self.skip_ws();
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                self.skip_ws();
                if self.peek() == Some(')') {
                    self.pos += 1;
                    return Ok(Sre::empty());
                }
                let r = self.expr()?;
                self.expect(')')?;
                Ok(r)
            }
            Some('"') => {
                self.pos += 1;
                let mut s = String::new();
                loop {
                    match self.peek() {
                        None => return Err(self.error("unterminated quoted symbol")),
                        Some('"') => {
                            self.pos += 1;
                            break;
                        }
                        Some('\\') => {
                            self.pos += 1;
                            match self.peek() {
                                Some(c) => s.push(c),
                                None => return Err(self.error("unterminated quoted symbol")),
                            }
                            self.pos += 1;
                        }
                        Some(c) => {
                            s.push(c);
                            self.pos += 1;
                        }
                    }
                }
                if s.is_empty() {
                    return Err(self.error("empty symbol"));
                }
                Ok(Sre::dirac(s))
            }
            Some(c) if c.is_alphabetic() => {
                self.pos += 1;
                Ok(Sre::dirac(c.to_string()))
            }
            Some(c) => Err(self.error(&format!("unexpected character '{c}'"))),
            None => Err(self.error("unexpected end of input")),
        }
    }
}
