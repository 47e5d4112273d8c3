//! Polynomial text format: `3*x1^2*x2 + 4`, with `x`, `y`, `z` accepted as
//! aliases for `x1`, `x2`, `x3`. Parentheses, unary minus, integer powers and
//! division by nonzero constants are accepted on input; output is always the
//! canonical flat form in descending graded-lex order.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Signed;

use super::field::{Field, Scalar};
use super::monomial::Monomial;
use super::multipoly::MultiPoly;
use crate::error::{Error, Result};

/// Parses `s` as a polynomial in `nvars` variables.
pub fn parse_poly(field: Field, nvars: usize, s: &str) -> Result<MultiPoly> {
    let mut p = Parser {
        src: s.as_bytes(),
        pos: 0,
        field,
        nvars,
    };
    let out = p.expr()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(out)
}

/// Parses `s`, taking the variable count from the highest variable used
/// (at least `min_vars`).
pub fn parse_poly_auto(field: Field, min_vars: usize, s: &str) -> Result<MultiPoly> {
    let n = max_var_index(s)?.max(min_vars).max(1);
    parse_poly(field, n, s)
}

fn max_var_index(s: &str) -> Result<usize> {
    let b = s.as_bytes();
    let mut best = 0;
    let mut i = 0;
    while i < b.len() {
        match b[i] {
            b'x' | b'y' | b'z' => {
                let c = b[i];
                i += 1;
                let start = i;
                while i < b.len() && b[i].is_ascii_digit() {
                    i += 1;
                }
                let idx = if c == b'x' && i > start {
                    s[start..i]
                        .parse::<usize>()
                        .map_err(|e| Error::Parse(format!("bad variable index: {e}")))?
                } else {
                    (c - b'x') as usize + 1
                };
                best = best.max(idx);
            }
            _ => i += 1,
        }
    }
    Ok(best)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    field: Field,
    nvars: usize,
}

impl Parser<'_> {
    fn err(&self, msg: &str) -> Error {
        Error::Parse(format!("{msg} at offset {}", self.pos))
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

    fn expr(&mut self) -> Result<MultiPoly> {
        let mut acc = self.term()?;
        while let Some(c @ (b'+' | b'-')) = self.peek() {
            self.pos += 1;
            let t = self.term()?;
            acc = if c == b'+' { &acc + &t } else { &acc - &t };
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<MultiPoly> {
        let mut acc = self.unary()?;
        while let Some(c @ (b'*' | b'/')) = self.peek() {
            self.pos += 1;
            let rhs = self.unary()?;
            if c == b'*' {
                acc = &acc * &rhs;
            } else {
                if !rhs.is_constant() || rhs.is_zero() {
                    return Err(self.err("division only by nonzero constants"));
                }
                let inv = self.field.inv(&rhs.constant_term()).expect("nonzero constant");
                acc = acc.scale(&inv);
            }
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<MultiPoly> {
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                Ok(-&self.unary()?)
            }
            Some(b'+') => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<MultiPoly> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            self.skip_ws();
            let e = self.integer()?;
            let e = u32::try_from(e).map_err(|_| self.err("exponent too large"))?;
            return Ok(base.pow(e));
        }
        Ok(base)
    }

    fn integer(&mut self) -> Result<u64> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected an integer"));
        }
        std::str::from_utf8(&self.src[start..self.pos])
            .unwrap()
            .parse::<u64>()
            .map_err(|_| self.err("integer out of range"))
    }

    fn atom(&mut self) -> Result<MultiPoly> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.err("expected `)`"));
                }
                self.pos += 1;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => {
                let start = self.pos;
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
                let digits = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                let v: BigInt = digits.parse().map_err(|_| self.err("bad number"))?;
                Ok(MultiPoly::constant(self.field, self.nvars, self.field.from_bigint(&v)))
            }
            Some(c @ (b'x' | b'y' | b'z')) => {
                self.pos += 1;
                let start = self.pos;
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
                let idx = if c == b'x' && self.pos > start {
                    let k = std::str::from_utf8(&self.src[start..self.pos])
                        .unwrap()
                        .parse::<usize>()
                        .map_err(|_| self.err("bad variable index"))?;
                    if k == 0 {
                        return Err(self.err("variables are numbered from x1"));
                    }
                    k - 1
                } else if self.pos > start {
                    return Err(self.err("only `x` takes a numeric index"));
                } else {
                    (c - b'x') as usize
                };
                if idx >= self.nvars {
                    return Err(self.err(&format!("variable x{} exceeds {} variables", idx + 1, self.nvars)));
                }
                Ok(MultiPoly::var(self.field, self.nvars, idx))
            }
            Some(_) => Err(self.err("unexpected character")),
            None => Err(self.err("unexpected end of input")),
        }
    }
}

fn split_sign(c: &Scalar) -> (bool, Scalar) {
    match c {
        Scalar::Rat(r) if r.is_negative() => (true, Scalar::Rat(-r)),
        _ => (false, c.clone()),
    }
}

fn format_monomial(m: &Monomial) -> String {
    m.exps()
        .iter()
        .enumerate()
        .filter(|(_, &e)| e > 0)
        .map(|(j, &e)| if e == 1 { format!("x{}", j + 1) } else { format!("x{}^{e}", j + 1) })
        .collect::<Vec<_>>()
        .join("*")
}

/// Canonical text form. Rational coefficients print as `num/den`, which
/// parses back as a division by a constant.
pub fn format_poly(p: &MultiPoly) -> String {
    if p.is_zero() {
        return "0".into();
    }
    let one = p.field().one();
    let mut out = String::new();
    for (i, (m, c)) in p.terms().rev().enumerate() {
        let (neg, abs) = split_sign(c);
        match (i, neg) {
            (0, true) => out.push('-'),
            (0, false) => {}
            (_, true) => out.push_str(" - "),
            (_, false) => out.push_str(" + "),
        }
        let mono = format_monomial(m);
        if mono.is_empty() {
            out.push_str(&abs.to_string());
        } else if abs == one {
            out.push_str(&mono);
        } else {
            out.push_str(&format!("{abs}*{mono}"));
        }
    }
    out
}

/// Parses a factor list such as `(x-y)^2*(x+y)*z`: top-level `*`-separated
/// factors, each optionally raised to a power that becomes its multiplicity.
pub fn parse_factor_list(field: Field, nvars: usize, s: &str) -> Result<Vec<(MultiPoly, u32)>> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    let bytes = s.as_bytes();
    let mut pieces = Vec::new();
    for (i, &c) in bytes.iter().enumerate() {
        match c {
            b'(' => depth += 1,
            b')' => depth -= 1,
            b'*' if depth == 0 => {
                pieces.push(&s[start..i]);
                start = i + 1;
            }
            _ => {}
        }
        if depth < 0 {
            return Err(Error::Parse(format!("unbalanced parentheses in `{s}`")));
        }
    }
    if depth != 0 {
        return Err(Error::Parse(format!("unbalanced parentheses in `{s}`")));
    }
    pieces.push(&s[start..]);
    for piece in pieces {
        let piece = piece.trim();
        if piece.is_empty() {
            return Err(Error::Parse(format!("empty factor in `{s}`")));
        }
        // trailing `^k` outside any parentheses is the multiplicity
        let (body, mult) = match piece.rfind('^') {
            Some(k) if !piece[k..].contains(')') && piece[..k].ends_with(')') => {
                let m = piece[k + 1..]
                    .trim()
                    .parse::<u32>()
                    .map_err(|e| Error::Parse(format!("bad multiplicity in `{piece}`: {e}")))?;
                (&piece[..k], m)
            }
            _ => (piece, 1),
        };
        out.push((parse_poly(field, nvars, body)?, mult));
    }
    Ok(out)
}

/// Parses a rational number written as an integer or `num/den`.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    super::field::parse_ratio(s)
}
