//! Expression parser for elements of `Aₙ(k)`.
//!
//! ```text
//! expr   := ['-'] term (('+' | '-') term)*
//! term   := factor ('*' factor)*
//! factor := atom ('^' uint)?
//! atom   := 'z' uint | uint | 't' | '(' expr ')'
//! ```
//!
//! `*` is the noncommutative product and is never implied by juxtaposition.
//! `t` is the generator of `F_{p^m}` over `F_p` and is only accepted when
//! `m > 1`.

use crate::error::{Error, Result};
use crate::weyl::{Algebra, WeylK};

/// Parses `src` as an element of `Aₙ(k)`.
pub fn parse_expr(src: &str, alg: &Algebra) -> Result<WeylK> {
    parse_expr_at(src, alg, 1, 1)
}

/// As [`parse_expr`], reporting positions relative to `line` and the column
/// at which `src` starts.
pub fn parse_expr_at(src: &str, alg: &Algebra, line: usize, col: usize) -> Result<WeylK> {
    let mut p = Parser {
        chars: src.chars().collect(),
        pos: 0,
        alg,
        line,
        col,
    };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos < p.chars.len() {
        return Err(p.error("operator or end of input"));
    }
    Ok(e)
}

struct Parser<'a> {
    chars: Vec<char>,
    pos: usize,
    alg: &'a Algebra,
    line: usize,
    col: usize,
}

impl Parser<'_> {
    fn error(&self, expected: &str) -> Error {
        Error::SyntaxError {
            line: self.line,
            col: self.col + self.pos,
            expected: expected.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<WeylK> {
        let mut acc = if self.peek() == Some('-') {
            self.pos += 1;
            -self.term()?
        } else {
            self.term()?
        };
        loop {
            match self.peek() {
                Some('+') => {
                    self.pos += 1;
                    acc = &acc + &self.term()?;
                }
                Some('-') => {
                    self.pos += 1;
                    acc = &acc - &self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<WeylK> {
        let mut acc = self.factor()?;
        while self.peek() == Some('*') {
            self.pos += 1;
            acc = &acc * &self.factor()?;
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<WeylK> {
        let base = self.atom()?;
        if self.peek() == Some('^') {
            self.pos += 1;
            self.skip_ws();
            let e = self.uint("exponent")?;
            let e = u64::try_from(e).map_err(|_| self.error("exponent below 2^64"))?;
            return Ok(base.pow(e));
        }
        Ok(base)
    }

    fn uint(&mut self, what: &str) -> Result<u128> {
        let start = self.pos;
        while self.pos < self.chars.len() && self.chars[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error(what));
        }
        let s: String = self.chars[start..self.pos].iter().collect();
        s.parse::<u128>().map_err(|_| {
            self.pos = start;
            self.error("integer below 2^128")
        })
    }

    fn atom(&mut self) -> Result<WeylK> {
        match self.peek() {
            Some('z') => {
                let start = self.pos;
                self.pos += 1;
                let idx = self.uint("generator index after 'z'")?;
                let nv = self.alg.nvars() as u128;
                if idx == 0 || idx > nv {
                    let name: String = self.chars[start..self.pos].iter().collect();
                    return Err(Error::UnknownVariable(name));
                }
                Ok(WeylK::generator(self.alg, idx as usize - 1))
            }
            Some('t') => {
                if self.alg.field().m() == 1 {
                    return Err(Error::UnknownVariable("t".into()));
                }
                self.pos += 1;
                Ok(WeylK::constant(self.alg, self.alg.field().generator()))
            }
            Some('(') => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(')') {
                    return Err(self.error("')'"));
                }
                self.pos += 1;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => {
                let v = self.uint("integer")?;
                let p = self.alg.p() as u128;
                Ok(WeylK::from_int(self.alg, (v % p) as i64))
            }
            _ => Err(self.error("'z<index>', integer, 't' or '('")),
        }
    }
}
