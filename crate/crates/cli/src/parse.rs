//! Recursive-descent parser for distribution expressions.
//!
//! ```text
//! expr     := term (('*' | '/') term)*
//! term     := factor ('^' exponent)?
//! exponent := rational | '(' rational ')'
//! factor   := atom | '(' expr ')'
//!           | 'shift(' expr ',' rational ')'
//!           | 'scale(' expr ',' rational ')'
//!           | 'sum(' expr ',' integer ')'
//! atom     := Name '(' rational (',' rational)* ')'
//! rational := ['-' | '+'] integer ('/' integer)?
//! ```
//!
//! `a / b` is read as `a * b^-1`. Positions in errors are byte offsets.

use num_bigint::BigInt;
use stein_core::catalog::{AtomKind, DistExpr};
use stein_core::{Rational, Result, SteinError};

pub fn parse_expression(text: &str) -> Result<DistExpr> {
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
    };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(e)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn err(&self, msg: impl Into<String>) -> SteinError {
        SteinError::Parse {
            pos: self.pos,
            msg: msg.into(),
        }
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

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.err(format!("expected '{}'", c as char)))
        }
    }

    fn expr(&mut self) -> Result<DistExpr> {
        let mut fs = vec![self.term()?];
        loop {
            if self.eat(b'*') {
                fs.push(self.term()?);
            } else if self.eat(b'/') {
                fs.push(self.term()?.power(Rational::from_integer((-1).into())));
            } else {
                break;
            }
        }
        Ok(if fs.len() == 1 {
            fs.pop().unwrap()
        } else {
            DistExpr::product(fs)
        })
    }

    fn term(&mut self) -> Result<DistExpr> {
        let f = self.factor()?;
        if !self.eat(b'^') {
            return Ok(f);
        }
        let g = if self.eat(b'(') {
            let g = self.rational()?;
            self.expect(b')')?;
            g
        } else {
            self.rational()?
        };
        if self.peek() == Some(b'^') {
            return Err(self.err("chained '^' needs parentheses"));
        }
        Ok(f.power(g))
    }

    fn factor(&mut self) -> Result<DistExpr> {
        if self.eat(b'(') {
            let e = self.expr()?;
            self.expect(b')')?;
            return Ok(e);
        }
        let start = self.pos;
        let name = self.ident()?;
        match name.as_str() {
            "shift" | "scale" | "sum" => {
                self.expect(b'(')?;
                let e = self.expr()?;
                self.expect(b',')?;
                let arg_pos = self.pos;
                let c = self.rational()?;
                self.expect(b')')?;
                Ok(match name.as_str() {
                    "shift" => e.shift(c),
                    "scale" => e.scale(c),
                    _ => {
                        let n = c
                            .is_integer()
                            .then(|| u32::try_from(c.numer()).ok())
                            .flatten()
                            .filter(|&n| n > 0);
                        let Some(n) = n else {
                            return Err(SteinError::Parse {
                                pos: arg_pos,
                                msg: "sum needs a positive integer count".into(),
                            });
                        };
                        e.sum_iid(n)
                    }
                })
            }
            _ => {
                if !AtomKind::NAMES.iter().any(|(n, _)| *n == name) {
                    return Err(SteinError::Parse {
                        pos: start,
                        msg: format!("unknown distribution {name:?}"),
                    });
                }
                self.expect(b'(')?;
                let mut ps = vec![self.rational()?];
                while self.eat(b',') {
                    ps.push(self.rational()?);
                }
                self.expect(b')')?;
                AtomKind::from_name(&name, &ps)
                    .map(DistExpr::Atom)
                    .map_err(|e| SteinError::Parse {
                        pos: start,
                        msg: e.to_string(),
                    })
            }
        }
    }

    fn ident(&mut self) -> Result<String> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len()
            && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
        {
            self.pos += 1;
        }
        if start == self.pos || self.src[start].is_ascii_digit() {
            self.pos = start;
            return Err(self.err("expected a distribution name or '('"));
        }
        Ok(String::from_utf8_lossy(&self.src[start..self.pos]).into_owned())
    }

    fn integer(&mut self) -> Result<BigInt> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected an integer"));
        }
        Ok(std::str::from_utf8(&self.src[start..self.pos])
            .unwrap()
            .parse()
            .unwrap())
    }

    fn rational(&mut self) -> Result<Rational> {
        let neg = if self.eat(b'-') {
            true
        } else {
            self.eat(b'+');
            false
        };
        let n = self.integer()?;
        // a '/' only belongs to the number when a digit follows
        let save = self.pos;
        let d = if self.eat(b'/') && matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            let at = self.pos;
            let d = self.integer()?;
            if d == BigInt::from(0) {
                self.pos = at;
                return Err(self.err("zero denominator"));
            }
            d
        } else {
            self.pos = save;
            BigInt::from(1)
        };
        let q = Rational::new(n, d);
        Ok(if neg { -q } else { q })
    }
}
