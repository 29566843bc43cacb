//! Tiny arithmetic evaluator for numeric literals written in problem files
//! and interval brackets: `1/3`, `-inf`, `2*pi`, `sqrt(1/2)`, `2^-0.5`.

use crate::error::{Error, Result};

pub fn parse_scalar(src: &str) -> Result<f64> {
    let mut p = Parser {
        chars: src.chars().filter(|c| !c.is_whitespace()).collect(),
        pos: 0,
    };
    if p.chars.is_empty() {
        return Err(Error::Parse("empty numeric expression".into()));
    }
    let v = p.expr()?;
    if p.pos != p.chars.len() {
        return Err(Error::Parse(format!("trailing input in numeric expression `{src}`")));
    }
    if v.is_nan() {
        return Err(Error::Parse(format!("`{src}` is not a number")));
    }
    Ok(v)
}

struct Parser {
    chars: Vec<char>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<f64> {
        let mut v = self.term()?;
        loop {
            if self.eat('+') {
                v += self.term()?;
            } else if self.eat('-') {
                v -= self.term()?;
            } else {
                return Ok(v);
            }
        }
    }

    fn term(&mut self) -> Result<f64> {
        let mut v = self.unary()?;
        loop {
            if self.eat('*') {
                v *= self.unary()?;
            } else if self.eat('/') {
                v /= self.unary()?;
            } else {
                return Ok(v);
            }
        }
    }

    fn unary(&mut self) -> Result<f64> {
        if self.eat('-') {
            return Ok(-self.unary()?);
        }
        if self.eat('+') {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<f64> {
        let base = self.atom()?;
        if self.eat('^') {
            let exp = self.unary()?;
            return Ok(base.powf(exp));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<f64> {
        if self.eat('(') {
            let v = self.expr()?;
            if !self.eat(')') {
                return Err(Error::Parse("unbalanced parenthesis".into()));
            }
            return Ok(v);
        }
        let start = self.pos;
        if self.peek().is_some_and(|c| c.is_ascii_alphabetic()) {
            while self.peek().is_some_and(|c| c.is_ascii_alphanumeric()) {
                self.pos += 1;
            }
            let word: String = self.chars[start..self.pos].iter().collect();
            return match word.as_str() {
                "pi" => Ok(std::f64::consts::PI),
                "inf" => Ok(f64::INFINITY),
                "sqrt" => {
                    if !self.eat('(') {
                        return Err(Error::Parse("expected `(` after sqrt".into()));
                    }
                    let v = self.expr()?;
                    if !self.eat(')') {
                        return Err(Error::Parse("unbalanced parenthesis".into()));
                    }
                    Ok(v.sqrt())
                }
                other => Err(Error::Parse(format!("unknown identifier `{other}`"))),
            };
        }
        while self.peek().is_some_and(|c| c.is_ascii_digit() || c == '.') {
            self.pos += 1;
        }
        // exponent suffix, e.g. 1e-9
        if self.pos > start && matches!(self.peek(), Some('e' | 'E')) {
            let save = self.pos;
            self.pos += 1;
            if matches!(self.peek(), Some('+' | '-')) {
                self.pos += 1;
            }
            let digits = self.pos;
            while self.peek().is_some_and(|c| c.is_ascii_digit()) {
                self.pos += 1;
            }
            if self.pos == digits {
                self.pos = save;
            }
        }
        if self.pos == start {
            return Err(Error::Parse(format!("expected a number at position {}", self.pos)));
        }
        let text: String = self.chars[start..self.pos].iter().collect();
        text.parse::<f64>()
            .map_err(|_| Error::Parse(format!("bad number `{text}`")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fractions_and_constants() {
        assert_eq!(parse_scalar("1/3").unwrap(), 1.0 / 3.0);
        assert_eq!(parse_scalar("-inf").unwrap(), f64::NEG_INFINITY);
        assert_eq!(parse_scalar("2*pi").unwrap(), 2.0 * std::f64::consts::PI);
        assert_eq!(parse_scalar("sqrt(1/2)").unwrap(), 0.5f64.sqrt());
        assert_eq!(parse_scalar("2^-0.5").unwrap(), 2f64.powf(-0.5));
        assert_eq!(parse_scalar("1e-9").unwrap(), 1e-9);
        assert_eq!(parse_scalar(" 3 - 1/2 ").unwrap(), 2.5);
    }

    #[test]
    fn rejects_garbage() {
        assert!(parse_scalar("").is_err());
        assert!(parse_scalar("1/").is_err());
        assert!(parse_scalar("foo").is_err());
        assert!(parse_scalar("(1").is_err());
    }
}
