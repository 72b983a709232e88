//! Integer bivariate polynomial expressions in `i` and `j`.
//!
//! Grammar (whitespace ignored):
//!
//! ```text
//! expr  := term (('+' | '-') term)*
//! term  := unary (('*')? unary)*      juxtaposition multiplies: 2i, 3(i+j)
//! unary := '-' unary | power
//! power := atom ('^' integer)?
//! atom  := integer | 'i' | 'j' | '(' expr ')'
//! ```
//!
//! Arithmetic wraps on 64-bit overflow so evaluation stays total.

use std::fmt;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PolyExpr {
    Const(i64),
    I,
    J,
    Neg(Box<PolyExpr>),
    Add(Box<PolyExpr>, Box<PolyExpr>),
    Sub(Box<PolyExpr>, Box<PolyExpr>),
    Mul(Box<PolyExpr>, Box<PolyExpr>),
    Pow(Box<PolyExpr>, u32),
}

impl PolyExpr {
    pub fn parse(src: &str) -> Result<PolyExpr> {
        let tokens = tokenize(src)?;
        let mut parser = Parser { tokens: &tokens, pos: 0, src };
        let expr = parser.expr()?;
        if parser.pos != tokens.len() {
            return Err(Error::parse(format!(
                "trailing input in polynomial {src:?} at token {}",
                parser.pos
            )));
        }
        Ok(expr)
    }

    pub fn eval(&self, i: i64, j: i64) -> i64 {
        match self {
            PolyExpr::Const(c) => *c,
            PolyExpr::I => i,
            PolyExpr::J => j,
            PolyExpr::Neg(a) => a.eval(i, j).wrapping_neg(),
            PolyExpr::Add(a, b) => a.eval(i, j).wrapping_add(b.eval(i, j)),
            PolyExpr::Sub(a, b) => a.eval(i, j).wrapping_sub(b.eval(i, j)),
            PolyExpr::Mul(a, b) => a.eval(i, j).wrapping_mul(b.eval(i, j)),
            PolyExpr::Pow(a, e) => a.eval(i, j).wrapping_pow(*e),
        }
    }
}

impl fmt::Display for PolyExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PolyExpr::Const(c) => write!(f, "{c}"),
            PolyExpr::I => write!(f, "i"),
            PolyExpr::J => write!(f, "j"),
            PolyExpr::Neg(a) => write!(f, "-({a})"),
            PolyExpr::Add(a, b) => write!(f, "({a}+{b})"),
            PolyExpr::Sub(a, b) => write!(f, "({a}-{b})"),
            PolyExpr::Mul(a, b) => write!(f, "({a}*{b})"),
            PolyExpr::Pow(a, e) => write!(f, "({a})^{e}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Token {
    Num(i64),
    I,
    J,
    Plus,
    Minus,
    Star,
    Caret,
    LParen,
    RParen,
}

fn tokenize(src: &str) -> Result<Vec<Token>> {
    let mut out = Vec::new();
    let mut chars = src.chars().peekable();
    while let Some(&c) = chars.peek() {
        match c {
            ' ' | '\t' => {
                chars.next();
            }
            '0'..='9' => {
                let mut value: i64 = 0;
                while let Some(&d) = chars.peek() {
                    let Some(digit) = d.to_digit(10) else { break };
                    value = value
                        .checked_mul(10)
                        .and_then(|v| v.checked_add(digit as i64))
                        .ok_or_else(|| Error::parse(format!("integer literal overflow in {src:?}")))?;
                    chars.next();
                }
                out.push(Token::Num(value));
            }
            _ => {
                chars.next();
                out.push(match c {
                    'i' => Token::I,
                    'j' => Token::J,
                    '+' => Token::Plus,
                    // accept the typographic minus as well
                    '-' | '\u{2212}' => Token::Minus,
                    '*' => Token::Star,
                    '^' => Token::Caret,
                    '(' => Token::LParen,
                    ')' => Token::RParen,
                    other => {
                        return Err(Error::parse(format!(
                            "unexpected character {other:?} in polynomial {src:?}"
                        )))
                    }
                });
            }
        }
    }
    if out.is_empty() {
        return Err(Error::parse("empty polynomial expression"));
    }
    Ok(out)
}

struct Parser<'a> {
    tokens: &'a [Token],
    pos: usize,
    src: &'a str,
}

impl Parser<'_> {
    fn peek(&self) -> Option<Token> {
        self.tokens.get(self.pos).copied()
    }

    fn bump(&mut self) -> Option<Token> {
        let t = self.peek();
        self.pos += 1;
        t
    }

    fn err(&self, what: &str) -> Error {
        Error::parse(format!("{what} in polynomial {:?}", self.src))
    }

    fn expr(&mut self) -> Result<PolyExpr> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Some(Token::Plus) => {
                    self.bump();
                    lhs = PolyExpr::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Some(Token::Minus) => {
                    self.bump();
                    lhs = PolyExpr::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<PolyExpr> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek() {
                Some(Token::Star) => {
                    self.bump();
                    lhs = PolyExpr::Mul(Box::new(lhs), Box::new(self.unary()?));
                }
                Some(Token::I | Token::J | Token::LParen | Token::Num(_)) => {
                    lhs = PolyExpr::Mul(Box::new(lhs), Box::new(self.power()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<PolyExpr> {
        if self.peek() == Some(Token::Minus) {
            self.bump();
            return Ok(PolyExpr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<PolyExpr> {
        let base = self.atom()?;
        if self.peek() == Some(Token::Caret) {
            self.bump();
            match self.bump() {
                Some(Token::Num(e)) if (0..=63).contains(&e) => {
                    return Ok(PolyExpr::Pow(Box::new(base), e as u32))
                }
                _ => return Err(self.err("exponent must be an integer in 0..=63")),
            }
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<PolyExpr> {
        match self.bump() {
            Some(Token::Num(c)) => Ok(PolyExpr::Const(c)),
            Some(Token::I) => Ok(PolyExpr::I),
            Some(Token::J) => Ok(PolyExpr::J),
            Some(Token::LParen) => {
                let inner = self.expr()?;
                match self.bump() {
                    Some(Token::RParen) => Ok(inner),
                    _ => Err(self.err("missing ')'")),
                }
            }
            _ => Err(self.err("expected a number, i, j or '('")),
        }
    }
}
