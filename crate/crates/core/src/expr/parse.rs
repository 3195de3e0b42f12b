//! Recursive-descent parser for the expression grammar:
//!
//! ```text
//! expr   := term (('+'|'-') term)*
//! term   := factor (('*'|'/') factor)*
//! factor := base ('^' exponent)?
//! base   := number | ident | ident '(' expr (',' expr)* ')' | '(' expr ')' | '-' base
//! ```
//!
//! Exponents are signed integers, with a parenthesized rational extension
//! `^(a/b)`. Identifiers are letters, digits and underscores, not starting
//! with a digit. `ln`, `exp`, `sin`, `cos` are built-ins; any other applied
//! identifier is an opaque function. `D(f, k1, ..)(args)` denotes an opaque
//! application with formal derivative orders, as emitted by the printer.

use super::{simplify, Builtin, Expr, Opaque};
use num::{BigInt, BigRational};
use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("syntax error at line {line}, column {col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("unknown operator '{op}' at line {line}, column {col}")]
    UnknownOperator { op: String, line: usize, col: usize },
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(BigRational),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Comma,
}

struct Lexer<'a> {
    src: &'a str,
    chars: std::iter::Peekable<std::str::CharIndices<'a>>,
    line: usize,
    col: usize,
}

struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer {
            src,
            chars: src.char_indices().peekable(),
            line: 1,
            col: 1,
        }
    }

    fn bump(&mut self) -> Option<(usize, char)> {
        let r = self.chars.next();
        if let Some((_, c)) = r {
            if c == '\n' {
                self.line += 1;
                self.col = 1;
            } else {
                self.col += 1;
            }
        }
        r
    }

    fn tokenize(mut self) -> Result<Vec<Spanned>, ParseError> {
        let mut out = Vec::new();
        while let Some(&(i, c)) = self.chars.peek() {
            let (line, col) = (self.line, self.col);
            if c.is_whitespace() {
                self.bump();
                continue;
            }
            let tok = match c {
                '+' => {
                    self.bump();
                    Tok::Plus
                }
                '-' => {
                    self.bump();
                    Tok::Minus
                }
                '*' => {
                    self.bump();
                    Tok::Star
                }
                '/' => {
                    self.bump();
                    Tok::Slash
                }
                '^' => {
                    self.bump();
                    Tok::Caret
                }
                '(' => {
                    self.bump();
                    Tok::LParen
                }
                ')' => {
                    self.bump();
                    Tok::RParen
                }
                ',' => {
                    self.bump();
                    Tok::Comma
                }
                c if c.is_ascii_digit() => {
                    let start = i;
                    let mut end = i;
                    let mut saw_dot = false;
                    while let Some(&(j, d)) = self.chars.peek() {
                        if d.is_ascii_digit() || (d == '.' && !saw_dot) {
                            saw_dot |= d == '.';
                            end = j + d.len_utf8();
                            self.bump();
                        } else {
                            break;
                        }
                    }
                    let text = &self.src[start..end];
                    Tok::Num(parse_number(text).ok_or_else(|| ParseError::Syntax {
                        line,
                        col,
                        msg: format!("malformed number '{text}'"),
                    })?)
                }
                c if c.is_alphabetic() || c == '_' => {
                    let start = i;
                    let mut end = i;
                    while let Some(&(j, d)) = self.chars.peek() {
                        if d.is_alphanumeric() || d == '_' {
                            end = j + d.len_utf8();
                            self.bump();
                        } else {
                            break;
                        }
                    }
                    Tok::Ident(self.src[start..end].to_string())
                }
                other => {
                    return Err(ParseError::UnknownOperator {
                        op: other.to_string(),
                        line,
                        col,
                    })
                }
            };
            out.push(Spanned { tok, line, col });
        }
        Ok(out)
    }
}

fn parse_number(text: &str) -> Option<BigRational> {
    if let Some(dot) = text.find('.') {
        let int_part: BigInt = text[..dot].parse().ok()?;
        let frac = &text[dot + 1..];
        if frac.is_empty() {
            return Some(BigRational::from_integer(int_part));
        }
        let digits: BigInt = frac.parse().ok()?;
        let scale = num::traits::Pow::pow(&BigInt::from(10), frac.len() as u32);
        Some(BigRational::from_integer(int_part) + BigRational::new(digits, scale))
    } else {
        let n: BigInt = text.parse().ok()?;
        Some(BigRational::from_integer(n))
    }
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
    end_line: usize,
    end_col: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|s| &s.tok)
    }

    fn here(&self) -> (usize, usize) {
        self.toks
            .get(self.pos)
            .map(|s| (s.line, s.col))
            .unwrap_or((self.end_line, self.end_col))
    }

    fn err(&self, msg: impl Into<String>) -> ParseError {
        let (line, col) = self.here();
        ParseError::Syntax {
            line,
            col,
            msg: msg.into(),
        }
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|s| s.tok.clone());
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, want: &Tok, what: &str) -> Result<(), ParseError> {
        match self.peek() {
            Some(t) if t == want => {
                self.pos += 1;
                Ok(())
            }
            Some(_) => Err(self.err(format!("expected {what}"))),
            None => Err(self.err(format!("unexpected end of input, expected {what}"))),
        }
    }

    fn parse_expr(&mut self) -> Result<Expr, ParseError> {
        let mut terms = vec![self.parse_term()?];
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.pos += 1;
                    terms.push(self.parse_term()?);
                }
                Some(Tok::Minus) => {
                    self.pos += 1;
                    terms.push(Expr::neg(self.parse_term()?));
                }
                _ => break,
            }
        }
        Ok(if terms.len() == 1 {
            terms.pop().unwrap()
        } else {
            Expr::Sum(terms)
        })
    }

    fn parse_term(&mut self) -> Result<Expr, ParseError> {
        let mut factors = vec![self.parse_factor()?];
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.pos += 1;
                    factors.push(self.parse_factor()?);
                }
                Some(Tok::Slash) => {
                    self.pos += 1;
                    factors.push(Expr::powi(self.parse_factor()?, -1));
                }
                _ => break,
            }
        }
        Ok(if factors.len() == 1 {
            factors.pop().unwrap()
        } else {
            Expr::Prod(factors)
        })
    }

    fn parse_factor(&mut self) -> Result<Expr, ParseError> {
        let base = self.parse_base()?;
        if let Some(Tok::Caret) = self.peek() {
            self.pos += 1;
            let exp = self.parse_exponent()?;
            return Ok(Expr::Pow(Box::new(base), exp));
        }
        Ok(base)
    }

    fn parse_exponent(&mut self) -> Result<BigRational, ParseError> {
        let neg = matches!(self.peek(), Some(Tok::Minus));
        if neg {
            self.pos += 1;
        }
        match self.next() {
            Some(Tok::Num(r)) if r.is_integer() => {
                Ok(if neg { -r } else { r })
            }
            Some(Tok::LParen) => {
                // rational exponent extension: ^(a/b)
                let num_neg = matches!(self.peek(), Some(Tok::Minus));
                if num_neg {
                    self.pos += 1;
                }
                let n = match self.next() {
                    Some(Tok::Num(r)) if r.is_integer() => r,
                    _ => return Err(self.err("expected integer numerator in exponent")),
                };
                self.expect(&Tok::Slash, "'/' in rational exponent")?;
                let d = match self.next() {
                    Some(Tok::Num(r)) if r.is_integer() => r,
                    _ => return Err(self.err("expected integer denominator in exponent")),
                };
                self.expect(&Tok::RParen, "')' closing exponent")?;
                let mut v = n / d;
                if num_neg ^ neg {
                    v = -v;
                }
                Ok(v)
            }
            _ => Err(self.err("expected integer exponent after '^'")),
        }
    }

    fn parse_base(&mut self) -> Result<Expr, ParseError> {
        let (line, col) = self.here();
        match self.next() {
            Some(Tok::Num(r)) => Ok(Expr::Num(r)),
            Some(Tok::Minus) => Ok(Expr::neg(self.parse_base()?)),
            Some(Tok::LParen) => {
                let e = self.parse_expr()?;
                self.expect(&Tok::RParen, "')' (unbalanced parenthesis)")?;
                Ok(e)
            }
            Some(Tok::Ident(name)) => {
                if name == "D" && matches!(self.peek(), Some(Tok::LParen)) {
                    return self.parse_derivative_app();
                }
                if matches!(self.peek(), Some(Tok::LParen)) {
                    self.pos += 1;
                    let args = self.parse_args()?;
                    if let Some(b) = Builtin::from_name(&name) {
                        if args.len() != 1 {
                            return Err(self.err(format!(
                                "built-in '{name}' takes exactly one argument"
                            )));
                        }
                        return Ok(Expr::Call(b, Box::new(args.into_iter().next().unwrap())));
                    }
                    return Ok(Expr::opaque(name, args));
                }
                Ok(Expr::Sym(name))
            }
            Some(_) => Err(ParseError::Syntax {
                line,
                col,
                msg: "expected a number, identifier or '('".into(),
            }),
            None => Err(self.err("unexpected end of input")),
        }
    }

    /// `D(f, k1, .., km)(a1, .., am)` — opaque application with orders.
    fn parse_derivative_app(&mut self) -> Result<Expr, ParseError> {
        self.expect(&Tok::LParen, "'(' after D")?;
        let fname = match self.next() {
            Some(Tok::Ident(n)) => n,
            _ => return Err(self.err("expected function name in D(...)")),
        };
        let mut orders = Vec::new();
        while matches!(self.peek(), Some(Tok::Comma)) {
            self.pos += 1;
            match self.next() {
                Some(Tok::Num(r)) if r.is_integer() && !num::Signed::is_negative(&r) => {
                    let k: u32 = r
                        .to_integer()
                        .try_into()
                        .map_err(|_| self.err("derivative order too large"))?;
                    orders.push(k);
                }
                _ => return Err(self.err("expected nonnegative integer derivative order")),
            }
        }
        self.expect(&Tok::RParen, "')' closing D(...)")?;
        self.expect(&Tok::LParen, "'(' opening argument list")?;
        let args = self.parse_args()?;
        if args.len() != orders.len() {
            return Err(self.err(format!(
                "D({fname}, ..) lists {} orders but {} arguments follow",
                orders.len(),
                args.len()
            )));
        }
        Ok(Expr::Opaque(Opaque {
            name: fname,
            args,
            orders,
        }))
    }

    fn parse_args(&mut self) -> Result<Vec<Expr>, ParseError> {
        let mut args = vec![self.parse_expr()?];
        loop {
            match self.peek() {
                Some(Tok::Comma) => {
                    self.pos += 1;
                    args.push(self.parse_expr()?);
                }
                Some(Tok::RParen) => {
                    self.pos += 1;
                    return Ok(args);
                }
                _ => return Err(self.err("expected ',' or ')' in argument list")),
            }
        }
    }
}

/// Parses an expression and returns its canonical form.
pub fn parse_expr(text: &str) -> Result<Expr, ParseError> {
    let lexer = Lexer::new(text);
    let end_line = text.lines().count().max(1);
    let end_col = text.lines().last().map(|l| l.chars().count() + 1).unwrap_or(1);
    let toks = lexer.tokenize()?;
    let mut p = Parser {
        toks,
        pos: 0,
        end_line,
        end_col,
    };
    let e = p.parse_expr()?;
    if p.pos != p.toks.len() {
        return Err(p.err("trailing input after expression"));
    }
    Ok(simplify(&e))
}
