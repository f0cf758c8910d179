use num::BigRational;

use super::{BinOp, Chart, Expr, ExprError};
use crate::jet::ElemFn;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
enum Token {
    /// Unsigned decimal literal, kept verbatim.
    Number(String),
    /// `p/q` written without whitespace.
    Ratio(i64, i64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

fn tokenize(text: &str) -> Result<Vec<(Token, usize)>, ExprError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let b = bytes[i];
        let start = i;
        match b {
            b' ' | b'\t' | b'\r' | b'\n' => {
                i += 1;
                continue;
            }
            b'0'..=b'9' | b'.' => {
                while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                    i += 1;
                }
                let literal = &text[start..i];
                if f64::from_decimal(literal).is_none() {
                    return Err(ExprError::Syntax { offset: start, message: format!("malformed number `{literal}`") });
                }
                // `3/2` with no spaces is a single rational literal
                let is_int = !literal.contains('.');
                if is_int && i + 1 < bytes.len() && bytes[i] == b'/' && bytes[i + 1].is_ascii_digit() {
                    let mut j = i + 1;
                    while j < bytes.len() && bytes[j].is_ascii_digit() {
                        j += 1;
                    }
                    if j < bytes.len() && bytes[j] == b'.' {
                        return Err(ExprError::Syntax { offset: i + 1, message: "rational literal denominator must be an integer".into() });
                    }
                    let parse = |s: &str, at: usize| {
                        s.parse::<i64>().map_err(|_| ExprError::Syntax { offset: at, message: format!("integer `{s}` out of range") })
                    };
                    let numer = parse(literal, start)?;
                    let denom = parse(&text[i + 1..j], i + 1)?;
                    if denom == 0 {
                        return Err(ExprError::Syntax { offset: i + 1, message: "zero denominator in rational literal".into() });
                    }
                    out.push((Token::Ratio(numer, denom), start));
                    i = j;
                } else {
                    out.push((Token::Number(literal.to_string()), start));
                }
                continue;
            }
            b if b.is_ascii_alphabetic() || b == b'_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push((Token::Ident(text[start..i].to_string()), start));
                continue;
            }
            b'+' => out.push((Token::Plus, start)),
            b'-' => out.push((Token::Minus, start)),
            b'*' => out.push((Token::Star, start)),
            b'/' => out.push((Token::Slash, start)),
            b'^' => out.push((Token::Caret, start)),
            b'(' => out.push((Token::LParen, start)),
            b')' => out.push((Token::RParen, start)),
            _ => {
                let ch = text[start..].chars().next().unwrap_or('?');
                return Err(ExprError::Syntax { offset: start, message: format!("unexpected character `{ch}`") });
            }
        }
        i += 1;
    }
    Ok(out)
}

struct Parser<'a> {
    tokens: Vec<(Token, usize)>,
    pos: usize,
    end: usize,
    chart: &'a Chart,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|(t, _)| t)
    }

    fn offset(&self) -> usize {
        self.tokens.get(self.pos).map(|(_, o)| *o).unwrap_or(self.end)
    }

    fn bump(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).map(|(t, _)| t.clone());
        self.pos += 1;
        t
    }

    fn error(&self, message: impl Into<String>) -> ExprError {
        ExprError::Syntax { offset: self.offset(), message: message.into() }
    }

    fn expect(&mut self, token: Token, what: &str) -> Result<(), ExprError> {
        if self.peek() == Some(&token) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(format!("expected {what}")))
        }
    }

    fn expr(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Some(Token::Plus) => BinOp::Add,
                Some(Token::Minus) => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            let rhs = self.term()?;
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn term(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Some(Token::Star) => BinOp::Mul,
                Some(Token::Slash) => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            let rhs = self.unary()?;
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn unary(&mut self) -> Result<Expr, ExprError> {
        if self.peek() == Some(&Token::Minus) {
            self.pos += 1;
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ExprError> {
        let base = self.atom()?;
        if self.peek() != Some(&Token::Caret) {
            return Ok(base);
        }
        self.pos += 1;
        let at = self.offset();
        // right-associative; the exponent must fold to an integer constant
        let exponent = if self.peek() == Some(&Token::Minus) {
            self.pos += 1;
            Expr::Neg(Box::new(self.power()?))
        } else {
            self.power()?
        };
        let value = exponent.eval_constant::<BigRational>().map_err(|_| ExprError::NonIntegerExponent { offset: at })?;
        if !value.is_integer() {
            return Err(ExprError::NonIntegerExponent { offset: at });
        }
        let n: i32 = value.to_integer().try_into().map_err(|_| ExprError::NonIntegerExponent { offset: at })?;
        Ok(Expr::Pow(Box::new(base), n))
    }

    fn atom(&mut self) -> Result<Expr, ExprError> {
        let at = self.offset();
        match self.bump() {
            Some(Token::Number(s)) => Ok(Expr::Decimal(s)),
            Some(Token::Ratio(p, q)) => Ok(Expr::Ratio(p, q)),
            Some(Token::LParen) => {
                let inner = self.expr()?;
                self.expect(Token::RParen, "`)`")?;
                Ok(inner)
            }
            Some(Token::Ident(name)) => {
                if self.peek() == Some(&Token::LParen) {
                    let f = ElemFn::from_name(&name).ok_or(ExprError::UnknownIdentifier { name: name.clone(), offset: at })?;
                    self.pos += 1;
                    let arg = self.expr()?;
                    self.expect(Token::RParen, "`)` closing function call")?;
                    return Ok(Expr::Call(f, Box::new(arg)));
                }
                match self.chart.index_of(&name) {
                    Some(index) => Ok(Expr::Coord { index, name }),
                    None => Err(ExprError::UnknownIdentifier { name, offset: at }),
                }
            }
            Some(_) => Err(ExprError::Syntax { offset: at, message: "expected a number, coordinate, function call or `(`".into() }),
            None => Err(ExprError::Syntax { offset: at, message: "unexpected end of expression".into() }),
        }
    }
}

pub fn parse(text: &str, chart: &Chart) -> Result<Expr, ExprError> {
    if text.trim().is_empty() {
        return Err(ExprError::Syntax { offset: 0, message: "empty expression".into() });
    }
    let tokens = tokenize(text)?;
    let mut parser = Parser { tokens, pos: 0, end: text.len(), chart };
    let expr = parser.expr()?;
    if parser.pos < parser.tokens.len() {
        return Err(parser.error("unexpected trailing input"));
    }
    Ok(expr)
}
