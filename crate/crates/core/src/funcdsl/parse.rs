//! Tokenizer and recursive-descent parser for the expression grammar.

use std::fmt;

use super::{Expr, Func};

/// Parse failure with the byte offset where it was detected.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("syntax error at byte {offset}: found {found}, expected {}", expected.join(", "))]
    Syntax {
        offset: usize,
        found: String,
        expected: Vec<&'static str>,
    },
    #[error("unknown identifier `{name}` at byte {offset}")]
    UnknownIdentifier { name: String, offset: usize },
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Num(v) => write!(f, "number `{v}`"),
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Plus => write!(f, "`+`"),
            Tok::Minus => write!(f, "`-`"),
            Tok::Star => write!(f, "`*`"),
            Tok::Slash => write!(f, "`/`"),
            Tok::Caret => write!(f, "`^`"),
            Tok::LParen => write!(f, "`(`"),
            Tok::RParen => write!(f, "`)`"),
            Tok::Eof => write!(f, "end of input"),
        }
    }
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer {
            src: src.as_bytes(),
            pos: 0,
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn next(&mut self) -> Result<(Tok, usize), ParseError> {
        self.skip_ws();
        let start = self.pos;
        if self.pos >= self.src.len() {
            return Ok((Tok::Eof, start));
        }
        let c = self.src[self.pos];
        let tok = match c {
            b'+' => Tok::Plus,
            b'-' => Tok::Minus,
            b'*' => Tok::Star,
            b'/' => Tok::Slash,
            b'^' => Tok::Caret,
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b'0'..=b'9' | b'.' => return self.number(start),
            b'a'..=b'z' | b'A'..=b'Z' | b'_' => return self.ident(start),
            other => {
                return Err(ParseError::Syntax {
                    offset: start,
                    found: format!("`{}`", other as char),
                    expected: vec!["number", "identifier", "operator", "`(`", "`)`"],
                })
            }
        };
        self.pos += 1;
        Ok((tok, start))
    }

    fn number(&mut self, start: usize) -> Result<(Tok, usize), ParseError> {
        let mut pos = start;
        let mut seen_digit = false;
        while pos < self.src.len() && self.src[pos].is_ascii_digit() {
            pos += 1;
            seen_digit = true;
        }
        if pos < self.src.len() && self.src[pos] == b'.' {
            pos += 1;
            while pos < self.src.len() && self.src[pos].is_ascii_digit() {
                pos += 1;
                seen_digit = true;
            }
        }
        if !seen_digit {
            return Err(ParseError::Syntax {
                offset: start,
                found: "`.`".to_string(),
                expected: vec!["digit"],
            });
        }
        if pos < self.src.len() && (self.src[pos] == b'e' || self.src[pos] == b'E') {
            let mut epos = pos + 1;
            if epos < self.src.len() && (self.src[epos] == b'+' || self.src[epos] == b'-') {
                epos += 1;
            }
            if epos < self.src.len() && self.src[epos].is_ascii_digit() {
                while epos < self.src.len() && self.src[epos].is_ascii_digit() {
                    epos += 1;
                }
                pos = epos;
            }
            // otherwise the `e` belongs to a following identifier; leave it
        }
        let text = std::str::from_utf8(&self.src[start..pos]).expect("ascii");
        let value: f64 = text.parse().map_err(|_| ParseError::Syntax {
            offset: start,
            found: format!("`{text}`"),
            expected: vec!["number"],
        })?;
        self.pos = pos;
        Ok((Tok::Num(value), start))
    }

    fn ident(&mut self, start: usize) -> Result<(Tok, usize), ParseError> {
        let mut pos = start;
        while pos < self.src.len()
            && (self.src[pos].is_ascii_alphanumeric() || self.src[pos] == b'_')
        {
            pos += 1;
        }
        let text = std::str::from_utf8(&self.src[start..pos]).expect("ascii");
        self.pos = pos;
        Ok((Tok::Ident(text.to_string()), start))
    }
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    idx: usize,
}

const ATOM_EXPECTED: &[&str] = &["number", "`t`", "function name", "`(`", "`-`"];

impl Parser {
    fn peek(&self) -> &(Tok, usize) {
        &self.toks[self.idx]
    }

    fn bump(&mut self) -> (Tok, usize) {
        let t = self.toks[self.idx].clone();
        if self.idx + 1 < self.toks.len() {
            self.idx += 1;
        }
        t
    }

    fn expect(&mut self, want: &Tok, expected: &'static str) -> Result<(), ParseError> {
        let (tok, offset) = self.peek();
        if tok == want {
            self.bump();
            Ok(())
        } else {
            Err(ParseError::Syntax {
                offset: *offset,
                found: tok.to_string(),
                expected: vec![expected],
            })
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            match self.peek().0 {
                Tok::Plus => {
                    self.bump();
                    lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Tok::Minus => {
                    self.bump();
                    lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.factor()?;
        loop {
            match self.peek().0 {
                Tok::Star => {
                    self.bump();
                    lhs = Expr::Mul(Box::new(lhs), Box::new(self.factor()?));
                }
                Tok::Slash => {
                    self.bump();
                    lhs = Expr::Div(Box::new(lhs), Box::new(self.factor()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn factor(&mut self) -> Result<Expr, ParseError> {
        if self.peek().0 == Tok::Minus {
            self.bump();
            return Ok(Expr::Neg(Box::new(self.factor()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if self.peek().0 == Tok::Caret {
            self.bump();
            // right associative; the exponent admits unary minus
            let expo = self.factor()?;
            return Ok(Expr::Pow(Box::new(base), Box::new(expo)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        let (tok, offset) = self.bump();
        match tok {
            Tok::Num(v) => Ok(Expr::Const(v)),
            Tok::LParen => {
                let inner = self.expr()?;
                self.expect(&Tok::RParen, "`)`")?;
                Ok(inner)
            }
            Tok::Ident(name) => match name.as_str() {
                "t" => Ok(Expr::Var),
                "exp" | "log" | "abs" | "sqrt" => {
                    let func = match name.as_str() {
                        "exp" => Func::Exp,
                        "log" => Func::Log,
                        "abs" => Func::Abs,
                        _ => Func::Sqrt,
                    };
                    self.expect(&Tok::LParen, "`(`")?;
                    let arg = self.expr()?;
                    self.expect(&Tok::RParen, "`)`")?;
                    Ok(Expr::Call(func, Box::new(arg)))
                }
                _ => Err(ParseError::UnknownIdentifier { name, offset }),
            },
            other => Err(ParseError::Syntax {
                offset,
                found: other.to_string(),
                expected: ATOM_EXPECTED.to_vec(),
            }),
        }
    }
}

/// Parses an expression in the variable `t`.
pub fn parse(source: &str) -> Result<Expr, ParseError> {
    let mut lexer = Lexer::new(source);
    let mut toks = Vec::new();
    loop {
        let (tok, offset) = lexer.next()?;
        let eof = tok == Tok::Eof;
        toks.push((tok, offset));
        if eof {
            break;
        }
    }
    let mut parser = Parser { toks, idx: 0 };
    let expr = parser.expr()?;
    let (tok, offset) = parser.peek();
    if *tok != Tok::Eof {
        return Err(ParseError::Syntax {
            offset: *offset,
            found: tok.to_string(),
            expected: vec!["operator", "end of input"],
        });
    }
    Ok(expr)
}
