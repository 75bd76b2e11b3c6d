//! Tokeniser for the concrete syntax.
//!
//! ASCII operators with a few unicode aliases on input (`⊗` for `*`, `⅋`
//! for `@`, `⊕` for `+`, `⊥` for `bot`). Comments run from `--` to the end
//! of the line. Identifiers admit digits, underscores and primes after the
//! first letter, so `u'` and `w_x1` are fine.

use std::fmt;

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Tok {
    Ident(String),
    Num(String),
    LParen,
    RParen,
    LBracket,
    RBracket,
    LBrace,
    RBrace,
    Colon,
    Semi,
    Comma,
    Dot,
    Eq,
    Pipe,
    Star,
    At,
    Plus,
    Amp,
    Tilde,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "{s}"),
            Tok::Num(s) => write!(f, "{s}"),
            Tok::LParen => write!(f, "("),
            Tok::RParen => write!(f, ")"),
            Tok::LBracket => write!(f, "["),
            Tok::RBracket => write!(f, "]"),
            Tok::LBrace => write!(f, "{{"),
            Tok::RBrace => write!(f, "}}"),
            Tok::Colon => write!(f, ":"),
            Tok::Semi => write!(f, ";"),
            Tok::Comma => write!(f, ","),
            Tok::Dot => write!(f, "."),
            Tok::Eq => write!(f, "="),
            Tok::Pipe => write!(f, "|"),
            Tok::Star => write!(f, "*"),
            Tok::At => write!(f, "@"),
            Tok::Plus => write!(f, "+"),
            Tok::Amp => write!(f, "&"),
            Tok::Tilde => write!(f, "~"),
        }
    }
}

/// A token with its source position (1-based).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Spanned {
    pub tok: Tok,
    pub line: usize,
    pub col: usize,
}

#[derive(Clone, PartialEq, Eq, Debug, thiserror::Error)]
#[error("parse error at {line}:{col}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

impl ParseError {
    pub fn new(line: usize, col: usize, message: impl Into<String>) -> Self {
        ParseError { line, col, message: message.into() }
    }
}

pub fn lex(text: &str) -> Result<Vec<Spanned>, ParseError> {
    let mut out = Vec::new();
    let mut line = 1usize;
    let mut col = 1usize;
    let mut chars = text.chars().peekable();
    while let Some(&c) = chars.peek() {
        let (tline, tcol) = (line, col);
        let bump = |chars: &mut std::iter::Peekable<std::str::Chars>,
                        line: &mut usize,
                        col: &mut usize| {
            let c = chars.next().expect("peeked");
            if c == '\n' {
                *line += 1;
                *col = 1;
            } else {
                *col += 1;
            }
            c
        };
        if c.is_whitespace() {
            bump(&mut chars, &mut line, &mut col);
            continue;
        }
        if c == '-' {
            bump(&mut chars, &mut line, &mut col);
            if chars.peek() == Some(&'-') {
                while let Some(&c2) = chars.peek() {
                    if c2 == '\n' {
                        break;
                    }
                    bump(&mut chars, &mut line, &mut col);
                }
                continue;
            }
            return Err(ParseError::new(tline, tcol, "stray '-' (comments are '--')"));
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let mut s = String::new();
            while let Some(&c2) = chars.peek() {
                if c2.is_ascii_alphanumeric() || c2 == '_' || c2 == '\'' {
                    s.push(bump(&mut chars, &mut line, &mut col));
                } else {
                    break;
                }
            }
            out.push(Spanned { tok: Tok::Ident(s), line: tline, col: tcol });
            continue;
        }
        if c.is_ascii_digit() {
            let mut s = String::new();
            while let Some(&c2) = chars.peek() {
                if c2.is_ascii_digit() {
                    s.push(bump(&mut chars, &mut line, &mut col));
                } else {
                    break;
                }
            }
            out.push(Spanned { tok: Tok::Num(s), line: tline, col: tcol });
            continue;
        }
        let tok = match c {
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            '[' => Tok::LBracket,
            ']' => Tok::RBracket,
            '{' => Tok::LBrace,
            '}' => Tok::RBrace,
            ':' => Tok::Colon,
            ';' => Tok::Semi,
            ',' => Tok::Comma,
            '.' => Tok::Dot,
            '=' => Tok::Eq,
            '|' => Tok::Pipe,
            '*' | '⊗' => Tok::Star,
            '@' | '⅋' => Tok::At,
            '+' | '⊕' => Tok::Plus,
            '&' => Tok::Amp,
            '~' => Tok::Tilde,
            '⊥' => {
                bump(&mut chars, &mut line, &mut col);
                out.push(Spanned { tok: Tok::Ident("bot".into()), line: tline, col: tcol });
                continue;
            }
            other => {
                return Err(ParseError::new(tline, tcol, format!("unexpected character {other:?}")))
            }
        };
        bump(&mut chars, &mut line, &mut col);
        out.push(Spanned { tok, line: tline, col: tcol });
    }
    Ok(out)
}
