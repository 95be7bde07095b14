use std::iter::Peekable;
use std::str::Chars;

use super::ast::Span;
use super::ParseError;
use crate::sign::Sign;

#[derive(Debug, Clone, PartialEq)]
pub enum TokenKind {
    Ident(String),
    Sign(Sign),
    LBrace,
    RBrace,
    Colon,
    Star,
    Equals,
    Caret,
    Newline,
    Eof,
}

impl TokenKind {
    pub fn describe(&self) -> String {
        match self {
            TokenKind::Ident(s) => format!("`{s}`"),
            TokenKind::Sign(s) => format!("`{s}`"),
            TokenKind::LBrace => "`{`".into(),
            TokenKind::RBrace => "`}`".into(),
            TokenKind::Colon => "`:`".into(),
            TokenKind::Star => "`*`".into(),
            TokenKind::Equals => "`=`".into(),
            TokenKind::Caret => "`^`".into(),
            TokenKind::Newline => "end of line".into(),
            TokenKind::Eof => "end of input".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Token {
    pub kind: TokenKind,
    pub span: Span,
}

/// Produces tokens on demand so that the first error in source order wins.
pub struct Lexer<'a> {
    chars: Peekable<Chars<'a>>,
    line: usize,
    column: usize,
}

impl<'a> Lexer<'a> {
    pub fn new(source: &'a str) -> Self {
        let source = source.strip_prefix('\u{feff}').unwrap_or(source);
        Lexer {
            chars: source.chars().peekable(),
            line: 1,
            column: 1,
        }
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn here(&self) -> Span {
        Span {
            line: self.line,
            column: self.column,
        }
    }

    pub fn next_token(&mut self) -> Result<Token, ParseError> {
        loop {
            match self.chars.peek() {
                Some(' ' | '\t' | '\r') => {
                    self.bump();
                }
                Some('#') => {
                    while self.chars.peek().is_some_and(|c| *c != '\n') {
                        self.bump();
                    }
                }
                _ => break,
            }
        }
        let span = self.here();
        let token = |kind| Ok(Token { kind, span });
        let Some(c) = self.bump() else {
            return token(TokenKind::Eof);
        };
        match c {
            '\n' => token(TokenKind::Newline),
            '{' => token(TokenKind::LBrace),
            '}' => token(TokenKind::RBrace),
            ':' => token(TokenKind::Colon),
            '*' => token(TokenKind::Star),
            '=' => token(TokenKind::Equals),
            '^' => token(TokenKind::Caret),
            '+' | '-' => {
                let ends_cleanly = |next: Option<&char>| !next.is_some_and(|n| n.is_ascii_alphanumeric() || *n == '_');
                if self.chars.peek() == Some(&'1') {
                    self.bump();
                    if ends_cleanly(self.chars.peek()) {
                        let sign = if c == '+' { Sign::Plus } else { Sign::Minus };
                        return token(TokenKind::Sign(sign));
                    }
                }
                Err(ParseError::new(
                    span,
                    "malformed sign, expected `+1` or `-1`",
                    vec!["`+1`", "`-1`"],
                ))
            }
            c if c.is_ascii_alphabetic() => {
                let mut name = String::from(c);
                while let Some(&n) = self.chars.peek() {
                    if n.is_ascii_alphanumeric() || n == '_' {
                        name.push(n);
                        self.bump();
                    } else {
                        break;
                    }
                }
                token(TokenKind::Ident(name))
            }
            other => Err(ParseError::new(
                span,
                format!("unexpected character {other:?}"),
                Vec::<String>::new(),
            )),
        }
    }
}
