// SPDX-License-Identifier: Apache-2.0

use crate::spec_lang::error::{Pos, SpecError};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TokenKind {
    Ident(String),
    Int(u64),
    LBrace,
    RBrace,
    LParen,
    RParen,
    Colon,
    Semi,
    Bar,
    /// `:=`
    Assign,
    /// `=`
    Eq,
    /// `/=`
    Neq,
    Eof,
}

impl TokenKind {
    pub fn describe(&self) -> String {
        match self {
            TokenKind::Ident(s) => format!("`{s}`"),
            TokenKind::Int(n) => format!("`{n}`"),
            TokenKind::LBrace => "`{`".into(),
            TokenKind::RBrace => "`}`".into(),
            TokenKind::LParen => "`(`".into(),
            TokenKind::RParen => "`)`".into(),
            TokenKind::Colon => "`:`".into(),
            TokenKind::Semi => "`;`".into(),
            TokenKind::Bar => "`|`".into(),
            TokenKind::Assign => "`:=`".into(),
            TokenKind::Eq => "`=`".into(),
            TokenKind::Neq => "`/=`".into(),
            TokenKind::Eof => "end of input".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    pub pos: Pos,
}

/// Splits `source` into tokens, dropping whitespace and `--` comments.
/// The returned vector always ends with [`TokenKind::Eof`].
pub fn tokenize(source: &str) -> Result<Vec<Token>, SpecError> {
    let source = source.strip_prefix('\u{feff}').unwrap_or(source);
    let mut tokens = Vec::new();
    let mut chars = source.chars().peekable();
    let (mut line, mut col) = (1usize, 1usize);

    macro_rules! bump {
        () => {{
            let c = chars.next();
            if c == Some('\n') {
                line += 1;
                col = 1;
            } else if c.is_some() {
                col += 1;
            }
            c
        }};
    }

    while let Some(&c) = chars.peek() {
        let pos = Pos { line, col };
        match c {
            c if c.is_whitespace() => {
                bump!();
            }
            '-' => {
                bump!();
                if chars.peek() == Some(&'-') {
                    while let Some(&c) = chars.peek() {
                        if c == '\n' {
                            break;
                        }
                        bump!();
                    }
                } else {
                    return Err(SpecError::parse(pos, "unexpected `-` (comments start with `--`)"));
                }
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut s = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_ascii_alphanumeric() || c == '_' {
                        s.push(c);
                        bump!();
                    } else {
                        break;
                    }
                }
                tokens.push(Token {
                    kind: TokenKind::Ident(s),
                    pos,
                });
            }
            c if c.is_ascii_digit() => {
                let mut s = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_ascii_digit() {
                        s.push(c);
                        bump!();
                    } else {
                        break;
                    }
                }
                let n = s
                    .parse::<u64>()
                    .map_err(|_| SpecError::parse(pos, format!("integer `{s}` out of range")))?;
                tokens.push(Token {
                    kind: TokenKind::Int(n),
                    pos,
                });
            }
            _ => {
                bump!();
                let kind = match c {
                    '{' => TokenKind::LBrace,
                    '}' => TokenKind::RBrace,
                    '(' => TokenKind::LParen,
                    ')' => TokenKind::RParen,
                    ';' => TokenKind::Semi,
                    '|' => TokenKind::Bar,
                    '=' => TokenKind::Eq,
                    ':' => {
                        if chars.peek() == Some(&'=') {
                            bump!();
                            TokenKind::Assign
                        } else {
                            TokenKind::Colon
                        }
                    }
                    '/' => {
                        if chars.peek() == Some(&'=') {
                            bump!();
                            TokenKind::Neq
                        } else {
                            return Err(SpecError::parse(pos, "unexpected `/` (did you mean `/=`?)"));
                        }
                    }
                    other => {
                        return Err(SpecError::parse(pos, format!("unexpected character `{other}`")))
                    }
                };
                tokens.push(Token { kind, pos });
            }
        }
    }
    tokens.push(Token {
        kind: TokenKind::Eof,
        pos: Pos { line, col },
    });
    Ok(tokens)
}
