//! Tokenizer for `.pml` model text. `//` comments run to end of line;
//! everything else is whitespace-insensitive.

use crate::diag::{DiagCode, Diagnostic, SourceSpan};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TokenKind {
    Ident(String),
    Number(u64),
    Str(String),
    Arrow,
    Dot,
    Comma,
    Colon,
    Semi,
    LBrace,
    RBrace,
    /// The `/s` rate unit.
    PerSec,
}

impl TokenKind {
    pub fn describe(&self) -> String {
        match self {
            TokenKind::Ident(s) => format!("`{s}`"),
            TokenKind::Number(n) => format!("`{n}`"),
            TokenKind::Str(_) => "string".into(),
            TokenKind::Arrow => "`->`".into(),
            TokenKind::Dot => "`.`".into(),
            TokenKind::Comma => "`,`".into(),
            TokenKind::Colon => "`:`".into(),
            TokenKind::Semi => "`;`".into(),
            TokenKind::LBrace => "`{`".into(),
            TokenKind::RBrace => "`}`".into(),
            TokenKind::PerSec => "`/s`".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    pub line: u32,
    pub column: u32,
}

struct Cursor<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: u32,
    column: u32,
}

impl Cursor<'_> {
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

    fn peek(&mut self) -> Option<char> {
        self.chars.peek().copied()
    }
}

pub fn lex(text: &str, file: &str) -> Result<Vec<Token>, Diagnostic> {
    let mut cur = Cursor {
        chars: text.chars().peekable(),
        line: 1,
        column: 1,
    };
    let mut tokens = Vec::new();

    while let Some(c) = cur.peek() {
        let (line, column) = (cur.line, cur.column);
        let span = || SourceSpan::new(file, line, column);

        if c.is_whitespace() {
            cur.bump();
            continue;
        }

        let kind = match c {
            '{' => {
                cur.bump();
                TokenKind::LBrace
            }
            '}' => {
                cur.bump();
                TokenKind::RBrace
            }
            ';' => {
                cur.bump();
                TokenKind::Semi
            }
            ',' => {
                cur.bump();
                TokenKind::Comma
            }
            ':' => {
                cur.bump();
                TokenKind::Colon
            }
            '.' => {
                cur.bump();
                TokenKind::Dot
            }
            '-' => {
                cur.bump();
                if cur.peek() == Some('>') {
                    cur.bump();
                    TokenKind::Arrow
                } else {
                    return Err(Diagnostic::new(
                        DiagCode::Parse,
                        "expected `->`".to_string(),
                        span(),
                    ));
                }
            }
            '/' => {
                cur.bump();
                match cur.peek() {
                    Some('/') => {
                        while let Some(c) = cur.peek() {
                            if c == '\n' {
                                break;
                            }
                            cur.bump();
                        }
                        continue;
                    }
                    Some('s') => {
                        cur.bump();
                        TokenKind::PerSec
                    }
                    _ => {
                        return Err(Diagnostic::new(
                            DiagCode::Parse,
                            "expected `//` comment or `/s` unit".to_string(),
                            span(),
                        ))
                    }
                }
            }
            '"' => {
                cur.bump();
                let mut s = String::new();
                loop {
                    match cur.bump() {
                        Some('"') => break,
                        Some('\\') => match cur.bump() {
                            Some('"') => s.push('"'),
                            Some('\\') => s.push('\\'),
                            Some('n') => s.push('\n'),
                            Some('t') => s.push('\t'),
                            other => {
                                return Err(Diagnostic::new(
                                    DiagCode::Parse,
                                    format!("unknown escape {:?}", other),
                                    span(),
                                ))
                            }
                        },
                        Some('\n') | None => {
                            return Err(Diagnostic::new(
                                DiagCode::Parse,
                                "unterminated string".to_string(),
                                span(),
                            ))
                        }
                        Some(c) => s.push(c),
                    }
                }
                TokenKind::Str(s)
            }
            c if c.is_ascii_digit() => {
                let mut value: u64 = 0;
                while let Some(d) = cur.peek() {
                    let Some(digit) = d.to_digit(10) else { break };
                    cur.bump();
                    value = value
                        .checked_mul(10)
                        .and_then(|v| v.checked_add(digit as u64))
                        .ok_or_else(|| {
                            Diagnostic::new(
                                DiagCode::Parse,
                                "number does not fit in 64 bits".to_string(),
                                span(),
                            )
                        })?;
                }
                TokenKind::Number(value)
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut s = String::new();
                while let Some(c) = cur.peek() {
                    if c.is_ascii_alphanumeric() || c == '_' {
                        s.push(c);
                        cur.bump();
                    } else {
                        break;
                    }
                }
                TokenKind::Ident(s)
            }
            other => {
                return Err(Diagnostic::new(
                    DiagCode::Parse,
                    format!("unexpected character `{other}`"),
                    span(),
                ))
            }
        };
        tokens.push(Token { kind, line, column });
    }
    Ok(tokens)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lexes_minimal_model() {
        let toks = lex("platform P { initiator C0; }", "t.pml").unwrap();
        assert_eq!(toks.len(), 7);
        assert_eq!(toks[0].kind, TokenKind::Ident("platform".into()));
        assert_eq!(toks[3].kind, TokenKind::Ident("initiator".into()));
    }

    #[test]
    fn comments_are_skipped() {
        let toks = lex("a // rest of line\nb", "t.pml").unwrap();
        assert_eq!(toks.len(), 2);
        assert_eq!(toks[1].line, 2);
    }

    #[test]
    fn rate_unit_lexes_adjacent_to_number() {
        let toks = lex("rate 1000/s", "t.pml").unwrap();
        assert_eq!(toks[1].kind, TokenKind::Number(1000));
        assert_eq!(toks[2].kind, TokenKind::PerSec);
    }

    #[test]
    fn unterminated_string_is_parse_error() {
        let err = lex("\"abc", "t.pml").unwrap_err();
        assert_eq!(err.code, DiagCode::Parse);
    }

    #[test]
    fn spans_are_one_based() {
        let toks = lex("\n  x", "t.pml").unwrap();
        assert_eq!((toks[0].line, toks[0].column), (2, 3));
    }
}
