//! Tokenizer for the surface syntax. Whitespace-insensitive; `#` starts a
//! line comment.

use super::{Diagnostic, SourceSpan};

#[derive(Clone, PartialEq, Eq, Debug)]
pub(crate) enum TokKind {
    Ident(String),
    Nat(u64),
    LParen,
    RParen,
    LBrace,
    RBrace,
    LBrack,
    RBrack,
    Lt,
    Gt,
    Plus,
    Pipe,
    Backslash,
    Dot,
    Bang,
    Question,
    At,
    Colon,
    Comma,
    Eq,
    Quote,
    Underscore,
    Arrow,
}

impl TokKind {
    pub(crate) fn describe(&self) -> String {
        match self {
            TokKind::Ident(s) => format!("identifier `{s}`"),
            TokKind::Nat(n) => format!("number `{n}`"),
            TokKind::LParen => "`(`".into(),
            TokKind::RParen => "`)`".into(),
            TokKind::LBrace => "`{`".into(),
            TokKind::RBrace => "`}`".into(),
            TokKind::LBrack => "`[`".into(),
            TokKind::RBrack => "`]`".into(),
            TokKind::Lt => "`<`".into(),
            TokKind::Gt => "`>`".into(),
            TokKind::Plus => "`+`".into(),
            TokKind::Pipe => "`|`".into(),
            TokKind::Backslash => "`\\`".into(),
            TokKind::Dot => "`.`".into(),
            TokKind::Bang => "`!`".into(),
            TokKind::Question => "`?`".into(),
            TokKind::At => "`@`".into(),
            TokKind::Colon => "`:`".into(),
            TokKind::Comma => "`,`".into(),
            TokKind::Eq => "`=`".into(),
            TokKind::Quote => "`'`".into(),
            TokKind::Underscore => "`_`".into(),
            TokKind::Arrow => "`->`".into(),
        }
    }
}

#[derive(Clone, Debug)]
pub(crate) struct Tok {
    pub kind: TokKind,
    pub span: SourceSpan,
}

pub(crate) fn lex(src: &str) -> Result<Vec<Tok>, Diagnostic> {
    let bytes = src.as_bytes();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        match c {
            b' ' | b'\t' | b'\r' | b'\n' => i += 1,
            b'#' => {
                while i < bytes.len() && bytes[i] != b'\n' {
                    i += 1;
                }
            }
            b'a'..=b'z' | b'A'..=b'Z' => {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                toks.push(Tok {
                    kind: TokKind::Ident(src[start..i].to_string()),
                    span: SourceSpan { start, end: i },
                });
            }
            b'0'..=b'9' => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let text = &src[start..i];
                let n = text.parse::<u64>().map_err(|_| Diagnostic {
                    span: SourceSpan { start, end: i },
                    message: format!("number `{text}` out of range"),
                })?;
                toks.push(Tok {
                    kind: TokKind::Nat(n),
                    span: SourceSpan { start, end: i },
                });
            }
            b'-' => {
                if i + 1 < bytes.len() && bytes[i + 1] == b'>' {
                    toks.push(Tok {
                        kind: TokKind::Arrow,
                        span: SourceSpan {
                            start: i,
                            end: i + 2,
                        },
                    });
                    i += 2;
                } else {
                    return Err(Diagnostic {
                        span: SourceSpan {
                            start: i,
                            end: i + 1,
                        },
                        message: "unexpected character `-` (expected `->`)".into(),
                    });
                }
            }
            _ => {
                let kind = match c {
                    b'(' => TokKind::LParen,
                    b')' => TokKind::RParen,
                    b'{' => TokKind::LBrace,
                    b'}' => TokKind::RBrace,
                    b'[' => TokKind::LBrack,
                    b']' => TokKind::RBrack,
                    b'<' => TokKind::Lt,
                    b'>' => TokKind::Gt,
                    b'+' => TokKind::Plus,
                    b'|' => TokKind::Pipe,
                    b'\\' => TokKind::Backslash,
                    b'.' => TokKind::Dot,
                    b'!' => TokKind::Bang,
                    b'?' => TokKind::Question,
                    b'@' => TokKind::At,
                    b':' => TokKind::Colon,
                    b',' => TokKind::Comma,
                    b'=' => TokKind::Eq,
                    b'\'' => TokKind::Quote,
                    b'_' => TokKind::Underscore,
                    other => {
                        return Err(Diagnostic {
                            span: SourceSpan {
                                start: i,
                                end: i + 1,
                            },
                            message: format!("unexpected character `{}`", char::from(other)),
                        })
                    }
                };
                toks.push(Tok {
                    kind,
                    span: SourceSpan {
                        start: i,
                        end: i + 1,
                    },
                });
                i += 1;
            }
        }
    }
    Ok(toks)
}
