use crate::error::{Error, Result};

use super::ast::Pos;

#[derive(Clone, Debug, PartialEq, Eq)]
pub(super) enum Tok {
    Ident(String),
    Nat(u64),
    New,
    If,
    Then,
    Else,
    True,
    False,
    LParen,
    RParen,
    Lt,
    Gt,
    Bar,
    Dot,
    Bang,
    Eq,
    Comma,
    Semi,
    Eof,
}

impl Tok {
    pub(super) fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Nat(n) => format!("number `{n}`"),
            Tok::Eof => "end of input".to_string(),
            Tok::New => "`new`".into(),
            Tok::If => "`if`".into(),
            Tok::Then => "`then`".into(),
            Tok::Else => "`else`".into(),
            Tok::True => "`true`".into(),
            Tok::False => "`false`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Lt => "`<`".into(),
            Tok::Gt => "`>`".into(),
            Tok::Bar => "`|`".into(),
            Tok::Dot => "`.`".into(),
            Tok::Bang => "`!`".into(),
            Tok::Eq => "`=`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Semi => "`;`".into(),
        }
    }
}

pub(super) fn tokenize(src: &str) -> Result<Vec<(Tok, Pos)>> {
    let mut out = Vec::new();
    let mut line = 1;
    let mut col = 1;
    let mut chars = src.chars().peekable();
    while let Some(&ch) = chars.peek() {
        let pos = Pos { line, column: col };
        let advance = |c: char, line: &mut usize, col: &mut usize| {
            if c == '\n' {
                *line += 1;
                *col = 1;
            } else {
                *col += 1;
            }
        };
        if ch.is_whitespace() {
            chars.next();
            advance(ch, &mut line, &mut col);
            continue;
        }
        if ch == '#' {
            while let Some(&c) = chars.peek() {
                if c == '\n' {
                    break;
                }
                chars.next();
                col += 1;
            }
            continue;
        }
        if ch.is_ascii_alphabetic() || ch == '_' {
            let mut s = String::new();
            while let Some(&c) = chars.peek() {
                if c.is_ascii_alphanumeric() || c == '_' || c == '\'' {
                    s.push(c);
                    chars.next();
                    col += 1;
                } else {
                    break;
                }
            }
            let tok = match s.as_str() {
                "new" => Tok::New,
                "if" => Tok::If,
                "then" => Tok::Then,
                "else" => Tok::Else,
                "true" => Tok::True,
                "false" => Tok::False,
                _ => Tok::Ident(s),
            };
            out.push((tok, pos));
            continue;
        }
        if ch.is_ascii_digit() {
            let mut n: u64 = 0;
            while let Some(&c) = chars.peek() {
                let Some(d) = c.to_digit(10) else { break };
                n = n.checked_mul(10).and_then(|n| n.checked_add(d as u64)).ok_or_else(|| Error::Syntax {
                    line: pos.line,
                    column: pos.column,
                    message: "number too large".into(),
                })?;
                chars.next();
                col += 1;
            }
            out.push((Tok::Nat(n), pos));
            continue;
        }
        let tok = match ch {
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            '<' => Tok::Lt,
            '>' => Tok::Gt,
            '|' => Tok::Bar,
            '.' => Tok::Dot,
            '!' => Tok::Bang,
            '=' => Tok::Eq,
            ',' => Tok::Comma,
            ';' => Tok::Semi,
            other => {
                return Err(Error::Syntax { line, column: col, message: format!("unexpected character {other:?}") })
            }
        };
        chars.next();
        col += 1;
        out.push((tok, pos));
    }
    out.push((Tok::Eof, Pos { line, column: col }));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn comments_and_positions() {
        let toks = tokenize("# hello\n  a<()>").unwrap();
        assert_eq!(toks[0], (Tok::Ident("a".into()), Pos { line: 2, column: 3 }));
        assert_eq!(toks.last().unwrap().0, Tok::Eof);
    }

    #[test]
    fn rejects_stray_characters() {
        let err = tokenize("a<()> & b").unwrap_err();
        assert_eq!(err, Error::Syntax { line: 1, column: 7, message: "unexpected character '&'".into() });
    }
}
