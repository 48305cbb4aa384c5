use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum Tok {
    /// Lowercase-initial identifier: predicate or constant.
    Ident(String),
    /// Uppercase- or underscore-initial identifier.
    Var(String),
    /// Digits, optionally with a fractional part.
    Number(String),
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Dot,
    Semi,
    Slash,
    If,
    Prob,
    Not,
    Eq,
    Neq,
    Eof,
}

impl Tok {
    pub(crate) fn describe(&self) -> String {
        match self {
            Tok::Ident(s) | Tok::Var(s) | Tok::Number(s) => format!("`{s}`"),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::LBracket => "`[`".into(),
            Tok::RBracket => "`]`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Dot => "`.`".into(),
            Tok::Semi => "`;`".into(),
            Tok::Slash => "`/`".into(),
            Tok::If => "`:-`".into(),
            Tok::Prob => "`::`".into(),
            Tok::Not => "`\\+`".into(),
            Tok::Eq => "`=`".into(),
            Tok::Neq => "`\\=`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) struct Pos {
    pub line: usize,
    pub column: usize,
}

pub(crate) fn tokenize(text: &str) -> Result<Vec<(Tok, Pos)>> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    while i < chars.len() {
        let c = chars[i];
        let pos = Pos { line, column: col };
        let advance = |n: usize, i: &mut usize, col: &mut usize| {
            *i += n;
            *col += n;
        };
        match c {
            '\n' => {
                i += 1;
                line += 1;
                col = 1;
            }
            c if c.is_whitespace() => advance(1, &mut i, &mut col),
            '%' => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                }
            }
            '(' => {
                out.push((Tok::LParen, pos));
                advance(1, &mut i, &mut col);
            }
            ')' => {
                out.push((Tok::RParen, pos));
                advance(1, &mut i, &mut col);
            }
            '[' => {
                out.push((Tok::LBracket, pos));
                advance(1, &mut i, &mut col);
            }
            ']' => {
                out.push((Tok::RBracket, pos));
                advance(1, &mut i, &mut col);
            }
            ',' => {
                out.push((Tok::Comma, pos));
                advance(1, &mut i, &mut col);
            }
            ';' => {
                out.push((Tok::Semi, pos));
                advance(1, &mut i, &mut col);
            }
            '/' => {
                out.push((Tok::Slash, pos));
                advance(1, &mut i, &mut col);
            }
            '=' => {
                out.push((Tok::Eq, pos));
                advance(1, &mut i, &mut col);
            }
            '.' => {
                if chars.get(i + 1).is_some_and(|d| d.is_ascii_digit()) {
                    let start = i;
                    i += 1;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                    col += i - start;
                    out.push((Tok::Number(chars[start..i].iter().collect()), pos));
                } else {
                    out.push((Tok::Dot, pos));
                    advance(1, &mut i, &mut col);
                }
            }
            ':' => match chars.get(i + 1) {
                Some('-') => {
                    out.push((Tok::If, pos));
                    advance(2, &mut i, &mut col);
                }
                Some(':') => {
                    out.push((Tok::Prob, pos));
                    advance(2, &mut i, &mut col);
                }
                _ => return Err(syntax(pos, "expected `:-` or `::`")),
            },
            '\\' => match chars.get(i + 1) {
                Some('+') => {
                    out.push((Tok::Not, pos));
                    advance(2, &mut i, &mut col);
                }
                Some('=') => {
                    out.push((Tok::Neq, pos));
                    advance(2, &mut i, &mut col);
                }
                _ => return Err(syntax(pos, "expected `\\+` or `\\=`")),
            },
            c if c.is_ascii_digit() => {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                if i + 1 < chars.len() && chars[i] == '.' && chars[i + 1].is_ascii_digit() {
                    i += 1;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                }
                col += i - start;
                out.push((Tok::Number(chars[start..i].iter().collect()), pos));
            }
            c if c.is_alphabetic() || c == '_' => {
                let start = i;
                while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                col += i - start;
                let word: String = chars[start..i].iter().collect();
                if c.is_uppercase() || c == '_' {
                    out.push((Tok::Var(word), pos));
                } else {
                    out.push((Tok::Ident(word), pos));
                }
            }
            other => return Err(syntax(pos, format!("unexpected character `{other}`"))),
        }
    }
    out.push((Tok::Eof, Pos { line, column: col }));
    Ok(out)
}

pub(crate) fn syntax(pos: Pos, message: impl Into<String>) -> Error {
    Error::Syntax {
        line: pos.line,
        column: pos.column,
        message: message.into(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kinds(text: &str) -> Vec<Tok> {
        tokenize(text)
            .unwrap()
            .into_iter()
            .map(|(t, _)| t)
            .collect()
    }

    #[test]
    fn numbers_versus_clause_terminator() {
        assert_eq!(
            kinds("0.5 :: p(1)."),
            vec![
                Tok::Number("0.5".into()),
                Tok::Prob,
                Tok::Ident("p".into()),
                Tok::LParen,
                Tok::Number("1".into()),
                Tok::RParen,
                Tok::Dot,
                Tok::Eof
            ]
        );
    }

    #[test]
    fn operators_and_comments() {
        assert_eq!(
            kinds("a :- \\+ b, X \\= Y. % trailing\r\n"),
            vec![
                Tok::Ident("a".into()),
                Tok::If,
                Tok::Not,
                Tok::Ident("b".into()),
                Tok::Comma,
                Tok::Var("X".into()),
                Tok::Neq,
                Tok::Var("Y".into()),
                Tok::Dot,
                Tok::Eof
            ]
        );
    }

    #[test]
    fn reports_position() {
        let err = tokenize("a.\n  b & c").unwrap_err();
        assert_eq!(
            err,
            Error::Syntax {
                line: 2,
                column: 5,
                message: "unexpected character `&`".into()
            }
        );
    }
}
