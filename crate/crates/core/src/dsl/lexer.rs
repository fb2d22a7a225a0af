use std::fmt;

use super::ParseError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Tok {
    /// Identifiers, including a trailing `'` and keywords.
    Ident(String),
    /// `0.x`
    Indexed(String),
    Int(u64),
    /// `"..."`
    Str(String),
    /// `'...'`
    Sym(String),
    /// A balanced `{...}` block.
    Json(String),
    LParen,
    RParen,
    LBracket,
    RBracket,
    Lt,
    Gt,
    Le,
    CondOpen,
    CondClose,
    Par,
    Semi,
    And,
    Or,
    Implies,
    Not,
    Eq,
    Assign,
    Caret,
    Minus,
    Comma,
    Slash,
    Dot,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Tok::Ident(s) | Tok::Indexed(s) => return write!(f, "`{s}`"),
            Tok::Int(n) => return write!(f, "`{n}`"),
            Tok::Str(s) => return write!(f, "\"{s}\""),
            Tok::Sym(s) => return write!(f, "'{s}'"),
            Tok::Json(_) => "timed-trace literal",
            Tok::LParen => "`(`",
            Tok::RParen => "`)`",
            Tok::LBracket => "`[`",
            Tok::RBracket => "`]`",
            Tok::Lt => "`<`",
            Tok::Gt => "`>`",
            Tok::Le => "`<=`",
            Tok::CondOpen => "`<|`",
            Tok::CondClose => "`|>`",
            Tok::Par => "`||`",
            Tok::Semi => "`;`",
            Tok::And => "`/\\`",
            Tok::Or => "`\\/`",
            Tok::Implies => "`=>`",
            Tok::Not => "`~`",
            Tok::Eq => "`=`",
            Tok::Assign => "`:=`",
            Tok::Caret => "`^`",
            Tok::Minus => "`-`",
            Tok::Comma => "`,`",
            Tok::Slash => "`/`",
            Tok::Dot => "`.`",
            Tok::Eof => "end of input",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Spanned {
    pub tok: Tok,
    pub line: usize,
    pub col: usize,
}

pub(crate) fn lex(text: &str) -> Result<Vec<Spanned>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0, 1, 1);
    let advance = |i: &mut usize, line: &mut usize, col: &mut usize, n: usize| {
        for _ in 0..n {
            if chars[*i] == '\n' {
                *line += 1;
                *col = 1;
            } else {
                *col += 1;
            }
            *i += 1;
        }
    };
    let error = |line, col, msg: &str| ParseError {
        line,
        col,
        found: msg.to_string(),
        expected: Default::default(),
    };
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            advance(&mut i, &mut line, &mut col, 1);
            continue;
        }
        let (start_line, start_col) = (line, col);
        let peek = chars.get(i + 1).copied();
        let two = |a: char, b: char| c == a && peek == Some(b);
        let (tok, len) = if c.is_ascii_alphabetic() || c == '_' {
            let mut j = i;
            while j < chars.len() && (chars[j].is_ascii_alphanumeric() || chars[j] == '_') {
                j += 1;
            }
            if chars.get(j) == Some(&'\'') {
                j += 1;
            }
            (Tok::Ident(chars[i..j].iter().collect()), j - i)
        } else if c.is_ascii_digit() {
            let mut j = i;
            while j < chars.len() && chars[j].is_ascii_digit() {
                j += 1;
            }
            let digits: String = chars[i..j].iter().collect();
            if chars.get(j) == Some(&'.') && chars.get(j + 1).is_some_and(|c| c.is_ascii_alphabetic() || *c == '_') {
                let mut k = j + 1;
                while k < chars.len() && (chars[k].is_ascii_alphanumeric() || chars[k] == '_') {
                    k += 1;
                }
                if chars.get(k) == Some(&'\'') {
                    k += 1;
                }
                (Tok::Indexed(chars[i..k].iter().collect()), k - i)
            } else {
                let n = digits
                    .parse()
                    .map_err(|_| error(start_line, start_col, "integer literal out of range"))?;
                (Tok::Int(n), j - i)
            }
        } else if c == '"' || c == '\'' {
            let mut j = i + 1;
            while j < chars.len() && chars[j] != c && chars[j] != '\n' {
                j += 1;
            }
            if chars.get(j) != Some(&c) {
                return Err(error(start_line, start_col, "unterminated literal"));
            }
            let body: String = chars[i + 1..j].iter().collect();
            (if c == '"' { Tok::Str(body) } else { Tok::Sym(body) }, j + 1 - i)
        } else if c == '{' {
            let mut depth = 0usize;
            let mut in_str = false;
            let mut j = i;
            loop {
                let Some(&d) = chars.get(j) else {
                    return Err(error(start_line, start_col, "unterminated timed-trace literal"));
                };
                match d {
                    '\\' if in_str => j += 1,
                    '"' => in_str = !in_str,
                    '{' if !in_str => depth += 1,
                    '}' if !in_str => {
                        depth -= 1;
                        if depth == 0 {
                            break;
                        }
                    }
                    _ => {}
                }
                j += 1;
            }
            (Tok::Json(chars[i..=j].iter().collect()), j + 1 - i)
        } else if two('<', '=') {
            (Tok::Le, 2)
        } else if two('<', '|') {
            (Tok::CondOpen, 2)
        } else if two('|', '>') {
            (Tok::CondClose, 2)
        } else if two('|', '|') {
            (Tok::Par, 2)
        } else if two('/', '\\') {
            (Tok::And, 2)
        } else if two('\\', '/') {
            (Tok::Or, 2)
        } else if two('=', '>') {
            (Tok::Implies, 2)
        } else if two(':', '=') {
            (Tok::Assign, 2)
        } else {
            let tok = match c {
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                '[' => Tok::LBracket,
                ']' => Tok::RBracket,
                '<' => Tok::Lt,
                '>' => Tok::Gt,
                ';' => Tok::Semi,
                '~' => Tok::Not,
                '=' => Tok::Eq,
                '^' => Tok::Caret,
                '-' => Tok::Minus,
                ',' => Tok::Comma,
                '/' => Tok::Slash,
                '.' => Tok::Dot,
                _ => return Err(error(start_line, start_col, &format!("unexpected character `{c}`"))),
            };
            (tok, 1)
        };
        out.push(Spanned { tok, line: start_line, col: start_col });
        advance(&mut i, &mut line, &mut col, len);
    }
    out.push(Spanned { tok: Tok::Eof, line, col });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(s: &str) -> Vec<Tok> {
        lex(s).unwrap().into_iter().map(|t| t.tok).collect()
    }

    #[test]
    fn operators_and_literals() {
        assert_eq!(
            toks("tr' <= 0.tr ^ <a> <| wait |> {\"x\": \"}\"}"),
            vec![
                Tok::Ident("tr'".into()),
                Tok::Le,
                Tok::Indexed("0.tr".into()),
                Tok::Caret,
                Tok::Lt,
                Tok::Ident("a".into()),
                Tok::Gt,
                Tok::CondOpen,
                Tok::Ident("wait".into()),
                Tok::CondClose,
                Tok::Json("{\"x\": \"}\"}".into()),
                Tok::Eof,
            ]
        );
    }

    #[test]
    fn positions() {
        let t = lex("a\n  /\\ b").unwrap();
        assert_eq!((t[1].line, t[1].col), (2, 3));
        assert_eq!((t[2].line, t[2].col), (2, 6));
        assert_eq!((t[3].line, t[3].col), (2, 7));
    }

    #[test]
    fn unterminated() {
        let e = lex("x = \"1/2").unwrap_err();
        assert_eq!((e.line, e.col), (1, 5));
    }
}
