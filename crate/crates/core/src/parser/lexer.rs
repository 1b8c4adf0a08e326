use std::fmt;
use std::rc::Rc;

use crate::error::{Diagnostic, ErrorCode};
use crate::parser::Span;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    // declarations
    Def,
    Postulate,
    Rewrite,
    // term keywords
    Let,
    Con,
    In,
    Return,
    Set,
    SetOmega,
    Level,
    LZero,
    LSuc,
    Flat,
    Fst,
    Snd,
    Refl,
    TT,
    Unit,
    Empty,
    Bool,
    True,
    False,
    Absurd,
    BoolElim,
    IdElim,
    Id,
    // punctuation
    LParen,
    RParen,
    LBrace,
    RBrace,
    Colon,
    Assign,
    Arrow,
    Star,
    Equals,
    Backslash,
    Dot,
    Comma,
    Lub,
    AtFlat,
    Underscore,
}

impl Tok {
    fn keyword(s: &str) -> Option<Tok> {
        Some(match s {
            "def" => Tok::Def,
            "postulate" => Tok::Postulate,
            "rewrite" => Tok::Rewrite,
            "let" => Tok::Let,
            "con" => Tok::Con,
            "in" => Tok::In,
            "return" => Tok::Return,
            "Set" => Tok::Set,
            "SetOmega" => Tok::SetOmega,
            "Level" => Tok::Level,
            "lzero" => Tok::LZero,
            "lsuc" => Tok::LSuc,
            "Flat" => Tok::Flat,
            "fst" => Tok::Fst,
            "snd" => Tok::Snd,
            "refl" => Tok::Refl,
            "tt" => Tok::TT,
            "Unit" => Tok::Unit,
            "Empty" => Tok::Empty,
            "Bool" => Tok::Bool,
            "true" => Tok::True,
            "false" => Tok::False,
            "absurd" => Tok::Absurd,
            "boolElim" => Tok::BoolElim,
            "idElim" => Tok::IdElim,
            "Id" => Tok::Id,
            _ => return None,
        })
    }

    pub fn is_keyword_name(s: &str) -> bool {
        Tok::keyword(s).is_some()
    }
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Tok::Ident(x) => return write!(f, "identifier `{x}`"),
            Tok::Def => "def",
            Tok::Postulate => "postulate",
            Tok::Rewrite => "rewrite",
            Tok::Let => "let",
            Tok::Con => "con",
            Tok::In => "in",
            Tok::Return => "return",
            Tok::Set => "Set",
            Tok::SetOmega => "SetOmega",
            Tok::Level => "Level",
            Tok::LZero => "lzero",
            Tok::LSuc => "lsuc",
            Tok::Flat => "Flat",
            Tok::Fst => "fst",
            Tok::Snd => "snd",
            Tok::Refl => "refl",
            Tok::TT => "tt",
            Tok::Unit => "Unit",
            Tok::Empty => "Empty",
            Tok::Bool => "Bool",
            Tok::True => "true",
            Tok::False => "false",
            Tok::Absurd => "absurd",
            Tok::BoolElim => "boolElim",
            Tok::IdElim => "idElim",
            Tok::Id => "Id",
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::LBrace => "{",
            Tok::RBrace => "}",
            Tok::Colon => ":",
            Tok::Assign => ":=",
            Tok::Arrow => "->",
            Tok::Star => "*",
            Tok::Equals => "=",
            Tok::Backslash => "\\",
            Tok::Dot => ".",
            Tok::Comma => ",",
            Tok::Lub => "\\/",
            Tok::AtFlat => "@flat",
            Tok::Underscore => "_",
        };
        write!(f, "`{s}`")
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Token {
    pub tok: Tok,
    pub span: Span,
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '\''
}

/// Split source text into tokens, skipping whitespace and comments.
pub fn tokenize(file: &str, src: &str) -> Result<Vec<Token>, Diagnostic> {
    let file: Rc<str> = Rc::from(file);
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1u32, 1u32);
    let span = |line, col| Span {
        file: file.clone(),
        line,
        col,
    };

    macro_rules! bump {
        () => {{
            if chars[i] == '\n' {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
            i += 1;
        }};
    }

    while i < chars.len() {
        let c = chars[i];
        let next = chars.get(i + 1).copied();
        if c.is_whitespace() {
            bump!();
            continue;
        }
        if c == '-' && next == Some('-') {
            while i < chars.len() && chars[i] != '\n' {
                bump!();
            }
            continue;
        }
        if c == '{' && next == Some('-') {
            let start = span(line, col);
            let mut depth = 0usize;
            loop {
                if i >= chars.len() {
                    return Err(Diagnostic::new(
                        ErrorCode::Lexical,
                        start,
                        "unterminated block comment",
                    ));
                }
                if chars[i] == '{' && chars.get(i + 1) == Some(&'-') {
                    depth += 1;
                    bump!();
                    bump!();
                } else if chars[i] == '-' && chars.get(i + 1) == Some(&'}') {
                    depth -= 1;
                    bump!();
                    bump!();
                    if depth == 0 {
                        break;
                    }
                } else {
                    bump!();
                }
            }
            continue;
        }

        let here = span(line, col);
        if is_ident_start(c) {
            let mut s = String::new();
            while i < chars.len() && is_ident_char(chars[i]) {
                s.push(chars[i]);
                bump!();
            }
            let tok = if s == "_" {
                Tok::Underscore
            } else {
                Tok::keyword(&s).unwrap_or(Tok::Ident(s))
            };
            out.push(Token { tok, span: here });
            continue;
        }

        let (tok, len) = match (c, next) {
            (':', Some('=')) => (Tok::Assign, 2),
            ('-', Some('>')) => (Tok::Arrow, 2),
            ('\\', Some('/')) => (Tok::Lub, 2),
            ('(', _) => (Tok::LParen, 1),
            (')', _) => (Tok::RParen, 1),
            ('{', _) => (Tok::LBrace, 1),
            ('}', _) => (Tok::RBrace, 1),
            (':', _) => (Tok::Colon, 1),
            ('*', _) => (Tok::Star, 1),
            ('=', _) => (Tok::Equals, 1),
            ('\\', _) => (Tok::Backslash, 1),
            ('.', _) => (Tok::Dot, 1),
            (',', _) => (Tok::Comma, 1),
            ('@', _) => {
                let word: String = chars[i + 1..]
                    .iter()
                    .take_while(|c| is_ident_char(**c))
                    .collect();
                if word != "flat" {
                    return Err(Diagnostic::new(
                        ErrorCode::Lexical,
                        here,
                        "`@` must be followed by `flat`",
                    ));
                }
                (Tok::AtFlat, 5)
            }
            _ => {
                return Err(Diagnostic::new(
                    ErrorCode::Lexical,
                    here,
                    format!("illegal character {c:?}"),
                ))
            }
        };
        for _ in 0..len {
            bump!();
        }
        out.push(Token { tok, span: here });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(s: &str) -> Vec<Tok> {
        tokenize("t", s)
            .unwrap()
            .into_iter()
            .map(|t| t.tok)
            .collect()
    }

    #[test]
    fn simple_definition() {
        assert_eq!(
            toks("def x : Unit := tt"),
            vec![
                Tok::Def,
                Tok::Ident("x".into()),
                Tok::Colon,
                Tok::Unit,
                Tok::Assign,
                Tok::TT
            ]
        );
    }

    #[test]
    fn nested_comments() {
        assert_eq!(toks("{- {- nested -} -} postulate"), vec![Tok::Postulate]);
        assert_eq!(toks("-- line\nrewrite"), vec![Tok::Rewrite]);
    }

    #[test]
    fn unicode_is_illegal() {
        let e = tokenize("t", "λ").unwrap_err();
        assert_eq!(e.code, ErrorCode::Lexical);
        assert_eq!((e.span.line, e.span.col), (1, 1));
    }

    #[test]
    fn unterminated_comment() {
        let e = tokenize("t", "def\n  {- {- -}").unwrap_err();
        assert_eq!(e.code, ErrorCode::Lexical);
        assert_eq!((e.span.line, e.span.col), (2, 3));
    }

    #[test]
    fn lub_and_lambda() {
        assert_eq!(
            toks("\\x. l \\/ k"),
            vec![
                Tok::Backslash,
                Tok::Ident("x".into()),
                Tok::Dot,
                Tok::Ident("l".into()),
                Tok::Lub,
                Tok::Ident("k".into())
            ]
        );
    }

    #[test]
    fn positions_count_columns() {
        let ts = tokenize("t", "a\n  bc").unwrap();
        assert_eq!((ts[1].span.line, ts[1].span.col), (2, 3));
    }
}
