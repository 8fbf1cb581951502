use std::fmt;
use std::sync::Arc;

use crate::diag::SourcePos;
use crate::syntax::SyntaxError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Ontology,
    Given,
    Let,
    In,
    Then,
    End,
    Fit,
    Empty,
    LBracket,
    RBracket,
    LBrace,
    RBrace,
    Semi,
    Colon,
    ColonColon,
    Comma,
    Eq,
    Question,
    MapsTo,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Tok::Ident(s) => return write!(f, "identifier '{s}'"),
            Tok::Ontology => "'ontology'",
            Tok::Given => "'given'",
            Tok::Let => "'let'",
            Tok::In => "'in'",
            Tok::Then => "'then'",
            Tok::End => "'end'",
            Tok::Fit => "'fit'",
            Tok::Empty => "'empty'",
            Tok::LBracket => "'['",
            Tok::RBracket => "']'",
            Tok::LBrace => "'{'",
            Tok::RBrace => "'}'",
            Tok::Semi => "';'",
            Tok::Colon => "':'",
            Tok::ColonColon => "'::'",
            Tok::Comma => "','",
            Tok::Eq => "'='",
            Tok::Question => "'?'",
            Tok::MapsTo => "'|->'",
            Tok::Eof => "end of input",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone)]
pub struct Token {
    pub tok: Tok,
    pub pos: SourcePos,
}

fn keyword(word: &str) -> Option<Tok> {
    Some(match word {
        "ontology" => Tok::Ontology,
        "given" => Tok::Given,
        "let" => Tok::Let,
        "in" => Tok::In,
        "then" => Tok::Then,
        "end" => Tok::End,
        "fit" => Tok::Fit,
        "empty" => Tok::Empty,
        _ => return None,
    })
}

pub fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

/// Splits `text` into tokens. The final token is always [`Tok::Eof`].
pub fn tokenize(text: &str, file: &str) -> Result<Vec<Token>, SyntaxError> {
    let file: Arc<str> = Arc::from(file);
    let mut out = Vec::new();
    let mut chars = text.chars().peekable();
    let (mut line, mut col) = (1u32, 1u32);
    let pos = |line, col| SourcePos::new(file.clone(), line, col);

    while let Some(&c) = chars.peek() {
        let start = pos(line, col);
        if c == '\n' {
            chars.next();
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            chars.next();
            col += 1;
            continue;
        }
        if c == '%' {
            chars.next();
            col += 1;
            if chars.peek() != Some(&'%') {
                return Err(SyntaxError::Lex {
                    pos: start,
                    found: '%',
                });
            }
            while let Some(&c) = chars.peek() {
                if c == '\n' {
                    break;
                }
                chars.next();
                col += 1;
            }
            continue;
        }
        if is_ident_char(c) {
            let mut word = String::new();
            while let Some(&c) = chars.peek() {
                if !is_ident_char(c) {
                    break;
                }
                word.push(c);
                chars.next();
                col += 1;
            }
            let tok = keyword(&word).unwrap_or(Tok::Ident(word));
            out.push(Token { tok, pos: start });
            continue;
        }
        chars.next();
        col += 1;
        let tok = match c {
            '[' => Tok::LBracket,
            ']' => Tok::RBracket,
            '{' => Tok::LBrace,
            '}' => Tok::RBrace,
            ';' => Tok::Semi,
            ',' => Tok::Comma,
            '=' => Tok::Eq,
            '?' => Tok::Question,
            ':' => {
                if chars.peek() == Some(&':') {
                    chars.next();
                    col += 1;
                    Tok::ColonColon
                } else {
                    Tok::Colon
                }
            }
            '|' => {
                let mut rest = chars.clone();
                if rest.next() == Some('-') && rest.next() == Some('>') {
                    chars.next();
                    chars.next();
                    col += 2;
                    Tok::MapsTo
                } else {
                    return Err(SyntaxError::Lex {
                        pos: start,
                        found: '|',
                    });
                }
            }
            other => {
                return Err(SyntaxError::Lex {
                    pos: start,
                    found: other,
                })
            }
        };
        out.push(Token { tok, pos: start });
    }
    out.push(Token {
        tok: Tok::Eof,
        pos: pos(line, col),
    });
    Ok(out)
}
