//! Concrete syntax for λ-terms.
//!
//! ```text
//! term  ::= abs | app
//! abs   ::= ('\' | 'λ') ident+ '.' term
//! app   ::= atom+                      (left-associative)
//! atom  ::= ident | '(' term ')' | abs (only as the last atom)
//! ident ::= [A-Za-z0-9_]+
//! ```
//!
//! `\x y.M` abbreviates `\x.\y.M`. The result is hygiene-normalized.

use thiserror::Error;

use crate::term::Term;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("syntax error at offset {position}: {message}")]
pub struct ParseError {
    /// Character offset into the source.
    pub position: usize,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq)]
enum Token {
    Ident(String),
    Lambda,
    Dot,
    Open,
    Close,
}

fn is_ident_char(c: char) -> bool {
    c.is_alphanumeric() && c != 'λ' || c == '_'
}

fn tokenize(src: &str) -> Result<Vec<(usize, Token)>, ParseError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        match c {
            c if c.is_whitespace() => i += 1,
            '\\' | 'λ' => {
                out.push((i, Token::Lambda));
                i += 1;
            }
            '.' => {
                out.push((i, Token::Dot));
                i += 1;
            }
            '(' => {
                out.push((i, Token::Open));
                i += 1;
            }
            ')' => {
                out.push((i, Token::Close));
                i += 1;
            }
            c if is_ident_char(c) => {
                let start = i;
                while i < chars.len() && is_ident_char(chars[i]) {
                    i += 1;
                }
                out.push((start, Token::Ident(chars[start..i].iter().collect())));
            }
            other => {
                return Err(ParseError {
                    position: i,
                    message: format!("unexpected character {other:?}"),
                })
            }
        }
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<(usize, Token)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.tokens.get(self.pos).map_or(self.end, |(o, _)| *o)
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError {
            position: self.offset(),
            message: message.into(),
        })
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        let mut head: Option<Term> = None;
        loop {
            let bare_lambda = self.peek() == Some(&Token::Lambda);
            let atom = match self.peek() {
                Some(Token::Lambda) => Some(self.abstraction()?),
                Some(Token::Ident(x)) => {
                    let t = Term::Var(x.clone());
                    self.pos += 1;
                    Some(t)
                }
                Some(Token::Open) => {
                    self.pos += 1;
                    let t = self.term()?;
                    if self.peek() != Some(&Token::Close) {
                        return self.error("expected ')'");
                    }
                    self.pos += 1;
                    Some(t)
                }
                _ => None,
            };
            let Some(atom) = atom else { break };
            head = Some(match head {
                None => atom,
                Some(f) => Term::App(Box::new(f), Box::new(atom)),
            });
            // an unparenthesized abstraction swallows everything to its right
            if bare_lambda {
                break;
            }
        }
        match head {
            Some(t) => Ok(t),
            None => self.error("expected a term"),
        }
    }

    fn abstraction(&mut self) -> Result<Term, ParseError> {
        self.pos += 1;
        let mut binders = Vec::new();
        while let Some(Token::Ident(x)) = self.peek() {
            binders.push(x.clone());
            self.pos += 1;
        }
        if binders.is_empty() {
            return self.error("expected a binder after λ");
        }
        if self.peek() != Some(&Token::Dot) {
            return self.error("expected '.'");
        }
        self.pos += 1;
        let body = self.term()?;
        Ok(binders
            .into_iter()
            .rev()
            .fold(body, |b, x| Term::Abs(x, Box::new(b))))
    }
}

pub fn parse(src: &str) -> Result<Term, ParseError> {
    let tokens = tokenize(src)?;
    let mut p = Parser {
        tokens,
        pos: 0,
        end: src.chars().count(),
    };
    let t = p.term()?;
    if p.pos != p.tokens.len() {
        return p.error("unexpected trailing input");
    }
    Ok(t.hygienic())
}
