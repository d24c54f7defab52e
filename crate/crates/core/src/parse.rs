//! Parser for the concrete formula grammar.
//!
//! ```text
//! imp   ::= or ( "->" imp )?
//! or    ::= and ( "|" and )*
//! and   ::= unary ( "&" unary )*
//! unary ::= "~" unary | "K{" agent "}" unary | "C" unary | "E" unary | atom
//! atom  ::= ident | "false" | "true" | "(" imp ")"
//! ```

use thiserror::Error;

use crate::formula::{Agent, AgentSet, Formula};

#[derive(Debug, Error, PartialEq, Eq, Clone)]
pub enum ParseError {
    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown agent {name:?} at position {pos}")]
    UnknownAgent { pos: usize, name: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    False,
    True,
    Not,
    K(String),
    C,
    E,
    And,
    Or,
    Arrow,
    LParen,
    RParen,
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut out = Vec::new();
    let mut i = 0;
    let err = |pos: usize, msg: &str| ParseError::Syntax { pos, msg: msg.to_string() };
    while i < chars.len() {
        let (pos, c) = chars[i];
        match c {
            c if c.is_whitespace() => i += 1,
            '~' => {
                out.push((pos, Tok::Not));
                i += 1;
            }
            '&' => {
                out.push((pos, Tok::And));
                i += 1;
            }
            '|' => {
                out.push((pos, Tok::Or));
                i += 1;
            }
            '(' => {
                out.push((pos, Tok::LParen));
                i += 1;
            }
            ')' => {
                out.push((pos, Tok::RParen));
                i += 1;
            }
            '-' => {
                if chars.get(i + 1).map(|x| x.1) == Some('>') {
                    out.push((pos, Tok::Arrow));
                    i += 2;
                } else {
                    return Err(err(pos, "expected '->'"));
                }
            }
            'K' => {
                if chars.get(i + 1).map(|x| x.1) != Some('{') {
                    return Err(err(pos, "expected '{' after K"));
                }
                let mut j = i + 2;
                let mut name = String::new();
                while j < chars.len() && chars[j].1 != '}' {
                    name.push(chars[j].1);
                    j += 1;
                }
                if j >= chars.len() {
                    return Err(err(pos, "unterminated agent brace"));
                }
                let name = name.trim().to_string();
                if name.is_empty() || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
                    return Err(err(pos, "invalid agent name"));
                }
                out.push((pos, Tok::K(name)));
                i = j + 1;
            }
            'C' | 'E' if !chars
                .get(i + 1)
                .map(|x| x.1.is_ascii_alphanumeric() || x.1 == '_')
                .unwrap_or(false) =>
            {
                out.push((pos, if c == 'C' { Tok::C } else { Tok::E }));
                i += 1;
            }
            c if c.is_ascii_lowercase() => {
                let mut j = i;
                let mut name = String::new();
                while j < chars.len() && (chars[j].1.is_ascii_alphanumeric() || chars[j].1 == '_') {
                    name.push(chars[j].1);
                    j += 1;
                }
                let tok = match name.as_str() {
                    "false" => Tok::False,
                    "true" => Tok::True,
                    _ => Tok::Ident(name),
                };
                out.push((pos, tok));
                i = j;
            }
            _ => return Err(err(pos, &format!("unexpected character {:?}", c))),
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    i: usize,
    end: usize,
    agents: &'a AgentSet,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.i).map(|t| &t.1)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.i).map(|t| t.0).unwrap_or(self.end)
    }

    fn error<T>(&self, msg: &str) -> Result<T, ParseError> {
        Err(ParseError::Syntax { pos: self.pos(), msg: msg.to_string() })
    }

    fn imp(&mut self) -> Result<Formula, ParseError> {
        let l = self.or()?;
        if self.peek() == Some(&Tok::Arrow) {
            self.i += 1;
            let r = self.imp()?;
            return Ok(Formula::implies(l, r));
        }
        Ok(l)
    }

    fn or(&mut self) -> Result<Formula, ParseError> {
        let mut l = self.and()?;
        while self.peek() == Some(&Tok::Or) {
            self.i += 1;
            let r = self.and()?;
            l = Formula::or(l, r);
        }
        Ok(l)
    }

    fn and(&mut self) -> Result<Formula, ParseError> {
        let mut l = self.unary()?;
        while self.peek() == Some(&Tok::And) {
            self.i += 1;
            let r = self.unary()?;
            l = Formula::and(l, r);
        }
        Ok(l)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        let pos = self.pos();
        match self.peek().cloned() {
            Some(Tok::Not) => {
                self.i += 1;
                Ok(Formula::not(self.unary()?))
            }
            Some(Tok::K(name)) => {
                let a = Agent::new(&name);
                if !self.agents.contains(&a) {
                    return Err(ParseError::UnknownAgent { pos, name });
                }
                self.i += 1;
                Ok(Formula::k(&a, self.unary()?))
            }
            Some(Tok::C) => {
                self.i += 1;
                Ok(Formula::c(self.unary()?))
            }
            Some(Tok::E) => {
                self.i += 1;
                Ok(Formula::e(self.agents, self.unary()?))
            }
            Some(Tok::Ident(p)) => {
                self.i += 1;
                Ok(Formula::atom(&p))
            }
            Some(Tok::False) => {
                self.i += 1;
                Ok(Formula::Bottom)
            }
            Some(Tok::True) => {
                self.i += 1;
                Ok(Formula::top())
            }
            Some(Tok::LParen) => {
                self.i += 1;
                let f = self.imp()?;
                if self.peek() != Some(&Tok::RParen) {
                    return self.error("expected ')'");
                }
                self.i += 1;
                Ok(f)
            }
            Some(_) => self.error("expected a formula"),
            None => self.error("unexpected end of input"),
        }
    }
}

/// Parses a formula over the given agent set, expanding `~`, `true` and `E`.
pub fn parse(text: &str, agents: &AgentSet) -> Result<Formula, ParseError> {
    let toks = lex(text)?;
    let mut p = Parser { toks, i: 0, end: text.len(), agents };
    let f = p.imp()?;
    if p.i != p.toks.len() {
        return p.error("trailing input");
    }
    Ok(f)
}
