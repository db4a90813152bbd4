//! Concrete syntax:
//!
//! ```text
//! or     := and ('|' and)*
//! and    := until ('&' until)*
//! until  := unary ('U' until)?          right-associative
//! unary  := '!' unary | 'F' unary | atom | 'true' | '(' or ')'
//! atom   := [a-z][a-z0-9_]*
//! ```
//!
//! `!` may only be applied to an atom.

use super::{Formula, FormulaError, ObservationSet};

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Ident(String),
    True,
    Not,
    And,
    Or,
    Until,
    Eventually,
    LParen,
    RParen,
}

fn tokenize(text: &str) -> Result<Vec<(usize, Token)>, FormulaError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        let tok = match c {
            ' ' | '\t' | '\n' | '\r' => {
                i += 1;
                continue;
            }
            '!' => Token::Not,
            '&' => Token::And,
            '|' => Token::Or,
            '(' => Token::LParen,
            ')' => Token::RParen,
            'U' => Token::Until,
            'F' => Token::Eventually,
            'X' | 'G' | 'R' | 'W' => {
                return Err(FormulaError::Unsupported { op: c.to_string(), pos: i });
            }
            'a'..='z' => {
                let start = i;
                while i < bytes.len() && matches!(bytes[i], b'a'..=b'z' | b'0'..=b'9' | b'_') {
                    i += 1;
                }
                let word = &text[start..i];
                let tok = if word == "true" { Token::True } else { Token::Ident(word.to_owned()) };
                out.push((start, tok));
                continue;
            }
            _ => {
                let ch = text[i..].chars().next().unwrap_or(c);
                return Err(FormulaError::Syntax { pos: i, msg: format!("unexpected character `{ch}`") });
            }
        };
        out.push((i, tok));
        i += 1;
    }
    Ok(out)
}

struct Parser<'a> {
    tokens: Vec<(usize, Token)>,
    next: usize,
    end: usize,
    alphabet: &'a ObservationSet,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.next).map(|(_, t)| t)
    }

    fn pos(&self) -> usize {
        self.tokens.get(self.next).map_or(self.end, |(p, _)| *p)
    }

    fn eat(&mut self, tok: &Token) -> bool {
        if self.peek() == Some(tok) {
            self.next += 1;
            true
        } else {
            false
        }
    }

    fn or(&mut self) -> Result<Formula, FormulaError> {
        let mut lhs = self.and()?;
        while self.eat(&Token::Or) {
            let rhs = self.and()?;
            lhs = Formula::or(lhs, rhs);
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<Formula, FormulaError> {
        let mut lhs = self.until()?;
        while self.eat(&Token::And) {
            let rhs = self.until()?;
            lhs = Formula::and(lhs, rhs);
        }
        Ok(lhs)
    }

    fn until(&mut self) -> Result<Formula, FormulaError> {
        let lhs = self.unary()?;
        if self.eat(&Token::Until) {
            let rhs = self.until()?;
            return Ok(Formula::until(lhs, rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Formula, FormulaError> {
        let pos = self.pos();
        let Some((_, tok)) = self.tokens.get(self.next).cloned() else {
            return Err(FormulaError::Syntax { pos, msg: "unexpected end of input".into() });
        };
        self.next += 1;
        match tok {
            Token::Not => match self.unary()? {
                Formula::Obs(a) => Ok(Formula::NegObs(a)),
                _ => Err(FormulaError::NegationOfNonAtom { pos }),
            },
            Token::Eventually => Ok(Formula::eventually(self.unary()?)),
            Token::True => Ok(Formula::True),
            Token::Ident(name) => match self.alphabet.atom(&name) {
                Some(a) => Ok(Formula::Obs(a)),
                None => Err(FormulaError::UnknownAtom { name, pos }),
            },
            Token::LParen => {
                let inner = self.or()?;
                if !self.eat(&Token::RParen) {
                    return Err(FormulaError::Syntax { pos: self.pos(), msg: "expected `)`".into() });
                }
                Ok(inner)
            }
            other => Err(FormulaError::Syntax { pos, msg: format!("unexpected {}", describe(&other)) }),
        }
    }
}

fn describe(tok: &Token) -> &'static str {
    match tok {
        Token::Ident(_) => "atom",
        Token::True => "`true`",
        Token::Not => "`!`",
        Token::And => "`&`",
        Token::Or => "`|`",
        Token::Until => "`U`",
        Token::Eventually => "`F`",
        Token::LParen => "`(`",
        Token::RParen => "`)`",
    }
}

/// Parses `text` into a formula over `alphabet`. Positions in errors are byte offsets.
pub fn parse_formula(text: &str, alphabet: &ObservationSet) -> Result<Formula, FormulaError> {
    let tokens = tokenize(text)?;
    let mut p = Parser { tokens, next: 0, end: text.len(), alphabet };
    let f = p.or()?;
    if p.next < p.tokens.len() {
        let pos = p.pos();
        let tok = p.tokens[p.next].1.clone();
        return Err(FormulaError::Syntax { pos, msg: format!("unexpected {}", describe(&tok)) });
    }
    Ok(f)
}
