//! Hand-rolled recursive descent parser for the formula language.
//!
//! Binding strength, tightest first: `!`, `&`, `^`, `|`, `->`, then `<->`
//! and `=` (both biconditional; `=` reads naturally in definitions such as
//! `E4 = (E2 -> E3)`). Implication associates to the right, the chain
//! connectives fold left, and parentheses override everything. Identifiers
//! are `E<number>` or any `[A-Za-z_][A-Za-z0-9_]*` word; `true` and `false`
//! are constants. Errors carry 1-based line and column.

use std::fmt;

use crate::formula::Formula;
use crate::registry::{Registry, UnknownVars};

/// Parse failure with its position in the source text.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}, column {col}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    True,
    False,
    LParen,
    RParen,
    Not,
    And,
    Xor,
    Or,
    Arrow,
    Iff,
    End,
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
    line: usize,
    col: usize,
    base_line: usize,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str, base_line: usize) -> Self {
        Lexer {
            src: src.as_bytes(),
            pos: 0,
            line: 1,
            col: 1,
            base_line,
        }
    }

    fn error(&self, message: impl Into<String>) -> ParseError {
        ParseError {
            line: self.base_line + self.line - 1,
            col: self.col,
            message: message.into(),
        }
    }

    fn bump(&mut self) -> Option<u8> {
        let b = *self.src.get(self.pos)?;
        self.pos += 1;
        if b == b'\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(b)
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn next_token(&mut self) -> Result<(Tok, usize, usize), ParseError> {
        loop {
            match self.peek() {
                Some(b) if b.is_ascii_whitespace() => {
                    self.bump();
                }
                Some(b'#') => {
                    while let Some(b) = self.peek() {
                        if b == b'\n' {
                            break;
                        }
                        self.bump();
                    }
                }
                _ => break,
            }
        }
        let (line, col) = (self.base_line + self.line - 1, self.col);
        let Some(b) = self.peek() else {
            return Ok((Tok::End, line, col));
        };
        let tok = match b {
            b'(' => {
                self.bump();
                Tok::LParen
            }
            b')' => {
                self.bump();
                Tok::RParen
            }
            b'!' | b'~' => {
                self.bump();
                Tok::Not
            }
            b'&' => {
                self.bump();
                Tok::And
            }
            b'^' => {
                self.bump();
                Tok::Xor
            }
            b'|' => {
                self.bump();
                Tok::Or
            }
            b'=' => {
                self.bump();
                Tok::Iff
            }
            b'-' => {
                self.bump();
                if self.peek() == Some(b'>') {
                    self.bump();
                    Tok::Arrow
                } else {
                    return Err(self.error("expected '>' after '-'"));
                }
            }
            b'<' => {
                self.bump();
                if self.peek() == Some(b'-') {
                    self.bump();
                    if self.peek() == Some(b'>') {
                        self.bump();
                        Tok::Iff
                    } else {
                        return Err(self.error("expected '>' after '<-'"));
                    }
                } else {
                    return Err(self.error("expected '-' after '<'"));
                }
            }
            b if b.is_ascii_alphabetic() || b == b'_' => {
                let start = self.pos;
                while let Some(c) = self.peek() {
                    if c.is_ascii_alphanumeric() || c == b'_' {
                        self.bump();
                    } else {
                        break;
                    }
                }
                let word = std::str::from_utf8(&self.src[start..self.pos])
                    .expect("ascii identifier");
                match word.to_ascii_lowercase().as_str() {
                    "true" => Tok::True,
                    "false" => Tok::False,
                    _ => Tok::Ident(word.to_string()),
                }
            }
            other => {
                return Err(self.error(format!("unexpected character {:?}", other as char)));
            }
        };
        Ok((tok, line, col))
    }
}

struct Parser<'a> {
    lexer: Lexer<'a>,
    current: (Tok, usize, usize),
    registry: &'a mut Registry,
    policy: UnknownVars,
}

impl<'a> Parser<'a> {
    fn new(
        text: &'a str,
        base_line: usize,
        registry: &'a mut Registry,
        policy: UnknownVars,
    ) -> Result<Self, ParseError> {
        let mut lexer = Lexer::new(text, base_line);
        let current = lexer.next_token()?;
        Ok(Parser {
            lexer,
            current,
            registry,
            policy,
        })
    }

    fn error_at(&self, message: impl Into<String>) -> ParseError {
        ParseError {
            line: self.current.1,
            col: self.current.2,
            message: message.into(),
        }
    }

    fn advance(&mut self) -> Result<Tok, ParseError> {
        let next = self.lexer.next_token()?;
        Ok(std::mem::replace(&mut self.current, next).0)
    }

    fn eat(&mut self, tok: &Tok, what: &str) -> Result<(), ParseError> {
        if &self.current.0 == tok {
            self.advance()?;
            Ok(())
        } else {
            Err(self.error_at(format!("expected {what}, found {}", describe(&self.current.0))))
        }
    }

    // iff := imp (('<->' | '=') imp)*
    fn parse_iff(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.parse_implies()?;
        while self.current.0 == Tok::Iff {
            self.advance()?;
            let rhs = self.parse_implies()?;
            lhs = Formula::iff(lhs, rhs);
        }
        Ok(lhs)
    }

    // imp := or ('->' imp)?   (right associative)
    fn parse_implies(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.parse_or()?;
        if self.current.0 == Tok::Arrow {
            self.advance()?;
            let rhs = self.parse_implies()?;
            Ok(Formula::implies(lhs, rhs))
        } else {
            Ok(lhs)
        }
    }

    fn parse_or(&mut self) -> Result<Formula, ParseError> {
        let first = self.parse_xor()?;
        if self.current.0 != Tok::Or {
            return Ok(first);
        }
        let mut parts = vec![first];
        while self.current.0 == Tok::Or {
            self.advance()?;
            parts.push(self.parse_xor()?);
        }
        Ok(Formula::or(parts))
    }

    fn parse_xor(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.parse_and()?;
        while self.current.0 == Tok::Xor {
            self.advance()?;
            let rhs = self.parse_and()?;
            lhs = Formula::xor(lhs, rhs);
        }
        Ok(lhs)
    }

    fn parse_and(&mut self) -> Result<Formula, ParseError> {
        let first = self.parse_unary()?;
        if self.current.0 != Tok::And {
            return Ok(first);
        }
        let mut parts = vec![first];
        while self.current.0 == Tok::And {
            self.advance()?;
            parts.push(self.parse_unary()?);
        }
        Ok(Formula::and(parts))
    }

    fn parse_unary(&mut self) -> Result<Formula, ParseError> {
        if self.current.0 == Tok::Not {
            self.advance()?;
            Ok(Formula::not(self.parse_unary()?))
        } else {
            self.parse_atom()
        }
    }

    fn parse_atom(&mut self) -> Result<Formula, ParseError> {
        match self.current.0.clone() {
            Tok::True => {
                self.advance()?;
                Ok(Formula::True)
            }
            Tok::False => {
                self.advance()?;
                Ok(Formula::False)
            }
            Tok::LParen => {
                self.advance()?;
                let inner = self.parse_iff()?;
                self.eat(&Tok::RParen, "')'")?;
                Ok(inner)
            }
            Tok::Ident(name) => {
                let pos = (self.current.1, self.current.2);
                self.advance()?;
                let id = match self.registry.lookup(&name) {
                    Some(id) => id,
                    None => match self.policy {
                        UnknownVars::AutoRegister => {
                            self.registry.register(&name).map_err(|e| ParseError {
                                line: pos.0,
                                col: pos.1,
                                message: e.to_string(),
                            })?
                        }
                        UnknownVars::Reject => {
                            return Err(ParseError {
                                line: pos.0,
                                col: pos.1,
                                message: format!("unknown variable {name:?}"),
                            });
                        }
                    },
                };
                Ok(Formula::var(id))
            }
            other => Err(self.error_at(format!(
                "expected a variable, constant, '!' or '(', found {}",
                describe(&other)
            ))),
        }
    }
}

fn describe(tok: &Tok) -> String {
    match tok {
        Tok::Ident(name) => format!("identifier {name:?}"),
        Tok::True => "'true'".into(),
        Tok::False => "'false'".into(),
        Tok::LParen => "'('".into(),
        Tok::RParen => "')'".into(),
        Tok::Not => "'!'".into(),
        Tok::And => "'&'".into(),
        Tok::Xor => "'^'".into(),
        Tok::Or => "'|'".into(),
        Tok::Arrow => "'->'".into(),
        Tok::Iff => "'<->'".into(),
        Tok::End => "end of input".into(),
    }
}

impl fmt::Debug for Lexer<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Lexer at {}:{}", self.line, self.col)
    }
}

/// Parses a single formula; trailing input is an error.
pub fn parse_formula(
    text: &str,
    registry: &mut Registry,
    policy: UnknownVars,
) -> Result<Formula, ParseError> {
    parse_formula_at(text, 1, registry, policy)
}

fn parse_formula_at(
    text: &str,
    base_line: usize,
    registry: &mut Registry,
    policy: UnknownVars,
) -> Result<Formula, ParseError> {
    let mut parser = Parser::new(text, base_line, registry, policy)?;
    let formula = parser.parse_iff()?;
    if parser.current.0 != Tok::End {
        return Err(parser.error_at(format!(
            "unexpected {} after the formula",
            describe(&parser.current.0)
        )));
    }
    Ok(formula)
}

/// Parses a statement list: one formula per line or `;`-separated, with
/// blank lines and `#` comments skipped.
pub fn parse_program(
    text: &str,
    registry: &mut Registry,
    policy: UnknownVars,
) -> Result<Vec<Formula>, ParseError> {
    let mut out = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = match raw.split_once('#') {
            Some((before, _)) => before,
            None => raw,
        };
        for piece in line.split(';') {
            if piece.trim().is_empty() {
                continue;
            }
            out.push(parse_formula_at(piece, lineno + 1, registry, policy)?);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::var::VarId;

    fn v(n: u32) -> VarId {
        VarId::new(n).unwrap()
    }

    fn parse(text: &str) -> Formula {
        let mut reg = Registry::new();
        parse_formula(text, &mut reg, UnknownVars::AutoRegister).unwrap()
    }

    #[test]
    fn precedence_ladder() {
        // ! binds over &, & over ^, ^ over |, | over ->, -> over <->.
        let f = parse("!E1 & E2 ^ E3 | E4 -> E5 <-> E6");
        let want = Formula::iff(
            Formula::implies(
                Formula::or(vec![
                    Formula::xor(
                        Formula::and(vec![
                            Formula::not(Formula::var(v(1))),
                            Formula::var(v(2)),
                        ]),
                        Formula::var(v(3)),
                    ),
                    Formula::var(v(4)),
                ]),
                Formula::var(v(5)),
            ),
            Formula::var(v(6)),
        );
        assert_eq!(f, want);
    }

    #[test]
    fn implication_is_right_associative() {
        assert_eq!(
            parse("E1 -> E2 -> E3"),
            Formula::implies(
                Formula::var(v(1)),
                Formula::implies(Formula::var(v(2)), Formula::var(v(3)))
            )
        );
    }

    #[test]
    fn equals_is_biconditional() {
        assert_eq!(
            parse("E4 = (E2 -> E3)"),
            Formula::iff(
                Formula::var(v(4)),
                Formula::implies(Formula::var(v(2)), Formula::var(v(3)))
            )
        );
    }

    #[test]
    fn named_variables_auto_register_in_order() {
        let mut reg = Registry::new();
        let f = parse_formula("rain -> wet", &mut reg, UnknownVars::AutoRegister).unwrap();
        assert_eq!(
            f,
            Formula::implies(Formula::var(v(1)), Formula::var(v(2)))
        );
        assert_eq!(reg.lookup("wet"), Some(v(2)));
    }

    #[test]
    fn reject_policy_reports_position() {
        let mut reg = Registry::new();
        reg.register("E1").unwrap();
        let err = parse_formula("E1 & mystery", &mut reg, UnknownVars::Reject).unwrap_err();
        assert_eq!((err.line, err.col), (1, 6));
        assert!(err.message.contains("mystery"));
    }

    #[test]
    fn syntax_errors_carry_positions() {
        let mut reg = Registry::new();
        let err = parse_formula("E1 & (E2 | ", &mut reg, UnknownVars::AutoRegister).unwrap_err();
        assert_eq!(err.line, 1);
        assert_eq!(err.col, 12);
        let err = parse_formula("E1 - E2", &mut reg, UnknownVars::AutoRegister).unwrap_err();
        assert!(err.message.contains("expected '>'"));
    }

    #[test]
    fn program_splits_statements_and_reports_lines() {
        let mut reg = Registry::new();
        let fs = parse_program(
            "# premises\nE1 -> E2; E2 -> E3\n\nE3\n",
            &mut reg,
            UnknownVars::AutoRegister,
        )
        .unwrap();
        assert_eq!(fs.len(), 3);
        let err = parse_program("E1\nE2 &\n", &mut reg, UnknownVars::AutoRegister).unwrap_err();
        assert_eq!(err.line, 2);
    }
}
