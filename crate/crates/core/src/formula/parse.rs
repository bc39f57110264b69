//! Reader for the s-expression surface syntax:
//!
//! ```text
//! Formula := Lit | "T" | "F" | "(or" Formula* ")" | "(and" Formula* ")" | "(not" Formula ")"
//! Lit     := Ident | "~" Ident
//! ```
//!
//! A `;` starts a comment that runs to the end of the line.

use super::{is_identifier, FormulaStore, Literal, NodeId};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{line}:{column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok<'a> {
    Open,
    Close,
    Tilde,
    Word(&'a str),
}

struct Lexer<'a> {
    text: &'a str,
    pos: usize,
    line: usize,
    col: usize,
}

impl<'a> Lexer<'a> {
    fn new(text: &'a str) -> Self {
        Lexer {
            text,
            pos: 0,
            line: 1,
            col: 1,
        }
    }

    fn bump(&mut self, c: char) {
        self.pos += c.len_utf8();
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
    }

    /// Next token with its starting line and column.
    fn next(&mut self) -> Result<Option<(Tok<'a>, usize, usize)>, ParseError> {
        let mut comment = false;
        while let Some(c) = self.text[self.pos..].chars().next() {
            if c == ';' {
                comment = true;
            } else if c == '\n' {
                comment = false;
            } else if !comment && !c.is_whitespace() {
                break;
            }
            self.bump(c);
        }
        let (line, col) = (self.line, self.col);
        let Some(c) = self.text[self.pos..].chars().next() else {
            return Ok(None);
        };
        let tok = match c {
            '(' => {
                self.bump(c);
                Tok::Open
            }
            ')' => {
                self.bump(c);
                Tok::Close
            }
            '~' => {
                self.bump(c);
                Tok::Tilde
            }
            c if c.is_ascii_alphanumeric() || c == '_' => {
                let start = self.pos;
                while let Some(c) = self.text[self.pos..].chars().next() {
                    if c.is_ascii_alphanumeric() || c == '_' {
                        self.bump(c);
                    } else {
                        break;
                    }
                }
                Tok::Word(&self.text[start..self.pos])
            }
            other => {
                return Err(ParseError {
                    line,
                    column: col,
                    message: format!("unexpected character {other:?}"),
                })
            }
        };
        Ok(Some((tok, line, col)))
    }
}

#[derive(Clone, Copy, PartialEq)]
enum Kind {
    Or,
    And,
    Not,
}

struct Frame {
    kind: Kind,
    children: Vec<NodeId>,
    line: usize,
    col: usize,
}

fn err(line: usize, column: usize, message: impl Into<String>) -> ParseError {
    ParseError {
        line,
        column,
        message: message.into(),
    }
}

impl FormulaStore {
    /// Parses exactly one formula.
    pub fn parse(&mut self, text: &str) -> Result<NodeId, ParseError> {
        let mut lexer = Lexer::new(text);
        let Some(id) = self.parse_one(&mut lexer)? else {
            return Err(err(lexer.line, lexer.col, "empty input"));
        };
        if let Some((_, line, col)) = lexer.next()? {
            return Err(err(line, col, "trailing input after formula"));
        }
        Ok(id)
    }

    /// Parses a whitespace-separated sequence of formulas (batch files).
    pub fn parse_all(&mut self, text: &str) -> Result<Vec<NodeId>, ParseError> {
        let mut lexer = Lexer::new(text);
        let mut out = Vec::new();
        while let Some(id) = self.parse_one(&mut lexer)? {
            out.push(id);
        }
        Ok(out)
    }

    fn parse_one(&mut self, lexer: &mut Lexer<'_>) -> Result<Option<NodeId>, ParseError> {
        let mut stack: Vec<Frame> = Vec::new();
        loop {
            let Some((tok, line, col)) = lexer.next()? else {
                return match stack.last() {
                    None => Ok(None),
                    Some(f) => Err(err(f.line, f.col, "unclosed parenthesis")),
                };
            };
            let done = match tok {
                Tok::Open => {
                    let kind = match lexer.next()? {
                        Some((Tok::Word("or"), ..)) => Kind::Or,
                        Some((Tok::Word("and"), ..)) => Kind::And,
                        Some((Tok::Word("not"), ..)) => Kind::Not,
                        Some((_, l, c)) => return Err(err(l, c, "expected 'or', 'and' or 'not'")),
                        None => return Err(err(line, col, "unclosed parenthesis")),
                    };
                    stack.push(Frame {
                        kind,
                        children: Vec::new(),
                        line,
                        col,
                    });
                    None
                }
                Tok::Close => {
                    let Some(frame) = stack.pop() else {
                        return Err(err(line, col, "unbalanced ')'"));
                    };
                    Some(match frame.kind {
                        Kind::Or => self.disj(frame.children),
                        Kind::And => self.conj(frame.children),
                        Kind::Not => {
                            if frame.children.len() != 1 {
                                return Err(err(
                                    frame.line,
                                    frame.col,
                                    format!(
                                        "'not' takes one formula, got {}",
                                        frame.children.len()
                                    ),
                                ));
                            }
                            self.not(frame.children[0])
                        }
                    })
                }
                Tok::Tilde => match lexer.next()? {
                    Some((Tok::Word(w), l, c)) => Some(self.literal_word(w, false, l, c)?),
                    Some((_, l, c)) => return Err(err(l, c, "expected identifier after '~'")),
                    None => return Err(err(line, col, "expected identifier after '~'")),
                },
                Tok::Word("T") => Some(self.tt()),
                Tok::Word("F") => Some(self.ff()),
                Tok::Word(w) => Some(self.literal_word(w, true, line, col)?),
            };
            if let Some(id) = done {
                match stack.last_mut() {
                    None => return Ok(Some(id)),
                    Some(parent) => {
                        if parent.kind == Kind::Not && !parent.children.is_empty() {
                            return Err(err(parent.line, parent.col, "'not' takes one formula"));
                        }
                        parent.children.push(id);
                    }
                }
            }
        }
    }

    fn literal_word(
        &mut self,
        word: &str,
        positive: bool,
        line: usize,
        col: usize,
    ) -> Result<NodeId, ParseError> {
        if !is_identifier(word) {
            return Err(err(line, col, format!("invalid identifier {word:?}")));
        }
        let v = self.var(word);
        Ok(self.lit(Literal::new(v, positive)))
    }
}
