//! Surface syntax for set terms: brace literals, von Neumann numeral
//! sugar, stage sugar `V<n>`, Kuratowski pair sugar `(a,b)`, and idents
//! resolving through session bindings. Errors carry byte offsets.

use std::collections::BTreeMap;

use crate::budget::Budget;
use crate::encode::kpair;
use crate::error::Error;
use crate::set::{canon, v_stage, SetTerm};

pub type Bindings = BTreeMap<String, SetTerm>;

/// A scanning position over a source string. Parsing consumes terms one at
/// a time, which lets line-oriented file formats interleave terms with
/// their own keywords.
pub struct Cursor<'a> {
    src: &'a str,
    pos: usize,
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_ident_continue(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

impl<'a> Cursor<'a> {
    pub fn new(src: &'a str) -> Self {
        Cursor { src, pos: 0 }
    }

    pub fn pos(&self) -> usize {
        self.pos
    }

    /// Returns to an earlier position from `pos()`, for one-token lookahead.
    pub fn rewind(&mut self, pos: usize) {
        debug_assert!(pos <= self.src.len());
        self.pos = pos;
    }

    pub fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    pub fn skip_ws(&mut self) {
        let rest = self.rest();
        let trimmed = rest.trim_start();
        self.pos += rest.len() - trimmed.len();
    }

    pub fn at_end(&mut self) -> bool {
        self.skip_ws();
        self.pos == self.src.len()
    }

    fn peek(&self) -> Option<char> {
        self.rest().chars().next()
    }

    fn err(&self, msg: impl Into<String>) -> Error {
        Error::Parse { at: self.pos, msg: msg.into() }
    }

    /// Consumes `c` or fails naming it.
    pub fn expect(&mut self, c: char) -> Result<(), Error> {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            Ok(())
        } else {
            Err(self.err(format!("expected '{}'", c)))
        }
    }

    /// True and consumed if the next non-space char is `c`.
    pub fn eat(&mut self, c: char) -> bool {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn lex_digits(&mut self) -> &'a str {
        let rest = self.rest();
        let end = rest.find(|c: char| !c.is_ascii_digit()).unwrap_or(rest.len());
        self.pos += end;
        &rest[..end]
    }

    /// Next ident-shaped token, if any.
    pub fn lex_ident(&mut self) -> Option<&'a str> {
        self.skip_ws();
        let rest = self.rest();
        let mut chars = rest.chars();
        if !chars.next().map(is_ident_start).unwrap_or(false) {
            return None;
        }
        let end = rest.find(|c: char| !is_ident_continue(c)).unwrap_or(rest.len());
        self.pos += end;
        Some(&rest[..end])
    }

    /// Next run of non-whitespace, for file paths and similar raw tokens.
    pub fn lex_word(&mut self) -> Option<&'a str> {
        self.skip_ws();
        let rest = self.rest();
        if rest.is_empty() {
            return None;
        }
        let end = rest.find(char::is_whitespace).unwrap_or(rest.len());
        self.pos += end;
        Some(&rest[..end])
    }

    pub fn parse_term(&mut self, bindings: &Bindings, budget: &Budget) -> Result<SetTerm, Error> {
        self.skip_ws();
        let start = self.pos;
        match self.peek() {
            Some('{') => {
                self.pos += 1;
                let mut children = Vec::new();
                if !self.eat('}') {
                    loop {
                        children.push(self.parse_term(bindings, budget)?);
                        if self.eat('}') {
                            break;
                        }
                        self.expect(',')?;
                    }
                }
                if children.len() > budget.max_children {
                    return Err(Error::Budget {
                        what: "set literal children".to_string(),
                        limit: budget.max_children as u64,
                        actual: Some(children.len() as u64),
                    });
                }
                Ok(canon(children))
            }
            Some('(') => {
                self.pos += 1;
                let a = self.parse_term(bindings, budget)?;
                self.expect(',')?;
                let b = self.parse_term(bindings, budget)?;
                self.expect(')')?;
                Ok(kpair(a, b))
            }
            Some(c) if c.is_ascii_digit() => {
                let digits = self.lex_digits();
                let n: usize = digits.parse().map_err(|_| Error::Parse {
                    at: start,
                    msg: "numeral out of range".to_string(),
                })?;
                if n > budget.max_children {
                    return Err(Error::Budget {
                        what: "numeral".to_string(),
                        limit: budget.max_children as u64,
                        actual: Some(n as u64),
                    });
                }
                Ok(SetTerm::numeral(n))
            }
            Some(c) if is_ident_start(c) => {
                let ident = self.lex_ident().expect("peeked ident start");
                if let Some(stage) = ident.strip_prefix('V') {
                    if !stage.is_empty() && stage.bytes().all(|b| b.is_ascii_digit()) {
                        let n: u32 = stage.parse().map_err(|_| Error::Parse {
                            at: start,
                            msg: "stage index out of range".to_string(),
                        })?;
                        return v_stage(n, budget);
                    }
                }
                match bindings.get(ident) {
                    Some(&t) => Ok(t),
                    None => Err(Error::UnknownBinding(ident.to_string())),
                }
            }
            Some(c) => Err(self.err(format!("unexpected character '{}'", c))),
            None => Err(self.err("unexpected end of input")),
        }
    }
}

/// Parses a complete string as one term; trailing input is an error.
pub fn parse_term_str(s: &str, bindings: &Bindings, budget: &Budget) -> Result<SetTerm, Error> {
    let mut cur = Cursor::new(s);
    let t = cur.parse_term(bindings, budget)?;
    if !cur.at_end() {
        return Err(Error::Parse { at: cur.pos(), msg: "trailing input after term".to_string() });
    }
    Ok(t)
}
