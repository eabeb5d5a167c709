//! Text grammar for events and conditional events.
//!
//! `atoms` are identifiers, `!` negates, `&` conjoins, `|` disjoins, `TOP`
//! and `BOT` are the constants, and conditional events are bracketed
//! `[consequent : antecedent]` so `|` stays free for disjunction.

use alloc::format;
use alloc::string::{String, ToString};

use crate::event::{ConditionalEvent, Event, EventError};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    /// Byte offset into the parsed text.
    pub offset: usize,
    pub message: String,
}

impl core::fmt::Display for ParseError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "offset {}: {}", self.offset, self.message)
    }
}

impl core::error::Error for ParseError {}

struct Cursor<'a> {
    text: &'a str,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn new(text: &'a str) -> Cursor<'a> {
        Cursor { text, pos: 0 }
    }

    fn skip_ws(&mut self) {
        while let Some(b) = self.text.as_bytes().get(self.pos) {
            if b.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.text.as_bytes().get(self.pos).copied()
    }

    fn expect(&mut self, b: u8) -> Result<(), ParseError> {
        match self.peek() {
            Some(got) if got == b => {
                self.pos += 1;
                Ok(())
            }
            _ => Err(self.error(&format!("expected `{}`", b as char))),
        }
    }

    fn error(&self, message: &str) -> ParseError {
        ParseError {
            offset: self.pos,
            message: message.to_string(),
        }
    }

    fn ident(&mut self) -> Option<String> {
        self.skip_ws();
        let bytes = self.text.as_bytes();
        let start = self.pos;
        match bytes.get(self.pos) {
            Some(b) if b.is_ascii_alphabetic() || *b == b'_' => {}
            _ => return None,
        }
        let mut end = self.pos + 1;
        while let Some(b) = bytes.get(end) {
            if b.is_ascii_alphanumeric() || *b == b'_' {
                end += 1;
            } else {
                break;
            }
        }
        self.pos = end;
        Some(self.text[start..end].to_string())
    }

    fn event(&mut self) -> Result<Event, ParseError> {
        let mut left = self.conjunction()?;
        while self.peek() == Some(b'|') {
            self.pos += 1;
            let right = self.conjunction()?;
            left = left.or(right);
        }
        Ok(left)
    }

    fn conjunction(&mut self) -> Result<Event, ParseError> {
        let mut left = self.unary()?;
        while self.peek() == Some(b'&') {
            self.pos += 1;
            let right = self.unary()?;
            left = left.and(right);
        }
        Ok(left)
    }

    fn unary(&mut self) -> Result<Event, ParseError> {
        if self.peek() == Some(b'!') {
            self.pos += 1;
            return Ok(self.unary()?.not());
        }
        self.primary()
    }

    fn primary(&mut self) -> Result<Event, ParseError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let inner = self.event()?;
                self.expect(b')')?;
                Ok(inner)
            }
            Some(b) if b.is_ascii_alphabetic() || b == b'_' => {
                let name = self.ident().expect("peeked identifier start");
                match name.as_str() {
                    "TOP" => Ok(Event::Top),
                    "BOT" => Ok(Event::Bot),
                    _ => Ok(Event::Atom(name)),
                }
            }
            _ => Err(self.error("expected an event")),
        }
    }

    fn conditional(&mut self) -> Result<ConditionalEvent, ParseError> {
        let open = {
            self.skip_ws();
            self.pos
        };
        self.expect(b'[')?;
        let consequent = self.event()?;
        self.expect(b':')?;
        let antecedent = self.event()?;
        self.expect(b']')?;
        ConditionalEvent::new(consequent, antecedent).map_err(|e| match e {
            EventError::ContradictoryAntecedent => ParseError {
                offset: open,
                message: "conditioning event is a contradiction".to_string(),
            },
            other => ParseError {
                offset: open,
                message: other.to_string(),
            },
        })
    }

    fn finish(&mut self) -> Result<(), ParseError> {
        if self.peek().is_some() {
            Err(self.error("unexpected trailing input"))
        } else {
            Ok(())
        }
    }
}

/// Parses a full string as one event.
pub fn parse_event(text: &str) -> Result<Event, ParseError> {
    let mut c = Cursor::new(text);
    let e = c.event()?;
    c.finish()?;
    Ok(e)
}

/// Parses a full string as one bracketed conditional event.
pub fn parse_conditional(text: &str) -> Result<ConditionalEvent, ParseError> {
    let mut c = Cursor::new(text);
    let ce = c.conditional()?;
    c.finish()?;
    Ok(ce)
}
