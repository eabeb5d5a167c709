//! Program files: knowledge-base statements plus queries, one item per
//! line. Parse errors carry 1-based line and column positions.

use std::fmt;

use coherence_core::parse::{parse_conditional, parse_event};
use coherence_core::{
    format_rational, in_unit, parse_rational, ConditionalEvent, Event, Interval, Statement,
    StatementKind,
};

/// A parsed program: the statements build one knowledge base shared by
/// every query. Statements may be absent when only `bounds` queries are
/// asked; a program without queries is rejected.
#[derive(Clone, Debug, PartialEq)]
pub struct Program {
    pub statements: Vec<Statement>,
    pub queries: Vec<Query>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Query {
    /// `query: pconsistent`
    PConsistent,
    /// `query: entails H ~> E` (or `~/>` for a negated default).
    Entails(Statement),
    /// `query: notentails H ~> E`; succeeds when the entailment is refuted.
    NotEntails(Statement),
    /// `query: bounds [E : H] from [E1 : H1]=v1, ...`; values are rationals
    /// or closed intervals `[lo,hi]`.
    Bounds {
        target: ConditionalEvent,
        premises: Vec<(ConditionalEvent, Interval)>,
    },
    /// `query: extension [E : H]` over the knowledge base's assessment.
    Extension { target: ConditionalEvent },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProgramError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for ProgramError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}: {}", self.line, self.column, self.message)
    }
}

impl std::error::Error for ProgramError {}

/// Line being parsed. Fragments handed to `err` must be subslices of
/// `text` so the column can be recovered from pointer offsets.
struct LineCtx<'a> {
    number: usize,
    text: &'a str,
}

impl LineCtx<'_> {
    fn err(&self, fragment: &str, offset: usize, message: impl Into<String>) -> ProgramError {
        let base = fragment.as_ptr() as usize - self.text.as_ptr() as usize;
        ProgramError {
            line: self.number,
            column: base + offset + 1,
            message: message.into(),
        }
    }
}

pub fn parse_program(text: &str) -> Result<Program, ProgramError> {
    let mut statements = Vec::new();
    let mut queries = Vec::new();
    let mut last_line = 1;
    for (idx, raw) in text.lines().enumerate() {
        let ctx = LineCtx { number: idx + 1, text: raw };
        last_line = ctx.number;
        let inline = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        };
        let line = inline.trim();
        if line.is_empty() {
            continue;
        }
        let Some(colon) = line.find(':') else {
            return Err(ctx.err(line, 0, "expected `default:`, `negdefault:`, or `query:`"));
        };
        let keyword = line[..colon].trim();
        let body = line[colon + 1..].trim();
        match keyword {
            "default" => statements.push(parse_statement_body(&ctx, body, StatementKind::Default)?),
            "negdefault" => {
                statements.push(parse_statement_body(&ctx, body, StatementKind::NegatedDefault)?)
            }
            "query" => queries.push(parse_query(&ctx, body)?),
            other => {
                return Err(ctx.err(keyword, 0, format!("unknown keyword `{other}`")));
            }
        }
    }
    if queries.is_empty() {
        return Err(ProgramError {
            line: last_line,
            column: 1,
            message: "program contains no queries".to_string(),
        });
    }
    Ok(Program { statements, queries })
}

/// Splits `body` at its conclusion arrow. `~/>` is checked first since
/// `~>` is a proper infix of neither.
fn split_arrow<'a>(ctx: &LineCtx, body: &'a str) -> Result<(&'a str, bool, &'a str), ProgramError> {
    if let Some(pos) = body.find("~/>") {
        Ok((body[..pos].trim(), true, body[pos + 3..].trim()))
    } else if let Some(pos) = body.find("~>") {
        Ok((body[..pos].trim(), false, body[pos + 2..].trim()))
    } else {
        Err(ctx.err(body, 0, "expected `~>` or `~/>` between antecedent and consequent"))
    }
}

fn parse_event_fragment(ctx: &LineCtx, fragment: &str) -> Result<Event, ProgramError> {
    parse_event(fragment).map_err(|e| ctx.err(fragment, e.offset, e.message))
}

/// Statement lines spell negation with the `negdefault` keyword, so the
/// arrow must be plain.
fn parse_statement_body(
    ctx: &LineCtx,
    body: &str,
    kind: StatementKind,
) -> Result<Statement, ProgramError> {
    let (ante_text, arrow_negates, cons_text) = split_arrow(ctx, body)?;
    if arrow_negates {
        return Err(ctx.err(body, 0, "statements negate with the `negdefault` keyword, not `~/>`"));
    }
    build_statement(ctx, kind, ante_text, cons_text)
}

/// Query conclusions spell negation with the arrow: `~>` asks about a
/// default, `~/>` about a negated default.
fn parse_query_conclusion(ctx: &LineCtx, body: &str) -> Result<Statement, ProgramError> {
    let (ante_text, arrow_negates, cons_text) = split_arrow(ctx, body)?;
    let kind = if arrow_negates {
        StatementKind::NegatedDefault
    } else {
        StatementKind::Default
    };
    build_statement(ctx, kind, ante_text, cons_text)
}

fn build_statement(
    ctx: &LineCtx,
    kind: StatementKind,
    ante_text: &str,
    cons_text: &str,
) -> Result<Statement, ProgramError> {
    let antecedent = parse_event_fragment(ctx, ante_text)?;
    let consequent = parse_event_fragment(ctx, cons_text)?;
    Statement::new(kind, antecedent, consequent)
        .map_err(|e| ctx.err(ante_text, 0, e.to_string()))
}

fn parse_query(ctx: &LineCtx, body: &str) -> Result<Query, ProgramError> {
    let (head, rest) = match body.find(char::is_whitespace) {
        Some(pos) => (&body[..pos], body[pos..].trim()),
        None => (body, ""),
    };
    match head {
        "pconsistent" => {
            if !rest.is_empty() {
                return Err(ctx.err(rest, 0, "`pconsistent` takes no arguments"));
            }
            Ok(Query::PConsistent)
        }
        "entails" => Ok(Query::Entails(parse_query_conclusion(ctx, rest)?)),
        "notentails" => Ok(Query::NotEntails(parse_query_conclusion(ctx, rest)?)),
        "bounds" => parse_bounds(ctx, rest),
        "extension" => {
            let (target, after) = parse_bracketed(ctx, rest)?;
            if !after.trim().is_empty() {
                return Err(ctx.err(after, 0, "unexpected text after the conditional"));
            }
            Ok(Query::Extension { target })
        }
        other => Err(ctx.err(head, 0, format!("unknown query `{other}`"))),
    }
}

/// Parses a leading `[E : H]` and returns the rest of the fragment.
/// Brackets never nest (events use parentheses), so the first `]` closes.
fn parse_bracketed<'a>(
    ctx: &LineCtx,
    s: &'a str,
) -> Result<(ConditionalEvent, &'a str), ProgramError> {
    let s = s.trim_start();
    if !s.starts_with('[') {
        return Err(ctx.err(s, 0, "expected a conditional `[E : H]`"));
    }
    let Some(close) = s.find(']') else {
        return Err(ctx.err(s, 0, "unclosed `[`"));
    };
    let ce = parse_conditional(&s[..close + 1]).map_err(|e| ctx.err(s, e.offset, e.message))?;
    Ok((ce, &s[close + 1..]))
}

fn parse_bounds(ctx: &LineCtx, rest: &str) -> Result<Query, ProgramError> {
    let (target, after) = parse_bracketed(ctx, rest)?;
    let after = after.trim_start();
    let Some(list) = after.strip_prefix("from") else {
        return Err(ctx.err(after, 0, "expected `from` after the target conditional"));
    };
    let mut premises = Vec::new();
    for part in split_top_level_commas(list) {
        let part = part.trim();
        if part.is_empty() {
            return Err(ctx.err(list, 0, "empty premise in the `from` list"));
        }
        let (ce, tail) = parse_bracketed(ctx, part)?;
        let tail = tail.trim_start();
        let Some(value_text) = tail.strip_prefix('=') else {
            return Err(ctx.err(tail, 0, "expected `=` after the premise conditional"));
        };
        let value = parse_value(ctx, value_text.trim())?;
        premises.push((ce, value));
    }
    if premises.is_empty() {
        return Err(ctx.err(list, 0, "`from` list is empty"));
    }
    Ok(Query::Bounds { target, premises })
}

/// Splits on commas outside brackets; interval values `[lo,hi]` keep
/// their inner comma.
fn split_top_level_commas(s: &str) -> Vec<&str> {
    let mut parts = Vec::new();
    let mut depth = 0usize;
    let mut start = 0;
    for (i, b) in s.bytes().enumerate() {
        match b {
            b'[' => depth += 1,
            b']' => depth = depth.saturating_sub(1),
            b',' if depth == 0 => {
                parts.push(&s[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    let last = s[start..].trim();
    if !(last.is_empty() && parts.is_empty()) {
        parts.push(&s[start..]);
    }
    parts
}

/// A premise value: a single rational in [0,1] or a closed interval
/// `[lo,hi]`.
fn parse_value(ctx: &LineCtx, text: &str) -> Result<Interval, ProgramError> {
    if let Some(stripped) = text.strip_prefix('[') {
        let Some(inner) = stripped.strip_suffix(']') else {
            return Err(ctx.err(text, 0, "unclosed interval value"));
        };
        let Some(comma) = inner.find(',') else {
            return Err(ctx.err(inner, 0, "interval value needs `lo,hi`"));
        };
        let lo = parse_rational_fragment(ctx, inner[..comma].trim())?;
        let hi = parse_rational_fragment(ctx, inner[comma + 1..].trim())?;
        if !in_unit(&lo) || !in_unit(&hi) {
            return Err(ctx.err(inner, 0, "interval endpoints must lie in [0,1]"));
        }
        Interval::closed(lo, hi).map_err(|e| ctx.err(inner, 0, e.to_string()))
    } else {
        let v = parse_rational_fragment(ctx, text)?;
        if !in_unit(&v) {
            return Err(ctx.err(text, 0, "value must lie in [0,1]"));
        }
        Ok(Interval::point(v))
    }
}

fn parse_rational_fragment(
    ctx: &LineCtx,
    text: &str,
) -> Result<coherence_core::Rational, ProgramError> {
    parse_rational(text).map_err(|e| ctx.err(text, 0, e.to_string()))
}

/// Surface form of a statement used as a query conclusion: the arrow
/// encodes negation, the consequent is printed as written.
fn conclusion_surface(s: &Statement) -> String {
    let (arrow, negate) = match s.kind() {
        StatementKind::Default => ("~>", false),
        StatementKind::NegConsequentDefault => ("~>", true),
        StatementKind::NegatedDefault => ("~/>", false),
        StatementKind::NegatedNegDefault => ("~/>", true),
    };
    let consequent = if negate {
        s.consequent().clone().negated()
    } else {
        s.consequent().clone()
    };
    format!("{} {} {}", s.antecedent(), arrow, consequent)
}

fn value_surface(iv: &Interval) -> String {
    if iv.is_point() {
        format_rational(iv.lo())
    } else {
        format!("[{},{}]", format_rational(iv.lo()), format_rational(iv.hi()))
    }
}

impl fmt::Display for Query {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Query::PConsistent => write!(f, "query: pconsistent"),
            Query::Entails(s) => write!(f, "query: entails {}", conclusion_surface(s)),
            Query::NotEntails(s) => write!(f, "query: notentails {}", conclusion_surface(s)),
            Query::Bounds { target, premises } => {
                write!(f, "query: bounds {target} from ")?;
                for (i, (ce, iv)) in premises.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{ce}={}", value_surface(iv))?;
                }
                Ok(())
            }
            Query::Extension { target } => write!(f, "query: extension {target}"),
        }
    }
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.statements {
            writeln!(f, "{s}")?;
        }
        for q in &self.queries {
            writeln!(f, "{q}")?;
        }
        Ok(())
    }
}
