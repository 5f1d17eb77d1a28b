use std::fmt;
use std::fmt::Write as _;

use super::{Circuit, Gate, GateKind, GateTag};

#[derive(Debug, Clone, PartialEq)]
pub enum ParseErrorKind {
    Syntax(String),
    UnknownGate(String),
    QubitOutOfRange {
        qubit: usize,
        width: usize,
    },
    DuplicateOperand(usize),
    MissingAngle(GateTag),
    UnexpectedAngle(GateTag),
    Arity {
        tag: GateTag,
        expected: usize,
        got: usize,
    },
    NotAllowed(String),
}

impl fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseErrorKind::Syntax(m) => write!(f, "syntax error: {m}"),
            ParseErrorKind::UnknownGate(g) => write!(f, "unknown gate mnemonic '{g}'"),
            ParseErrorKind::QubitOutOfRange { qubit, width } => {
                write!(
                    f,
                    "qubit index out of range: q[{qubit}] with {width} qubits"
                )
            }
            ParseErrorKind::DuplicateOperand(q) => write!(f, "duplicate operand q[{q}]"),
            ParseErrorKind::MissingAngle(t) => write!(f, "missing angle for {t}"),
            ParseErrorKind::UnexpectedAngle(t) => write!(f, "extra angle for {t}"),
            ParseErrorKind::Arity { tag, expected, got } => {
                write!(f, "{tag} expects {expected} qubit operand(s), got {got}")
            }
            ParseErrorKind::NotAllowed(m) => write!(f, "{m}"),
        }
    }
}

/// A parse failure with a 1-based line and column.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("line {line}, column {column}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub kind: ParseErrorKind,
}

/// One meaningful line of a circuit file after the header.
#[derive(Debug, Clone, PartialEq)]
pub enum Directive {
    Gate(Gate),
    Slice(usize),
    /// Full-line comment, with the leading `#` and surrounding blanks removed.
    Comment(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParsedLine {
    pub line: usize,
    pub directive: Directive,
}

struct Cursor<'a> {
    text: &'a str,
    pos: usize,
    line: usize,
}

impl<'a> Cursor<'a> {
    fn err(&self, kind: ParseErrorKind) -> ParseError {
        ParseError {
            line: self.line,
            column: self.pos + 1,
            kind,
        }
    }

    fn syntax(&self, msg: impl Into<String>) -> ParseError {
        self.err(ParseErrorKind::Syntax(msg.into()))
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(|c| c == ' ' || c == '\t') {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<char> {
        self.text[self.pos..].chars().next()
    }

    fn at_end(&mut self) -> bool {
        self.skip_ws();
        self.pos >= self.text.len()
    }

    fn expect(&mut self, c: char) -> Result<(), ParseError> {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            Ok(())
        } else {
            Err(self.syntax(format!("expected '{c}'")))
        }
    }

    fn word(&mut self) -> &'a str {
        self.skip_ws();
        let start = self.pos;
        while self
            .peek()
            .is_some_and(|c| c.is_ascii_alphanumeric() || c == '_')
        {
            self.pos += 1;
        }
        &self.text[start..self.pos]
    }

    fn unsigned(&mut self) -> Result<usize, ParseError> {
        self.skip_ws();
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.syntax("expected an unsigned integer"));
        }
        self.text[start..self.pos].parse().map_err(|_| ParseError {
            line: self.line,
            column: start + 1,
            kind: ParseErrorKind::Syntax("integer too large".into()),
        })
    }

    fn real(&mut self) -> Result<f64, ParseError> {
        self.skip_ws();
        let start = self.pos;
        while self
            .peek()
            .is_some_and(|c| c.is_ascii_digit() || matches!(c, '.' | '-' | '+' | 'e' | 'E'))
        {
            self.pos += 1;
        }
        let lit = &self.text[start..self.pos];
        let bad = || ParseError {
            line: self.line,
            column: start + 1,
            kind: ParseErrorKind::Syntax(format!("invalid decimal literal '{lit}'")),
        };
        if !lit.bytes().any(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let v: f64 = lit.parse().map_err(|_| bad())?;
        if !v.is_finite() {
            return Err(bad());
        }
        Ok(v)
    }

    /// Parses `q[<i>]`, returning the index and its column.
    fn qubit(&mut self) -> Result<(usize, usize), ParseError> {
        self.skip_ws();
        let col = self.pos + 1;
        if self.word() != "q" {
            self.pos = col - 1;
            return Err(self.syntax("expected qubit operand 'q[<i>]'"));
        }
        self.expect('[')?;
        let i = self.unsigned()?;
        self.expect(']')?;
        Ok((i, col))
    }
}

fn strip_comment(line: &str) -> (&str, Option<&str>) {
    match line.find('#') {
        Some(i) => (&line[..i], Some(&line[i + 1..])),
        None => (line, None),
    }
}

/// Tokenizes a circuit file into its declared width and body lines.
///
/// Accepts the compiled dialect: `slice <k>` directives and `teleswap`
/// gates pass through; [`parse_circuit`] rejects them afterwards.
pub fn parse_lines(text: &str) -> Result<(usize, Vec<ParsedLine>), ParseError> {
    let mut width: Option<usize> = None;
    let mut saw_version = false;
    let mut out = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let raw = raw.strip_suffix('\r').unwrap_or(raw);
        let (code, comment) = strip_comment(raw);
        let mut cur = Cursor {
            text: code,
            pos: 0,
            line: line_no,
        };
        if cur.at_end() {
            if let (Some(c), true) = (comment, width.is_some()) {
                out.push(ParsedLine {
                    line: line_no,
                    directive: Directive::Comment(c.trim().to_string()),
                });
            }
            continue;
        }
        cur.pos = 0;
        let start = {
            cur.skip_ws();
            cur.pos
        };
        let word = cur.word().to_ascii_lowercase();
        if word.is_empty() {
            cur.pos = start;
            return Err(cur.syntax("expected a keyword or gate mnemonic"));
        }

        if !saw_version {
            if word != "version" {
                cur.pos = start;
                return Err(cur.syntax("expected 'version 1.0' header"));
            }
            cur.skip_ws();
            let vstart = cur.pos;
            let v = cur.real()?;
            if v != 1.0 {
                cur.pos = vstart;
                return Err(cur.syntax("only version 1.0 is supported"));
            }
            if !cur.at_end() {
                return Err(cur.syntax("unexpected trailing input"));
            }
            saw_version = true;
            continue;
        }
        if width.is_none() {
            if word != "qubits" {
                cur.pos = start;
                return Err(cur.syntax("expected 'qubits <N>' declaration"));
            }
            let nstart = {
                cur.skip_ws();
                cur.pos
            };
            let n = cur.unsigned()?;
            if n == 0 {
                cur.pos = nstart;
                return Err(cur.syntax("qubit count must be at least 1"));
            }
            if !cur.at_end() {
                return Err(cur.syntax("unexpected trailing input"));
            }
            width = Some(n);
            continue;
        }
        let n = width.unwrap_or(0);

        if word == "slice" {
            let k = cur.unsigned()?;
            if !cur.at_end() {
                return Err(cur.syntax("unexpected trailing input"));
            }
            out.push(ParsedLine {
                line: line_no,
                directive: Directive::Slice(k),
            });
            continue;
        }

        let Some(tag) = GateTag::from_mnemonic(&word) else {
            cur.pos = start;
            return Err(cur.err(ParseErrorKind::UnknownGate(word)));
        };

        let mut qubits: Vec<(usize, usize)> = Vec::with_capacity(2);
        let mut angle: Option<f64> = None;
        loop {
            cur.skip_ws();
            let here = cur.pos;
            if cur.peek() == Some('q') {
                if angle.is_some() {
                    return Err(cur.syntax("qubit operand after angle"));
                }
                qubits.push(cur.qubit()?);
            } else if cur.at_end() {
                cur.pos = here;
                if qubits.is_empty() {
                    return Err(cur.syntax("expected qubit operand 'q[<i>]'"));
                }
                break;
            } else {
                if qubits.is_empty() {
                    return Err(cur.syntax("expected qubit operand 'q[<i>]'"));
                }
                if angle.is_some() {
                    return Err(cur.syntax("more than one angle"));
                }
                angle = Some(cur.real()?);
                if !tag.has_angle() {
                    cur.pos = here;
                    return Err(cur.err(ParseErrorKind::UnexpectedAngle(tag)));
                }
            }
            if cur.at_end() {
                break;
            }
            cur.expect(',')?;
        }

        if qubits.len() != tag.arity() {
            cur.pos = start;
            return Err(cur.err(ParseErrorKind::Arity {
                tag,
                expected: tag.arity(),
                got: qubits.len(),
            }));
        }
        if tag.has_angle() && angle.is_none() {
            return Err(cur.err(ParseErrorKind::MissingAngle(tag)));
        }
        for &(q, col) in &qubits {
            if q >= n {
                return Err(ParseError {
                    line: line_no,
                    column: col,
                    kind: ParseErrorKind::QubitOutOfRange { qubit: q, width: n },
                });
            }
        }
        if qubits.len() == 2 && qubits[0].0 == qubits[1].0 {
            return Err(ParseError {
                line: line_no,
                column: qubits[1].1,
                kind: ParseErrorKind::DuplicateOperand(qubits[0].0),
            });
        }
        let kind = GateKind::from_parts(tag, angle).expect("angle presence checked");
        out.push(ParsedLine {
            line: line_no,
            directive: Directive::Gate(Gate {
                kind,
                qubits: qubits.into_iter().map(|(q, _)| q).collect(),
                source_line: Some(line_no),
            }),
        });
    }

    let last = text.lines().count().max(1);
    if !saw_version {
        return Err(ParseError {
            line: last,
            column: 1,
            kind: ParseErrorKind::Syntax("missing 'version 1.0' header".into()),
        });
    }
    match width {
        Some(w) => Ok((w, out)),
        None => Err(ParseError {
            line: last,
            column: 1,
            kind: ParseErrorKind::Syntax("missing 'qubits <N>' declaration".into()),
        }),
    }
}

/// Parses a source circuit. `slice` directives and `teleswap` gates are
/// rejected; they belong to compiled files only.
pub fn parse_circuit(text: &str) -> Result<Circuit, ParseError> {
    let (width, lines) = parse_lines(text)?;
    let mut c = Circuit::new("", width);
    for pl in lines {
        match pl.directive {
            Directive::Gate(g) if g.kind == GateKind::TeleSwap => {
                return Err(ParseError {
                    line: pl.line,
                    column: 1,
                    kind: ParseErrorKind::NotAllowed(
                        "teleswap is only allowed in compiled files".into(),
                    ),
                })
            }
            Directive::Gate(g) => c.push(g),
            Directive::Slice(_) => {
                return Err(ParseError {
                    line: pl.line,
                    column: 1,
                    kind: ParseErrorKind::NotAllowed(
                        "slice directive is only allowed in compiled files".into(),
                    ),
                })
            }
            Directive::Comment(_) => {}
        }
    }
    Ok(c)
}

/// Formats a real with 12 significant digits, trailing zeros trimmed and
/// at least one fractional digit (`0.5`, `1.0`, `1.57079632679`).
pub fn format_real(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return "0.0".to_string();
    }
    let sci = format!("{:.11e}", x);
    let (mant, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-5..12).contains(&exp) {
        let mant = mant.trim_end_matches('0');
        let mant = if mant.ends_with('.') {
            format!("{mant}0")
        } else {
            mant.to_string()
        };
        return format!("{mant}e{exp}");
    }
    let decimals = (11 - exp).max(0) as usize;
    let mut s = format!("{:.*}", decimals, x);
    if s.contains('.') {
        while s.ends_with('0') {
            s.pop();
        }
        if s.ends_with('.') {
            s.push('0');
        }
    } else {
        s.push_str(".0");
    }
    s
}

/// Appends one gate line (no newline).
pub fn write_gate_line(out: &mut String, g: &Gate) {
    out.push_str(g.kind.tag().mnemonic());
    for (i, q) in g.qubits.iter().enumerate() {
        let sep = if i == 0 { " " } else { ", " };
        let _ = write!(out, "{sep}q[{q}]");
    }
    if let Some(a) = g.kind.angle() {
        out.push_str(", ");
        out.push_str(&format_real(a));
    }
}

pub fn serialize_circuit(c: &Circuit) -> String {
    let mut out = String::with_capacity(32 + c.gates.len() * 16);
    let _ = writeln!(out, "version 1.0");
    let _ = writeln!(out, "qubits {}", c.width);
    for g in &c.gates {
        write_gate_line(&mut out, g);
        out.push('\n');
    }
    out
}
