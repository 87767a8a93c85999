use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use super::{Command, Pattern, Qubit};
use crate::diagram::ConditionSet;
use crate::phase::PhaseExpr;

/// Syntax error; line and column are 1-based.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.col, self.message)
    }
}

struct Cursor {
    chars: Vec<char>,
    pos: usize,
    line: usize,
}

impl Cursor {
    fn new(src: &str, line: usize) -> Self {
        Cursor {
            chars: src.chars().collect(),
            pos: 0,
            line,
        }
    }

    fn err(&self, col0: usize, message: impl Into<String>) -> ParseError {
        ParseError {
            line: self.line,
            col: col0 + 1,
            message: message.into(),
        }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(|c| c == ' ' || c == '\t') {
            self.pos += 1;
        }
    }

    /// True at end of line or at a trailing comment.
    fn at_end(&mut self) -> bool {
        self.skip_ws();
        matches!(self.peek(), None | Some('#'))
    }

    fn expect(&mut self, c: char) -> Result<(), ParseError> {
        self.skip_ws();
        match self.peek() {
            Some(x) if x == c => {
                self.pos += 1;
                Ok(())
            }
            Some(x) => Err(self.err(self.pos, format!("expected `{c}`, found `{x}`"))),
            None => Err(self.err(self.pos, format!("expected `{c}`, found end of line"))),
        }
    }

    fn word(&mut self) -> Option<(usize, String)> {
        self.skip_ws();
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_alphanumeric() || c == '_') {
            self.pos += 1;
        }
        (self.pos > start).then(|| (start, self.chars[start..self.pos].iter().collect()))
    }

    fn qubit(&mut self) -> Result<Qubit, ParseError> {
        self.skip_ws();
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        if self.pos == start {
            return Err(self.err(start, "expected a qubit number"));
        }
        let text: String = self.chars[start..self.pos].iter().collect();
        match text.parse::<Qubit>() {
            Ok(0) => Err(self.err(start, "qubit numbers start at 1")),
            Ok(q) => Ok(q),
            Err(_) => Err(self.err(start, format!("qubit number `{text}` out of range"))),
        }
    }

    /// Non-blank run up to whitespace or `#`.
    fn token(&mut self) -> (usize, String) {
        self.skip_ws();
        let start = self.pos;
        while self.peek().is_some_and(|c| !c.is_whitespace() && c != '#') {
            self.pos += 1;
        }
        (start, self.chars[start..self.pos].iter().collect())
    }

    fn signal_set(&mut self) -> Result<ConditionSet, ParseError> {
        self.expect('{')?;
        let mut set = ConditionSet::new();
        self.skip_ws();
        if self.peek() == Some('}') {
            self.pos += 1;
            return Ok(set);
        }
        loop {
            match self.word() {
                Some((_, w)) => set.insert(w),
                None => return Err(self.err(self.pos, "expected a signal name")),
            }
            self.skip_ws();
            match self.peek() {
                Some(',') => self.pos += 1,
                Some('}') => {
                    self.pos += 1;
                    return Ok(set);
                }
                _ => return Err(self.err(self.pos, "expected `,` or `}` in signal set")),
            }
        }
    }

    fn qubit_list(&mut self) -> Result<BTreeSet<Qubit>, ParseError> {
        let mut out = BTreeSet::new();
        self.skip_ws();
        if self.peek() == Some(';') {
            return Ok(out);
        }
        loop {
            out.insert(self.qubit()?);
            self.skip_ws();
            match self.peek() {
                Some(',') => self.pos += 1,
                _ => return Ok(out),
            }
        }
    }
}

#[derive(Default)]
struct Header {
    inputs: Option<BTreeSet<Qubit>>,
    outputs: Option<BTreeSet<Qubit>>,
}

fn parse_header(cur: &mut Cursor, header: &mut Header) -> Result<(), ParseError> {
    while !cur.at_end() {
        let (col, key) = cur.word().ok_or_else(|| cur.err(cur.pos, "expected `inputs` or `outputs`"))?;
        let slot = match key.as_str() {
            "inputs" => &mut header.inputs,
            "outputs" => &mut header.outputs,
            _ => return Err(cur.err(col, format!("unknown header field `{key}`"))),
        };
        if slot.is_some() {
            return Err(cur.err(col, format!("`{key}` declared twice")));
        }
        cur.expect(':')?;
        *slot = Some(cur.qubit_list()?);
        cur.expect(';')?;
    }
    Ok(())
}

fn parse_command(cur: &mut Cursor) -> Result<(usize, Command), ParseError> {
    cur.skip_ws();
    let start = cur.pos;
    let (col, op) = cur.word().ok_or_else(|| cur.err(cur.pos, "expected a command"))?;
    let cmd = match op.as_str() {
        "N" => Command::N(cur.qubit()?),
        "E" => {
            let a = cur.qubit()?;
            cur.skip_ws();
            let bcol = cur.pos;
            let b = cur.qubit()?;
            if a == b {
                return Err(cur.err(bcol, "E needs two distinct qubits"));
            }
            Command::E(a, b)
        }
        "M" => {
            let q = cur.qubit()?;
            let (pcol, text) = cur.token();
            if text.is_empty() {
                return Err(cur.err(pcol, "expected a measurement angle"));
            }
            let angle: PhaseExpr = text.parse().map_err(|e| cur.err(pcol, format!("{e}")))?;
            let mut s = None;
            let mut t = None;
            while !cur.at_end() {
                let (kcol, key) = cur.word().ok_or_else(|| cur.err(cur.pos, "expected `s=` or `t=`"))?;
                let slot = match key.as_str() {
                    "s" => &mut s,
                    "t" => &mut t,
                    _ => return Err(cur.err(kcol, format!("unexpected `{key}`"))),
                };
                if slot.is_some() {
                    return Err(cur.err(kcol, format!("`{key}=` given twice")));
                }
                cur.expect('=')?;
                *slot = Some(cur.signal_set()?);
            }
            Command::M {
                q,
                angle,
                s: s.unwrap_or_default(),
                t: t.unwrap_or_default(),
            }
        }
        "X" | "Z" => {
            let q = cur.qubit()?;
            let set = cur.signal_set()?;
            if op == "X" {
                Command::X(q, set)
            } else {
                Command::Z(q, set)
            }
        }
        _ => return Err(cur.err(col, format!("unknown command `{op}`"))),
    };
    if !cur.at_end() {
        return Err(cur.err(cur.pos, "unexpected text after command"));
    }
    Ok((start, cmd))
}

/// Parses the pattern DSL. Comment lines before the first header or command
/// are kept; later comments are dropped.
pub fn parse_pattern(text: &str) -> Result<Pattern, ParseError> {
    let mut comments = Vec::new();
    let mut header = Header::default();
    let mut commands = Vec::new();
    let mut seen_content = false;
    let mut prepared = BTreeSet::new();
    let mut measured = BTreeSet::new();

    for (i, raw) in text.lines().enumerate() {
        let mut cur = Cursor::new(raw, i + 1);
        cur.skip_ws();
        match cur.peek() {
            None => continue,
            Some('#') => {
                if !seen_content {
                    comments.push(raw[raw.find('#').unwrap_or(0) + 1..].to_string());
                }
                continue;
            }
            _ => {}
        }
        let save = cur.pos;
        let is_header = matches!(cur.word(), Some((_, w)) if w == "inputs" || w == "outputs")
            && {
                cur.skip_ws();
                cur.peek() == Some(':')
            };
        cur.pos = save;
        if is_header {
            if !commands.is_empty() {
                return Err(cur.err(save, "header must precede commands"));
            }
            parse_header(&mut cur, &mut header)?;
            seen_content = true;
            continue;
        }
        seen_content = true;
        let (col, cmd) = parse_command(&mut cur)?;
        match &cmd {
            Command::N(q) => {
                if !prepared.insert(*q) {
                    return Err(cur.err(col, format!("qubit {q} initialised twice")));
                }
            }
            Command::E(a, b) => {
                if let Some(q) = [a, b].into_iter().find(|q| measured.contains(*q)) {
                    return Err(cur.err(col, format!("E on qubit {q} after its measurement")));
                }
            }
            Command::M { q, .. } => {
                measured.insert(*q);
            }
            _ => {}
        }
        commands.push(cmd);
    }

    let mut p = Pattern::new(commands);
    p.comments = comments;
    if let Some(inputs) = header.inputs {
        p.inputs = inputs;
    }
    if let Some(outputs) = header.outputs {
        p.outputs = outputs;
    }
    p.qubits.extend(p.inputs.iter().chain(p.outputs.iter()));
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;

    const CX: &str = "N 4\nN 3\nE 3 4\nE 2 3\nE 1 3\nM 2 0\nM 3 0\nZ 1 {2}\nZ 4 {2}\nX 4 {3}\n";

    #[test]
    fn cnot_pattern() {
        let p = parse_pattern(CX).unwrap();
        assert_eq!(p.commands.len(), 10);
        assert_eq!(p.inputs, BTreeSet::from([1, 2]));
        assert_eq!(p.outputs, BTreeSet::from([1, 4]));
    }

    #[test]
    fn empty_body() {
        let p = parse_pattern("").unwrap();
        assert!(p.commands.is_empty() && p.qubits.is_empty());
        assert_eq!(p.to_text(), "inputs: ; outputs: ;\n");
        assert_eq!(parse_pattern(&p.to_text()).unwrap(), p);
    }

    #[test]
    fn header_and_comments_round_trip() {
        let text = "# teleport\ninputs: 1; outputs: 3;\nN 3\nN 2\nE 1 2\nE 2 3\nM 1 0\nM 2 0\nZ 3 {1}\nX 3 {2}\n";
        let p = parse_pattern(text).unwrap();
        assert_eq!(p.comments, vec![" teleport".to_string()]);
        assert_eq!(p.to_text(), text);
    }

    #[test]
    fn measurement_options_and_spacing() {
        let p = parse_pattern("  M 1   -a+1/2pi  t={ 3 , 2 } s={4}  # note\n").unwrap();
        assert_eq!(p.commands[0].to_string(), "M 1 -a+1/2pi s={4} t={2,3}");
    }

    #[test]
    fn errors_carry_position() {
        let e = parse_pattern("N 1\nE 1 x\n").unwrap_err();
        assert_eq!((e.line, e.col), (2, 5));
        assert_eq!(e.to_string(), "2:5: expected a qubit number");
        let e = parse_pattern("N 1\nN 1\n").unwrap_err();
        assert_eq!((e.line, e.col), (2, 1));
        let e = parse_pattern("M 1 0\nE 1 2\n").unwrap_err();
        assert_eq!(e.line, 2);
        let e = parse_pattern("M 2 3/0pi\n").unwrap_err();
        assert_eq!((e.line, e.col), (1, 5));
        let e = parse_pattern("Q 1\n").unwrap_err();
        assert_eq!((e.line, e.col), (1, 1));
        let e = parse_pattern("X 1 {2\n").unwrap_err();
        assert_eq!(e.line, 1);
        assert!(parse_pattern("E 2 2").is_err());
        assert!(parse_pattern("N 0").is_err());
    }

    #[test]
    fn repeated_measurement_parses() {
        // caught by the well-formedness check instead
        let p = parse_pattern("M 1 0\nM 1 0\n").unwrap();
        assert_eq!(p.commands.len(), 2);
    }
}
