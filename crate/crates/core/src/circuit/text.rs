//! Line-oriented text format for circuits and referees.
//!
//! Circuit:
//! ```text
//! inputs 2
//! H 0
//! T 0 1 2   # controls 0 and 1, target 2
//! ANC
//! TR 1
//! ```
//!
//! Referee: a header (`mode qrg|cqrg|mqrg`, `alice n`, `bob m`, optional
//! `outcome k`) followed by `begin p` / `begin q` blocks holding circuits. A
//! block ends at `end`, at the next `begin`, or at end of file. The `inputs`
//! line may be omitted inside a block; it defaults to the width implied by
//! the header.

use std::fmt::Write as _;

use super::{Circuit, Gate, Mode, Referee};
use crate::error::{Error, Result};

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

/// Splits off comments and blank lines, yielding `(1-based line, tokens)`.
fn tokens(src: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    src.lines().enumerate().filter_map(|(i, raw)| {
        let body = raw.split('#').next().unwrap_or("");
        let toks: Vec<&str> = body.split_whitespace().collect();
        (!toks.is_empty()).then_some((i + 1, toks))
    })
}

fn parse_usize(line: usize, tok: &str) -> Result<usize> {
    tok.parse()
        .map_err(|_| parse_err(line, format!("expected a non-negative integer, got `{tok}`")))
}

fn expect_args<'a>(line: usize, toks: &'a [&'a str], n: usize) -> Result<&'a [&'a str]> {
    if toks.len() != n + 1 {
        return Err(parse_err(
            line,
            format!("`{}` takes {n} argument(s), got {}", toks[0], toks.len() - 1),
        ));
    }
    Ok(&toks[1..])
}

fn parse_gate(line: usize, toks: &[&str]) -> Result<Option<Gate>> {
    let gate = match toks[0].to_ascii_uppercase().as_str() {
        "H" => Gate::Hadamard(parse_usize(line, expect_args(line, toks, 1)?[0])?),
        "P" => Gate::Phase(parse_usize(line, expect_args(line, toks, 1)?[0])?),
        "T" => {
            let a = expect_args(line, toks, 3)?;
            Gate::Toffoli(
                parse_usize(line, a[0])?,
                parse_usize(line, a[1])?,
                parse_usize(line, a[2])?,
            )
        }
        "ANC" => {
            expect_args(line, toks, 0)?;
            Gate::Ancilla
        }
        "TR" => Gate::Erasure(parse_usize(line, expect_args(line, toks, 1)?[0])?),
        _ => return Ok(None),
    };
    Ok(Some(gate))
}

/// Accumulates one circuit; `inputs` may be supplied by a header line.
struct CircuitBuf {
    start: usize,
    inputs: Option<usize>,
    gates: Vec<(usize, Gate)>,
}

impl CircuitBuf {
    fn new(start: usize) -> Self {
        CircuitBuf {
            start,
            inputs: None,
            gates: Vec::new(),
        }
    }

    /// Returns `false` if the line is neither a gate nor an `inputs` header.
    fn accept(&mut self, line: usize, toks: &[&str]) -> Result<bool> {
        if toks[0] == "inputs" {
            if self.inputs.is_some() {
                return Err(parse_err(line, "duplicate `inputs` line"));
            }
            if !self.gates.is_empty() {
                return Err(parse_err(line, "`inputs` must precede the gates"));
            }
            self.inputs = Some(parse_usize(line, expect_args(line, toks, 1)?[0])?);
            return Ok(true);
        }
        match parse_gate(line, toks)? {
            Some(g) => {
                self.gates.push((line, g));
                Ok(true)
            }
            None => Ok(false),
        }
    }

    fn finish(self, default_inputs: Option<usize>) -> Result<Circuit> {
        let inputs = match (self.inputs, default_inputs) {
            (Some(n), Some(d)) if n != d => {
                return Err(parse_err(
                    self.start,
                    format!("block declares {n} inputs, header implies {d}"),
                ))
            }
            (Some(n), _) | (None, Some(n)) => n,
            (None, None) => return Err(parse_err(self.start, "missing `inputs` line")),
        };
        let lines: Vec<usize> = self.gates.iter().map(|&(l, _)| l).collect();
        let c = Circuit::new(inputs, self.gates.into_iter().map(|(_, g)| g).collect());
        if let Err(e) = c.validate() {
            let line = e.position.map_or(self.start, |p| lines[p]);
            return Err(parse_err(line, format!("invalid circuit: {e}")));
        }
        Ok(c)
    }
}

pub fn parse_circuit(src: &str) -> Result<Circuit> {
    let mut buf = CircuitBuf::new(1);
    for (line, toks) in tokens(src) {
        if !buf.accept(line, &toks)? {
            return Err(parse_err(line, format!("unknown directive `{}`", toks[0])));
        }
    }
    buf.finish(None)
}

pub fn circuit_to_text(c: &Circuit) -> String {
    let mut out = format!("inputs {}\n", c.inputs());
    for g in c.gates() {
        writeln!(out, "{g}").unwrap();
    }
    out
}

pub fn parse_referee(src: &str) -> Result<Referee> {
    let mut mode = None;
    let mut alice = None;
    let mut bob = None;
    let mut outcome = None;
    let mut blocks: [Option<CircuitBuf>; 2] = [None, None];
    let mut open: Option<usize> = None;

    let set = |slot: &mut Option<usize>, line: usize, toks: &[&str]| -> Result<()> {
        if slot.is_some() {
            return Err(parse_err(line, format!("duplicate `{}` line", toks[0])));
        }
        *slot = Some(parse_usize(line, expect_args(line, toks, 1)?[0])?);
        Ok(())
    };

    for (line, toks) in tokens(src) {
        match toks[0] {
            "begin" => {
                let which = match expect_args(line, &toks, 1)?[0] {
                    "p" => 0,
                    "q" => 1,
                    other => return Err(parse_err(line, format!("unknown block `{other}`"))),
                };
                if blocks[which].is_some() {
                    return Err(parse_err(line, "duplicate block"));
                }
                blocks[which] = Some(CircuitBuf::new(line));
                open = Some(which);
            }
            "end" => {
                expect_args(line, &toks, 0)?;
                if open.take().is_none() {
                    return Err(parse_err(line, "`end` outside a block"));
                }
            }
            _ if open.is_some() => {
                let buf = blocks[open.unwrap()].as_mut().unwrap();
                if !buf.accept(line, &toks)? {
                    return Err(parse_err(line, format!("unknown gate `{}`", toks[0])));
                }
            }
            "mode" => {
                if mode.is_some() {
                    return Err(parse_err(line, "duplicate `mode` line"));
                }
                let m = expect_args(line, &toks, 1)?[0];
                mode = Some(m.parse::<Mode>().map_err(|e| parse_err(line, e.to_string()))?);
            }
            "alice" => set(&mut alice, line, &toks)?,
            "bob" => set(&mut bob, line, &toks)?,
            "outcome" => set(&mut outcome, line, &toks)?,
            other => return Err(parse_err(line, format!("unknown directive `{other}`"))),
        }
    }

    let mode = mode.ok_or_else(|| parse_err(1, "missing `mode` line"))?;
    let alice = alice.ok_or_else(|| parse_err(1, "missing `alice` line"))?;
    let bob = bob.ok_or_else(|| parse_err(1, "missing `bob` line"))?;
    let [p_buf, q_buf] = blocks;
    let p = p_buf.map(|b| b.finish(Some(alice))).transpose()?;
    let q_inputs = match (mode, outcome, &p) {
        (Mode::Mqrg, Some(k), _) => Some(k + bob),
        (Mode::Mqrg, None, Some(p)) if p.output_delta() >= 0 => Some(p.outputs() + bob),
        (Mode::Mqrg, None, _) => None,
        _ => Some(alice + bob),
    };
    let q = q_buf
        .ok_or_else(|| parse_err(1, "missing `begin q` block"))?
        .finish(q_inputs)?;
    Referee::from_parts(mode, alice, bob, outcome, p, q)
}

pub fn referee_to_text(r: &Referee) -> String {
    let mut out = format!("mode {}\nalice {}\nbob {}\n", r.mode(), r.alice(), r.bob());
    if let Some(p) = r.p_circuit() {
        writeln!(out, "outcome {}\nbegin p", r.outcome()).unwrap();
        out.push_str(&circuit_to_text(p));
        out.push_str("end\n");
    }
    out.push_str("begin q\n");
    out.push_str(&circuit_to_text(r.q_circuit()));
    out.push_str("end\n");
    out
}
