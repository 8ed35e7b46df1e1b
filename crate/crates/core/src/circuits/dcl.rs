//! Line-oriented tuple format for circuits.
//!
//! ```text
//! bc <y> <g> e <label>     gate g carries label x<i> | 0 | 1 | not | and<k> | or<k> | ustconn2<N>
//! bc <y> <g> <p> <b>       the p-th predecessor of g is b
//! out <y> <g>              g is the output
//! ```
//!
//! `<y>` is the number of inputs, in decimal or, in the unary variant, as a
//! string of `1`s (`-` for zero inputs).

use std::collections::BTreeMap;
use std::fmt::Write as _;

use super::{Circuit, CircuitError, Gate, GateId, Label};

fn emit(c: &Circuit, y: &str) -> String {
    let mut out = String::new();
    for (g, gate) in c.gates.iter().enumerate() {
        let _ = writeln!(out, "bc {y} {g} e {}", gate.label);
    }
    for (g, gate) in c.gates.iter().enumerate() {
        for (p, b) in gate.preds.iter().enumerate() {
            let _ = writeln!(out, "bc {y} {g} {} {b}", p + 1);
        }
    }
    let _ = writeln!(out, "out {y} {}", c.output);
    out
}

pub fn emit_circuit_dcl(c: &Circuit) -> String {
    emit(c, &c.input_count.to_string())
}

pub fn emit_circuit_dcl_unary(c: &Circuit) -> String {
    let y = if c.input_count == 0 {
        "-".to_string()
    } else {
        "1".repeat(c.input_count)
    };
    emit(c, &y)
}

fn parse_size(tok: &str, unary: bool) -> Option<usize> {
    if !unary {
        return tok.parse().ok();
    }
    match tok {
        "-" => Some(0),
        _ if tok.bytes().all(|b| b == b'1') => Some(tok.len()),
        _ => None,
    }
}

fn parse(text: &str, unary: bool) -> Result<Circuit, CircuitError> {
    let err = |line: usize, msg: String| CircuitError::Parse { line, msg };
    let mut y: Option<usize> = None;
    let mut labels: BTreeMap<u64, (Label, usize)> = BTreeMap::new();
    let mut preds: Vec<(u64, usize, u64, usize)> = Vec::new();
    let mut output: Option<(u64, usize)> = None;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let toks: Vec<&str> = content.split_whitespace().collect();
        let size = toks
            .get(1)
            .and_then(|t| parse_size(t, unary))
            .ok_or_else(|| err(line, "missing or malformed size tag".into()))?;
        match y {
            Some(v) if v != size => {
                return Err(err(line, format!("size tag {size} differs from {v}")))
            }
            _ => y = Some(size),
        }
        let id = |t: &str| {
            t.parse::<u64>()
                .map_err(|_| err(line, format!("bad gate id '{t}'")))
        };
        match (toks[0], toks.len()) {
            ("bc", 5) => {
                let g = id(toks[2])?;
                if toks[3] == "e" {
                    let label: Label = toks[4].parse().map_err(|m| err(line, m))?;
                    if labels.insert(g, (label, line)).is_some() {
                        return Err(err(line, format!("gate {g} declared twice")));
                    }
                } else {
                    let p: usize =
                        toks[3].parse().ok().filter(|&p| p >= 1).ok_or_else(|| {
                            err(line, format!("bad predecessor index '{}'", toks[3]))
                        })?;
                    preds.push((g, p, id(toks[4])?, line));
                }
            }
            ("out", 3) => {
                if output.is_some() {
                    return Err(err(line, "second output".into()));
                }
                output = Some((id(toks[2])?, line));
            }
            _ => return Err(err(line, format!("unrecognized tuple '{content}'"))),
        }
    }
    let dense: BTreeMap<u64, GateId> = labels
        .keys()
        .enumerate()
        .map(|(i, &g)| (g, i as GateId))
        .collect();
    let mut gates: Vec<Gate> = labels
        .values()
        .map(|&(label, _)| Gate {
            label,
            preds: vec![GateId::MAX; label.fan_in()],
        })
        .collect();
    for (g, p, b, line) in preds {
        let gi = *dense
            .get(&g)
            .ok_or_else(|| err(line, format!("gate {g} is not declared")))?;
        let bi = *dense
            .get(&b)
            .ok_or_else(|| err(line, format!("gate {b} is not declared")))?;
        let slot = gates[gi as usize]
            .preds
            .get_mut(p - 1)
            .ok_or_else(|| err(line, format!("gate {g} has no predecessor {p}")))?;
        if *slot != GateId::MAX {
            return Err(err(
                line,
                format!("predecessor {p} of gate {g} given twice"),
            ));
        }
        *slot = bi;
    }
    for (&g, &(_, line)) in &labels {
        if let Some(p) = gates[dense[&g] as usize]
            .preds
            .iter()
            .position(|&b| b == GateId::MAX)
        {
            return Err(err(line, format!("gate {g} lacks predecessor {}", p + 1)));
        }
    }
    let (out, line) =
        output.ok_or_else(|| err(text.lines().count().max(1), "no output tuple".into()))?;
    let out = *dense
        .get(&out)
        .ok_or_else(|| err(line, format!("output gate {out} is not declared")))?;
    Circuit::new(gates, out, y.unwrap_or(0))
}

pub fn parse_circuit_dcl(text: &str) -> Result<Circuit, CircuitError> {
    parse(text, false)
}

pub fn parse_circuit_dcl_unary(text: &str) -> Result<Circuit, CircuitError> {
    parse(text, true)
}
