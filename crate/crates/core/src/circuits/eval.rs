use super::{Circuit, CircuitError, Gate, GateId, Label, MultiCircuit};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum UstError {
    #[error("encoding has {got} bits, expected {expected}")]
    Length { expected: usize, got: usize },
    #[error("field names node {0}, beyond the node count")]
    NodeRange(u64),
    #[error("node {0} has more than two neighbours")]
    Degree(u64),
    #[error("source or target field is empty")]
    Endpoint,
}

/// Field width for node names `0..=n`, where 0 means no neighbour.
pub fn ustconn2_width(n: u32) -> usize {
    (32 - n.leading_zeros()) as usize
}

fn field(bits: &[bool], at: usize, w: usize) -> u64 {
    (0..w).fold(0, |acc, i| acc | (bits[at + i] as u64) << i)
}

/// Connectivity of `s` and `t` in an undirected graph on nodes `1..=n`.
///
/// The encoding holds two neighbour fields per node, then `s`, then `t`;
/// every field is `ustconn2_width(n)` bits, least significant bit first.
/// An edge exists when either endpoint lists the other.
pub fn ustconn2(n: u32, bits: &[bool]) -> Result<bool, UstError> {
    let w = ustconn2_width(n);
    let nodes = n as usize;
    let expected = (2 * nodes + 2) * w;
    if bits.len() != expected {
        return Err(UstError::Length {
            expected,
            got: bits.len(),
        });
    }
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); nodes + 1];
    for v in 1..=nodes {
        for k in 0..2 {
            let u = field(bits, ((v - 1) * 2 + k) * w, w);
            if u > n as u64 {
                return Err(UstError::NodeRange(u));
            }
            let u = u as usize;
            if u != 0 && u != v && !adj[v].contains(&u) {
                adj[v].push(u);
                adj[u].push(v);
            }
        }
    }
    if let Some(v) = (1..=nodes).find(|&v| adj[v].len() > 2) {
        return Err(UstError::Degree(v as u64));
    }
    let s = field(bits, 2 * nodes * w, w);
    let t = field(bits, (2 * nodes + 1) * w, w);
    for x in [s, t] {
        if x == 0 {
            return Err(UstError::Endpoint);
        }
        if x > n as u64 {
            return Err(UstError::NodeRange(x));
        }
    }
    let (s, t) = (s as usize, t as usize);
    let mut seen = vec![false; nodes + 1];
    let mut stack = vec![s];
    seen[s] = true;
    while let Some(v) = stack.pop() {
        if v == t {
            return Ok(true);
        }
        for &u in &adj[v] {
            if !std::mem::replace(&mut seen[u], true) {
                stack.push(u);
            }
        }
    }
    Ok(false)
}

fn order(c: &Circuit) -> Result<Vec<GateId>, CircuitError> {
    let sorted = c
        .gates
        .iter()
        .enumerate()
        .all(|(g, gate)| gate.preds.iter().all(|&p| (p as usize) < g));
    if sorted {
        Ok((0..c.gates.len() as GateId).collect())
    } else {
        c.topo_order()
    }
}

fn eval_gates(
    gates: &[Gate],
    order: &[GateId],
    inputs: &[u64],
    lanes: u64,
) -> Result<Vec<u64>, CircuitError> {
    let mut val = vec![0u64; gates.len()];
    for &g in order {
        let gate = &gates[g as usize];
        let v = |p: &GateId| val[*p as usize];
        val[g as usize] = match gate.label {
            Label::Input(i) => inputs[i as usize],
            Label::Const(b) => {
                if b {
                    !0
                } else {
                    0
                }
            }
            Label::Not => !v(&gate.preds[0]),
            Label::And(_) => gate.preds.iter().map(v).fold(!0, |a, b| a & b),
            Label::Or(_) => gate.preds.iter().map(v).fold(0, |a, b| a | b),
            Label::UstConn2(n) => {
                let mut out = 0u64;
                let mut bits = vec![false; gate.preds.len()];
                for lane in 0..64 {
                    if lanes >> lane & 1 == 0 {
                        continue;
                    }
                    for (b, p) in bits.iter_mut().zip(&gate.preds) {
                        *b = val[*p as usize] >> lane & 1 == 1;
                    }
                    let r = ustconn2(n, &bits).map_err(|e| CircuitError::Ust(g, e))?;
                    out |= (r as u64) << lane;
                }
                out
            }
        };
    }
    Ok(val)
}

fn check_length(expected: usize, got: usize) -> Result<(), CircuitError> {
    if expected == got {
        Ok(())
    } else {
        Err(CircuitError::InputLength { expected, got })
    }
}

/// Evaluates 64 input vectors at once: bit `j` of `inputs[i]` is input `i`
/// of vector `j`. Only lanes set in `lanes` are checked for malformed
/// connectivity encodings; other lanes of the result are unspecified.
pub fn eval_words(c: &Circuit, inputs: &[u64], lanes: u64) -> Result<u64, CircuitError> {
    check_length(c.input_count, inputs.len())?;
    let val = eval_gates(&c.gates, &order(c)?, inputs, lanes)?;
    Ok(val[c.output as usize])
}

/// Evaluates every output of a multi-output circuit on 64 input vectors at
/// once, as [`eval_words`] does.
pub fn eval_multi(c: &MultiCircuit, inputs: &[u64], lanes: u64) -> Result<Vec<u64>, CircuitError> {
    check_length(c.input_count, inputs.len())?;
    let order: Vec<GateId> = (0..c.gates.len() as GateId).collect();
    let val = eval_gates(&c.gates, &order, inputs, lanes)?;
    Ok(c.outputs.iter().map(|&g| val[g as usize]).collect())
}

pub fn eval_circuit(c: &Circuit, bits: &[bool]) -> Result<bool, CircuitError> {
    let words: Vec<u64> = bits.iter().map(|&b| b as u64).collect();
    if words.len() != c.input_count {
        return Err(CircuitError::InputLength {
            expected: c.input_count,
            got: words.len(),
        });
    }
    Ok(eval_words(c, &words, 1)? & 1 == 1)
}

/// The truth table over all `2^n` input vectors; entry `m` has input `i`
/// set to bit `i` of `m`.
pub fn eval_all(c: &Circuit) -> Result<Vec<bool>, CircuitError> {
    let n = c.input_count;
    let total = 1usize << n;
    let mut out = Vec::with_capacity(total);
    let mut base = 0usize;
    while base < total {
        let count = (total - base).min(64);
        let lanes = if count == 64 { !0 } else { (1u64 << count) - 1 };
        let inputs: Vec<u64> = (0..n)
            .map(|i| (0..count).fold(0u64, |acc, j| acc | (((base + j) >> i & 1) as u64) << j))
            .collect();
        let r = eval_words(c, &inputs, lanes)?;
        out.extend((0..count).map(|j| r >> j & 1 == 1));
        base += count;
    }
    Ok(out)
}
