//! Boolean circuits over negation, unbounded fan-in conjunction and
//! disjunction, constants and degree-2 undirected connectivity.

mod builder;
mod dcl;
mod eval;
pub mod gen;

pub use builder::GateBuilder;
pub use dcl::{
    emit_circuit_dcl, emit_circuit_dcl_unary, parse_circuit_dcl, parse_circuit_dcl_unary,
};
pub use eval::{
    eval_all, eval_circuit, eval_multi, eval_words, ustconn2, ustconn2_width, UstError,
};

use std::fmt;

use serde::{Deserialize, Serialize};

pub type GateId = u32;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Label {
    /// zero-based input index
    Input(u32),
    Const(bool),
    Not,
    And(u32),
    Or(u32),
    /// connectivity on this many nodes
    UstConn2(u32),
}

impl Label {
    pub fn fan_in(self) -> usize {
        match self {
            Label::Input(_) | Label::Const(_) => 0,
            Label::Not => 1,
            Label::And(k) | Label::Or(k) => k as usize,
            Label::UstConn2(n) => (2 * n as usize + 2) * ustconn2_width(n),
        }
    }

    pub fn is_source(self) -> bool {
        matches!(self, Label::Input(_) | Label::Const(_))
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Input(i) => write!(f, "x{}", i + 1),
            Label::Const(b) => write!(f, "{}", *b as u8),
            Label::Not => write!(f, "not"),
            Label::And(k) => write!(f, "and{k}"),
            Label::Or(k) => write!(f, "or{k}"),
            Label::UstConn2(n) => write!(f, "ustconn2{n}"),
        }
    }
}

impl std::str::FromStr for Label {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let num = |p: &str| -> Result<u32, String> {
            s[p.len()..].parse().map_err(|_| format!("bad label '{s}'"))
        };
        match s {
            "0" => Ok(Label::Const(false)),
            "1" => Ok(Label::Const(true)),
            "not" => Ok(Label::Not),
            _ if s.starts_with("ustconn2") => {
                let n = num("ustconn2")?;
                if n == 0 {
                    return Err(format!("'{s}' needs at least one node"));
                }
                Ok(Label::UstConn2(n))
            }
            _ if s.starts_with("and") || s.starts_with("or") => {
                let (k, and) = if s.starts_with("and") {
                    (num("and")?, true)
                } else {
                    (num("or")?, false)
                };
                if k < 2 {
                    return Err(format!("'{s}' needs fan-in at least 2"));
                }
                Ok(if and { Label::And(k) } else { Label::Or(k) })
            }
            _ if s.starts_with('x') => match num("x")? {
                0 => Err("inputs are numbered from x1".into()),
                i => Ok(Label::Input(i - 1)),
            },
            _ => Err(format!("unknown label '{s}'")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Gate {
    pub label: Label,
    pub preds: Vec<GateId>,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum CircuitError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("gate {0} has fan-in {1}, its label needs {2}")]
    FanIn(GateId, usize, usize),
    #[error("gate {0} reads missing gate {1}")]
    Dangling(GateId, GateId),
    #[error("gates form a cycle through gate {0}")]
    Cycle(GateId),
    #[error("gate {0} is not read by any gate and is not the output")]
    Dead(GateId),
    #[error("input x{} is declared {1} times", .0 + 1)]
    Input(u32, usize),
    #[error("input x{} is outside the {1} declared inputs", .0 + 1)]
    InputRange(u32, usize),
    #[error("output gate {0} does not exist")]
    Output(GateId),
    #[error("expected {expected} input bits, got {got}")]
    InputLength { expected: usize, got: usize },
    #[error("ustconn2 gate {0}: {1}")]
    Ust(GateId, UstError),
}

/// A circuit; gate identifiers are positions in `gates`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Circuit {
    pub gates: Vec<Gate>,
    pub output: GateId,
    pub input_count: usize,
}

impl Circuit {
    /// Checks fan-ins, acyclicity, inputs and the single sink. Inputs may be
    /// unread; every other gate except the output must be read.
    pub fn new(
        gates: Vec<Gate>,
        output: GateId,
        input_count: usize,
    ) -> Result<Circuit, CircuitError> {
        let c = Circuit {
            gates,
            output,
            input_count,
        };
        c.validate()?;
        Ok(c)
    }

    fn validate(&self) -> Result<(), CircuitError> {
        let n = self.gates.len();
        if self.output as usize >= n {
            return Err(CircuitError::Output(self.output));
        }
        let mut seen_inputs = vec![0usize; self.input_count];
        let mut read = vec![false; n];
        for (g, gate) in self.gates.iter().enumerate() {
            if gate.preds.len() != gate.label.fan_in() {
                return Err(CircuitError::FanIn(
                    g as GateId,
                    gate.preds.len(),
                    gate.label.fan_in(),
                ));
            }
            for &p in &gate.preds {
                if p as usize >= n {
                    return Err(CircuitError::Dangling(g as GateId, p));
                }
                read[p as usize] = true;
            }
            if let Label::Input(i) = gate.label {
                match seen_inputs.get_mut(i as usize) {
                    Some(c) => *c += 1,
                    None => return Err(CircuitError::InputRange(i, self.input_count)),
                }
            }
        }
        if let Some(i) = seen_inputs.iter().position(|&c| c != 1) {
            return Err(CircuitError::Input(i as u32, seen_inputs[i]));
        }
        for (g, gate) in self.gates.iter().enumerate() {
            if !read[g] && g != self.output as usize && !matches!(gate.label, Label::Input(_)) {
                return Err(CircuitError::Dead(g as GateId));
            }
        }
        self.topo_order().map(|_| ())
    }

    /// Gates in an order where every gate follows its predecessors.
    pub fn topo_order(&self) -> Result<Vec<GateId>, CircuitError> {
        let n = self.gates.len();
        let mut indeg: Vec<usize> = self.gates.iter().map(|g| g.preds.len()).collect();
        let mut succ: Vec<Vec<GateId>> = vec![Vec::new(); n];
        for (g, gate) in self.gates.iter().enumerate() {
            for &p in &gate.preds {
                succ[p as usize].push(g as GateId);
            }
        }
        let mut order: Vec<GateId> = (0..n as GateId)
            .filter(|&g| indeg[g as usize] == 0)
            .collect();
        let mut i = 0;
        while i < order.len() {
            let g = order[i];
            i += 1;
            for &s in &succ[g as usize] {
                indeg[s as usize] -= 1;
                if indeg[s as usize] == 0 {
                    order.push(s);
                }
            }
        }
        if order.len() < n {
            let g = (0..n).find(|&g| indeg[g] > 0).unwrap();
            return Err(CircuitError::Cycle(g as GateId));
        }
        Ok(order)
    }

    /// Gate ids for each input index.
    pub fn input_gates(&self) -> Vec<GateId> {
        let mut out = vec![0; self.input_count];
        for (g, gate) in self.gates.iter().enumerate() {
            if let Label::Input(i) = gate.label {
                out[i as usize] = g as GateId;
            }
        }
        out
    }

    /// Number of readers of each gate.
    pub fn fan_out(&self) -> Vec<usize> {
        let mut out = vec![0; self.gates.len()];
        for gate in &self.gates {
            for &p in &gate.preds {
                out[p as usize] += 1;
            }
        }
        out
    }
}

pub fn circuit_size(c: &Circuit) -> usize {
    c.gates.len()
}

/// Length of the longest path from a source (input or constant) to the
/// output.
pub fn circuit_depth(c: &Circuit) -> usize {
    gate_depths(c)[c.output as usize]
}

/// Longest path from a source to each gate.
pub fn gate_depths(c: &Circuit) -> Vec<usize> {
    let order = c.topo_order().expect("validated circuit");
    let mut d = vec![0usize; c.gates.len()];
    for g in order {
        let gate = &c.gates[g as usize];
        if let Some(m) = gate.preds.iter().map(|&p| d[p as usize]).max() {
            d[g as usize] = m + 1;
        }
    }
    d
}

/// A circuit with several outputs, such as one that maps a bit table to the
/// next one. Every gate reads only earlier gates.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MultiCircuit {
    pub gates: Vec<Gate>,
    pub outputs: Vec<GateId>,
    pub input_count: usize,
}

impl MultiCircuit {
    pub fn size(&self) -> usize {
        self.gates.len()
    }

    /// Longest path from a source to any output.
    pub fn depth(&self) -> usize {
        let mut d = vec![0usize; self.gates.len()];
        for (g, gate) in self.gates.iter().enumerate() {
            if let Some(m) = gate.preds.iter().map(|&p| d[p as usize]).max() {
                d[g] = m + 1;
            }
        }
        self.outputs
            .iter()
            .map(|&g| d[g as usize])
            .max()
            .unwrap_or(0)
    }
}
