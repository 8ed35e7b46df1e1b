use serde::{Deserialize, Serialize};

use super::{build_piece, build_value, PieceEnds, PieceError, PieceKind};
use crate::netcore::{End, LinkId, LinkSort, NetBuilder, Port, ProofNet};

pub type PieceId = usize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EntryRef {
    pub piece: PieceId,
    pub index: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ExitRef {
    pub piece: PieceId,
    pub index: usize,
}

/// A piece as it sits inside a proof circuit.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlacedPiece {
    pub kind: PieceKind,
    pub ends: PieceEnds,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum ExitUse {
    Free,
    Wired,
    Discarded,
}

/// Assembles pieces into a proof circuit. Exits are cut against entries,
/// unused exits are discarded into the garbage, and `seal` closes the
/// circuit with the result tensor.
#[derive(Clone, Debug, Default)]
pub struct CircuitBuilder {
    b: NetBuilder,
    pieces: Vec<PlacedPiece>,
    entry_wired: Vec<Vec<bool>>,
    exit_use: Vec<Vec<ExitUse>>,
    succ: Vec<Vec<PieceId>>,
}

impl CircuitBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn pieces(&self) -> &[PlacedPiece] {
        &self.pieces
    }

    /// Links created so far.
    pub fn link_count(&self) -> usize {
        self.b.len()
    }

    pub fn add_piece(&mut self, kind: PieceKind) -> Result<PieceId, PieceError> {
        let ends = build_piece(&mut self.b, kind)?;
        self.entry_wired.push(vec![false; ends.entries.len()]);
        self.exit_use.push(vec![ExitUse::Free; ends.exits.len()]);
        self.succ.push(Vec::new());
        self.pieces.push(PlacedPiece { kind, ends });
        Ok(self.pieces.len() - 1)
    }

    fn reaches(&self, from: PieceId, to: PieceId) -> bool {
        let mut seen = vec![false; self.pieces.len()];
        let mut stack = vec![from];
        while let Some(p) = stack.pop() {
            if p == to {
                return true;
            }
            if !std::mem::replace(&mut seen[p], true) {
                stack.extend(&self.succ[p]);
            }
        }
        false
    }

    fn exit_slot(&self, x: ExitRef) -> Result<ExitUse, PieceError> {
        self.exit_use
            .get(x.piece)
            .and_then(|v| v.get(x.index))
            .copied()
            .ok_or(PieceError::NoExit(x.piece, x.index))
    }

    /// Cuts exit `from` against entry `to`.
    pub fn compose(&mut self, from: ExitRef, to: EntryRef) -> Result<(), PieceError> {
        if self.exit_slot(from)? != ExitUse::Free {
            return Err(PieceError::ExitTaken(from.piece, from.index));
        }
        let wired = self
            .entry_wired
            .get(to.piece)
            .and_then(|v| v.get(to.index))
            .copied()
            .ok_or(PieceError::NoEntry(to.piece, to.index))?;
        if wired {
            return Err(PieceError::EntryTaken(to.piece, to.index));
        }
        if self.reaches(to.piece, from.piece) {
            return Err(PieceError::Loop(from.piece, to.piece));
        }
        let x = self.pieces[from.piece].ends.exits[from.index];
        let e = self.pieces[to.piece].ends.entries[to.index];
        self.b.connect(x, e);
        self.exit_use[from.piece][from.index] = ExitUse::Wired;
        self.entry_wired[to.piece][to.index] = true;
        self.succ[from.piece].push(to.piece);
        Ok(())
    }

    /// Sends an exit to the result tensor.
    pub fn discard(&mut self, x: ExitRef) -> Result<(), PieceError> {
        if self.exit_slot(x)? != ExitUse::Free {
            return Err(PieceError::ExitTaken(x.piece, x.index));
        }
        self.exit_use[x.piece][x.index] = ExitUse::Discarded;
        Ok(())
    }

    /// Closes the circuit. `inputs` lists the unconnected entries in the
    /// order they become conclusions; the single free exit is the output.
    /// A circuit without garbage gets a `dupl1` on its output so that the
    /// result tensor always has garbage.
    pub fn seal(mut self, inputs: &[EntryRef]) -> Result<ProofCircuit, PieceError> {
        let mut listed: Vec<Vec<bool>> = self.entry_wired.clone();
        for e in inputs {
            match listed.get_mut(e.piece).and_then(|v| v.get_mut(e.index)) {
                None => return Err(PieceError::NoEntry(e.piece, e.index)),
                Some(true) => return Err(PieceError::BadInput(e.piece, e.index)),
                Some(slot) => *slot = true,
            }
        }
        for (p, v) in listed.iter().enumerate() {
            if let Some(i) = v.iter().position(|&w| !w) {
                return Err(PieceError::LooseEntry(p, i));
            }
        }
        let free: Vec<ExitRef> = self
            .exit_use
            .iter()
            .enumerate()
            .flat_map(|(p, v)| {
                v.iter()
                    .enumerate()
                    .filter(|(_, &u)| u == ExitUse::Free)
                    .map(move |(i, _)| ExitRef { piece: p, index: i })
            })
            .collect();
        if free.len() != 1 {
            return Err(PieceError::Exits(free.len()));
        }
        let mut out = free[0];
        let has_garbage = self.pieces.iter().any(|p| !p.ends.garbage.is_empty())
            || self
                .exit_use
                .iter()
                .flatten()
                .any(|&u| u == ExitUse::Discarded);
        if !has_garbage {
            let d = self.add_piece(PieceKind::Dupl(1))?;
            self.compose(out, EntryRef { piece: d, index: 0 })?;
            out = ExitRef { piece: d, index: 0 };
        }
        let mut garbage = Vec::new();
        for (p, piece) in self.pieces.iter().enumerate() {
            garbage.extend(&piece.ends.garbage);
            for (i, &u) in self.exit_use[p].iter().enumerate() {
                if u == ExitUse::Discarded {
                    garbage.push(piece.ends.exits[i]);
                }
            }
        }
        let output = self.pieces[out.piece].ends.exits[out.index];
        let mut b = self.b;
        let r = b.tensor(1 + garbage.len() as u32);
        b.connect(Port::new(r, 1), output);
        for (i, &g) in garbage.iter().enumerate() {
            b.connect(Port::new(r, i as u32 + 2), g);
        }
        let input_ports: Vec<Port> = inputs
            .iter()
            .map(|e| self.pieces[e.piece].ends.entries[e.index])
            .collect();
        for &p in &input_ports {
            b.conclude(p);
        }
        b.conclude(Port::principal(r));
        Ok(ProofCircuit {
            net: b.build(),
            inputs: input_ports,
            result_tensor: r,
            output,
            garbage,
            pieces: self.pieces,
        })
    }
}

/// A sealed circuit: its conclusions are the input entries followed by the
/// principal port of the result tensor, which is always the last link.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProofCircuit {
    pub net: ProofNet,
    pub inputs: Vec<Port>,
    pub result_tensor: LinkId,
    /// the exit wired to the first premise of the result tensor
    pub output: Port,
    pub garbage: Vec<Port>,
    pub pieces: Vec<PlacedPiece>,
}

impl ProofCircuit {
    pub fn input_count(&self) -> usize {
        self.inputs.len()
    }

    /// Reads a proof circuit back from its net: the last conclusion is the
    /// result tensor and the others are the inputs. The pieces are not
    /// recovered.
    pub fn from_net(net: ProofNet) -> Result<ProofCircuit, PieceError> {
        let bad = |m: &str| PieceError::NotACircuit(m.to_string());
        let (&root, inputs) = net
            .conclusions()
            .split_last()
            .ok_or_else(|| bad("no conclusions"))?;
        let arity = match net.sort(root.link) {
            LinkSort::Tensor(n) if root.index == 0 && n >= 1 => n,
            _ => return Err(bad("last conclusion is not a tensor")),
        };
        if inputs.iter().any(|&p| !net.is_principal(p)) {
            return Err(bad("an input is not a principal port"));
        }
        let mut ends = Vec::new();
        for i in 1..=arity {
            match net.peer(Port::new(root.link, i)) {
                End::Port(q) => ends.push(q),
                _ => return Err(bad("result tensor premise is not wired to a link")),
            }
        }
        Ok(ProofCircuit {
            inputs: inputs.to_vec(),
            result_tensor: root.link,
            output: ends[0],
            garbage: ends[1..].to_vec(),
            pieces: Vec::new(),
            net,
        })
    }

    /// The net without its result tensor; conclusions are the inputs, the
    /// output and the garbage, in that order.
    fn strip(&self) -> ProofNet {
        let mut b = NetBuilder::new();
        let ports = b.import(&self.net);
        let mut links = b.build().links().to_vec();
        links.pop();
        let mut out = NetBuilder::from_net(ProofNet::from_raw(links, Vec::new()));
        for &p in &ports[..self.inputs.len()] {
            out.conclude(p);
        }
        out.conclude(self.output);
        for &g in &self.garbage {
            out.conclude(g);
        }
        out.build()
    }
}

fn shift_port(p: Port, by: LinkId) -> Port {
    Port::new(p.link + by, p.index)
}

fn shift_piece(p: &PlacedPiece, by: LinkId) -> PlacedPiece {
    let s = |v: &[Port]| v.iter().map(|&q| shift_port(q, by)).collect();
    PlacedPiece {
        kind: p.kind,
        ends: PieceEnds {
            entries: s(&p.ends.entries),
            exits: s(&p.ends.exits),
            garbage: s(&p.ends.garbage),
        },
    }
}

/// Feeds the output of `c1` into input `k` of `c2`. The inputs of `c1` take
/// the place of input `k`; the garbage of both is collected by one new
/// result tensor.
pub fn compose_circuits(
    c1: &ProofCircuit,
    c2: &ProofCircuit,
    k: usize,
) -> Result<ProofCircuit, PieceError> {
    if k >= c2.inputs.len() {
        return Err(PieceError::InputIndex(k));
    }
    let (s1, s2) = (c1.strip(), c2.strip());
    let mut b = NetBuilder::new();
    let p2 = b.import(&s2);
    let off = b.len() as LinkId;
    let p1 = b.import(&s1);
    let (n1, n2) = (c1.inputs.len(), c2.inputs.len());
    b.connect(p1[n1], p2[k]);
    let garbage: Vec<Port> = p2[n2 + 1..].iter().chain(&p1[n1 + 1..]).copied().collect();
    let output = p2[n2];
    let r = b.tensor(1 + garbage.len() as u32);
    b.connect(Port::new(r, 1), output);
    for (i, &g) in garbage.iter().enumerate() {
        b.connect(Port::new(r, i as u32 + 2), g);
    }
    let inputs: Vec<Port> = p2[..k]
        .iter()
        .chain(&p1[..n1])
        .chain(&p2[k + 1..n2])
        .copied()
        .collect();
    for &p in &inputs {
        b.conclude(p);
    }
    b.conclude(Port::principal(r));
    let mut pieces = c2.pieces.clone();
    pieces.extend(c1.pieces.iter().map(|p| shift_piece(p, off)));
    Ok(ProofCircuit {
        net: b.build(),
        inputs,
        result_tensor: r,
        output,
        garbage,
        pieces,
    })
}

/// Cuts a Boolean value against every input. The values are appended after
/// the circuit's links, so link identifiers of the circuit are unchanged;
/// the only conclusion is the result tensor.
pub fn apply_inputs(c: &ProofCircuit, bits: &[bool]) -> Result<ProofNet, PieceError> {
    if bits.len() != c.inputs.len() {
        return Err(PieceError::InputLength {
            expected: c.inputs.len(),
            got: bits.len(),
        });
    }
    let mut b = NetBuilder::new();
    let ports = b.import(&c.net);
    for (&bit, &p) in bits.iter().zip(&ports) {
        let v = build_value(&mut b, bit);
        b.connect(v, p);
    }
    b.conclude(*ports.last().expect("result tensor"));
    Ok(b.build())
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ReadError {
    #[error("net has no conclusions")]
    NoConclusion,
    #[error("last conclusion is not a tensor with at least one premise")]
    NoResultTensor,
    #[error("the first premise of the result tensor is not a Boolean value")]
    NotAValue,
    #[error("net still has cuts")]
    NotCutFree,
}

/// Reads the Boolean on the first premise of the result tensor of a
/// cut-free net: 1 when the first premise of the value's par leads to the
/// first premise of its tensor, 0 when it leads to the second.
pub fn read_result(net: &ProofNet) -> Result<bool, ReadError> {
    if !net.is_cut_free() {
        return Err(ReadError::NotCutFree);
    }
    let root = *net.conclusions().last().ok_or(ReadError::NoConclusion)?;
    if root.index != 0 || !matches!(net.sort(root.link), LinkSort::Tensor(n) if n >= 1) {
        return Err(ReadError::NoResultTensor);
    }
    let port_at = |p: Port| net.peer(p).port().ok_or(ReadError::NotAValue);
    let v = port_at(Port::new(root.link, 1))?;
    if v.index != 0 || net.sort(v.link) != LinkSort::Par(3) {
        return Err(ReadError::NotAValue);
    }
    let t = port_at(Port::new(v.link, 3))?;
    if t.index != 0 || net.sort(t.link) != LinkSort::Tensor(2) {
        return Err(ReadError::NotAValue);
    }
    let first = port_at(Port::new(v.link, 1))?;
    // walk from the first premise of the par, never crossing the par or the
    // tensor, and see which premise of the tensor is reached
    let mut seen = vec![false; net.len()];
    seen[v.link as usize] = true;
    seen[t.link as usize] = true;
    let mut hit = [false; 2];
    let mut stack = vec![first.link];
    seen[first.link as usize] = true;
    while let Some(l) = stack.pop() {
        for i in 0..net.sort(l).port_count() as u32 {
            let Some(q) = net.peer(Port::new(l, i)).port() else {
                continue;
            };
            if q.link == t.link && (q.index == 1 || q.index == 2) {
                hit[q.index as usize - 1] = true;
            } else if !seen[q.link as usize] {
                seen[q.link as usize] = true;
                stack.push(q.link);
            }
        }
    }
    match hit {
        [true, false] => Ok(true),
        [false, true] => Ok(false),
        _ => Err(ReadError::NotAValue),
    }
}
