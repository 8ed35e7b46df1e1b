//! Boolean circuits to proof circuits, gate by gate.
//!
//! Every gate becomes its piece, a gate read by several gates gets a
//! duplication piece on its exit, inputs read several times get one right
//! after the input entry, and constants are instantiated once per reader.

use std::collections::{BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::circuits::{circuit_depth, circuit_size, Circuit, CircuitError, GateId, Label};
use crate::netcore::{End, LinkId, Port};
use crate::pieces::{
    apply_inputs, CircuitBuilder, EntryRef, ExitRef, PieceError, PieceKind, ProofCircuit,
};
use crate::rewrite::{normalize, RewriteError, Strategy};
use crate::typing::{net_depth, TypeError};

/// Additive constant in `target_depth <= 6 * source_depth + DEPTH_C0`.
pub const DEPTH_C0: usize = 3;
/// Constant in `target_size <= SIZE_C1 * source_size^2`.
pub const SIZE_C1: usize = 20;
/// Constants in `rounds <= ROUND_A * target_depth + ROUND_B`.
pub const ROUND_A: usize = 3;
pub const ROUND_B: usize = 2;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum TranslateError {
    #[error("gate {0} ({1}) has no piece")]
    Unsupported(GateId, Label),
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error(transparent)]
    Piece(#[from] PieceError),
    #[error(transparent)]
    Type(#[from] TypeError),
    #[error(transparent)]
    Rewrite(#[from] RewriteError),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TranslationReport {
    pub source_size: usize,
    pub source_depth: usize,
    pub target_size: usize,
    /// depth of the circuit with every input set to 0
    pub target_depth: usize,
    pub garbage_count: usize,
    /// rounds of the default strategy with all inputs 0, then all inputs 1
    pub rounds_to_normalize: Vec<usize>,
}

/// A tuple of the circuit's tuple format, as read by the translator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SourceTuple {
    Label(GateId),
    /// one-based predecessor slot
    Pred(GateId, u32),
}

/// A translation together with which source tuples each piece was built
/// from.
#[derive(Clone, Debug)]
pub struct Translation {
    pub circuit: ProofCircuit,
    /// the piece that created each link; `None` for links added on sealing
    pub link_piece: Vec<Option<usize>>,
    pub piece_reads: Vec<BTreeSet<SourceTuple>>,
}

enum Outlet {
    Exit(ExitRef),
    Input(usize),
    Const(bool, GateId),
}

struct Source<'a> {
    c: &'a Circuit,
    consumers: Vec<Vec<(GateId, u32)>>,
    log: BTreeSet<SourceTuple>,
}

impl Source<'_> {
    fn label(&mut self, g: GateId) -> Label {
        self.log.insert(SourceTuple::Label(g));
        self.c.gates[g as usize].label
    }

    fn pred(&mut self, g: GateId, slot: usize) -> GateId {
        self.log.insert(SourceTuple::Pred(g, slot as u32 + 1));
        self.c.gates[g as usize].preds[slot]
    }

    fn readers(&mut self, g: GateId) -> usize {
        for &(s, j) in &self.consumers[g as usize] {
            self.log.insert(SourceTuple::Pred(s, j));
        }
        self.consumers[g as usize].len()
    }

    fn take(&mut self) -> BTreeSet<SourceTuple> {
        std::mem::take(&mut self.log)
    }
}

struct Tr<'a> {
    src: Source<'a>,
    cb: CircuitBuilder,
    link_piece: Vec<Option<usize>>,
    piece_reads: Vec<BTreeSet<SourceTuple>>,
    outlets: Vec<VecDeque<Outlet>>,
    input_entries: Vec<Option<EntryRef>>,
}

impl Tr<'_> {
    fn add(&mut self, kind: PieceKind, reads: BTreeSet<SourceTuple>) -> Result<usize, PieceError> {
        let p = self.cb.add_piece(kind)?;
        self.link_piece.resize(self.cb.link_count(), Some(p));
        self.piece_reads.push(reads);
        Ok(p)
    }

    fn constant(
        &mut self,
        b: bool,
        g: GateId,
        extra: Option<SourceTuple>,
    ) -> Result<ExitRef, PieceError> {
        let mut reads: BTreeSet<SourceTuple> = [SourceTuple::Label(g)].into();
        reads.extend(extra);
        let p = self.add(if b { PieceKind::B1 } else { PieceKind::B0 }, reads)?;
        Ok(ExitRef { piece: p, index: 0 })
    }

    /// Feeds the next outlet of `pred` into entry `slot` of piece `p`.
    fn feed(&mut self, pred: GateId, p: usize, g: GateId, slot: usize) -> Result<(), PieceError> {
        let to = EntryRef {
            piece: p,
            index: slot,
        };
        match self.outlets[pred as usize]
            .pop_front()
            .expect("one outlet per reader")
        {
            Outlet::Exit(x) => self.cb.compose(x, to),
            Outlet::Input(i) => {
                self.input_entries[i] = Some(to);
                Ok(())
            }
            Outlet::Const(b, c) => {
                let x = self.constant(b, c, Some(SourceTuple::Pred(g, slot as u32 + 1)))?;
                self.cb.compose(x, to)
            }
        }
    }

    /// Outlets for a value leaving `exit` that is read `k` times.
    fn fan_out(
        &mut self,
        exit: Option<ExitRef>,
        input: Option<usize>,
        k: usize,
    ) -> Result<VecDeque<Outlet>, PieceError> {
        if k <= 1 {
            return Ok(match (exit, input) {
                (Some(x), _) => [Outlet::Exit(x)].into(),
                (None, Some(i)) => [Outlet::Input(i)].into(),
                _ => unreachable!(),
            });
        }
        let reads = self.src.take();
        let d = self.add(PieceKind::Dupl(k as u32), reads)?;
        let entry = EntryRef { piece: d, index: 0 };
        match (exit, input) {
            (Some(x), _) => self.cb.compose(x, entry)?,
            (None, Some(i)) => self.input_entries[i] = Some(entry),
            _ => unreachable!(),
        }
        Ok((0..k)
            .map(|j| Outlet::Exit(ExitRef { piece: d, index: j }))
            .collect())
    }
}

/// Translates with the bookkeeping needed to check locality.
pub fn translate_traced(c: &Circuit) -> Result<Translation, TranslateError> {
    let order = c.topo_order()?;
    let mut consumers = vec![Vec::new(); c.gates.len()];
    for (g, gate) in c.gates.iter().enumerate() {
        for (j, &p) in gate.preds.iter().enumerate() {
            consumers[p as usize].push((g as GateId, j as u32 + 1));
        }
    }
    let mut tr = Tr {
        src: Source {
            c,
            consumers,
            log: BTreeSet::new(),
        },
        cb: CircuitBuilder::new(),
        link_piece: Vec::new(),
        piece_reads: Vec::new(),
        outlets: (0..c.gates.len()).map(|_| VecDeque::new()).collect(),
        input_entries: vec![None; c.input_count],
    };
    for g in order {
        let label = tr.src.label(g);
        let is_output = g == c.output;
        match label {
            Label::Input(i) => {
                let k = tr.src.readers(g);
                if k == 0 {
                    // unread or the output itself: route through a dupl1
                    let reads = tr.src.take();
                    let d = tr.add(PieceKind::Dupl(1), reads)?;
                    tr.input_entries[i as usize] = Some(EntryRef { piece: d, index: 0 });
                    let x = ExitRef { piece: d, index: 0 };
                    if is_output {
                        tr.outlets[g as usize].push_back(Outlet::Exit(x));
                    } else {
                        tr.cb.discard(x)?;
                    }
                } else {
                    let outs = tr.fan_out(None, Some(i as usize), k)?;
                    tr.src.take();
                    tr.outlets[g as usize] = outs;
                }
            }
            Label::Const(b) => {
                let k = tr.src.readers(g).max(1);
                tr.src.take();
                tr.outlets[g as usize] = (0..k).map(|_| Outlet::Const(b, g)).collect();
            }
            Label::Not | Label::And(_) | Label::Or(_) => {
                let kind = match label {
                    Label::Not => PieceKind::Neg,
                    Label::And(k) => PieceKind::Conj(k),
                    _ => PieceKind::Disj(label.fan_in() as u32),
                };
                let preds: Vec<GateId> = (0..label.fan_in()).map(|j| tr.src.pred(g, j)).collect();
                let reads = tr.src.take();
                let p = tr.add(kind, reads)?;
                for (j, &pred) in preds.iter().enumerate() {
                    tr.feed(pred, p, g, j)?;
                }
                tr.src.label(g);
                let k = tr.src.readers(g);
                let outs = tr.fan_out(Some(ExitRef { piece: p, index: 0 }), None, k)?;
                tr.src.take();
                tr.outlets[g as usize] = outs;
            }
            Label::UstConn2(_) => return Err(TranslateError::Unsupported(g, label)),
        }
    }
    if let Some(Outlet::Const(b, g)) = tr.outlets[c.output as usize].front() {
        let (b, g) = (*b, *g);
        tr.constant(b, g, None)?;
    }
    let inputs: Vec<EntryRef> = tr
        .input_entries
        .iter()
        .map(|e| e.expect("every input has an entry"))
        .collect();
    let circuit = tr.cb.seal(&inputs)?;
    let mut link_piece = tr.link_piece;
    link_piece.resize(circuit.net.len(), None);
    Ok(Translation {
        circuit,
        link_piece,
        piece_reads: tr.piece_reads,
    })
}

pub fn translate_circuit(c: &Circuit) -> Result<ProofCircuit, TranslateError> {
    Ok(translate_traced(c)?.circuit)
}

/// Translates and measures the result.
pub fn translate(c: &Circuit) -> Result<(ProofCircuit, TranslationReport), TranslateError> {
    let pc = translate_circuit(c)?;
    let zeros = apply_inputs(&pc, &vec![false; c.input_count])?;
    let ones = apply_inputs(&pc, &vec![true; c.input_count])?;
    let target_depth = net_depth(&zeros)?;
    let mut rounds = Vec::new();
    for net in [&zeros, &ones] {
        rounds.push(normalize(net, Strategy::Tam)?.1.total_rounds);
    }
    let report = TranslationReport {
        source_size: circuit_size(c),
        source_depth: circuit_depth(c),
        target_size: pc.net.len(),
        target_depth,
        garbage_count: pc.garbage.len(),
        rounds_to_normalize: rounds,
    };
    Ok((pc, report))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundsCheck {
    pub passed: bool,
    pub details: Vec<String>,
}

/// Checks the depth, size and round bounds on a report.
pub fn check_bounds(r: &TranslationReport) -> BoundsCheck {
    let mut details = Vec::new();
    let mut passed = true;
    let mut check = |ok: bool, what: String| {
        passed &= ok;
        details.push(format!("{} {what}", if ok { "ok" } else { "FAIL" }));
    };
    let depth_bound = 6 * r.source_depth + DEPTH_C0;
    check(
        r.target_depth <= depth_bound,
        format!(
            "depth {} <= 6*{} + {DEPTH_C0} = {depth_bound}",
            r.target_depth, r.source_depth
        ),
    );
    let size_bound = SIZE_C1 * r.source_size * r.source_size;
    check(
        r.target_size <= size_bound,
        format!(
            "size {} <= {SIZE_C1}*{}^2 = {size_bound}",
            r.target_size, r.source_size
        ),
    );
    let round_bound = ROUND_A * r.target_depth + ROUND_B;
    for &k in &r.rounds_to_normalize {
        check(
            k <= round_bound,
            format!(
                "rounds {k} <= {ROUND_A}*{} + {ROUND_B} = {round_bound}",
                r.target_depth
            ),
        );
    }
    BoundsCheck { passed, details }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Locality {
    /// most source tuples any output tuple depends on
    pub max_reads: usize,
    /// output tuples considered
    pub tuples: usize,
    /// tuples touching links added on sealing, which depend on the garbage
    /// count of the whole circuit and are left out
    pub sealing_tuples: usize,
}

/// Measures, over the tuples of the translated net, how many source tuples
/// each one was computed from.
pub fn locality(c: &Circuit, t: &Translation) -> Locality {
    let net = &t.circuit.net;
    let input_gates = c.input_gates();
    let mut out = Locality {
        max_reads: 0,
        tuples: 0,
        sealing_tuples: 0,
    };
    let mut tuple = |links: &[LinkId], extra: Option<SourceTuple>| {
        let mut reads: BTreeSet<SourceTuple> = extra.into_iter().collect();
        for &l in links {
            match t.link_piece[l as usize] {
                Some(p) => reads.extend(&t.piece_reads[p]),
                None => {
                    out.sealing_tuples += 1;
                    return;
                }
            }
        }
        out.tuples += 1;
        out.max_reads = out.max_reads.max(reads.len());
    };
    for l in net.link_ids() {
        tuple(&[l], None);
        for i in 1..=net.sort(l).arity() {
            if let End::Port(q) = net.peer(Port::new(l, i)) {
                tuple(&[l, q.link], None);
            }
        }
    }
    for (a, b) in net.cuts() {
        tuple(&[a.link, b.link], None);
    }
    for (k, p) in net.conclusions().iter().enumerate() {
        let extra = input_gates.get(k).map(|&g| SourceTuple::Label(g));
        tuple(&[p.link], extra);
    }
    out
}
