//! The piece library and proof circuits built from it.
//!
//! Every piece is assembled from two ingredients: the Boolean values `b0` and
//! `b1`, and the conditional, a `tensor3` entry whose first premise is a
//! `par2` over an output axiom and a garbage axiom. Cut against a value, the
//! conditional sends its second premise to the output when the value is
//! `b1` and its third premise otherwise; the other premise ends up as
//! garbage.

mod circuit;

pub use circuit::{
    apply_inputs, compose_circuits, read_result, CircuitBuilder, EntryRef, ExitRef, PieceId,
    PlacedPiece, ProofCircuit, ReadError,
};

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::netcore::{LinkId, NetBuilder, Port, ProofNet};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PieceKind {
    B0,
    B1,
    Neg,
    Dupl(u32),
    Disj(u32),
    Conj(u32),
}

impl PieceKind {
    pub fn entry_count(self) -> usize {
        match self {
            PieceKind::B0 | PieceKind::B1 => 0,
            PieceKind::Neg | PieceKind::Dupl(_) => 1,
            PieceKind::Disj(n) | PieceKind::Conj(n) => n as usize,
        }
    }

    pub fn exit_count(self) -> usize {
        match self {
            PieceKind::Dupl(n) => n as usize,
            _ => 1,
        }
    }

    pub fn check(self) -> Result<(), PieceError> {
        match self {
            PieceKind::Dupl(0) => Err(PieceError::Arity(self)),
            PieceKind::Disj(n) | PieceKind::Conj(n) if n < 2 => Err(PieceError::Arity(self)),
            _ => Ok(()),
        }
    }
}

impl fmt::Display for PieceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PieceKind::B0 => write!(f, "b0"),
            PieceKind::B1 => write!(f, "b1"),
            PieceKind::Neg => write!(f, "neg"),
            PieceKind::Dupl(n) => write!(f, "dupl{n}"),
            PieceKind::Disj(n) => write!(f, "disj{n}"),
            PieceKind::Conj(n) => write!(f, "conj{n}"),
        }
    }
}

impl FromStr for PieceKind {
    type Err = PieceError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || PieceError::Unknown(s.to_string());
        let kind = match s {
            "b0" => PieceKind::B0,
            "b1" => PieceKind::B1,
            "neg" => PieceKind::Neg,
            _ => {
                let split = s.find(|c: char| c.is_ascii_digit()).ok_or_else(bad)?;
                let n: u32 = s[split..].parse().map_err(|_| bad())?;
                match &s[..split] {
                    "dupl" => PieceKind::Dupl(n),
                    "disj" => PieceKind::Disj(n),
                    "conj" => PieceKind::Conj(n),
                    _ => return Err(bad()),
                }
            }
        };
        kind.check()?;
        Ok(kind)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum PieceError {
    #[error("{0} is outside the supported arities")]
    Arity(PieceKind),
    #[error("unknown piece '{0}'")]
    Unknown(String),
    #[error("piece {0} has no entry {1}")]
    NoEntry(usize, usize),
    #[error("piece {0} has no exit {1}")]
    NoExit(usize, usize),
    #[error("entry {1} of piece {0} is already connected")]
    EntryTaken(usize, usize),
    #[error("exit {1} of piece {0} is already connected")]
    ExitTaken(usize, usize),
    #[error("connecting piece {0} to piece {1} would create a loop")]
    Loop(usize, usize),
    #[error("expected exactly one unconnected exit, found {0}")]
    Exits(usize),
    #[error("entry {1} of piece {0} is neither connected nor an input")]
    LooseEntry(usize, usize),
    #[error("input list names entry {1} of piece {0} twice or names a connected entry")]
    BadInput(usize, usize),
    #[error("input index {0} out of range")]
    InputIndex(usize),
    #[error("expected {expected} input bits, got {got}")]
    InputLength { expected: usize, got: usize },
    #[error("net is not a proof circuit: {0}")]
    NotACircuit(String),
}

/// The dangling ends of a piece inside a larger net.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PieceEnds {
    /// principal ports to be cut against incoming values
    pub entries: Vec<Port>,
    /// principal ports carrying outgoing values
    pub exits: Vec<Port>,
    /// ports bound for the result tensor
    pub garbage: Vec<Port>,
}

/// A piece on its own: a net whose conclusions are its entries, then its
/// exits, then its garbage.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Piece {
    pub kind: PieceKind,
    pub net: ProofNet,
    pub ends: PieceEnds,
}

impl Piece {
    pub fn garbage_count(&self) -> usize {
        self.ends.garbage.len()
    }

    /// The piece with all its exits and garbage gathered by one tensor, the
    /// way a proof circuit would eventually collect them.
    pub fn closure(&self) -> ProofNet {
        let mut b = NetBuilder::new();
        let ports = b.import(&self.net);
        let (entries, rest) = ports.split_at(self.ends.entries.len());
        for &e in entries {
            b.conclude(e);
        }
        if rest.len() == 1 {
            b.conclude(rest[0]);
        } else {
            let t = b.tensor(rest.len() as u32);
            for (i, &p) in rest.iter().enumerate() {
                b.connect(Port::new(t, i as u32 + 1), p);
            }
            b.conclude(Port::principal(t));
        }
        b.build()
    }
}

/// `b0` or `b1`; returns the exit, the principal port of the `par3`.
pub fn build_value(b: &mut NetBuilder, bit: bool) -> Port {
    let v = b.par(3);
    let t = b.tensor(2);
    let (ap, aq) = (b.ax(), b.ax());
    b.connect(Port::new(ap, 0), Port::new(t, 1));
    b.connect(Port::new(aq, 0), Port::new(t, 2));
    b.connect(Port::new(v, 3), Port::principal(t));
    let (first, second) = if bit { (ap, aq) } else { (aq, ap) };
    b.connect(Port::new(v, 1), Port::new(first, 1));
    b.connect(Port::new(v, 2), Port::new(second, 1));
    Port::principal(v)
}

struct Conditional {
    entry: Port,
    /// premise taken when the selector is 1
    if1: Port,
    /// premise taken when the selector is 0
    if0: Port,
    out: Port,
    garbage: Port,
}

fn build_conditional(b: &mut NetBuilder) -> Conditional {
    let c = b.tensor(3);
    let q = b.par(2);
    let (o, g) = (b.ax(), b.ax());
    b.connect(Port::new(c, 1), Port::principal(q));
    b.connect(Port::new(q, 1), Port::new(o, 0));
    b.connect(Port::new(q, 2), Port::new(g, 0));
    Conditional {
        entry: Port::principal(c),
        if1: Port::new(c, 2),
        if0: Port::new(c, 3),
        out: Port::new(o, 1),
        garbage: Port::new(g, 1),
    }
}

fn build_neg(b: &mut NetBuilder) -> PieceEnds {
    let e = b.tensor(3);
    let p = b.par(2);
    let x = b.par(3);
    let t = b.tensor(2);
    let a: Vec<LinkId> = (0..4).map(|_| b.ax()).collect();
    b.connect(Port::new(e, 1), Port::principal(p));
    b.connect(Port::new(e, 3), Port::new(a[0], 0));
    b.connect(Port::new(x, 2), Port::new(a[0], 1));
    b.connect(Port::new(e, 2), Port::new(a[1], 0));
    b.connect(Port::new(x, 1), Port::new(a[1], 1));
    b.connect(Port::new(p, 1), Port::new(a[2], 0));
    b.connect(Port::new(t, 2), Port::new(a[2], 1));
    b.connect(Port::new(p, 2), Port::new(a[3], 0));
    b.connect(Port::new(t, 1), Port::new(a[3], 1));
    b.connect(Port::new(x, 3), Port::principal(t));
    PieceEnds {
        entries: vec![Port::principal(e)],
        exits: vec![Port::principal(x)],
        garbage: vec![],
    }
}

fn build_dupl(b: &mut NetBuilder, n: u32) -> PieceEnds {
    let c = build_conditional(b);
    if n == 1 {
        let one = build_value(b, true);
        let zero = build_value(b, false);
        b.connect(c.if1, one);
        b.connect(c.if0, zero);
        return PieceEnds {
            entries: vec![c.entry],
            exits: vec![c.out],
            garbage: vec![c.garbage],
        };
    }
    // the output axiom is replaced by a par splitting the selected tuple
    let out_ax = c.out.link;
    let q_port = b.peer(Port::new(out_ax, 0)).port().expect("wired");
    let splitter = b.par(n);
    b.connect(q_port, Port::principal(splitter));
    let mut exits = Vec::with_capacity(n as usize);
    for i in 1..=n {
        let ax = if i == 1 { out_ax } else { b.ax() };
        b.connect(Port::new(splitter, i), Port::new(ax, 0));
        exits.push(Port::new(ax, 1));
    }
    for (bit, port) in [(true, c.if1), (false, c.if0)] {
        let t = b.tensor(n);
        for i in 1..=n {
            let v = build_value(b, bit);
            b.connect(Port::new(t, i), v);
        }
        b.connect(port, Port::principal(t));
    }
    PieceEnds {
        entries: vec![c.entry],
        exits,
        garbage: vec![c.garbage],
    }
}

/// Conjunction (`absorbing = false`) or disjunction (`absorbing = true`) of
/// `n` entries as a chain of conditionals. Conditional `k` selects on entry
/// `k`; on the absorbing value it outputs that constant, otherwise the
/// result of the rest of the chain. The last entry goes straight through an
/// axiom into the last conditional.
fn build_chain(b: &mut NetBuilder, n: u32, absorbing: bool) -> PieceEnds {
    let conds: Vec<Conditional> = (0..n - 1).map(|_| build_conditional(b)).collect();
    let last = b.ax();
    let mut garbage = Vec::new();
    for (k, c) in conds.iter().enumerate() {
        let rest = match conds.get(k + 1) {
            Some(next) => next.out,
            None => Port::new(last, 0),
        };
        let constant = build_value(b, absorbing);
        let (if1, if0) = if absorbing {
            (constant, rest)
        } else {
            (rest, constant)
        };
        b.connect(c.if1, if1);
        b.connect(c.if0, if0);
        garbage.push(c.garbage);
    }
    let mut entries: Vec<Port> = conds.iter().map(|c| c.entry).collect();
    entries.push(Port::new(last, 1));
    PieceEnds {
        entries,
        exits: vec![conds[0].out],
        garbage,
    }
}

/// Adds a piece to `b` and returns its ends.
pub fn build_piece(b: &mut NetBuilder, kind: PieceKind) -> Result<PieceEnds, PieceError> {
    kind.check()?;
    Ok(match kind {
        PieceKind::B0 | PieceKind::B1 => PieceEnds {
            entries: vec![],
            exits: vec![build_value(b, kind == PieceKind::B1)],
            garbage: vec![],
        },
        PieceKind::Neg => build_neg(b),
        PieceKind::Dupl(n) => build_dupl(b, n),
        PieceKind::Conj(n) => build_chain(b, n, false),
        PieceKind::Disj(n) => build_chain(b, n, true),
    })
}

pub fn make_piece(kind: PieceKind) -> Result<Piece, PieceError> {
    let mut b = NetBuilder::new();
    let ends = build_piece(&mut b, kind)?;
    for &p in ends.entries.iter().chain(&ends.exits).chain(&ends.garbage) {
        b.conclude(p);
    }
    Ok(Piece {
        kind,
        net: b.build(),
        ends,
    })
}

/// Links of a piece with fan-in or fan-out `n` are at most
/// `PIECE_SIZE_SLOPE * n + PIECE_SIZE_OFFSET`.
pub const PIECE_SIZE_SLOPE: usize = 9;
pub const PIECE_SIZE_OFFSET: usize = 6;

/// Every piece kind with fan-in and fan-out at most `max_arity`.
pub fn catalogue_kinds(max_arity: u32) -> Vec<PieceKind> {
    let mut kinds = vec![PieceKind::B0, PieceKind::B1, PieceKind::Neg];
    kinds.extend((1..=max_arity).map(PieceKind::Dupl));
    kinds.extend((2..=max_arity).map(PieceKind::Disj));
    kinds.extend((2..=max_arity).map(PieceKind::Conj));
    kinds
}

/// One line per piece: `piece <kind> entries=<i> exits=<j> garbage=<k> links=<n>`.
pub fn catalogue(max_arity: u32) -> String {
    let mut out = String::new();
    for k in catalogue_kinds(max_arity) {
        let p = make_piece(k).expect("arity in range");
        out.push_str(&format!(
            "piece {k} entries={} exits={} garbage={} links={}\n",
            p.ends.entries.len(),
            p.ends.exits.len(),
            p.ends.garbage.len(),
            p.net.len()
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kinds_round_trip_through_text() {
        for k in catalogue_kinds(4) {
            assert_eq!(k.to_string().parse::<PieceKind>(), Ok(k));
        }
        assert!("conj1".parse::<PieceKind>().is_err());
        assert!("xor2".parse::<PieceKind>().is_err());
    }

    #[test]
    fn end_counts() {
        assert_eq!(
            (PieceKind::B1.entry_count(), PieceKind::B1.exit_count()),
            (0, 1)
        );
        assert_eq!(
            (PieceKind::Neg.entry_count(), PieceKind::Neg.exit_count()),
            (1, 1)
        );
        assert_eq!(
            (
                PieceKind::Dupl(3).entry_count(),
                PieceKind::Dupl(3).exit_count()
            ),
            (1, 3)
        );
        assert_eq!(
            (
                PieceKind::Conj(3).entry_count(),
                PieceKind::Conj(3).exit_count()
            ),
            (3, 1)
        );
    }
}
