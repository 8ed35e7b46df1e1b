//! Boolean circuits that evaluate proof nets: a net is encoded as a bit
//! table, one reduction round is a constant-depth circuit on that table,
//! and the simulator unrolls rounds between an input prefix and a suffix
//! that reads the result.

mod sim;
mod step;

pub use sim::{
    build_simulator, build_simulator_with, loglog_fit, RoundMode, SimOptions, SimulatorCircuit,
};
pub use step::{build_extraction_circuit, build_step_circuit, step_configuration};

use serde::{Deserialize, Serialize};

use crate::circuits::{ustconn2_width, CircuitError};
use crate::netcore::{End, Link, LinkSort, Port, ProofNet};
use crate::pieces::PieceError;
use crate::typing::TypeError;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum SimError {
    #[error("net has {links} links, the budget allows {slots}")]
    SlotOverflow { links: usize, slots: usize },
    #[error("link of arity {arity} exceeds the arity budget {budget}")]
    ArityOverflow { arity: u32, budget: u32 },
    #[error("net has {got} conclusions, the budget expects {expected}")]
    Conclusions { expected: usize, got: usize },
    #[error("budget too small: {0}")]
    Budget(String),
    #[error("configuration is malformed: {0}")]
    Malformed(String),
    #[error(transparent)]
    Piece(#[from] PieceError),
    #[error(transparent)]
    Type(#[from] TypeError),
    #[error(transparent)]
    Circuit(#[from] CircuitError),
}

/// Sizes a configuration is laid out for.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Budget {
    pub slots: usize,
    /// largest tensor or par arity
    pub arity: u32,
    pub conclusions: usize,
}

impl Budget {
    /// The smallest budget that fits `net`.
    pub fn for_net(net: &ProofNet) -> Budget {
        let arity = net
            .links()
            .iter()
            .map(|l| l.sort.arity())
            .max()
            .unwrap_or(1)
            .max(1);
        Budget {
            slots: net.len().max(1),
            arity,
            conclusions: net.conclusions().len(),
        }
    }
}

/// Bit offsets of a configuration. Each row holds a 2-bit sort (0 deleted,
/// 1 axiom, 2 tensor, 3 par), an arity field and one partner field per
/// port `0..=arity budget`; the conclusion fields follow the rows. Every
/// field is least significant bit first.
///
/// A partner field is a 2-bit tag (1 port, 2 conclusion, 0 nothing), a
/// slot field holding the one-based row of a port or the index of a
/// conclusion, and a port field.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Layout {
    pub budget: Budget,
    pub slot_bits: usize,
    pub port_bits: usize,
    pub field_bits: usize,
    pub row_bits: usize,
}

impl Layout {
    pub fn new(budget: Budget) -> Result<Layout, SimError> {
        if budget.slots == 0 {
            return Err(SimError::Budget("no slots".into()));
        }
        if budget.arity == 0 {
            return Err(SimError::Budget("arity budget must be at least 1".into()));
        }
        let slot_bits = ustconn2_width(budget.slots.max(budget.conclusions) as u32);
        let port_bits = ustconn2_width(budget.arity);
        let field_bits = 2 + slot_bits + port_bits;
        let row_bits = 2 + port_bits + (budget.arity as usize + 1) * field_bits;
        Ok(Layout {
            budget,
            slot_bits,
            port_bits,
            field_bits,
            row_bits,
        })
    }

    pub fn ports(&self) -> usize {
        self.budget.arity as usize + 1
    }

    pub fn sort_at(&self, row: usize) -> usize {
        row * self.row_bits
    }

    pub fn arity_at(&self, row: usize) -> usize {
        row * self.row_bits + 2
    }

    pub fn partner_at(&self, row: usize, port: usize) -> usize {
        row * self.row_bits + 2 + self.port_bits + port * self.field_bits
    }

    pub fn conclusion_at(&self, k: usize) -> usize {
        self.budget.slots * self.row_bits + k * self.field_bits
    }

    pub fn total_bits(&self) -> usize {
        self.conclusion_at(self.budget.conclusions)
    }

    /// Width of the node fields of the connectivity gates.
    pub fn node_bits(&self) -> usize {
        ustconn2_width(self.budget.slots as u32)
    }

    fn encode_partner(&self, e: End) -> u64 {
        match e {
            End::Open => 0,
            End::Port(p) => 1 | (p.link as u64 + 1) << 2 | (p.index as u64) << (2 + self.slot_bits),
            End::Conclusion(k) => 2 | (k as u64) << 2,
        }
    }
}

/// What a partner field names.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Partner {
    None,
    /// row and port
    Port(Port),
    Conclusion(u32),
}

/// A proof net as a bit table with one row per link slot.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Configuration {
    pub layout: Layout,
    pub bits: Vec<bool>,
}

fn sort_code(s: LinkSort) -> u64 {
    match s {
        LinkSort::Ax => 1,
        LinkSort::Tensor(_) => 2,
        LinkSort::Par(_) => 3,
    }
}

impl Configuration {
    fn get(&self, at: usize, len: usize) -> u64 {
        (0..len).fold(0, |acc, i| acc | (self.bits[at + i] as u64) << i)
    }

    fn put(&mut self, at: usize, len: usize, v: u64) {
        for i in 0..len {
            self.bits[at + i] = v >> i & 1 == 1;
        }
    }

    /// The sort of a row, `None` when the row is deleted.
    pub fn sort(&self, row: usize) -> Result<Option<LinkSort>, SimError> {
        let lay = &self.layout;
        let arity = self.get(lay.arity_at(row), lay.port_bits) as u32;
        match self.get(lay.sort_at(row), 2) {
            0 => Ok(None),
            1 => Ok(Some(LinkSort::Ax)),
            _ if arity == 0 || arity > lay.budget.arity => {
                Err(SimError::Malformed(format!("row {row} has arity {arity}")))
            }
            2 => Ok(Some(LinkSort::Tensor(arity))),
            _ => Ok(Some(LinkSort::Par(arity))),
        }
    }

    fn partner_field(&self, at: usize) -> Result<Partner, SimError> {
        let lay = &self.layout;
        let slot = self.get(at + 2, lay.slot_bits);
        let port = self.get(at + 2 + lay.slot_bits, lay.port_bits);
        match self.get(at, 2) {
            0 => Ok(Partner::None),
            1 if slot >= 1 && slot as usize <= lay.budget.slots => {
                Ok(Partner::Port(Port::new(slot as u32 - 1, port as u32)))
            }
            2 if (slot as usize) < lay.budget.conclusions && port == 0 => {
                Ok(Partner::Conclusion(slot as u32))
            }
            tag => Err(SimError::Malformed(format!(
                "field at bit {at}: tag {tag}, slot {slot}, port {port}"
            ))),
        }
    }

    pub fn partner(&self, row: usize, port: usize) -> Result<Partner, SimError> {
        self.partner_field(self.layout.partner_at(row, port))
    }

    pub fn conclusion(&self, k: usize) -> Result<Partner, SimError> {
        self.partner_field(self.layout.conclusion_at(k))
    }

    pub fn live_rows(&self) -> usize {
        (0..self.layout.budget.slots)
            .filter(|&r| self.get(self.layout.sort_at(r), 2) != 0)
            .count()
    }

    /// Row of the link the last conclusion is attached to.
    pub fn result_slot(&self) -> Option<usize> {
        let k = self.layout.budget.conclusions.checked_sub(1)?;
        match self.conclusion(k) {
            Ok(Partner::Port(p)) => Some(p.link as usize),
            _ => None,
        }
    }

    /// Partner fields point back at each other, unused fields and deleted
    /// rows are zero, and conclusions point at live ports.
    pub fn check_consistent(&self) -> Result<(), SimError> {
        let lay = &self.layout;
        let bad = |m: String| Err(SimError::Malformed(m));
        let ports_of = |row: usize| -> Result<Option<usize>, SimError> {
            Ok(self.sort(row)?.map(|s| s.port_count()))
        };
        for r in 0..lay.budget.slots {
            let sort = self.sort(r)?;
            let used = sort.map_or(0, |s| s.port_count());
            if sort.is_none() && (0..lay.row_bits).any(|i| self.bits[lay.sort_at(r) + i]) {
                return bad(format!("deleted row {r} is not zero"));
            }
            if sort == Some(LinkSort::Ax) && self.get(lay.arity_at(r), lay.port_bits) != 0 {
                return bad(format!("axiom row {r} has an arity"));
            }
            for p in 0..lay.ports() {
                let here = Partner::Port(Port::new(r as u32, p as u32));
                match self.partner(r, p)? {
                    Partner::None if p < used => {
                        return bad(format!("port {r}.{p} is unconnected"))
                    }
                    Partner::None => {}
                    _ if p >= used => return bad(format!("unused port {r}.{p} is set")),
                    Partner::Port(q) => {
                        let back_ok =
                            matches!(ports_of(q.link as usize)?, Some(n) if (q.index as usize) < n);
                        if !back_ok || self.partner(q.link as usize, q.index as usize)? != here {
                            return bad(format!("port {r}.{p} and {q} disagree"));
                        }
                    }
                    Partner::Conclusion(k) => {
                        if self.conclusion(k as usize)? != here {
                            return bad(format!("port {r}.{p} and conclusion {k} disagree"));
                        }
                    }
                }
            }
        }
        for k in 0..lay.budget.conclusions {
            match self.conclusion(k)? {
                Partner::Port(p) => {
                    if self.partner(p.link as usize, p.index as usize)?
                        != Partner::Conclusion(k as u32)
                    {
                        return bad(format!("conclusion {k} and port {p} disagree"));
                    }
                }
                other => return bad(format!("conclusion {k} is {other:?}")),
            }
        }
        Ok(())
    }
}

/// Writes `net` into a configuration laid out for `budget`; rows past the
/// net are deleted.
pub fn encode_config(net: &ProofNet, budget: Budget) -> Result<Configuration, SimError> {
    let layout = Layout::new(budget)?;
    if net.len() > budget.slots {
        return Err(SimError::SlotOverflow {
            links: net.len(),
            slots: budget.slots,
        });
    }
    if net.conclusions().len() != budget.conclusions {
        return Err(SimError::Conclusions {
            expected: budget.conclusions,
            got: net.conclusions().len(),
        });
    }
    let mut cfg = Configuration {
        layout,
        bits: vec![false; layout.total_bits()],
    };
    for (r, link) in net.links().iter().enumerate() {
        let arity = link.sort.arity();
        if !link.sort.is_ax() && arity > budget.arity {
            return Err(SimError::ArityOverflow {
                arity,
                budget: budget.arity,
            });
        }
        cfg.put(layout.sort_at(r), 2, sort_code(link.sort));
        if !link.sort.is_ax() {
            cfg.put(layout.arity_at(r), layout.port_bits, arity as u64);
        }
        for (p, &e) in link.ports.iter().enumerate() {
            cfg.put(
                layout.partner_at(r, p),
                layout.field_bits,
                layout.encode_partner(e),
            );
        }
    }
    for (k, &p) in net.conclusions().iter().enumerate() {
        cfg.put(
            layout.conclusion_at(k),
            layout.field_bits,
            layout.encode_partner(End::Port(p)),
        );
    }
    Ok(cfg)
}

/// Reads the net back, dropping deleted rows and keeping the order of the
/// live ones.
pub fn decode_config(cfg: &Configuration) -> Result<ProofNet, SimError> {
    cfg.check_consistent()?;
    let lay = &cfg.layout;
    let mut map = vec![u32::MAX; lay.budget.slots];
    let mut sorts = Vec::new();
    for (r, m) in map.iter_mut().enumerate() {
        if let Some(s) = cfg.sort(r)? {
            *m = sorts.len() as u32;
            sorts.push((r, s));
        }
    }
    let end = |p: Partner| match p {
        Partner::Port(q) => End::Port(Port::new(map[q.link as usize], q.index)),
        Partner::Conclusion(k) => End::Conclusion(k),
        Partner::None => End::Open,
    };
    let mut links = Vec::with_capacity(sorts.len());
    for &(r, sort) in &sorts {
        let ports = (0..sort.port_count())
            .map(|p| cfg.partner(r, p).map(end))
            .collect::<Result<Vec<End>, SimError>>()?;
        links.push(Link { sort, ports });
    }
    let conclusions = (0..lay.budget.conclusions)
        .map(|k| match cfg.conclusion(k)? {
            Partner::Port(q) => Ok(Port::new(map[q.link as usize], q.index)),
            _ => Err(SimError::Malformed(format!("conclusion {k}"))),
        })
        .collect::<Result<Vec<Port>, SimError>>()?;
    Ok(ProofNet::from_raw(links, conclusions))
}
