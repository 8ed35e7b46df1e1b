use std::fmt;
use std::str::FromStr;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::{Deserialize, Serialize};

use super::{classify, CutReport, RewriteError, Wiring};
use crate::netcore::{End, Link, LinkId, LinkSort, Port, ProofNet};

/// A net under rewriting, stored flat. Deleted links are only marked, so
/// link identifiers stay fixed until the final compaction; the redexes of
/// a round are collected before any of them is fired, and since distinct
/// redexes never rewire the same port they are fired in place.
pub(crate) struct Flat {
    sorts: Vec<LinkSort>,
    start: Vec<u32>,
    ports: Vec<End>,
    alive: Vec<bool>,
    conclusions: Vec<Port>,
    live: usize,
}

impl Flat {
    pub(crate) fn new(net: &ProofNet) -> Self {
        let mut start = Vec::with_capacity(net.len());
        let mut ports = Vec::new();
        for l in net.links() {
            start.push(ports.len() as u32);
            ports.extend_from_slice(&l.ports);
        }
        Flat {
            sorts: net.links().iter().map(|l| l.sort).collect(),
            start,
            ports,
            alive: vec![true; net.len()],
            conclusions: net.conclusions().to_vec(),
            live: net.len(),
        }
    }

    fn slot(&self, p: Port) -> usize {
        self.start[p.link as usize] as usize + p.index as usize
    }

    fn set(&mut self, p: Port, e: End) {
        let i = self.slot(p);
        self.ports[i] = e;
    }

    fn kill(&mut self, l: LinkId) {
        if std::mem::replace(&mut self.alive[l as usize], false) {
            self.live -= 1;
        }
    }

    /// Joins two wire ends left dangling by a deletion.
    fn join(&mut self, x: End, y: End) -> Result<(), RewriteError> {
        match (x, y) {
            (End::Port(a), End::Port(b)) => {
                if a.link == b.link {
                    return Err(RewriteError::SelfLoop(a.link));
                }
                self.set(a, End::Port(b));
                self.set(b, End::Port(a));
            }
            (End::Port(a), End::Conclusion(k)) | (End::Conclusion(k), End::Port(a)) => {
                self.set(a, End::Conclusion(k));
                self.conclusions[k as usize] = a;
            }
            _ => unreachable!("rules never join two conclusions"),
        }
        Ok(())
    }

    pub(crate) fn live(&self) -> usize {
        self.live
    }

    pub(crate) fn to_net(&self) -> ProofNet {
        let mut map = vec![u32::MAX; self.sorts.len()];
        let mut next = 0;
        for (i, &a) in self.alive.iter().enumerate() {
            if a {
                map[i] = next;
                next += 1;
            }
        }
        let remap = |e: End| match e {
            End::Port(p) => End::Port(Port::new(map[p.link as usize], p.index)),
            other => other,
        };
        let links = (0..self.sorts.len())
            .filter(|&l| self.alive[l])
            .map(|l| {
                let s = self.start[l] as usize;
                let sort = self.sorts[l];
                Link {
                    sort,
                    ports: self.ports[s..s + sort.port_count()]
                        .iter()
                        .map(|&e| remap(e))
                        .collect(),
                }
            })
            .collect();
        let conclusions = self
            .conclusions
            .iter()
            .map(|p| Port::new(map[p.link as usize], p.index))
            .collect();
        ProofNet::from_raw(links, conclusions)
    }
}

impl Wiring for Flat {
    fn link_count(&self) -> usize {
        self.sorts.len()
    }

    fn alive(&self, l: LinkId) -> bool {
        self.alive[l as usize]
    }

    fn sort(&self, l: LinkId) -> LinkSort {
        self.sorts[l as usize]
    }

    fn peer(&self, p: Port) -> End {
        self.ports[self.slot(p)]
    }
}

fn t_round(w: &mut Flat, report: &CutReport) -> Result<(), RewriteError> {
    for chain in &report.t_chains {
        let [x, y] = chain.ends;
        let principal = |e: End| matches!(e, End::Port(q) if w.is_principal(q));
        if principal(x) || principal(y) {
            for &a in &chain.axioms {
                w.kill(a);
            }
            w.join(x, y)?;
        } else {
            // both ends are auxiliary ports or conclusions: the first axiom stays
            let keep = chain.axioms[0];
            for &a in &chain.axioms[1..] {
                w.kill(a);
            }
            let other = Port::new(keep, 1 - chain.outer[0].index);
            w.set(other, End::Open);
            w.join(End::Port(other), y)?;
        }
    }
    Ok(())
}

fn a_round(w: &mut Flat, report: &CutReport) -> Result<(), RewriteError> {
    let mut last = None;
    for &(ax, _) in &report.a_cuts {
        // an axiom with a-cuts on both ports is listed twice
        if last == Some(ax) {
            continue;
        }
        last = Some(ax);
        w.kill(ax);
        let x = w.peer(Port::new(ax, 0));
        let y = w.peer(Port::new(ax, 1));
        w.join(x, y)?;
    }
    Ok(())
}

fn m_round(w: &mut Flat, report: &CutReport) -> Result<(), RewriteError> {
    for &(t, p) in &report.m_cuts {
        let n = w.sort(t).arity();
        w.kill(t);
        w.kill(p);
        for i in 1..=n {
            let x = w.peer(Port::new(t, i));
            let y = w.peer(Port::new(p, n + 1 - i));
            w.join(x, y)?;
        }
    }
    Ok(())
}

fn single_round(net: &ProofNet, kind: char) -> Result<ProofNet, RewriteError> {
    let mut w = Flat::new(net);
    let r = classify(&w)?;
    let empty = match kind {
        't' => r.t_chains.is_empty(),
        'a' => r.a_cuts.is_empty(),
        _ => r.m_cuts.is_empty(),
    };
    if empty {
        return Err(RewriteError::NoRedex(kind));
    }
    fire(&mut w, &r, kind)?;
    Ok(w.to_net())
}

/// Erases every t-chain in parallel. A chain touching the principal port of a
/// non-axiom link is replaced by a direct wire between its two ends; a chain
/// whose ends are both auxiliary ports or conclusions shrinks to one axiom.
pub fn reduce_t(net: &ProofNet) -> Result<ProofNet, RewriteError> {
    single_round(net, 't')
}

/// Erases every a-cut in parallel by deleting the axiom and joining the two
/// wires it separated.
pub fn reduce_a(net: &ProofNet) -> Result<ProofNet, RewriteError> {
    single_round(net, 'a')
}

/// Erases every tensor/par cut in parallel, wiring tensor premise `i` to par
/// premise `n + 1 - i`.
pub fn reduce_m(net: &ProofNet) -> Result<ProofNet, RewriteError> {
    single_round(net, 'm')
}

/// Which kind of round to fire when several are possible.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Strategy {
    /// t, then a, then m
    #[default]
    Tam,
    /// m, then a, then t
    Mat,
    /// a seeded uniform choice among the available kinds
    Random(u64),
}

impl FromStr for Strategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "tam" => Ok(Strategy::Tam),
            "mat" => Ok(Strategy::Mat),
            _ => match s.strip_prefix("random:") {
                Some(seed) => seed
                    .parse()
                    .map(Strategy::Random)
                    .map_err(|_| format!("bad seed in '{s}'")),
                None => Err(format!("unknown strategy '{s}' (tam, mat, random:<seed>)")),
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Round {
    pub kind: char,
    /// cut wires eliminated, counted as in `CutReport::cut_count`
    pub cuts: usize,
    /// links after the round
    pub size: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReductionTrace {
    pub rounds: Vec<Round>,
    pub total_rounds: usize,
}

impl fmt::Display for ReductionTrace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, r) in self.rounds.iter().enumerate() {
            writeln!(
                f,
                "round {} kind={} cuts={} size={}",
                k + 1,
                r.kind,
                r.cuts,
                r.size
            )?;
        }
        Ok(())
    }
}

/// One round of the given kind on an already classified net.
pub(crate) fn fire(w: &mut Flat, report: &CutReport, kind: char) -> Result<(), RewriteError> {
    match kind {
        't' => t_round(w, report),
        'a' => a_round(w, report),
        _ => m_round(w, report),
    }
}

/// Applies rounds until the net is cut-free, with at most `limit` rounds.
pub fn normalize_with_limit(
    net: &ProofNet,
    strategy: Strategy,
    limit: usize,
) -> Result<(ProofNet, ReductionTrace), RewriteError> {
    let mut rng = match strategy {
        Strategy::Random(seed) => Some(StdRng::seed_from_u64(seed)),
        _ => None,
    };
    let mut cur = Flat::new(net);
    let mut trace = ReductionTrace::default();
    loop {
        let report = classify(&cur)?;
        let mut kinds = Vec::with_capacity(3);
        if !report.t_chains.is_empty() {
            kinds.push('t');
        }
        if !report.a_cuts.is_empty() {
            kinds.push('a');
        }
        if !report.m_cuts.is_empty() {
            kinds.push('m');
        }
        if kinds.is_empty() {
            return Ok((cur.to_net(), trace));
        }
        if trace.total_rounds >= limit {
            return Err(RewriteError::RoundLimit(limit));
        }
        let kind = match (&strategy, rng.as_mut()) {
            (Strategy::Tam, _) => kinds[0],
            (Strategy::Mat, _) => *kinds.last().unwrap(),
            (_, Some(r)) => kinds[r.gen_range(0..kinds.len())],
            _ => unreachable!(),
        };
        let cuts = match kind {
            't' => CutReport {
                t_chains: report.t_chains.clone(),
                ..Default::default()
            }
            .cut_count_in(&cur),
            'a' => report.a_cuts.len(),
            _ => report.m_cuts.len(),
        };
        fire(&mut cur, &report, kind)?;
        trace.total_rounds += 1;
        trace.rounds.push(Round {
            kind,
            cuts,
            size: cur.live(),
        });
    }
}

/// Normalizes with the round limit `size + 1`.
pub fn normalize(
    net: &ProofNet,
    strategy: Strategy,
) -> Result<(ProofNet, ReductionTrace), RewriteError> {
    normalize_with_limit(net, strategy, net.len() + 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strategies_parse() {
        assert_eq!("tam".parse(), Ok(Strategy::Tam));
        assert_eq!("mat".parse(), Ok(Strategy::Mat));
        assert_eq!("random:42".parse(), Ok(Strategy::Random(42)));
        assert!("random:x".parse::<Strategy>().is_err());
        assert!("tma".parse::<Strategy>().is_err());
    }
}
