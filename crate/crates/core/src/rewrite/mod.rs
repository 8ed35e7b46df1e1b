//! Cut classification and parallel cut elimination.

mod rounds;

pub use rounds::{
    normalize, normalize_with_limit, reduce_a, reduce_m, reduce_t, ReductionTrace, Round, Strategy,
};

use serde::{Deserialize, Serialize};

use crate::netcore::{End, LinkId, LinkSort, Port, ProofNet};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum RewriteError {
    #[error("cut between links {0} and {1} joins two links of the same kind or arity")]
    BadMCut(LinkId, LinkId),
    #[error("axioms starting at link {0} form a closed cycle")]
    AxiomCycle(LinkId),
    #[error("no {0}-redex to reduce")]
    NoRedex(char),
    #[error("reduction would wire link {0} to itself")]
    SelfLoop(LinkId),
    #[error("round limit {0} exceeded")]
    RoundLimit(usize),
}

/// A maximal chain of axioms linked by cuts. `outer[0]` is the free port of
/// the first axiom and `outer[1]` the free port of the last one; `ends` are
/// what those ports are wired to.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TChain {
    pub axioms: Vec<LinkId>,
    pub outer: [Port; 2],
    pub ends: [End; 2],
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CutReport {
    pub t_chains: Vec<TChain>,
    /// (axiom, principal port of the other link)
    pub a_cuts: Vec<(LinkId, Port)>,
    /// (tensor, par)
    pub m_cuts: Vec<(LinkId, LinkId)>,
}

impl CutReport {
    pub fn is_empty(&self) -> bool {
        self.t_chains.is_empty() && self.a_cuts.is_empty() && self.m_cuts.is_empty()
    }

    /// Number of principal-principal wires covered by the report; a chain
    /// owns its inner cuts and the cuts at its two ends.
    pub fn cut_count(&self, net: &ProofNet) -> usize {
        self.cut_count_in(net)
    }

    pub(crate) fn cut_count_in<W: Wiring>(&self, net: &W) -> usize {
        let t: usize = self
            .t_chains
            .iter()
            .map(|c| {
                let ends = c
                    .ends
                    .iter()
                    .filter(|e| matches!(e, End::Port(q) if net.is_principal(*q)))
                    .count();
                c.axioms.len() - 1 + ends
            })
            .sum();
        t + self.a_cuts.len() + self.m_cuts.len()
    }
}

/// Read access to a net under rewriting; links may be marked dead.
pub(crate) trait Wiring {
    fn link_count(&self) -> usize;
    fn alive(&self, l: LinkId) -> bool;
    fn sort(&self, l: LinkId) -> LinkSort;
    fn peer(&self, p: Port) -> End;

    fn is_principal(&self, p: Port) -> bool {
        self.sort(p.link).is_principal(p.index)
    }
}

impl Wiring for ProofNet {
    fn link_count(&self) -> usize {
        self.len()
    }

    fn alive(&self, _: LinkId) -> bool {
        true
    }

    fn sort(&self, l: LinkId) -> LinkSort {
        ProofNet::sort(self, l)
    }

    fn peer(&self, p: Port) -> End {
        ProofNet::peer(self, p)
    }
}

fn ax_ax_peer<W: Wiring>(net: &W, p: Port) -> Option<Port> {
    match net.peer(p) {
        End::Port(q) if net.sort(q.link).is_ax() => Some(q),
        _ => None,
    }
}

pub fn classify_cuts(net: &ProofNet) -> Result<CutReport, RewriteError> {
    classify(net)
}

pub(crate) fn classify<W: Wiring>(net: &W) -> Result<CutReport, RewriteError> {
    let n = net.link_count() as LinkId;
    let mut report = CutReport::default();
    let mut in_chain = vec![false; n as usize];
    for l in 0..n {
        if !net.alive(l) || !net.sort(l).is_ax() || in_chain[l as usize] {
            continue;
        }
        let chained = [0, 1].map(|i| ax_ax_peer(net, Port::new(l, i)).is_some());
        // only start from an end of the chain
        if chained[0] == chained[1] {
            continue;
        }
        let start_free = if chained[0] { 1 } else { 0 };
        let mut axioms = vec![l];
        in_chain[l as usize] = true;
        let mut cur = Port::new(l, 1 - start_free);
        while let Some(q) = ax_ax_peer(net, cur) {
            axioms.push(q.link);
            in_chain[q.link as usize] = true;
            cur = Port::new(q.link, 1 - q.index);
        }
        let outer = [Port::new(l, start_free), cur];
        report.t_chains.push(TChain {
            axioms,
            outer,
            ends: [net.peer(outer[0]), net.peer(outer[1])],
        });
    }
    for l in 0..n {
        if net.alive(l)
            && net.sort(l).is_ax()
            && !in_chain[l as usize]
            && ax_ax_peer(net, Port::new(l, 0)).is_some()
        {
            return Err(RewriteError::AxiomCycle(l));
        }
    }
    for l in 0..n {
        if !net.alive(l) {
            continue;
        }
        let sp = net.sort(l);
        let principals: &[u32] = if sp.is_ax() { &[0, 1] } else { &[0] };
        for &i in principals {
            let p = Port::new(l, i);
            let End::Port(q) = net.peer(p) else { continue };
            if !(p < q && net.is_principal(q)) {
                continue;
            }
            match (sp, net.sort(q.link)) {
                (LinkSort::Ax, LinkSort::Ax) => {}
                (LinkSort::Ax, _) => {
                    if !in_chain[p.link as usize] {
                        report.a_cuts.push((p.link, q));
                    }
                }
                (_, LinkSort::Ax) => {
                    if !in_chain[q.link as usize] {
                        report.a_cuts.push((q.link, p));
                    }
                }
                (LinkSort::Tensor(a), LinkSort::Par(b)) if a == b => {
                    report.m_cuts.push((p.link, q.link))
                }
                (LinkSort::Par(a), LinkSort::Tensor(b)) if a == b => {
                    report.m_cuts.push((q.link, p.link))
                }
                _ => return Err(RewriteError::BadMCut(p.link, q.link)),
            }
        }
    }
    report.a_cuts.sort();
    Ok(report)
}
