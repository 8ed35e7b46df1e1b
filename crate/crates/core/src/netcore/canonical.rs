use std::collections::VecDeque;

use super::net::{End, LinkId, LinkSort, Port, ProofNet};

/// Isomorphism-invariant encoding of a net. Two nets share an encoding iff
/// they are equal up to link renaming, respecting conclusion order, sorts,
/// port indices, and the symmetry of axioms.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalForm {
    pub bytes: Vec<u8>,
    /// Number of connected components; correct nets have one.
    pub components: usize,
}

impl CanonicalForm {
    pub fn is_connected(&self) -> bool {
        self.components <= 1
    }
}

const TAG_AX: u32 = 0;
const TAG_TENSOR: u32 = 1;
const TAG_PAR: u32 = 2;
const TAG_CONCL: u32 = 0xffff_fffe;
const TAG_OPEN: u32 = 0xffff_ffff;

struct Visit {
    /// canonical id per link, `u32::MAX` when unvisited
    id: Vec<u32>,
    /// for axioms, which original port became canonical port 0
    entry: Vec<u32>,
    order: Vec<LinkId>,
}

impl Visit {
    fn new(n: usize) -> Self {
        Visit {
            id: vec![u32::MAX; n],
            entry: vec![0; n],
            order: Vec::new(),
        }
    }

    fn canonical_port(&self, net: &ProofNet, p: Port) -> u32 {
        match net.sort(p.link) {
            LinkSort::Ax => u32::from(p.index != self.entry[p.link as usize]),
            _ => p.index,
        }
    }

    /// Original port indices of a link in canonical order.
    fn port_order(&self, net: &ProofNet, l: LinkId) -> Vec<u32> {
        match net.sort(l) {
            LinkSort::Ax => {
                let e = self.entry[l as usize];
                vec![e, 1 - e]
            }
            s => (0..s.port_count() as u32).collect(),
        }
    }

    fn bfs(&mut self, net: &ProofNet, start: Port) {
        if self.id[start.link as usize] != u32::MAX {
            return;
        }
        let mut queue = VecDeque::new();
        self.enter(start, &mut queue);
        while let Some(l) = queue.pop_front() {
            for i in self.port_order(net, l) {
                if let End::Port(q) = net.peer(Port::new(l, i)) {
                    if self.id[q.link as usize] == u32::MAX {
                        self.enter(q, &mut queue);
                    }
                }
            }
        }
    }

    fn enter(&mut self, p: Port, queue: &mut VecDeque<LinkId>) {
        self.id[p.link as usize] = self.order.len() as u32;
        self.entry[p.link as usize] = if p.index < 2 { p.index } else { 0 };
        self.order.push(p.link);
        queue.push_back(p.link);
    }
}

fn push(out: &mut Vec<u8>, x: u32) {
    out.extend_from_slice(&x.to_le_bytes());
}

fn encode_links(net: &ProofNet, visit: &Visit, links: &[LinkId], base: u32, out: &mut Vec<u8>) {
    for &l in links {
        let sort = net.sort(l);
        let (tag, arity) = match sort {
            LinkSort::Ax => (TAG_AX, 0),
            LinkSort::Tensor(n) => (TAG_TENSOR, n),
            LinkSort::Par(n) => (TAG_PAR, n),
        };
        push(out, tag);
        push(out, arity);
        for i in visit.port_order(net, l) {
            match net.peer(Port::new(l, i)) {
                End::Port(q) => {
                    push(out, visit.id[q.link as usize] - base);
                    push(out, visit.canonical_port(net, q));
                }
                End::Conclusion(k) => {
                    push(out, TAG_CONCL);
                    push(out, k);
                }
                End::Open => {
                    push(out, TAG_OPEN);
                    push(out, 0);
                }
            }
        }
    }
}

/// Deterministic traversal rooted at the ordered conclusions; components
/// without conclusions are encoded from their lexicographically least
/// rooting and appended in sorted order.
pub fn canonical_form(net: &ProofNet) -> CanonicalForm {
    let n = net.len();
    let mut visit = Visit::new(n);
    let mut roots_seen = 0usize;
    for &c in net.conclusions() {
        if visit.id[c.link as usize] == u32::MAX {
            roots_seen += 1;
        }
        visit.bfs(net, c);
    }
    let mut bytes = Vec::new();
    push(&mut bytes, net.conclusions().len() as u32);
    push(&mut bytes, visit.order.len() as u32);
    let main = visit.order.clone();
    encode_links(net, &visit, &main, 0, &mut bytes);

    // closed components
    let mut closed: Vec<Vec<u8>> = Vec::new();
    for l in 0..n as LinkId {
        if visit.id[l as usize] != u32::MAX {
            continue;
        }
        let mut best: Option<(Vec<u8>, Vec<LinkId>)> = None;
        // collect the component first
        let mut probe = Visit::new(n);
        probe.bfs(net, Port::new(l, 0));
        let members = probe.order.clone();
        for &start in &members {
            let starts: &[u32] = if net.sort(start).is_ax() {
                &[0, 1]
            } else {
                &[0]
            };
            for &si in starts {
                let mut v = Visit::new(n);
                v.bfs(net, Port::new(start, si));
                let mut enc = Vec::new();
                encode_links(net, &v, &v.order, 0, &mut enc);
                if best.as_ref().is_none_or(|(b, _)| enc < *b) {
                    best = Some((enc, v.order.clone()));
                }
            }
        }
        let (enc, order) = best.expect("component is non-empty");
        for m in order {
            visit.id[m as usize] = 0;
        }
        closed.push(enc);
    }
    closed.sort();
    let components = roots_seen + closed.len();
    for enc in closed {
        push(&mut bytes, enc.len() as u32);
        bytes.extend(enc);
    }
    CanonicalForm { bytes, components }
}

/// True when the net has at most one connected component.
pub fn is_connected(net: &ProofNet) -> bool {
    canonical_form(net).is_connected()
}
