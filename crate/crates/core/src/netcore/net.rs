use std::fmt;

use serde::{Deserialize, Serialize};

pub type LinkId = u32;

/// The three sorts of links. Tensor and par carry their arity (number of
/// auxiliary ports), which is always at least 2.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum LinkSort {
    Ax,
    Tensor(u32),
    Par(u32),
}

impl LinkSort {
    pub fn port_count(self) -> usize {
        match self {
            LinkSort::Ax => 2,
            LinkSort::Tensor(n) | LinkSort::Par(n) => n as usize + 1,
        }
    }

    pub fn arity(self) -> u32 {
        match self {
            LinkSort::Ax => 0,
            LinkSort::Tensor(n) | LinkSort::Par(n) => n,
        }
    }

    /// Axioms have two principal ports (0 and 1); other links only port 0.
    pub fn is_principal(self, index: u32) -> bool {
        match self {
            LinkSort::Ax => index < 2,
            _ => index == 0,
        }
    }

    pub fn is_ax(self) -> bool {
        matches!(self, LinkSort::Ax)
    }
}

impl fmt::Display for LinkSort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LinkSort::Ax => write!(f, "ax"),
            LinkSort::Tensor(n) => write!(f, "tensor{n}"),
            LinkSort::Par(n) => write!(f, "par{n}"),
        }
    }
}

/// A port of a link. For axioms, index 0 is the left principal port and
/// index 1 the right one.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Port {
    pub link: LinkId,
    pub index: u32,
}

impl Port {
    pub const fn new(link: LinkId, index: u32) -> Self {
        Port { link, index }
    }

    pub const fn principal(link: LinkId) -> Self {
        Port { link, index: 0 }
    }
}

impl fmt::Display for Port {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}", self.link, self.index)
    }
}

/// What the other end of a wire is attached to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum End {
    Port(Port),
    Conclusion(u32),
    /// Not connected. Only builders and pseudo nets carry open ends.
    Open,
}

impl End {
    pub fn port(self) -> Option<Port> {
        match self {
            End::Port(p) => Some(p),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Link {
    pub sort: LinkSort,
    /// `ports[i]` is the far end of the wire attached to port `i`.
    pub ports: Vec<End>,
}

/// A proof net: links, the wires between their ports, and the ordered
/// conclusions (dangling wire ends attached to principal ports).
///
/// Values are immutable once built; mutation goes through [`NetBuilder`].
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProofNet {
    pub(crate) links: Vec<Link>,
    pub(crate) conclusions: Vec<Port>,
}

impl ProofNet {
    /// Assembles a net without any structural check. Use
    /// [`crate::netcore::validate_structure`] to inspect the result.
    pub fn from_raw(links: Vec<Link>, conclusions: Vec<Port>) -> Self {
        ProofNet { links, conclusions }
    }

    pub fn links(&self) -> &[Link] {
        &self.links
    }

    pub fn link(&self, id: LinkId) -> &Link {
        &self.links[id as usize]
    }

    pub fn sort(&self, id: LinkId) -> LinkSort {
        self.links[id as usize].sort
    }

    pub fn conclusions(&self) -> &[Port] {
        &self.conclusions
    }

    pub fn len(&self) -> usize {
        self.links.len()
    }

    pub fn is_empty(&self) -> bool {
        self.links.is_empty()
    }

    pub fn peer(&self, port: Port) -> End {
        self.links[port.link as usize].ports[port.index as usize]
    }

    pub fn is_principal(&self, port: Port) -> bool {
        self.sort(port.link).is_principal(port.index)
    }

    pub fn link_ids(&self) -> impl Iterator<Item = LinkId> {
        0..self.links.len() as LinkId
    }

    pub fn ports(&self) -> impl Iterator<Item = Port> + '_ {
        self.links.iter().enumerate().flat_map(|(l, link)| {
            (0..link.ports.len() as u32).map(move |i| Port::new(l as LinkId, i))
        })
    }

    /// Wires joining two principal ports, each reported once with the
    /// smaller port first.
    pub fn cuts(&self) -> Vec<(Port, Port)> {
        let mut out = Vec::new();
        for p in self.ports() {
            if !self.is_principal(p) {
                continue;
            }
            if let End::Port(q) = self.peer(p) {
                if p < q && self.is_principal(q) {
                    out.push((p, q));
                }
            }
        }
        out
    }

    pub fn is_cut_free(&self) -> bool {
        self.cuts().is_empty()
    }

    /// Renumbers links with `perm[old] = new`. Conclusions keep their order.
    pub fn relabel(&self, perm: &[LinkId]) -> ProofNet {
        let mut links = vec![
            Link {
                sort: LinkSort::Ax,
                ports: Vec::new()
            };
            self.links.len()
        ];
        let map_end = |e: End| match e {
            End::Port(p) => End::Port(Port::new(perm[p.link as usize], p.index)),
            other => other,
        };
        for (old, link) in self.links.iter().enumerate() {
            links[perm[old] as usize] = Link {
                sort: link.sort,
                ports: link.ports.iter().map(|&e| map_end(e)).collect(),
            };
        }
        let conclusions = self
            .conclusions
            .iter()
            .map(|p| Port::new(perm[p.link as usize], p.index))
            .collect();
        ProofNet { links, conclusions }
    }

    /// Juxtaposes two nets; the conclusions of `other` follow those of `self`.
    pub fn disjoint_union(&self, other: &ProofNet) -> ProofNet {
        let mut b = NetBuilder::from_net(self.clone());
        let imported = b.import(other);
        for p in imported {
            b.conclude(p);
        }
        b.build()
    }
}

/// Mutable construction of nets. Ports start open and are connected
/// pairwise; conclusions are appended in order.
#[derive(Clone, Debug, Default)]
pub struct NetBuilder {
    net: ProofNet,
}

impl NetBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_net(net: ProofNet) -> Self {
        NetBuilder { net }
    }

    pub fn len(&self) -> usize {
        self.net.links.len()
    }

    pub fn is_empty(&self) -> bool {
        self.net.links.is_empty()
    }

    pub fn add_link(&mut self, sort: LinkSort) -> LinkId {
        let id = self.net.links.len() as LinkId;
        self.net.links.push(Link {
            sort,
            ports: vec![End::Open; sort.port_count()],
        });
        id
    }

    pub fn ax(&mut self) -> LinkId {
        self.add_link(LinkSort::Ax)
    }

    pub fn tensor(&mut self, arity: u32) -> LinkId {
        self.add_link(LinkSort::Tensor(arity))
    }

    pub fn par(&mut self, arity: u32) -> LinkId {
        self.add_link(LinkSort::Par(arity))
    }

    pub fn peer(&self, port: Port) -> End {
        self.net.peer(port)
    }

    pub fn sort(&self, link: LinkId) -> LinkSort {
        self.net.sort(link)
    }

    /// Joins two ports with a wire, overwriting whatever they were attached to.
    pub fn connect(&mut self, a: Port, b: Port) {
        self.set(a, End::Port(b));
        self.set(b, End::Port(a));
    }

    pub fn set(&mut self, port: Port, end: End) {
        self.net.links[port.link as usize].ports[port.index as usize] = end;
    }

    /// Appends a conclusion attached to `port` and returns its position.
    pub fn conclude(&mut self, port: Port) -> usize {
        let k = self.net.conclusions.len();
        self.set(port, End::Conclusion(k as u32));
        self.net.conclusions.push(port);
        k
    }

    /// Copies `other` into this builder. Its conclusion ports are returned
    /// in order and left open.
    pub fn import(&mut self, other: &ProofNet) -> Vec<Port> {
        let offset = self.net.links.len() as LinkId;
        for link in &other.links {
            let ports = link
                .ports
                .iter()
                .map(|&e| match e {
                    End::Port(p) => End::Port(Port::new(p.link + offset, p.index)),
                    _ => End::Open,
                })
                .collect();
            self.net.links.push(Link {
                sort: link.sort,
                ports,
            });
        }
        other
            .conclusions
            .iter()
            .map(|p| Port::new(p.link + offset, p.index))
            .collect()
    }

    /// Finishes without checks; open ports stay open.
    pub fn build(self) -> ProofNet {
        self.net
    }

    /// Finishes and rejects structurally invalid nets.
    pub fn finish(self) -> Result<ProofNet, super::NetError> {
        let violations = super::validate_structure(&self.net);
        if violations.is_empty() {
            Ok(self.net)
        } else {
            Err(super::NetError::Invalid(violations))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn connect_is_symmetric() {
        let mut b = NetBuilder::new();
        let a = b.ax();
        let t = b.tensor(2);
        b.connect(Port::new(a, 0), Port::new(t, 1));
        b.connect(Port::new(a, 1), Port::new(t, 2));
        b.conclude(Port::principal(t));
        let net = b.build();
        assert_eq!(net.peer(Port::new(t, 1)).port(), Some(Port::new(a, 0)));
        assert_eq!(net.peer(Port::new(a, 1)).port(), Some(Port::new(t, 2)));
        assert_eq!(net.conclusions(), [Port::principal(t)]);
        assert!(net.is_cut_free());
    }

    #[test]
    fn sorts_count_ports() {
        assert_eq!(LinkSort::Ax.port_count(), 2);
        assert_eq!(LinkSort::Tensor(3).port_count(), 4);
        assert!(LinkSort::Par(2).is_principal(0));
        assert!(!LinkSort::Par(2).is_principal(1));
        assert!(LinkSort::Ax.is_principal(1));
    }
}
