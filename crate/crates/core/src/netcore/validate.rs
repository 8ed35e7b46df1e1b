use std::fmt;

use super::net::{End, LinkId, LinkSort, Port, ProofNet};

/// A broken structural invariant, naming the offending link or port.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    BadArity {
        link: LinkId,
        sort: LinkSort,
        ports: usize,
    },
    OpenPort(Port),
    UnknownTarget {
        port: Port,
        target: Port,
    },
    SameLink {
        link: LinkId,
        a: u32,
        b: u32,
    },
    Asymmetric {
        port: Port,
        peer: End,
    },
    AuxToAux(Port, Port),
    AuxConclusion {
        conclusion: u32,
        port: Port,
    },
    BadConclusion {
        conclusion: u32,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::BadArity { link, sort, ports } => {
                write!(f, "link {link}: sort {sort} with {ports} ports")
            }
            Violation::OpenPort(p) => write!(f, "port {p} is not connected"),
            Violation::UnknownTarget { port, target } => {
                write!(f, "port {port} refers to missing port {target}")
            }
            Violation::SameLink { link, a, b } => {
                write!(f, "link {link}: ports {a} and {b} are wired together")
            }
            Violation::Asymmetric { port, peer } => {
                write!(
                    f,
                    "port {port} points to {peer:?} which does not point back"
                )
            }
            Violation::AuxToAux(a, b) => {
                write!(f, "auxiliary ports {a} and {b} are wired together")
            }
            Violation::AuxConclusion { conclusion, port } => {
                write!(f, "conclusion {conclusion} hangs on auxiliary port {port}")
            }
            Violation::BadConclusion { conclusion } => {
                write!(f, "conclusion {conclusion} is not attached consistently")
            }
        }
    }
}

/// Every port wired exactly once, symmetric wiring, no wire inside one
/// link, no auxiliary-to-auxiliary wire, conclusions on principal ports.
pub fn validate_structure(net: &ProofNet) -> Vec<Violation> {
    let mut out = Vec::new();
    let n = net.links.len();
    for (l, link) in net.links.iter().enumerate() {
        let l = l as LinkId;
        let arity_ok = match link.sort {
            LinkSort::Ax => true,
            LinkSort::Tensor(k) | LinkSort::Par(k) => k >= 2,
        };
        if !arity_ok || link.ports.len() != link.sort.port_count() {
            out.push(Violation::BadArity {
                link: l,
                sort: link.sort,
                ports: link.ports.len(),
            });
            continue;
        }
        for (i, &end) in link.ports.iter().enumerate() {
            let here = Port::new(l, i as u32);
            match end {
                End::Open => out.push(Violation::OpenPort(here)),
                End::Conclusion(k) => {
                    if net.conclusions.get(k as usize) != Some(&here) {
                        out.push(Violation::BadConclusion { conclusion: k });
                    } else if !link.sort.is_principal(i as u32) {
                        out.push(Violation::AuxConclusion {
                            conclusion: k,
                            port: here,
                        });
                    }
                }
                End::Port(q) => {
                    let valid = (q.link as usize) < n
                        && (q.index as usize) < net.links[q.link as usize].ports.len();
                    if !valid {
                        out.push(Violation::UnknownTarget {
                            port: here,
                            target: q,
                        });
                        continue;
                    }
                    if q.link == l {
                        if (i as u32) < q.index {
                            out.push(Violation::SameLink {
                                link: l,
                                a: i as u32,
                                b: q.index,
                            });
                        } else if i as u32 == q.index {
                            out.push(Violation::Asymmetric {
                                port: here,
                                peer: end,
                            });
                        }
                        continue;
                    }
                    if net.peer(q) != End::Port(here) {
                        out.push(Violation::Asymmetric {
                            port: here,
                            peer: end,
                        });
                        continue;
                    }
                    if here < q && !link.sort.is_principal(i as u32) && !net.is_principal(q) {
                        out.push(Violation::AuxToAux(here, q));
                    }
                }
            }
        }
    }
    for (k, p) in net.conclusions.iter().enumerate() {
        let ok = (p.link as usize) < n
            && (p.index as usize) < net.links[p.link as usize].ports.len()
            && net.peer(*p) == End::Conclusion(k as u32);
        if !ok {
            out.push(Violation::BadConclusion {
                conclusion: k as u32,
            });
        }
    }
    out
}
