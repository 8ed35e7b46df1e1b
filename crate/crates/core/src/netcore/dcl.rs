//! Line-oriented tuple format for proof nets.
//!
//! ```text
//! pn <y> <g> e <sort>         link g has sort ax | tensor<k> | par<k>
//! pn <y> <g> <p> <b>          auxiliary port p of g is wired to b
//! pn <y> <g> 0 <b>            principal ports of g and b are cut
//! concl <y> <k> <g>           k-th conclusion hangs on g
//! ```
//!
//! References to an axiom may carry `.l` or `.r` to pick port 0 or 1.
//! Without a suffix the parser takes the axiom's free port.

use std::collections::HashMap;
use std::fmt::Write as _;

use super::net::{End, LinkId, LinkSort, NetBuilder, Port, ProofNet};
use super::NetError;

fn port_ref(net: &ProofNet, p: Port) -> String {
    match net.sort(p.link) {
        LinkSort::Ax => format!("{}.{}", p.link, if p.index == 0 { 'l' } else { 'r' }),
        _ => p.link.to_string(),
    }
}

/// Serializes a net; `<y>` is the number of links.
pub fn emit_pn_dcl(net: &ProofNet) -> String {
    let y = net.len();
    let mut out = String::new();
    for l in net.link_ids() {
        let _ = writeln!(out, "pn {y} {l} e {}", net.sort(l));
    }
    for l in net.link_ids() {
        let sort = net.sort(l);
        for i in 1..=sort.arity() {
            if let End::Port(q) = net.peer(Port::new(l, i)) {
                let _ = writeln!(out, "pn {y} {l} {i} {}", port_ref(net, q));
            }
        }
    }
    for (a, b) in net.cuts() {
        let _ = writeln!(out, "pn {y} {} 0 {}", port_ref(net, a), port_ref(net, b));
    }
    for (k, &p) in net.conclusions().iter().enumerate() {
        let _ = writeln!(out, "concl {y} {k} {}", port_ref(net, p));
    }
    out
}

#[derive(Clone, Copy)]
struct Ref {
    id: u64,
    side: Option<u32>,
}

enum Tuple {
    Premise { g: Ref, p: u32, b: Ref },
    Cut { g: Ref, b: Ref },
    Concl { k: u32, g: Ref },
}

fn parse_ref(tok: &str) -> Option<Ref> {
    let (id, side) = match tok.split_once('.') {
        Some((id, "l")) => (id, Some(0)),
        Some((id, "r")) => (id, Some(1)),
        Some(_) => return None,
        None => (tok, None),
    };
    Some(Ref {
        id: id.parse().ok()?,
        side,
    })
}

fn parse_sort(tok: &str) -> Option<LinkSort> {
    if tok == "ax" {
        return Some(LinkSort::Ax);
    }
    let (ctor, n): (fn(u32) -> LinkSort, &str) = if let Some(n) = tok.strip_prefix("tensor") {
        (LinkSort::Tensor, n)
    } else {
        let n = tok.strip_prefix("par")?;
        (LinkSort::Par, n)
    };
    Some(ctor(n.parse().ok()?))
}

struct Parser {
    b: NetBuilder,
    ids: HashMap<u64, LinkId>,
}

impl Parser {
    fn resolve(&self, r: Ref, line: usize) -> Result<Port, NetError> {
        let err = |msg: String| NetError::Parse { line, msg };
        let &l = self
            .ids
            .get(&r.id)
            .ok_or_else(|| err(format!("reference to undeclared link {}", r.id)))?;
        let sort = self.b.sort(l);
        let index = match (sort, r.side) {
            (LinkSort::Ax, Some(s)) => s,
            (LinkSort::Ax, None) => {
                match (0..2).find(|&i| self.b.peer(Port::new(l, i)) == End::Open) {
                    Some(i) => i,
                    None => return Err(err(format!("axiom {} has no free port", r.id))),
                }
            }
            (_, Some(_)) => return Err(err(format!("link {} is not an axiom", r.id))),
            (_, None) => 0,
        };
        Ok(Port::new(l, index))
    }

    fn attach(&mut self, a: Port, b: Port, line: usize) -> Result<(), NetError> {
        for p in [a, b] {
            if self.b.peer(p) != End::Open {
                return Err(NetError::Parse {
                    line,
                    msg: format!("port {p} connected twice"),
                });
            }
        }
        if a == b {
            return Err(NetError::Parse {
                line,
                msg: format!("port {a} wired to itself"),
            });
        }
        self.b.connect(a, b);
        Ok(())
    }
}

/// Parses the tuple format. Link identifiers may be arbitrary decimals;
/// links are numbered densely in declaration order.
pub fn parse_pn_dcl(text: &str) -> Result<ProofNet, NetError> {
    let mut p = Parser {
        b: NetBuilder::new(),
        ids: HashMap::new(),
    };
    let mut tuples = Vec::new();
    let mut tag: Option<String> = None;
    for (n, raw) in text.lines().enumerate() {
        let line = n + 1;
        let err = |msg: &str| NetError::Parse {
            line,
            msg: msg.to_string(),
        };
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let f: Vec<&str> = body.split_whitespace().collect();
        if f.len() < 4 {
            return Err(err("expected at least four fields"));
        }
        match &tag {
            None => tag = Some(f[1].to_string()),
            Some(t) if t != f[1] => return Err(err("inconsistent net name")),
            _ => {}
        }
        match (f[0], f.len()) {
            ("pn", 5) if f[3] == "e" => {
                let id: u64 = f[2].parse().map_err(|_| err("bad link identifier"))?;
                let sort = parse_sort(f[4]).ok_or_else(|| err("unknown sort"))?;
                if !sort.is_ax() && sort.arity() < 2 {
                    return Err(err("tensor and par need arity at least 2"));
                }
                if p.ids.contains_key(&id) {
                    return Err(err("link declared twice"));
                }
                let l = p.b.add_link(sort);
                p.ids.insert(id, l);
            }
            ("pn", 5) => {
                let g = parse_ref(f[2]).ok_or_else(|| err("bad link reference"))?;
                let b = parse_ref(f[4]).ok_or_else(|| err("bad link reference"))?;
                let idx: u32 = f[3].parse().map_err(|_| err("bad port index"))?;
                let t = if idx == 0 {
                    Tuple::Cut { g, b }
                } else {
                    Tuple::Premise { g, p: idx, b }
                };
                tuples.push((line, t));
            }
            ("concl", 4) => {
                let k: u32 = f[2].parse().map_err(|_| err("bad conclusion index"))?;
                let g = parse_ref(f[3]).ok_or_else(|| err("bad link reference"))?;
                tuples.push((line, Tuple::Concl { k, g }));
            }
            _ => return Err(err("unrecognized tuple")),
        }
    }

    // explicit axiom sides first, so suffix-free references see the right free port
    let explicit = |t: &Tuple| match t {
        Tuple::Premise { g, b, .. } | Tuple::Cut { g, b } => g.side.is_some() || b.side.is_some(),
        Tuple::Concl { g, .. } => g.side.is_some(),
    };
    tuples.sort_by_key(|(_, t)| !explicit(t));

    let mut concls: Vec<(u32, Port, usize)> = Vec::new();
    for (line, t) in tuples {
        match t {
            Tuple::Premise { g, p: idx, b } => {
                let gp = p.resolve(g, line)?;
                let sort = p.b.sort(gp.link);
                if sort.is_ax() || idx > sort.arity() {
                    return Err(NetError::Parse {
                        line,
                        msg: format!("premise {idx} exceeds the arity of {sort}"),
                    });
                }
                let bp = p.resolve(b, line)?;
                p.attach(Port::new(gp.link, idx), bp, line)?;
            }
            Tuple::Cut { g, b } => {
                let gp = p.resolve(g, line)?;
                let bp = p.resolve(b, line)?;
                p.attach(gp, bp, line)?;
            }
            Tuple::Concl { k, g } => {
                let gp = p.resolve(g, line)?;
                if p.b.peer(gp) != End::Open {
                    return Err(NetError::Parse {
                        line,
                        msg: format!("port {gp} connected twice"),
                    });
                }
                // placeholder so later suffix-free references skip this port
                p.b.set(gp, End::Conclusion(u32::MAX));
                concls.push((k, gp, line));
            }
        }
    }
    concls.sort_by_key(|c| c.0);
    for (expect, &(k, gp, line)) in concls.iter().enumerate() {
        if k as usize != expect {
            return Err(NetError::Parse {
                line,
                msg: format!("conclusion {expect} missing or duplicated"),
            });
        }
        p.b.set(gp, End::Open);
        p.b.conclude(gp);
    }
    p.b.finish()
}
