use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use super::formula::{alpha_normalize, dual, formula_depth, Formula};
use crate::netcore::{End, LinkSort, Port, ProofNet};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum TypeError {
    #[error("cut between {0} and {1}: connectives do not match")]
    Clash(Port, Port),
    #[error("a formula would have to contain itself")]
    Occurs,
    #[error("a variable would have to equal its own dual")]
    SelfDual,
    #[error("premise structure is cyclic at link {0}")]
    Cyclic(u32),
    #[error("port {0} is not attached to a principal port")]
    Dangling(Port),
}

#[derive(Clone, Debug)]
enum Node {
    Var,
    DualVar,
    Con { tensor: bool, children: Vec<u32> },
}

/// Term graph with a union-find over formula nodes.
/// Every node has a dual node; unifying two nodes also unifies their duals,
/// so classes come in dual pairs. Formulas are never expanded into trees
/// unless asked for, which keeps types of deep nets cheap.
struct Store {
    nodes: Vec<Node>,
    dual: Vec<u32>,
    parent: Vec<u32>,
    con: Vec<Option<u32>>,
}

impl Store {
    fn new() -> Self {
        Store {
            nodes: Vec::new(),
            dual: Vec::new(),
            parent: Vec::new(),
            con: Vec::new(),
        }
    }

    fn push_pair(&mut self, a: Node, b: Node) -> u32 {
        let i = self.nodes.len() as u32;
        let a_con = matches!(a, Node::Con { .. });
        self.nodes.push(a);
        self.nodes.push(b);
        self.dual.extend([i + 1, i]);
        self.parent.extend([i, i + 1]);
        if a_con {
            self.con.extend([Some(i), Some(i + 1)]);
        } else {
            self.con.extend([None, None]);
        }
        i
    }

    fn var(&mut self) -> u32 {
        self.push_pair(Node::Var, Node::DualVar)
    }

    fn con(&mut self, tensor: bool, children: Vec<u32>) -> u32 {
        let duals = children
            .iter()
            .rev()
            .map(|&c| self.dual[c as usize])
            .collect();
        self.push_pair(
            Node::Con { tensor, children },
            Node::Con {
                tensor: !tensor,
                children: duals,
            },
        )
    }

    fn find(&mut self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            let up = self.parent[self.parent[x as usize] as usize];
            self.parent[x as usize] = up;
            x = up;
        }
        x
    }

    fn unify(&mut self, a: u32, b: u32) -> Result<(), ()> {
        let mut work = vec![(a, b)];
        while let Some((a, b)) = work.pop() {
            let (ra, rb) = (self.find(a), self.find(b));
            if ra == rb {
                continue;
            }
            let (ca, cb) = (self.con[ra as usize], self.con[rb as usize]);
            self.parent[ra as usize] = rb;
            self.con[rb as usize] = cb.or(ca);
            work.push((self.dual[a as usize], self.dual[b as usize]));
            if let (Some(x), Some(y)) = (ca, cb) {
                let (
                    Node::Con {
                        tensor: tx,
                        children: kx,
                    },
                    Node::Con {
                        tensor: ty,
                        children: ky,
                    },
                ) = (&self.nodes[x as usize], &self.nodes[y as usize])
                else {
                    unreachable!()
                };
                if tx != ty || kx.len() != ky.len() {
                    return Err(());
                }
                work.extend(kx.iter().copied().zip(ky.iter().copied()));
            }
        }
        Ok(())
    }

    /// Rejects cyclic classes and classes equal to their own dual.
    fn check(&mut self) -> Result<(), TypeError> {
        let n = self.nodes.len();
        for i in 0..n as u32 {
            if self.find(i) == self.find(self.dual[i as usize]) {
                return Err(TypeError::SelfDual);
            }
        }
        // 0 unseen, 1 on stack, 2 done
        let mut state = vec![0u8; n];
        for start in 0..n as u32 {
            let r = self.find(start);
            if state[r as usize] != 0 {
                continue;
            }
            let mut stack = vec![(r, 0usize)];
            state[r as usize] = 1;
            while let Some(&mut (node, ref mut next)) = stack.last_mut() {
                let children = match self.con[node as usize] {
                    Some(c) => match &self.nodes[c as usize] {
                        Node::Con { children, .. } => children.clone(),
                        _ => unreachable!(),
                    },
                    None => Vec::new(),
                };
                if *next < children.len() {
                    let child = self.find(children[*next]);
                    *next += 1;
                    match state[child as usize] {
                        0 => {
                            state[child as usize] = 1;
                            stack.push((child, 0));
                        }
                        1 => return Err(TypeError::Occurs),
                        _ => {}
                    }
                } else {
                    state[node as usize] = 2;
                    stack.pop();
                }
            }
        }
        Ok(())
    }
}

/// Principal typing of a net kept as a shared term graph.
pub struct TypeGraph {
    store: Store,
    /// formula node produced at each principal port
    produced: HashMap<Port, u32>,
    cuts: Vec<(Port, Port)>,
    conclusions: Vec<Port>,
    depth_memo: HashMap<u32, usize>,
}

fn produce(
    net: &ProofNet,
    store: &mut Store,
    produced: &mut HashMap<Port, u32>,
    visiting: &mut [bool],
    p: Port,
) -> Result<u32, TypeError> {
    if let Some(&f) = produced.get(&p) {
        return Ok(f);
    }
    let sort = net.sort(p.link);
    let f = match sort {
        LinkSort::Ax => {
            let v = store.var();
            produced.insert(Port::new(p.link, 0), v);
            produced.insert(Port::new(p.link, 1), v + 1);
            return Ok(if p.index == 0 { v } else { v + 1 });
        }
        LinkSort::Tensor(n) | LinkSort::Par(n) => {
            if visiting[p.link as usize] {
                return Err(TypeError::Cyclic(p.link));
            }
            visiting[p.link as usize] = true;
            let mut cs = Vec::with_capacity(n as usize);
            for i in 1..=n {
                let here = Port::new(p.link, i);
                let q = match net.peer(here) {
                    End::Port(q) if net.is_principal(q) => q,
                    _ => return Err(TypeError::Dangling(here)),
                };
                cs.push(produce(net, store, produced, visiting, q)?);
            }
            visiting[p.link as usize] = false;
            store.con(matches!(sort, LinkSort::Tensor(_)), cs)
        }
    };
    produced.insert(p, f);
    Ok(f)
}

impl TypeGraph {
    pub fn infer(net: &ProofNet) -> Result<TypeGraph, TypeError> {
        let mut store = Store::new();
        let mut produced = HashMap::new();
        let mut visiting = vec![false; net.len()];
        for l in net.link_ids() {
            let sort = net.sort(l);
            for i in 0..sort.port_count() as u32 {
                if sort.is_principal(i) {
                    produce(
                        net,
                        &mut store,
                        &mut produced,
                        &mut visiting,
                        Port::new(l, i),
                    )?;
                }
            }
        }
        let cuts = net.cuts();
        for &(a, b) in &cuts {
            let fa = produced[&a];
            let fb = store.dual[produced[&b] as usize];
            store.unify(fa, fb).map_err(|_| TypeError::Clash(a, b))?;
        }
        store.check()?;
        Ok(TypeGraph {
            store,
            produced,
            cuts,
            conclusions: net.conclusions().to_vec(),
            depth_memo: HashMap::new(),
        })
    }

    fn class_depth(&mut self, node: u32) -> usize {
        let r = self.store.find(node);
        if let Some(&d) = self.depth_memo.get(&r) {
            return d;
        }
        let d = match self.store.con[r as usize] {
            None => 1,
            Some(c) => {
                let children = match &self.store.nodes[c as usize] {
                    Node::Con { children, .. } => children.clone(),
                    _ => unreachable!(),
                };
                1 + children
                    .into_iter()
                    .map(|k| self.class_depth(k))
                    .max()
                    .unwrap_or(0)
            }
        };
        self.depth_memo.insert(r, d);
        d
    }

    /// Depth of the formula typing each cut, in the order of `ProofNet::cuts`.
    pub fn cut_depths(&mut self) -> Vec<((Port, Port), usize)> {
        let cuts = self.cuts.clone();
        cuts.into_iter()
            .map(|(a, b)| {
                let f = self.produced[&a];
                ((a, b), self.class_depth(f))
            })
            .collect()
    }

    pub fn depth_at(&mut self, p: Port) -> usize {
        let f = self.produced[&p];
        self.class_depth(f)
    }

    pub fn max_cut_depth(&mut self) -> usize {
        self.cut_depths()
            .into_iter()
            .map(|(_, d)| d)
            .max()
            .unwrap_or(0)
    }

    fn expand(&mut self, node: u32, names: &mut Names) -> Formula {
        let r = self.store.find(node);
        match self.store.con[r as usize] {
            Some(c) => {
                let (tensor, children) = match &self.store.nodes[c as usize] {
                    Node::Con { tensor, children } => (*tensor, children.clone()),
                    _ => unreachable!(),
                };
                let cs = children
                    .into_iter()
                    .map(|k| self.expand(k, names))
                    .collect();
                if tensor {
                    Formula::Tensor(cs)
                } else {
                    Formula::Par(cs)
                }
            }
            None => {
                let d = self.store.find(self.store.dual[r as usize]);
                let positive = names.positive(r, d);
                let key = if positive { r } else { d };
                let next = names.map.len() as u32;
                let x = *names.map.entry(key).or_insert(next);
                if positive {
                    Formula::Var(x)
                } else {
                    Formula::DualVar(x)
                }
            }
        }
    }

    /// Expands the principal type into formula trees. Variables are numbered
    /// by first occurrence, conclusions first.
    pub fn assignment(&mut self) -> (Vec<Formula>, TypeAssignment) {
        let mut names = Names::new(&mut self.store);
        let concl: Vec<Formula> = self
            .conclusions
            .clone()
            .into_iter()
            .map(|p| {
                let f = self.produced[&p];
                self.expand(f, &mut names)
            })
            .collect();
        let mut ports: Vec<Port> = self.produced.keys().copied().collect();
        ports.sort();
        let mut map = BTreeMap::new();
        for p in ports {
            let f = self.produced[&p];
            map.insert(p, self.expand(f, &mut names));
        }
        (
            concl.clone(),
            TypeAssignment {
                ports: map,
                conclusions: concl,
            },
        )
    }
}

struct Names {
    map: HashMap<u32, u32>,
    /// least `Var` node id in each class
    least_var: HashMap<u32, u32>,
}

impl Names {
    fn new(store: &mut Store) -> Self {
        let mut least_var = HashMap::new();
        for i in 0..store.nodes.len() as u32 {
            if let Node::Var = store.nodes[i as usize] {
                let r = store.find(i);
                least_var.entry(r).or_insert(i);
            }
        }
        Names {
            map: HashMap::new(),
            least_var,
        }
    }

    fn positive(&self, r: u32, d: u32) -> bool {
        let a = self.least_var.get(&r).copied().unwrap_or(u32::MAX);
        let b = self.least_var.get(&d).copied().unwrap_or(u32::MAX);
        a < b
    }
}

/// The ordered conclusion formulas of a net.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sequent(pub Vec<Formula>);

impl Sequent {
    /// Equal up to renaming of variables.
    pub fn alpha_eq(&self, other: &Sequent) -> bool {
        alpha_normalize(&self.0) == alpha_normalize(&other.0)
    }
}

impl std::fmt::Display for Sequent {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "|-")?;
        for (i, a) in self.0.iter().enumerate() {
            write!(f, "{}{a}", if i == 0 { " " } else { ", " })?;
        }
        Ok(())
    }
}

/// A formula on every principal port: the formula the link produces there.
/// For a wire into an auxiliary port this is the premise formula; at a cut
/// the two ends carry dual formulas.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TypeAssignment {
    pub ports: BTreeMap<Port, Formula>,
    pub conclusions: Vec<Formula>,
}

impl TypeAssignment {
    /// Replaces a variable everywhere.
    pub fn substitute(&self, x: u32, a: &Formula) -> TypeAssignment {
        TypeAssignment {
            ports: self
                .ports
                .iter()
                .map(|(&p, f)| (p, f.substitute(x, a)))
                .collect(),
            conclusions: self
                .conclusions
                .iter()
                .map(|f| f.substitute(x, a))
                .collect(),
        }
    }

    /// Verifies every local typing constraint of the net.
    pub fn check(&self, net: &ProofNet) -> Result<(), String> {
        let at = |p: Port| {
            self.ports
                .get(&p)
                .ok_or_else(|| format!("no formula at port {p}"))
        };
        for l in net.link_ids() {
            match net.sort(l) {
                LinkSort::Ax => {
                    if *at(Port::new(l, 1))? != dual(at(Port::new(l, 0))?) {
                        return Err(format!("axiom {l} ports are not dual"));
                    }
                }
                sort @ (LinkSort::Tensor(n) | LinkSort::Par(n)) => {
                    let mut cs = Vec::new();
                    for i in 1..=n {
                        let q = net
                            .peer(Port::new(l, i))
                            .port()
                            .ok_or_else(|| format!("port {l}.{i} is not wired"))?;
                        cs.push(at(q)?.clone());
                    }
                    let expect = if matches!(sort, LinkSort::Tensor(_)) {
                        Formula::Tensor(cs)
                    } else {
                        Formula::Par(cs)
                    };
                    if *at(Port::principal(l))? != expect {
                        return Err(format!("link {l} does not build its premises"));
                    }
                }
            }
        }
        for (a, b) in net.cuts() {
            if *at(a)? != dual(at(b)?) {
                return Err(format!("cut {a}-{b} is not typed by dual formulas"));
            }
        }
        for (k, &p) in net.conclusions().iter().enumerate() {
            if self.conclusions.get(k) != Some(at(p)?) {
                return Err(format!("conclusion {k} disagrees with its port"));
            }
        }
        Ok(())
    }

    /// Largest formula depth over the cuts of `net`, 0 when cut-free.
    pub fn cut_depth(&self, net: &ProofNet) -> usize {
        net.cuts()
            .into_iter()
            .filter_map(|(a, _)| self.ports.get(&a).map(formula_depth))
            .max()
            .unwrap_or(0)
    }
}

pub fn infer_principal_type(net: &ProofNet) -> Result<(Sequent, TypeAssignment), TypeError> {
    let (seq, asg) = TypeGraph::infer(net)?.assignment();
    Ok((Sequent(seq), asg))
}

pub fn net_size(net: &ProofNet) -> usize {
    net.len()
}

/// Maximum depth of a cut formula under the principal type; 0 when cut-free.
pub fn net_depth(net: &ProofNet) -> Result<usize, TypeError> {
    Ok(TypeGraph::infer(net)?.max_cut_depth())
}
