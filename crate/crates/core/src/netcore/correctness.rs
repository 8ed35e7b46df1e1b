use super::net::{End, LinkSort, Port, ProofNet};

struct UnionFind {
    parent: Vec<u32>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n as u32).collect(),
        }
    }

    fn find(&mut self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            let up = self.parent[self.parent[x as usize] as usize];
            self.parent[x as usize] = up;
            x = up;
        }
        x
    }

    /// Returns false when both already share a root.
    fn union(&mut self, a: u32, b: u32) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra as usize] = rb;
        true
    }
}

/// Link-level edges of the correctness graph: wires that survive every
/// switching, and for each par the wires entering its auxiliary ports.
struct SwitchingGraph {
    solid: Vec<(u32, u32)>,
    /// (par link, premise links in port order)
    pars: Vec<(u32, Vec<u32>)>,
}

fn switching_graph(net: &ProofNet) -> SwitchingGraph {
    let mut solid = Vec::new();
    let mut pars = Vec::new();
    for (l, link) in net.links().iter().enumerate() {
        let l = l as u32;
        if let LinkSort::Par(_) = link.sort {
            let premises = link.ports[1..]
                .iter()
                .filter_map(|e| e.port().map(|p| p.link))
                .collect();
            pars.push((l, premises));
        }
        for (i, &end) in link.ports.iter().enumerate() {
            let End::Port(q) = end else { continue };
            let here_par_aux = matches!(link.sort, LinkSort::Par(_)) && i > 0;
            let there_par_aux = matches!(net.sort(q.link), LinkSort::Par(_)) && q.index > 0;
            if here_par_aux || there_par_aux {
                continue;
            }
            if (l, i as u32) < (q.link, q.index) {
                solid.push((l, q.link));
            }
        }
    }
    SwitchingGraph { solid, pars }
}

/// Danos contractibility: contract every solid edge, then repeatedly
/// collapse a par whose premise wires all lead to one other component.
/// The net is correct iff this ends in a single point.
pub fn check_correctness(net: &ProofNet) -> bool {
    let n = net.len();
    if n == 0 {
        return false;
    }
    let g = switching_graph(net);
    let mut uf = UnionFind::new(n);
    for &(a, b) in &g.solid {
        if !uf.union(a, b) {
            return false;
        }
    }
    let mut pending = g.pars;
    loop {
        let before = pending.len();
        let mut rest = Vec::with_capacity(before);
        for (par, premises) in pending {
            let home = uf.find(par);
            let mut target = None;
            let mut uniform = true;
            for &q in &premises {
                let r = uf.find(q);
                if r == home {
                    return false;
                }
                match target {
                    None => target = Some(r),
                    Some(t) if t != r => uniform = false,
                    _ => {}
                }
            }
            match target {
                Some(t) if uniform => {
                    uf.union(home, t);
                }
                _ => rest.push((par, premises)),
            }
        }
        pending = rest;
        if pending.is_empty() || pending.len() == before {
            break;
        }
    }
    if !pending.is_empty() {
        return false;
    }
    let root = uf.find(0);
    (1..n as u32).all(|l| uf.find(l) == root)
}

/// Exhaustive Danos–Regnier check: every switching must leave an acyclic,
/// connected graph. Returns `None` when more than `limit` switchings exist.
pub fn switching_criterion(net: &ProofNet, limit: u64) -> Option<bool> {
    let n = net.len();
    if n == 0 {
        return Some(false);
    }
    let g = switching_graph(net);
    let mut total: u64 = 1;
    for (_, premises) in &g.pars {
        total = total.checked_mul(premises.len().max(1) as u64)?;
        if total > limit {
            return None;
        }
    }
    let mut choice = vec![0usize; g.pars.len()];
    loop {
        let mut uf = UnionFind::new(n);
        let mut edges = 0usize;
        let mut acyclic = true;
        for &(a, b) in &g.solid {
            edges += 1;
            if !uf.union(a, b) {
                acyclic = false;
                break;
            }
        }
        if acyclic {
            for (k, (par, premises)) in g.pars.iter().enumerate() {
                let Some(&q) = premises.get(choice[k]) else {
                    continue;
                };
                edges += 1;
                if !uf.union(*par, q) {
                    acyclic = false;
                    break;
                }
            }
        }
        if !acyclic || edges + 1 != n {
            return Some(false);
        }
        // advance the mixed-radix counter
        let mut k = 0;
        loop {
            if k == choice.len() {
                return Some(true);
            }
            choice[k] += 1;
            if choice[k] < g.pars[k].1.len() {
                break;
            }
            choice[k] = 0;
            k += 1;
        }
    }
}

/// Decides correctness by sequentialization: remove a terminal par, or
/// split on a terminal tensor or a cut whose removal disconnects the net
/// into one part per premise. Polynomial, and independent of the other two
/// checks.
pub fn sequentializable(net: &ProofNet) -> bool {
    if net.is_empty() || !super::validate_structure(net).is_empty() {
        return false;
    }
    let all: Vec<u32> = (0..net.len() as u32).collect();
    let mut inside = vec![false; net.len()];
    sequentialize(net, &all, &mut inside)
}

/// Components of `links` with the link `drop` removed and the wire at
/// `cut` ignored; `inside` marks `links` on entry and is restored on exit.
fn components(
    net: &ProofNet,
    links: &[u32],
    drop: Option<u32>,
    cut: Option<Port>,
    inside: &mut [bool],
) -> Vec<i32> {
    let mut comp = vec![-1i32; net.len()];
    let mut count = 0;
    for &start in links {
        if Some(start) == drop || comp[start as usize] >= 0 {
            continue;
        }
        comp[start as usize] = count;
        let mut stack = vec![start];
        while let Some(l) = stack.pop() {
            for i in 0..net.sort(l).port_count() as u32 {
                let p = Port::new(l, i);
                let End::Port(q) = net.peer(p) else { continue };
                if Some(p) == cut || Some(q) == cut {
                    continue;
                }
                if inside[q.link as usize] && Some(q.link) != drop && comp[q.link as usize] < 0 {
                    comp[q.link as usize] = count;
                    stack.push(q.link);
                }
            }
        }
        count += 1;
    }
    comp
}

fn sequentialize(net: &ProofNet, links: &[u32], inside: &mut [bool]) -> bool {
    for &l in links {
        inside[l as usize] = true;
    }
    let result = sequentialize_marked(net, links, inside);
    for &l in links {
        inside[l as usize] = false;
    }
    result
}

fn sequentialize_marked(net: &ProofNet, links: &[u32], inside: &mut [bool]) -> bool {
    if let [l] = links {
        if net.sort(*l) == LinkSort::Ax {
            return true;
        }
    }
    let comp = components(net, links, None, None, inside);
    if links.iter().any(|&l| comp[l as usize] != 0) {
        return false;
    }
    let outside = |p: Port, inside: &[bool]| match net.peer(p) {
        End::Port(q) => !inside[q.link as usize],
        _ => true,
    };
    let premise_links = |l: u32| -> Option<Vec<u32>> {
        (1..=net.sort(l).arity())
            .map(|i| net.peer(Port::new(l, i)).port().map(|q| q.link))
            .collect()
    };
    // a terminal par can always be removed
    for &l in links {
        if matches!(net.sort(l), LinkSort::Par(_)) && outside(Port::principal(l), inside) {
            let rest: Vec<u32> = links.iter().copied().filter(|&x| x != l).collect();
            inside[l as usize] = false;
            let ok = sequentialize_marked(net, &rest, inside);
            inside[l as usize] = true;
            return ok;
        }
    }
    // splitting candidates: (removed link, ignored cut wire, parts)
    let mut candidates: Vec<(Option<u32>, Option<Port>, Vec<u32>)> = Vec::new();
    for &l in links {
        let sort = net.sort(l);
        if matches!(sort, LinkSort::Tensor(_)) && outside(Port::principal(l), inside) {
            match premise_links(l) {
                Some(ps) => candidates.push((Some(l), None, ps)),
                None => return false,
            }
        }
        let principals: &[u32] = if sort.is_ax() { &[0, 1] } else { &[0] };
        for &i in principals {
            let p = Port::new(l, i);
            if let End::Port(q) = net.peer(p) {
                if net.is_principal(q) && inside[q.link as usize] && p < q {
                    candidates.push((None, Some(p), vec![l, q.link]));
                }
            }
        }
    }
    for (drop, cut, parts) in candidates {
        let comp = components(net, links, drop, cut, inside);
        let mut seen: Vec<i32> = parts.iter().map(|&p| comp[p as usize]).collect();
        seen.sort_unstable();
        seen.dedup();
        let count = links
            .iter()
            .map(|&x| comp[x as usize] + 1)
            .max()
            .unwrap_or(0);
        if seen.len() != parts.len() || count as usize != parts.len() {
            continue;
        }
        for &x in links {
            inside[x as usize] = false;
        }
        let mut ok = true;
        for c in seen {
            let part: Vec<u32> = links
                .iter()
                .copied()
                .filter(|&x| Some(x) != drop && comp[x as usize] == c)
                .collect();
            ok = ok && sequentialize(net, &part, inside);
        }
        for &x in links {
            inside[x as usize] = true;
        }
        return ok;
    }
    false
}
