//! Random generators for test corpora and fuzzing.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::netcore::{End, LinkSort, NetBuilder, Port, ProofNet};
use crate::typing::{dual, Formula};

/// Builds the η-expanded identity on `a`: a cut-free net with conclusions
/// `[dual(a), a]`. Returns the two conclusion ports without concluding them.
pub fn eta_into(b: &mut NetBuilder, a: &Formula) -> (Port, Port) {
    match a {
        Formula::Var(_) => {
            let l = b.ax();
            (Port::new(l, 1), Port::new(l, 0))
        }
        Formula::DualVar(_) => {
            let l = b.ax();
            (Port::new(l, 0), Port::new(l, 1))
        }
        Formula::Tensor(cs) | Formula::Par(cs) => {
            let n = cs.len() as u32;
            let parts: Vec<(Port, Port)> = cs.iter().map(|c| eta_into(b, c)).collect();
            let (pos, neg) = if matches!(a, Formula::Tensor(_)) {
                (b.tensor(n), b.par(n))
            } else {
                (b.par(n), b.tensor(n))
            };
            for (i, (_, p)) in parts.iter().enumerate() {
                b.connect(Port::new(pos, i as u32 + 1), *p);
            }
            for (j, (d, _)) in parts.iter().rev().enumerate() {
                b.connect(Port::new(neg, j as u32 + 1), *d);
            }
            (Port::principal(neg), Port::principal(pos))
        }
    }
}

pub fn eta_expansion(a: &Formula) -> ProofNet {
    let mut b = NetBuilder::new();
    let (d, p) = eta_into(&mut b, a);
    b.conclude(d);
    b.conclude(p);
    b.build()
}

struct Component {
    ends: Vec<(Port, Formula)>,
}

/// A random correct and typable net with roughly `target` links, grown as a
/// sequent-calculus derivation: axioms, tensors across components, pars
/// within one, and cuts either against an η-expansion of the cut formula or
/// against an axiom conclusion of another component.
pub fn random_net<R: Rng + ?Sized>(rng: &mut R, target: usize) -> ProofNet {
    let mut b = NetBuilder::new();
    let mut comps: Vec<Component> = Vec::new();
    let mut fresh_var = 0u32;
    let mut new_axiom = |b: &mut NetBuilder, comps: &mut Vec<Component>| {
        let l = b.ax();
        let x = fresh_var;
        fresh_var += 1;
        comps.push(Component {
            ends: vec![
                (Port::new(l, 0), Formula::Var(x)),
                (Port::new(l, 1), Formula::DualVar(x)),
            ],
        });
    };
    new_axiom(&mut b, &mut comps);
    while b.len() < target || comps.len() > 1 {
        let growing = b.len() < target;
        let roll = rng.gen_range(0..100);
        if growing && (roll < 25 || comps.is_empty()) {
            new_axiom(&mut b, &mut comps);
        } else if roll < 55 && comps.len() >= 2 {
            // tensor over k components
            let k = rng.gen_range(2..=comps.len().min(4));
            comps.shuffle(rng);
            let mut picked: Vec<Component> = comps.drain(..k).collect();
            let t = b.tensor(k as u32);
            let mut ends = Vec::new();
            let mut fs = Vec::new();
            for (i, c) in picked.iter_mut().enumerate() {
                let j = rng.gen_range(0..c.ends.len());
                let (p, f) = c.ends.remove(j);
                b.connect(Port::new(t, i as u32 + 1), p);
                fs.push(f);
                ends.append(&mut c.ends);
            }
            ends.push((Port::principal(t), Formula::Tensor(fs)));
            comps.push(Component { ends });
        } else if roll < 75 && growing {
            // par within one component
            let ci = rng.gen_range(0..comps.len());
            let c = &mut comps[ci];
            if c.ends.len() >= 3 || (c.ends.len() == 2 && rng.gen_bool(0.3)) {
                let k = rng.gen_range(2..=c.ends.len().min(4));
                c.ends.shuffle(rng);
                let taken: Vec<(Port, Formula)> = c.ends.drain(..k).collect();
                let p = b.par(k as u32);
                let mut fs = Vec::new();
                for (i, (q, f)) in taken.into_iter().enumerate() {
                    b.connect(Port::new(p, i as u32 + 1), q);
                    fs.push(f);
                }
                c.ends.push((Port::principal(p), Formula::Par(fs)));
            }
        } else if roll < 88 && growing {
            // cut against the η-expansion of the chosen formula
            let ci = rng.gen_range(0..comps.len());
            let c = &mut comps[ci];
            let j = rng.gen_range(0..c.ends.len());
            let (p, f) = c.ends.remove(j);
            if f.size() > 12 {
                c.ends.push((p, f));
                continue;
            }
            let (d, q) = eta_into(&mut b, &f);
            b.connect(p, d);
            c.ends.push((q, f));
        } else if comps.len() >= 2 {
            // cut an axiom conclusion of one component against another
            comps.shuffle(rng);
            let atomic = comps[0].ends.iter().position(|(p, f)| {
                b.sort(p.link) == LinkSort::Ax && matches!(f, Formula::Var(_) | Formula::DualVar(_))
            });
            let Some(j) = atomic else { continue };
            if comps[0].ends.len() + comps[1].ends.len() < 3 {
                continue;
            }
            let mut first = comps.remove(0);
            let mut second = comps.remove(0);
            let (p, f) = first.ends.remove(j);
            let k = rng.gen_range(0..second.ends.len());
            let (q, g) = second.ends.remove(k);
            let (x, image) = match f {
                Formula::Var(x) => (x, dual(&g)),
                Formula::DualVar(x) => (x, g.clone()),
                _ => unreachable!(),
            };
            for (_, h) in first.ends.iter_mut() {
                *h = h.substitute(x, &image);
            }
            b.connect(p, q);
            first.ends.append(&mut second.ends);
            comps.push(first);
        }
    }
    let mut ends = comps.pop().expect("one component").ends;
    ends.shuffle(rng);
    for (p, _) in ends {
        b.conclude(p);
    }
    b.build()
}

/// Exchanges the far ends of two distinct wires chosen at random, without
/// checking the result. Returns `None` when a chosen port hangs on a
/// conclusion or both ports lie on the same wire.
pub fn swap_wire_ends<R: Rng + ?Sized>(net: &ProofNet, rng: &mut R) -> Option<ProofNet> {
    let ports: Vec<Port> = net.ports().collect();
    let a = *ports.choose(rng)?;
    let c = *ports.choose(rng)?;
    let (End::Port(bp), End::Port(dp)) = (net.peer(a), net.peer(c)) else {
        return None;
    };
    if a == c || a == dp {
        return None;
    }
    let mut b = NetBuilder::from_net(net.clone());
    b.connect(a, dp);
    b.connect(c, bp);
    Some(b.build())
}

/// Like `swap_wire_ends`, but returns `None` when the swap would break a
/// structural invariant.
pub fn swap_wires<R: Rng + ?Sized>(net: &ProofNet, rng: &mut R) -> Option<ProofNet> {
    swap_wire_ends(net, rng).filter(|m| crate::netcore::validate_structure(m).is_empty())
}
