//! Circuit generators: random circuits, exhaustive enumeration of small
//! circuits, and nested families.

use rand::Rng;

use super::{Circuit, Gate, GateId, Label};

/// The gate labels used by the generators.
pub const SMALL_BASIS: [Label; 7] = [
    Label::Const(false),
    Label::Const(true),
    Label::Not,
    Label::And(2),
    Label::Or(2),
    Label::And(3),
    Label::Or(3),
];

/// Removes gates the output does not read, keeping inputs, and renumbers
/// the rest in their original order.
fn prune(gates: Vec<Gate>, output: GateId, input_count: usize) -> Circuit {
    let n = gates.len();
    let mut live = vec![false; n];
    live[output as usize] = true;
    for g in (0..n).rev() {
        if live[g] {
            for &p in &gates[g].preds {
                live[p as usize] = true;
            }
        }
    }
    let mut map = vec![GateId::MAX; n];
    let mut kept = Vec::new();
    for (g, gate) in gates.into_iter().enumerate() {
        if live[g] || matches!(gate.label, Label::Input(_)) {
            map[g] = kept.len() as GateId;
            kept.push(Gate {
                label: gate.label,
                preds: gate.preds.iter().map(|&p| map[p as usize]).collect(),
            });
        }
    }
    Circuit::new(kept, map[output as usize], input_count).expect("generated circuit is well formed")
}

/// A random circuit on `inputs` inputs with between 1 and `max_gates`
/// gates over the small basis; the last gate is the output and gates it
/// does not read are dropped.
pub fn random_circuit<R: Rng + ?Sized>(rng: &mut R, inputs: usize, max_gates: usize) -> Circuit {
    let mut gates: Vec<Gate> = (0..inputs)
        .map(|i| Gate {
            label: Label::Input(i as u32),
            preds: Vec::new(),
        })
        .collect();
    let k = rng.gen_range(1..=max_gates.max(1));
    for j in 0..k {
        let avail = gates.len();
        let label = if avail == 0 {
            Label::Const(rng.gen())
        } else if j + 1 == k {
            // the output reads something, so the circuit is not a lone constant
            SMALL_BASIS[rng.gen_range(2..SMALL_BASIS.len())]
        } else {
            SMALL_BASIS[rng.gen_range(0..SMALL_BASIS.len())]
        };
        // favour recent gates so that circuits get deep
        let preds = (0..label.fan_in())
            .map(|_| {
                let lo = if rng.gen_bool(0.6) {
                    avail.saturating_sub(3)
                } else {
                    0
                };
                rng.gen_range(lo..avail) as GateId
            })
            .collect();
        gates.push(Gate { label, preds });
    }
    let output = gates.len() as GateId - 1;
    prune(gates, output, inputs)
}

/// Increasing `k`-tuples over `0..nodes`.
fn subsets(nodes: GateId, k: usize) -> Vec<Vec<GateId>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for rest in subsets(nodes, k - 1) {
        let lo = rest.last().map_or(0, |&x| x + 1);
        for x in lo..nodes {
            let mut t = rest.clone();
            t.push(x);
            out.push(t);
        }
    }
    out
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord)]
struct Key {
    level: usize,
    label: Label,
    preds: Vec<GateId>,
}

struct Enum<'a> {
    inputs: usize,
    max_gates: usize,
    gates: Vec<Gate>,
    keys: Vec<Key>,
    visit: &'a mut dyn FnMut(&Circuit),
}

impl Enum<'_> {
    fn level(&self, node: GateId) -> usize {
        let i = node as usize;
        if i < self.inputs {
            0
        } else {
            self.keys[i - self.inputs].level
        }
    }

    fn emit_if_complete(&mut self) {
        let total = self.inputs + self.gates.len();
        if self.gates.is_empty() {
            return;
        }
        let mut read = vec![false; total];
        for g in &self.gates {
            for &p in &g.preds {
                read[p as usize] = true;
            }
        }
        // inputs are first read in index order
        let mut next_input = 0;
        for g in &self.gates {
            for &p in &g.preds {
                if (p as usize) < self.inputs {
                    if p as usize > next_input {
                        return;
                    }
                    next_input = next_input.max(p as usize + 1);
                }
            }
        }
        // every input is read and only the last gate is unread
        if read[..total - 1].iter().all(|&r| r) && !read[total - 1] {
            let mut all: Vec<Gate> = (0..self.inputs)
                .map(|i| Gate {
                    label: Label::Input(i as u32),
                    preds: Vec::new(),
                })
                .collect();
            all.extend(self.gates.iter().cloned());
            let c = Circuit::new(all, total as GateId - 1, self.inputs)
                .expect("enumerated circuit is well formed");
            (self.visit)(&c);
        }
    }

    fn extend(&mut self) {
        self.emit_if_complete();
        if self.gates.len() == self.max_gates {
            return;
        }
        let nodes = (self.inputs + self.gates.len()) as GateId;
        let mut candidates: Vec<(Key, Gate)> = Vec::new();
        for &label in &SMALL_BASIS {
            for preds in subsets(nodes, label.fan_in()) {
                let level = preds.iter().map(|&p| self.level(p) + 1).max().unwrap_or(0);
                let key = Key {
                    level,
                    label,
                    preds: preds.clone(),
                };
                if self.keys.last().is_none_or(|last| *last < key) {
                    candidates.push((key, Gate { label, preds }));
                }
            }
        }
        for (key, gate) in candidates {
            self.keys.push(key);
            self.gates.push(gate);
            self.extend();
            self.gates.pop();
            self.keys.pop();
        }
    }
}

/// Visits every circuit with at most `max_inputs` inputs, all of them read,
/// and between 1 and `max_gates` gates over the small basis, constants
/// counted as gates, where no gate reads the same node twice. Circuits are
/// taken up to reordering of gates, of operands and of inputs: gates appear
/// sorted by (depth, label, operands), operands are increasing, no gate is
/// repeated, and inputs are first read in index order. Returns the number
/// of circuits visited.
pub fn enumerate_circuits(
    max_inputs: usize,
    max_gates: usize,
    visit: &mut dyn FnMut(&Circuit),
) -> usize {
    let mut count = 0usize;
    let mut counting = |c: &Circuit| {
        count += 1;
        visit(c);
    };
    for inputs in 0..=max_inputs {
        let mut e = Enum {
            inputs,
            max_gates,
            gates: Vec::new(),
            keys: Vec::new(),
            visit: &mut counting,
        };
        e.extend();
    }
    count
}

/// `x1 ∧ x2 ∧ ... ∧ x(d+1)` as a left-nested chain of depth `d`.
pub fn and_chain(depth: usize) -> Circuit {
    let n = depth + 1;
    let mut gates: Vec<Gate> = (0..n)
        .map(|i| Gate {
            label: Label::Input(i as u32),
            preds: Vec::new(),
        })
        .collect();
    let mut acc: GateId = 0;
    for i in 1..n {
        gates.push(Gate {
            label: Label::And(2),
            preds: vec![acc, i as GateId],
        });
        acc = gates.len() as GateId - 1;
    }
    let output = acc;
    Circuit::new(gates, output, n).expect("chain is well formed")
}

/// A complete binary tree of depth `d` over `2^d` inputs whose levels
/// alternate between conjunction and disjunction.
pub fn balanced_tree(depth: usize) -> Circuit {
    let n = 1usize << depth;
    let mut gates: Vec<Gate> = (0..n)
        .map(|i| Gate {
            label: Label::Input(i as u32),
            preds: Vec::new(),
        })
        .collect();
    let mut layer: Vec<GateId> = (0..n as GateId).collect();
    let mut level = 0;
    while layer.len() > 1 {
        let label = if level % 2 == 0 {
            Label::And(2)
        } else {
            Label::Or(2)
        };
        layer = layer
            .chunks(2)
            .map(|pair| {
                gates.push(Gate {
                    label,
                    preds: pair.to_vec(),
                });
                gates.len() as GateId - 1
            })
            .collect();
        level += 1;
    }
    Circuit::new(gates, layer[0], n).expect("tree is well formed")
}

/// A chain of `depth` gates where every gate reads the previous one twice
/// and an input once, so each intermediate value has fan-out 2.
pub fn fan_out_chain(depth: usize) -> Circuit {
    let n = depth + 1;
    let mut gates: Vec<Gate> = (0..n)
        .map(|i| Gate {
            label: Label::Input(i as u32),
            preds: Vec::new(),
        })
        .collect();
    let mut acc: GateId = 0;
    for i in 1..n {
        let label = if i % 2 == 0 {
            Label::Or(3)
        } else {
            Label::And(3)
        };
        gates.push(Gate {
            label,
            preds: vec![acc, acc, i as GateId],
        });
        acc = gates.len() as GateId - 1;
    }
    Circuit::new(gates, acc, n).expect("chain is well formed")
}

/// `depth` negations of a single input.
pub fn not_chain(depth: usize) -> Circuit {
    let mut gates = vec![Gate {
        label: Label::Input(0),
        preds: Vec::new(),
    }];
    for i in 0..depth {
        gates.push(Gate {
            label: Label::Not,
            preds: vec![i as GateId],
        });
    }
    Circuit::new(gates, depth as GateId, 1).expect("chain is well formed")
}
