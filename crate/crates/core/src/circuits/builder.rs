use std::collections::HashMap;

use super::{ustconn2, Circuit, Gate, GateId, Label, MultiCircuit};

/// Builds circuits bottom-up, folding constants, sharing identical gates
/// and dropping whatever the output does not read. Gates are created in
/// topological order.
#[derive(Clone, Debug)]
pub struct GateBuilder {
    gates: Vec<Gate>,
    memo: HashMap<Gate, GateId>,
    input_count: usize,
    /// truth table of every gate over all input vectors, bit `m` being the
    /// value on the vector whose input `i` is bit `i` of `m`; `None` where
    /// a connectivity gate has a malformed encoding on some vector
    tables: Option<Vec<Option<u64>>>,
}

impl GateBuilder {
    /// A builder whose first `n` gates are the inputs.
    pub fn new(n: usize) -> Self {
        let mut b = GateBuilder {
            gates: Vec::new(),
            memo: HashMap::new(),
            input_count: n,
            tables: None,
        };
        for i in 0..n {
            b.intern(Label::Input(i as u32), Vec::new());
        }
        b
    }

    /// Like [`GateBuilder::new`], but with at most six inputs every gate
    /// that takes the same value on all `2^n` input vectors is replaced by
    /// that constant.
    pub fn with_truth_tables(n: usize) -> Self {
        let mut b = GateBuilder {
            gates: Vec::new(),
            memo: HashMap::new(),
            input_count: n,
            tables: (n <= 6).then(Vec::new),
        };
        for i in 0..n {
            b.intern(Label::Input(i as u32), Vec::new());
        }
        b
    }

    fn mask(&self) -> u64 {
        if self.input_count >= 6 {
            !0
        } else {
            (1u64 << (1 << self.input_count)) - 1
        }
    }

    fn table_of(&self, label: Label, preds: &[GateId]) -> Option<u64> {
        let tables = self.tables.as_ref()?;
        let t = |p: &GateId| tables[*p as usize];
        let mask = self.mask();
        let v = match label {
            Label::Input(i) => (0..64).fold(0u64, |acc, m| acc | ((m >> i) & 1) << m),
            Label::Const(b) => {
                if b {
                    !0
                } else {
                    0
                }
            }
            Label::Not => !t(&preds[0])?,
            Label::And(_) => preds.iter().try_fold(!0u64, |acc, p| Some(acc & t(p)?))?,
            Label::Or(_) => preds.iter().try_fold(0u64, |acc, p| Some(acc | t(p)?))?,
            Label::UstConn2(n) => {
                let cols: Vec<u64> = preds.iter().map(t).collect::<Option<_>>()?;
                let mut out = 0u64;
                let mut bits = vec![false; cols.len()];
                for m in 0..(1usize << self.input_count.min(6)) {
                    for (b, c) in bits.iter_mut().zip(&cols) {
                        *b = c >> m & 1 == 1;
                    }
                    out |= (ustconn2(n, &bits).ok()? as u64) << m;
                }
                out
            }
        };
        Some(v & mask)
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    fn intern(&mut self, label: Label, preds: Vec<GateId>) -> GateId {
        let table = self.table_of(label, &preds);
        if !label.is_source() {
            match table {
                Some(0) => return self.constant(false),
                Some(t) if t == self.mask() => return self.constant(true),
                _ => {}
            }
        }
        let gate = Gate { label, preds };
        if let Some(&g) = self.memo.get(&gate) {
            return g;
        }
        let g = self.gates.len() as GateId;
        self.gates.push(gate.clone());
        self.memo.insert(gate, g);
        if let Some(t) = self.tables.as_mut() {
            t.push(table);
        }
        g
    }

    pub fn input(&self, i: usize) -> GateId {
        assert!(i < self.input_count, "input {i} out of range");
        i as GateId
    }

    pub fn constant(&mut self, b: bool) -> GateId {
        self.intern(Label::Const(b), Vec::new())
    }

    pub fn value(&self, g: GateId) -> Option<bool> {
        match self.gates[g as usize].label {
            Label::Const(b) => Some(b),
            _ => None,
        }
    }

    pub fn not(&mut self, a: GateId) -> GateId {
        if let Some(b) = self.value(a) {
            return self.constant(!b);
        }
        let gate = &self.gates[a as usize];
        if gate.label == Label::Not {
            return gate.preds[0];
        }
        self.intern(Label::Not, vec![a])
    }

    fn junction(&mut self, args: &[GateId], and: bool) -> GateId {
        // `and` is absorbed by 0 and ignores 1; `or` the other way round
        let absorbing = !and;
        let mut ops: Vec<GateId> = Vec::with_capacity(args.len());
        for &a in args {
            match self.value(a) {
                Some(b) if b == absorbing => return self.constant(absorbing),
                Some(_) => {}
                None => ops.push(a),
            }
        }
        ops.sort_unstable();
        ops.dedup();
        for &a in &ops {
            let g = &self.gates[a as usize];
            if g.label == Label::Not && ops.binary_search(&g.preds[0]).is_ok() {
                return self.constant(absorbing);
            }
        }
        match ops.len() {
            0 => self.constant(!absorbing),
            1 => ops[0],
            k => {
                let label = if and {
                    Label::And(k as u32)
                } else {
                    Label::Or(k as u32)
                };
                self.intern(label, ops)
            }
        }
    }

    pub fn and(&mut self, args: &[GateId]) -> GateId {
        self.junction(args, true)
    }

    pub fn or(&mut self, args: &[GateId]) -> GateId {
        self.junction(args, false)
    }

    /// `a` when `s` holds, `b` otherwise.
    pub fn mux(&mut self, s: GateId, a: GateId, b: GateId) -> GateId {
        if a == b {
            return a;
        }
        match self.value(s) {
            Some(true) => return a,
            Some(false) => return b,
            None => {}
        }
        let ns = self.not(s);
        let x = self.and(&[s, a]);
        let y = self.and(&[ns, b]);
        self.or(&[x, y])
    }

    pub fn xor(&mut self, a: GateId, b: GateId) -> GateId {
        let nb = self.not(b);
        self.mux(a, nb, b)
    }

    /// Whether two equally long bit vectors are equal.
    pub fn equal(&mut self, a: &[GateId], b: &[GateId]) -> GateId {
        assert_eq!(a.len(), b.len());
        let eqs: Vec<GateId> = a
            .iter()
            .zip(b)
            .map(|(&x, &y)| {
                let d = self.xor(x, y);
                self.not(d)
            })
            .collect();
        self.and(&eqs)
    }

    /// Whether the bit vector `a` equals the constant `k`.
    pub fn equal_const(&mut self, a: &[GateId], k: u64) -> GateId {
        let lits: Vec<GateId> = a
            .iter()
            .enumerate()
            .map(|(i, &x)| if k >> i & 1 == 1 { x } else { self.not(x) })
            .collect();
        self.and(&lits)
    }

    pub fn constant_word(&mut self, k: u64, width: usize) -> Vec<GateId> {
        (0..width).map(|i| self.constant(k >> i & 1 == 1)).collect()
    }

    /// Bitwise `s ? a : b` over words.
    pub fn mux_word(&mut self, s: GateId, a: &[GateId], b: &[GateId]) -> Vec<GateId> {
        a.iter().zip(b).map(|(&x, &y)| self.mux(s, x, y)).collect()
    }

    /// The word `words[i]` for the single selector in `sel` that holds, or
    /// zero when none does. Selectors must be mutually exclusive.
    pub fn select_word(
        &mut self,
        sel: &[GateId],
        words: &[Vec<GateId>],
        width: usize,
    ) -> Vec<GateId> {
        (0..width)
            .map(|bit| {
                let terms: Vec<GateId> = sel
                    .iter()
                    .zip(words)
                    .map(|(&s, w)| self.and(&[s, w[bit]]))
                    .collect();
                self.or(&terms)
            })
            .collect()
    }

    pub fn ustconn2(&mut self, n: u32, bits: &[GateId]) -> GateId {
        let consts: Option<Vec<bool>> = bits.iter().map(|&g| self.value(g)).collect();
        if let Some(Ok(r)) = consts.map(|v| ustconn2(n, &v)) {
            return self.constant(r);
        }
        let label = Label::UstConn2(n);
        assert_eq!(bits.len(), label.fan_in(), "ustconn2 encoding width");
        self.intern(label, bits.to_vec())
    }

    /// Keeps the inputs and the gates the outputs depend on, renumbered in
    /// creation order; returns the gates and the new ids of the outputs.
    fn prune(self, outputs: &[GateId]) -> (Vec<Gate>, Vec<GateId>, usize) {
        let n = self.gates.len();
        let mut live = vec![false; n];
        for &o in outputs {
            live[o as usize] = true;
        }
        for g in (0..n).rev() {
            if live[g] {
                for &p in &self.gates[g].preds {
                    live[p as usize] = true;
                }
            }
        }
        for l in live.iter_mut().take(self.input_count) {
            *l = true;
        }
        let mut map = vec![GateId::MAX; n];
        let mut gates = Vec::new();
        for (g, gate) in self.gates.into_iter().enumerate() {
            if live[g] {
                map[g] = gates.len() as GateId;
                gates.push(Gate {
                    label: gate.label,
                    preds: gate.preds.iter().map(|&p| map[p as usize]).collect(),
                });
            }
        }
        let outputs = outputs.iter().map(|&o| map[o as usize]).collect();
        (gates, outputs, self.input_count)
    }

    pub fn finish(self, output: GateId) -> Circuit {
        let (gates, outputs, n) = self.prune(&[output]);
        Circuit::new(gates, outputs[0], n).expect("builder output is well formed")
    }

    pub fn finish_many(self, outputs: &[GateId]) -> MultiCircuit {
        let (gates, outputs, input_count) = self.prune(outputs);
        MultiCircuit {
            gates,
            outputs,
            input_count,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constants_fold() {
        let mut b = GateBuilder::new(2);
        let (x, one, zero) = (b.input(0), b.constant(true), b.constant(false));
        assert_eq!(b.and(&[x, zero]), zero);
        assert_eq!(b.and(&[x, one]), x);
        assert_eq!(b.or(&[x, one]), one);
        let nx = b.not(x);
        assert_eq!(b.not(nx), x);
        let t = b.or(&[x, nx]);
        assert_eq!(b.value(t), Some(true));
        assert_eq!(b.mux(one, x, nx), x);
    }

    #[test]
    fn truth_tables_fold_tautologies() {
        let mut b = GateBuilder::with_truth_tables(2);
        let (x, y) = (b.input(0), b.input(1));
        let a = b.and(&[x, y]);
        let na = b.not(a);
        let nx = b.not(x);
        let t = b.or(&[na, x]);
        assert_eq!(b.value(t), Some(true));
        let f = b.and(&[a, nx]);
        assert_eq!(b.value(f), Some(false));
    }
}
