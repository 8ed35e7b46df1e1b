//! One reduction round and the result reader as circuits over a
//! configuration. The same code builds the generic circuits, whose inputs
//! are the configuration bits, and specializes them when some bits are
//! known: the builder folds constants, and lookups whose index is known
//! skip straight to the indexed entry.

use crate::circuits::{Circuit, GateBuilder, GateId, MultiCircuit};

use super::{Budget, Configuration, Layout, SimError};

/// A word of gates, least significant bit first.
type Word = Vec<GateId>;

fn const_value(b: &GateBuilder, w: &[GateId]) -> Option<u64> {
    w.iter().enumerate().try_fold(0u64, |acc, (i, &g)| {
        b.value(g).map(|v| acc | (v as u64) << i)
    })
}

/// Whether `k` agrees with the known bits of `w`.
fn may_equal(b: &GateBuilder, w: &[GateId], k: u64) -> bool {
    w.iter()
        .enumerate()
        .all(|(i, &g)| b.value(g).is_none_or(|v| v == (k >> i & 1 == 1)))
        && (w.len() >= 64 || k >> w.len() == 0)
}

pub(crate) struct Sym<'a> {
    pub b: &'a mut GateBuilder,
    pub lay: Layout,
}

/// The parts of a partner field.
#[derive(Clone)]
struct Field {
    bits: Word,
}

impl Field {
    fn tag_port(&self) -> GateId {
        self.bits[0]
    }

    fn slot<'f>(&'f self, lay: &Layout) -> &'f [GateId] {
        &self.bits[2..2 + lay.slot_bits]
    }

    fn port<'f>(&'f self, lay: &Layout) -> &'f [GateId] {
        &self.bits[2 + lay.slot_bits..]
    }
}

impl Sym<'_> {
    fn zeros(&mut self, n: usize) -> Word {
        let z = self.b.constant(false);
        vec![z; n]
    }

    fn field_of(&mut self, row: usize, port: Option<u64>) -> Word {
        // the partner field naming port `port` of `row`; a `None` port is
        // filled in by the caller
        let lay = self.lay;
        let mut w = vec![self.b.constant(true), self.b.constant(false)];
        w.extend(self.b.constant_word(row as u64 + 1, lay.slot_bits));
        w.extend(self.b.constant_word(port.unwrap_or(0), lay.port_bits));
        w
    }

    /// `table[r]` for the row the field points at, or zeros when the field
    /// names no port or a row without an entry. Entries have length `width`.
    fn lookup(&mut self, f: &Field, table: &[Option<Word>], width: usize) -> Word {
        let lay = self.lay;
        let tag = f.tag_port();
        if self.b.value(tag) == Some(false) {
            return self.zeros(width);
        }
        let slot = f.slot(&lay).to_vec();
        if let Some(s) = const_value(self.b, &slot) {
            let entry = (s as usize)
                .checked_sub(1)
                .and_then(|r| table.get(r))
                .and_then(|e| e.clone());
            return match entry {
                Some(e) => e.iter().map(|&g| self.b.and(&[tag, g])).collect(),
                None => self.zeros(width),
            };
        }
        let mut sels = Vec::new();
        let mut words = Vec::new();
        for (r, e) in table.iter().enumerate() {
            let Some(e) = e else { continue };
            if !may_equal(self.b, &slot, r as u64 + 1) {
                continue;
            }
            let eq = self.b.equal_const(&slot, r as u64 + 1);
            sels.push(self.b.and(&[tag, eq]));
            words.push(e.clone());
        }
        self.b.select_word(&sels, &words, width)
    }

    /// `words[i - 1]` where `i` is the value of `index`, for `i` in
    /// `1..=words.len()`; zeros otherwise.
    fn pick(&mut self, index: &[GateId], words: &[Word], width: usize) -> Word {
        if let Some(i) = const_value(self.b, index) {
            return match (i as usize).checked_sub(1).and_then(|i| words.get(i)) {
                Some(w) => w.clone(),
                None => self.zeros(width),
            };
        }
        let mut sels = Vec::new();
        let mut ws = Vec::new();
        for (i, w) in words.iter().enumerate() {
            if may_equal(self.b, index, i as u64 + 1) {
                sels.push(self.b.equal_const(index, i as u64 + 1));
                ws.push(w.clone());
            }
        }
        self.b.select_word(&sels, &ws, width)
    }

    fn is_zero(&mut self, w: &[GateId]) -> GateId {
        self.b.equal_const(w, 0)
    }

    /// The field names port 0 of some row.
    fn names_principal(&mut self, f: &Field) -> GateId {
        let lay = self.lay;
        let z = self.is_zero(f.port(&lay));
        self.b.and(&[f.tag_port(), z])
    }
}

struct Rows {
    sort: Vec<[GateId; 2]>,
    arity: Vec<Word>,
    fields: Vec<Vec<Field>>,
    conclusions: Vec<Field>,
    is_ax: Vec<GateId>,
    is_tensor: Vec<GateId>,
    is_par: Vec<GateId>,
}

fn read_rows(s: &mut Sym, cfg: &[GateId]) -> Rows {
    let lay = s.lay;
    let slots = lay.budget.slots;
    let mut rows = Rows {
        sort: Vec::with_capacity(slots),
        arity: Vec::with_capacity(slots),
        fields: Vec::with_capacity(slots),
        conclusions: Vec::new(),
        is_ax: Vec::with_capacity(slots),
        is_tensor: Vec::with_capacity(slots),
        is_par: Vec::with_capacity(slots),
    };
    let field = |at: usize| Field {
        bits: cfg[at..at + lay.field_bits].to_vec(),
    };
    for r in 0..slots {
        let at = lay.sort_at(r);
        let (s0, s1) = (cfg[at], cfg[at + 1]);
        let (n0, n1) = (s.b.not(s0), s.b.not(s1));
        rows.is_ax.push(s.b.and(&[s0, n1]));
        rows.is_tensor.push(s.b.and(&[n0, s1]));
        rows.is_par.push(s.b.and(&[s0, s1]));
        rows.sort.push([s0, s1]);
        let at = lay.arity_at(r);
        rows.arity.push(cfg[at..at + lay.port_bits].to_vec());
        rows.fields.push(
            (0..lay.ports())
                .map(|p| field(lay.partner_at(r, p)))
                .collect(),
        );
    }
    rows.conclusions = (0..lay.budget.conclusions)
        .map(|k| field(lay.conclusion_at(k)))
        .collect();
    rows
}

fn flags(s: &mut Sym, v: &[GateId]) -> Vec<Option<Word>> {
    v.iter()
        .map(|&g| {
            if s.b.value(g) == Some(false) {
                None
            } else {
                Some(vec![g])
            }
        })
        .collect()
}

/// A configuration after one round of one kind: every row's sort, arity
/// and fields, and the conclusion fields.
struct Next {
    keep: Vec<GateId>,
    fields: Vec<Vec<Word>>,
    conclusions: Vec<Word>,
    any: GateId,
}

fn redirect_all(
    s: &mut Sym,
    rows: &Rows,
    mut rule: impl FnMut(&mut Sym, &Field) -> Word,
) -> (Vec<Vec<Word>>, Vec<Word>) {
    let fields = rows
        .fields
        .iter()
        .map(|fs| fs.iter().map(|f| rule(s, f)).collect())
        .collect();
    let conclusions = rows.conclusions.iter().map(|f| rule(s, f)).collect();
    (fields, conclusions)
}

/// Contracts every maximal chain of axioms. A chain is found with one
/// connectivity gate per pair of possible chain ends.
#[allow(clippy::needless_range_loop)]
fn t_round(s: &mut Sym, rows: &Rows) -> Next {
    let lay = s.lay;
    let slots = lay.budget.slots;
    let fw = lay.field_bits;
    let ax_table = flags(s, &rows.is_ax);
    let mut nb_ax = vec![[s.b.constant(false); 2]; slots];
    let mut nb_field = vec![Vec::new(); slots];
    for g in 0..slots {
        for i in 0..2 {
            if s.b.value(rows.is_ax[g]) != Some(false) {
                let hit = s.lookup(&rows.fields[g][i], &ax_table, 1)[0];
                nb_ax[g][i] = s.b.and(&[rows.is_ax[g], hit]);
            }
            let node = rows.fields[g][i].slot(&lay)[..lay.node_bits()].to_vec();
            nb_field[g].extend(node.iter().map(|&x| s.b.and(&[nb_ax[g][i], x])));
        }
    }
    let in_chain: Vec<GateId> = nb_ax.iter().map(|n| s.b.or(n)).collect();
    let end: Vec<GateId> = nb_ax.iter().map(|n| s.b.xor(n[0], n[1])).collect();
    let ends: Vec<usize> = (0..slots)
        .filter(|&g| s.b.value(end[g]) != Some(false))
        .collect();

    // outer field, own outer port and own inner port of every possible end
    let mut outer = vec![Vec::new(); slots];
    let mut own = vec![Vec::new(); slots];
    let mut inner = vec![Vec::new(); slots];
    for &g in &ends {
        let n0 = nb_ax[g][0];
        outer[g] =
            s.b.mux_word(n0, &rows.fields[g][1].bits, &rows.fields[g][0].bits);
        let mut w = s.field_of(g, None);
        w[2 + lay.slot_bits] = n0;
        own[g] = w;
        let mut w = s.field_of(g, None);
        w[2 + lay.slot_bits] = s.b.not(n0);
        inner[g] = w;
    }

    // which pairs of ends bound the same chain
    let known: Option<Vec<u64>> = nb_field
        .iter()
        .flatten()
        .map(|&g| s.b.value(g).map(u64::from))
        .collect();
    let mut pair = vec![vec![s.b.constant(false); slots]; slots];
    let node_bits = lay.node_bits();
    let component: Option<Vec<usize>> = known.map(|_| {
        let mut parent: Vec<usize> = (0..slots).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut x = x;
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for g in 0..slots {
            for i in 0..2 {
                let f = &nb_field[g][i * node_bits..(i + 1) * node_bits];
                let h = const_value(s.b, f).unwrap() as usize;
                if h != 0 && h <= slots {
                    let (a, c) = (find(&mut parent, g), find(&mut parent, h - 1));
                    parent[a] = c;
                }
            }
        }
        (0..slots).map(|g| find(&mut parent, g)).collect()
    });
    let flat: Word = nb_field.iter().flatten().copied().collect();
    for (x, &g) in ends.iter().enumerate() {
        for &h in &ends[x + 1..] {
            let conn = match &component {
                Some(c) => s.b.constant(c[g] == c[h]),
                None => {
                    let mut bits = flat.clone();
                    bits.extend(s.b.constant_word(g as u64 + 1, node_bits));
                    bits.extend(s.b.constant_word(h as u64 + 1, node_bits));
                    s.b.ustconn2(slots as u32, &bits)
                }
            };
            let p = s.b.and(&[conn, end[g], end[h]]);
            pair[g][h] = p;
            pair[h][g] = p;
        }
    }

    let mut far_outer = vec![Vec::new(); slots];
    let mut replace = vec![None; slots];
    let mut survive: Vec<GateId> = in_chain.iter().map(|&c| s.b.not(c)).collect();
    for &g in &ends {
        let others: Vec<usize> = ends.iter().copied().filter(|&h| h != g).collect();
        let sels: Vec<GateId> = others.iter().map(|&h| pair[g][h]).collect();
        let outs: Vec<Word> = others.iter().map(|&h| outer[h].clone()).collect();
        let inners: Vec<Word> = others.iter().map(|&h| inner[h].clone()).collect();
        let y = s.b.select_word(&sels, &outs, fw);
        let w = s.b.select_word(&sels, &inners, fw);
        let later: Vec<GateId> = others
            .iter()
            .filter(|&&h| h > g)
            .map(|&h| pair[g][h])
            .collect();
        let first = s.b.or(&later);
        let px = s.names_principal(&Field {
            bits: outer[g].clone(),
        });
        let py = s.names_principal(&Field { bits: y.clone() });
        let direct = s.b.or(&[px, py]);
        let kept = s.b.mux_word(first, &own[g], &w);
        let mut r = vec![end[g]];
        r.extend(s.b.mux_word(direct, &y, &kept));
        replace[g] = Some(r);
        let nd = s.b.not(direct);
        let stays = s.b.and(&[nd, first]);
        survive[g] = s.b.or(&[survive[g], stays]);
        far_outer[g] = y;
    }

    let rule = |s: &mut Sym, f: &Field| -> Word {
        let hit = s.lookup(f, &replace, fw + 1);
        s.b.mux_word(hit[0], &hit[1..], &f.bits)
    };
    let (mut fields, conclusions) = redirect_all(s, rows, rule);
    for &g in &ends {
        // the surviving first axiom of a chain takes the far end on its
        // inner port
        for i in 0..2 {
            let via =
                s.b.mux_word(nb_ax[g][i], &far_outer[g], &rows.fields[g][i].bits);
            fields[g][i] = s.b.mux_word(in_chain[g], &via, &fields[g][i]);
        }
    }
    let any = s.b.or(&in_chain);
    Next {
        keep: survive,
        fields,
        conclusions,
        any,
    }
}

/// Removes every axiom cut against a tensor or par that is not part of a
/// chain.
fn a_round(s: &mut Sym, rows: &Rows) -> Next {
    let lay = s.lay;
    let slots = lay.budget.slots;
    let fw = lay.field_bits;
    let ax_table = flags(s, &rows.is_ax);
    let mut cut = vec![s.b.constant(false); slots];
    let mut table = vec![None; slots];
    for g in 0..slots {
        if s.b.value(rows.is_ax[g]) == Some(false) {
            continue;
        }
        let mut lits = vec![rows.is_ax[g]];
        let mut principal = Vec::new();
        for i in 0..2 {
            let f = &rows.fields[g][i];
            let hit = s.lookup(f, &ax_table, 1)[0];
            lits.push(s.b.not(hit));
            principal.push(s.names_principal(f));
        }
        lits.push(s.b.or(&principal));
        cut[g] = s.b.and(&lits);
        if s.b.value(cut[g]) != Some(false) {
            let mut e = vec![cut[g]];
            e.extend(&rows.fields[g][0].bits);
            e.extend(&rows.fields[g][1].bits);
            table[g] = Some(e);
        }
    }
    let rule = |s: &mut Sym, f: &Field| -> Word {
        let hit = s.lookup(f, &table, 2 * fw + 1);
        let lay = s.lay;
        let other =
            s.b.mux_word(f.port(&lay)[0], &hit[1..1 + fw], &hit[1 + fw..]);
        s.b.mux_word(hit[0], &other, &f.bits)
    };
    let (fields, conclusions) = redirect_all(s, rows, rule);
    let keep = cut.iter().map(|&c| s.b.not(c)).collect();
    let any = s.b.or(&cut);
    Next {
        keep,
        fields,
        conclusions,
        any,
    }
}

/// Removes every tensor/par cut, wiring tensor premise `i` to par premise
/// `n + 1 - i`.
fn m_round(s: &mut Sym, rows: &Rows) -> Next {
    let lay = s.lay;
    let slots = lay.budget.slots;
    let fw = lay.field_bits;
    let k = lay.budget.arity as usize;
    let par_table = flags(s, &rows.is_par);
    let tensor_table = flags(s, &rows.is_tensor);
    let mut cut = vec![s.b.constant(false); slots];
    // premises of each row in reverse order, `rev[s][i - 1]` being premise
    // `n + 1 - i`
    let mut rev = vec![None; slots];
    for r in 0..slots {
        let logical = s.b.or(&[rows.is_tensor[r], rows.is_par[r]]);
        if s.b.value(logical) == Some(false) {
            continue;
        }
        let f = &rows.fields[r][0];
        let pr = s.names_principal(f);
        let opposite_par = s.lookup(f, &par_table, 1)[0];
        let opposite_tensor = s.lookup(f, &tensor_table, 1)[0];
        let t = s.b.and(&[rows.is_tensor[r], pr, opposite_par]);
        let p = s.b.and(&[rows.is_par[r], pr, opposite_tensor]);
        cut[r] = s.b.or(&[t, p]);
        let mut w = Vec::with_capacity(k * fw);
        for i in 1..=k {
            let sels: Vec<GateId> = (i..=k)
                .map(|n| s.b.equal_const(&rows.arity[r], n as u64))
                .collect();
            let words: Vec<Word> = (i..=k)
                .map(|n| rows.fields[r][n + 1 - i].bits.clone())
                .collect();
            w.extend(s.b.select_word(&sels, &words, fw));
        }
        rev[r] = Some(w);
    }
    let mut table = vec![None; slots];
    for r in 0..slots {
        if s.b.value(cut[r]) == Some(false) {
            continue;
        }
        let mut e = vec![cut[r]];
        e.extend(s.lookup(&rows.fields[r][0], &rev, k * fw));
        table[r] = Some(e);
    }
    let rule = |s: &mut Sym, f: &Field| -> Word {
        let hit = s.lookup(f, &table, k * fw + 1);
        if s.b.value(hit[0]) == Some(false) {
            return f.bits.clone();
        }
        let words: Vec<Word> = hit[1..].chunks(fw).map(|c| c.to_vec()).collect();
        let lay = s.lay;
        let port = f.port(&lay).to_vec();
        let val = s.pick(&port, &words, fw);
        s.b.mux_word(hit[0], &val, &f.bits)
    };
    let (fields, conclusions) = redirect_all(s, rows, rule);
    let keep = cut.iter().map(|&c| s.b.not(c)).collect();
    let any = s.b.or(&cut);
    Next {
        keep,
        fields,
        conclusions,
        any,
    }
}

fn assemble(s: &mut Sym, rows: &Rows, next: &Next) -> Word {
    let lay = s.lay;
    let mut out = Vec::with_capacity(lay.total_bits());
    for r in 0..lay.budget.slots {
        let keep = next.keep[r];
        let mut row: Word = rows.sort[r].to_vec();
        row.extend(&rows.arity[r]);
        for f in &next.fields[r] {
            row.extend(f);
        }
        out.extend(row.iter().map(|&g| s.b.and(&[keep, g])));
    }
    for f in &next.conclusions {
        out.extend(f);
    }
    out
}

/// One round of the default strategy: contract chains if there are any,
/// else remove axiom cuts if there are any, else remove tensor/par cuts.
/// A cut-free configuration is left unchanged.
pub(crate) fn step(b: &mut GateBuilder, lay: Layout, cfg: &[GateId]) -> Word {
    let mut s = Sym { b, lay };
    let rows = read_rows(&mut s, cfg);
    let t = t_round(&mut s, &rows);
    if s.b.value(t.any) == Some(true) {
        return assemble(&mut s, &rows, &t);
    }
    let a = a_round(&mut s, &rows);
    let m = m_round(&mut s, &rows);
    let t_out = assemble(&mut s, &rows, &t);
    let a_out = assemble(&mut s, &rows, &a);
    let m_out = assemble(&mut s, &rows, &m);
    (0..cfg.len())
        .map(|i| {
            let after_m = s.b.mux(m.any, m_out[i], cfg[i]);
            let after_a = s.b.mux(a.any, a_out[i], after_m);
            s.b.mux(t.any, t_out[i], after_a)
        })
        .collect()
}

/// Whether the configuration's last conclusion is a tensor whose first
/// premise holds the value 1, read as the result reader does.
pub(crate) fn extract(b: &mut GateBuilder, lay: Layout, cfg: &[GateId]) -> GateId {
    let Some(last) = lay.budget.conclusions.checked_sub(1) else {
        return b.constant(false);
    };
    if lay.budget.arity < 3 {
        return b.constant(false);
    }
    let mut s = Sym { b, lay };
    let rows = read_rows(&mut s, cfg);
    let slots = lay.budget.slots;
    let fw = lay.field_bits;
    let with = |s: &mut Sym, flag: &[GateId], arity: Option<u64>| -> Vec<Option<Word>> {
        (0..slots)
            .map(|r| {
                let mut lits = vec![flag[r]];
                if let Some(n) = arity {
                    lits.push(s.b.equal_const(&rows.arity[r], n));
                }
                Some(vec![s.b.and(&lits)])
            })
            .collect()
    };
    let port_table = |p: usize| -> Vec<Option<Word>> {
        (0..slots)
            .map(|r| Some(rows.fields[r][p].bits.clone()))
            .collect()
    };
    let tensors = with(&mut s, &rows.is_tensor, None);
    let values = with(&mut s, &rows.is_par, Some(3));
    let pairs = with(&mut s, &rows.is_tensor, Some(2));
    let axioms = with(&mut s, &rows.is_ax, None);

    let root = rows.conclusions[last].clone();
    let root_ok = s.names_principal(&root);
    let root_tensor = s.lookup(&root, &tensors, 1)[0];
    let v = Field {
        bits: s.lookup(&root, &port_table(1), fw),
    };
    let v_ok = s.names_principal(&v);
    let v_par = s.lookup(&v, &values, 1)[0];
    let t = Field {
        bits: s.lookup(&v, &port_table(3), fw),
    };
    let t_ok = s.names_principal(&t);
    let t_tensor = s.lookup(&t, &pairs, 1)[0];
    let a = Field {
        bits: s.lookup(&v, &port_table(1), fw),
    };
    let a_ax = s.lookup(&a, &axioms, 1)[0];
    let both: Vec<Option<Word>> = (0..slots)
        .map(|r| {
            let mut w = rows.fields[r][0].bits.clone();
            w.extend(&rows.fields[r][1].bits);
            Some(w)
        })
        .collect();
    let ports = s.lookup(&a, &both, 2 * fw);
    let j = a.port(&lay)[0];
    let across = Field {
        bits: s.b.mux_word(j, &ports[..fw], &ports[fw..]),
    };
    let same_link = s.b.equal(across.slot(&lay), t.slot(&lay));
    let first_premise = s.b.equal_const(across.port(&lay), 1);
    s.b.and(&[
        root_ok,
        root_tensor,
        v_ok,
        v_par,
        t_ok,
        t_tensor,
        a_ax,
        across.tag_port(),
        same_link,
        first_premise,
    ])
}

/// The round circuit for a budget: its inputs and outputs are the bits of
/// a configuration.
pub fn build_step_circuit(budget: Budget) -> Result<MultiCircuit, SimError> {
    let lay = Layout::new(budget)?;
    let n = lay.total_bits();
    let mut b = GateBuilder::new(n);
    let cfg: Word = (0..n).map(|i| b.input(i)).collect();
    let out = step(&mut b, lay, &cfg);
    Ok(b.finish_many(&out))
}

/// The result reader for a budget: its inputs are the bits of a cut-free
/// configuration.
pub fn build_extraction_circuit(budget: Budget) -> Result<Circuit, SimError> {
    let lay = Layout::new(budget)?;
    let n = lay.total_bits();
    let mut b = GateBuilder::new(n);
    let cfg: Word = (0..n).map(|i| b.input(i)).collect();
    let out = extract(&mut b, lay, &cfg);
    Ok(b.finish(out))
}

/// Applies one round to a known configuration by specializing the round
/// circuit to it.
pub fn step_configuration(cfg: &Configuration) -> Configuration {
    let mut b = GateBuilder::new(0);
    let bits: Word = cfg.bits.iter().map(|&x| b.constant(x)).collect();
    let out = step(&mut b, cfg.layout, &bits);
    Configuration {
        layout: cfg.layout,
        bits: out
            .iter()
            .map(|&g| b.value(g).expect("known input folds"))
            .collect(),
    }
}
