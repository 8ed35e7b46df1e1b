use mllu::netcore::*;
use mllu::pieces::*;
use mllu::rewrite::{normalize, Strategy as Policy};
use mllu::typing::{infer_principal_type, Formula, Sequent, TypeGraph};
use proptest::prelude::*;
use std::collections::HashMap;

const B0: &str = "par_s^{q,p,r}(tensor_r^{p,q}(ax_p, ax_q))";
const B1: &str = "par_s^{p,q,r}(tensor_r^{p,q}(ax_p, ax_q))";

fn entry(piece: PieceId, index: usize) -> EntryRef {
    EntryRef { piece, index }
}

fn exit(piece: PieceId, index: usize) -> ExitRef {
    ExitRef { piece, index }
}

/// A circuit made of one piece whose entries are all inputs; `out` picks the
/// exit that reaches the result tensor, the others are discarded.
fn single(kind: PieceKind, out: usize) -> ProofCircuit {
    let mut cb = CircuitBuilder::new();
    let p = cb.add_piece(kind).unwrap();
    for j in 0..kind.exit_count() {
        if j != out {
            cb.discard(exit(p, j)).unwrap();
        }
    }
    let inputs: Vec<EntryRef> = (0..kind.entry_count()).map(|i| entry(p, i)).collect();
    cb.seal(&inputs).unwrap()
}

fn eval(c: &ProofCircuit, bits: &[bool], policy: Policy) -> bool {
    let net = apply_inputs(c, bits).unwrap();
    let (normal, _) = normalize(&net, policy).unwrap();
    read_result(&normal).unwrap()
}

fn all_vectors(n: usize) -> impl Iterator<Item = Vec<bool>> {
    (0..1u32 << n).map(move |m| (0..n).map(|i| m >> i & 1 == 1).collect())
}

type Subst = HashMap<u32, Formula>;

fn resolve(f: &Formula, s: &Subst) -> Formula {
    match f {
        Formula::Var(x) => s.get(x).map_or(f.clone(), |g| resolve(g, s)),
        Formula::DualVar(x) => s.get(x).map_or(f.clone(), |g| resolve(g, s).dual()),
        Formula::Tensor(cs) => Formula::Tensor(cs.iter().map(|c| resolve(c, s)).collect()),
        Formula::Par(cs) => Formula::Par(cs.iter().map(|c| resolve(c, s)).collect()),
    }
}

fn occurs(x: u32, f: &Formula) -> bool {
    let mut vs = Vec::new();
    f.vars(&mut vs);
    vs.contains(&x)
}

/// First-order unification where binding `x` to `f` also binds its dual.
fn unify(a: &Formula, b: &Formula, s: &mut Subst) -> bool {
    let (a, b) = (resolve(a, s), resolve(b, s));
    match (&a, &b) {
        _ if a == b => true,
        (Formula::Var(x), t) | (t, Formula::Var(x)) => {
            !occurs(*x, t) && s.insert(*x, t.clone()).is_none()
        }
        (Formula::DualVar(x), t) | (t, Formula::DualVar(x)) => {
            !occurs(*x, t) && s.insert(*x, t.dual()).is_none()
        }
        (Formula::Tensor(p), Formula::Tensor(q)) | (Formula::Par(p), Formula::Par(q)) => {
            p.len() == q.len() && p.iter().zip(q).all(|(x, y)| unify(x, y, s))
        }
        _ => false,
    }
}

/// Whether a sequent admits an instance of the given shape; pattern
/// variables must not clash with the sequent's.
fn unifiable(seq: &Sequent, pattern: &[Formula]) -> bool {
    let mut s = Subst::new();
    seq.0.len() == pattern.len() && seq.0.iter().zip(pattern).all(|(a, b)| unify(a, b, &mut s))
}

fn boolean_over(x: u32) -> Formula {
    Formula::boolean(&Formula::Var(x))
}

#[test]
fn values_match_their_descriptions() {
    for (kind, text) in [(PieceKind::B0, B0), (PieceKind::B1, B1)] {
        let p = make_piece(kind).unwrap();
        assert_eq!(
            canonical_form(&p.net),
            canonical_form(&parse_description(text).unwrap())
        );
        assert!(check_correctness(&p.net));
    }
}

#[test]
fn negation_of_b0_normalizes_to_b1() {
    for (input, expected) in [(false, B1), (true, B0)] {
        let mut b = NetBuilder::new();
        let neg = make_piece(PieceKind::Neg).unwrap();
        let ports = b.import(&neg.net);
        let v = mllu::pieces::build_value(&mut b, input);
        b.connect(v, ports[0]);
        b.conclude(ports[1]);
        let net = b.build();
        assert!(check_correctness(&net));
        let (normal, _) = normalize(&net, Policy::Tam).unwrap();
        assert_eq!(
            canonical_form(&normal),
            canonical_form(&parse_description(expected).unwrap())
        );
    }
}

#[test]
fn negation_is_type_preserving_and_garbage_free() {
    let neg = make_piece(PieceKind::Neg).unwrap();
    assert_eq!(neg.garbage_count(), 0);
    let (seq, _) = infer_principal_type(&neg.net).unwrap();
    let b = boolean_over(1000);
    assert!(unifiable(&seq, &[b.dual(), b.clone()]), "{seq}");
    // a value through negation keeps the Boolean type
    let mut nb = NetBuilder::new();
    let ports = nb.import(&neg.net);
    let v = build_value(&mut nb, false);
    nb.connect(v, ports[0]);
    nb.conclude(ports[1]);
    let (out, _) = infer_principal_type(&nb.build()).unwrap();
    let (b1, _) = infer_principal_type(&make_piece(PieceKind::B1).unwrap().net).unwrap();
    assert!(out.alpha_eq(&b1), "{out}");
    assert!(unifiable(&out, &[boolean_over(1000)]));
}

#[test]
fn piece_counts_and_sizes() {
    let cases = [
        (PieceKind::B0, 0, 1, 0, 4),
        (PieceKind::B1, 0, 1, 0, 4),
        (PieceKind::Neg, 1, 1, 0, 8),
        (PieceKind::Dupl(1), 1, 1, 1, 12),
    ];
    for (kind, e, x, g, n) in cases {
        let p = make_piece(kind).unwrap();
        assert_eq!(
            (
                p.ends.entries.len(),
                p.ends.exits.len(),
                p.garbage_count(),
                p.net.len()
            ),
            (e, x, g, n),
            "{kind}"
        );
    }
    for n in 2..=8u32 {
        let d = make_piece(PieceKind::Dupl(n)).unwrap();
        assert_eq!(d.net.len(), 9 * n as usize + 6);
        assert_eq!((d.ends.exits.len(), d.garbage_count()), (n as usize, 1));
        for kind in [PieceKind::Conj(n), PieceKind::Disj(n)] {
            let p = make_piece(kind).unwrap();
            assert_eq!(p.net.len(), 8 * (n as usize - 1) + 1, "{kind}");
            assert_eq!(p.ends.entries.len(), n as usize);
            assert_eq!(p.garbage_count(), n as usize - 1);
        }
    }
    // linear in fan-in with constant 9 and offset 6 over every family
    for n in 1..=8u32 {
        for kind in [
            PieceKind::Dupl(n),
            PieceKind::Conj(n.max(2)),
            PieceKind::Disj(n.max(2)),
        ] {
            assert!(
                make_piece(kind).unwrap().net.len()
                    <= PIECE_SIZE_SLOPE * n as usize + PIECE_SIZE_OFFSET
            );
        }
    }
}

#[test]
fn arity_bounds() {
    assert!(make_piece(PieceKind::Dupl(0)).is_err());
    assert!(make_piece(PieceKind::Conj(1)).is_err());
    assert!(make_piece(PieceKind::Disj(0)).is_err());
    assert_eq!("conj3".parse::<PieceKind>(), Ok(PieceKind::Conj(3)));
    assert_eq!("neg".parse::<PieceKind>(), Ok(PieceKind::Neg));
    assert!("disj1".parse::<PieceKind>().is_err());
    assert!("xor2".parse::<PieceKind>().is_err());
}

#[test]
fn every_piece_closure_is_correct_and_typable() {
    for n in 1..=6u32 {
        let mut kinds = vec![PieceKind::Dupl(n)];
        if n >= 2 {
            kinds.extend([PieceKind::Conj(n), PieceKind::Disj(n)]);
        }
        if n == 1 {
            kinds.extend([PieceKind::B0, PieceKind::B1, PieceKind::Neg]);
        }
        for kind in kinds {
            let p = make_piece(kind).unwrap();
            assert!(validate_structure(&p.net).is_empty(), "{kind}");
            assert!(check_correctness(&p.closure()), "{kind}");
            infer_principal_type(&p.net).unwrap();
        }
    }
}

#[test]
fn truth_tables() {
    assert!(!eval(&single(PieceKind::B0, 0), &[], Policy::Tam));
    assert!(eval(&single(PieceKind::B1, 0), &[], Policy::Tam));
    let neg = single(PieceKind::Neg, 0);
    for x in [false, true] {
        assert_eq!(eval(&neg, &[x], Policy::Tam), !x);
    }
    for n in 1..=6u32 {
        for j in 0..n as usize {
            let d = single(PieceKind::Dupl(n), j);
            for x in [false, true] {
                assert_eq!(eval(&d, &[x], Policy::Tam), x, "dupl{n} exit {j}");
            }
        }
    }
    for n in 2..=6u32 {
        let conj = single(PieceKind::Conj(n), 0);
        let disj = single(PieceKind::Disj(n), 0);
        for v in all_vectors(n as usize) {
            assert_eq!(
                eval(&conj, &v, Policy::Tam),
                v.iter().all(|&b| b),
                "conj {v:?}"
            );
            assert_eq!(
                eval(&disj, &v, Policy::Mat),
                v.iter().any(|&b| b),
                "disj {v:?}"
            );
        }
    }
}

#[test]
fn sealing_a_constant_inserts_dupl1() {
    let c = single(PieceKind::B1, 0);
    let kinds: Vec<PieceKind> = c.pieces.iter().map(|p| p.kind).collect();
    assert_eq!(kinds, vec![PieceKind::B1, PieceKind::Dupl(1)]);
    assert_eq!(c.net.sort(c.result_tensor), LinkSort::Tensor(2));
    assert_eq!(c.result_tensor as usize, c.net.len() - 1);
    assert!(check_correctness(&c.net));
    let normal = normalize(&apply_inputs(&c, &[]).unwrap(), Policy::Tam)
        .unwrap()
        .0;
    assert!(read_result(&normal).unwrap());
}

#[test]
fn sealed_circuit_type() {
    let c = single(PieceKind::Conj(2), 0);
    assert!(check_correctness(&c.net));
    let (seq, _) = infer_principal_type(&c.net).unwrap();
    let garbage = Formula::Var(1003);
    let pattern = [
        boolean_over(1000).dual(),
        boolean_over(1001).dual(),
        Formula::Tensor(vec![boolean_over(1002), garbage]),
    ];
    assert!(unifiable(&seq, &pattern), "{seq}");
    // the output is not confused with a garbage end
    let swapped = [
        pattern[0].clone(),
        pattern[1].clone(),
        Formula::Tensor(vec![
            Formula::Var(1003),
            Formula::Tensor(vec![boolean_over(1002)]),
        ]),
    ];
    assert!(!unifiable(&seq, &swapped));
}

#[test]
fn composition_errors() {
    let mut cb = CircuitBuilder::new();
    let n = cb.add_piece(PieceKind::Neg).unwrap();
    assert_eq!(
        cb.compose(exit(n, 0), entry(n, 0)),
        Err(PieceError::Loop(n, n))
    );
    let m = cb.add_piece(PieceKind::Neg).unwrap();
    cb.compose(exit(n, 0), entry(m, 0)).unwrap();
    assert_eq!(
        cb.compose(exit(m, 0), entry(n, 0)),
        Err(PieceError::Loop(m, n))
    );
    assert_eq!(
        cb.compose(exit(n, 0), entry(m, 0)),
        Err(PieceError::ExitTaken(n, 0))
    );
    assert!(matches!(
        cb.compose(exit(n, 3), entry(m, 0)),
        Err(PieceError::NoExit(..))
    ));
    let mut two = cb.clone();
    two.add_piece(PieceKind::B0).unwrap();
    assert_eq!(two.seal(&[entry(n, 0)]).err(), Some(PieceError::Exits(2)));
    assert_eq!(
        cb.clone().seal(&[]).err(),
        Some(PieceError::LooseEntry(n, 0))
    );
    assert_eq!(
        cb.seal(&[entry(m, 0)]).err(),
        Some(PieceError::BadInput(m, 0))
    );
}

#[test]
fn fan_out_into_conjunction() {
    let mut cb = CircuitBuilder::new();
    let d = cb.add_piece(PieceKind::Dupl(2)).unwrap();
    let c = cb.add_piece(PieceKind::Conj(2)).unwrap();
    cb.compose(exit(d, 0), entry(c, 0)).unwrap();
    cb.compose(exit(d, 1), entry(c, 1)).unwrap();
    let pc = cb.seal(&[entry(d, 0)]).unwrap();
    assert!(check_correctness(&pc.net));
    for x in [false, true] {
        assert_eq!(eval(&pc, &[x], Policy::Tam), x);
    }
}

#[test]
fn circuit_composition() {
    let neg = single(PieceKind::Neg, 0);
    let twice = compose_circuits(&neg, &neg, 0).unwrap();
    assert_eq!(twice.input_count(), 1);
    assert_eq!(twice.garbage.len(), 2);
    assert!(check_correctness(&twice.net));
    for x in [false, true] {
        assert_eq!(eval(&twice, &[x], Policy::Tam), x);
    }
    let one = single(PieceKind::B1, 0);
    let conj = single(PieceKind::Conj(3), 0);
    let plugged = compose_circuits(&one, &conj, 1).unwrap();
    assert_eq!(plugged.input_count(), 2);
    assert_eq!(
        plugged.garbage.len(),
        one.garbage.len() + conj.garbage.len()
    );
    for v in all_vectors(2) {
        assert_eq!(eval(&plugged, &v, Policy::Tam), v[0] && v[1]);
    }
    // the inputs of the inner circuit replace the chosen input, in order
    let disj = single(PieceKind::Disj(2), 0);
    let mixed = compose_circuits(&disj, &conj, 1).unwrap();
    assert_eq!(mixed.input_count(), 4);
    for v in all_vectors(4) {
        assert_eq!(
            eval(&mixed, &v, Policy::Mat),
            v[0] && (v[1] || v[2]) && v[3]
        );
    }
    assert_eq!(
        compose_circuits(&neg, &neg, 1).err(),
        Some(PieceError::InputIndex(1))
    );
}

#[test]
fn circuits_survive_the_tuple_format() {
    let pc = single(PieceKind::Conj(3), 0);
    let back = ProofCircuit::from_net(parse_pn_dcl(&emit_pn_dcl(&pc.net)).unwrap()).unwrap();
    assert_eq!(back.inputs, pc.inputs);
    assert_eq!(back.result_tensor, pc.result_tensor);
    assert_eq!(back.output, pc.output);
    assert_eq!(back.garbage, pc.garbage);
    for v in all_vectors(3) {
        assert_eq!(eval(&back, &v, Policy::Tam), v.iter().all(|&b| b));
    }
    let value = parse_description(B1).unwrap();
    assert!(matches!(
        ProofCircuit::from_net(value),
        Err(PieceError::NotACircuit(_))
    ));
}

#[test]
fn input_length_checked() {
    let c = single(PieceKind::Conj(2), 0);
    assert!(matches!(
        apply_inputs(&c, &[true]),
        Err(PieceError::InputLength {
            expected: 2,
            got: 1
        })
    ));
}

#[test]
fn read_result_rejects_non_values() {
    let c = single(PieceKind::Neg, 0);
    let net = apply_inputs(&c, &[true]).unwrap();
    assert_eq!(read_result(&net), Err(ReadError::NotCutFree));
    let ax = parse_description("ax_p").unwrap();
    assert_eq!(read_result(&ax), Err(ReadError::NoResultTensor));
    let mut b = NetBuilder::new();
    let r = b.tensor(1);
    let a = b.ax();
    b.connect(Port::new(r, 1), Port::new(a, 0));
    b.conclude(Port::new(a, 1));
    b.conclude(Port::principal(r));
    assert_eq!(read_result(&b.build()), Err(ReadError::NotAValue));
}

#[test]
fn catalogue_lines() {
    let cat = catalogue(3);
    let lines: Vec<&str> = cat.lines().collect();
    assert_eq!(lines[0], "piece b0 entries=0 exits=1 garbage=0 links=4");
    assert_eq!(lines[2], "piece neg entries=1 exits=1 garbage=0 links=8");
    assert!(lines.contains(&"piece dupl3 entries=1 exits=3 garbage=1 links=33"));
    assert!(lines.contains(&"piece conj2 entries=2 exits=1 garbage=1 links=9"));
    assert_eq!(lines.len(), 3 + 3 + 2 + 2);
}

/// Expression trees over distinct inputs, with duplication nodes whose
/// spare exits are discarded.
#[derive(Clone, Debug)]
enum Expr {
    Input,
    Const(bool),
    Neg(Box<Expr>),
    Conj(Vec<Expr>),
    Disj(Vec<Expr>),
    Dup(Box<Expr>, u32, usize),
    /// both copies of a duplicated subtree feed one gate
    SelfConj(Box<Expr>),
}

fn expr() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![3 => Just(Expr::Input), 1 => any::<bool>().prop_map(Expr::Const)];
    leaf.prop_recursive(4, 24, 3, |inner| {
        prop_oneof![
            inner.clone().prop_map(|e| Expr::Neg(Box::new(e))),
            prop::collection::vec(inner.clone(), 2..4).prop_map(Expr::Conj),
            prop::collection::vec(inner.clone(), 2..4).prop_map(Expr::Disj),
            (inner.clone(), 1..4u32, 0..4usize).prop_map(|(e, n, j)| Expr::Dup(
                Box::new(e),
                n,
                j % n as usize
            )),
            inner.prop_map(|e| Expr::SelfConj(Box::new(e))),
        ]
    })
}

/// Returns the exit carrying `e` and appends its inputs in order.
fn build(cb: &mut CircuitBuilder, e: &Expr, inputs: &mut Vec<EntryRef>) -> ExitRef {
    let gate =
        |cb: &mut CircuitBuilder, kind: PieceKind, args: &[Expr], inputs: &mut Vec<EntryRef>| {
            let p = cb.add_piece(kind).unwrap();
            for (i, a) in args.iter().enumerate() {
                match a {
                    Expr::Input => inputs.push(entry(p, i)),
                    _ => {
                        let x = build(cb, a, inputs);
                        cb.compose(x, entry(p, i)).unwrap();
                    }
                }
            }
            exit(p, 0)
        };
    match e {
        Expr::Input => {
            let p = cb.add_piece(PieceKind::Dupl(1)).unwrap();
            inputs.push(entry(p, 0));
            exit(p, 0)
        }
        Expr::Const(b) => {
            let p = cb
                .add_piece(if *b { PieceKind::B1 } else { PieceKind::B0 })
                .unwrap();
            exit(p, 0)
        }
        Expr::Neg(a) => gate(cb, PieceKind::Neg, std::slice::from_ref(a), inputs),
        Expr::Conj(args) => gate(cb, PieceKind::Conj(args.len() as u32), args, inputs),
        Expr::Disj(args) => gate(cb, PieceKind::Disj(args.len() as u32), args, inputs),
        Expr::Dup(a, n, j) => {
            let p = gate(cb, PieceKind::Dupl(*n), std::slice::from_ref(a), inputs).piece;
            for k in 0..*n as usize {
                if k != *j {
                    cb.discard(exit(p, k)).unwrap();
                }
            }
            exit(p, *j)
        }
        Expr::SelfConj(a) => {
            let d = gate(cb, PieceKind::Dupl(2), std::slice::from_ref(a), inputs).piece;
            let c = cb.add_piece(PieceKind::Conj(2)).unwrap();
            cb.compose(exit(d, 0), entry(c, 0)).unwrap();
            cb.compose(exit(d, 1), entry(c, 1)).unwrap();
            exit(c, 0)
        }
    }
}

fn oracle(e: &Expr, bits: &mut impl Iterator<Item = bool>) -> bool {
    match e {
        Expr::Input => bits.next().unwrap(),
        Expr::Const(b) => *b,
        Expr::Neg(a) => !oracle(a, bits),
        Expr::Conj(args) => args
            .iter()
            .map(|a| oracle(a, bits))
            .fold(true, |x, y| x & y),
        Expr::Disj(args) => args
            .iter()
            .map(|a| oracle(a, bits))
            .fold(false, |x, y| x | y),
        Expr::Dup(a, _, _) | Expr::SelfConj(a) => oracle(a, bits),
    }
}

fn circuit_of(e: &Expr) -> ProofCircuit {
    let mut cb = CircuitBuilder::new();
    let mut inputs = Vec::new();
    build(&mut cb, e, &mut inputs);
    cb.seal(&inputs).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn sealed_circuits_compute_their_expression(e in expr(), seed in any::<u64>(), pick in any::<u64>()) {
        let c = circuit_of(&e);
        prop_assert!(check_correctness(&c.net));
        prop_assert_eq!(c.result_tensor as usize, c.net.len() - 1);
        let n = c.input_count();
        let bits: Vec<bool> = (0..n).map(|i| pick >> (i % 64) & 1 == 1).collect();
        let expected = oracle(&e, &mut bits.iter().copied());
        for policy in [Policy::Tam, Policy::Mat, Policy::Random(seed)] {
            prop_assert_eq!(eval(&c, &bits, policy), expected);
        }
    }

    #[test]
    fn maximal_cuts_sit_on_values(e in expr(), pick in any::<u64>()) {
        let c = circuit_of(&e);
        let n = c.input_count();
        let bits: Vec<bool> = (0..n).map(|i| pick >> (i % 64) & 1 == 1).collect();
        let net = apply_inputs(&c, &bits).unwrap();
        let mut g = TypeGraph::infer(&net).unwrap();
        let depths = g.cut_depths();
        let max = depths.iter().map(|d| d.1).max().unwrap_or(0);
        let depth_of = |p: Port| depths.iter().find(|((a, b), _)| *a == p || *b == p).map(|d| d.1);
        let constants: Vec<Port> = c
            .pieces
            .iter()
            .filter(|pp| matches!(pp.kind, PieceKind::B0 | PieceKind::B1))
            .map(|pp| pp.ends.exits[0])
            .collect();
        let value = |p: Port| c.inputs.contains(&p) || constants.contains(&p);
        let value_cut = |p: Port, q: Port| value(p) || value(q);
        for &((p, q), d) in &depths {
            if d < max || value_cut(p, q) {
                continue;
            }
            // otherwise the cut must leave a negation whose own entry is maximal
            let neg = c.pieces.iter().find(|pp| {
                pp.kind == PieceKind::Neg && (pp.ends.exits[0] == p || pp.ends.exits[0] == q)
            });
            let Some(neg) = neg else {
                return Err(TestCaseError::fail(format!("maximal cut {p}-{q} is not against a value")));
            };
            prop_assert_eq!(depth_of(neg.ends.entries[0]), Some(max));
        }
    }
}
