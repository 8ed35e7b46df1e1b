use mllu::circuits::gen::{and_chain, balanced_tree, fan_out_chain, random_circuit};
use mllu::circuits::*;
use mllu::pieces::{apply_inputs, read_result, PieceKind, ProofCircuit};
use mllu::rewrite::{normalize, Strategy};
use mllu::translate::*;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn gate(label: Label, preds: &[GateId]) -> Gate {
    Gate {
        label,
        preds: preds.to_vec(),
    }
}

fn vectors(n: usize) -> impl Iterator<Item = Vec<bool>> {
    (0..1usize << n).map(move |m| (0..n).map(|i| m >> i & 1 == 1).collect())
}

fn run(pc: &ProofCircuit, bits: &[bool], strategy: Strategy) -> bool {
    let net = apply_inputs(pc, bits).unwrap();
    let (nf, _) = normalize(&net, strategy).unwrap();
    read_result(&nf).unwrap()
}

fn agrees(c: &Circuit) -> bool {
    let pc = translate_circuit(c).unwrap();
    let table = eval_all(c).unwrap();
    vectors(c.input_count)
        .zip(table)
        .all(|(v, want)| run(&pc, &v, Strategy::Tam) == want)
}

fn kinds(pc: &ProofCircuit) -> Vec<PieceKind> {
    let mut k: Vec<PieceKind> = pc.pieces.iter().map(|p| p.kind).collect();
    k.sort_by_key(|k| k.to_string());
    k
}

/// Least-squares slope and coefficient of determination.
fn fit(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let slope = sxy / sxx;
    let r2 = if syy == 0.0 {
        1.0
    } else {
        sxy * sxy / (sxx * syy)
    };
    (slope, r2)
}

#[test]
fn single_conjunction() {
    let c = Circuit::new(
        vec![
            gate(Label::Input(0), &[]),
            gate(Label::Input(1), &[]),
            gate(Label::And(2), &[0, 1]),
        ],
        2,
        2,
    )
    .unwrap();
    let pc = translate_circuit(&c).unwrap();
    assert_eq!(kinds(&pc), vec![PieceKind::Conj(2)]);
    assert_eq!(pc.garbage.len(), 1);
    for v in vectors(2) {
        assert_eq!(run(&pc, &v, Strategy::Tam), v[0] && v[1]);
    }
}

#[test]
fn constant_output_gets_a_duplication() {
    let c = Circuit::new(vec![gate(Label::Const(true), &[])], 0, 0).unwrap();
    let pc = translate_circuit(&c).unwrap();
    assert_eq!(kinds(&pc), vec![PieceKind::B1, PieceKind::Dupl(1)]);
    assert!(run(&pc, &[], Strategy::Tam));
}

#[test]
fn input_read_twice() {
    let c = Circuit::new(
        vec![gate(Label::Input(0), &[]), gate(Label::And(2), &[0, 0])],
        1,
        1,
    )
    .unwrap();
    let pc = translate_circuit(&c).unwrap();
    assert_eq!(kinds(&pc), vec![PieceKind::Conj(2), PieceKind::Dupl(2)]);
    assert!(pc
        .pieces
        .iter()
        .any(|p| p.kind == PieceKind::Dupl(2) && p.ends.entries[0] == pc.inputs[0]));
    assert!(!run(&pc, &[false], Strategy::Tam));
    assert!(run(&pc, &[true], Strategy::Tam));
}

#[test]
fn negation_behaves_like_the_figure() {
    let c = Circuit::new(
        vec![gate(Label::Input(0), &[]), gate(Label::Not, &[0])],
        1,
        1,
    )
    .unwrap();
    let pc = translate_circuit(&c).unwrap();
    assert!(run(&pc, &[false], Strategy::Tam));
    assert!(!run(&pc, &[true], Strategy::Tam));
}

#[test]
fn gate_fan_out_and_unread_inputs() {
    // x1 unread, not(x2) read by and3 twice
    let c = Circuit::new(
        vec![
            gate(Label::Input(0), &[]),
            gate(Label::Input(1), &[]),
            gate(Label::Input(2), &[]),
            gate(Label::Not, &[1]),
            gate(Label::Const(true), &[]),
            gate(Label::Or(3), &[3, 3, 2]),
            gate(Label::And(2), &[5, 4]),
        ],
        6,
        3,
    )
    .unwrap();
    let pc = translate_circuit(&c).unwrap();
    let k = kinds(&pc);
    assert!(k.contains(&PieceKind::Dupl(2)));
    assert!(k.contains(&PieceKind::Dupl(1)));
    assert!(agrees(&c));
}

#[test]
fn identity_circuit() {
    let c = Circuit::new(vec![gate(Label::Input(0), &[])], 0, 1).unwrap();
    assert!(agrees(&c));
}

#[test]
fn connectivity_gates_are_rejected() {
    let n = 2;
    let w = Label::UstConn2(n).fan_in();
    let mut gates: Vec<Gate> = (0..w as u32).map(|i| gate(Label::Input(i), &[])).collect();
    gates.push(gate(Label::UstConn2(n), &(0..w as u32).collect::<Vec<_>>()));
    let c = Circuit::new(gates, w as GateId, w).unwrap();
    assert!(matches!(
        translate_circuit(&c),
        Err(TranslateError::Unsupported(..))
    ));
}

#[test]
fn strategies_agree_on_translations() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..30 {
        let c = random_circuit(&mut rng, 3, 6);
        let pc = translate_circuit(&c).unwrap();
        for v in vectors(3) {
            let want = eval_circuit(&c, &v).unwrap();
            for s in [Strategy::Tam, Strategy::Mat, Strategy::Random(3)] {
                assert_eq!(run(&pc, &v, s), want);
            }
        }
    }
}

#[test]
fn small_circuit_bounds() {
    let c = Circuit::new(
        vec![
            gate(Label::Input(0), &[]),
            gate(Label::Input(1), &[]),
            gate(Label::Or(2), &[0, 1]),
        ],
        2,
        2,
    )
    .unwrap();
    let (_, r) = translate(&c).unwrap();
    assert_eq!((r.source_size, r.source_depth), (3, 1));
    assert!(r.target_depth <= 6 + DEPTH_C0);
    let check = check_bounds(&r);
    assert!(check.passed, "{:?}", check.details);
}

type Family = (&'static str, fn(usize) -> Circuit, usize);

#[test]
fn family_bounds_and_slopes() {
    let families: [Family; 3] = [
        ("chain", and_chain, 8),
        ("tree", balanced_tree, 6),
        ("fan", fan_out_chain, 8),
    ];
    for (name, family, top) in families {
        let (mut ds, mut tds) = (Vec::new(), Vec::new());
        let mut last_size = 0;
        for d in 1..=top {
            let c = family(d);
            let (_, r) = translate(&c).unwrap();
            let check = check_bounds(&r);
            assert!(check.passed, "{name} {d}: {:?}", check.details);
            assert!(r.target_size > last_size, "{name} size not monotone at {d}");
            last_size = r.target_size;
            let ratio = r.target_size as f64 / (r.source_size * r.source_size) as f64;
            assert!(ratio <= SIZE_C1 as f64);
            ds.push(d as f64);
            tds.push(r.target_depth as f64);
        }
        let (slope, _) = fit(&ds, &tds);
        assert!(slope <= 6.0, "{name} slope {slope}");
    }
}

#[test]
fn locality_is_bounded_for_bounded_fan() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut worst = 0;
    for _ in 0..200 {
        let c = random_circuit(&mut rng, 5, 12);
        let fan_out = c.fan_out().into_iter().max().unwrap_or(0);
        let t = translate_traced(&c).unwrap();
        let l = locality(&c, &t);
        assert!(l.tuples > 0);
        // every piece reads its gate, its operands and its readers
        let bound = 2 * (1 + 3 + fan_out.max(1));
        assert!(l.max_reads <= bound, "{} > {bound}", l.max_reads);
        worst = worst.max(l.max_reads);
    }
    assert!(worst > 0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn translation_agrees_with_evaluation(seed in any::<u64>(), n in 0usize..5, g in 1usize..9) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = random_circuit(&mut rng, n, g);
        prop_assert!(agrees(&c));
    }

    #[test]
    fn reports_are_within_bounds(seed in any::<u64>(), n in 1usize..5, g in 1usize..9) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = random_circuit(&mut rng, n, g);
        let (pc, r) = translate(&c).unwrap();
        prop_assert_eq!(r.target_size, pc.net.len());
        prop_assert!(r.garbage_count >= 1);
        let check = check_bounds(&r);
        prop_assert!(check.passed, "{:?}", check.details);
    }
}
