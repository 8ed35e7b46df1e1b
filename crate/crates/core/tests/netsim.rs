use mllu::circuits::gen::{enumerate_circuits, not_chain, random_circuit};
use mllu::circuits::{eval_circuit, eval_multi, Circuit, Gate, Label};
use mllu::gen::random_net;
use mllu::netcore::{canonical_form, parse_description, ProofNet};
use mllu::netsim::*;
use mllu::pieces::{apply_inputs, read_result, CircuitBuilder, EntryRef, PieceKind, ProofCircuit};
use mllu::rewrite::{classify_cuts, normalize, reduce_a, reduce_m, reduce_t, Strategy};
use mllu::translate::translate_circuit;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// One round of the default strategy through the rewrite engine.
fn engine_round(net: &ProofNet) -> Option<ProofNet> {
    let r = classify_cuts(net).unwrap();
    if !r.t_chains.is_empty() {
        Some(reduce_t(net).unwrap())
    } else if !r.a_cuts.is_empty() {
        Some(reduce_a(net).unwrap())
    } else if !r.m_cuts.is_empty() {
        Some(reduce_m(net).unwrap())
    } else {
        None
    }
}

/// Runs the generic round circuit on a configuration.
fn run_step(step: &mllu::circuits::MultiCircuit, cfg: &Configuration) -> Configuration {
    let words: Vec<u64> = cfg.bits.iter().map(|&b| b as u64).collect();
    let out = eval_multi(step, &words, 1).unwrap();
    Configuration {
        layout: cfg.layout,
        bits: out.iter().map(|&w| w & 1 == 1).collect(),
    }
}

/// Follows the engine round by round, checking the specialized round and,
/// when given, the generic round circuit.
fn agree_round_by_round(net: &ProofNet, generic: Option<&mllu::circuits::MultiCircuit>) {
    let budget = Budget::for_net(net);
    let mut cfg = encode_config(net, budget).unwrap();
    let mut cur = net.clone();
    loop {
        let next = step_configuration(&cfg);
        if let Some(step) = generic {
            assert_eq!(run_step(step, &cfg), next);
        }
        match engine_round(&cur) {
            Some(n) => {
                let decoded = decode_config(&next).unwrap();
                assert_eq!(decoded, n);
                cur = n;
                cfg = next;
            }
            None => {
                assert_eq!(next, cfg, "cut-free configuration must be a fixed point");
                return;
            }
        }
    }
}

fn value(bit: bool) -> ProofNet {
    let mut b = CircuitBuilder::new();
    b.add_piece(if bit { PieceKind::B1 } else { PieceKind::B0 })
        .unwrap();
    let pc = b.seal(&[]).unwrap();
    apply_inputs(&pc, &[]).unwrap()
}

fn sealed(kind: PieceKind) -> ProofCircuit {
    let mut b = CircuitBuilder::new();
    let p = b.add_piece(kind).unwrap();
    let inputs: Vec<EntryRef> = (0..kind.entry_count())
        .map(|index| EntryRef { piece: p, index })
        .collect();
    for index in 1..kind.exit_count() {
        b.discard(mllu::pieces::ExitRef { piece: p, index })
            .unwrap();
    }
    b.seal(&inputs).unwrap()
}

fn direct(pc: &ProofCircuit, bits: &[bool]) -> bool {
    let net = apply_inputs(pc, bits).unwrap();
    read_result(&normalize(&net, Strategy::Tam).unwrap().0).unwrap()
}

fn vectors(n: usize) -> impl Iterator<Item = Vec<bool>> {
    (0..1usize << n).map(move |m| (0..n).map(|i| m >> i & 1 == 1).collect())
}

#[test]
fn value_encoding() {
    let net = parse_description("par_s^{q,p,r}(tensor_r^{p,q}(ax_p, ax_q))").unwrap();
    let cfg = encode_config(&net, Budget::for_net(&net)).unwrap();
    assert_eq!(cfg.live_rows(), 4);
    cfg.check_consistent().unwrap();
    for r in 0..4 {
        for p in 0..cfg.layout.ports() {
            if let Partner::Port(q) = cfg.partner(r, p).unwrap() {
                assert_eq!(
                    cfg.partner(q.link as usize, q.index as usize).unwrap(),
                    Partner::Port(mllu::netcore::Port::new(r as u32, p as u32))
                );
            }
        }
    }
    assert_eq!(decode_config(&cfg).unwrap(), net);
    let wide = encode_config(
        &net,
        Budget {
            slots: 9,
            arity: 5,
            conclusions: 1,
        },
    )
    .unwrap();
    assert_eq!(wide.live_rows(), 4);
    assert_eq!(decode_config(&wide).unwrap(), net);
}

#[test]
fn encoding_errors() {
    let net = value(true);
    let b = Budget::for_net(&net);
    assert!(matches!(
        encode_config(&net, Budget { slots: 2, ..b }),
        Err(SimError::SlotOverflow { .. })
    ));
    assert!(matches!(
        encode_config(&net, Budget { arity: 2, ..b }),
        Err(SimError::ArityOverflow { .. })
    ));
    assert!(matches!(
        encode_config(
            &net,
            Budget {
                conclusions: 3,
                ..b
            }
        ),
        Err(SimError::Conclusions { .. })
    ));
    assert!(matches!(
        build_step_circuit(Budget { slots: 0, ..b }),
        Err(SimError::Budget(_))
    ));
    let mut cfg = encode_config(&net, b).unwrap();
    let at = cfg.layout.partner_at(0, 0);
    cfg.bits[at + 2] = !cfg.bits[at + 2];
    assert!(decode_config(&cfg).is_err());
}

#[test]
fn axiom_pair_contracts() {
    let mut b = mllu::netcore::NetBuilder::new();
    let x = b.ax();
    let y = b.ax();
    b.connect(
        mllu::netcore::Port::new(x, 1),
        mllu::netcore::Port::new(y, 0),
    );
    b.conclude(mllu::netcore::Port::new(x, 0));
    b.conclude(mllu::netcore::Port::new(y, 1));
    let chain = b.build();
    let cfg = encode_config(&chain, Budget::for_net(&chain)).unwrap();
    let next = step_configuration(&cfg);
    assert_eq!(decode_config(&next).unwrap(), reduce_t(&chain).unwrap());
    assert_eq!(next.live_rows(), 1);
    // the deleted row is all zero
    let lay = next.layout;
    assert!((0..lay.row_bits).all(|i| !next.bits[lay.sort_at(1) + i]));
    let generic = build_step_circuit(Budget::for_net(&chain)).unwrap();
    assert_eq!(run_step(&generic, &cfg), next);
}

#[test]
fn cut_free_nets_are_fixed_points() {
    let nets = [
        parse_description("par_s^{q,p,r}(tensor_r^{p,q}(ax_p, ax_q))").unwrap(),
        normalize(&value(true), Strategy::Tam).unwrap().0,
        normalize(&value(false), Strategy::Tam).unwrap().0,
    ];
    for net in nets {
        assert!(net.is_cut_free());
        let cfg = encode_config(&net, Budget::for_net(&net)).unwrap();
        let step = build_step_circuit(Budget::for_net(&net)).unwrap();
        assert_eq!(run_step(&step, &cfg), cfg);
        assert_eq!(step_configuration(&cfg), cfg);
    }
}

#[test]
fn pieces_reduce_round_by_round() {
    for kind in ["neg", "dupl1", "dupl3", "conj2", "disj3"] {
        let pc = sealed(kind.parse().unwrap());
        for bits in vectors(pc.input_count()) {
            let net = apply_inputs(&pc, &bits).unwrap();
            let generic = build_step_circuit(Budget::for_net(&net)).unwrap();
            agree_round_by_round(&net, Some(&generic));
        }
    }
}

#[test]
fn extraction_matches_the_reader() {
    for kind in ["neg", "conj2", "disj2", "dupl2"] {
        let pc = sealed(kind.parse().unwrap());
        let budget = Budget::for_net(&apply_inputs(&pc, &vec![false; pc.input_count()]).unwrap());
        let reader = build_extraction_circuit(budget).unwrap();
        for bits in vectors(pc.input_count()) {
            let net = apply_inputs(&pc, &bits).unwrap();
            let (nf, _) = normalize(&net, Strategy::Tam).unwrap();
            // the normal form is shorter; lay it out in the original budget
            let cfg = encode_config(&nf, budget).unwrap();
            assert_eq!(
                eval_circuit(&reader, &cfg.bits).unwrap(),
                read_result(&nf).unwrap()
            );
        }
    }
}

#[test]
fn negation_simulator() {
    let pc = sealed(PieceKind::Neg);
    let sim = build_simulator(&pc).unwrap();
    assert!(sim.eval(&[false]).unwrap());
    assert!(!sim.eval(&[true]).unwrap());
    assert!(sim.rounds_unrolled >= sim.rounds_built);
    assert!(!sim.input_map.is_empty());
}

#[test]
fn conjunction_simulator() {
    let pc = sealed(PieceKind::Conj(2));
    for mode in [RoundMode::Size, RoundMode::Depth] {
        let opts = SimOptions {
            rounds: mode,
            ..Default::default()
        };
        let sim = build_simulator_with(&pc, &opts).unwrap();
        for v in vectors(2) {
            assert_eq!(sim.eval(&v).unwrap(), v[0] && v[1]);
        }
    }
}

#[test]
fn simulators_of_small_translations() {
    let mut checked = 0;
    enumerate_circuits(2, 2, &mut |c: &Circuit| {
        let pc = translate_circuit(c).unwrap();
        let sim = build_simulator(&pc).unwrap();
        for v in vectors(c.input_count) {
            assert_eq!(sim.eval(&v).unwrap(), direct(&pc, &v));
            assert_eq!(sim.eval(&v).unwrap(), eval_circuit(c, &v).unwrap());
        }
        checked += 1;
    });
    assert!(checked > 10);
}

#[test]
fn plain_folding_gives_the_same_function() {
    let pc = sealed(PieceKind::Disj(2));
    let opts = SimOptions {
        exhaustive_folding: false,
        ..Default::default()
    };
    let plain = build_simulator_with(&pc, &opts).unwrap();
    let folded = build_simulator(&pc).unwrap();
    assert!(plain.circuit.gates.len() > folded.circuit.gates.len());
    for v in vectors(2) {
        assert_eq!(plain.eval(&v).unwrap(), v[0] || v[1]);
        assert_eq!(folded.eval(&v).unwrap(), v[0] || v[1]);
    }
}

#[test]
fn step_circuit_has_constant_depth() {
    let depths: Vec<usize> = [4, 8, 16]
        .iter()
        .map(|&slots| {
            build_step_circuit(Budget {
                slots,
                arity: 3,
                conclusions: 1,
            })
            .unwrap()
            .depth()
        })
        .collect();
    assert!(depths.windows(2).all(|w| w[0] == w[1]), "{depths:?}");
}

#[test]
fn step_circuit_gate_count_exponent() {
    let points: Vec<(f64, f64)> = [4usize, 8, 16, 24]
        .iter()
        .map(|&slots| {
            let c = build_step_circuit(Budget {
                slots,
                arity: 3,
                conclusions: 2,
            })
            .unwrap();
            (slots as f64, c.size() as f64)
        })
        .collect();
    let (slope, r2) = loglog_fit(&points);
    assert!(slope <= 3.0, "slope {slope}");
    assert!(r2 >= 0.95, "r2 {r2}");
}

#[test]
fn simulator_gate_count_exponent() {
    let opts = SimOptions {
        exhaustive_folding: false,
        ..Default::default()
    };
    let mut points = Vec::new();
    for k in 1..=3 {
        let pc = translate_circuit(&not_chain(k)).unwrap();
        let sim = build_simulator_with(&pc, &opts).unwrap();
        assert_eq!(
            sim.rounds_unrolled,
            apply_inputs(&pc, &[false]).unwrap().len()
        );
        for v in vectors(1) {
            assert_eq!(sim.eval(&v).unwrap(), v[0] ^ (k % 2 == 1));
        }
        points.push((pc.net.len() as f64, sim.circuit.gates.len() as f64));
    }
    let (slope, r2) = loglog_fit(&points);
    assert!(slope <= 4.0, "slope {slope}");
    assert!(r2 >= 0.95, "r2 {r2}");
}

#[test]
fn loglog_fit_recovers_a_power_law() {
    let points: Vec<(f64, f64)> = (1..6)
        .map(|x| (x as f64, 5.0 * (x as f64).powi(3)))
        .collect();
    let (slope, r2) = loglog_fit(&points);
    assert!((slope - 3.0).abs() < 1e-9);
    assert!((r2 - 1.0).abs() < 1e-9);
}

#[test]
fn simulator_uses_connectivity_labels() {
    let c = Circuit::new(
        vec![
            Gate {
                label: Label::Input(0),
                preds: vec![],
            },
            Gate {
                label: Label::Input(1),
                preds: vec![],
            },
            Gate {
                label: Label::Or(2),
                preds: vec![0, 1],
            },
            Gate {
                label: Label::Not,
                preds: vec![2],
            },
        ],
        3,
        2,
    )
    .unwrap();
    let pc = translate_circuit(&c).unwrap();
    let sim = build_simulator(&pc).unwrap();
    for v in vectors(2) {
        assert_eq!(sim.eval(&v).unwrap(), !(v[0] || v[1]));
    }
    let step = build_step_circuit(Budget {
        slots: 6,
        arity: 3,
        conclusions: 1,
    })
    .unwrap();
    assert!(step
        .gates
        .iter()
        .any(|g| matches!(g.label, Label::UstConn2(6))));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn random_nets_reduce_round_by_round(seed in any::<u64>(), n in 1usize..30) {
        let net = random_net(&mut ChaCha8Rng::seed_from_u64(seed), n);
        let generic = if net.len() <= 16 { Some(build_step_circuit(Budget::for_net(&net)).unwrap()) } else { None };
        agree_round_by_round(&net, generic.as_ref());
    }

    #[test]
    fn encoding_round_trips(seed in any::<u64>(), n in 1usize..40, extra in 0usize..5) {
        let net = random_net(&mut ChaCha8Rng::seed_from_u64(seed), n);
        let mut budget = Budget::for_net(&net);
        budget.slots += extra;
        budget.arity += extra as u32 % 2;
        let cfg = encode_config(&net, budget).unwrap();
        prop_assert!(cfg.check_consistent().is_ok());
        let back = decode_config(&cfg).unwrap();
        prop_assert_eq!(canonical_form(&back), canonical_form(&net));
        prop_assert_eq!(back, net);
    }

    #[test]
    fn simulators_of_random_circuits(seed in any::<u64>(), n in 1usize..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = random_circuit(&mut rng, n, 4);
        let pc = translate_circuit(&c).unwrap();
        let sim = build_simulator(&pc).unwrap();
        for v in vectors(n) {
            prop_assert_eq!(sim.eval(&v).unwrap(), direct(&pc, &v));
        }
    }
}
