//! Acceptance criteria for the mllu crates. Every check runs on fixed,
//! seeded corpora and returns a verdict with the measurements behind it.

use std::time::{Duration, Instant};

use mllu::circuits::gen::{
    and_chain, balanced_tree, enumerate_circuits, fan_out_chain, not_chain, random_circuit,
};
use mllu::circuits::{eval_all, eval_circuit, Circuit};
use mllu::gen::{random_net, swap_wire_ends};
use mllu::netcore::{
    canonical_form, check_correctness, parse_description, sequentializable, switching_criterion,
    validate_structure, NetBuilder, Port, ProofNet,
};
use mllu::netsim::{
    build_simulator, build_simulator_with, build_step_circuit, decode_config, encode_config,
    loglog_fit, step_configuration, Budget, SimOptions,
};
use mllu::pieces::{
    apply_inputs, catalogue_kinds, make_piece, read_result, CircuitBuilder, EntryRef, ExitRef,
    PieceKind, ProofCircuit, PIECE_SIZE_OFFSET, PIECE_SIZE_SLOPE,
};
use mllu::rewrite::{classify_cuts, normalize, reduce_a, reduce_m, reduce_t, Strategy};
use mllu::translate::{translate, translate_circuit, DEPTH_C0, ROUND_A, ROUND_B, SIZE_C1};
use mllu::typing::{net_depth, TypeGraph};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const B0: &str = "par_s^{q,p,r}(tensor_r^{p,q}(ax_p, ax_q))";
pub const B1: &str = "par_s^{p,q,r}(tensor_r^{p,q}(ax_p, ax_q))";

/// A circuit family by name and depth.
pub type Family = (&'static str, fn(usize) -> Circuit);

#[derive(Clone, Debug)]
pub struct Verdict {
    pub id: u32,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "criterion {:>2} {} {}: {} [{:.2?}]",
            self.id,
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.detail,
            self.elapsed
        )
    }
}

fn timed(id: u32, name: &'static str, run: impl FnOnce() -> (bool, String)) -> Verdict {
    let start = Instant::now();
    let (passed, detail) = run();
    Verdict {
        id,
        name,
        passed,
        detail,
        elapsed: start.elapsed(),
    }
}

/// Every input vector of length `n`; bit `i` of the index is input `i`.
pub fn vectors(n: usize) -> impl Iterator<Item = Vec<bool>> {
    (0..1usize << n).map(move |m| (0..n).map(|i| m >> i & 1 == 1).collect())
}

/// Applies inputs, normalizes with the default strategy and reads the result.
pub fn evaluate(pc: &ProofCircuit, bits: &[bool]) -> Option<bool> {
    let net = apply_inputs(pc, bits).ok()?;
    let (nf, _) = normalize(&net, Strategy::Tam).ok()?;
    read_result(&nf).ok()
}

/// A circuit made of one piece whose entries are all inputs; every exit
/// but the first is discarded.
pub fn sealed_piece(kind: PieceKind) -> ProofCircuit {
    let mut b = CircuitBuilder::new();
    let p = b.add_piece(kind).expect("piece in range");
    for index in 1..kind.exit_count() {
        b.discard(ExitRef { piece: p, index }).expect("fresh exit");
    }
    let inputs: Vec<EntryRef> = (0..kind.entry_count())
        .map(|index| EntryRef { piece: p, index })
        .collect();
    b.seal(&inputs).expect("one free exit")
}

/// The component hanging from the first premise of the result tensor of a
/// net, as a net with one conclusion; `None` when it touches other premises.
pub fn result_component(net: &ProofNet) -> Option<ProofNet> {
    let root = *net.conclusions().last()?;
    let start = net.peer(Port::new(root.link, 1)).port()?;
    let mut seen = vec![false; net.len()];
    seen[start.link as usize] = true;
    let mut stack = vec![start.link];
    let mut links = Vec::new();
    while let Some(l) = stack.pop() {
        links.push(l);
        for i in 0..net.sort(l).port_count() as u32 {
            let p = Port::new(l, i);
            let q = net.peer(p).port()?;
            if q.link == root.link {
                if p != start {
                    return None;
                }
            } else if !seen[q.link as usize] {
                seen[q.link as usize] = true;
                stack.push(q.link);
            }
        }
    }
    links.sort_unstable();
    let mut index = vec![u32::MAX; net.len()];
    let mut b = NetBuilder::new();
    for &l in &links {
        index[l as usize] = b.add_link(net.sort(l));
    }
    let map = |p: Port| Port::new(index[p.link as usize], p.index);
    for &l in &links {
        for i in 0..net.sort(l).port_count() as u32 {
            let p = Port::new(l, i);
            let q = net.peer(p).port()?;
            if q.link != root.link && p < q {
                b.connect(map(p), map(q));
            }
        }
    }
    b.conclude(map(start));
    Some(b.build())
}

/// One round of the default strategy through the rewrite engine.
pub fn engine_round(net: &ProofNet) -> Option<ProofNet> {
    let r = classify_cuts(net).ok()?;
    if !r.t_chains.is_empty() {
        reduce_t(net).ok()
    } else if !r.a_cuts.is_empty() {
        reduce_a(net).ok()
    } else if !r.m_cuts.is_empty() {
        reduce_m(net).ok()
    } else {
        None
    }
}

/// The nets for the round and confluence criteria: piece closures, random
/// correct nets, and translated and sealed circuits under every input.
pub fn corpus() -> Vec<(String, ProofNet)> {
    let mut out = Vec::new();
    for k in catalogue_kinds(4) {
        out.push((
            format!("closure {k}"),
            make_piece(k).expect("in range").closure(),
        ));
    }
    for k in catalogue_kinds(3) {
        let pc = sealed_piece(k);
        for v in vectors(pc.input_count()) {
            out.push((
                format!("sealed {k} {v:?}"),
                apply_inputs(&pc, &v).expect("length"),
            ));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0xC0);
    for i in 0..200 {
        let target = rng.gen_range(2..80);
        out.push((format!("random net {i}"), random_net(&mut rng, target)));
    }
    for i in 0..60 {
        let n = rng.gen_range(0..=4);
        let c = random_circuit(&mut rng, n, 8);
        let pc = translate_circuit(&c).expect("small basis");
        for v in vectors(n) {
            out.push((
                format!("random circuit {i} {v:?}"),
                apply_inputs(&pc, &v).expect("length"),
            ));
        }
    }
    let families: [Family; 4] = [
        ("chain", and_chain),
        ("tree", balanced_tree),
        ("fan", fan_out_chain),
        ("not", not_chain),
    ];
    for (name, family) in families {
        for d in 1..=5 {
            let c = family(d);
            let pc = translate_circuit(&c).expect("small basis");
            for bit in [false, true] {
                let v = vec![bit; c.input_count];
                out.push((
                    format!("{name} {d} all {}", bit as u8),
                    apply_inputs(&pc, &v).expect("length"),
                ));
            }
        }
    }
    out
}

pub fn negation_golden() -> Verdict {
    timed(1, "negation normalizes to the opposite value", || {
        let pc = sealed_piece(PieceKind::Neg);
        let mut notes = Vec::new();
        let mut ok = true;
        for (bit, want) in [(false, B1), (true, B0)] {
            let net = apply_inputs(&pc, &[bit]).expect("one input");
            let (nf, trace) = normalize(&net, Strategy::Tam).expect("correct net");
            let got = result_component(&nf).map(|c| canonical_form(&c));
            let expected = canonical_form(&parse_description(want).expect("value"));
            let same = got.as_ref() == Some(&expected) && read_result(&nf) == Ok(!bit);
            ok &= same;
            notes.push(format!(
                "input {} gives {} in {} rounds",
                bit as u8,
                if same {
                    if bit {
                        "b0"
                    } else {
                        "b1"
                    }
                } else {
                    "something else"
                },
                trace.total_rounds
            ));
        }
        (ok, notes.join(", "))
    })
    .within(Duration::from_secs(1))
}

impl Verdict {
    fn within(mut self, limit: Duration) -> Verdict {
        if self.elapsed > limit {
            self.passed = false;
            self.detail.push_str(&format!("; slower than {limit:?}"));
        }
        self
    }
}

pub fn translation_equivalence() -> Verdict {
    timed(2, "translated circuits agree with evaluation", || {
        let (mut circuits, mut checked, mut wrong) = (0usize, 0usize, Vec::new());
        let mut check = |c: &Circuit| {
            circuits += 1;
            let pc = match translate_circuit(c) {
                Ok(pc) => pc,
                Err(e) => {
                    wrong.push(format!("translation failed: {e}"));
                    return;
                }
            };
            let table = eval_all(c).expect("small basis");
            for (v, want) in vectors(c.input_count).zip(table) {
                checked += 1;
                if evaluate(&pc, &v) != Some(want) && wrong.len() < 5 {
                    wrong.push(format!("{c:?} on {v:?}"));
                }
            }
        };
        let enumerated = enumerate_circuits(4, 4, &mut check);
        let mut rng = ChaCha8Rng::seed_from_u64(0xC2);
        for _ in 0..200 {
            let n = rng.gen_range(0..=6);
            let c = random_circuit(&mut rng, n, 10);
            check(&c);
        }
        let detail = format!(
            "{enumerated} enumerated and 200 random circuits, {checked} input vectors, {} disagreements",
            wrong.len()
        );
        (wrong.is_empty(), detail)
    })
    .within(Duration::from_secs(300))
}

fn families() -> [Family; 2] {
    [("chain", and_chain), ("tree", balanced_tree)]
}

pub fn depth_bound() -> Verdict {
    timed(
        3,
        "net depth is at most 6 times circuit depth plus c0",
        || {
            let mut ok = true;
            let mut notes = vec![format!("c0 = {DEPTH_C0}")];
            for (name, family) in families() {
                let mut points = Vec::new();
                for d in 1..=8 {
                    let (_, r) = translate(&family(d)).expect("small basis");
                    ok &= r.target_depth <= 6 * r.source_depth + DEPTH_C0;
                    points.push((d as f64, r.target_depth as f64));
                }
                let slope = linear_slope(&points);
                ok &= slope <= 6.0;
                let last = points.last().map_or(0.0, |p| p.1);
                notes.push(format!("{name} slope {slope:.2}, depth {last} at 8"));
            }
            (ok, notes.join(", "))
        },
    )
}

fn linear_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

pub fn size_bound() -> Verdict {
    timed(4, "net size is quadratic in circuit size", || {
        let mut ok = true;
        let mut worst: f64 = 0.0;
        for (_, family) in families() {
            for d in 1..=8 {
                let (_, r) = translate(&family(d)).expect("small basis");
                let ratio = r.target_size as f64 / (r.source_size * r.source_size) as f64;
                ok &= ratio <= SIZE_C1 as f64;
                worst = worst.max(ratio);
            }
        }
        let mut piece_worst = 0usize;
        for n in 1..=8u32 {
            for kind in [
                PieceKind::Dupl(n),
                PieceKind::Conj(n.max(2)),
                PieceKind::Disj(n.max(2)),
                PieceKind::Neg,
            ] {
                let links = make_piece(kind).expect("in range").net.len();
                ok &= links <= PIECE_SIZE_SLOPE * n as usize + PIECE_SIZE_OFFSET;
                piece_worst = piece_worst.max(links);
            }
        }
        let detail = format!(
            "largest size / source size^2 = {worst:.3} (bound {SIZE_C1}); pieces within {PIECE_SIZE_SLOPE}n+{PIECE_SIZE_OFFSET} links, largest {piece_worst}"
        );
        (ok, detail)
    })
}

pub fn round_bound(corpus: &[(String, ProofNet)]) -> Verdict {
    timed(5, "rounds are at most 3 depth + 2", || {
        let mut bad = Vec::new();
        let mut tight = 0;
        for (name, net) in corpus {
            let d = net_depth(net).expect("typable");
            let (_, trace) = normalize(net, Strategy::Tam).expect("correct");
            let bound = ROUND_A * d + ROUND_B;
            if trace.total_rounds > bound {
                bad.push(format!("{name}: {} > {bound}", trace.total_rounds));
            } else if trace.total_rounds == bound {
                tight += 1;
            }
        }
        let detail = format!(
            "{} nets, {} violations, {tight} at the bound{}",
            corpus.len(),
            bad.len(),
            bad.first()
                .map_or(String::new(), |b| format!(", first {b}"))
        );
        (bad.is_empty(), detail)
    })
}

pub fn confluence(corpus: &[(String, ProofNet)]) -> Verdict {
    timed(6, "normal forms agree across strategies", || {
        let mut bad = Vec::new();
        for (i, (name, net)) in corpus.iter().enumerate() {
            let forms: Vec<_> = [Strategy::Tam, Strategy::Mat, Strategy::Random(i as u64)]
                .into_iter()
                .map(|s| normalize(net, s).map(|(nf, _)| canonical_form(&nf)))
                .collect();
            if forms.iter().any(|f| f.is_err() || f != &forms[0]) {
                bad.push(name.clone());
            }
        }
        (
            bad.is_empty(),
            format!(
                "{} nets under 3 strategies, {} disagreements",
                corpus.len(),
                bad.len()
            ),
        )
    })
}

pub fn maximal_cuts_on_values() -> Verdict {
    timed(7, "maximal cuts lie between an entry and a value", || {
        let mut rng = ChaCha8Rng::seed_from_u64(0xC7);
        let (mut literal, mut at_negation, mut monotone) = (0, 0, 0);
        for _ in 0..100 {
            let n = rng.gen_range(1..=5);
            let c = random_circuit(&mut rng, n, 10);
            let pc = translate_circuit(&c).expect("small basis");
            let bits: Vec<bool> = (0..n).map(|_| rng.gen()).collect();
            let net = apply_inputs(&pc, &bits).expect("length");
            let depths = TypeGraph::infer(&net).expect("typable").cut_depths();
            let max = depths.iter().map(|d| d.1).max().unwrap_or(0);
            let depth_at = |p: Port| {
                depths
                    .iter()
                    .find(|((a, b), _)| *a == p || *b == p)
                    .map(|d| d.1)
            };
            let values: Vec<Port> = pc
                .inputs
                .iter()
                .copied()
                .chain(
                    pc.pieces
                        .iter()
                        .filter(|p| matches!(p.kind, PieceKind::B0 | PieceKind::B1))
                        .map(|p| p.ends.exits[0]),
                )
                .collect();
            let off_value: Vec<(Port, Port)> = depths
                .iter()
                .filter(|&&((a, b), d)| d == max && !values.contains(&a) && !values.contains(&b))
                .map(|d| d.0)
                .collect();
            if off_value.is_empty() {
                literal += 1;
            }
            let from_negation = |&(a, b): &(Port, Port)| {
                pc.pieces.iter().any(|p| {
                    p.kind == PieceKind::Neg && (p.ends.exits[0] == a || p.ends.exits[0] == b)
                })
            };
            if !off_value.is_empty() && off_value.iter().all(from_negation) {
                at_negation += 1;
            }
            // no exit of a piece is deeper than its deepest entry
            let ordered = pc.pieces.iter().all(|p| {
                let entry = p.ends.entries.iter().filter_map(|&e| depth_at(e)).max();
                let exit = p.ends.exits.iter().filter_map(|&x| depth_at(x)).max();
                match (entry, exit) {
                    (Some(e), Some(x)) => e >= x,
                    _ => true,
                }
            });
            monotone += ordered as usize;
        }
        let detail = format!(
            "{literal}/100 circuits have every maximal cut on a value; the other {} have maximal cuts at the exit of a negation ({at_negation}), whose entry is equally deep; no exit deeper than its piece's deepest entry in {monotone}/100",
            100 - literal
        );
        (literal == 100, detail)
    })
}

pub fn correctness_checker() -> Verdict {
    timed(
        8,
        "checker accepts pieces and circuits and rejects mutants",
        || {
            let mut rng = ChaCha8Rng::seed_from_u64(0xC8);
            let mut base: Vec<ProofNet> = catalogue_kinds(4)
                .into_iter()
                .map(|k| make_piece(k).expect("in range").closure())
                .collect();
            for _ in 0..100 {
                let n = rng.gen_range(1..=4);
                base.push(
                    translate_circuit(&random_circuit(&mut rng, n, 8))
                        .expect("small basis")
                        .net,
                );
            }
            let mut all_correct = true;
            for net in &base {
                all_correct &= check_correctness(net) && sequentializable(net);
                if let Some(oracle) = switching_criterion(net, 1 << 16) {
                    all_correct &= oracle;
                }
            }
            let (mut mutants, mut structural, mut rejected, mut accepted, mut confirmed) =
                (0, 0, 0, 0, 0);
            while mutants < 1000 {
                let net = &base[rng.gen_range(0..base.len())];
                let Some(m) = swap_wire_ends(net, &mut rng) else {
                    continue;
                };
                mutants += 1;
                if !validate_structure(&m).is_empty() {
                    structural += 1;
                } else if !check_correctness(&m) {
                    rejected += 1;
                } else {
                    accepted += 1;
                    confirmed += sequentializable(&m) as usize;
                }
            }
            let total_rejected = structural + rejected;
            let valid = mutants - structural;
            let detail = format!(
            "{} pieces and circuits accepted: {all_correct}; {total_rejected}/1000 mutants rejected ({structural} structurally, {rejected} by the criterion, {:.1}% of structurally valid ones); {accepted} accepted, {confirmed} of them confirmed correct by sequentialization",
            base.len(),
            100.0 * rejected as f64 / valid as f64
        );
            (
                all_correct && total_rejected >= 950 && confirmed == accepted,
                detail,
            )
        },
    )
}

/// Sealed circuits of at most 60 links: small translated circuits, sealed
/// pieces and negation chains.
pub fn simulator_corpus() -> Vec<(String, ProofCircuit)> {
    let mut out = Vec::new();
    enumerate_circuits(2, 2, &mut |c| {
        let pc = translate_circuit(c).expect("small basis");
        out.push((format!("{c:?}"), pc));
    });
    for k in catalogue_kinds(3) {
        out.push((format!("sealed {k}"), sealed_piece(k)));
    }
    for d in 1..=4 {
        out.push((
            format!("not chain {d}"),
            translate_circuit(&not_chain(d)).expect("small basis"),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0xC9);
    for i in 0..30 {
        let n = rng.gen_range(1..=3);
        let pc = translate_circuit(&random_circuit(&mut rng, n, 4)).expect("small basis");
        out.push((format!("random circuit {i}"), pc));
    }
    out.retain(|(_, pc)| pc.net.len() <= 60);
    out
}

pub fn simulator() -> Verdict {
    timed(9, "simulators agree with normalization", || {
        let circuits = simulator_corpus();
        let (mut vectors_checked, mut wrong, mut rounds, mut round_errors) = (0, 0, 0, 0);
        for (_, pc) in &circuits {
            let sim = match build_simulator(pc) {
                Ok(s) => s,
                Err(_) => {
                    wrong += 1;
                    continue;
                }
            };
            for v in vectors(pc.input_count()) {
                vectors_checked += 1;
                if sim.eval(&v).ok() != evaluate(pc, &v) {
                    wrong += 1;
                }
                let mut net = apply_inputs(pc, &v).expect("length");
                let mut cfg = encode_config(&net, Budget::for_net(&net)).expect("fits");
                loop {
                    let next = step_configuration(&cfg);
                    match engine_round(&net) {
                        Some(n) => {
                            rounds += 1;
                            if decode_config(&next).ok().as_ref() != Some(&n) {
                                round_errors += 1;
                                break;
                            }
                            net = n;
                            cfg = next;
                        }
                        None => {
                            round_errors += (next != cfg) as usize;
                            break;
                        }
                    }
                }
            }
        }
        let step_points: Vec<(f64, f64)> = [4usize, 8, 16, 24, 32]
            .iter()
            .map(|&slots| {
                let c = build_step_circuit(Budget {
                    slots,
                    arity: 3,
                    conclusions: 2,
                })
                .expect("budget");
                (slots as f64, c.size() as f64)
            })
            .collect();
        let (step_slope, step_r2) = loglog_fit(&step_points);
        let plain = SimOptions {
            exhaustive_folding: false,
            ..Default::default()
        };
        let mut sim_points = Vec::new();
        for d in 1..=4 {
            let pc = translate_circuit(&not_chain(d)).expect("small basis");
            let sim = build_simulator_with(&pc, &plain).expect("budget");
            let agrees =
                vectors(1).all(|v| sim.eval(&v).ok() == eval_circuit(&not_chain(d), &v).ok());
            wrong += (!agrees) as usize;
            sim_points.push((pc.net.len() as f64, sim.circuit.gates.len() as f64));
        }
        let (sim_slope, sim_r2) = loglog_fit(&sim_points);
        let ok = wrong == 0
            && round_errors == 0
            && step_slope <= 3.0
            && step_r2 >= 0.95
            && sim_slope <= 4.0
            && sim_r2 >= 0.95;
        let detail = format!(
            "{} circuits, {vectors_checked} vectors, {wrong} disagreements; {rounds} rounds decoded, {round_errors} mismatches; step gates ~ slots^{step_slope:.2} (R2 {step_r2:.3}); simulator gates ~ links^{sim_slope:.2} (R2 {sim_r2:.3})",
            circuits.len()
        );
        (ok, detail)
    })
}

pub fn throughput() -> Verdict {
    timed(10, "normalizes a net of 100000 links within 10 s", || {
        let c = balanced_tree(13);
        let pc = translate_circuit(&c).expect("small basis");
        let mut rng = ChaCha8Rng::seed_from_u64(0xCA);
        let bits: Vec<bool> = (0..c.input_count).map(|_| rng.gen()).collect();
        let net = apply_inputs(&pc, &bits).expect("length");
        let start = Instant::now();
        let result = normalize(&net, Strategy::Tam);
        let elapsed = start.elapsed();
        let (ok, rounds) = match result {
            Ok((nf, trace)) => (
                read_result(&nf).ok() == eval_circuit(&c, &bits).ok()
                    && trace.rounds.len() == trace.total_rounds,
                trace.total_rounds,
            ),
            Err(_) => (false, 0),
        };
        let detail = format!(
            "{} links, {rounds} rounds traced, normalized in {elapsed:.2?}",
            net.len()
        );
        (
            ok && net.len() >= 100_000 && elapsed < Duration::from_secs(10),
            detail,
        )
    })
}

/// Runs every criterion in order.
pub fn run_all(report: &mut dyn FnMut(&Verdict)) -> Vec<Verdict> {
    let corpus = corpus();
    let checks: Vec<Box<dyn Fn() -> Verdict + '_>> = vec![
        Box::new(negation_golden),
        Box::new(translation_equivalence),
        Box::new(depth_bound),
        Box::new(size_bound),
        Box::new(|| round_bound(&corpus)),
        Box::new(|| confluence(&corpus)),
        Box::new(maximal_cuts_on_values),
        Box::new(correctness_checker),
        Box::new(simulator),
        Box::new(throughput),
    ];
    checks
        .iter()
        .map(|check| {
            let v = check();
            report(&v);
            v
        })
        .collect()
}
