//! Command-line driver over nets in the tuple or description formats and
//! circuits in the circuit tuple format.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Parser, Subcommand, ValueEnum};
use mllu::circuits::gen::{and_chain, balanced_tree, fan_out_chain, not_chain};
use mllu::circuits::{circuit_depth, emit_circuit_dcl, eval_circuit, parse_circuit_dcl, Circuit};
use mllu::netcore::{
    check_correctness, emit_pn_dcl, parse_description, parse_pn_dcl, validate_structure, NetError,
    ProofNet,
};
use mllu::netsim::{build_simulator_with, Budget, RoundMode, SimOptions};
use mllu::pieces::{apply_inputs, catalogue_kinds, make_piece, read_result, ProofCircuit};
use mllu::rewrite::{normalize, ReductionTrace, Strategy};
use mllu::translate::{translate, TranslationReport};
use mllu::typing::{boolean_instance, infer_principal_type, net_depth, net_size};

/// Exit code and captured output of one invocation.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

#[derive(Parser)]
#[command(
    name = "mllu",
    version,
    about = "Proof nets, their normalization and Boolean circuits"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Report structural violations and whether the net is correct
    Check { net: PathBuf },
    /// Print the principal type, size and depth of a net
    Typeof { net: PathBuf },
    /// Normalize a net; the trace goes to stderr
    Normalize {
        net: PathBuf,
        #[arg(short = 'o')]
        output: Option<PathBuf>,
        #[arg(long)]
        trace: bool,
        #[arg(long, default_value = "tam")]
        strategy: Strategy,
    },
    /// Translate a circuit into a proof circuit
    Compile {
        circuit: PathBuf,
        #[arg(short = 'o')]
        output: Option<PathBuf>,
        /// write the translation report as JSON
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Build a circuit that evaluates a proof circuit
    Simulate {
        net: PathBuf,
        #[arg(short = 'o')]
        output: Option<PathBuf>,
        #[arg(long, default_value = "size")]
        rounds: RoundMode,
        /// slot and arity budget as N,K
        #[arg(long, value_parser = parse_budget)]
        budget: Option<(usize, u32)>,
        /// fold only gates with constant operands
        #[arg(long)]
        plain: bool,
    },
    /// Apply inputs to a proof circuit, normalize and print the result
    EvalNet {
        net: PathBuf,
        #[arg(long, default_value = "")]
        inputs: String,
        #[arg(long, default_value = "tam")]
        strategy: Strategy,
        #[arg(long)]
        trace: bool,
    },
    /// Evaluate a circuit
    EvalCirc {
        circuit: PathBuf,
        #[arg(long, default_value = "")]
        inputs: String,
    },
    /// Compare a circuit and a proof circuit on every input vector
    Equiv {
        circuit: PathBuf,
        net: PathBuf,
        #[arg(long, default_value_t = 16)]
        max_n: usize,
        #[arg(long, default_value = "tam")]
        strategy: Strategy,
    },
    /// Translation reports or piece sizes as CSV
    Stats {
        circuits: Vec<PathBuf>,
        #[arg(long, value_enum)]
        family: Option<Family>,
        #[arg(long, default_value_t = 8)]
        max_depth: usize,
        /// list the pieces up to this arity instead
        #[arg(long)]
        pieces: Option<u32>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    Chain,
    Tree,
    Fan,
    Not,
}

enum Failure {
    Usage(String),
    Domain(String),
}

type Res<T> = Result<T, Failure>;

#[derive(Default)]
struct Out {
    stdout: String,
    stderr: String,
}

fn parse_budget(s: &str) -> Result<(usize, u32), String> {
    let (n, k) = s.split_once(',').ok_or("expected N,K")?;
    let n = n
        .trim()
        .parse()
        .map_err(|_| format!("bad slot count '{n}'"))?;
    let k = k.trim().parse().map_err(|_| format!("bad arity '{k}'"))?;
    Ok((n, k))
}

fn parse_bits(s: &str) -> Res<Vec<bool>> {
    s.chars()
        .map(|c| match c {
            '0' => Ok(false),
            '1' => Ok(true),
            _ => Err(Failure::Usage(format!(
                "--inputs takes a string of 0 and 1, got '{s}'"
            ))),
        })
        .collect()
}

fn bits_string(bits: &[bool]) -> String {
    bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

fn bit(b: bool) -> &'static str {
    if b {
        "1"
    } else {
        "0"
    }
}

fn domain(path: &Path, e: impl std::fmt::Display) -> Failure {
    Failure::Domain(format!("{}: {e}", path.display()))
}

fn read(path: &Path) -> Res<String> {
    fs::read_to_string(path).map_err(|e| domain(path, e))
}

fn write(path: &Path, text: &str) -> Res<()> {
    fs::write(path, text).map_err(|e| domain(path, e))
}

fn is_tuple_format(text: &str) -> bool {
    text.lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .find(|l| !l.is_empty())
        .is_some_and(|l| l.starts_with("pn ") || l.starts_with("concl "))
}

fn parse_net(text: &str) -> Result<ProofNet, NetError> {
    if is_tuple_format(text) {
        parse_pn_dcl(text)
    } else {
        parse_description(text.trim())
    }
}

fn load_net(path: &Path) -> Res<ProofNet> {
    parse_net(&read(path)?).map_err(|e| domain(path, e))
}

fn load_proof_circuit(path: &Path) -> Res<ProofCircuit> {
    ProofCircuit::from_net(load_net(path)?).map_err(|e| domain(path, e))
}

fn load_circuit(path: &Path) -> Res<Circuit> {
    parse_circuit_dcl(&read(path)?).map_err(|e| domain(path, e))
}

fn eval_net(
    pc: &ProofCircuit,
    bits: &[bool],
    strategy: Strategy,
) -> Result<(bool, ReductionTrace), String> {
    let net = apply_inputs(pc, bits).map_err(|e| e.to_string())?;
    let (nf, trace) = normalize(&net, strategy).map_err(|e| e.to_string())?;
    let b = read_result(&nf).map_err(|e| e.to_string())?;
    Ok((b, trace))
}

/// Runs one invocation; `args` includes the program name.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => Outcome {
                    code: 0,
                    stdout: text,
                    stderr: String::new(),
                },
                _ => Outcome {
                    code: 2,
                    stdout: String::new(),
                    stderr: text,
                },
            };
        }
    };
    let mut out = Out::default();
    let code = match dispatch(cli.command, &mut out) {
        Ok(code) => code,
        Err(Failure::Usage(m)) => {
            let _ = writeln!(out.stderr, "error: {m}");
            2
        }
        Err(Failure::Domain(m)) => {
            let _ = writeln!(out.stderr, "error: {m}");
            1
        }
    };
    Outcome {
        code,
        stdout: out.stdout,
        stderr: out.stderr,
    }
}

fn dispatch(cmd: Command, out: &mut Out) -> Res<i32> {
    match cmd {
        Command::Check { net } => check(&net, out),
        Command::Typeof { net } => type_of(&net, out),
        Command::Normalize {
            net,
            output,
            trace,
            strategy,
        } => normalize_cmd(&net, output.as_deref(), trace, strategy, out),
        Command::Compile {
            circuit,
            output,
            report,
        } => compile(&circuit, output.as_deref(), report.as_deref(), out),
        Command::Simulate {
            net,
            output,
            rounds,
            budget,
            plain,
        } => simulate(&net, output.as_deref(), rounds, budget, plain, out),
        Command::EvalNet {
            net,
            inputs,
            strategy,
            trace,
        } => {
            let bits = parse_bits(&inputs)?;
            let pc = load_proof_circuit(&net)?;
            let (b, t) = eval_net(&pc, &bits, strategy).map_err(|e| domain(&net, e))?;
            if trace {
                out.stderr.push_str(&t.to_string());
            }
            let _ = writeln!(out.stdout, "{}", bit(b));
            Ok(0)
        }
        Command::EvalCirc { circuit, inputs } => {
            let bits = parse_bits(&inputs)?;
            let c = load_circuit(&circuit)?;
            let b = eval_circuit(&c, &bits).map_err(|e| domain(&circuit, e))?;
            let _ = writeln!(out.stdout, "{}", bit(b));
            Ok(0)
        }
        Command::Equiv {
            circuit,
            net,
            max_n,
            strategy,
        } => equiv(&circuit, &net, max_n, strategy, out),
        Command::Stats {
            circuits,
            family,
            max_depth,
            pieces,
        } => stats(&circuits, family, max_depth, pieces, out),
    }
}

fn check(path: &Path, out: &mut Out) -> Res<i32> {
    let text = read(path)?;
    let net = match parse_net(&text) {
        Ok(n) => n,
        Err(NetError::Invalid(vs)) => {
            for v in vs {
                let _ = writeln!(out.stdout, "violation: {v}");
            }
            let _ = writeln!(out.stdout, "correct: no");
            return Ok(1);
        }
        Err(e) => return Err(domain(path, e)),
    };
    let violations = validate_structure(&net);
    for v in &violations {
        let _ = writeln!(out.stdout, "violation: {v}");
    }
    let correct = violations.is_empty() && check_correctness(&net);
    let _ = writeln!(out.stdout, "links: {}", net.len());
    let _ = writeln!(out.stdout, "conclusions: {}", net.conclusions().len());
    let _ = writeln!(
        out.stdout,
        "correct: {}",
        if correct { "yes" } else { "no" }
    );
    Ok(if correct { 0 } else { 1 })
}

fn type_of(path: &Path, out: &mut Out) -> Res<i32> {
    let net = load_net(path)?;
    let (seq, _) = infer_principal_type(&net).map_err(|e| domain(path, e))?;
    let depth = net_depth(&net).map_err(|e| domain(path, e))?;
    let _ = writeln!(out.stdout, "type: {seq}");
    let boolean = match seq.0.as_slice() {
        [f] => boolean_instance(f).map(|a| format!("B[{a}]")),
        _ => None,
    };
    let _ = writeln!(
        out.stdout,
        "boolean: {}",
        boolean.as_deref().unwrap_or("no")
    );
    let _ = writeln!(out.stdout, "size: {}", net_size(&net));
    let _ = writeln!(out.stdout, "depth: {depth}");
    Ok(0)
}

fn normalize_cmd(
    path: &Path,
    output: Option<&Path>,
    trace: bool,
    strategy: Strategy,
    out: &mut Out,
) -> Res<i32> {
    let net = load_net(path)?;
    let (nf, t) = normalize(&net, strategy).map_err(|e| domain(path, e))?;
    if trace {
        out.stderr.push_str(&t.to_string());
    }
    let text = emit_pn_dcl(&nf);
    match output {
        Some(o) => {
            write(o, &text)?;
            let _ = writeln!(out.stdout, "rounds={} links={}", t.total_rounds, nf.len());
        }
        None => out.stdout.push_str(&text),
    }
    Ok(0)
}

fn compile(path: &Path, output: Option<&Path>, report: Option<&Path>, out: &mut Out) -> Res<i32> {
    let c = load_circuit(path)?;
    let (pc, r) = translate(&c).map_err(|e| domain(path, e))?;
    let text = emit_pn_dcl(&pc.net);
    if let Some(p) = report {
        let json = serde_json::to_string_pretty(&r).map_err(|e| domain(p, e))?;
        write(p, &(json + "\n"))?;
    }
    match output {
        Some(o) => {
            write(o, &text)?;
            let _ = writeln!(
                out.stdout,
                "inputs={} links={} depth={} garbage={}",
                pc.input_count(),
                r.target_size,
                r.target_depth,
                r.garbage_count
            );
        }
        None => out.stdout.push_str(&text),
    }
    Ok(0)
}

fn simulate(
    path: &Path,
    output: Option<&Path>,
    rounds: RoundMode,
    budget: Option<(usize, u32)>,
    plain: bool,
    out: &mut Out,
) -> Res<i32> {
    let pc = load_proof_circuit(path)?;
    let opts = SimOptions {
        rounds,
        budget: budget.map(|(slots, arity)| Budget {
            slots,
            arity,
            conclusions: 1,
        }),
        exhaustive_folding: !plain,
    };
    let sim = build_simulator_with(&pc, &opts).map_err(|e| domain(path, e))?;
    let text = emit_circuit_dcl(&sim.circuit);
    match output {
        Some(o) => {
            write(o, &text)?;
            let _ = writeln!(
                out.stdout,
                "inputs={} gates={} depth={} rounds={}/{} budget={},{}",
                sim.circuit.input_count,
                sim.circuit.gates.len(),
                circuit_depth(&sim.circuit),
                sim.rounds_built,
                sim.rounds_unrolled,
                sim.budget.slots,
                sim.budget.arity
            );
        }
        None => out.stdout.push_str(&text),
    }
    Ok(0)
}

fn equiv(cpath: &Path, npath: &Path, max_n: usize, strategy: Strategy, out: &mut Out) -> Res<i32> {
    let c = load_circuit(cpath)?;
    let pc = load_proof_circuit(npath)?;
    let n = c.input_count;
    if pc.input_count() != n {
        return Err(Failure::Domain(format!(
            "{} has {n} inputs but {} has {}",
            cpath.display(),
            npath.display(),
            pc.input_count()
        )));
    }
    if n > max_n {
        return Err(Failure::Domain(format!(
            "{n} inputs exceed --max-n {max_n}"
        )));
    }
    let vectors: Vec<Vec<bool>> = (0..1u64 << n)
        .map(|m| (0..n).map(|i| m >> (n - 1 - i) & 1 == 1).collect())
        .collect();
    let workers = std::thread::available_parallelism()
        .map_or(1, |w| w.get())
        .min(vectors.len().max(1));
    let chunk = vectors.len().div_ceil(workers).max(1);
    let results: Vec<Result<(bool, bool), String>> = std::thread::scope(|s| {
        let handles: Vec<_> = vectors
            .chunks(chunk)
            .map(|vs| {
                let (c, pc) = (&c, &pc);
                s.spawn(move || {
                    vs.iter()
                        .map(|v| {
                            let want = eval_circuit(c, v).map_err(|e| e.to_string())?;
                            let got = eval_net(pc, v, strategy)?.0;
                            Ok((want, got))
                        })
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        handles
            .into_iter()
            .flat_map(|h| h.join().expect("worker panicked"))
            .collect()
    });
    let mut agree = 0;
    for (v, r) in vectors.iter().zip(results) {
        let (want, got) = r.map_err(Failure::Domain)?;
        if want == got {
            agree += 1;
        } else {
            let _ = writeln!(
                out.stdout,
                "differ {}: circuit={} net={}",
                bits_string(v),
                bit(want),
                bit(got)
            );
        }
    }
    let _ = writeln!(out.stdout, "agree {agree}/{}", vectors.len());
    Ok(if agree == vectors.len() { 0 } else { 1 })
}

fn report_row(out: &mut Out, name: &str, r: &TranslationReport) {
    let ratio = r.target_size as f64 / (r.source_size * r.source_size) as f64;
    let rounds = |i: usize| {
        r.rounds_to_normalize
            .get(i)
            .map_or(String::new(), |k| k.to_string())
    };
    let _ = writeln!(
        out.stdout,
        "{name},{},{},{},{},{},{ratio:.3},{},{}",
        r.source_size,
        r.source_depth,
        r.target_size,
        r.target_depth,
        r.garbage_count,
        rounds(0),
        rounds(1)
    );
}

fn stats(
    paths: &[PathBuf],
    family: Option<Family>,
    max_depth: usize,
    pieces: Option<u32>,
    out: &mut Out,
) -> Res<i32> {
    if let Some(k) = pieces {
        let _ = writeln!(out.stdout, "kind,entries,exits,garbage,links");
        for kind in catalogue_kinds(k) {
            let p = make_piece(kind).map_err(|e| Failure::Usage(e.to_string()))?;
            let _ = writeln!(
                out.stdout,
                "{kind},{},{},{},{}",
                p.ends.entries.len(),
                p.ends.exits.len(),
                p.ends.garbage.len(),
                p.net.len()
            );
        }
        return Ok(0);
    }
    if paths.is_empty() && family.is_none() {
        return Err(Failure::Usage(
            "stats needs circuit files, --family or --pieces".into(),
        ));
    }
    let _ = writeln!(
        out.stdout,
        "name,source_size,source_depth,target_size,target_depth,garbage,size_ratio,rounds_zero,rounds_one"
    );
    for p in paths {
        let c = load_circuit(p)?;
        let (_, r) = translate(&c).map_err(|e| domain(p, e))?;
        report_row(out, &p.display().to_string(), &r);
    }
    if let Some(f) = family {
        let (name, make): (&str, fn(usize) -> Circuit) = match f {
            Family::Chain => ("chain", and_chain),
            Family::Tree => ("tree", balanced_tree),
            Family::Fan => ("fan", fan_out_chain),
            Family::Not => ("not", not_chain),
        };
        for d in 1..=max_depth {
            let (_, r) = translate(&make(d)).map_err(|e| Failure::Domain(e.to_string()))?;
            report_row(out, &format!("{name}-{d}"), &r);
        }
    }
    Ok(0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn budgets() {
        assert_eq!(parse_budget("12,3"), Ok((12, 3)));
        assert_eq!(parse_budget(" 4 , 2"), Ok((4, 2)));
        assert!(parse_budget("12").is_err());
        assert!(parse_budget("a,3").is_err());
    }

    #[test]
    fn bit_strings() {
        assert_eq!(parse_bits("101").ok(), Some(vec![true, false, true]));
        assert_eq!(parse_bits("").ok(), Some(vec![]));
        assert!(parse_bits("12").is_err());
        assert_eq!(bits_string(&[true, false, false]), "100");
    }

    #[test]
    fn format_detection() {
        assert!(is_tuple_format("# comment\n\npn 3 1 e ax\n"));
        assert!(is_tuple_format("concl 3 1 2\n"));
        assert!(!is_tuple_format(
            "par_s^{p,q,r}(tensor_r^{p,q}(ax_p, ax_q))"
        ));
        assert!(!is_tuple_format(""));
    }
}
