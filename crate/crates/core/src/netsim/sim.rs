use serde::{Deserialize, Serialize};

use crate::circuits::{eval_circuit, Circuit, GateBuilder, GateId};
use crate::pieces::{apply_inputs, ProofCircuit};
use crate::typing::net_depth;

use super::step::{extract, step};
use super::{encode_config, Budget, Layout, SimError};

/// How many rounds the simulator unrolls.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum RoundMode {
    /// one round per link of the net with its inputs applied
    #[default]
    Size,
    /// `3 * depth + 2` rounds
    Depth,
}

impl std::str::FromStr for RoundMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "size" => Ok(RoundMode::Size),
            "depth" => Ok(RoundMode::Depth),
            _ => Err(format!("unknown round mode '{s}' (size, depth)")),
        }
    }
}

/// A circuit computing what a proof circuit computes, by reducing its
/// configuration.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimulatorCircuit {
    pub circuit: Circuit,
    pub rounds_unrolled: usize,
    /// rounds actually laid out before the configuration stopped changing;
    /// later rounds would repeat the same gates
    pub rounds_built: usize,
    /// (input, configuration bit) for every bit set by an input; the bit
    /// is the input itself or its negation
    pub input_map: Vec<(usize, usize)>,
    pub budget: Budget,
}

impl SimulatorCircuit {
    pub fn eval(&self, bits: &[bool]) -> Result<bool, SimError> {
        Ok(eval_circuit(&self.circuit, bits)?)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimOptions {
    pub rounds: RoundMode,
    /// `None` for the smallest budget that fits the net
    pub budget: Option<Budget>,
    /// with at most six inputs, fold every gate that is constant over all
    /// input vectors rather than only gates with constant operands
    pub exhaustive_folding: bool,
}

impl Default for SimOptions {
    fn default() -> Self {
        SimOptions {
            rounds: RoundMode::Size,
            budget: None,
            exhaustive_folding: true,
        }
    }
}

pub fn build_simulator(pc: &ProofCircuit) -> Result<SimulatorCircuit, SimError> {
    build_simulator_with(pc, &SimOptions::default())
}

/// Builds the simulator of `pc`. The configuration starts as the net with
/// all inputs 0, except that the fields where a value 1 differs from a
/// value 0 read the corresponding input.
pub fn build_simulator_with(
    pc: &ProofCircuit,
    opts: &SimOptions,
) -> Result<SimulatorCircuit, SimError> {
    let (mode, budget) = (opts.rounds, opts.budget);
    let n = pc.input_count();
    let zeros = apply_inputs(pc, &vec![false; n])?;
    let budget = budget.unwrap_or_else(|| Budget::for_net(&zeros));
    let lay = Layout::new(budget)?;
    let base = encode_config(&zeros, budget)?;
    let mut input_map = Vec::new();
    for j in 0..n {
        let mut bits = vec![false; n];
        bits[j] = true;
        let cfg = encode_config(&apply_inputs(pc, &bits)?, budget)?;
        for (i, (&x, &y)) in base.bits.iter().zip(&cfg.bits).enumerate() {
            if x != y {
                input_map.push((j, i));
            }
        }
    }
    input_map.sort_by_key(|&(_, i)| i);

    let mut b = if opts.exhaustive_folding {
        GateBuilder::with_truth_tables(n)
    } else {
        GateBuilder::new(n)
    };
    let mut cfg: Vec<GateId> = base.bits.iter().map(|&x| b.constant(x)).collect();
    for &(j, i) in &input_map {
        let x = b.input(j);
        cfg[i] = if base.bits[i] { b.not(x) } else { x };
    }
    let rounds_unrolled = match mode {
        RoundMode::Size => zeros.len(),
        RoundMode::Depth => 3 * net_depth(&zeros)? + 2,
    };
    let mut rounds_built = 0;
    for _ in 0..rounds_unrolled {
        let next = step(&mut b, lay, &cfg);
        if next == cfg {
            break;
        }
        cfg = next;
        rounds_built += 1;
    }
    let out = extract(&mut b, lay, &cfg);
    Ok(SimulatorCircuit {
        circuit: b.finish(out),
        rounds_unrolled,
        rounds_built,
        input_map,
        budget,
    })
}

/// Least-squares fit of `log y` against `log x`: the slope and the
/// coefficient of determination.
pub fn loglog_fit(points: &[(f64, f64)]) -> (f64, f64) {
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
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
