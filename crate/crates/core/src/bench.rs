//! Software throughput harness for the simulator.
//!
//! Inputs are pseudo-random over the design's alphabet from a fixed seed, so
//! repeated runs see identical symbol streams and produce identical record
//! counts. Timings are host-local and never compared against a threshold.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::compiler::{OverlayParams, PlaceOptions, PlacedDesign};
use crate::pipeline::{compile, PipelineError};
use crate::sim::{run_streaming, SimError};
use crate::symbols::SymbolClass;
use crate::wfa::{ScoreMode, Transition, WeightedAutomaton};

/// Fan-out used for the synthetic sweep designs.
pub const SWEEP_FANOUT: usize = 16;
const SWEEP_PATTERN_LEN: usize = 6;

/// Bytes any cell of `design` can match, ascending.
pub fn design_alphabet(design: &PlacedDesign) -> Vec<u8> {
    design
        .cells
        .iter()
        .fold(SymbolClass::EMPTY, |acc, c| acc.union(&c.symbols))
        .iter()
        .collect()
}

pub fn random_input(alphabet: &[u8], len: usize, seed: u64) -> Vec<u8> {
    if alphabet.is_empty() {
        return vec![0; len];
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..len)
        .map(|_| alphabet[rng.gen_range(0..alphabet.len())])
        .collect()
}

/// Always-active hub states, each entered from q0 on the first symbol and
/// feeding one exact DNA pattern of length 6 (+2 per symbol). The ANML form
/// fills `cells - 1` cells or fewer, and every hub stays busy for the whole
/// input.
pub fn synthetic_wfa(cells: usize, seed: u64) -> WeightedAutomaton {
    let per_segment = SWEEP_PATTERN_LEN + 2;
    let segments = ((cells - 1) / per_segment).max(1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let any = SymbolClass::from_bytes(b"ACGT");
    let mut transitions = Vec::new();
    let mut accepts = Vec::new();
    let mut next_state = 1;
    for _ in 0..segments {
        let hub = next_state;
        next_state += 1;
        transitions.push(Transition::new(0, hub, any, 0));
        transitions.push(Transition::new(hub, hub, any, 0));
        let mut from = hub;
        for _ in 0..SWEEP_PATTERN_LEN {
            let symbol = b"ACGT"[rng.gen_range(0..4)];
            transitions.push(Transition::new(
                from,
                next_state,
                SymbolClass::single(symbol),
                2,
            ));
            from = next_state;
            next_state += 1;
        }
        accepts.push(from);
    }
    WeightedAutomaton::new(next_state, 0, accepts, transitions).expect("states allocated above")
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchReport {
    pub cells: usize,
    pub symbols: usize,
    pub repetitions: usize,
    pub records: u64,
    pub cycles: u64,
    pub median_symbols_per_sec: f64,
}

#[derive(Debug, thiserror::Error)]
pub enum BenchError {
    #[error(transparent)]
    Compile(#[from] PipelineError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error("record count changed between repetitions ({0} vs {1})")]
    Nondeterministic(u64, u64),
}

/// Runs `design` over the same seeded input `repetitions` times.
pub fn bench_design(
    design: &PlacedDesign,
    symbols: usize,
    repetitions: usize,
    seed: u64,
) -> Result<BenchReport, BenchError> {
    let input = random_input(&design_alphabet(design), symbols, seed);
    let mut timings = Vec::with_capacity(repetitions);
    let mut records = None;
    let mut cycles = 0;
    for _ in 0..repetitions.max(1) {
        let started = Instant::now();
        let summary = run_streaming(design, &input, design.mode, |_| {})?;
        timings.push(started.elapsed());
        cycles = summary.cycles;
        match records {
            Some(r) if r != summary.records => {
                return Err(BenchError::Nondeterministic(r, summary.records))
            }
            _ => records = Some(summary.records),
        }
    }
    timings.sort();
    let median = timings[timings.len() / 2].max(Duration::from_nanos(1));
    Ok(BenchReport {
        cells: design.params.array_size(),
        symbols,
        repetitions: timings.len(),
        records: records.unwrap_or(0),
        cycles,
        median_symbols_per_sec: symbols as f64 / median.as_secs_f64(),
    })
}

pub fn sweep_design(cells: usize, seed: u64) -> Result<PlacedDesign, PipelineError> {
    let params = OverlayParams::new(cells, SWEEP_FANOUT)?;
    let wfa = synthetic_wfa(cells, seed);
    let compiled = compile(
        &wfa,
        &params,
        ScoreMode::Global,
        &PlaceOptions {
            budget: 2_000,
            seed,
        },
    )?;
    Ok(compiled.design)
}

/// One report per array size, each over a synthetic design filling that array.
pub fn sweep(
    sizes: &[usize],
    symbols: usize,
    repetitions: usize,
    seed: u64,
) -> Result<Vec<BenchReport>, BenchError> {
    sizes
        .iter()
        .map(|&cells| bench_design(&sweep_design(cells, seed)?, symbols, repetitions, seed))
        .collect()
}
