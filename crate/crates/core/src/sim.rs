//! Cycle-level simulation of a configured STE+ array.
//!
//! One input symbol per cycle. Every read comes from the cycle-`t` state and
//! every write goes to the cycle-`t + 1` state, so cells may be evaluated in
//! any order. Scores of converging paths combine with `max`; a firing cell
//! adds its weight register to the best incoming score.

use serde::Serialize;
use thiserror::Error;

use crate::compiler::PlacedDesign;
use crate::symbols::SymbolClass;
use crate::wfa::{Best, Score, ScoreMode};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SimError {
    #[error("score overflow in cell {cell} at cycle {cycle}")]
    ScoreOverflow { cell: usize, cycle: u64 },
    #[error("malformed design: {0}")]
    Malformed(String),
}

/// Emitted whenever an accept cell activates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct MatchRecord {
    pub cell: usize,
    /// Symbols consumed when the accept cell activated (1-based).
    pub offset: u64,
    pub score: Score,
}

impl MatchRecord {
    /// `offset<TAB>cell_id<TAB>score`
    pub fn to_tsv(&self) -> String {
        format!("{}\t{}\t{}", self.offset, self.cell, self.score)
    }
}

/// Activation bits and score registers at one cycle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimState {
    active: Vec<u64>,
    scores: Vec<Score>,
    cycle: u64,
    /// Active cells, ascending.
    live: Vec<usize>,
}

impl SimState {
    fn blank(cells: usize) -> Self {
        SimState {
            active: vec![0; cells.div_ceil(64)],
            scores: vec![0; cells],
            cycle: 0,
            live: Vec::new(),
        }
    }

    pub fn cycle(&self) -> u64 {
        self.cycle
    }

    pub fn is_active(&self, cell: usize) -> bool {
        self.active[cell / 64] >> (cell % 64) & 1 == 1
    }

    /// Score register of `cell`; 0 while the cell is inactive.
    pub fn score(&self, cell: usize) -> Score {
        self.scores[cell]
    }

    pub fn active_cells(&self) -> &[usize] {
        &self.live
    }

    fn clear(&mut self) {
        for &c in &self.live {
            self.active[c / 64] &= !(1 << (c % 64));
            self.scores[c] = 0;
        }
        self.live.clear();
    }

    fn activate(&mut self, cell: usize, score: Score) {
        self.active[cell / 64] |= 1 << (cell % 64);
        self.scores[cell] = score;
        self.live.push(cell);
    }
}

pub fn initial_state(design: &PlacedDesign) -> SimState {
    let mut state = SimState::blank(design.cells.len());
    for (i, cell) in design.cells.iter().enumerate() {
        if cell.start_bit {
            state.activate(i, 0);
        }
    }
    state
}

/// Advances `state` by one symbol. Pure: the same inputs always give the same outputs.
pub fn step(
    design: &PlacedDesign,
    state: &SimState,
    symbol: u8,
) -> Result<(SimState, Vec<MatchRecord>), SimError> {
    let mut sim = Simulator::new(design)?;
    let mut next = SimState::blank(design.cells.len());
    let mut records = Vec::new();
    sim.step_into(state, symbol, &mut next, &mut |r| records.push(r))?;
    Ok((next, records))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunOutput {
    pub records: Vec<MatchRecord>,
    pub best: Option<Best>,
    pub exact: bool,
    pub cycles: u64,
}

/// The JSON summary written next to the record stream.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RunSummary {
    pub best_score: Option<Score>,
    pub best_offset: Option<usize>,
    pub exact: bool,
    pub cycles: u64,
    pub records: u64,
}

pub fn run(design: &PlacedDesign, input: &[u8], mode: ScoreMode) -> Result<RunOutput, SimError> {
    let mut records = Vec::new();
    let summary = run_streaming(design, input, mode, |r| records.push(r))?;
    Ok(RunOutput {
        records,
        best: summary
            .best_offset
            .zip(summary.best_score)
            .map(|(offset, score)| Best { score, offset }),
        exact: summary.exact,
        cycles: summary.cycles,
    })
}

/// Like [`run`] but hands each record to `sink` instead of collecting them.
///
/// GLOBAL best: highest score among records at offset `input.len()`.
/// LOCAL best: highest score over all records, earliest offset on ties.
/// `exact` is false when a missing restart connection can matter for this
/// input (see [`PlacedDesign::exact_for`]) or the design was compiled for a
/// different mode.
pub fn run_streaming(
    design: &PlacedDesign,
    input: &[u8],
    mode: ScoreMode,
    mut sink: impl FnMut(MatchRecord),
) -> Result<RunSummary, SimError> {
    let mut sim = Simulator::new(design)?;
    let mut best: Option<Best> = None;
    let mut count = 0u64;
    let end = input.len() as u64;
    let state = sim.feed(initial_state(design), input, &mut |r: MatchRecord| {
        count += 1;
        let counts = match mode {
            ScoreMode::Global => r.offset == end,
            ScoreMode::Local => true,
        };
        if counts && best.is_none_or(|b| r.score > b.score) {
            best = Some(Best {
                score: r.score,
                offset: r.offset as usize,
            });
        }
        sink(r);
    })?;
    Ok(RunSummary {
        best_score: best.map(|b| b.score),
        best_offset: best.map(|b| b.offset),
        exact: design.exact_for(input.len()) && design.mode == mode,
        cycles: state.cycle(),
        records: count,
    })
}

/// Reusable simulation engine for one design: keeps the interconnect in
/// adjacency form plus scratch buffers, so stepping costs time proportional
/// to the number of active cells rather than the array size.
pub struct Simulator<'d> {
    design: &'d PlacedDesign,
    symbols: Vec<SymbolClass>,
    /// Per-symbol bitset of cells whose symbol table holds it, built on first use.
    matching: Vec<Option<Vec<u64>>>,
    weights: Vec<Score>,
    accept_bits: Vec<u64>,
    fan_start: Vec<usize>,
    fan_targets: Vec<usize>,
    restart_cells: Vec<usize>,
    /// Start-bit cells as a bitset, one bit per cell.
    start_bits: Vec<u64>,
    /// Best offer per cell this cycle; meaningful only where `offered` is set.
    incoming: Vec<Score>,
    offered: Vec<u64>,
}

impl<'d> Simulator<'d> {
    pub fn new(design: &'d PlacedDesign) -> Result<Self, SimError> {
        let n = design.cells.len();
        if n != design.params.array_size() {
            return Err(SimError::Malformed(format!(
                "{n} cells for array size {}",
                design.params.array_size()
            )));
        }
        let mut fan_start = Vec::with_capacity(n + 1);
        let mut fan_targets = Vec::new();
        let mut start_bits = vec![0u64; n.div_ceil(64)];
        let mut restart_cells = Vec::new();
        let mut accept_bits = vec![0u64; n.div_ceil(64)];
        for (i, cell) in design.cells.iter().enumerate() {
            fan_start.push(fan_targets.len());
            for t in cell.enabled_targets() {
                if t >= n {
                    return Err(SimError::Malformed(format!(
                        "cell {i} drives cell {t} outside the array"
                    )));
                }
                fan_targets.push(t);
            }
            if cell.start_bit {
                start_bits[i / 64] |= 1 << (i % 64);
            }
            if cell.start_connected {
                restart_cells.push(i);
            }
            if cell.accept {
                accept_bits[i / 64] |= 1 << (i % 64);
            }
        }
        fan_start.push(fan_targets.len());
        Ok(Simulator {
            design,
            symbols: design.cells.iter().map(|c| c.symbols).collect(),
            matching: vec![None; 256],
            weights: design.cells.iter().map(|c| c.weight).collect(),
            accept_bits,
            fan_start,
            fan_targets,
            restart_cells,
            offered: vec![0; start_bits.len()],
            start_bits,
            incoming: vec![0; n],
        })
    }

    fn matching_cells(&mut self, symbol: u8) {
        let symbols = &self.symbols;
        self.matching[symbol as usize].get_or_insert_with(|| {
            let mut bits = vec![0u64; symbols.len().div_ceil(64)];
            for (i, class) in symbols.iter().enumerate() {
                if class.contains(symbol) {
                    bits[i / 64] |= 1 << (i % 64);
                }
            }
            bits
        });
    }

    /// Writes the successor of `cur` into `next`, reporting accept activations to `sink`.
    pub fn step_into(
        &mut self,
        cur: &SimState,
        symbol: u8,
        next: &mut SimState,
        sink: &mut impl FnMut(MatchRecord),
    ) -> Result<(), SimError> {
        next.clear();
        self.matching_cells(symbol);
        let matching = self.matching[symbol as usize]
            .as_deref()
            .expect("built above");
        let hit = |t: usize| matching[t / 64] >> (t % 64) & 1 == 1;
        let (offered, incoming) = (&mut self.offered, &mut self.incoming);
        let mut offer = |t: usize, score: Score| {
            let (w, bit) = (t / 64, 1u64 << (t % 64));
            if offered[w] & bit == 0 {
                offered[w] |= bit;
                incoming[t] = score;
            } else if score > incoming[t] {
                incoming[t] = score;
            }
        };
        for &j in &cur.live {
            let score = cur.scores[j];
            for &t in &self.fan_targets[self.fan_start[j]..self.fan_start[j + 1]] {
                if hit(t) {
                    offer(t, score);
                }
            }
        }
        if self.design.start_lane.asserted(cur.cycle) {
            for &t in &self.restart_cells {
                if hit(t) {
                    offer(t, 0);
                }
            }
        }

        // Word-wise scan keeps `next.live` ascending without sorting.
        let cycle = cur.cycle + 1;
        let mut result = Ok(());
        for w in 0..self.offered.len() {
            let offered = std::mem::take(&mut self.offered[w]);
            let mut bits = offered | self.start_bits[w];
            while bits != 0 {
                let t = w * 64 + bits.trailing_zeros() as usize;
                bits &= bits - 1;
                if offered >> (t % 64) & 1 == 0 {
                    next.activate(t, 0);
                    continue;
                }
                match self.incoming[t].checked_add(self.weights[t]) {
                    Some(score) => {
                        next.activate(t, score);
                        if self.accept_bits[w] >> (t % 64) & 1 == 1 {
                            sink(MatchRecord {
                                cell: t,
                                offset: cycle,
                                score,
                            });
                        }
                    }
                    None if result.is_ok() => {
                        result = Err(SimError::ScoreOverflow { cell: t, cycle });
                    }
                    None => {}
                }
            }
        }
        next.cycle = cycle;
        result
    }

    /// Consumes `input` starting from `state` and returns the final state.
    pub fn feed(
        &mut self,
        state: SimState,
        input: &[u8],
        sink: &mut impl FnMut(MatchRecord),
    ) -> Result<SimState, SimError> {
        let mut cur = state;
        let mut next = SimState::blank(cur.scores.len());
        for &symbol in input {
            self.step_into(&cur, symbol, &mut next, sink)?;
            std::mem::swap(&mut cur, &mut next);
        }
        Ok(cur)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compiler::{OverlayParams, StartLane, SteCell};

    /// Start cell 0 plus one node cell {A}/+2, start-connected and accepting.
    fn one_cell() -> PlacedDesign {
        let params = OverlayParams::new(2, 2).unwrap();
        let mut cells: Vec<SteCell> = (0..2).map(|c| SteCell::blank(c, 2)).collect();
        cells[0].start_bit = true;
        cells[1].symbols = SymbolClass::single(b'A');
        cells[1].weight = 2;
        cells[1].accept = true;
        cells[1].start_connected = true;
        PlacedDesign {
            params,
            mode: ScoreMode::Local,
            start_cell: 0,
            start_lane: StartLane::AllInput,
            cells,
            placement: vec![1],
            missing_restarts: vec![],
        }
    }

    #[test]
    fn one_step_match() {
        let d = one_cell();
        let s0 = initial_state(&d);
        assert_eq!(s0.active_cells(), &[0]);
        let (s1, recs) = step(&d, &s0, b'A').unwrap();
        assert_eq!(
            recs,
            vec![MatchRecord {
                cell: 1,
                offset: 1,
                score: 2
            }]
        );
        assert_eq!(s1.active_cells(), &[0, 1]);
        assert_eq!(s1.score(1), 2);
    }

    #[test]
    fn symbol_miss_resets() {
        let d = one_cell();
        let (s1, _) = step(&d, &initial_state(&d), b'A').unwrap();
        let (s2, recs) = step(&d, &s1, b'C').unwrap();
        assert!(recs.is_empty());
        assert_eq!(s2.active_cells(), &[0]);
        assert_eq!(s2.score(1), 0);
        assert_eq!(s2.cycle(), 2);
    }

    #[test]
    fn start_of_data_lane_fires_once() {
        let mut d = one_cell();
        d.start_lane = StartLane::StartOfData;
        d.mode = ScoreMode::Global;
        let out = run(&d, b"AA", ScoreMode::Global).unwrap();
        assert_eq!(out.records.len(), 1);
        assert_eq!(out.best, None);
        let out = run(&d, b"A", ScoreMode::Global).unwrap();
        assert_eq!(
            out.best,
            Some(Best {
                score: 2,
                offset: 1
            })
        );
    }

    #[test]
    fn extra_start_bit_cell_is_active_initially() {
        let mut d = one_cell();
        d.cells[1].start_bit = true;
        let s0 = initial_state(&d);
        assert_eq!(s0.active_cells(), &[0, 1]);
        assert_eq!(s0.score(1), 0);
        // A start-bit cell that misses stays active with score 0.
        let (s1, _) = step(&d, &s0, b'C').unwrap();
        assert_eq!(s1.active_cells(), &[0, 1]);
        assert_eq!(s1.score(1), 0);
    }

    #[test]
    fn overflow_is_reported() {
        let mut d = one_cell();
        d.cells[1].weight = Score::MAX;
        d.cells[1].out_config[0] = crate::compiler::OutSlot {
            target: 1,
            enabled: true,
        };
        let err = run(&d, b"AA", ScoreMode::Local).unwrap_err();
        assert_eq!(err, SimError::ScoreOverflow { cell: 1, cycle: 2 });
    }

    #[test]
    fn local_best_prefers_earliest_offset() {
        let d = one_cell();
        let out = run(&d, b"CACA", ScoreMode::Local).unwrap();
        assert_eq!(out.records.len(), 2);
        assert_eq!(
            out.best,
            Some(Best {
                score: 2,
                offset: 2
            })
        );
        assert!(out.exact);
        assert!(!run(&d, b"A", ScoreMode::Global).unwrap().exact);
    }
}
