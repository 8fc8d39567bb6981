//! Weighted-NFA overlay compiler and simulator.
//!
//! Weighted automata are scored in the max-plus semiring, converted to
//! state-labeled ANML form, placed on a linear array of scored STE+ cells
//! under a fan-out window, and simulated one symbol per cycle. An independent
//! Viterbi dynamic program and an exhaustive path enumerator serve as oracles
//! for the simulated scores.

pub mod align;
pub mod anml;
pub mod bench;
pub mod compiler;
pub mod enumerate;
pub mod epsilon;
pub mod pipeline;
pub mod sim;
pub mod symbols;
pub mod viterbi;
pub mod wfa;

pub use align::{build_alignment_wfa, Alphabet, ScoringScheme};
pub use anml::{nfa_to_anml, AnmlAutomaton, AnmlNode};
pub use compiler::{configure, place, validate, OverlayParams, PlacedDesign, Placement};
pub use enumerate::enumerate_paths_score;
pub use epsilon::epsilon_eliminate;
pub use pipeline::{compile, Compiled};
pub use sim::{initial_state, run, step, MatchRecord, SimState};
pub use symbols::SymbolClass;
pub use viterbi::viterbi_score;
pub use wfa::{Best, Score, ScoreMode, Transition, WeightedAutomaton};
