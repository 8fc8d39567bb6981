use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{CompileError, OverlayParams};
use crate::anml::NodeId;
use crate::symbols::SymbolClass;
use crate::wfa::{Score, ScoreMode};

/// When the new-symbol fan-in lane offers its zero score to start-connected cells.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StartLane {
    /// Before every symbol: matches may begin at any offset.
    AllInput,
    /// Before the first symbol only: matches are anchored at offset 0.
    StartOfData,
}

impl StartLane {
    pub fn for_mode(mode: ScoreMode) -> Self {
        match mode {
            ScoreMode::Local => StartLane::AllInput,
            ScoreMode::Global => StartLane::StartOfData,
        }
    }

    #[inline]
    pub fn asserted(&self, cycle: u64) -> bool {
        match self {
            StartLane::AllInput => true,
            StartLane::StartOfData => cycle == 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutSlot {
    pub target: usize,
    pub enabled: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SteCell {
    #[serde(with = "hex_class")]
    pub symbols: SymbolClass,
    pub weight: Score,
    pub start_bit: bool,
    pub accept: bool,
    pub start_connected: bool,
    pub out_config: Vec<OutSlot>,
}

impl SteCell {
    /// An unmapped cell: empty state table, every slot disabled and pointing at itself.
    pub fn blank(cell: usize, fanout: usize) -> Self {
        SteCell {
            symbols: SymbolClass::EMPTY,
            weight: 0,
            start_bit: false,
            accept: false,
            start_connected: false,
            out_config: vec![
                OutSlot {
                    target: cell,
                    enabled: false
                };
                fanout
            ],
        }
    }

    pub fn enabled_targets(&self) -> impl Iterator<Item = usize> + '_ {
        self.out_config
            .iter()
            .filter(|s| s.enabled)
            .map(|s| s.target)
    }
}

/// A fully configured STE+ array, loadable by the simulator.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlacedDesign {
    pub params: OverlayParams,
    /// Mode the design was compiled for.
    pub mode: ScoreMode,
    pub start_cell: usize,
    pub start_lane: StartLane,
    pub cells: Vec<SteCell>,
    /// ANML node id -> cell.
    pub placement: Vec<usize>,
    /// Start-enabled nodes that could not be given a restart connection.
    pub missing_restarts: Vec<NodeId>,
}

impl PlacedDesign {
    /// Whether simulation is guaranteed to reproduce the Viterbi score for
    /// the design's mode.
    pub fn exact(&self) -> bool {
        self.missing_restarts.is_empty()
    }

    /// Like [`exact`](Self::exact), for one input of `input_len` symbols. In
    /// GLOBAL mode a missing restart on an accept node with no successors
    /// only loses one-symbol runs, so longer inputs stay exact.
    pub fn exact_for(&self, input_len: usize) -> bool {
        if self.exact() {
            return true;
        }
        self.mode == ScoreMode::Global
            && input_len != 1
            && self.missing_restarts.iter().all(|&node| {
                let cell = &self.cells[self.placement[node]];
                cell.accept && cell.enabled_targets().next().is_none()
            })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("design serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, CompileError> {
        serde_json::from_str(text).map_err(|e| CompileError::Parse(e.to_string()))
    }
}

mod hex_class {
    use super::*;

    pub fn serialize<S: Serializer>(class: &SymbolClass, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&class.to_hex())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<SymbolClass, D::Error> {
        let text = String::deserialize(d)?;
        SymbolClass::from_hex(&text)
            .ok_or_else(|| serde::de::Error::custom("symbol table must be 64 hex digits"))
    }
}
