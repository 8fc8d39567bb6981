//! Compilation of ANML automata onto the linear STE+ array.
//!
//! Cell 0 is the always-active start STE+. A cell `n` can drive cells
//! `n - (f - 1) / 2 ..= n + f / 2`, its own index included, through `f`
//! interconnect configuration slots.

mod configure;
mod design;
mod place;
mod validate;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::anml::NodeId;

pub use configure::configure;
pub use design::{OutSlot, PlacedDesign, StartLane, SteCell};
pub use place::{place, place_with, PlaceOptions, Placement};
pub use validate::{validate, Violation};

pub const START_CELL: usize = 0;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CompileError {
    #[error("invalid overlay parameters: {0}")]
    InvalidParams(String),
    #[error("{nodes} nodes need {needed} cells but the array has {cells}", needed = nodes + 1)]
    TooManyNodes { nodes: usize, cells: usize },
    #[error("placement infeasible, {} edge(s) violate the fan-out window", violations.len())]
    Infeasible { violations: Vec<EdgeViolation> },
    #[error("illegal placement: {}", .0.join("; "))]
    IllegalPlacement(Vec<String>),
    #[error("invalid design: {0}")]
    Parse(String),
}

/// An ANML edge `from -> to` that no legal placement could realize.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeViolation {
    pub from: NodeId,
    pub to: NodeId,
}

impl fmt::Display for EdgeViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "node {} -> node {}", self.from, self.to)
    }
}

/// Array size `N` and fan-out `f`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "ParamsDoc", into = "ParamsDoc")]
pub struct OverlayParams {
    array_size: usize,
    fanout: usize,
}

impl OverlayParams {
    pub fn new(array_size: usize, fanout: usize) -> Result<Self, CompileError> {
        if fanout < 2 {
            return Err(CompileError::InvalidParams(format!(
                "fan-out must be at least 2, got {fanout}"
            )));
        }
        if array_size < 2 {
            return Err(CompileError::InvalidParams(format!(
                "array needs a start cell and at least one node cell, got {array_size}"
            )));
        }
        Ok(OverlayParams { array_size, fanout })
    }

    pub fn array_size(&self) -> usize {
        self.array_size
    }

    pub fn fanout(&self) -> usize {
        self.fanout
    }

    /// Cells behind `n` that `n` can drive: `(f - 1) / 2`.
    pub fn reach_back(&self) -> usize {
        (self.fanout - 1) / 2
    }

    /// Cells ahead of `n` that `n` can drive: `f / 2`.
    pub fn reach_forward(&self) -> usize {
        self.fanout / 2
    }

    /// Whether cell `from` can drive cell `to`.
    pub fn in_window(&self, from: usize, to: usize) -> bool {
        to < self.array_size && to + self.reach_back() >= from && to <= from + self.reach_forward()
    }

    /// First address of `cell`'s window; may be negative near the array edge.
    pub fn window_base(&self, cell: usize) -> isize {
        cell as isize - self.reach_back() as isize
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ParamsDoc {
    array_size: usize,
    fanout: usize,
}

impl TryFrom<ParamsDoc> for OverlayParams {
    type Error = CompileError;

    fn try_from(doc: ParamsDoc) -> Result<Self, CompileError> {
        OverlayParams::new(doc.array_size, doc.fanout)
    }
}

impl From<OverlayParams> for ParamsDoc {
    fn from(p: OverlayParams) -> Self {
        ParamsDoc {
            array_size: p.array_size,
            fanout: p.fanout,
        }
    }
}
