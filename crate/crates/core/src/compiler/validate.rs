use std::fmt;

use super::PlacedDesign;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    CellCount { expected: usize, found: usize },
    BadStartCell { cell: usize },
    SlotCount { cell: usize, slots: usize },
    WindowViolation { cell: usize, target: usize },
    AcceptStartViolation { cell: usize },
    BadPlacement { node: usize, cell: usize },
    EmptySymbolTable { cell: usize },
    UnmappedCellConfigured { cell: usize },
    UnknownMissingRestart { node: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::CellCount { expected, found } => {
                write!(f, "expected {expected} cells, found {found}")
            }
            Violation::BadStartCell { cell } => {
                write!(f, "start cell {cell} is missing or has no start bit")
            }
            Violation::SlotCount { cell, slots } => {
                write!(f, "cell {cell} has {slots} out-config slots")
            }
            Violation::WindowViolation { cell, target } => {
                write!(f, "cell {cell} drives cell {target} outside its window")
            }
            Violation::AcceptStartViolation { cell } => {
                write!(f, "accept cell {cell} is start-connected")
            }
            Violation::BadPlacement { node, cell } => {
                write!(f, "node {node} placed on unusable cell {cell}")
            }
            Violation::EmptySymbolTable { cell } => {
                write!(f, "mapped cell {cell} has an empty symbol table")
            }
            Violation::UnmappedCellConfigured { cell } => {
                write!(f, "unmapped cell {cell} carries configuration")
            }
            Violation::UnknownMissingRestart { node } => {
                write!(f, "missing restart lists unknown node {node}")
            }
        }
    }
}

/// Every broken design invariant; an empty list means the design is valid.
pub fn validate(design: &PlacedDesign) -> Vec<Violation> {
    let params = &design.params;
    let n = params.array_size();
    let mut out = Vec::new();
    if design.cells.len() != n {
        out.push(Violation::CellCount {
            expected: n,
            found: design.cells.len(),
        });
        return out;
    }
    if design.start_cell >= n || !design.cells[design.start_cell].start_bit {
        out.push(Violation::BadStartCell {
            cell: design.start_cell,
        });
    }

    let mut mapped = vec![false; n];
    for (node, &cell) in design.placement.iter().enumerate() {
        if cell >= n || cell == design.start_cell || mapped[cell] {
            out.push(Violation::BadPlacement { node, cell });
        } else {
            mapped[cell] = true;
        }
    }
    for &node in &design.missing_restarts {
        if node >= design.placement.len() {
            out.push(Violation::UnknownMissingRestart { node });
        }
    }

    for (i, cell) in design.cells.iter().enumerate() {
        if cell.out_config.len() != params.fanout() {
            out.push(Violation::SlotCount {
                cell: i,
                slots: cell.out_config.len(),
            });
        }
        for target in cell.enabled_targets() {
            if !params.in_window(i, target) {
                out.push(Violation::WindowViolation { cell: i, target });
            }
        }
        if cell.accept && cell.start_connected {
            out.push(Violation::AcceptStartViolation { cell: i });
        }
        if mapped[i] {
            if cell.symbols.is_empty() {
                out.push(Violation::EmptySymbolTable { cell: i });
            }
        } else if i != design.start_cell
            && (!cell.symbols.is_empty()
                || cell.accept
                || cell.start_connected
                || cell.enabled_targets().next().is_some())
        {
            out.push(Violation::UnmappedCellConfigured { cell: i });
        }
    }
    out
}
