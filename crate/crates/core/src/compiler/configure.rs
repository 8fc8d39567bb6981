use super::{CompileError, OutSlot, OverlayParams, PlacedDesign, Placement, StartLane, SteCell};
use crate::anml::AnmlAutomaton;
use crate::wfa::ScoreMode;

/// Emits the cell configuration for a legal placement.
///
/// Only start-enabled nodes receive the zero-score restart, and never accept
/// cells. In LOCAL mode the restart rides the start cell's own fan-out, so only
/// nodes within its forward window get it. Every start-enabled node left
/// without a restart is listed in `missing_restarts`.
pub fn configure(
    anml: &AnmlAutomaton,
    placement: &Placement,
    params: &OverlayParams,
    mode: ScoreMode,
) -> Result<PlacedDesign, CompileError> {
    let issues = placement.check(anml, params);
    if !issues.is_empty() {
        return Err(CompileError::IllegalPlacement(issues));
    }
    let n = params.array_size();
    let f = params.fanout();
    let start = placement.start_cell;
    let mut cells: Vec<SteCell> = (0..n).map(|c| SteCell::blank(c, f)).collect();
    cells[start].start_bit = true;

    let mut missing_restarts = Vec::new();
    for node in anml.nodes() {
        let c = placement.cell(node.id);
        let base = params.window_base(c);
        let cell = &mut cells[c];
        cell.symbols = node.symbols;
        cell.weight = node.weight;
        cell.accept = node.accept;
        for (s, slot) in cell.out_config.iter_mut().enumerate() {
            let addr = base + s as isize;
            if (0..n as isize).contains(&addr) {
                slot.target = addr as usize;
            }
        }
        for &succ in &node.successors {
            let t = placement.cell(succ);
            let s = (t as isize - base) as usize;
            cell.out_config[s] = OutSlot {
                target: t,
                enabled: true,
            };
        }
        if node.start_enabled {
            let reachable = match mode {
                ScoreMode::Global => true,
                ScoreMode::Local => params.in_window(start, c),
            };
            if reachable && !node.accept {
                cell.start_connected = true;
            } else {
                missing_restarts.push(node.id);
            }
        }
    }

    Ok(PlacedDesign {
        params: *params,
        mode,
        start_cell: start,
        start_lane: StartLane::for_mode(mode),
        cells,
        placement: placement.node_cell.clone(),
        missing_restarts,
    })
}
