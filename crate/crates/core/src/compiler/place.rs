//! Linear placement under the fan-out window.
//!
//! Nodes are first laid out in breadth-first (Cuthill-McKee) order from the
//! start-enabled nodes, which keeps neighbours close together. Remaining
//! window violations are repaired by swapping nodes between cells, guided by
//! the total excess distance over all edges. A depth-first order is tried as a
//! second starting point when repair runs out of budget. Small connected
//! graphs that still fail get a bounded backtracking search.

use std::collections::VecDeque;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{CompileError, EdgeViolation, OverlayParams, START_CELL};
use crate::anml::{AnmlAutomaton, NodeId};

/// ANML node -> cell map. Cell [`START_CELL`] is reserved for the start STE+.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Placement {
    pub node_cell: Vec<usize>,
    pub start_cell: usize,
}

impl Placement {
    pub fn cell(&self, node: NodeId) -> usize {
        self.node_cell[node]
    }

    /// Every invariant violation, as readable strings; empty means legal.
    pub fn check(&self, anml: &AnmlAutomaton, params: &OverlayParams) -> Vec<String> {
        let mut issues = Vec::new();
        let n = params.array_size();
        if self.node_cell.len() != anml.len() {
            issues.push(format!(
                "placement maps {} nodes, automaton has {}",
                self.node_cell.len(),
                anml.len()
            ));
            return issues;
        }
        if self.start_cell >= n {
            issues.push(format!("start cell {} outside array", self.start_cell));
        }
        let mut owner = vec![None; n];
        for (node, &cell) in self.node_cell.iter().enumerate() {
            if cell >= n {
                issues.push(format!("node {node} mapped to cell {cell} outside array"));
                continue;
            }
            if cell == self.start_cell {
                issues.push(format!("node {node} mapped onto the start cell"));
            }
            if let Some(other) = owner[cell].replace(node) {
                issues.push(format!("nodes {other} and {node} share cell {cell}"));
            }
        }
        if !issues.is_empty() {
            return issues;
        }
        for (u, v) in anml.edges() {
            let (cu, cv) = (self.node_cell[u], self.node_cell[v]);
            if !params.in_window(cu, cv) {
                issues.push(format!(
                    "edge {u} -> {v}: cell {cv} outside window of cell {cu}"
                ));
            }
        }
        issues
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PlaceOptions {
    /// Repair iterations per starting order.
    pub budget: usize,
    /// Seeds the random kicks taken when no swap improves the layout.
    pub seed: u64,
}

impl Default for PlaceOptions {
    fn default() -> Self {
        PlaceOptions {
            budget: 20_000,
            seed: 0,
        }
    }
}

pub fn place(anml: &AnmlAutomaton, params: &OverlayParams) -> Result<Placement, CompileError> {
    place_with(anml, params, &PlaceOptions::default())
}

pub fn place_with(
    anml: &AnmlAutomaton,
    params: &OverlayParams,
    options: &PlaceOptions,
) -> Result<Placement, CompileError> {
    let cells = params.array_size();
    if anml.len() + 1 > cells {
        return Err(CompileError::TooManyNodes {
            nodes: anml.len(),
            cells,
        });
    }
    let graph = Graph::new(anml);

    // Every window holds f cells, the owner included: more than f - 1 distinct
    // neighbours on either side can never fit.
    let limit = params.fanout() - 1;
    let mut crowded = Vec::new();
    for v in 0..anml.len() {
        if graph.succ[v].len() > limit {
            crowded.extend(
                graph.succ[v]
                    .iter()
                    .map(|&s| EdgeViolation { from: v, to: s }),
            );
        }
        if graph.pred[v].len() > limit {
            crowded.extend(
                graph.pred[v]
                    .iter()
                    .map(|&p| EdgeViolation { from: p, to: v }),
            );
        }
    }
    if !crowded.is_empty() {
        crowded.sort_by_key(|e| (e.from, e.to));
        crowded.dedup();
        return Err(CompileError::Infeasible {
            violations: crowded,
        });
    }

    let mut best: Option<Layout> = None;
    for order in [bfs_order(anml, &graph), dfs_order(anml, &graph)] {
        let mut layout = Layout::from_order(&order, &graph, params);
        layout.repair(&graph, params, options);
        if layout.cost == 0 {
            return Ok(Placement {
                node_cell: layout.pos,
                start_cell: START_CELL,
            });
        }
        if best.as_ref().is_none_or(|b| layout.cost < b.cost) {
            best = Some(layout);
        }
    }
    if let Some(node_cell) = exact_search(&graph, params, EXACT_VISITS) {
        return Ok(Placement {
            node_cell,
            start_cell: START_CELL,
        });
    }
    let layout = best.expect("at least one order tried");
    let violations = graph
        .edges
        .iter()
        .filter(|&&(u, v)| excess(layout.pos[u], layout.pos[v], params) > 0)
        .map(|&(from, to)| EdgeViolation { from, to })
        .collect();
    Err(CompileError::Infeasible { violations })
}

/// Repair gives up after this many (or a quarter of the budget) moves
/// without a new best.
const STALL_FLOOR: usize = 1_000;

/// Search-tree visits allowed to the exhaustive fallback.
const EXACT_VISITS: usize = 50_000;
const EXACT_MAX_NODES: usize = 48;

/// Backtracking placement, most constrained node first. Only connected
/// graphs are searched (isolated nodes fill leftover cells), since
/// translating a connected layout keeps it legal and the root can be pinned
/// near the left end.
fn exact_search(graph: &Graph, params: &OverlayParams, visits: usize) -> Option<Vec<usize>> {
    let n = graph.succ.len();
    let linked: Vec<NodeId> = (0..n)
        .filter(|&v| !graph.neighbours[v].is_empty())
        .collect();
    if linked.is_empty() || linked.len() > EXACT_MAX_NODES {
        return None;
    }
    let mut seen = vec![false; n];
    let mut stack = vec![linked[0]];
    seen[linked[0]] = true;
    let mut reached = 0;
    while let Some(v) = stack.pop() {
        reached += 1;
        for &w in &graph.neighbours[v] {
            if !seen[w] {
                seen[w] = true;
                stack.push(w);
            }
        }
    }
    if reached != linked.len() {
        return None;
    }

    let last = params.array_size() - 1;
    let reach = params.reach_back().max(params.reach_forward());
    let mut search = Search {
        graph,
        back: params.reach_back(),
        fwd: params.reach_forward(),
        last,
        pos: vec![None; n],
        used: vec![false; last + 1],
        visits,
    };
    search.used[START_CELL] = true;
    let root = linked[0];
    let root_max = (1 + (linked.len() - 1) * reach).min(last);
    let mut found = false;
    for c in 1..=root_max {
        search.set(root, Some(c));
        if search.extend(linked.len() - 1) {
            found = true;
            break;
        }
        search.set(root, None);
        if search.visits == 0 {
            return None;
        }
    }
    if !found {
        return None;
    }
    let mut free = (1..=last).filter(|&c| !search.used[c]);
    Some(
        search
            .pos
            .iter()
            .map(|p| p.unwrap_or_else(|| free.next().expect("node count checked")))
            .collect(),
    )
}

struct Search<'a> {
    graph: &'a Graph,
    back: usize,
    fwd: usize,
    last: usize,
    pos: Vec<Option<usize>>,
    used: Vec<bool>,
    visits: usize,
}

impl Search<'_> {
    fn set(&mut self, v: NodeId, cell: Option<usize>) {
        if let Some(old) = self.pos[v] {
            self.used[old] = false;
        }
        if let Some(c) = cell {
            self.used[c] = true;
        }
        self.pos[v] = cell;
    }

    /// Cell interval legal for `v` against its placed neighbours, or `None`
    /// when none of them is placed yet.
    fn bounds(&self, v: NodeId) -> Option<(usize, usize)> {
        let (mut lo, mut hi) = (1isize, self.last as isize);
        let mut anchored = false;
        for &w in &self.graph.succ[v] {
            if let Some(c) = self.pos[w] {
                anchored = true;
                lo = lo.max(c as isize - self.fwd as isize);
                hi = hi.min((c + self.back) as isize);
            }
        }
        for &p in &self.graph.pred[v] {
            if let Some(c) = self.pos[p] {
                anchored = true;
                lo = lo.max(c as isize - self.back as isize);
                hi = hi.min((c + self.fwd) as isize);
            }
        }
        anchored.then_some((lo as usize, hi.max(lo - 1) as usize))
    }

    fn free_in(&self, (lo, hi): (usize, usize)) -> usize {
        (lo..=hi).filter(|&c| !self.used[c]).count()
    }

    fn extend(&mut self, remaining: usize) -> bool {
        if remaining == 0 {
            return true;
        }
        if self.visits == 0 {
            return false;
        }
        self.visits -= 1;
        let mut pick: Option<(NodeId, (usize, usize), usize)> = None;
        for v in 0..self.pos.len() {
            if self.pos[v].is_some() || self.graph.neighbours[v].is_empty() {
                continue;
            }
            if let Some(range) = self.bounds(v) {
                let free = self.free_in(range);
                if pick.is_none_or(|(_, _, best)| free < best) {
                    pick = Some((v, range, free));
                    if free == 0 {
                        return false;
                    }
                }
            }
        }
        let Some((v, (lo, hi), _)) = pick else {
            return false;
        };
        for c in lo..=hi {
            if self.used[c] {
                continue;
            }
            self.set(v, Some(c));
            if self.extend(remaining - 1) {
                return true;
            }
            self.set(v, None);
        }
        false
    }
}

/// Distinct non-self edges with per-node incidence lists.
struct Graph {
    edges: Vec<(NodeId, NodeId)>,
    incident: Vec<Vec<usize>>,
    succ: Vec<Vec<NodeId>>,
    pred: Vec<Vec<NodeId>>,
    /// Undirected neighbours sorted by (degree, id).
    neighbours: Vec<Vec<NodeId>>,
}

impl Graph {
    fn new(anml: &AnmlAutomaton) -> Self {
        let n = anml.len();
        let mut edges = Vec::new();
        let mut incident = vec![Vec::new(); n];
        let mut succ = vec![Vec::new(); n];
        let mut pred = vec![Vec::new(); n];
        for (u, v) in anml.edges().filter(|(u, v)| u != v) {
            incident[u].push(edges.len());
            incident[v].push(edges.len());
            edges.push((u, v));
            succ[u].push(v);
            pred[v].push(u);
        }
        let mut neighbours: Vec<Vec<NodeId>> = (0..n)
            .map(|v| {
                let mut nb: Vec<NodeId> = succ[v].iter().chain(&pred[v]).copied().collect();
                nb.sort_unstable();
                nb.dedup();
                nb
            })
            .collect();
        let degree: Vec<usize> = neighbours.iter().map(Vec::len).collect();
        for nb in &mut neighbours {
            nb.sort_by_key(|&x| (degree[x], x));
        }
        Graph {
            edges,
            incident,
            succ,
            pred,
            neighbours,
        }
    }
}

/// Roots in priority order: start-enabled nodes, then everything else by id.
fn roots(anml: &AnmlAutomaton) -> impl Iterator<Item = NodeId> + '_ {
    anml.start_enabled().chain(0..anml.len())
}

fn bfs_order(anml: &AnmlAutomaton, graph: &Graph) -> Vec<NodeId> {
    let mut seen = vec![false; anml.len()];
    let mut order = Vec::with_capacity(anml.len());
    let mut queue = VecDeque::new();
    for root in roots(anml) {
        if seen[root] {
            continue;
        }
        seen[root] = true;
        queue.push_back(root);
        while let Some(v) = queue.pop_front() {
            order.push(v);
            for &w in &graph.neighbours[v] {
                if !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
    }
    order
}

/// Pre-order over successors in id order, so chains stay contiguous.
fn dfs_order(anml: &AnmlAutomaton, graph: &Graph) -> Vec<NodeId> {
    let mut seen = vec![false; anml.len()];
    let mut order = Vec::with_capacity(anml.len());
    let mut stack = Vec::new();
    for root in roots(anml) {
        stack.push(root);
        while let Some(v) = stack.pop() {
            if seen[v] {
                continue;
            }
            seen[v] = true;
            order.push(v);
            stack.extend(graph.succ[v].iter().rev().filter(|&&w| !seen[w]));
        }
    }
    order
}

/// Distance by which edge `u -> v` overshoots `u`'s window.
fn excess(cu: usize, cv: usize, params: &OverlayParams) -> usize {
    if cv > cu {
        (cv - cu).saturating_sub(params.reach_forward())
    } else {
        (cu - cv).saturating_sub(params.reach_back())
    }
}

struct Layout {
    pos: Vec<usize>,
    occupant: Vec<Option<NodeId>>,
    cost: usize,
    /// Violated edge ids, with `slot[e]` giving each one's index in `violated`.
    violated: Vec<usize>,
    slot: Vec<Option<usize>>,
}

impl Layout {
    fn from_order(order: &[NodeId], graph: &Graph, params: &OverlayParams) -> Self {
        let mut pos = vec![0; order.len()];
        let mut occupant = vec![None; params.array_size()];
        for (i, &v) in order.iter().enumerate() {
            pos[v] = i + 1;
            occupant[i + 1] = Some(v);
        }
        let mut layout = Layout {
            pos,
            occupant,
            cost: 0,
            violated: Vec::new(),
            slot: vec![None; graph.edges.len()],
        };
        for e in 0..graph.edges.len() {
            layout.refresh(e, graph, params);
        }
        layout
    }

    fn edge_cost(&self, e: usize, graph: &Graph, params: &OverlayParams) -> usize {
        let (u, v) = graph.edges[e];
        excess(self.pos[u], self.pos[v], params)
    }

    fn refresh(&mut self, e: usize, graph: &Graph, params: &OverlayParams) {
        let bad = self.edge_cost(e, graph, params) > 0;
        match (bad, self.slot[e]) {
            (true, None) => {
                self.slot[e] = Some(self.violated.len());
                self.violated.push(e);
            }
            (false, Some(i)) => {
                self.violated.swap_remove(i);
                if let Some(&moved) = self.violated.get(i) {
                    self.slot[moved] = Some(i);
                }
                self.slot[e] = None;
            }
            _ => {}
        }
    }

    fn affected(&self, x: NodeId, y: Option<NodeId>, graph: &Graph) -> Vec<usize> {
        let mut edges = graph.incident[x].clone();
        if let Some(y) = y {
            edges.extend(&graph.incident[y]);
            edges.sort_unstable();
            edges.dedup();
        }
        edges
    }

    /// Summed excess over edges touching `x` or `y`, each counted once.
    fn local_cost(
        &self,
        x: NodeId,
        y: Option<NodeId>,
        graph: &Graph,
        params: &OverlayParams,
    ) -> usize {
        let mut total: usize = graph.incident[x]
            .iter()
            .map(|&e| self.edge_cost(e, graph, params))
            .sum();
        if let Some(y) = y {
            for &e in &graph.incident[y] {
                let (u, v) = graph.edges[e];
                if u != x && v != x {
                    total += self.edge_cost(e, graph, params);
                }
            }
        }
        total
    }

    fn exchange(&mut self, x: NodeId, cell: usize) {
        let from = self.pos[x];
        let y = self.occupant[cell];
        self.occupant[from] = y;
        self.occupant[cell] = Some(x);
        self.pos[x] = cell;
        if let Some(y) = y {
            self.pos[y] = from;
        }
    }

    /// Cost change of moving `x` into `cell`, swapping with its occupant.
    fn delta(&mut self, x: NodeId, cell: usize, graph: &Graph, params: &OverlayParams) -> isize {
        let y = self.occupant[cell];
        let before = self.local_cost(x, y, graph, params);
        let from = self.pos[x];
        self.exchange(x, cell);
        let after = self.local_cost(x, y, graph, params);
        self.exchange(x, from);
        after as isize - before as isize
    }

    fn apply(&mut self, x: NodeId, cell: usize, graph: &Graph, params: &OverlayParams) {
        let y = self.occupant[cell];
        let edges = self.affected(x, y, graph);
        let before: usize = edges
            .iter()
            .map(|&e| self.edge_cost(e, graph, params))
            .sum();
        self.exchange(x, cell);
        let after: usize = edges
            .iter()
            .map(|&e| self.edge_cost(e, graph, params))
            .sum();
        self.cost = self.cost + after - before;
        for e in edges {
            self.refresh(e, graph, params);
        }
    }

    fn repair(&mut self, graph: &Graph, params: &OverlayParams, options: &PlaceOptions) {
        self.cost = (0..graph.edges.len())
            .map(|e| self.edge_cost(e, graph, params))
            .sum();
        let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
        let mut best_cost = self.cost;
        let mut best_pos = self.pos.clone();
        let last = params.array_size() - 1;
        let (back, fwd) = (params.reach_back(), params.reach_forward());
        let patience = (options.budget / 4).max(STALL_FLOOR);
        let mut since_best = 0;

        for _ in 0..options.budget {
            if self.cost == 0 || since_best > patience {
                break;
            }
            since_best += 1;
            let e = self.violated[rng.gen_range(0..self.violated.len())];
            let (u, v) = graph.edges[e];
            let (cu, cv) = (self.pos[u], self.pos[v]);
            // Cells where v fits u's window, and cells whose window holds v.
            let mut moves: Vec<(NodeId, usize)> = Vec::new();
            for c in cu.saturating_sub(back).max(1)..=(cu + fwd).min(last) {
                moves.push((v, c));
            }
            for c in cv.saturating_sub(fwd).max(1)..=(cv + back).min(last) {
                moves.push((u, c));
            }
            moves.retain(|&(x, c)| self.pos[x] != c);
            if moves.is_empty() {
                continue;
            }
            let mut chosen = None;
            let mut chosen_delta = 0;
            for &(x, c) in &moves {
                let d = self.delta(x, c, graph, params);
                if d < chosen_delta {
                    chosen_delta = d;
                    chosen = Some((x, c));
                }
            }
            let (x, c) = chosen.unwrap_or_else(|| moves[rng.gen_range(0..moves.len())]);
            self.apply(x, c, graph, params);
            if self.cost < best_cost {
                best_cost = self.cost;
                best_pos.clone_from(&self.pos);
                since_best = 0;
            }
        }

        if self.cost > best_cost {
            let order_by_cell = {
                let mut occupant = vec![None; params.array_size()];
                for (node, &c) in best_pos.iter().enumerate() {
                    occupant[c] = Some(node);
                }
                occupant
            };
            self.pos = best_pos;
            self.occupant = order_by_cell;
            self.cost = best_cost;
            self.violated.clear();
            self.slot.iter_mut().for_each(|s| *s = None);
            for e in 0..graph.edges.len() {
                self.refresh(e, graph, params);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::anml::AnmlNode;
    use crate::symbols::SymbolClass;

    fn node(id: NodeId, successors: Vec<NodeId>) -> AnmlNode {
        AnmlNode {
            id,
            symbols: SymbolClass::single(b'A'),
            weight: 1,
            start_enabled: id == 0,
            accept: false,
            successors,
        }
    }

    #[test]
    fn chain_is_consecutive() {
        let anml =
            AnmlAutomaton::new(vec![node(0, vec![1]), node(1, vec![2]), node(2, vec![])]).unwrap();
        let params = OverlayParams::new(8, 3).unwrap();
        let p = place(&anml, &params).unwrap();
        assert_eq!(p.node_cell, vec![1, 2, 3]);
        assert_eq!(p.start_cell, START_CELL);
        assert!(p.check(&anml, &params).is_empty());
    }

    #[test]
    fn pigeonhole_is_infeasible() {
        // f = 3 leaves two non-self slots; node 0 has three successors.
        let anml = AnmlAutomaton::new(vec![
            node(0, vec![0, 1, 2, 3]),
            node(1, vec![]),
            node(2, vec![]),
            node(3, vec![]),
        ])
        .unwrap();
        let params = OverlayParams::new(16, 3).unwrap();
        match place(&anml, &params) {
            Err(CompileError::Infeasible { violations }) => {
                assert_eq!(violations.len(), 3);
                assert!(violations.iter().all(|v| v.from == 0));
            }
            other => panic!("expected Infeasible, got {other:?}"),
        }
    }

    #[test]
    fn too_many_nodes() {
        let anml = AnmlAutomaton::new(vec![node(0, vec![1]), node(1, vec![])]).unwrap();
        let params = OverlayParams::new(2, 4).unwrap();
        assert_eq!(
            place(&anml, &params),
            Err(CompileError::TooManyNodes { nodes: 2, cells: 2 })
        );
    }

    #[test]
    fn repair_fixes_backward_edges() {
        // A ring 0 -> 1 -> ... -> 5 -> 0 needs folding; f = 5 gives back 2, forward 2.
        let anml =
            AnmlAutomaton::new((0..6).map(|i| node(i, vec![(i + 1) % 6])).collect()).unwrap();
        let params = OverlayParams::new(16, 5).unwrap();
        let p = place(&anml, &params).unwrap();
        assert!(p.check(&anml, &params).is_empty(), "{:?}", p.node_cell);
    }

    #[test]
    fn exact_search_covers_an_empty_budget() {
        let anml =
            AnmlAutomaton::new((0..6).map(|i| node(i, vec![(i + 1) % 6])).collect()).unwrap();
        let params = OverlayParams::new(16, 5).unwrap();
        let options = PlaceOptions { budget: 0, seed: 0 };
        let p = place_with(&anml, &params, &options).unwrap();
        assert!(p.check(&anml, &params).is_empty(), "{:?}", p.node_cell);
    }

    #[test]
    fn ring_too_long_for_back_reach() {
        // f = 3 reaches one cell back and one forward, so a ring of three
        // needs at least one edge of length two.
        let anml =
            AnmlAutomaton::new((0..3).map(|i| node(i, vec![(i + 1) % 3])).collect()).unwrap();
        let params = OverlayParams::new(16, 3).unwrap();
        assert!(matches!(
            place(&anml, &params),
            Err(CompileError::Infeasible { .. })
        ));
    }

    #[test]
    fn deterministic() {
        let anml = AnmlAutomaton::new(
            (0..10)
                .map(|i| node(i, vec![(i * 3 + 1) % 10, (i + 7) % 10]))
                .collect(),
        )
        .unwrap();
        let params = OverlayParams::new(32, 6).unwrap();
        assert_eq!(place(&anml, &params), place(&anml, &params));
    }
}
