//! Epsilon elimination by max-plus closure.
//!
//! The overlay consumes exactly one symbol per cycle, so epsilon moves (the
//! deletion gaps of an alignment automaton) are folded into symbol
//! transitions before conversion. Each symbol transition `q -c/w-> r` is
//! extended through every epsilon path leaving `r`, and q0 additionally gets
//! the symbol transitions reachable through epsilon paths leaving it. There
//! are no final weights, so trailing epsilon paths into accept states are
//! absorbed into the transition that precedes them.

use std::collections::{BTreeMap, VecDeque};

use crate::symbols::SymbolClass;
use crate::wfa::{Label, Score, StateId, Transition, WeightedAutomaton, WfaError};

/// Removes every epsilon transition while preserving the best score of each
/// non-empty input string.
///
/// An automaton without epsilon transitions is returned unchanged. Fails with
/// [`WfaError::UnboundedScore`] when an epsilon cycle has positive weight.
pub fn epsilon_eliminate(wfa: &WeightedAutomaton) -> Result<WeightedAutomaton, WfaError> {
    if !wfa.has_epsilon() {
        return Ok(wfa.clone());
    }
    let closure = epsilon_closure(wfa)?;
    let n = wfa.num_states();
    let q0 = wfa.start();
    let symbol_edges: Vec<&Transition> = wfa
        .transitions()
        .iter()
        .filter(|t| !t.label.is_epsilon())
        .collect();

    let mut out = Vec::new();
    for tr in &symbol_edges {
        for (s, tail) in closure.row(tr.to) {
            out.push(Transition {
                weight: checked_sum(&[tr.weight, tail])?,
                to: s,
                ..**tr
            });
        }
    }
    for (q, head) in closure.row(q0) {
        if q == q0 {
            continue;
        }
        for tr in symbol_edges.iter().filter(|t| t.from == q) {
            for (s, tail) in closure.row(tr.to) {
                out.push(Transition {
                    from: q0,
                    to: s,
                    label: tr.label,
                    weight: checked_sum(&[head, tr.weight, tail])?,
                });
            }
        }
    }

    let eliminated = WeightedAutomaton::new(n, q0, wfa.accepts().iter().copied(), out)?;
    Ok(trim(&normalize(&eliminated)))
}

/// Best epsilon-path weight between every pair of states (`None` = no path).
struct Closure {
    n: usize,
    dist: Vec<Option<Score>>,
}

impl Closure {
    fn row(&self, from: StateId) -> impl Iterator<Item = (StateId, Score)> + '_ {
        self.dist[from * self.n..(from + 1) * self.n]
            .iter()
            .enumerate()
            .filter_map(|(to, d)| d.map(|d| (to, d)))
    }
}

/// Floyd-Warshall in the max-plus semiring, computed in i64 so positive
/// cycles can be detected before narrowing.
fn epsilon_closure(wfa: &WeightedAutomaton) -> Result<Closure, WfaError> {
    let n = wfa.num_states();
    let mut d: Vec<Option<i64>> = vec![None; n * n];
    for i in 0..n {
        d[i * n + i] = Some(0);
    }
    for t in wfa.transitions().iter().filter(|t| t.label.is_epsilon()) {
        let slot = &mut d[t.from * n + t.to];
        let w = t.weight as i64;
        *slot = Some(slot.map_or(w, |s| s.max(w)));
    }
    for k in 0..n {
        for i in 0..n {
            let Some(ik) = d[i * n + k] else { continue };
            for j in 0..n {
                let Some(kj) = d[k * n + j] else { continue };
                let cand = ik.saturating_add(kj);
                let slot = &mut d[i * n + j];
                if slot.is_none_or(|s| cand > s) {
                    *slot = Some(cand);
                }
            }
        }
    }
    if let Some(q) = (0..n).find(|&i| d[i * n + i].is_some_and(|w| w > 0)) {
        return Err(WfaError::UnboundedScore(q));
    }
    let dist = d
        .into_iter()
        .map(|w| match w {
            None => Ok(None),
            Some(w) => Score::try_from(w)
                .map(Some)
                .map_err(|_| WfaError::ScoreOverflow),
        })
        .collect::<Result<_, _>>()?;
    Ok(Closure { n, dist })
}

fn checked_sum(parts: &[Score]) -> Result<Score, WfaError> {
    parts.iter().try_fold(0 as Score, |acc, &w| {
        acc.checked_add(w).ok_or(WfaError::ScoreOverflow)
    })
}

/// Merges parallel symbol transitions: for each `(from, to)` pair only the best
/// weight per byte survives, and bytes sharing a weight are regrouped into one
/// class. Epsilon transitions pass through untouched. Output order is
/// `(from, to, weight descending)`.
pub fn normalize(wfa: &WeightedAutomaton) -> WeightedAutomaton {
    let mut per_pair: BTreeMap<(StateId, StateId), Box<[Option<Score>; 256]>> = BTreeMap::new();
    let mut epsilons = Vec::new();
    for t in wfa.transitions() {
        let Label::Class(class) = &t.label else {
            epsilons.push(*t);
            continue;
        };
        let best = per_pair
            .entry((t.from, t.to))
            .or_insert_with(|| Box::new([None; 256]));
        for b in class.iter() {
            let slot = &mut best[b as usize];
            *slot = Some(slot.map_or(t.weight, |s| s.max(t.weight)));
        }
    }
    let mut out = Vec::new();
    for ((from, to), best) in per_pair {
        let mut by_weight: BTreeMap<std::cmp::Reverse<Score>, SymbolClass> = BTreeMap::new();
        for (b, w) in best.iter().enumerate() {
            if let Some(w) = w {
                by_weight
                    .entry(std::cmp::Reverse(*w))
                    .or_default()
                    .insert(b as u8);
            }
        }
        for (std::cmp::Reverse(weight), class) in by_weight {
            out.push(Transition::new(from, to, class, weight));
        }
    }
    out.extend(epsilons);
    WeightedAutomaton::new(
        wfa.num_states(),
        wfa.start(),
        wfa.accepts().iter().copied(),
        out,
    )
    .expect("endpoints unchanged")
}

/// Drops transitions that no accepting run can use: the source must be
/// reachable from q0 and the target must reach an accept state.
pub fn trim(wfa: &WeightedAutomaton) -> WeightedAutomaton {
    let n = wfa.num_states();
    let reach = |seeds: Vec<StateId>, forward: bool| {
        let mut seen = vec![false; n];
        let mut queue: VecDeque<StateId> = seeds.into();
        for &s in &queue {
            seen[s] = true;
        }
        while let Some(q) = queue.pop_front() {
            for t in wfa.transitions() {
                let (a, b) = if forward {
                    (t.from, t.to)
                } else {
                    (t.to, t.from)
                };
                if a == q && !seen[b] {
                    seen[b] = true;
                    queue.push_back(b);
                }
            }
        }
        seen
    };
    let live_from = reach(vec![wfa.start()], true);
    let live_to = reach(wfa.accepts().iter().copied().collect(), false);
    let kept = wfa
        .transitions()
        .iter()
        .filter(|t| live_from[t.from] && live_to[t.to])
        .copied()
        .collect();
    WeightedAutomaton::new(n, wfa.start(), wfa.accepts().iter().copied(), kept)
        .expect("endpoints unchanged")
}
