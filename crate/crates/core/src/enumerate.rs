//! Exhaustive run enumeration: the brute-force oracle behind the Viterbi DP,
//! epsilon elimination and the overlay simulator.
//!
//! Runs are walked explicitly one state at a time with no memoization, so the
//! cost is exponential; inputs are guarded by [`MAX_STATES`] and [`MAX_INPUT`].
//! Parallel symbol edges between the same two states are collapsed to the
//! best one for the symbol being read, which leaves every run maximum intact.

use crate::wfa::{Best, Label, Score, ScoreMode, StateId, WeightedAutomaton, WfaError};

pub const MAX_STATES: usize = 12;
pub const MAX_INPUT: usize = 8;

/// Maximum total weight over every accepting run on `input`.
///
/// Epsilon edges are followed, at most `num_states` of them in a row, which
/// covers every simple epsilon path. Mode semantics match
/// [`viterbi_score`](crate::viterbi::viterbi_score).
pub fn enumerate_paths_score(
    wfa: &WeightedAutomaton,
    input: &[u8],
    mode: ScoreMode,
) -> Result<Option<Best>, WfaError> {
    if wfa.num_states() > MAX_STATES || input.len() > MAX_INPUT {
        return Err(WfaError::TooLarge {
            states: wfa.num_states(),
            input_len: input.len(),
        });
    }
    let n = wfa.num_states();
    let mut epsilons: Vec<Vec<(StateId, Score)>> = vec![Vec::new(); n];
    // moves[pos][state]: best weight to each successor on input[pos].
    let mut moves: Vec<Vec<Vec<(StateId, Score)>>> = vec![vec![Vec::new(); n]; input.len()];
    for t in wfa.transitions() {
        match &t.label {
            Label::Epsilon => epsilons[t.from].push((t.to, t.weight)),
            Label::Class(c) => {
                for (pos, &b) in input.iter().enumerate() {
                    if !c.contains(b) {
                        continue;
                    }
                    let out = &mut moves[pos][t.from];
                    match out.iter_mut().find(|(to, _)| *to == t.to) {
                        Some(entry) => entry.1 = entry.1.max(t.weight),
                        None => out.push((t.to, t.weight)),
                    }
                }
            }
        }
    }
    let mut walker = Walker {
        wfa,
        epsilons,
        moves,
        input,
        mode,
        origin: 0,
        best: None,
    };
    match mode {
        ScoreMode::Global => walker.walk(wfa.start(), 0, 0, 0)?,
        ScoreMode::Local => {
            for origin in 0..input.len() {
                walker.origin = origin;
                walker.walk(wfa.start(), origin, 0, 0)?;
            }
        }
    }
    Ok(walker.best)
}

struct Walker<'a> {
    wfa: &'a WeightedAutomaton,
    epsilons: Vec<Vec<(StateId, Score)>>,
    moves: Vec<Vec<Vec<(StateId, Score)>>>,
    input: &'a [u8],
    mode: ScoreMode,
    origin: usize,
    best: Option<Best>,
}

impl Walker<'_> {
    fn walk(
        &mut self,
        state: StateId,
        pos: usize,
        eps_run: usize,
        score: Score,
    ) -> Result<(), WfaError> {
        if self.wfa.is_accept(state) {
            let counts = match self.mode {
                ScoreMode::Global => pos == self.input.len(),
                ScoreMode::Local => pos > self.origin,
            };
            if counts {
                let better = match self.best {
                    None => true,
                    Some(b) => score > b.score || (score == b.score && pos < b.offset),
                };
                if better {
                    self.best = Some(Best { score, offset: pos });
                }
            }
        }
        if eps_run < self.wfa.num_states() {
            for k in 0..self.epsilons[state].len() {
                let (to, w) = self.epsilons[state][k];
                let next = score.checked_add(w).ok_or(WfaError::ScoreOverflow)?;
                self.walk(to, pos, eps_run + 1, next)?;
            }
        }
        if pos < self.input.len() {
            for k in 0..self.moves[pos][state].len() {
                let (to, w) = self.moves[pos][state][k];
                let next = score.checked_add(w).ok_or(WfaError::ScoreOverflow)?;
                self.walk(to, pos + 1, 0, next)?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbols::SymbolClass;
    use crate::wfa::Transition;

    #[test]
    fn one_edge_matching_symbol() {
        let wfa = WeightedAutomaton::new(
            2,
            0,
            [1],
            vec![Transition::new(0, 1, SymbolClass::single(b'A'), 7)],
        )
        .unwrap();
        assert_eq!(
            enumerate_paths_score(&wfa, b"A", ScoreMode::Global).unwrap(),
            Some(Best {
                score: 7,
                offset: 1
            })
        );
        assert_eq!(
            enumerate_paths_score(&wfa, b"C", ScoreMode::Global).unwrap(),
            None
        );
    }

    #[test]
    fn guard() {
        let wfa = WeightedAutomaton::new(13, 0, [1], vec![]).unwrap();
        assert!(matches!(
            enumerate_paths_score(&wfa, b"A", ScoreMode::Global),
            Err(WfaError::TooLarge { .. })
        ));
        let small = WeightedAutomaton::new(1, 0, [0], vec![]).unwrap();
        assert!(matches!(
            enumerate_paths_score(&small, b"AAAAAAAAA", ScoreMode::Local),
            Err(WfaError::TooLarge { .. })
        ));
    }

    #[test]
    fn follows_epsilon_edges() {
        let wfa = WeightedAutomaton::new(
            3,
            0,
            [2],
            vec![
                Transition::epsilon(0, 1, -2),
                Transition::new(1, 2, SymbolClass::single(b'A'), 2),
                Transition::epsilon(2, 0, -1),
            ],
        )
        .unwrap();
        assert_eq!(
            enumerate_paths_score(&wfa, b"AA", ScoreMode::Global).unwrap(),
            Some(Best {
                score: -1,
                offset: 2
            })
        );
    }
}
