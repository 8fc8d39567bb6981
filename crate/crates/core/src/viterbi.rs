//! Max-plus dynamic program over (state, position).

use crate::wfa::{Best, Score, ScoreMode, WeightedAutomaton, WfaError};

/// Best accept score of `input` under `mode`.
///
/// GLOBAL: runs start in q0 at offset 0 and must end in an accept state after
/// the last symbol; the returned offset is `input.len()`.
/// LOCAL: q0 is re-seeded with score 0 before every symbol, so a run may start
/// at any offset. A LOCAL match consumes at least one symbol; the best score
/// over all end offsets is returned with its smallest end offset.
pub fn viterbi_score(
    wfa: &WeightedAutomaton,
    input: &[u8],
    mode: ScoreMode,
) -> Result<Option<Best>, WfaError> {
    wfa.require_epsilon_free()?;
    let n = wfa.num_states();
    let mut cur: Vec<Option<Score>> = vec![None; n];
    let mut next: Vec<Option<Score>> = vec![None; n];
    cur[wfa.start()] = Some(0);
    let mut best: Option<Best> = None;

    for (t, &symbol) in input.iter().enumerate() {
        if mode == ScoreMode::Local {
            let seed = &mut cur[wfa.start()];
            *seed = Some(seed.map_or(0, |s| s.max(0)));
        }
        next.iter_mut().for_each(|s| *s = None);
        for tr in wfa.transitions() {
            let Some(src) = cur[tr.from] else { continue };
            if !tr.label.matches(symbol) {
                continue;
            }
            let cand = src.checked_add(tr.weight).ok_or(WfaError::ScoreOverflow)?;
            let slot = &mut next[tr.to];
            *slot = Some(slot.map_or(cand, |s| s.max(cand)));
        }
        std::mem::swap(&mut cur, &mut next);

        if mode == ScoreMode::Local {
            if let Some(score) = accept_max(wfa, &cur) {
                if best.is_none_or(|b| score > b.score) {
                    best = Some(Best {
                        score,
                        offset: t + 1,
                    });
                }
            }
        }
    }

    if mode == ScoreMode::Global {
        best = accept_max(wfa, &cur).map(|score| Best {
            score,
            offset: input.len(),
        });
    }
    Ok(best)
}

fn accept_max(wfa: &WeightedAutomaton, scores: &[Option<Score>]) -> Option<Score> {
    wfa.accepts().iter().filter_map(|&q| scores[q]).max()
}
