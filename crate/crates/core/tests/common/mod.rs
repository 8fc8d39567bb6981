//! Random automata generators shared by the integration suites.
#![allow(dead_code)]

use napoly::anml::{AnmlAutomaton, AnmlNode};
use napoly::{SymbolClass, Transition, WeightedAutomaton};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const DNA: &[u8] = b"ACGT";

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub struct WfaShape {
    pub max_states: usize,
    pub max_transitions: usize,
    pub max_alphabet: usize,
    pub weight: i32,
    pub epsilons: usize,
}

impl Default for WfaShape {
    fn default() -> Self {
        WfaShape {
            max_states: 10,
            max_transitions: 25,
            max_alphabet: 4,
            weight: 5,
            epsilons: 0,
        }
    }
}

pub fn random_class(rng: &mut ChaCha8Rng, alphabet: &[u8]) -> SymbolClass {
    loop {
        let class: SymbolClass = alphabet
            .iter()
            .copied()
            .filter(|_| rng.gen_bool(0.5))
            .collect();
        if !class.is_empty() {
            return class;
        }
    }
}

/// Returns the automaton and the alphabet it was drawn over.
pub fn random_wfa(rng: &mut ChaCha8Rng, shape: &WfaShape) -> (WeightedAutomaton, Vec<u8>) {
    let states = rng.gen_range(2..=shape.max_states);
    let alphabet = DNA[..rng.gen_range(1..=shape.max_alphabet)].to_vec();
    let count = rng.gen_range(1..=shape.max_transitions);
    let mut transitions: Vec<Transition> = (0..count)
        .map(|_| {
            Transition::new(
                rng.gen_range(0..states),
                rng.gen_range(0..states),
                random_class(rng, &alphabet),
                rng.gen_range(-shape.weight..=shape.weight),
            )
        })
        .collect();
    for _ in 0..shape.epsilons {
        transitions.push(Transition::epsilon(
            rng.gen_range(0..states),
            rng.gen_range(0..states),
            rng.gen_range(-shape.weight..=shape.weight),
        ));
    }
    let mut accepts: Vec<usize> = (0..states).filter(|_| rng.gen_bool(0.3)).collect();
    if accepts.is_empty() {
        accepts.push(rng.gen_range(0..states));
    }
    (
        WeightedAutomaton::new(states, 0, accepts, transitions).unwrap(),
        alphabet,
    )
}

pub fn random_input(rng: &mut ChaCha8Rng, alphabet: &[u8], min: usize, max: usize) -> Vec<u8> {
    let len = rng.gen_range(min..=max);
    (0..len).map(|_| *alphabet.choose(rng).unwrap()).collect()
}

/// Every string over `alphabet` with length in `1..=max_len`.
pub fn all_strings(alphabet: &[u8], max_len: usize) -> Vec<Vec<u8>> {
    let mut out = Vec::new();
    let mut layer: Vec<Vec<u8>> = vec![Vec::new()];
    for _ in 0..max_len {
        layer = layer
            .iter()
            .flat_map(|s| {
                alphabet.iter().map(move |&b| {
                    let mut t = s.clone();
                    t.push(b);
                    t
                })
            })
            .collect();
        out.extend(layer.iter().cloned());
    }
    out
}

/// Random ANML graph. With `local`, successors are drawn near the node's
/// own id so that many instances are placeable.
pub fn random_anml(
    rng: &mut ChaCha8Rng,
    nodes: usize,
    max_out: usize,
    local: bool,
) -> AnmlAutomaton {
    let list = (0..nodes)
        .map(|id| {
            let out = rng.gen_range(0..=max_out);
            let successors = (0..out)
                .map(|_| {
                    if local {
                        let lo = id.saturating_sub(2);
                        let hi = (id + 3).min(nodes - 1);
                        rng.gen_range(lo..=hi)
                    } else {
                        rng.gen_range(0..nodes)
                    }
                })
                .collect();
            AnmlNode {
                id,
                symbols: random_class(rng, DNA),
                weight: rng.gen_range(-5..=5),
                start_enabled: id == 0 || rng.gen_bool(0.1),
                accept: rng.gen_bool(0.2),
                successors,
            }
        })
        .collect();
    AnmlAutomaton::new(list).unwrap()
}
