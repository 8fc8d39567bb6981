//! Scoring invariants checked against the brute-force run enumerator.

mod common;

use common::{all_strings, random_input, random_wfa, rng, WfaShape};
use napoly::epsilon::{normalize, trim};
use napoly::wfa::WfaError;
use napoly::{
    build_alignment_wfa, enumerate_paths_score, epsilon_eliminate, nfa_to_anml, viterbi_score,
    Alphabet, ScoreMode, ScoringScheme,
};
use proptest::prelude::*;

const MODES: [ScoreMode; 2] = [ScoreMode::Global, ScoreMode::Local];

fn small_shape() -> WfaShape {
    WfaShape {
        max_states: 5,
        max_transitions: 8,
        max_alphabet: 2,
        ..WfaShape::default()
    }
}

#[test]
fn viterbi_agrees_with_enumeration_on_200_automata() {
    let mut r = rng(11);
    for case in 0..200 {
        let (wfa, alphabet) = random_wfa(&mut r, &WfaShape::default());
        for _ in 0..4 {
            let input = random_input(&mut r, &alphabet, 0, 8);
            for mode in MODES {
                assert_eq!(
                    viterbi_score(&wfa, &input, mode).unwrap(),
                    enumerate_paths_score(&wfa, &input, mode).unwrap(),
                    "case {case}, input {input:?}, {mode}"
                );
            }
        }
    }
}

#[test]
fn conversion_preserves_scores_exhaustively() {
    let mut r = rng(12);
    for case in 0..100 {
        let (wfa, alphabet) = random_wfa(&mut r, &small_shape());
        let anml = nfa_to_anml(&wfa).unwrap();
        let back = anml.to_wfa();
        for input in all_strings(&alphabet, 4) {
            for mode in MODES {
                let want = enumerate_paths_score(&wfa, &input, mode).unwrap();
                assert_eq!(
                    viterbi_score(&back, &input, mode).unwrap(),
                    want,
                    "case {case}, input {input:?}, {mode}"
                );
            }
        }
    }
}

#[test]
fn alignment_worked_example() {
    let wfa = build_alignment_wfa(b"AGC", ScoringScheme::dna_example(), &Alphabet::dna()).unwrap();
    // The enumerator walks the epsilon edges directly.
    let raw = |s: &[u8]| {
        enumerate_paths_score(&wfa, s, ScoreMode::Global)
            .unwrap()
            .unwrap()
            .score
    };
    assert_eq!(raw(b"AGC"), 6);
    assert_eq!(raw(b"AGATG"), -1);
    let flat = epsilon_eliminate(&wfa).unwrap();
    let dp = |s: &[u8]| viterbi_score(&flat, s, ScoreMode::Global).unwrap().unwrap();
    assert_eq!(dp(b"AGC").score, 6);
    assert_eq!(dp(b"AGATG").score, -1);
    assert_eq!(dp(b"AGATG").offset, 5);
}

#[test]
fn alignment_properties_over_short_sequences() {
    let scheme = ScoringScheme::dna_example();
    let mut r = rng(13);
    for _ in 0..40 {
        let pattern = random_input(&mut r, b"ACGT", 1, 4);
        let wfa = build_alignment_wfa(&pattern, scheme, &Alphabet::dna()).unwrap();
        let flat = epsilon_eliminate(&wfa).unwrap();
        let m = pattern.len() as i32;
        let global = |s: &[u8]| {
            viterbi_score(&flat, s, ScoreMode::Global)
                .unwrap()
                .map(|b| b.score)
        };

        let exact = global(&pattern).unwrap();
        assert_eq!(exact, m * scheme.matched());

        for i in 0..pattern.len() {
            let mut shorter = pattern.clone();
            shorter.remove(i);
            if shorter.is_empty() {
                continue;
            }
            let s = global(&shorter).unwrap();
            assert!(exact - s <= scheme.matched() - scheme.gap());
        }

        for input in all_strings(b"ACGT", 3) {
            let s = global(&input).unwrap();
            // Every symbol inserted plus every pattern position deleted.
            let floor = (input.len() as i32 + m) * scheme.gap();
            assert!(s >= floor && s <= m * scheme.matched(), "{input:?}: {s}");
        }
    }
}

#[test]
fn positive_epsilon_cycle_is_rejected() {
    let mut r = rng(14);
    for _ in 0..50 {
        let (wfa, _) = random_wfa(&mut r, &small_shape());
        let mut ts = wfa.transitions().to_vec();
        let q = *wfa.accepts().iter().next().unwrap();
        ts.push(napoly::Transition::epsilon(q, 0, 1));
        ts.push(napoly::Transition::epsilon(0, q, 0));
        let looped = napoly::WeightedAutomaton::new(wfa.num_states(), 0, [q], ts).unwrap();
        assert!(matches!(
            epsilon_eliminate(&looped),
            Err(WfaError::UnboundedScore(_))
        ));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn local_dominates_global(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (wfa, alphabet) = random_wfa(&mut r, &WfaShape::default());
        let input = random_input(&mut r, &alphabet, 1, 8);
        let local = viterbi_score(&wfa, &input, ScoreMode::Local).unwrap();
        let global = viterbi_score(&wfa, &input, ScoreMode::Global).unwrap();
        if let (Some(l), Some(g)) = (local, global) {
            prop_assert!(l.score >= g.score);
        }
        // A fresh match anchored at the start is one LOCAL candidate.
        if let Some(g) = global {
            prop_assert!(local.is_some_and(|l| l.score >= g.score));
        }
    }

    #[test]
    fn epsilon_elimination_preserves_scores(seed in any::<u64>()) {
        let mut r = rng(seed);
        let eps = (seed % 3) as usize;
        let shape = WfaShape { epsilons: eps, ..small_shape() };
        let (wfa, alphabet) = random_wfa(&mut r, &shape);
        match epsilon_eliminate(&wfa) {
            Err(WfaError::UnboundedScore(_)) => {}
            Err(e) => prop_assert!(false, "unexpected {e}"),
            Ok(flat) => {
                prop_assert!(!flat.has_epsilon());
                for input in all_strings(&alphabet, 3) {
                    for mode in MODES {
                        prop_assert_eq!(
                            viterbi_score(&flat, &input, mode).unwrap(),
                            enumerate_paths_score(&wfa, &input, mode).unwrap()
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn normalize_and_trim_preserve_scores(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (wfa, alphabet) = random_wfa(&mut r, &small_shape());
        let reduced = trim(&normalize(&wfa));
        for input in all_strings(&alphabet, 3) {
            prop_assert_eq!(
                viterbi_score(&reduced, &input, ScoreMode::Global).unwrap(),
                viterbi_score(&wfa, &input, ScoreMode::Global).unwrap()
            );
        }
    }
}
