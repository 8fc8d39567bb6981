//! Alignment automata for a pattern under a linear match/mismatch/gap scheme.

use thiserror::Error;

use crate::symbols::SymbolClass;
use crate::wfa::{Score, Transition, WeightedAutomaton};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlignError {
    #[error("pattern is empty")]
    EmptyPattern,
    #[error("pattern symbol {symbol:?} at position {position} is outside the alphabet")]
    SymbolOutsideAlphabet { symbol: char, position: usize },
    #[error("match score {matched} must exceed mismatch score {mismatch}")]
    DegenerateScheme { matched: Score, mismatch: Score },
    #[error("alphabet is empty")]
    EmptyAlphabet,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScoringScheme {
    matched: Score,
    mismatch: Score,
    gap: Score,
}

impl ScoringScheme {
    pub fn new(matched: Score, mismatch: Score, gap: Score) -> Result<Self, AlignError> {
        if matched <= mismatch {
            return Err(AlignError::DegenerateScheme { matched, mismatch });
        }
        Ok(ScoringScheme {
            matched,
            mismatch,
            gap,
        })
    }

    /// +2 / -1 / -2, the scheme of the worked DNA example.
    pub fn dna_example() -> Self {
        ScoringScheme::new(2, -1, -2).unwrap()
    }

    pub fn matched(&self) -> Score {
        self.matched
    }

    pub fn mismatch(&self) -> Score {
        self.mismatch
    }

    pub fn gap(&self) -> Score {
        self.gap
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Alphabet(SymbolClass);

impl Alphabet {
    pub fn new(symbols: SymbolClass) -> Result<Self, AlignError> {
        if symbols.is_empty() {
            return Err(AlignError::EmptyAlphabet);
        }
        Ok(Alphabet(symbols))
    }

    pub fn dna() -> Self {
        Alphabet(SymbolClass::from_bytes(b"ACGT"))
    }

    pub fn symbols(&self) -> SymbolClass {
        self.0
    }
}

impl Default for Alphabet {
    fn default() -> Self {
        Alphabet::dna()
    }
}

/// Linear automaton over pattern positions `0..=m`, state `m` accepting.
///
/// Per position `i < m`: match on `pattern[i]`, substitution on the remaining
/// alphabet (a disjoint class), an insertion self-loop on the whole alphabet,
/// and an epsilon deletion edge. The result still contains epsilon edges.
pub fn build_alignment_wfa(
    pattern: &[u8],
    scheme: ScoringScheme,
    alphabet: &Alphabet,
) -> Result<WeightedAutomaton, AlignError> {
    if pattern.is_empty() {
        return Err(AlignError::EmptyPattern);
    }
    let sigma = alphabet.symbols();
    if let Some((position, &b)) = pattern
        .iter()
        .enumerate()
        .find(|(_, &b)| !sigma.contains(b))
    {
        return Err(AlignError::SymbolOutsideAlphabet {
            symbol: b as char,
            position,
        });
    }
    let m = pattern.len();
    let mut transitions = Vec::with_capacity(4 * m);
    for (i, &p) in pattern.iter().enumerate() {
        let matched = SymbolClass::single(p);
        transitions.push(Transition::new(i, i + 1, matched, scheme.matched));
        let others = sigma.difference(&matched);
        if !others.is_empty() {
            transitions.push(Transition::new(i, i + 1, others, scheme.mismatch));
        }
        transitions.push(Transition::new(i, i, sigma, scheme.gap));
        transitions.push(Transition::epsilon(i, i + 1, scheme.gap));
    }
    Ok(WeightedAutomaton::new(m + 1, 0, [m], transitions).expect("states 0..=m"))
}

/// Sequences from a plain-text file, one per line. Blank lines and FASTA
/// header lines (starting with `>`) are skipped; surrounding whitespace is trimmed.
pub fn read_sequences(text: &str) -> Vec<Vec<u8>> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('>'))
        .map(|l| l.as_bytes().to_vec())
        .collect()
}
