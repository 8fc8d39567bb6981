//! Edge-weighted nondeterministic automata scored in the max-plus semiring.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::symbols::SymbolClass;

pub type StateId = usize;

/// Path scores. All arithmetic on them is overflow-checked.
pub type Score = i32;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WfaError {
    #[error("automaton has no states")]
    NoStates,
    #[error("start state {0} is out of range")]
    BadStart(StateId),
    #[error("accept state {0} is out of range")]
    BadAccept(StateId),
    #[error("transition {index} references state {state}, out of range")]
    BadEndpoint { index: usize, state: StateId },
    #[error("transition {0} has an empty symbol class")]
    EmptyClass(usize),
    #[error("epsilon transition present (eliminate epsilon edges first)")]
    EpsilonPresent,
    #[error("automaton has no transitions")]
    EmptyAutomaton,
    #[error("epsilon cycle through state {0} has positive weight, best score is unbounded")]
    UnboundedScore(StateId),
    #[error("score overflow")]
    ScoreOverflow,
    #[error("enumeration guard exceeded: {states} states, input length {input_len}")]
    TooLarge { states: usize, input_len: usize },
    #[error("invalid automaton JSON: {0}")]
    Parse(String),
}

/// Which accept activations count towards the best score.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScoreMode {
    /// Best over accept activations at any offset; a match may start anywhere.
    Local,
    /// Accept activation exactly when the final symbol is consumed, starting at offset 0.
    Global,
}

impl fmt::Display for ScoreMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ScoreMode::Local => "local",
            ScoreMode::Global => "global",
        })
    }
}

/// A best score and the offset (symbols consumed) where it was reached.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Best {
    pub score: Score,
    pub offset: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    Epsilon,
    Class(SymbolClass),
}

impl Label {
    pub fn class(&self) -> Option<&SymbolClass> {
        match self {
            Label::Epsilon => None,
            Label::Class(c) => Some(c),
        }
    }

    pub fn is_epsilon(&self) -> bool {
        matches!(self, Label::Epsilon)
    }

    pub fn matches(&self, byte: u8) -> bool {
        match self {
            Label::Epsilon => false,
            Label::Class(c) => c.contains(byte),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Transition {
    pub from: StateId,
    pub to: StateId,
    pub label: Label,
    pub weight: Score,
}

impl Transition {
    pub fn new(from: StateId, to: StateId, class: SymbolClass, weight: Score) -> Self {
        Transition {
            from,
            to,
            label: Label::Class(class),
            weight,
        }
    }

    pub fn epsilon(from: StateId, to: StateId, weight: Score) -> Self {
        Transition {
            from,
            to,
            label: Label::Epsilon,
            weight,
        }
    }
}

/// A weighted finite automaton with dense state ids `0..num_states`.
///
/// Construction validates every endpoint, so all accessors can index freely.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightedAutomaton {
    num_states: usize,
    start: StateId,
    accepts: BTreeSet<StateId>,
    transitions: Vec<Transition>,
}

impl WeightedAutomaton {
    pub fn new(
        num_states: usize,
        start: StateId,
        accepts: impl IntoIterator<Item = StateId>,
        transitions: Vec<Transition>,
    ) -> Result<Self, WfaError> {
        if num_states == 0 {
            return Err(WfaError::NoStates);
        }
        if start >= num_states {
            return Err(WfaError::BadStart(start));
        }
        let accepts: BTreeSet<StateId> = accepts.into_iter().collect();
        if let Some(&bad) = accepts.iter().find(|&&q| q >= num_states) {
            return Err(WfaError::BadAccept(bad));
        }
        for (index, t) in transitions.iter().enumerate() {
            for state in [t.from, t.to] {
                if state >= num_states {
                    return Err(WfaError::BadEndpoint { index, state });
                }
            }
            if let Label::Class(c) = &t.label {
                if c.is_empty() {
                    return Err(WfaError::EmptyClass(index));
                }
            }
        }
        Ok(WeightedAutomaton {
            num_states,
            start,
            accepts,
            transitions,
        })
    }

    pub fn num_states(&self) -> usize {
        self.num_states
    }

    pub fn start(&self) -> StateId {
        self.start
    }

    pub fn accepts(&self) -> &BTreeSet<StateId> {
        &self.accepts
    }

    pub fn is_accept(&self, q: StateId) -> bool {
        self.accepts.contains(&q)
    }

    pub fn transitions(&self) -> &[Transition] {
        &self.transitions
    }

    pub fn has_epsilon(&self) -> bool {
        self.transitions.iter().any(|t| t.label.is_epsilon())
    }

    /// Union of every transition's symbol class.
    pub fn alphabet(&self) -> SymbolClass {
        self.transitions
            .iter()
            .filter_map(|t| t.label.class())
            .fold(SymbolClass::EMPTY, |acc, c| acc.union(c))
    }

    pub(crate) fn require_epsilon_free(&self) -> Result<(), WfaError> {
        if self.has_epsilon() {
            Err(WfaError::EpsilonPresent)
        } else {
            Ok(())
        }
    }

    pub fn from_json(text: &str) -> Result<Self, WfaError> {
        let doc: AutomatonDoc =
            serde_json::from_str(text).map_err(|e| WfaError::Parse(e.to_string()))?;
        doc.try_into()
    }

    pub fn to_json(&self) -> String {
        let doc = AutomatonDoc::from(self);
        serde_json::to_string_pretty(&doc).expect("automaton serializes")
    }
}

/// Marker used in the interchange format for epsilon edges.
pub const EPSILON_TOKEN: &str = "EPSILON";

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AutomatonDoc {
    states: usize,
    start: StateId,
    accepts: Vec<StateId>,
    transitions: Vec<TransitionDoc>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TransitionDoc {
    from: StateId,
    to: StateId,
    symbols: String,
    weight: Score,
}

fn encode_symbols(label: &Label) -> String {
    match label {
        Label::Epsilon => EPSILON_TOKEN.to_string(),
        Label::Class(c) => c.iter().map(char::from).collect(),
    }
}

fn decode_symbols(index: usize, text: &str) -> Result<Label, WfaError> {
    if text == EPSILON_TOKEN {
        return Ok(Label::Epsilon);
    }
    let mut class = SymbolClass::EMPTY;
    for ch in text.chars() {
        let code = ch as u32;
        if code > 255 {
            return Err(WfaError::Parse(format!(
                "transition {index}: symbol {ch:?} is not a byte value"
            )));
        }
        class.insert(code as u8);
    }
    if class.is_empty() {
        return Err(WfaError::EmptyClass(index));
    }
    Ok(Label::Class(class))
}

impl TryFrom<AutomatonDoc> for WeightedAutomaton {
    type Error = WfaError;

    fn try_from(doc: AutomatonDoc) -> Result<Self, WfaError> {
        let transitions = doc
            .transitions
            .iter()
            .enumerate()
            .map(|(i, t)| {
                Ok(Transition {
                    from: t.from,
                    to: t.to,
                    label: decode_symbols(i, &t.symbols)?,
                    weight: t.weight,
                })
            })
            .collect::<Result<Vec<_>, WfaError>>()?;
        WeightedAutomaton::new(doc.states, doc.start, doc.accepts, transitions)
    }
}

impl From<&WeightedAutomaton> for AutomatonDoc {
    fn from(wfa: &WeightedAutomaton) -> Self {
        AutomatonDoc {
            states: wfa.num_states,
            start: wfa.start,
            accepts: wfa.accepts.iter().copied().collect(),
            transitions: wfa
                .transitions
                .iter()
                .map(|t| TransitionDoc {
                    from: t.from,
                    to: t.to,
                    symbols: encode_symbols(&t.label),
                    weight: t.weight,
                })
                .collect(),
        }
    }
}
