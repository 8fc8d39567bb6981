//! State-labeled (ANML-style) weighted automata.
//!
//! Every node is one transition of the source automaton: it carries that
//! transition's symbol class and weight, and edges between nodes are plain
//! adjacency.

use crate::symbols::SymbolClass;
use crate::wfa::{Label, Score, Transition, WeightedAutomaton, WfaError};

pub type NodeId = usize;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnmlNode {
    pub id: NodeId,
    pub symbols: SymbolClass,
    pub weight: Score,
    pub start_enabled: bool,
    pub accept: bool,
    /// Sorted, deduplicated.
    pub successors: Vec<NodeId>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnmlAutomaton {
    nodes: Vec<AnmlNode>,
}

impl AnmlAutomaton {
    /// Node ids must equal their index; successor lists are sorted and deduplicated here.
    pub fn new(mut nodes: Vec<AnmlNode>) -> Result<Self, WfaError> {
        let n = nodes.len();
        for (i, node) in nodes.iter_mut().enumerate() {
            if node.id != i {
                return Err(WfaError::Parse(format!(
                    "node at index {i} has id {}",
                    node.id
                )));
            }
            if node.symbols.is_empty() {
                return Err(WfaError::EmptyClass(i));
            }
            node.successors.sort_unstable();
            node.successors.dedup();
            if let Some(&bad) = node.successors.iter().find(|&&s| s >= n) {
                return Err(WfaError::BadEndpoint {
                    index: i,
                    state: bad,
                });
            }
        }
        Ok(AnmlAutomaton { nodes })
    }

    pub fn nodes(&self) -> &[AnmlNode] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn start_enabled(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.nodes.iter().filter(|n| n.start_enabled).map(|n| n.id)
    }

    pub fn accepts(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.nodes.iter().filter(|n| n.accept).map(|n| n.id)
    }

    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.nodes
            .iter()
            .flat_map(|n| n.successors.iter().map(move |&s| (n.id, s)))
    }

    /// Re-expresses the node semantics as an edge-weighted automaton: state 0
    /// is a fresh start, node `i` becomes state `i + 1`, and every edge into a
    /// node carries that node's class and weight.
    pub fn to_wfa(&self) -> WeightedAutomaton {
        let mut transitions = Vec::new();
        for node in &self.nodes {
            if node.start_enabled {
                transitions.push(Transition::new(0, node.id + 1, node.symbols, node.weight));
            }
            for &s in &node.successors {
                let succ = &self.nodes[s];
                transitions.push(Transition::new(
                    node.id + 1,
                    s + 1,
                    succ.symbols,
                    succ.weight,
                ));
            }
        }
        WeightedAutomaton::new(
            self.nodes.len() + 1,
            0,
            self.accepts().map(|id| id + 1),
            transitions,
        )
        .expect("node ids are dense")
    }
}

/// One node per transition; node `i` precedes node `j` when transition `i`
/// ends where transition `j` begins.
pub fn nfa_to_anml(wfa: &WeightedAutomaton) -> Result<AnmlAutomaton, WfaError> {
    wfa.require_epsilon_free()?;
    if wfa.transitions().is_empty() {
        return Err(WfaError::EmptyAutomaton);
    }
    let mut leaving: Vec<Vec<NodeId>> = vec![Vec::new(); wfa.num_states()];
    for (i, t) in wfa.transitions().iter().enumerate() {
        leaving[t.from].push(i);
    }
    let nodes = wfa
        .transitions()
        .iter()
        .enumerate()
        .map(|(id, t)| {
            let Label::Class(symbols) = t.label else {
                unreachable!("epsilon-free checked above")
            };
            AnmlNode {
                id,
                symbols,
                weight: t.weight,
                start_enabled: t.from == wfa.start(),
                accept: wfa.is_accept(t.to),
                successors: leaving[t.to].clone(),
            }
        })
        .collect();
    AnmlAutomaton::new(nodes)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_transition() {
        let wfa = WeightedAutomaton::new(
            2,
            0,
            [1],
            vec![Transition::new(0, 1, SymbolClass::single(b'A'), 2)],
        )
        .unwrap();
        let anml = nfa_to_anml(&wfa).unwrap();
        assert_eq!(
            anml.nodes(),
            &[AnmlNode {
                id: 0,
                symbols: SymbolClass::single(b'A'),
                weight: 2,
                start_enabled: true,
                accept: true,
                successors: vec![],
            }]
        );
    }

    #[test]
    fn adjacency_follows_consecutive_transitions() {
        let a = SymbolClass::single(b'A');
        let wfa = WeightedAutomaton::new(
            3,
            0,
            [2],
            vec![
                Transition::new(0, 1, a, 1),
                Transition::new(1, 1, a, 0),
                Transition::new(1, 2, a, 1),
            ],
        )
        .unwrap();
        let anml = nfa_to_anml(&wfa).unwrap();
        assert_eq!(anml.nodes()[0].successors, vec![1, 2]);
        assert_eq!(anml.nodes()[1].successors, vec![1, 2]);
        assert!(anml.nodes()[2].successors.is_empty());
        assert_eq!(anml.start_enabled().collect::<Vec<_>>(), vec![0]);
        assert_eq!(anml.accepts().collect::<Vec<_>>(), vec![2]);
    }

    #[test]
    fn errors() {
        let eps = WeightedAutomaton::new(2, 0, [1], vec![Transition::epsilon(0, 1, 0)]).unwrap();
        assert_eq!(nfa_to_anml(&eps), Err(WfaError::EpsilonPresent));
        let empty = WeightedAutomaton::new(2, 0, [1], vec![]).unwrap();
        assert_eq!(nfa_to_anml(&empty), Err(WfaError::EmptyAutomaton));
    }
}
