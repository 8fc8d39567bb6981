//! End-to-end compilation: epsilon elimination, ANML conversion, placement,
//! configuration and validation.

use thiserror::Error;

use crate::anml::{nfa_to_anml, AnmlAutomaton};
use crate::compiler::{
    configure, place_with, validate, CompileError, OverlayParams, PlaceOptions, PlacedDesign,
    Placement, Violation,
};
use crate::epsilon::epsilon_eliminate;
use crate::wfa::{ScoreMode, WeightedAutomaton, WfaError};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Automaton(#[from] WfaError),
    #[error(transparent)]
    Compile(#[from] CompileError),
    #[error("configured design failed validation: {}", format_violations(.0))]
    Invalid(Vec<Violation>),
}

fn format_violations(v: &[Violation]) -> String {
    v.iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}

/// Every intermediate product of one compilation.
#[derive(Debug, Clone)]
pub struct Compiled {
    /// Epsilon-free source automaton; the reference for oracle checks.
    pub wfa: WeightedAutomaton,
    pub anml: AnmlAutomaton,
    pub placement: Placement,
    pub design: PlacedDesign,
}

pub fn compile(
    wfa: &WeightedAutomaton,
    params: &OverlayParams,
    mode: ScoreMode,
    options: &PlaceOptions,
) -> Result<Compiled, PipelineError> {
    let wfa = epsilon_eliminate(wfa)?;
    let anml = nfa_to_anml(&wfa)?;
    let placement = place_with(&anml, params, options)?;
    let design = configure(&anml, &placement, params, mode)?;
    let violations = validate(&design);
    if !violations.is_empty() {
        return Err(PipelineError::Invalid(violations));
    }
    Ok(Compiled {
        wfa,
        anml,
        placement,
        design,
    })
}
