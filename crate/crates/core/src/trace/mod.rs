//! Instrumented, reversible execution traces of the catalog algorithms.
//!
//! A [`Trace`] records every comparison and every data movement an algorithm
//! performs on the visible sorting field. Each step carries the pseudo-code
//! line it belongs to and its cost under the race cost model. All data steps
//! are invertible, which is what lets a [`Cursor`] walk backwards.

mod algorithms;
mod cursor;
pub mod dump;

use std::cmp::Ordering;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::catalog::{Algorithm, UnknownAlgorithm};
use crate::element::{ElementArray, ElementError};

pub use cursor::{Cursor, CursorError};

pub const COMPARE_COST: u64 = 1;
pub const SWAP_COST: u64 = 2;
pub const WRITE_COST: u64 = 1;
pub const HIGHLIGHT_COST: u64 = 0;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TraceError {
    #[error(transparent)]
    UnknownAlgorithm(#[from] UnknownAlgorithm),
    #[error("invalid input: {0}")]
    InvalidInput(#[from] ElementError),
    #[error("step {index}: {reason}")]
    InvalidStep { index: usize, reason: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CompareOutcome {
    Less,
    Equal,
    Greater,
}

impl From<Ordering> for CompareOutcome {
    fn from(o: Ordering) -> Self {
        match o {
            Ordering::Less => CompareOutcome::Less,
            Ordering::Equal => CompareOutcome::Equal,
            Ordering::Greater => CompareOutcome::Greater,
        }
    }
}

/// Half-open index range `[start, end)` the algorithm is currently working on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Region {
    pub start: usize,
    pub end: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StepKind {
    Compare {
        i: usize,
        j: usize,
        outcome: CompareOutcome,
    },
    Swap {
        i: usize,
        j: usize,
    },
    Write {
        i: usize,
        new_value: u32,
        old_value: u32,
    },
    Highlight {
        region: Region,
    },
}

impl StepKind {
    pub fn cost(&self) -> u64 {
        match self {
            StepKind::Compare { .. } => COMPARE_COST,
            StepKind::Swap { .. } => SWAP_COST,
            StepKind::Write { .. } => WRITE_COST,
            StepKind::Highlight { .. } => HIGHLIGHT_COST,
        }
    }

    /// Whether applying the step can change the array.
    pub fn mutates(&self) -> bool {
        matches!(self, StepKind::Swap { .. } | StepKind::Write { .. })
    }

    pub(crate) fn apply(&self, values: &mut [u32]) {
        match *self {
            StepKind::Swap { i, j } => values.swap(i, j),
            StepKind::Write { i, new_value, .. } => values[i] = new_value,
            StepKind::Compare { .. } | StepKind::Highlight { .. } => {}
        }
    }

    pub(crate) fn undo(&self, values: &mut [u32]) {
        match *self {
            StepKind::Swap { i, j } => values.swap(i, j),
            StepKind::Write { i, old_value, .. } => values[i] = old_value,
            StepKind::Compare { .. } | StepKind::Highlight { .. } => {}
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TraceStep {
    #[serde(flatten)]
    pub kind: StepKind,
    pub code_line: usize,
    pub cost: u64,
}

impl TraceStep {
    pub fn new(kind: StepKind, code_line: usize) -> Self {
        Self {
            kind,
            code_line,
            cost: kind.cost(),
        }
    }
}

/// Receives the steps an algorithm emits.
///
/// Recording into a `Vec` materializes a full trace; [`CostTally`] only keeps
/// the totals, which is all a battle needs.
pub trait StepSink {
    fn record(&mut self, step: TraceStep);
}

impl StepSink for Vec<TraceStep> {
    fn record(&mut self, step: TraceStep) {
        self.push(step);
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CostTally {
    pub steps: usize,
    pub total_cost: u64,
}

impl StepSink for CostTally {
    fn record(&mut self, step: TraceStep) {
        self.steps += 1;
        self.total_cost += step.cost;
    }
}

/// Working state handed to the algorithm implementations. Every operation
/// on the array goes through here so that nothing escapes the trace.
pub(crate) struct Tracer<'s, S: StepSink> {
    values: Vec<u32>,
    sink: &'s mut S,
}

impl<'s, S: StepSink> Tracer<'s, S> {
    fn new(values: Vec<u32>, sink: &'s mut S) -> Self {
        Self { values, sink }
    }

    pub(crate) fn len(&self) -> usize {
        self.values.len()
    }

    pub(crate) fn values(&self) -> &[u32] {
        &self.values
    }

    /// Compares `A[i]` with `A[j]`.
    pub(crate) fn compare(&mut self, i: usize, j: usize, line: usize) -> Ordering {
        let ord = self.values[i].cmp(&self.values[j]);
        self.sink.record(TraceStep::new(
            StepKind::Compare {
                i,
                j,
                outcome: ord.into(),
            },
            line,
        ));
        ord
    }

    pub(crate) fn swap(&mut self, i: usize, j: usize, line: usize) {
        let kind = StepKind::Swap { i, j };
        kind.apply(&mut self.values);
        self.sink.record(TraceStep::new(kind, line));
    }

    pub(crate) fn highlight(&mut self, start: usize, end: usize, line: usize) {
        self.sink.record(TraceStep::new(
            StepKind::Highlight {
                region: Region { start, end },
            },
            line,
        ));
    }

    /// Rearranges `A[start..start + target.len())` into `target` by
    /// successive swaps. `target` must be a permutation of that segment.
    pub(crate) fn place(&mut self, start: usize, target: &[u32], line: usize) {
        let end = start + target.len();
        // Values are ranks 1..=n, so a dense table maps value -> position.
        let mut pos = vec![usize::MAX; self.values.len() + 1];
        for k in start..end {
            pos[self.values[k] as usize] = k;
        }
        for (k, &want) in target.iter().enumerate() {
            let p = start + k;
            let q = pos[want as usize];
            if q != p {
                let displaced = self.values[p];
                self.swap(p, q, line);
                pos[displaced as usize] = q;
                pos[want as usize] = p;
            }
        }
    }

    fn finish(self) -> Vec<u32> {
        self.values
    }
}

/// A complete instrumented run of one algorithm on one input.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Trace {
    algorithm: Algorithm,
    initial: ElementArray,
    steps: Vec<TraceStep>,
    total_cost: u64,
}

impl Trace {
    pub fn generate(algorithm: Algorithm, input: &ElementArray) -> Trace {
        let mut steps = Vec::new();
        let sorted = run(algorithm, input, &mut steps);
        debug_assert!(sorted.windows(2).all(|w| w[0] < w[1]));
        let total_cost = steps.iter().map(|s| s.cost).sum();
        Trace {
            algorithm,
            initial: input.clone(),
            steps,
            total_cost,
        }
    }

    /// Builds a trace from explicit steps, checking that every step is
    /// applicable: indices in bounds, `Write` old values matching the array,
    /// code lines within the pseudo-code, and costs following the model.
    pub fn from_parts(
        algorithm: Algorithm,
        initial: ElementArray,
        steps: Vec<TraceStep>,
    ) -> Result<Trace, TraceError> {
        let lines = algorithm.spec().pseudo_code.len();
        let mut values = initial.values().to_vec();
        let n = values.len();
        for (index, step) in steps.iter().enumerate() {
            let bad = |reason: String| TraceError::InvalidStep { index, reason };
            if step.code_line >= lines {
                return Err(bad(format!("code line {} out of range", step.code_line)));
            }
            if step.cost != step.kind.cost() {
                return Err(bad(format!("cost {} does not match step kind", step.cost)));
            }
            match step.kind {
                StepKind::Compare { i, j, .. } | StepKind::Swap { i, j } => {
                    if i >= n || j >= n {
                        return Err(bad(format!("index out of range for n={n}")));
                    }
                }
                StepKind::Write { i, old_value, .. } => {
                    if i >= n {
                        return Err(bad(format!("index out of range for n={n}")));
                    }
                    if values[i] != old_value {
                        return Err(bad(format!(
                            "write records old value {old_value} but A[{i}] = {}",
                            values[i]
                        )));
                    }
                }
                StepKind::Highlight { region } => {
                    if region.start > region.end || region.end > n {
                        return Err(bad("highlight region out of range".into()));
                    }
                }
            }
            step.kind.apply(&mut values);
        }
        let total_cost = steps.iter().map(|s| s.cost).sum();
        Ok(Trace {
            algorithm,
            initial,
            steps,
            total_cost,
        })
    }

    pub fn algorithm(&self) -> Algorithm {
        self.algorithm
    }

    pub fn algorithm_id(&self) -> &'static str {
        self.algorithm.id()
    }

    pub fn initial(&self) -> &ElementArray {
        &self.initial
    }

    pub fn steps(&self) -> &[TraceStep] {
        &self.steps
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn total_cost(&self) -> u64 {
        self.total_cost
    }

    /// The array after every step has been applied.
    pub fn final_values(&self) -> Vec<u32> {
        let mut values = self.initial.values().to_vec();
        for step in &self.steps {
            step.kind.apply(&mut values);
        }
        values
    }

    pub fn into_cursor(self) -> Cursor {
        Cursor::new(Arc::new(self))
    }
}

fn run<S: StepSink>(algorithm: Algorithm, input: &ElementArray, sink: &mut S) -> Vec<u32> {
    let mut tracer = Tracer::new(input.values().to_vec(), sink);
    match algorithm {
        Algorithm::Bubble => algorithms::bubble(&mut tracer),
        Algorithm::Selection => algorithms::selection(&mut tracer),
        Algorithm::Insertion => algorithms::insertion(&mut tracer),
        Algorithm::Gnome => algorithms::gnome(&mut tracer),
        Algorithm::Shell => algorithms::shell(&mut tracer),
        Algorithm::Merge => algorithms::merge(&mut tracer),
        Algorithm::Quick => algorithms::quick(&mut tracer),
        Algorithm::Heap => algorithms::heap(&mut tracer),
        Algorithm::Radix => algorithms::radix(&mut tracer),
    }
    tracer.finish()
}

/// Generates the trace of the catalog algorithm `algorithm_id` on `input`.
pub fn generate_trace(algorithm_id: &str, input: &ElementArray) -> Result<Trace, TraceError> {
    let algorithm = Algorithm::from_id(algorithm_id)?;
    Ok(Trace::generate(algorithm, input))
}

/// Like [`generate_trace`] but validates raw values first.
pub fn generate_trace_from_values(
    algorithm_id: &str,
    values: Vec<u32>,
) -> Result<Trace, TraceError> {
    let algorithm = Algorithm::from_id(algorithm_id)?;
    let input = ElementArray::new(values)?;
    Ok(Trace::generate(algorithm, &input))
}

/// Step count and total cost of a run, without materializing the steps.
pub fn trace_cost(algorithm: Algorithm, input: &ElementArray) -> CostTally {
    let mut tally = CostTally::default();
    run(algorithm, input, &mut tally);
    tally
}

#[cfg(test)]
mod tests {
    use super::*;

    fn arr(v: &[u32]) -> ElementArray {
        ElementArray::new(v.to_vec()).unwrap()
    }

    #[test]
    fn bubble_two_elements() {
        let t = generate_trace("bubble", &arr(&[2, 1])).unwrap();
        let kinds: Vec<_> = t.steps().iter().map(|s| s.kind).collect();
        assert_eq!(
            kinds,
            vec![
                StepKind::Compare {
                    i: 0,
                    j: 1,
                    outcome: CompareOutcome::Greater
                },
                StepKind::Swap { i: 0, j: 1 },
            ]
        );
        assert_eq!(t.final_values(), vec![1, 2]);
        assert_eq!(t.total_cost(), 3);
    }

    #[test]
    fn insertion_on_sorted_only_compares() {
        let t = generate_trace("insertion", &arr(&[1, 2, 3])).unwrap();
        let compares = t
            .steps()
            .iter()
            .filter(|s| matches!(s.kind, StepKind::Compare { .. }))
            .count();
        assert_eq!(compares, 2);
        assert_eq!(t.len(), 2);
        assert!(!t.steps().iter().any(|s| s.kind.mutates()));
        assert_eq!(t.final_values(), vec![1, 2, 3]);
    }

    #[test]
    fn trivial_inputs_produce_no_steps() {
        for a in Algorithm::ALL {
            for input in [arr(&[]), arr(&[1])] {
                let t = Trace::generate(a, &input);
                assert!(t.is_empty(), "{a}");
                assert_eq!(t.total_cost(), 0);
            }
        }
    }

    #[test]
    fn unknown_algorithm_and_bad_input() {
        assert!(matches!(
            generate_trace("bogo", &arr(&[1])),
            Err(TraceError::UnknownAlgorithm(_))
        ));
        assert!(matches!(
            generate_trace_from_values("merge", vec![1, 1]),
            Err(TraceError::InvalidInput(_))
        ));
    }

    #[test]
    fn tally_matches_materialized_trace() {
        let input = arr(&[5, 3, 8, 1, 9, 2, 7, 4, 6, 10]);
        for a in Algorithm::ALL {
            let t = Trace::generate(a, &input);
            let tally = trace_cost(a, &input);
            assert_eq!(tally.steps, t.len());
            assert_eq!(tally.total_cost, t.total_cost());
        }
    }

    #[test]
    fn from_parts_rejects_inconsistent_write() {
        let initial = arr(&[2, 1]);
        let bad = vec![TraceStep::new(
            StepKind::Write {
                i: 0,
                new_value: 1,
                old_value: 1,
            },
            0,
        )];
        assert!(matches!(
            Trace::from_parts(Algorithm::Bubble, initial.clone(), bad),
            Err(TraceError::InvalidStep { index: 0, .. })
        ));
        let good = vec![TraceStep::new(
            StepKind::Write {
                i: 0,
                new_value: 1,
                old_value: 2,
            },
            0,
        )];
        assert!(Trace::from_parts(Algorithm::Bubble, initial, good).is_ok());
    }
}
