use std::sync::Arc;

use thiserror::Error;

use super::{Trace, TraceStep};
use crate::digest::CanonicalHasher;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum CursorError {
    #[error("already at the end of the trace")]
    AtEnd,
    #[error("already at the start of the trace")]
    AtStart,
    #[error("position {target} is outside 0..={len}")]
    OutOfRange { target: usize, len: usize },
}

/// A position inside a trace together with the array state at that position.
///
/// `current` is always the initial array with `steps[..position]` applied.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cursor {
    trace: Arc<Trace>,
    position: usize,
    current: Vec<u32>,
}

impl Cursor {
    pub fn new(trace: Arc<Trace>) -> Self {
        let current = trace.initial().values().to_vec();
        Self {
            trace,
            position: 0,
            current,
        }
    }

    pub fn at(trace: Arc<Trace>, position: usize) -> Result<Self, CursorError> {
        let mut cursor = Self::new(trace);
        cursor.seek(position)?;
        Ok(cursor)
    }

    pub fn trace(&self) -> &Arc<Trace> {
        &self.trace
    }

    pub fn position(&self) -> usize {
        self.position
    }

    pub fn current(&self) -> &[u32] {
        &self.current
    }

    pub fn len(&self) -> usize {
        self.trace.len()
    }

    pub fn is_empty(&self) -> bool {
        self.trace.is_empty()
    }

    pub fn at_start(&self) -> bool {
        self.position == 0
    }

    pub fn at_end(&self) -> bool {
        self.position == self.trace.len()
    }

    /// The most recently applied step, if any. Its `code_line` is the line
    /// the detail view highlights.
    pub fn last_step(&self) -> Option<&TraceStep> {
        self.position.checked_sub(1).map(|p| &self.trace.steps()[p])
    }

    pub fn step_forward(&mut self) -> Result<&TraceStep, CursorError> {
        let step = self
            .trace
            .steps()
            .get(self.position)
            .ok_or(CursorError::AtEnd)?;
        step.kind.apply(&mut self.current);
        self.position += 1;
        Ok(&self.trace.steps()[self.position - 1])
    }

    pub fn step_backward(&mut self) -> Result<&TraceStep, CursorError> {
        if self.position == 0 {
            return Err(CursorError::AtStart);
        }
        self.position -= 1;
        let step = &self.trace.steps()[self.position];
        step.kind.undo(&mut self.current);
        Ok(step)
    }

    /// Moves to `target`, stepping in whichever direction is needed.
    pub fn seek(&mut self, target: usize) -> Result<(), CursorError> {
        let len = self.trace.len();
        if target > len {
            return Err(CursorError::OutOfRange { target, len });
        }
        let steps = self.trace.steps();
        while self.position < target {
            steps[self.position].kind.apply(&mut self.current);
            self.position += 1;
        }
        while self.position > target {
            self.position -= 1;
            steps[self.position].kind.undo(&mut self.current);
        }
        Ok(())
    }

    /// SHA-256 over `(algorithm_id, position, current)`.
    pub fn state_digest(&self) -> String {
        let mut h = CanonicalHasher::new("sortlab/cursor/v1");
        h.str(self.trace.algorithm_id())
            .u64(self.position as u64)
            .u64(self.current.len() as u64);
        for &v in &self.current {
            h.u64(u64::from(v));
        }
        h.finish()
    }
}
