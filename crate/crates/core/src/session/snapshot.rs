use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::RoomState;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("corrupt snapshot: {0}")]
pub struct CorruptSnapshot(pub String);

/// Full room state handed to late joiners.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Snapshot {
    pub log_seq: u64,
    pub state: RoomState,
}

impl Snapshot {
    /// Validates the snapshot and rebuilds the derived parts of the state.
    pub fn restore(&self) -> Result<RoomState, CorruptSnapshot> {
        if self.log_seq != self.state.log_seq {
            return Err(CorruptSnapshot(format!(
                "log_seq {} does not match state log_seq {}",
                self.log_seq, self.state.log_seq
            )));
        }
        self.state.check_invariants().map_err(CorruptSnapshot)?;
        let mut state = self.state.clone();
        state
            .rematerialize()
            .map_err(|r| CorruptSnapshot(r.to_string()))?;
        Ok(state)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("snapshot serializes")
    }

    pub fn from_json(text: &str) -> Result<Snapshot, CorruptSnapshot> {
        serde_json::from_str(text).map_err(|e| CorruptSnapshot(e.to_string()))
    }
}

/// Parses and restores in one go.
pub fn restore(text: &str) -> Result<RoomState, CorruptSnapshot> {
    Snapshot::from_json(text)?.restore()
}
