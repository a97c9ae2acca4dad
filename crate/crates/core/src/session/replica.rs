use thiserror::Error;

use super::protocol::{ServerMessage, UserId};
use super::room::ApplyError;
use super::{CorruptSnapshot, RoomState};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReplicaError {
    #[error("action received before welcome")]
    NotWelcomed,
    #[error(transparent)]
    Snapshot(#[from] CorruptSnapshot),
    #[error(transparent)]
    Apply(#[from] ApplyError),
}

/// Client-side mirror of a room, fed by server messages only.
///
/// Bootstraps from the `Welcome` snapshot, then applies `ActionApplied`
/// strictly in sequence. Actions at or below the current sequence are
/// duplicates and are skipped; a gap is an error.
#[derive(Debug, Clone, Default)]
pub struct Replica {
    user_id: Option<UserId>,
    state: Option<RoomState>,
}

impl Replica {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn user_id(&self) -> Option<&str> {
        self.user_id.as_deref()
    }

    pub fn state(&self) -> Option<&RoomState> {
        self.state.as_ref()
    }

    pub fn digest(&self) -> Option<String> {
        self.state.as_ref().map(RoomState::state_digest)
    }

    pub fn receive(&mut self, message: &ServerMessage) -> Result<(), ReplicaError> {
        match message {
            ServerMessage::Welcome { user_id, snapshot } => {
                self.state = Some(snapshot.restore()?);
                self.user_id = Some(user_id.clone());
            }
            ServerMessage::ActionApplied { action } => {
                let state = self.state.as_mut().ok_or(ReplicaError::NotWelcomed)?;
                if action.seq > state.log_seq {
                    state.apply_action(action)?;
                }
            }
            _ => {}
        }
        Ok(())
    }
}
