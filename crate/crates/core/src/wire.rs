//! JSON wire encoding shared by the server, the CLI and the browser client.
//!
//! Every message is one UTF-8 JSON object carrying `"v": 1` and a `"type"`
//! tag next to the message fields. Unknown fields are ignored when decoding.
//! The full grammar is in `docs/protocol.md`.

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::session::{Action, ClientMessage, ServerMessage, Snapshot};

pub const PROTOCOL_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum WireError {
    #[error("malformed message: {0}")]
    Malformed(#[from] serde_json::Error),
    #[error("unsupported protocol version {0}")]
    Version(u32),
}

#[derive(Serialize)]
struct Outgoing<'a, T> {
    v: u32,
    #[serde(flatten)]
    message: &'a T,
}

#[derive(Deserialize)]
struct Incoming<T> {
    v: u32,
    #[serde(flatten)]
    message: T,
}

fn encode<T: Serialize>(message: &T) -> String {
    serde_json::to_string(&Outgoing {
        v: PROTOCOL_VERSION,
        message,
    })
    .expect("protocol messages serialize")
}

fn decode<T: DeserializeOwned>(text: &str) -> Result<T, WireError> {
    let incoming: Incoming<T> = serde_json::from_str(text)?;
    if incoming.v != PROTOCOL_VERSION {
        return Err(WireError::Version(incoming.v));
    }
    Ok(incoming.message)
}

pub fn encode_client(message: &ClientMessage) -> String {
    encode(message)
}

pub fn decode_client(text: &str) -> Result<ClientMessage, WireError> {
    decode(text)
}

pub fn encode_server(message: &ServerMessage) -> String {
    encode(message)
}

pub fn decode_server(text: &str) -> Result<ServerMessage, WireError> {
    decode(text)
}

/// One line of an action log: an `action_applied` message plus the room it
/// belongs to and, optionally, the room digest after applying it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LogRecord {
    pub action: Action,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub room: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub digest: Option<String>,
}

/// Optional first line of an action log for a room that did not start
/// empty (for example with a scoreboard reloaded from disk).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BaselineRecord {
    pub room: String,
    pub snapshot: Snapshot,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum LogLine {
    ActionApplied(LogRecord),
    Snapshot(BaselineRecord),
}

pub fn encode_log_line(line: &LogLine) -> String {
    encode(line)
}

pub fn decode_log_line(text: &str) -> Result<LogLine, WireError> {
    decode(text)
}

pub fn encode_log_record(record: &LogRecord) -> String {
    encode(&LogLine::ActionApplied(record.clone()))
}

pub fn decode_log_record(text: &str) -> Result<LogRecord, WireError> {
    match decode(text)? {
        LogLine::ActionApplied(record) => Ok(record),
        LogLine::Snapshot(_) => Err(WireError::Malformed(serde::de::Error::custom(
            "expected an action_applied record",
        ))),
    }
}
