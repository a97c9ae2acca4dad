//! Scoreboard files, one per room id.
//!
//! ```text
//! <dir>/<room_id>.scores.json
//! {"v":1,"type":"scoreboard","room_id":"r1","scores":{"alice":3}}
//! ```
//!
//! Files are replaced atomically (write to a temporary sibling, then
//! rename), so a reader sees either the previous or the new board.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sortlab_core::battle::Scoreboard;
use sortlab_core::wire::PROTOCOL_VERSION;
use tracing::warn;

#[derive(Serialize, Deserialize)]
struct ScoreFile {
    v: u32,
    #[serde(rename = "type")]
    kind: String,
    room_id: String,
    scores: Scoreboard,
}

#[derive(Debug, Clone, Default)]
pub struct ScoreStore {
    dir: Option<PathBuf>,
}

impl ScoreStore {
    pub fn new(dir: Option<PathBuf>) -> Self {
        Self { dir }
    }

    pub fn disabled() -> Self {
        Self { dir: None }
    }

    pub fn is_enabled(&self) -> bool {
        self.dir.is_some()
    }

    fn path(dir: &Path, room_id: &str) -> PathBuf {
        dir.join(format!("{room_id}.scores.json"))
    }

    pub fn persist_scoreboard(&self, room_id: &str, scoreboard: &Scoreboard) -> io::Result<()> {
        let Some(dir) = &self.dir else {
            return Ok(());
        };
        fs::create_dir_all(dir)?;
        let file = ScoreFile {
            v: PROTOCOL_VERSION,
            kind: "scoreboard".into(),
            room_id: room_id.to_string(),
            scores: scoreboard.clone(),
        };
        let text = serde_json::to_string(&file).map_err(io::Error::other)?;
        let target = Self::path(dir, room_id);
        let tmp = dir.join(format!(".{room_id}.scores.json.tmp"));
        {
            let mut f = fs::File::create(&tmp)?;
            f.write_all(text.as_bytes())?;
            f.write_all(b"\n")?;
            f.sync_all()?;
        }
        fs::rename(&tmp, &target)
    }

    /// Missing or unreadable files load as an empty board; corruption is
    /// logged.
    pub fn load_scoreboard(&self, room_id: &str) -> Scoreboard {
        let Some(dir) = &self.dir else {
            return Scoreboard::new();
        };
        let path = Self::path(dir, room_id);
        let text = match fs::read_to_string(&path) {
            Ok(t) => t,
            Err(e) if e.kind() == io::ErrorKind::NotFound => return Scoreboard::new(),
            Err(e) => {
                warn!(path = %path.display(), error = %e, "cannot read scoreboard");
                return Scoreboard::new();
            }
        };
        match serde_json::from_str::<ScoreFile>(&text) {
            Ok(file) if file.v == PROTOCOL_VERSION && file.room_id == room_id => file.scores,
            Ok(_) => {
                warn!(path = %path.display(), "scoreboard file belongs to another room or version");
                Scoreboard::new()
            }
            Err(e) => {
                warn!(path = %path.display(), error = %e, "corrupt scoreboard file ignored");
                Scoreboard::new()
            }
        }
    }
}
