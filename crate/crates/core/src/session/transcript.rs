//! JSON Lines transcripts: a header line, then one line per event.

use std::fs::{File, OpenOptions};
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dialogue::{ChoiceRecord, DialogueAct, EthicalProfile, NeedKind, ProfileChoice};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Agent,
    User,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TranscriptHeader {
    pub pack: String,
    pub pack_version: String,
    pub seed: u64,
    /// Profile as requested at session start.
    pub profile: ProfileChoice,
    /// Profile actually in force (the draw, for `random`).
    pub ethical_profile: EthicalProfile,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TranscriptEntry {
    pub seq: u64,
    pub direction: Direction,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub act: Option<DialogueAct>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub need: Option<NeedKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub choice: Option<ChoiceRecord>,
    /// Digest of the information state right after this event.
    pub digest: String,
}

impl TranscriptEntry {
    pub fn agent(seq: u64, act: DialogueAct, digest: String) -> Self {
        TranscriptEntry {
            seq,
            direction: Direction::Agent,
            need: Some(act.fulfils),
            act: Some(act),
            choice: None,
            digest,
        }
    }

    pub fn user(seq: u64, choice: ChoiceRecord, digest: String) -> Self {
        TranscriptEntry {
            seq,
            direction: Direction::User,
            act: None,
            need: None,
            choice: Some(choice),
            digest,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
#[allow(clippy::large_enum_variant)]
enum Line {
    Header(TranscriptHeader),
    Entry(TranscriptEntry),
}

#[derive(Debug, Error)]
pub enum TranscriptError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("transcript has no header line")]
    MissingHeader,
    #[error("line {line}: second header")]
    ExtraHeader { line: usize },
    #[error("line {line}: expected seq {expected}, found {found}")]
    Sequence { line: usize, expected: u64, found: u64 },
    #[error(transparent)]
    Io(#[from] io::Error),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Transcript {
    pub header: TranscriptHeader,
    pub entries: Vec<TranscriptEntry>,
}

impl Transcript {
    pub fn header_line(header: &TranscriptHeader) -> String {
        serde_json::to_string(&Line::Header(header.clone())).expect("header serializes")
    }

    pub fn entry_line(entry: &TranscriptEntry) -> String {
        serde_json::to_string(&Line::Entry(entry.clone())).expect("entry serializes")
    }

    pub fn to_jsonl(&self) -> String {
        let mut out = Self::header_line(&self.header);
        out.push('\n');
        for e in &self.entries {
            out.push_str(&Self::entry_line(e));
            out.push('\n');
        }
        out
    }

    pub fn parse_jsonl(text: &str) -> Result<Self, TranscriptError> {
        let mut header = None;
        let mut entries = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            if raw.trim().is_empty() {
                continue;
            }
            let parsed: Line = serde_json::from_str(raw).map_err(|e| TranscriptError::Parse {
                line,
                message: e.to_string(),
            })?;
            match parsed {
                Line::Header(h) => {
                    if header.is_some() || !entries.is_empty() {
                        return Err(TranscriptError::ExtraHeader { line });
                    }
                    header = Some(h);
                }
                Line::Entry(e) => {
                    if header.is_none() {
                        return Err(TranscriptError::MissingHeader);
                    }
                    let expected = entries.len() as u64;
                    if e.seq != expected {
                        return Err(TranscriptError::Sequence {
                            line,
                            expected,
                            found: e.seq,
                        });
                    }
                    entries.push(e);
                }
            }
        }
        Ok(Transcript {
            header: header.ok_or(TranscriptError::MissingHeader)?,
            entries,
        })
    }

    pub fn load(path: &Path) -> Result<Self, TranscriptError> {
        Self::parse_jsonl(&std::fs::read_to_string(path)?)
    }

    /// The user's option ids, in order.
    pub fn choices(&self) -> impl Iterator<Item = &str> {
        self.entries
            .iter()
            .filter_map(|e| e.choice.as_ref())
            .map(|c| c.option.as_str())
    }

    pub fn acts(&self) -> impl Iterator<Item = &DialogueAct> {
        self.entries.iter().filter_map(|e| e.act.as_ref())
    }
}

/// Append-only transcript file. Each line is written and flushed whole.
#[derive(Debug)]
pub struct TranscriptWriter {
    path: PathBuf,
    file: File,
}

impl TranscriptWriter {
    pub fn create(path: impl Into<PathBuf>) -> io::Result<Self> {
        let path = path.into();
        let file = OpenOptions::new().create(true).append(true).open(&path)?;
        Ok(Self { path, file })
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn append(&mut self, line: &str) -> io::Result<()> {
        let mut buf = Vec::with_capacity(line.len() + 1);
        buf.extend_from_slice(line.as_bytes());
        buf.push(b'\n');
        self.file.write_all(&buf)?;
        self.file.flush()
    }
}
