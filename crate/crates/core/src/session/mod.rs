//! A dialogue engine wrapped with seeding, transcript bookkeeping and the
//! wire protocol. Network and process concerns live in the server crate.

mod transcript;
mod wire;

use std::io;
use std::sync::Arc;
use std::time::SystemTime;

use thiserror::Error;

use crate::dialogue::{DialogueError, Engine, InformationState, ProfileChoice};
use crate::pack::ContentPack;

pub use transcript::{
    Direction, Transcript, TranscriptEntry, TranscriptError, TranscriptHeader, TranscriptWriter,
};
pub use wire::{ClientMessage, ErrorCode, ServerMessage, Summary, TopicSummary};

#[derive(Debug, Error)]
pub enum SessionError {
    #[error("{0}")]
    StaleOption(String),
    #[error("session {0} has ended")]
    Ended(String),
    #[error(transparent)]
    Dialogue(#[from] DialogueError),
    #[error("transcript write failed: {0}")]
    Storage(#[from] io::Error),
}

impl SessionError {
    pub fn code(&self) -> ErrorCode {
        match self {
            SessionError::StaleOption(_) | SessionError::Ended(_) => ErrorCode::StaleOption,
            SessionError::Dialogue(_) => ErrorCode::Internal,
            SessionError::Storage(_) => ErrorCode::Storage,
        }
    }

    pub fn to_message(&self) -> ServerMessage {
        ServerMessage::error(self.code(), self.to_string())
    }
}

#[derive(Debug, Clone)]
pub struct SessionSpec {
    pub id: String,
    pub seed: u64,
    pub profile: ProfileChoice,
    pub created_at: SystemTime,
}

#[derive(Debug)]
pub struct Session {
    id: String,
    seed: u64,
    profile: ProfileChoice,
    created_at: SystemTime,
    engine: Engine,
    header: TranscriptHeader,
    entries: Vec<TranscriptEntry>,
    writer: Option<TranscriptWriter>,
    /// Lines already on disk, the header included.
    persisted: usize,
}

impl Session {
    /// Starts a session and runs the agent up to its first question.
    pub fn start(
        pack: Arc<ContentPack>,
        spec: SessionSpec,
    ) -> Result<(Self, Vec<ServerMessage>), SessionError> {
        let engine = Engine::new(pack.clone(), spec.profile, spec.seed)?;
        let header = TranscriptHeader {
            pack: pack.id().to_string(),
            pack_version: pack.version().to_string(),
            seed: spec.seed,
            profile: spec.profile,
            ethical_profile: engine.state().ethical_profile,
        };
        let mut session = Session {
            id: spec.id,
            seed: spec.seed,
            profile: spec.profile,
            created_at: spec.created_at,
            engine,
            header,
            entries: Vec::new(),
            writer: None,
            persisted: 0,
        };
        let messages = session.run_agent()?;
        Ok((session, messages))
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn profile(&self) -> ProfileChoice {
        self.profile
    }

    pub fn created_at(&self) -> SystemTime {
        self.created_at
    }

    pub fn state(&self) -> &InformationState {
        self.engine.state()
    }

    pub fn engine(&self) -> &Engine {
        &self.engine
    }

    pub fn pending_question(&self) -> Option<&str> {
        self.engine.state().pending_question.as_deref()
    }

    pub fn is_ended(&self) -> bool {
        self.engine.is_complete()
    }

    pub fn digest(&self) -> String {
        self.engine.digest()
    }

    pub fn header(&self) -> &TranscriptHeader {
        &self.header
    }

    pub fn entries(&self) -> &[TranscriptEntry] {
        &self.entries
    }

    pub fn transcript(&self) -> Transcript {
        Transcript {
            header: self.header.clone(),
            entries: self.entries.clone(),
        }
    }

    /// Applies the user's answer and runs the agent to its next question or
    /// to the end. A rejected option leaves the session untouched.
    pub fn submit_choice(&mut self, option: &str) -> Result<Vec<ServerMessage>, SessionError> {
        if self.is_ended() {
            return Err(SessionError::Ended(self.id.clone()));
        }
        let choice = self.engine.apply_user_reply(option).map_err(|e| match e {
            DialogueError::Protocol(m) => SessionError::StaleOption(m),
            other => SessionError::Dialogue(other),
        })?;
        let seq = self.entries.len() as u64;
        self.entries
            .push(TranscriptEntry::user(seq, choice, self.engine.digest()));
        self.run_agent()
    }

    fn run_agent(&mut self) -> Result<Vec<ServerMessage>, SessionError> {
        let mut out = Vec::new();
        while let Some(act) = self.engine.next_act()? {
            let seq = self.entries.len() as u64;
            out.push(ServerMessage::utterance(&self.id, seq, &act));
            self.entries
                .push(TranscriptEntry::agent(seq, act, self.engine.digest()));
        }
        if self.is_ended() {
            out.push(ServerMessage::End {
                session: self.id.clone(),
                summary: Summary::of(self.engine.state()),
            });
        }
        Ok(out)
    }

    /// Sends the transcript to `writer` from now on, writing everything
    /// recorded so far.
    pub fn attach_writer(&mut self, writer: TranscriptWriter) -> Result<(), SessionError> {
        self.writer = Some(writer);
        self.persisted = 0;
        self.persist()
    }

    /// Appends the lines not yet on disk. After a failed write the next call
    /// retries from the first missing line.
    pub fn persist(&mut self) -> Result<(), SessionError> {
        let Some(writer) = self.writer.as_mut() else {
            return Ok(());
        };
        if self.persisted == 0 {
            writer.append(&Transcript::header_line(&self.header))?;
            self.persisted = 1;
        }
        while self.persisted - 1 < self.entries.len() {
            writer.append(&Transcript::entry_line(&self.entries[self.persisted - 1]))?;
            self.persisted += 1;
        }
        Ok(())
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum ReplayError {
    #[error("transcript was recorded with pack {recorded}, replaying with {given}")]
    PackMismatch { recorded: String, given: String },
    #[error("replay diverged at seq {seq}")]
    Diverged { seq: u64 },
    #[error("replay produced {replayed} entries, transcript has {recorded}")]
    Length { recorded: usize, replayed: usize },
    #[error("ethical profile differs from the recorded one")]
    Profile,
    #[error("replay failed at seq {seq}: {message}")]
    Engine { seq: u64, message: String },
}

/// Re-runs the recorded seed, profile and choices and checks that every
/// entry, digest included, comes out the same.
pub fn replay(pack: Arc<ContentPack>, transcript: &Transcript) -> Result<(), ReplayError> {
    let h = &transcript.header;
    if h.pack != pack.id() || h.pack_version != pack.version() {
        return Err(ReplayError::PackMismatch {
            recorded: format!("{}@{}", h.pack, h.pack_version),
            given: format!("{}@{}", pack.id(), pack.version()),
        });
    }
    let spec = SessionSpec {
        id: "replay".into(),
        seed: h.seed,
        profile: h.profile,
        created_at: SystemTime::UNIX_EPOCH,
    };
    let engine_err = |seq: usize, e: SessionError| ReplayError::Engine {
        seq: seq as u64,
        message: e.to_string(),
    };
    let (mut session, _) = Session::start(pack, spec).map_err(|e| engine_err(0, e))?;
    if session.header.ethical_profile != h.ethical_profile {
        return Err(ReplayError::Profile);
    }
    for option in transcript.choices() {
        let at = session.entries.len();
        session.submit_choice(option).map_err(|e| engine_err(at, e))?;
    }
    for (recorded, replayed) in transcript.entries.iter().zip(&session.entries) {
        if recorded != replayed {
            return Err(ReplayError::Diverged { seq: recorded.seq });
        }
    }
    if transcript.entries.len() != session.entries.len() {
        return Err(ReplayError::Length {
            recorded: transcript.entries.len(),
            replayed: session.entries.len(),
        });
    }
    Ok(())
}
