//! Session registry behind the `/session` endpoint.

use std::collections::{BTreeMap, HashMap};
use std::path::PathBuf;
use std::sync::{Arc, Mutex, TryLockError};
use std::time::SystemTime;

use persuade_core::dialogue::ProfileChoice;
use persuade_core::pack::ContentPack;
use persuade_core::session::{
    ClientMessage, ErrorCode, ServerMessage, Session, SessionError, SessionSpec, TranscriptWriter,
};

#[derive(Debug)]
pub struct Service {
    packs: BTreeMap<String, Arc<ContentPack>>,
    sessions: Mutex<HashMap<String, Arc<Mutex<Session>>>>,
    transcripts: Option<PathBuf>,
}

impl Service {
    pub fn new(packs: impl IntoIterator<Item = ContentPack>, transcripts: Option<PathBuf>) -> Self {
        Self {
            packs: packs
                .into_iter()
                .map(|p| (p.id().to_string(), Arc::new(p)))
                .collect(),
            sessions: Mutex::new(HashMap::new()),
            transcripts,
        }
    }

    pub fn pack_ids(&self) -> impl Iterator<Item = &str> {
        self.packs.keys().map(String::as_str)
    }

    /// Live session handle, for inspection.
    pub fn session(&self, id: &str) -> Option<Arc<Mutex<Session>>> {
        self.sessions.lock().expect("registry lock").get(id).cloned()
    }

    pub fn live_sessions(&self) -> usize {
        self.sessions.lock().expect("registry lock").len()
    }

    /// Handles one frame's text. Always answers with at least one message.
    pub fn handle_text(&self, text: &str) -> Vec<ServerMessage> {
        match serde_json::from_str::<ClientMessage>(text) {
            Ok(m) => self.handle(m),
            Err(e) => vec![ServerMessage::error(ErrorCode::BadRequest, e.to_string())],
        }
    }

    pub fn handle(&self, message: ClientMessage) -> Vec<ServerMessage> {
        match message {
            ClientMessage::Start {
                pack,
                seed,
                profile,
            } => self.start(&pack, seed, profile),
            ClientMessage::Choice { session, option } => self.choice(&session, &option),
        }
    }

    fn start(&self, pack_id: &str, seed: Option<u64>, profile: ProfileChoice) -> Vec<ServerMessage> {
        let Some(pack) = self.packs.get(pack_id) else {
            return vec![ServerMessage::error(
                ErrorCode::UnknownPack,
                format!("no pack {pack_id}"),
            )];
        };
        let id = new_session_id();
        let spec = SessionSpec {
            id: id.clone(),
            seed: seed.unwrap_or_else(rand::random),
            profile,
            created_at: SystemTime::now(),
        };
        let (mut session, messages) = match Session::start(pack.clone(), spec) {
            Ok(started) => started,
            Err(e) => return vec![e.to_message()],
        };
        if let Some(dir) = &self.transcripts {
            let attached = TranscriptWriter::create(dir.join(format!("{id}.jsonl")))
                .map_err(SessionError::from)
                .and_then(|w| session.attach_writer(w));
            if let Err(e) = attached {
                return vec![e.to_message()];
            }
        }
        if !session.is_ended() {
            self.sessions
                .lock()
                .expect("registry lock")
                .insert(id, Arc::new(Mutex::new(session)));
        }
        messages
    }

    fn choice(&self, id: &str, option: &str) -> Vec<ServerMessage> {
        let Some(handle) = self.session(id) else {
            return vec![ServerMessage::error(
                ErrorCode::UnknownSession,
                format!("no live session {id}"),
            )];
        };
        let mut session = match handle.try_lock() {
            Ok(s) => s,
            Err(TryLockError::WouldBlock) => {
                return vec![ServerMessage::error(
                    ErrorCode::Busy,
                    format!("session {id} is handling another message"),
                )]
            }
            Err(TryLockError::Poisoned(_)) => {
                return vec![ServerMessage::error(
                    ErrorCode::Internal,
                    format!("session {id} is unusable after an earlier failure"),
                )]
            }
        };
        let mut messages = match session.submit_choice(option) {
            Ok(m) => m,
            Err(e) => return vec![e.to_message()],
        };
        if let Err(e) = session.persist() {
            messages.push(e.to_message());
        }
        if session.is_ended() {
            drop(session);
            self.sessions.lock().expect("registry lock").remove(id);
        }
        messages
    }
}

fn new_session_id() -> String {
    format!("{:032x}", rand::random::<u128>())
}
