//! Messages exchanged over the `/session` WebSocket, one JSON object per frame.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::dialogue::{DialogueAct, InformationState, OptionView, ProfileChoice};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ClientMessage {
    Start {
        pack: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        seed: Option<u64>,
        profile: ProfileChoice,
    },
    Choice {
        session: String,
        option: String,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ServerMessage {
    Utterance {
        session: String,
        seq: u64,
        function: String,
        scene: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        technique: Option<String>,
        text: String,
        options: Vec<OptionView>,
    },
    End {
        session: String,
        summary: Summary,
    },
    Error {
        code: String,
        message: String,
    },
}

impl ServerMessage {
    pub fn utterance(session: &str, seq: u64, act: &DialogueAct) -> Self {
        ServerMessage::Utterance {
            session: session.to_string(),
            seq,
            function: act.function.as_str().to_string(),
            scene: act.scene.clone(),
            technique: act.technique.map(|t| t.as_str().to_string()),
            text: act.utterance.clone(),
            options: act.options.clone(),
        }
    }

    pub fn error(code: ErrorCode, message: impl Into<String>) -> Self {
        ServerMessage::Error {
            code: code.as_str().to_string(),
            message: message.into(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("wire messages serialize")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub per_topic: BTreeMap<String, TopicSummary>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TopicSummary {
    pub knowledge: String,
    pub intention: String,
}

impl Summary {
    pub fn of(state: &InformationState) -> Self {
        Summary {
            per_topic: state
                .topic_states
                .iter()
                .map(|(topic, ts)| {
                    (
                        topic.clone(),
                        TopicSummary {
                            knowledge: ts.knowledge.as_str().to_string(),
                            intention: ts.intention.as_str().to_string(),
                        },
                    )
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorCode {
    BadRequest,
    UnknownPack,
    UnknownSession,
    StaleOption,
    Busy,
    Storage,
    Internal,
}

impl ErrorCode {
    pub fn as_str(self) -> &'static str {
        match self {
            ErrorCode::BadRequest => "bad_request",
            ErrorCode::UnknownPack => "unknown_pack",
            ErrorCode::UnknownSession => "unknown_session",
            ErrorCode::StaleOption => "stale_option",
            ErrorCode::Busy => "busy",
            ErrorCode::Storage => "storage",
            ErrorCode::Internal => "internal",
        }
    }
}
