//! Wire frames: one UTF-8 JSON object per frame, tagged by `op`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::session_log::Message;
use crate::ChatError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "lowercase", deny_unknown_fields)]
pub enum ClientFrame {
    Join {
        room: String,
        name: String,
    },
    /// `name` is only needed when one stream speaks for several members.
    Say {
        room: String,
        text: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        name: Option<String>,
    },
    /// Questionnaire answers, item id to 1..7.
    Submit {
        room: String,
        answers: BTreeMap<String, Value>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        name: Option<String>,
    },
    /// Read-only subscription to a room's transcript.
    Watch {
        room: String,
    },
    /// Advances a manual clock; only honoured by the stdio adapter.
    Wait {
        secs: u64,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "lowercase")]
pub enum ServerFrame {
    Joined {
        room: String,
        name: String,
        members: Vec<String>,
        /// Session length in seconds.
        duration: u64,
    },
    Msg {
        room: String,
        ts: String,
        sender: String,
        text: String,
    },
    Closed {
        room: String,
    },
    Ack {
        room: String,
    },
    Error {
        code: String,
        message: String,
    },
}

impl ServerFrame {
    pub fn msg(room: &str, m: &Message) -> Self {
        Self::Msg {
            room: room.to_string(),
            ts: m.ts_string(),
            sender: m.sender.clone(),
            text: m.text.clone(),
        }
    }

    pub fn error(e: &ChatError) -> Self {
        Self::Error {
            code: e.code().to_string(),
            message: e.to_string(),
        }
    }

    pub fn error_code(code: &str, message: impl Into<String>) -> Self {
        Self::Error {
            code: code.to_string(),
            message: message.into(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("frame serializes")
    }
}

pub fn parse_client_frame(text: &str) -> Result<ClientFrame, ServerFrame> {
    serde_json::from_str(text).map_err(|e| ServerFrame::error_code("BadFrame", e.to_string()))
}
