//! Chat rooms where humans and the dialogue system share one floor.
//!
//! [`ChatServer`] owns the rooms; every room serializes its own events and
//! writes a [`SessionLog`] that is sealed once the bot has said goodbye.
//! Transports are thin adapters over the server: [`stdio`] for scripted
//! runs and [`http`] for websocket clients and the experimenter console.

pub mod clock;
pub mod config;
pub mod http;
pub mod protocol;
pub mod questionnaire;
pub mod resources;
pub mod room;
pub mod server;
pub mod session_log;
pub mod stdio;

use thiserror::Error;

pub use clock::{Clock, ManualClock, SystemClock};
pub use config::{ScenarioKind, SessionConfig};
pub use protocol::{ClientFrame, ServerFrame};
pub use questionnaire::ItemSet;
pub use resources::Resources;
pub use room::{BotLine, Room, RoomState};
pub use server::ChatServer;
pub use session_log::{LogReadError, Message, SessionLog, SessionMeta};

#[derive(Debug, Error)]
pub enum ChatError {
    #[error("invalid session config: {0}")]
    InvalidConfig(String),
    #[error("no room {0:?}")]
    UnknownRoom(String),
    #[error("room is full")]
    RoomFull,
    #[error("name {0:?} is already taken")]
    NameTaken(String),
    #[error("room is closed")]
    RoomClosed,
    #[error("room is not running")]
    RoomNotRunning,
    #[error("room is not closed yet")]
    RoomNotClosed,
    #[error("{0:?} is not a member of this room")]
    NotAMember(String),
    #[error("{0}")]
    Validation(String),
    #[error("loading resources: {0}")]
    Resource(String),
}

impl ChatError {
    /// Error code carried by `error` frames and HTTP error bodies.
    pub fn code(&self) -> &'static str {
        match self {
            Self::InvalidConfig(_) => "InvalidConfig",
            Self::UnknownRoom(_) => "UnknownRoom",
            Self::RoomFull => "RoomFull",
            Self::NameTaken(_) => "NameTaken",
            Self::RoomClosed => "RoomClosed",
            Self::RoomNotRunning => "RoomNotRunning",
            Self::RoomNotClosed => "RoomNotClosed",
            Self::NotAMember(_) => "NotAMember",
            Self::Validation(_) => "ValidationError",
            Self::Resource(_) => "ResourceError",
        }
    }
}
