use std::collections::BTreeMap;
use std::sync::Arc;
use std::time::Duration;

use affect_core::control::{Action, Bot, BotUtterance, RoleAssignment, ScenarioKit, Target};
use affect_core::perception::{Perceiver, Utterance};
use chrono::{DateTime, Utc};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use tokio::sync::mpsc::UnboundedSender;

use crate::clock::Clock;
use crate::config::SessionConfig;
use crate::protocol::ServerFrame;
use crate::questionnaire::{Answers, ItemSet};
use crate::resources::Resources;
use crate::session_log::{truncate_secs, Message, SessionLog, SessionMeta};
use crate::ChatError;

pub type Sink = UnboundedSender<ServerFrame>;

const MAX_NAME_CHARS: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RoomState {
    Waiting,
    Running,
    Closed,
}

/// A line the bot put on the floor, with the routing facts that the
/// transcript itself does not show.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BotLine {
    pub message: Message,
    pub target: Target,
    pub action: Option<Action>,
    /// Human whose utterance the line answers; `None` for opening and farewell.
    pub reply_to: Option<String>,
}

#[derive(Debug)]
pub struct Room {
    id: String,
    config: SessionConfig,
    kit: Arc<ScenarioKit>,
    perceiver: Perceiver,
    items: ItemSet,
    clock: Arc<dyn Clock>,
    members: Vec<String>,
    state: RoomState,
    started_at: Option<DateTime<Utc>>,
    closed_at: Option<DateTime<Utc>>,
    messages: Vec<Message>,
    roles: RoleAssignment,
    bot: Option<Bot>,
    questionnaire: BTreeMap<String, Answers>,
    subscribers: Vec<Sink>,
    bot_lines: Vec<BotLine>,
}

impl Room {
    pub fn new(
        id: impl Into<String>,
        config: &SessionConfig,
        resources: &Resources,
        clock: Arc<dyn Clock>,
    ) -> Result<Self, ChatError> {
        config.validate()?;
        let mut kit = resources.kit(config.scenario_kind).clone();
        if kit.profile(config.profile).is_none() {
            return Err(ChatError::InvalidConfig(format!(
                "scenario {} has no {} profile",
                config.scenario_kind, config.profile
            )));
        }
        let config = config.resolved(&kit);
        let bot_name = config.bot_name.clone().unwrap_or_default();
        if bot_name != kit.bot_name {
            let mut renamed = (*kit).clone();
            renamed.bot_name = bot_name;
            kit = Arc::new(renamed);
        }
        Ok(Self {
            id: id.into(),
            items: resources.items(config.scenario_kind).clone(),
            config,
            kit,
            perceiver: resources.perceiver.clone(),
            clock,
            members: Vec::new(),
            state: RoomState::Waiting,
            started_at: None,
            closed_at: None,
            messages: Vec::new(),
            roles: RoleAssignment::default(),
            bot: None,
            questionnaire: BTreeMap::new(),
            subscribers: Vec::new(),
            bot_lines: Vec::new(),
        })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    /// The config with all defaults resolved.
    pub fn config(&self) -> &SessionConfig {
        &self.config
    }

    pub fn bot_name(&self) -> &str {
        &self.kit.bot_name
    }

    pub fn state(&self) -> RoomState {
        self.state
    }

    pub fn members(&self) -> &[String] {
        &self.members
    }

    pub fn roles(&self) -> &RoleAssignment {
        &self.roles
    }

    pub fn messages(&self) -> &[Message] {
        &self.messages
    }

    pub fn bot_lines(&self) -> &[BotLine] {
        &self.bot_lines
    }

    pub fn started_at(&self) -> Option<DateTime<Utc>> {
        self.started_at
    }

    fn duration(&self) -> Duration {
        Duration::from_secs(self.config.duration_secs())
    }

    fn elapsed(&self) -> Duration {
        match self.started_at {
            Some(s) => (self.clock.now() - s).to_std().unwrap_or_default(),
            None => Duration::ZERO,
        }
    }

    /// Time left before the farewell, while running.
    pub fn remaining(&self) -> Option<Duration> {
        (self.state == RoomState::Running).then(|| self.duration().saturating_sub(self.elapsed()))
    }

    fn send(&mut self, frame: &ServerFrame) {
        self.subscribers.retain(|s| s.send(frame.clone()).is_ok());
    }

    fn stamp(&self) -> DateTime<Utc> {
        let now = truncate_secs(self.clock.now());
        match self.messages.last() {
            Some(m) if m.timestamp > now => m.timestamp,
            _ => now,
        }
    }

    fn emit(&mut self, sender: &str, text: &str) -> Message {
        let m = Message::new(self.stamp(), sender, text);
        self.messages.push(m.clone());
        let frame = ServerFrame::msg(&self.id, &m);
        self.send(&frame);
        m
    }

    fn emit_bot(&mut self, u: BotUtterance, reply_to: Option<&str>) -> BotLine {
        if self.config.typing_delay_ms_per_char > 0 && reply_to.is_some() {
            let ms = self.config.typing_delay_ms_per_char * u.text.chars().count() as u64;
            self.clock.sleep(Duration::from_millis(ms));
        }
        let sender = self.kit.bot_name.clone();
        let message = self.emit(&sender, &u.text);
        let line = BotLine {
            message,
            target: u.target,
            action: u.action,
            reply_to: reply_to.map(str::to_string),
        };
        self.bot_lines.push(line.clone());
        line
    }

    fn check_name(&self, name: &str) -> Result<(), ChatError> {
        if name.is_empty() || name.chars().count() > MAX_NAME_CHARS || name.chars().any(char::is_control) {
            return Err(ChatError::Validation(format!(
                "display names are 1 to {MAX_NAME_CHARS} printable characters"
            )));
        }
        let taken = name.eq_ignore_ascii_case(&self.kit.bot_name)
            || self.members.iter().any(|m| m.eq_ignore_ascii_case(name));
        if taken {
            return Err(ChatError::NameTaken(name.to_string()));
        }
        Ok(())
    }

    /// Adds a human. The room starts once the expected number has joined;
    /// returns the messages posted before this member arrived.
    pub fn join(&mut self, name: &str, sink: Option<Sink>) -> Result<Vec<Message>, ChatError> {
        let name = name.trim();
        match self.state {
            RoomState::Closed => return Err(ChatError::RoomClosed),
            _ if self.members.len() >= self.config.humans() => return Err(ChatError::RoomFull),
            _ => {}
        }
        self.check_name(name)?;
        self.members.push(name.to_string());
        let backlog = self.messages.clone();
        if let Some(sink) = sink {
            let joined = ServerFrame::Joined {
                room: self.id.clone(),
                name: name.to_string(),
                members: self.members.clone(),
                duration: self.config.duration_secs(),
            };
            let ok = std::iter::once(joined)
                .chain(backlog.iter().map(|m| ServerFrame::msg(&self.id, m)))
                .all(|f| sink.send(f).is_ok());
            if ok {
                self.subscribers.push(sink);
            }
        }
        if self.members.len() == self.config.humans() {
            self.start()?;
        }
        Ok(backlog)
    }

    /// Read-only subscription: replays the transcript, then follows it.
    pub fn watch(&mut self, sink: Sink) {
        let ok = self
            .messages
            .iter()
            .map(|m| ServerFrame::msg(&self.id, m))
            .chain((self.state == RoomState::Closed).then(|| ServerFrame::Closed { room: self.id.clone() }))
            .all(|f| sink.send(f).is_ok());
        if ok && self.state != RoomState::Closed {
            self.subscribers.push(sink);
        }
    }

    fn start(&mut self) -> Result<(), ChatError> {
        self.roles = if self.config.humans() == 2 {
            // role draw on its own stream so it does not shift the bot's draws
            let mut rng = ChaCha8Rng::seed_from_u64(self.config.seed);
            rng.set_stream(1);
            let excluded = rng.random_range(0..2);
            RoleAssignment::triadic(&self.members[1 - excluded], &self.members[excluded])
        } else {
            RoleAssignment::dyadic(&self.members[0])
        };
        let mut bot = Bot::new(
            self.kit.clone(),
            self.perceiver.clone(),
            &self.id,
            self.roles.clone(),
            self.config.profile,
            self.config.seed,
            self.duration().as_millis() as u64,
        )
        .map_err(|e| ChatError::Resource(e.to_string()))?;
        self.state = RoomState::Running;
        self.started_at = Some(self.clock.now());
        let opening = bot.opening();
        self.bot = Some(bot);
        self.emit_bot(opening, None);
        Ok(())
    }

    /// Broadcasts a human utterance and whatever the bot answers.
    pub fn post(&mut self, name: &str, text: &str) -> Result<Vec<BotLine>, ChatError> {
        self.tick();
        if self.state != RoomState::Running {
            return Err(ChatError::RoomNotRunning);
        }
        if !self.members.iter().any(|m| m == name) {
            return Err(ChatError::NotAMember(name.to_string()));
        }
        let text = text.trim();
        if text.is_empty() {
            return Err(ChatError::Validation("empty message".into()));
        }
        self.emit(name, text);
        let utterance = Utterance::new(name, text).at(self.elapsed().as_millis() as u64);
        let replies = self.bot.as_mut().map(|b| b.on_message(&utterance)).unwrap_or_default();
        Ok(replies.into_iter().map(|u| self.emit_bot(u, Some(name))).collect())
    }

    /// Sends the farewell and closes the room once the duration is up.
    /// Returns true on the call that closed it.
    pub fn tick(&mut self) -> bool {
        if self.state != RoomState::Running {
            return false;
        }
        let elapsed = self.elapsed().as_millis() as u64;
        let Some(farewell) = self.bot.as_mut().and_then(|b| b.tick(elapsed)) else {
            return false;
        };
        self.emit_bot(farewell, None);
        self.state = RoomState::Closed;
        self.closed_at = Some(truncate_secs(self.clock.now()));
        let frame = ServerFrame::Closed { room: self.id.clone() };
        self.send(&frame);
        self.subscribers.clear();
        true
    }

    /// The log as it stands, sealed or not.
    pub fn snapshot(&self) -> SessionLog {
        SessionLog {
            meta: SessionMeta {
                room: self.id.clone(),
                config: self.config.clone(),
                bot_name: self.kit.bot_name.clone(),
                roles: self.roles.roles.clone(),
                seed: self.config.seed,
                started_at: self.started_at.map(truncate_secs),
                closed_at: self.closed_at,
                questionnaire: self.questionnaire.clone(),
            },
            messages: self.messages.clone(),
        }
    }

    pub fn export(&self) -> Result<SessionLog, ChatError> {
        if self.state != RoomState::Closed {
            return Err(ChatError::RoomNotClosed);
        }
        Ok(self.snapshot())
    }

    /// Stores one member's questionnaire; accepted once, after the session.
    pub fn submit(&mut self, name: &str, answers: &BTreeMap<String, Value>) -> Result<(), ChatError> {
        if !self.members.iter().any(|m| m == name) {
            return Err(ChatError::NotAMember(name.to_string()));
        }
        if self.state != RoomState::Closed {
            return Err(ChatError::RoomNotClosed);
        }
        if self.questionnaire.contains_key(name) {
            return Err(ChatError::Validation(format!("{name} already submitted")));
        }
        let answers = self.items.validate(answers)?;
        self.questionnaire.insert(name.to_string(), answers);
        Ok(())
    }
}
