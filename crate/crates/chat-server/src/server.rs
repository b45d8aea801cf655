use std::collections::BTreeMap;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex, MutexGuard, RwLock};
use std::time::Duration;

use serde_json::Value;

use crate::clock::Clock;
use crate::config::SessionConfig;
use crate::resources::Resources;
use crate::room::{BotLine, Room, RoomState, Sink};
use crate::session_log::{Message, SessionLog};
use crate::ChatError;

/// All rooms of one server. Each room sits behind its own mutex, so events
/// within a room are handled one at a time in arrival order while rooms
/// proceed independently.
#[derive(Debug)]
pub struct ChatServer {
    resources: Arc<Resources>,
    clock: Arc<dyn Clock>,
    rooms: RwLock<BTreeMap<String, Arc<Mutex<Room>>>>,
    next_id: AtomicU64,
}

impl ChatServer {
    pub fn new(resources: Arc<Resources>, clock: Arc<dyn Clock>) -> Self {
        Self {
            resources,
            clock,
            rooms: RwLock::new(BTreeMap::new()),
            next_id: AtomicU64::new(1),
        }
    }

    pub fn clock(&self) -> &Arc<dyn Clock> {
        &self.clock
    }

    pub fn resources(&self) -> &Arc<Resources> {
        &self.resources
    }

    /// Creates a waiting room and returns its id (`room-1`, `room-2`, ...).
    pub fn create_session(&self, config: &SessionConfig) -> Result<String, ChatError> {
        let mut rooms = self.rooms.write().unwrap();
        let id = format!("room-{}", self.next_id.load(Ordering::SeqCst));
        let room = Room::new(id.clone(), config, &self.resources, self.clock.clone())?;
        self.next_id.fetch_add(1, Ordering::SeqCst);
        rooms.insert(id.clone(), Arc::new(Mutex::new(room)));
        log::info!("created {id} ({})", config.scenario_kind);
        Ok(id)
    }

    pub fn room_ids(&self) -> Vec<String> {
        self.rooms.read().unwrap().keys().cloned().collect()
    }

    pub fn room(&self, id: &str) -> Result<Arc<Mutex<Room>>, ChatError> {
        self.rooms
            .read()
            .unwrap()
            .get(id)
            .cloned()
            .ok_or_else(|| ChatError::UnknownRoom(id.to_string()))
    }

    fn with_room<T>(&self, id: &str, f: impl FnOnce(&mut Room) -> T) -> Result<T, ChatError> {
        let room = self.room(id)?;
        let mut guard: MutexGuard<Room> = room.lock().unwrap_or_else(|p| p.into_inner());
        Ok(f(&mut guard))
    }

    pub fn join(&self, room: &str, name: &str, sink: Option<Sink>) -> Result<Vec<Message>, ChatError> {
        self.with_room(room, |r| r.join(name, sink))?
    }

    pub fn watch(&self, room: &str, sink: Sink) -> Result<(), ChatError> {
        self.with_room(room, |r| r.watch(sink))
    }

    pub fn post_message(&self, room: &str, name: &str, text: &str) -> Result<Vec<BotLine>, ChatError> {
        self.with_room(room, |r| r.post(name, text))?
    }

    /// True if this call closed the room.
    pub fn tick(&self, room: &str) -> Result<bool, ChatError> {
        self.with_room(room, Room::tick)
    }

    /// Ticks every room; returns the ids closed by this call.
    pub fn tick_all(&self) -> Vec<String> {
        self.room_ids()
            .into_iter()
            .filter(|id| self.tick(id).unwrap_or(false))
            .collect()
    }

    pub fn state(&self, room: &str) -> Result<RoomState, ChatError> {
        self.with_room(room, |r| r.state())
    }

    pub fn remaining(&self, room: &str) -> Result<Option<Duration>, ChatError> {
        self.with_room(room, |r| r.remaining())
    }

    pub fn export_log(&self, room: &str) -> Result<SessionLog, ChatError> {
        self.with_room(room, |r| r.export())?
    }

    pub fn submit_questionnaire(
        &self,
        room: &str,
        name: &str,
        answers: &BTreeMap<String, Value>,
    ) -> Result<(), ChatError> {
        self.with_room(room, |r| r.submit(name, answers))?
    }
}
