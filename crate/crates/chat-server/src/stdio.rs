//! Line-oriented adapter: client frames on the input, server frames on the
//! output, one JSON object per line. One stream may speak for several
//! members (`say` then carries `name`), and every room it touches is
//! watched, so each broadcast is printed exactly once.
//!
//! With a [`ManualClock`], `{"op":"wait","secs":N}` moves time forward and
//! the transcript is reproducible byte for byte.

use std::collections::{BTreeMap, BTreeSet};
use std::io::{self, BufRead, Write};
use std::sync::Arc;

use tokio::sync::mpsc::{unbounded_channel, UnboundedReceiver};

use crate::clock::ManualClock;
use crate::protocol::{parse_client_frame, ClientFrame, ServerFrame};
use crate::server::ChatServer;
use crate::ChatError;

pub struct StdioSession<'a> {
    server: &'a ChatServer,
    manual: Option<Arc<ManualClock>>,
    tx: crate::room::Sink,
    rx: UnboundedReceiver<ServerFrame>,
    watched: BTreeSet<String>,
    speakers: BTreeMap<String, Vec<String>>,
}

impl<'a> StdioSession<'a> {
    /// `manual` must be the clock the server was built with, if any.
    pub fn new(server: &'a ChatServer, manual: Option<Arc<ManualClock>>) -> Self {
        let (tx, rx) = unbounded_channel();
        Self {
            server,
            manual,
            tx,
            rx,
            watched: BTreeSet::new(),
            speakers: BTreeMap::new(),
        }
    }

    fn ensure_watch(&mut self, room: &str) -> Result<(), ChatError> {
        if !self.watched.contains(room) {
            self.server.watch(room, self.tx.clone())?;
            self.watched.insert(room.to_string());
        }
        Ok(())
    }

    fn speaker(&self, room: &str, name: Option<String>) -> Result<String, ServerFrame> {
        let joined = self.speakers.get(room).map(Vec::as_slice).unwrap_or_default();
        match (name, joined) {
            (Some(n), _) if joined.contains(&n) => Ok(n),
            (None, [only]) => Ok(only.clone()),
            (None, []) | (Some(_), _) => Err(ServerFrame::error_code("NotJoined", "join the room first")),
            (None, _) => Err(ServerFrame::error_code("NotJoined", "several members joined; say which with \"name\"")),
        }
    }

    /// Handles one client frame; returns the frames to print, in order.
    pub fn handle(&mut self, frame: ClientFrame) -> Vec<ServerFrame> {
        let mut out = Vec::new();
        let result: Result<(), ServerFrame> = (|| {
            let chat = |e: ChatError| ServerFrame::error(&e);
            match frame {
                ClientFrame::Join { room, name } => {
                    self.ensure_watch(&room).map_err(chat)?;
                    let name = name.trim().to_string();
                    // the room's own frames arrive through the watch channel,
                    // so the joined frame is written before draining it
                    self.server.join(&room, &name, None).map_err(chat)?;
                    let (members, duration) = {
                        let r = self.server.room(&room).map_err(chat)?;
                        let r = r.lock().unwrap();
                        (r.members().to_vec(), r.config().duration_secs())
                    };
                    self.speakers.entry(room.clone()).or_default().push(name.clone());
                    out.push(ServerFrame::Joined {
                        room,
                        name,
                        members,
                        duration,
                    });
                }
                ClientFrame::Say { room, text, name } => {
                    let who = self.speaker(&room, name)?;
                    self.server.post_message(&room, &who, &text).map_err(chat)?;
                }
                ClientFrame::Submit { room, answers, name } => {
                    let who = self.speaker(&room, name)?;
                    self.server.submit_questionnaire(&room, &who, &answers).map_err(chat)?;
                    out.push(ServerFrame::Ack { room });
                }
                ClientFrame::Watch { room } => self.ensure_watch(&room).map_err(chat)?,
                ClientFrame::Wait { secs } => {
                    let clock = self
                        .manual
                        .as_ref()
                        .ok_or_else(|| ServerFrame::error_code("Unsupported", "wait needs a manual clock"))?;
                    clock.advance(std::time::Duration::from_secs(secs));
                    self.server.tick_all();
                }
            }
            Ok(())
        })();
        if let Err(e) = result {
            out.push(e);
        }
        while let Ok(f) = self.rx.try_recv() {
            out.push(f);
        }
        out
    }

    /// Moves a manual clock to the end of every watched running room so
    /// that each one says goodbye.
    pub fn finish(&mut self) -> Vec<ServerFrame> {
        if let Some(clock) = &self.manual {
            for room in &self.watched {
                if let Ok(Some(rem)) = self.server.remaining(room) {
                    clock.advance(rem);
                    self.server.tick(room).ok();
                }
            }
        }
        let mut out = Vec::new();
        while let Ok(f) = self.rx.try_recv() {
            out.push(f);
        }
        out
    }
}

/// Runs frames from `input` to EOF, writing server frames to `output`.
/// With `finish` set, running rooms are timed out at EOF.
pub fn run_stdio<R: BufRead, W: Write>(
    server: &ChatServer,
    manual: Option<Arc<ManualClock>>,
    input: R,
    output: &mut W,
    finish: bool,
) -> io::Result<()> {
    let mut session = StdioSession::new(server, manual);
    let write = |frames: Vec<ServerFrame>, output: &mut W| -> io::Result<()> {
        for f in frames {
            writeln!(output, "{}", f.to_json())?;
        }
        output.flush()
    };
    for line in input.lines() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let frames = match parse_client_frame(line) {
            Ok(f) => session.handle(f),
            Err(e) => vec![e],
        };
        write(frames, output)?;
    }
    if finish {
        let frames = session.finish();
        write(frames, output)?;
    }
    Ok(())
}
