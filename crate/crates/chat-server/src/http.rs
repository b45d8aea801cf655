//! Socket adapter: websocket frames on `/ws` plus the experimenter console
//! endpoints `POST /sessions` and `GET /sessions/{id}/export`.

use std::io;
use std::path::PathBuf;
use std::sync::Arc;
use std::time::Duration;

use axum::body::Bytes;
use axum::extract::ws::{Message as WsMessage, WebSocket, WebSocketUpgrade};
use axum::extract::{Path, Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use futures::{SinkExt, StreamExt};
use serde::Deserialize;
use serde_json::json;
use tokio::net::TcpListener;
use tokio::sync::mpsc::{unbounded_channel, UnboundedSender};

use crate::config::SessionConfig;
use crate::protocol::{parse_client_frame, ClientFrame, ServerFrame};
use crate::server::ChatServer;
use crate::ChatError;

#[derive(Debug, Clone)]
pub struct AppState {
    pub server: Arc<ChatServer>,
    /// Closed rooms are written here, and rewritten when answers arrive.
    pub export_dir: Option<PathBuf>,
}

impl AppState {
    fn persist(&self, room: &str) {
        let Some(dir) = &self.export_dir else { return };
        match self.server.export_log(room) {
            Ok(log) => match log.write_to(dir) {
                Ok((tsv, _)) => log::info!("wrote {}", tsv.display()),
                Err(e) => log::error!("exporting {room}: {e}"),
            },
            Err(e) => log::error!("exporting {room}: {e}"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ServeOptions {
    pub tick: Duration,
    pub export_dir: Option<PathBuf>,
}

impl Default for ServeOptions {
    fn default() -> Self {
        Self {
            tick: Duration::from_secs(1),
            export_dir: None,
        }
    }
}

pub fn status_of(e: &ChatError) -> StatusCode {
    match e {
        ChatError::InvalidConfig(_) | ChatError::Validation(_) => StatusCode::BAD_REQUEST,
        ChatError::UnknownRoom(_) => StatusCode::NOT_FOUND,
        ChatError::NotAMember(_) => StatusCode::FORBIDDEN,
        ChatError::Resource(_) => StatusCode::INTERNAL_SERVER_ERROR,
        _ => StatusCode::CONFLICT,
    }
}

fn error_response(e: &ChatError) -> Response {
    (status_of(e), Json(ServerFrame::error(e))).into_response()
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/sessions", post(create_session))
        .route("/sessions/{id}/export", get(export))
        .route("/ws", get(ws_upgrade))
        .with_state(state)
}

async fn create_session(State(app): State<AppState>, body: Bytes) -> Response {
    let config: SessionConfig = match serde_json::from_slice(&body) {
        Ok(c) => c,
        Err(e) => return error_response(&ChatError::InvalidConfig(e.to_string())),
    };
    match app.server.create_session(&config) {
        Ok(room) => (StatusCode::CREATED, Json(json!({ "room": room }))).into_response(),
        Err(e) => error_response(&e),
    }
}

#[derive(Debug, Deserialize)]
struct ExportQuery {
    format: Option<String>,
}

/// `?format=tsv` or `?format=json` return one file; otherwise both in one
/// JSON object `{"room", "tsv", "json"}`.
async fn export(State(app): State<AppState>, Path(id): Path<String>, Query(q): Query<ExportQuery>) -> Response {
    let log = match app.server.export_log(&id) {
        Ok(l) => l,
        Err(e) => return error_response(&e),
    };
    match q.format.as_deref() {
        Some("tsv") => ([(header::CONTENT_TYPE, "text/tab-separated-values; charset=utf-8")], log.to_tsv()).into_response(),
        Some("json") => ([(header::CONTENT_TYPE, "application/json")], log.to_json()).into_response(),
        None => Json(json!({ "room": id, "tsv": log.to_tsv(), "json": log.meta })).into_response(),
        Some(other) => error_response(&ChatError::Validation(format!("unknown format {other:?}"))),
    }
}

async fn ws_upgrade(ws: WebSocketUpgrade, State(app): State<AppState>) -> Response {
    ws.on_upgrade(move |socket| connection(app, socket))
}

async fn connection(app: AppState, socket: WebSocket) {
    let (mut outgoing, mut incoming) = socket.split();
    let (tx, mut rx) = unbounded_channel::<ServerFrame>();
    let writer = tokio::spawn(async move {
        while let Some(f) = rx.recv().await {
            if outgoing.send(WsMessage::Text(f.to_json().into())).await.is_err() {
                break;
            }
        }
    });
    let mut me: Option<(String, String)> = None;
    while let Some(Ok(msg)) = incoming.next().await {
        let text = match msg {
            WsMessage::Text(t) => t.to_string(),
            WsMessage::Close(_) => break,
            _ => continue,
        };
        let reply = match parse_client_frame(&text) {
            Ok(frame) => handle(&app, &tx, &mut me, frame).await,
            Err(e) => Some(e),
        };
        if let Some(f) = reply {
            let _ = tx.send(f);
        }
    }
    // rooms drop this connection's sink on their next failed send
    writer.abort();
}

fn who(me: &Option<(String, String)>, room: &str, name: Option<String>) -> Result<String, ServerFrame> {
    match me {
        Some((r, n)) if r == room && name.as_ref().is_none_or(|x| x == n) => Ok(n.clone()),
        _ => Err(ServerFrame::error_code("NotJoined", "join the room first")),
    }
}

async fn handle(
    app: &AppState,
    tx: &UnboundedSender<ServerFrame>,
    me: &mut Option<(String, String)>,
    frame: ClientFrame,
) -> Option<ServerFrame> {
    let server = &app.server;
    let result: Result<Option<ServerFrame>, ServerFrame> = match frame {
        ClientFrame::Join { room, name } => {
            if me.is_some() {
                Err(ServerFrame::error_code("AlreadyJoined", "one member per connection"))
            } else {
                let name = name.trim().to_string();
                match server.join(&room, &name, Some(tx.clone())) {
                    Ok(_) => {
                        *me = Some((room, name));
                        Ok(None)
                    }
                    Err(e) => Err(ServerFrame::error(&e)),
                }
            }
        }
        ClientFrame::Say { room, text, name } => match who(me, &room, name) {
            Ok(n) => {
                let server = server.clone();
                // replies may sleep for the typing delay
                let res = tokio::task::spawn_blocking(move || server.post_message(&room, &n, &text)).await;
                match res {
                    Ok(Ok(_)) => Ok(None),
                    Ok(Err(e)) => Err(ServerFrame::error(&e)),
                    Err(e) => Err(ServerFrame::error_code("Internal", e.to_string())),
                }
            }
            Err(e) => Err(e),
        },
        ClientFrame::Submit { room, answers, name } => match who(me, &room, name) {
            Ok(n) => match server.submit_questionnaire(&room, &n, &answers) {
                Ok(()) => {
                    app.persist(&room);
                    Ok(Some(ServerFrame::Ack { room }))
                }
                Err(e) => Err(ServerFrame::error(&e)),
            },
            Err(e) => Err(e),
        },
        ClientFrame::Watch { room } => server.watch(&room, tx.clone()).map(|_| None).map_err(|e| ServerFrame::error(&e)),
        ClientFrame::Wait { .. } => Err(ServerFrame::error_code("Unsupported", "wait is only available on stdio")),
    };
    result.unwrap_or_else(Some)
}

/// Serves until the listener fails. A background task ticks every room
/// once per `opts.tick`.
pub async fn serve(server: Arc<ChatServer>, listener: TcpListener, opts: ServeOptions) -> io::Result<()> {
    let app = AppState {
        server,
        export_dir: opts.export_dir,
    };
    let ticker = app.clone();
    tokio::spawn(async move {
        let mut interval = tokio::time::interval(opts.tick);
        loop {
            interval.tick().await;
            for room in ticker.server.tick_all() {
                log::info!("{room} closed");
                ticker.persist(&room);
            }
        }
    });
    axum::serve(listener, router(app)).await
}
