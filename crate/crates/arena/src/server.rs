//! HTTP + WebSocket front end for [`SessionStore`].

use std::net::SocketAddr;
use std::path::PathBuf;

use axum::extract::ws::{Message, WebSocket, WebSocketUpgrade};
use axum::extract::{Path, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::Deserialize;
use serde_json::json;
use thue_arena_core::GameKind;
use tokio::sync::broadcast::error::RecvError;

use crate::session::{Event, SessionConfig, SessionError, SessionStore};

#[derive(Debug, Clone, Default)]
pub struct AppState {
    pub store: SessionStore,
    /// Where ended sessions are written as `<id>.json`, if anywhere.
    pub export_dir: Option<PathBuf>,
}

#[derive(Debug, Deserialize)]
pub struct CreateRequest {
    pub game: String,
    pub symbols: Option<u32>,
    pub seed: Option<u64>,
    pub budget: Option<usize>,
}

#[derive(Debug, Deserialize)]
pub struct MoveRequest {
    pub symbol: u32,
    pub mover: Option<String>,
}

pub struct ApiError(SessionError);

impl From<SessionError> for ApiError {
    fn from(e: SessionError) -> Self {
        ApiError(e)
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let status = match &self.0 {
            SessionError::UnknownSession(_) => StatusCode::NOT_FOUND,
            SessionError::Finished | SessionError::OutOfTurn(_) => StatusCode::CONFLICT,
            SessionError::SymbolOutOfRange { .. } => StatusCode::UNPROCESSABLE_ENTITY,
            SessionError::InvalidConfig(_) => StatusCode::BAD_REQUEST,
            SessionError::Invariant(_) => StatusCode::INTERNAL_SERVER_ERROR,
        };
        let body = json!({"error": {"code": self.0.code(), "message": self.0.to_string()}});
        (status, Json(body)).into_response()
    }
}

pub fn default_symbols(game: GameKind) -> u32 {
    match game {
        GameKind::Erase => 8,
        GameKind::Nonrep => 6,
    }
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/sessions", post(create_session))
        .route("/sessions/{id}", get(get_state).delete(end_session))
        .route("/sessions/{id}/moves", post(submit_move))
        .route("/sessions/{id}/events", get(events))
        .with_state(state)
}

async fn create_session(
    State(app): State<AppState>,
    Json(req): Json<CreateRequest>,
) -> Result<Response, ApiError> {
    let game: GameKind = req
        .game
        .parse()
        .map_err(|_| SessionError::InvalidConfig(format!("unknown game {:?}", req.game)))?;
    let config = SessionConfig {
        game,
        symbols: req.symbols.unwrap_or_else(|| default_symbols(game)),
        seed: req.seed.unwrap_or_else(|| uuid::Uuid::new_v4().as_u64_pair().0),
        budget: req.budget,
    };
    let (session, events) = app.store.create(config)?;
    Ok((StatusCode::CREATED, Json(json!({"session": session, "events": events}))).into_response())
}

async fn submit_move(
    State(app): State<AppState>,
    Path(id): Path<String>,
    Json(req): Json<MoveRequest>,
) -> Result<Json<serde_json::Value>, ApiError> {
    let session = app.store.get(&id)?;
    let mut s = session.lock().await;
    let events = s.submit(req.symbol, req.mover.as_deref())?;
    Ok(Json(json!({"events": events, "session": s.snapshot()})))
}

async fn get_state(
    State(app): State<AppState>,
    Path(id): Path<String>,
) -> Result<Json<serde_json::Value>, ApiError> {
    let session = app.store.get(&id)?;
    let s = session.lock().await;
    Ok(Json(json!(s.snapshot())))
}

async fn end_session(
    State(app): State<AppState>,
    Path(id): Path<String>,
) -> Result<Json<serde_json::Value>, ApiError> {
    let session = app.store.get(&id)?;
    let run = session.lock().await.finish();
    if let Some(dir) = &app.export_dir {
        let path = dir.join(format!("{id}.json"));
        let text = serde_json::to_string_pretty(&run).expect("run serializes");
        if let Err(e) = std::fs::write(&path, text) {
            eprintln!("could not write {}: {e}", path.display());
        }
    }
    Ok(Json(json!(run)))
}

async fn events(
    State(app): State<AppState>,
    Path(id): Path<String>,
    ws: WebSocketUpgrade,
) -> Result<Response, ApiError> {
    let session = app.store.get(&id)?;
    Ok(ws.on_upgrade(move |socket| async move {
        // subscribe and snapshot under the lock so nothing slips in between
        let (rx, snap) = {
            let s = session.lock().await;
            (s.subscribe(), s.snapshot())
        };
        stream_events(socket, rx, snap).await;
    }))
}

async fn stream_events(
    mut socket: WebSocket,
    mut rx: tokio::sync::broadcast::Receiver<Event>,
    snap: crate::session::Snapshot,
) {
    let hello = json!({
        "type": "state",
        "id": null,
        "word": snap.word,
        "whose_turn": snap.whose_turn,
        "status": snap.status,
        "lengths": snap.lengths,
    });
    if socket.send(Message::Text(hello.to_string().into())).await.is_err() {
        return;
    }
    loop {
        match rx.recv().await {
            Ok(e) => {
                let text = serde_json::to_string(&e).expect("event serializes");
                if socket.send(Message::Text(text.into())).await.is_err() {
                    return;
                }
            }
            Err(RecvError::Lagged(n)) => {
                let msg = json!({"type": "lagged", "missed": n});
                if socket.send(Message::Text(msg.to_string().into())).await.is_err() {
                    return;
                }
            }
            Err(RecvError::Closed) => return,
        }
    }
}

pub async fn serve(addr: SocketAddr, state: AppState) -> anyhow::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    eprintln!("listening on {}", listener.local_addr()?);
    axum::serve(listener, router(state)).await?;
    Ok(())
}
