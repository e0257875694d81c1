//! Transports for the session protocol: HTTP and newline-delimited JSON on
//! standard streams.
//!
//! Over HTTP, requests carrying the same `x-session` header share a session;
//! requests without it use the session named `default`.

use std::collections::HashMap;
use std::io::{BufRead, Write};
use std::net::SocketAddr;
use std::sync::{Arc, Mutex};

use axum::extract::State;
use axum::http::HeaderMap;
use axum::routing::{get, post};
use axum::{Json, Router};
use tokio::net::TcpListener;

use squarepack::PackerConfig;

use crate::session::{PlaceBody, Response, Session};

pub const SESSION_HEADER: &str = "x-session";

#[derive(Clone)]
struct Shared {
    config: PackerConfig,
    sessions: Arc<Mutex<HashMap<String, Session>>>,
}

impl Shared {
    fn with_session<T>(&self, headers: &HeaderMap, f: impl FnOnce(&mut Session) -> T) -> T {
        let key = headers
            .get(SESSION_HEADER)
            .and_then(|v| v.to_str().ok())
            .unwrap_or("default")
            .to_string();
        let mut sessions = self.sessions.lock().expect("session lock");
        let session = sessions
            .entry(key)
            .or_insert_with(|| Session::new(self.config));
        f(session)
    }
}

async fn place(State(st): State<Shared>, headers: HeaderMap, body: String) -> Json<Response> {
    Json(st.with_session(&headers, |s| {
        match serde_json::from_str::<PlaceBody<'_>>(&body) {
            Ok(b) => s.place_raw(Some(b.height)),
            Err(e) => s.reject("parse_error", e.to_string()),
        }
    }))
}

async fn state(State(st): State<Shared>, headers: HeaderMap) -> Json<Response> {
    Json(st.with_session(&headers, Session::state))
}

async fn reset(State(st): State<Shared>, headers: HeaderMap) -> Json<Response> {
    Json(st.with_session(&headers, Session::reset))
}

pub fn router(config: PackerConfig) -> Router {
    let shared = Shared {
        config,
        sessions: Arc::new(Mutex::new(HashMap::new())),
    };
    Router::new()
        .route("/place", post(place))
        .route("/state", get(state))
        .route("/reset", post(reset))
        .with_state(shared)
}

/// Binds `127.0.0.1:port` (0 picks a free port) and serves until the task is
/// dropped. `on_bind` receives the bound address.
pub async fn serve_http(
    port: u16,
    config: PackerConfig,
    on_bind: impl FnOnce(SocketAddr),
) -> std::io::Result<()> {
    let listener = TcpListener::bind(("127.0.0.1", port)).await?;
    on_bind(listener.local_addr()?);
    axum::serve(listener, router(config)).await
}

/// Answers one request per input line until end of input.
pub fn serve_stdio(
    input: impl BufRead,
    mut output: impl Write,
    config: PackerConfig,
) -> std::io::Result<()> {
    let mut session = Session::new(config);
    for line in input.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let resp = session.handle_line(&line);
        serde_json::to_writer(&mut output, &resp)?;
        output.write_all(b"\n")?;
        output.flush()?;
    }
    Ok(())
}
