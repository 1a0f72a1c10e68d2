use std::path::PathBuf;
use std::sync::Arc;

use axum::extract::ws::{Message, WebSocket, WebSocketUpgrade};
use axum::extract::State;
use axum::response::{Html, IntoResponse};
use axum::routing::get;
use axum::Router;
use persuade_core::session::{ErrorCode, ServerMessage};
use tower_http::services::ServeDir;

use crate::service::Service;

const INDEX: &str = include_str!("../assets/index.html");

/// `/session` for the protocol and `/` for the client page: either the files
/// in `assets`, or the built-in page.
pub fn router(service: Arc<Service>, assets: Option<PathBuf>) -> Router {
    let app = Router::new()
        .route("/session", get(upgrade))
        .with_state(service);
    match assets {
        Some(dir) => app.fallback_service(ServeDir::new(dir)),
        None => app.route("/", get(|| async { Html(INDEX) })),
    }
}

async fn upgrade(ws: WebSocketUpgrade, State(service): State<Arc<Service>>) -> impl IntoResponse {
    ws.on_upgrade(move |socket| serve_socket(socket, service))
}

async fn serve_socket(mut socket: WebSocket, service: Arc<Service>) {
    while let Some(Ok(frame)) = socket.recv().await {
        let replies = match frame {
            Message::Text(text) => service.handle_text(text.as_str()),
            Message::Binary(_) => vec![ServerMessage::error(
                ErrorCode::BadRequest,
                "frames must be UTF-8 text",
            )],
            Message::Close(_) => break,
            Message::Ping(_) | Message::Pong(_) => continue,
        };
        for reply in replies {
            if socket.send(Message::Text(reply.to_json().into())).await.is_err() {
                return;
            }
        }
    }
}
