//! Session service for the persuasive dialogue engine: the `/session`
//! WebSocket endpoint, a terminal REPL and the command-line tools.

pub mod repl;
pub mod service;
pub mod ws;

pub use service::Service;
