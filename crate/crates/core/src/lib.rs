//! Needs-driven persuasive dialogue engine.
//!
//! [`kernel`] is a small production-system with activation-based retrieval.
//! [`dialogue`] runs an information-state dialogue manager on top of it,
//! [`pack`] loads and validates the domain script, [`session`] wraps an engine
//! with seeding, transcripts and the wire protocol, and [`sim`] drives sessions
//! with scripted users and audits the resulting transcripts.

pub mod dialogue;
pub mod kernel;
pub mod pack;
pub mod session;
pub mod sim;
