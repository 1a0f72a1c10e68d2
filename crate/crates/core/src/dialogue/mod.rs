//! Needs-driven dialogue management on top of the kernel.

mod engine;
mod needs;
pub mod policy;
mod technique;
mod types;

pub use engine::{state_digest, DialogueError, Engine};
pub use needs::{
    climax_step, current_climax_step, emerge_needs, farewell_pending, init_state, is_complete,
    ClimaxStep,
};
pub use technique::choose_technique;
pub use types::*;
